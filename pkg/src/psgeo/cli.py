"""
Command-line front end: ``psgeo tensor``, ``psgeo verify`` and ``psgeo sweep``.

Exit codes: 0 success, 1 verification failure, 2 usage or parameter error
(including unsupported backends), 3 numerical-quality failure.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import json
import math
import os
import re
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .core import CapabilityError, NumericalQualityError, PsgeoError, RegistryError
from .engine import check_semiclassical, classical_curvature, classical_metric
from .kernels import KernelConfig
from .models import DEFAULT_PARAMS, MODEL_IDS, build_model, canonical_order
from .verification import DEFAULT_ACTIONS, format_table, run_checks

__all__ = ["main", "build_parser", "RunRecord", "parse_assignments", "parse_value",
           "compute_tensors"]

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

_PI_RE = re.compile(r"^([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?|[+-])?\*?pi(?:/(\d+\.?\d*))?$")


class UsageError(PsgeoError, ValueError):
    pass


def parse_value(text: str) -> float:
    """A float, or a multiple/fraction of ``pi`` such as ``pi/2`` or ``2*pi``."""
    s = text.strip()
    try:
        return float(s)
    except ValueError:
        pass
    m = _PI_RE.match(s.replace(" ", ""))
    if not m:
        raise UsageError(f"cannot parse number {text!r}")
    coef = m.group(1)
    coef = -1.0 if coef == "-" else 1.0 if coef in (None, "+") else float(coef)
    den = float(m.group(2)) if m.group(2) else 1.0
    return coef * math.pi / den


def parse_assignments(items) -> dict[str, str]:
    """Parse ``["X=1,Y=0", "Z=2"]`` into an ordered name -> text mapping."""
    out: dict[str, str] = {}
    for item in items or []:
        for part in item.split(","):
            part = part.strip()
            if not part:
                continue
            name, sep, value = part.partition("=")
            if not sep or not name.strip():
                raise UsageError(f"expected name=value, got {part!r}")
            out[name.strip()] = value.strip()
    return out


def _float_text(x: float) -> str:
    if not math.isfinite(x):
        raise NumericalQualityError(f"non-finite value {x} in output")
    return format(x + 0.0, ".17g")  # + 0.0 drops negative zero


def _dump(obj) -> str:
    """JSON text with every float written at 17 significant digits."""
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (float, np.floating)):
        return _float_text(float(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_dump(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_dump(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


@dataclass
class RunRecord:
    """One tensor computation, serializable to stable JSON."""

    command: list[str]
    model: str
    params: dict[str, float]
    actions: dict[str, float]
    backend: str
    metric: list[list[float]]
    curvature: list[list[float]] | None
    meta: dict = field(default_factory=dict)
    relation: dict | None = None
    version: str = __version__
    wall_time: float | None = None  # reported on stderr, not serialized

    def to_dict(self) -> dict:
        meta = dict(self.meta, command=list(self.command), version=self.version)
        if self.relation is not None:
            meta["relation"] = self.relation
        return {"model": self.model, "params": self.params, "actions": self.actions,
                "backend": self.backend, "metric": self.metric, "curvature": self.curvature,
                "meta": meta}

    def to_json(self) -> str:
        return _dump(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "RunRecord":
        meta = dict(d["meta"])
        command = meta.pop("command", [])
        version = meta.pop("version", __version__)
        relation = meta.pop("relation", None)
        return cls(command, d["model"], dict(d["params"]), dict(d["actions"]), d["backend"],
                   d["metric"], d["curvature"], meta, relation, version)

    @classmethod
    def from_json(cls, text: str) -> "RunRecord":
        return cls.from_dict(json.loads(text))


def _clean_meta(meta: dict) -> dict:
    out = {}
    for k, v in meta.items():
        if isinstance(v, (np.floating, np.integer)):
            v = v.item()
        if isinstance(v, float) and not math.isfinite(v):
            continue
        out[k] = v
    return out


def compute_tensors(model_id: str, params: dict[str, float], actions: dict[str, float],
                    backend: str = "harmonic", epsilon: float | None = None,
                    grid: int | None = None, horizon: float | None = None,
                    order: list[str] | None = None):
    """
    Metric and curvature matrices (reordered to ``order``) and metadata.

    Models the chosen backend cannot handle raise :class:`CapabilityError`.
    """
    model = build_model(model_id, params)
    meta: dict = {}
    if backend == "closed":
        g = model.metric_closed(actions)
        F = model.curvature_closed(actions)
    elif backend == "harmonic":
        cfg = KernelConfig() if epsilon is None else KernelConfig(epsilon, "damped-numeric")
        gt = classical_metric(model, actions, cfg)
        g, F = gt.matrix, classical_curvature(model, actions, cfg).matrix
        meta.update(gt.meta)
    elif backend == "sampler":
        from .sampler import sample_tensor
        eps = None if epsilon is None else epsilon * 0.5 ** np.arange(5)
        gt = sample_tensor(model, actions, grid, horizon, eps)
        g = gt.matrix
        F = sample_tensor(model, actions, grid, horizon, eps, kind="curvature").matrix
        meta.update(gt.meta)
    else:
        raise UsageError(f"unknown backend {backend!r}")
    names = list(model.param_names)
    if order and set(order) == set(names):
        perm = [names.index(n) for n in order]
        g = np.asarray(g)[np.ix_(perm, perm)]
        F = np.asarray(F)[np.ix_(perm, perm)]
        names = list(order)
    return model, names, np.asarray(g, dtype=float), np.asarray(F, dtype=float), meta


def _model_inputs(args):
    params_txt = parse_assignments(args.params)
    params = {k: parse_value(v) for k, v in params_txt.items()} or dict(DEFAULT_PARAMS[args.model])
    actions_txt = parse_assignments(args.actions)
    actions = ({k: parse_value(v) for k, v in actions_txt.items()}
               or dict(DEFAULT_ACTIONS[args.model]))
    return params, actions


# -- commands ----------------------------------------------------------------

def cmd_tensor(args, argv) -> int:
    t0 = time.perf_counter()
    params, actions = _model_inputs(args)
    model, names, g, F, meta = compute_tensors(
        args.model, params, actions, args.backend, args.epsilon, args.grid, args.horizon,
        order=list(params))
    relation = None
    if args.relations:
        rep = check_semiclassical(model, actions=actions)
        relation = {"deviations": rep.deviations(), "notes": rep.notes}
    record = RunRecord(list(argv), args.model, {n: params[n] for n in names}, actions,
                       args.backend, g.tolist(), F.tolist(), _clean_meta(meta), relation)
    record.wall_time = time.perf_counter() - t0
    if args.out == "json":
        print(record.to_json())
    else:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(["kind", "i", "j", "name_i", "name_j", "value"])
        for kind, mat in (("metric", g), ("curvature", F)):
            for i, j in itertools.product(range(len(names)), repeat=2):
                w.writerow([kind, i, j, names[i], names[j], _float_text(mat[i, j])])
    print(f"wall time {record.wall_time:.3f} s", file=sys.stderr)
    return EXIT_OK


def cmd_verify(args, argv) -> int:
    models = MODEL_IDS if args.models == "all" else [m.strip() for m in args.models.split(",")]
    unknown = set(models) - set(MODEL_IDS)
    if unknown:
        raise UsageError(f"unknown models {sorted(unknown)}")
    rows = run_checks(models, args.backend, args.tol)
    print(format_table(rows))
    failed = [r for r in rows if not r.ok]
    print(f"{len(rows) - len(failed)}/{len(rows)} checks passed", file=sys.stderr)
    return EXIT_OK if not failed else EXIT_VERIFY


def _grid_axis(spec: str):
    name, sep, rng = spec.partition("=")
    parts = rng.split(":")
    if not sep or len(parts) != 3:
        raise UsageError(f"--param-grid expects name=start:stop:count, got {spec!r}")
    count = int(parts[2])
    if count < 1:
        raise UsageError("grid count must be positive")
    return name.strip(), np.linspace(parse_value(parts[0]), parse_value(parts[1]), count)


def _sweep_row(model_id, point, actions, backend, order):
    try:
        _, names, g, F, _ = compute_tensors(model_id, point, actions, backend, order=order)
    except (PsgeoError, ArithmeticError) as exc:
        reason = str(exc).replace("\n", " ")
        return None, f"skipped:{reason}"
    return (g, F), "ok"


def cmd_sweep(args, argv) -> int:
    fixed = {k: parse_value(v) for k, v in parse_assignments(args.params).items()}
    axes = [_grid_axis(s) for s in args.param_grid]
    names = set(fixed) | {n for n, _ in axes}
    order = list(fixed) if set(fixed) == names else canonical_order(args.model, names)
    actions = ({k: parse_value(v) for k, v in parse_assignments(args.actions).items()}
               or dict(DEFAULT_ACTIONS[args.model]))
    points = []
    for combo in itertools.product(*(vals for _, vals in axes)):
        p = dict(fixed)
        p.update({n: float(v) for (n, _), v in zip(axes, combo)})
        points.append({n: p[n] for n in order})
    n = len(order)
    header = (order + [f"g_{i}{j}" for i in range(n) for j in range(n)]
              + [f"F_{i}{j}" for i in range(n) for j in range(i + 1, n)]
              + ["det"] + [f"eig_{i}" for i in range(n)] + ["status"])
    threads = int(os.environ.get("PSGEO_THREADS", "0") or 0) or min(8, os.cpu_count() or 1)
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        results = list(pool.map(
            lambda p: _sweep_row(args.model, p, actions, args.backend, order), points))
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(header)
    for p, (res, status) in zip(points, results):
        row = [_float_text(p[k]) for k in order]
        if res is None:
            row += [""] * (len(header) - len(row) - 1)
        else:
            g, F = res
            row += [_float_text(v) for v in g.reshape(-1)]
            row += [_float_text(F[i, j]) for i in range(n) for j in range(i + 1, n)]
            row += [_float_text(np.linalg.det(g))]
            row += [_float_text(v) for v in np.linalg.eigvalsh(g)]
        w.writerow(row + [status])
    return EXIT_OK


# -- entry point -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="psgeo", description="Classical metric and curvature of integrable systems.")
    parser.add_argument("--version", action="version", version=f"psgeo {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def model_flags(p):
        p.add_argument("--model", required=True, choices=MODEL_IDS)
        p.add_argument("--params", action="append", metavar="NAME=VALUE[,...]",
                       help="model parameters; 'pi' multiples allowed")
        p.add_argument("--actions", action="append", metavar="NAME=VALUE[,...]")
        p.add_argument("--backend", choices=("harmonic", "sampler", "closed"),
                       default="harmonic")

    pt = sub.add_parser("tensor", help="compute the metric and curvature at one point")
    model_flags(pt)
    pt.add_argument("--out", choices=("json", "csv"), default="json")
    pt.add_argument("--epsilon", type=float,
                    help="damping rate; switches the harmonic kernel to damped-numeric mode")
    pt.add_argument("--grid", type=int, help="sampler angle points per dimension")
    pt.add_argument("--horizon", type=float, help="sampler integration horizon")
    pt.add_argument("--relations", action="store_true",
                    help="include the semiclassical relation deviations")
    pt.set_defaults(func=cmd_tensor)

    pv = sub.add_parser("verify", help="run the self-check suite")
    pv.add_argument("--models", default="all", help="'all' or a comma-separated list")
    pv.add_argument("--backend", choices=("harmonic", "sampler", "closed"), default="harmonic")
    pv.add_argument("--tol", type=float, default=None,
                    help="tolerance (default 1e-8, or 1e-4 for the sampler)")
    pv.set_defaults(func=cmd_verify)

    ps = sub.add_parser("sweep", help="CSV table over a parameter grid")
    model_flags(ps)
    ps.add_argument("--param-grid", action="append", required=True,
                    metavar="NAME=START:STOP:COUNT")
    ps.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, argv)
    except (UsageError, RegistryError, CapabilityError) as exc:
        print(f"psgeo: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalQualityError as exc:
        print(f"psgeo: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (PsgeoError, ValueError) as exc:
        print(f"psgeo: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
