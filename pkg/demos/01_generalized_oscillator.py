# %% [markdown]
# # Generalized harmonic oscillator
#
# H = (X q^2 + 2 Y q p + Z p^2) / 2 has a single action I and frequency
# omega = sqrt(XZ - Y^2).  The classical metric scales as I^2 and the
# curvature as I, and both match the quantum ground-state tensors once
# I^2 -> hbar^2 and I -> hbar/2.

# %%
import numpy as np

from psgeo import check_semiclassical, classical_curvature, classical_metric
from psgeo.models import gho_model

np.set_printoptions(precision=5, suppress=True)

m = gho_model(X=1.3, Y=0.4, Z=0.8)
g = classical_metric(m, [1.0])
F = classical_curvature(m, [1.0])
print("metric g(I=1):\n", g.matrix)
print("curvature F(I=1):\n", F.matrix)

# %% [markdown]
# The metric is degenerate: moving along (X, Y, Z) -> s (X, Y, Z) does not
# change the orbit shapes, only the frequency, so one eigenvalue vanishes.

# %%
print("eigenvalues:", g.eigenvalues())
print("g @ (X, Y, Z):", g.matrix @ np.array([1.3, 0.4, 0.8]))

# %% [markdown]
# Action scaling and the semiclassical comparison.

# %%
for s in (0.5, 2.0):
    gs = classical_metric(m, [s]).matrix
    Fs = classical_curvature(m, [s]).matrix
    print(f"s={s}: |g(s)-s^2 g(1)|={np.abs(gs - s * s * g.matrix).max():.1e}, "
          f"|F(s)-s F(1)|={np.abs(Fs - s * F.matrix).max():.1e}")

rep = check_semiclassical(m, m.registry(hbar=1.0))
print("quantized classical metric minus quantum metric:", rep.deviations())
