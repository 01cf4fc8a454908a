# %% [markdown]
# # Coupled oscillators: separable and anomalous cases
#
# Two coupled quadratic models.  The symmetric pair (k, kp) separates into
# normal modes whose frequencies depend on the parameters only through
# omega_a, so the metric is a sum of two rank-one terms.  The linearly
# coupled pair (A, B, C) also rotates its normal modes with the
# parameters; this rotation produces an I1*I2 cross term and, after
# quantization, a residual of -1/2 d(alpha) d(alpha).

# %%
import numpy as np

from psgeo import check_semiclassical, classical_curvature, classical_metric
from psgeo.models import lco_model, sco_model

np.set_printoptions(precision=6, suppress=True)

sco = sco_model(k=1.0, kp=0.5)
I = [1.0, 0.5]
g = classical_metric(sco, I).matrix
print("SCO metric:\n", g)
print("sum of frequency terms:\n", sum(sco.metric_decomposition(I)))
print("det:", np.linalg.det(g), " closed form:", sco.determinant_closed(I))
print("curvature max:", np.abs(classical_curvature(sco, I).matrix).max())

# %%
lco = lco_model(A=2.0, B=1.0, C=1.0)
I = [0.8, 1.1]
g = classical_metric(lco, I).matrix
print("LCO metric:\n", g)
print("M/N/L closed form residual:", np.abs(g - lco.metric_closed(I)).max())

# %% [markdown]
# The quantized metric misses the quantum one by an amount that depends on
# the parameters.  It is exactly the anomaly term.

# %%
rep = check_semiclassical(lco)
print("quantum - quantized:\n", rep.metric_residual)
print("-1/2 da da:\n", rep.anomaly_expected)
