# %% [markdown]
# # Spin in a magnetic field
#
# A fermionic model with two Grassmann modes.  In spherical field
# coordinates (B, theta, phi) the metric is diag(0, 1, sin^2 theta) up to a
# factor, and the curvature integrates to 2 pi (I1 - I2) over the sphere,
# which is a monopole at B = 0.

# %%
import numpy as np

from psgeo import check_semiclassical, classical_curvature, classical_metric, tensor_transform
from psgeo.models import spin_model
from psgeo.models.spin import spherical_jacobian

np.set_printoptions(precision=6, suppress=True)
I = [0.9, 0.2]

sph = spin_model(B=1.2, theta=0.7, phi=0.4)
print("spherical metric:\n", classical_metric(sph, I).matrix)
print("spherical curvature:\n", classical_curvature(sph, I).matrix)

# %% [markdown]
# The Cartesian tensors pulled back by the Jacobian agree with the spherical ones.

# %%
cart = spin_model(**dict(zip(("B1", "B2", "B3"), sph.field)))
J = spherical_jacobian(1.2, 0.7, 0.4)
diff = tensor_transform(classical_metric(cart, I), J).matrix - classical_metric(sph, I).matrix
print("congruence residual:", np.abs(diff).max())

# %% [markdown]
# Flux through the unit sphere by Gauss-Legendre quadrature in theta.

# %%
x, w = np.polynomial.legendre.leggauss(40)
theta = 0.5 * np.pi * (x + 1)
F = [classical_curvature(spin_model(B=1.0, theta=t, phi=0.0), I).matrix[1, 2] for t in theta]
flux = 2 * np.pi * 0.5 * np.pi * np.dot(w, F)
print(f"flux = {flux:.10f}, 2 pi (I1 - I2) = {2 * np.pi * (I[0] - I[1]):.10f}")

rep = check_semiclassical(sph, actions=I, state="+")
print("ratio relations hold:", rep.holds(1e-12))
