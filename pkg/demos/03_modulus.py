"""
Discrete modulus brackets
=========================

Lower and upper bounds from the dual program, against closed forms.
"""

import math

from isosing import analytic_modulus, cap_family, check_poletskii, discrete_modulus, make_inversion, make_standard, ring_family
from isosing.modulus import default_grid

# %% ring and half-ring families
families = {
    "ring n=2": ring_family(1.0, math.e),
    "cap n=2": cap_family([0.0, 0.0], 0.1, 0.1 * math.e),
    "ring n=3": ring_family(1.0, math.e, n=3),
    "cap n=3": cap_family([0.0, 0.0, 0.0], 0.1, 0.1 * math.e),
}
for name, fam in families.items():
    res = discrete_modulus(fam)
    exact = analytic_modulus(fam)
    print(f"{name}: [{res.lower_bound:.5f}, {res.upper_bound:.5f}]  exact {exact:.5f}  iters {res.iterations}")

# %% refinement: coarser grids widen the discretization error
for cells in (8, 16, 32, 64):
    fam = ring_family(1.0, math.e, shape=(2 * cells,))
    res = discrete_modulus(fam, default_grid(fam, radial_cells=cells, angular_shape=(cells,)))
    print(f"{cells:3d} cells  estimate {res.estimate:.5f}  rel err {res.estimate / (2 * math.pi) - 1:+.2e}")

# %% modulus inequality for three homeomorphisms
for f in (make_standard("identity", 2), make_standard("linear", 2, diag=[2, 1]), make_inversion(2)):
    rep = check_poletskii(f, ring_family(1.0, math.e))
    print(f"{f.name:12s} M(f G) <= {rep.lhs_upper:.4f}  int K_I rho^2 = {rep.rhs:.4f}  slack {rep.slack:+.4f}")
print("K_I = 2 for diag(2,1), so its right side is 4 pi =", round(4 * math.pi, 4))
