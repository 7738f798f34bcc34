"""
Distortion of the ring map
==========================

Inner and outer dilatation from singular values, and where K_I^q stops
being integrable.
"""

import numpy as np

from isosing import AnnulusSpec, RingMapParams, dilatations_at, ki_lq_norm, make_ring_map

# %% one point, both Jacobian paths
f = make_ring_map(RingMapParams(0.5, 2))
for method in ("analytic", "fd"):
    rec = dilatations_at(f, [0.25, 0.0], method)
    print(method, "sigma =", rec.singular_values, "K_I =", rec.K_I, "K_O =", rec.K_O)

# %% K_I along a ray against ((1 + r^a) / (a r^a))^(n-1)
r = np.geomspace(1e-4, 0.5, 6)
for n in (2, 3):
    f = make_ring_map(RingMapParams(0.5, n))
    pts = np.zeros((len(r), n))
    pts[:, 0] = r
    ki = [dilatations_at(f, p).K_I for p in pts]
    closed = ((1 + r**0.5) / (0.5 * r**0.5)) ** (n - 1)
    print(f"n={n}  max rel err {np.max(np.abs(np.array(ki) / closed - 1)):.1e}")

# %% the L^q threshold: finite iff alpha (n-1) q < n
n, q = 3, 2
for scale in (0.5, 0.9, 1.1, 2.0):
    alpha = scale * n / ((n - 1) * q)
    r_in = min(1e-3, 10.0 ** (-3.0 / alpha))
    res = ki_lq_norm(make_ring_map(RingMapParams(alpha, n)), AnnulusSpec(np.zeros(n), r_in, 0.5), q)
    print(f"alpha(n-1)q = {scale:.1f} n  slope {res.tail_slope:+.3f}  converged={res.converged}")
