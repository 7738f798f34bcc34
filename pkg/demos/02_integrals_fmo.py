"""
Annulus integrals and mean oscillation
======================================
"""

import math

import numpy as np

from isosing.geometry import AnnulusSpec
from isosing.integrals import (
    annulus_condition_lhs,
    check_condition_14,
    constant_field,
    fmo_estimate,
    log_weight,
    radial_field,
)

# %% unit field with the log weight: 2 pi (1/1 - 1/2) = pi
lhs = annulus_condition_lhs(constant_field(1.0), log_weight(), AnnulusSpec([0, 0], math.exp(-2), math.exp(-1)))
print("LHS =", lhs, " pi =", math.pi)

# %% log(1/|x|) in the plane saturates the log-weight condition with A = 2 pi
Q = radial_field(lambda r: np.log(1 / r), [0, 0])
rep = check_condition_14(Q, [0, 0], 0.1, 2 * math.pi, [1e-3, 1e-6, 1e-12])
for row in rep.rows:
    print(f"eps={row.eps:.0e}  lhs={row.lhs:.6f}  rhs={row.rhs:.6f}  ok={row.passed}")

# %% mean oscillation on shrinking balls
radii = 0.25 * 2.0 ** -np.arange(16)
for name, field in (
    ("const", constant_field(3.0)),
    ("log(1/r)", radial_field(lambda r: np.log(1 / r), [0, 0])),
    ("1/r", radial_field(lambda r: 1 / r, [0, 0])),
):
    est = fmo_estimate(field, [0, 0], radii)
    print(f"{name:9s} {est.verdict:8s} last oscillations {np.round(est.oscillations[-3:], 5)}")
print("closed form for log(1/r), n=2:", 2 / (2 * math.e))
