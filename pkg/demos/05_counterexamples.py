"""
The two counterexample maps
===========================

The ring map has an L^q-integrable K_I yet an essential singularity; the
folding map has K_I = 1 off the folds, is bounded, and is not open.
"""

import numpy as np

from isosing import lemma1_chain, verify_theorem4, verify_theorem5

# %% ring map
for q, p, n in ((1, 1, 2), (2, 1, 3)):
    rep = verify_theorem4(q, p, n)
    print(f"q={q} p={p} n={n} alpha={rep.results['alpha']:.3f} checks={rep.checks}")

# %% outside the admissible exponent range the integrability check fails
rep = verify_theorem4(5, 1, 2, alpha=0.6)
print("alpha=0.6, q=5:", rep.checks["ki_lq_integrable"])

# %% folding map
for n in (2, 3):
    rep = verify_theorem5(n)
    print(f"n={n} K_I error {rep.results['ki_max_error']:.1e}  max|g| {rep.results['max_abs_on_ball']:.4f}")
    print("   ", rep.checks)

# %% contradiction chain: the lower bound blows up once k0 passes the threshold
for k0 in (1, 2):
    rep = lemma1_chain(k0, A=2.0, p=1.0, n=2, r=0.5, loglog_grid=np.linspace(2, 30, 8))
    print(f"k0={k0} threshold={rep.threshold:.4f} exponent={rep.exponent:+.4f} breaks at loglog={rep.crossing_loglog:.3g}")
