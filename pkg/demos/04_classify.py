"""
Classifying an isolated singularity by sampling
===============================================
"""

import numpy as np

from isosing import FoldingParams, RingMapParams, classify, make_folding_map, make_inversion, make_ring_map, make_standard

maps = {
    "identity": make_standard("identity", 2),
    "inversion": make_inversion(2),
    "ring": make_ring_map(RingMapParams(0.5, 2)),
    "folding": make_folding_map(FoldingParams(2)),
}

# %% verdicts with the evidence behind them
for name, f in maps.items():
    rep = classify(f, [0, 0], 0.3)
    osc = rep.image_oscillation
    print(f"{name:9s} {rep.verdict:10s} osc tail {np.round(osc[-3:], 4)}  ({rep.reason})")

# %% oscillation per level for the ring map: it does not shrink
rep = classify(maps["ring"], [0, 0], 0.3, levels=8)
for r, osc, (lo, hi) in zip(rep.radii, rep.image_oscillation, rep.magnitude_range):
    print(f"r={r:.4f}  diam={osc:.4f}  |f| in [{lo:.4f}, {hi:.4f}]")
