"""End-to-end checks of the two counterexample constructions."""

from __future__ import annotations

import math

import numpy as np
from scipy.stats import qmc

from . import __version__
from .dilatation import inner_dilatation, ki_lq_norm
from .gallery import FoldingParams, RingMapParams, make_folding_map, make_ring_map
from .geometry import AnnulusSpec, sphere_sample
from .report import Report
from .singularity import GrowthEnvelope, check_growth, classify, count_preimages

CLASSIFY_RMAX = 0.3
CLASSIFY_LEVELS = 12
LOG_RADII = 0.3 * 2.0 ** -np.arange(16)  # all below 1/e
KI_TOL = 1e-6


def halton_ball(n: int, count: int, radius: float, skip_origin: bool = True) -> np.ndarray:
    """First ``count`` points of the unscrambled Halton sequence that fall in
    the ball ``|x| < radius`` (excluding the origin)."""
    sampler = qmc.Halton(d=n, scramble=False)
    out = []
    while sum(len(o) for o in out) < count:
        u = radius * (2.0 * sampler.random(4 * count) - 1.0)
        r = np.linalg.norm(u, axis=1)
        out.append(u[(r < radius) & ((r > 0) if skip_origin else True)])
    return np.concatenate(out)[:count]


def default_alpha(q: float, n: int) -> float:
    """Midpoint of ``(0, min(1, n / (q (n-1))))``."""
    return 0.5 * min(1.0, n / (q * (n - 1)))


def lq_inner_radius(alpha: float) -> float:
    # keeps sigma_min / sigma_max above the degeneracy cutoff in double precision
    return min(1e-3, 10.0 ** (-3.0 / alpha))


def verify_theorem4(q: float, p: float, n: int, alpha: float | None = None) -> Report:
    """Ring map ``f(x) = (1 + |x|^alpha) x/|x|``: growth bound with C = 2,
    integrability of K_I^q near 0, essential singularity, ``|f| < 2``."""
    if not (q >= 1 and p > 0 and int(n) == n and n >= 2):
        raise ValueError("need q >= 1, p > 0 and integer n >= 2")
    n = int(n)
    upper = n / (q * (n - 1))
    diagnostic = alpha is not None
    alpha = default_alpha(q, n) if alpha is None else float(alpha)
    f = make_ring_map(RingMapParams(alpha, n))
    b = np.zeros(n)

    growth = check_growth(f, b, GrowthEnvelope("log_power", 2.0, p), LOG_RADII)
    r_in = lq_inner_radius(alpha)
    lq = ki_lq_norm(f, AnnulusSpec(b, r_in, 0.5), q)
    cls = classify(f, b, CLASSIFY_RMAX, CLASSIFY_LEVELS)
    pts = halton_ball(n, 10_000, 1.0)
    mags = np.linalg.norm(f(pts), axis=1)

    checks = {
        "growth_log_envelope": growth.passed,
        "ki_lq_integrable": lq.converged,
        "essential_singularity": cls.verdict == "essential",
        "bounded_by_2": bool(np.max(mags) < 2.0),
    }
    results = {
        "alpha": alpha,
        "alpha_admissible_upper": upper,
        "alpha_in_range": bool(0 < alpha < upper),
        "growth": {"radii": growth.radii, "max_abs": growth.max_abs, "envelope": growth.envelope_values},
        "lq": {
            "annulus": [r_in, 0.5], "value": lq.value, "tail_slope": lq.tail_slope,
            "converged": lq.converged,
        },
        "classify": {"verdict": cls.verdict, "reason": cls.reason, "oscillation": cls.image_oscillation},
        "max_abs_on_ball": float(np.max(mags)),
    }
    prov = {
        "version": __version__, "sphere_count": cls.sphere_count, "lq_levels_per_decade": 4,
        "lq_nodes_per_level": 8, "bounded_samples": len(pts), "classify_levels": CLASSIFY_LEVELS,
        "classify_thresholds": cls.thresholds, "diagnostic_alpha": diagnostic,
    }
    plot = (["radius", "max_abs_f", "envelope"], list(zip(growth.radii, growth.max_abs, growth.envelope_values)))
    return Report("verify-theorem4", {"q": q, "p": p, "n": n, "alpha": alpha}, results, checks, prov, plot=plot)


def _fold_distance(z):
    """Distance of each coordinate to the nearest fold hyperplane t = 2k+1."""
    u = np.mod(z - 1.0, 2.0)
    return np.min(np.minimum(u, 2.0 - u), axis=1)


def non_openness_probe(g, n: int, on_fold: bool = True, delta: float = 1e-4):
    """Image of a small ball about ``x0`` stays on one side of the hyperplane
    ``y_1 = g_1(x0)`` when ``x0`` lies on a fold; returns (positive, x0)."""
    z0 = np.array([1.0 if on_fold else 0.5] + [0.3 / k for k in range(1, n)])
    x0 = z0 / np.dot(z0, z0)
    y0 = g(x0)
    pts = [x0 + delta * halton_ball(n, 512, 1.0)]
    for s in (1.0, 0.5, 0.25):
        pts.append(sphere_sample(x0, s * delta, 64 if n == 2 else 200)[0])
    y = g(np.concatenate(pts))
    positive = bool(np.all(y[:, 0] <= y0[0] * (1 + 1e-12)))
    return positive, x0


def verify_theorem5(n: int, p: float = 1.0) -> Report:
    """Folding map: K_I = 1 off the folds, |g| <= 1, log envelope with C = 1,
    essential singularity, not open at a fold point, isolated preimages."""
    if int(n) != n or n < 2:
        raise ValueError("need integer n >= 2")
    n = int(n)
    g = make_folding_map(FoldingParams(n))
    b = np.zeros(n)

    pts = halton_ball(n, 1200, 1.0 / math.e)
    z = pts / np.sum(pts**2, axis=1, keepdims=True)
    off = _fold_distance(z) > 1e-9
    skipped = int((~off[: np.flatnonzero(off)[999] + 1]).sum())
    pts = pts[off][:1000]
    ki = inner_dilatation(g, pts)
    ki_err = float(np.max(np.abs(ki - 1.0)))

    # a point exactly on a fold is excluded from the K_I check
    fold_point = np.array([1.0] + [0.0] * (n - 1))
    fold_skipped = not bool(_fold_distance(fold_point[None, :])[0] > 1e-9)

    cube = halton_ball(n, 10_000, 1.0)
    mags = np.linalg.norm(g(cube), axis=1)
    env = check_growth(g, b, GrowthEnvelope("log_power", 1.0, p), LOG_RADII)
    cls = classify(g, b, CLASSIFY_RMAX, CLASSIFY_LEVELS)
    probe, x0 = non_openness_probe(g, n, True)
    control, _ = non_openness_probe(g, n, False)
    y = np.full(n, 0.2 / math.sqrt(n))
    pre = count_preimages(g, y, AnnulusSpec(b, 0.3, 1.0), resolution=(48, 96) if n == 2 else None)

    checks = {
        "ki_equals_one": bool(len(pts) == 1000 and ki_err <= KI_TOL),
        "bounded_by_1": bool(np.max(mags) <= 1.0 + 1e-15),
        "log_envelope": env.passed,
        "essential_singularity": cls.verdict == "essential",
        "not_open_at_fold": probe and not control,
        "isolated_preimages": bool(pre.count >= 1 and pre.min_separation > 1e-6),
    }
    results = {
        "ki_points": len(pts), "ki_points_skipped": skipped, "ki_max_error": ki_err,
        "fold_point_skipped": fold_skipped,
        "max_abs_on_ball": float(np.max(mags)),
        "envelope": {"radii": env.radii, "max_abs": env.max_abs, "envelope": env.envelope_values},
        "classify": {"verdict": cls.verdict, "reason": cls.reason},
        "non_openness": {"fold_point": x0, "positive": probe, "control_generic_point_positive": control},
        "preimages": {"y": y, "count": pre.count, "min_separation": pre.min_separation},
    }
    prov = {
        "version": __version__, "ki_tolerance": KI_TOL, "sphere_count": cls.sphere_count,
        "bounded_samples": len(cube), "preimage_resolution": pre.resolution,
        "classify_thresholds": cls.thresholds,
    }
    plot = (["radius", "max_abs_g", "envelope"], list(zip(env.radii, env.max_abs, env.envelope_values)))
    return Report("verify-theorem5", {"n": n, "p": p}, results, checks, prov, plot=plot)
