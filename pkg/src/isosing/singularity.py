"""Sampling-based analysis of an isolated singularity.

Everything here is a desk-scale surrogate for an asymptotic statement, so
every verdict carries the thresholds that produced it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage, optimize
from scipy.spatial.distance import pdist

from .dilatation import inner_dilatation
from .gallery import MapHandle, compose, make_inversion
from .geometry import AnnulusSpec, as_point, default_sphere_count, dimension_constants, sphere_sample
from .grids import angular_edges, from_hyperspherical
from .integrals import check_condition_14

CLASSIFY_THRESHOLDS = {
    "tail_levels": 3,
    "removable_shrink": 2.0,  # oscillation ratio per level
    "pole_growth": 2.0,  # min|f| ratio across the last three levels
    "oscillation_floor": 1e-3,  # relative to max|f| on the outermost sphere
    "bounded_factor": 10.0,  # max|f| on the tail vs the outermost sphere
    "ratio_slack": 1e-6,
}


def _sphere_images(map: MapHandle, b, r, count):
    pts, _ = sphere_sample(b, r, count)
    y = map(pts)
    if not np.all(np.isfinite(y)):
        raise ArithmeticError(f"{map.name} is not finite on S(b, {r:g})")
    return y


def _diameter(y):
    return float(np.max(pdist(y))) if len(y) > 1 else 0.0


@dataclass(frozen=True)
class SingularityReport:
    verdict: str  # removable | pole | essential | inconclusive
    radii: np.ndarray
    image_oscillation: np.ndarray  # sampled diam f(S(b, r_k))
    magnitude_range: np.ndarray  # (levels, 2): min|f|, max|f| per sphere
    sphere_count: int
    thresholds: dict
    hypothesis_results: dict = field(default_factory=dict)
    reason: str = ""


def _verdict(osc, mag, th):
    k = th["tail_levels"]
    if len(osc) < k + 1:
        return "inconclusive", "too few levels"
    slack = 1 - th["ratio_slack"]
    mins, maxs = mag[:, 0], mag[:, 1]
    scale = max(maxs[0], np.finfo(float).tiny)
    tail_osc, tail_min, tail_max = osc[-k:], mins[-k:], maxs[-k:]
    bounded = bool(np.max(tail_max) <= th["bounded_factor"] * scale)

    shrink = osc[-k - 1 : -1] / np.maximum(osc[-k:], np.finfo(float).tiny)
    if bounded and (np.all(tail_osc == 0) or np.all(shrink >= th["removable_shrink"] * slack)):
        return "removable", "oscillation halves per level with bounded magnitudes"
    escaping = tail_min[-1] > scale
    if escaping and np.all(np.diff(tail_min) > 0) and tail_min[-1] >= th["pole_growth"] * slack * tail_min[0]:
        return "pole", "min|f| increases at least twofold over the last three levels"
    if bounded and np.all(tail_osc >= th["oscillation_floor"] * scale):
        return "essential", "oscillation stays above the floor with bounded magnitudes"
    if not bounded and tail_min[-1] <= tail_min[0] and np.all(tail_osc >= th["oscillation_floor"] * scale):
        return "essential", "magnitudes spread toward both 0 and infinity"
    return "inconclusive", "no rule matched"


def classify(map: MapHandle, b, r_max: float, levels: int = 12, count: int | None = None) -> SingularityReport:
    """Sample spheres ``r_k = r_max 2^-k`` and apply the recorded rules.

    Rules over the last three levels: *removable* if the oscillation shrinks
    at least twofold per level and magnitudes stay bounded; *pole* if min|f|
    increases, at least doubles and exceeds max|f| on the outermost sphere;
    *essential* if the oscillation stays above ``1e-3 * max|f|(outermost)``
    with bounded magnitudes, or magnitudes spread toward 0 and infinity at
    once; otherwise *inconclusive*.
    """
    b = as_point(b, map.dim)
    if not r_max > 0 or levels < 2:
        raise ValueError("need r_max > 0 and at least 2 levels")
    count = 4 * default_sphere_count(map.dim) if count is None else count
    radii = r_max * 2.0 ** -np.arange(levels)
    osc, mag = [], []
    for r in radii:
        y = _sphere_images(map, b, r, count)
        m = np.linalg.norm(y, axis=1)
        osc.append(_diameter(y))
        mag.append((m.min(), m.max()))
    osc, mag = np.array(osc), np.array(mag)
    verdict, reason = _verdict(osc, mag, CLASSIFY_THRESHOLDS)
    return SingularityReport(
        verdict=verdict, radii=radii, image_oscillation=osc, magnitude_range=mag,
        sphere_count=len(sphere_sample(b, 1.0, count)[1]), thresholds=dict(CLASSIFY_THRESHOLDS), reason=reason,
    )


# ---------------------------------------------------------------------------
# growth envelopes

ENVELOPE_KINDS = ("power", "log_power", "log_power_limit")
GROWTH_RTOL = 1e-12


@dataclass(frozen=True)
class GrowthEnvelope:
    """``power``: C r^-p; ``log_power``: C (log 1/r)^p; ``log_power_limit``:
    ratio |f| / (log 1/r)^p should tend to 0 (C unused)."""

    kind: str
    C: float
    p: float

    def __post_init__(self):
        if self.kind not in ENVELOPE_KINDS:
            raise ValueError(f"envelope kind must be one of {ENVELOPE_KINDS}")
        for v in (self.C, self.p):
            if not (v > 0 and math.isfinite(v)):
                raise ValueError("envelope parameters must be positive and finite")

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind == "power":
            return self.C * r**-self.p
        L = np.log(1.0 / r)
        if self.kind == "log_power":
            return self.C * L**self.p
        return L**self.p


@dataclass(frozen=True)
class GrowthReport:
    envelope: GrowthEnvelope
    radii: np.ndarray
    max_abs: np.ndarray
    envelope_values: np.ndarray
    margins: np.ndarray  # envelope - max|f| (bound kinds) or ratio (limit kind)
    passed: bool
    trend: str = ""  # limit kind only: "decreasing" | "not_decreasing"


def check_growth(map: MapHandle, b, env: GrowthEnvelope, radii, count: int | None = None) -> GrowthReport:
    """Per-sphere max|f| against the envelope."""
    b = as_point(b, map.dim)
    radii = np.asarray(radii, dtype=float)
    if radii.ndim != 1 or radii.size == 0 or np.any(radii <= 0):
        raise ValueError("radii must be positive")
    if env.kind != "power" and np.any(radii >= 1 / math.e):
        raise ValueError("log envelopes need radii < 1/e")
    count = 4 * default_sphere_count(map.dim) if count is None else count
    mx = np.array([np.max(np.linalg.norm(_sphere_images(map, b, r, count), axis=1)) for r in radii])
    ev = env(radii)
    if env.kind == "log_power_limit":
        ratio = mx / ev
        order = np.argsort(-radii)  # shrinking radii
        seq = ratio[order]
        decreasing = bool(np.all(np.diff(seq) <= 1e-12 * (1 + seq[:-1])) and seq[-1] < seq[0])
        trend = "decreasing" if decreasing else "not_decreasing"
        return GrowthReport(env, radii, mx, ev, ratio, decreasing, trend)
    margins = ev - mx
    # round-off allowance so an envelope attained exactly still passes
    return GrowthReport(env, radii, mx, ev, margins, bool(np.all(margins >= -GROWTH_RTOL * ev)))


# ---------------------------------------------------------------------------
# decay exponent near a removable point


@dataclass(frozen=True)
class ExponentReport:
    beta_n: float  # (omega_{n-1} / A)^(1/(n-1))
    exponent: float  # fitted decay exponent over all radii, nan when degenerate
    tail_exponent: float  # same fit over the three smallest radii
    degenerate: bool
    compliant: bool
    rel_tol: float
    radii: np.ndarray
    deviations: np.ndarray  # max |f - f(b)| per sphere
    bound_R: float  # max |f| over the sampled spheres
    condition: object = None


def verify_prop3_envelope(
    map: MapHandle,
    b,
    eps0: float,
    A: float,
    radii,
    f_b=None,
    Q=None,
    count: int | None = None,
    rel_tol: float = 0.05,
) -> ExponentReport:
    """Fit ``log max|f - f(b)|`` against ``log log(1/r)``; the decay exponent
    is minus the slope. Compliance compares the exponent fitted on the three
    smallest radii with ``beta_n = (omega/A)^(1/(n-1))``, since faster decay
    shows up as a local exponent that keeps growing. Only the exponent is
    tested; multiplicative constants are not."""
    b = as_point(b, map.dim)
    n = map.dim
    if not (0 < eps0 < 1) or not A > 0:
        raise ValueError("need 0 < eps0 < 1 and A > 0")
    radii = np.asarray(radii, dtype=float)
    if np.any(radii <= 0) or np.any(radii >= min(eps0, 1 / math.e)):
        raise ValueError("radii must lie in (0, min(eps0, 1/e))")
    if f_b is None:
        if map.limit is None:
            raise ValueError("f(b) unknown: pass f_b or use a map with a known limit")
        f_b = map.limit
    f_b = as_point(f_b, n)
    beta_n = (dimension_constants(n).omega / A) ** (1.0 / (n - 1))
    count = 4 * default_sphere_count(n) if count is None else count
    dev, R = [], 0.0
    for r in radii:
        y = _sphere_images(map, b, r, count)
        dev.append(np.max(np.linalg.norm(y - f_b, axis=1)))
        R = max(R, float(np.max(np.linalg.norm(y, axis=1))))
    dev = np.array(dev)
    cond = None
    if Q is not None:
        cond = check_condition_14(Q, b, eps0, A, radii)
    if np.all(dev <= 1e-14 * (1 + np.linalg.norm(f_b))):
        return ExponentReport(beta_n, math.nan, math.nan, True, True, rel_tol, radii, dev, R, cond)
    if np.any(dev <= 0):
        raise ArithmeticError("zero deviation on part of the radii; exponent fit undefined")
    if radii.size < 3:
        raise ValueError("need at least 3 radii for the exponent fit")
    order = np.argsort(-radii)
    x = np.log(np.log(1.0 / radii[order]))
    ly = np.log(dev[order])
    exponent = -float(np.polyfit(x, ly, 1)[0])
    tail = -float(np.polyfit(x[-3:], ly[-3:], 1)[0])
    return ExponentReport(
        beta_n, exponent, tail, False, bool(tail >= beta_n * (1 - rel_tol)), rel_tol, radii, dev, R, cond,
    )


# ---------------------------------------------------------------------------
# post-composition with the inversion


def corollary1_transform(map: MapHandle, b, check: bool = False, r_max: float = 0.25) -> MapHandle:
    """``h = inversion o f``. With ``check=True`` min|f| on spheres about b
    must increase as the radius shrinks; evaluating h where f = 0 raises."""
    b = as_point(b, map.dim)
    if check:
        mins = [np.min(np.linalg.norm(_sphere_images(map, b, r, None), axis=1)) for r in r_max * 2.0 ** -np.arange(6)]
        if not np.all(np.diff(mins) > 0):
            raise ValueError("min|f| does not increase toward b; no pole-like growth")
    h = compose(make_inversion(map.dim), map)
    return MapHandle(
        dim=h.dim, name=f"inv∘{map.name}", func=h.func, jac=h.jac, inverse=h.inverse,
        singular_point=b, domain=map.domain,
    )


def ki_preserved(f: MapHandle, h: MapHandle, points, rtol: float = 1e-6) -> bool:
    """Pointwise agreement of K_I for f and h at the sample points."""
    a, c = inner_dilatation(f, points), inner_dilatation(h, points)
    return bool(np.all(np.abs(a - c) <= rtol * np.abs(a)))


# ---------------------------------------------------------------------------
# contradiction chain


@dataclass(frozen=True)
class ChainRow:
    a: float
    loglog: float
    upper_12: float  # 2A / (k0 (log log 1/a)^(n-1))
    lower_13: float  # (omega/2) / (log((log 1/a)^p / r))^(n-1)
    lower_bound: float  # (log 1/a)^exponent, inf past the float range
    log_lower_bound: float  # exponent * log log(1/a)
    target: float  # r^-(2/omega)^(1/(n-1))
    consistent: bool  # lower_13 <= upper_12
    consistent_by_exponent: bool  # lower_bound <= target


@dataclass(frozen=True)
class ChainReport:
    k0: int
    A: float
    p: float
    n: int
    r: float
    threshold: float  # 4 A p^(n-1) / omega
    exponent: float
    diverges: bool  # exponent > 0
    diverges_numerically: bool  # lower bound strictly increasing as a decreases
    crossing_loglog: float  # log log(1/a*) where the chain first breaks; inf if never
    vacuous: bool  # r >= 1
    rows: tuple

    @property
    def routes_agree(self) -> bool:
        return all(row.consistent == row.consistent_by_exponent for row in self.rows)


def lemma1_chain(k0: int, A: float, p: float, n: int, r: float, a_grid=None, loglog_grid=None) -> ChainReport:
    """Evaluate both sides of the modulus inequality along ``a -> 0``.

    The upper estimate is ``2A / (k0 (log log 1/a)^(n-1))``; the lower one is
    the half-ring modulus with radii ``r`` and ``(log 1/a)^p``. Their order is
    equivalent to ``(log 1/a)^e <= r^-c`` with ``c = (2/omega)^(1/(n-1))``
    and ``e = (k0/2A)^(1/(n-1)) - p c``; both forms are reported.

    Pass decreasing ``a`` values in ``(0, e^-e)``, or ``loglog_grid`` with
    increasing ``log log(1/a) > 1`` when ``a`` itself would underflow.
    """
    if int(k0) != k0 or k0 < 1:
        raise ValueError("k0 must be a positive integer")
    if not (A > 0 and p > 0 and r > 0) or int(n) != n or n < 2:
        raise ValueError("need A > 0, p > 0, r > 0 and integer n >= 2")
    if (a_grid is None) == (loglog_grid is None):
        raise ValueError("pass exactly one of a_grid and loglog_grid")
    if a_grid is not None:
        a_grid = np.asarray(a_grid, dtype=float)
        if a_grid.ndim != 1 or np.any(a_grid <= 0) or np.any(a_grid >= math.exp(-math.e)):
            raise ValueError("a grid must lie in (0, e^-e)")
        if np.any(np.diff(a_grid) >= 0):
            raise ValueError("a grid must be strictly decreasing")
        loglog_grid = np.log(np.log(1.0 / a_grid))
    loglog_grid = np.asarray(loglog_grid, dtype=float)
    if loglog_grid.ndim != 1 or np.any(loglog_grid <= 1) or np.any(np.diff(loglog_grid) <= 0):
        raise ValueError("log log(1/a) values must exceed 1 and increase")
    n = int(n)
    omega = dimension_constants(n).omega
    c = (2.0 / omega) ** (1.0 / (n - 1))
    e = (k0 / (2.0 * A)) ** (1.0 / (n - 1)) - p * c
    threshold = 4.0 * A * p ** (n - 1) / omega
    rows = []
    for ll in loglog_grid:
        ll = float(ll)
        L1 = math.exp(ll)
        a = math.exp(-L1)
        up = 2.0 * A / (k0 * ll ** (n - 1))
        # log(L/r) computed as p log log(1/a) - log r to avoid overflow in L
        log_ratio = p * ll - math.log(r)
        lo = 0.5 * omega / log_ratio ** (n - 1) if log_ratio > 0 else math.inf
        log_lb = e * ll
        lb = math.exp(log_lb) if log_lb < 709.0 else math.inf
        tg = r**-c
        ok_exp = log_lb <= -c * math.log(r) + 1e-12 * (1 + abs(log_lb))
        rows.append(ChainRow(a, ll, up, lo, lb, log_lb, tg, lo <= up * (1 + 1e-12), ok_exp))
    # compared in log space so the test survives bounds beyond the float range
    logs = np.array([row.log_lower_bound for row in rows])
    numeric = bool(len(logs) > 1 and np.all(np.diff(logs) > 0))
    crossing = c * math.log(1.0 / r) / e if e > 0 else math.inf
    return ChainReport(
        k0=int(k0), A=float(A), p=float(p), n=n, r=float(r), threshold=threshold, exponent=e,
        diverges=bool(e > 0), diverges_numerically=numeric, crossing_loglog=crossing,
        vacuous=bool(r >= 1), rows=tuple(rows),
    )


# ---------------------------------------------------------------------------
# multiplicity


@dataclass(frozen=True)
class PreimageEstimate:
    count: int  # lower bound on N(y, f, region)
    points: np.ndarray
    residuals: np.ndarray
    min_separation: float
    inconclusive: bool
    resolution: tuple


def _region_grid(region: AnnulusSpec, resolution):
    n = region.dim
    nr, *ang = resolution
    edges = angular_edges(n, tuple(ang))
    r = np.geomspace(region.r_inner, region.r_outer, nr + 2)[1:-1]
    centers = [0.5 * (e[:-1] + e[1:]) for e in edges]
    mesh = np.meshgrid(r, *centers, indexing="ij")
    dirs = from_hyperspherical(np.column_stack([m.ravel() for m in mesh[1:]]))
    pts = region.center + mesh[0].ravel()[:, None] * dirs
    return pts, mesh[0].shape


def _default_resolution(n):
    return (96, 192) if n == 2 else (24,) + (24,) * (n - 2) + (48,)


def count_preimages(map: MapHandle, y, region: AnnulusSpec, resolution=None, tol: float = 1e-10) -> PreimageEstimate:
    """Lower estimate of the number of solutions of ``f(x) = y`` in the region.

    Local minima of ``|f(x) - y|`` on a product grid (log-spaced radii) seed
    a root finder; converged roots inside the region are merged when closer
    than ``1e-7`` times the outer radius.
    """
    y = as_point(y, map.dim)
    n = map.dim
    resolution = _default_resolution(n) if resolution is None else tuple(int(k) for k in resolution)
    if len(resolution) != n:
        raise ValueError(f"resolution needs {n} entries (radial, then angular)")
    pts, shape = _region_grid(region, resolution)
    fx = map(pts)
    if not np.all(np.isfinite(fx)):
        raise ArithmeticError(f"{map.name} is not finite on the search grid")
    res = np.linalg.norm(fx - y, axis=1).reshape(shape)
    modes = ["nearest"] * (n - 1) + ["wrap"]
    seeds = np.flatnonzero((ndimage.minimum_filter(res, size=3, mode=modes) == res).ravel())

    jac = (lambda x: map.jacobian(x)) if map.has_jacobian else None
    found = []
    for s in seeds:
        sol = optimize.root(lambda x: map(x) - y, pts[s], jac=jac, method="hybr")
        x = sol.x
        if not np.all(np.isfinite(x)) or not region.contains(x)[0]:
            continue
        rr = float(np.linalg.norm(map(x) - y))
        if rr <= tol * (1 + np.linalg.norm(y)):
            found.append((x, rr))
    merge = 1e-7 * region.r_outer
    kept, kres = [], []
    for x, rr in found:
        if all(np.linalg.norm(x - k) > merge for k in kept):
            kept.append(x)
            kres.append(rr)
    P = np.array(kept).reshape(-1, n)
    sep = float(np.min(pdist(P))) if len(P) > 1 else math.inf
    return PreimageEstimate(
        count=len(P), points=P, residuals=np.array(kres), min_separation=sep,
        inconclusive=len(P) == 0, resolution=resolution,
    )
