"""Curve families, admissible densities and the n-modulus.

The discrete modulus of a family on a grid is the convex program

    minimize  sum_j v_j rho_j^n   subject to  A rho >= 1,  rho >= 0,

with ``A[i, j]`` the length of curve i inside cell j. It is solved through
its concave dual in the curve multipliers ``lambda >= 0``; every iterate
yields a certified lower bound (dual value) and a certified upper bound
(rescaled primal density), so the answer is a bracket.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .dilatation import inner_dilatation
from .gallery import MapHandle
from .geometry import (
    PolylineCurve,
    as_point,
    as_points,
    dimension_constants,
    radial_segment,
)
from .grids import (
    CartesianGrid,
    Grid,
    GridDensity,
    MappedGrid,
    SphericalGrid,
    angular_edges,
    from_hyperspherical,
    orthonormal_frame,
)
from .integrals import WeightFunction, normalizer_I

DEFAULT_ANGULAR_SHAPE = {2: (64,), 3: (12, 24)}
DEFAULT_FAMILY_SHAPE = {2: (128,), 3: (24, 48)}
DEFAULT_RADIAL_CELLS = {2: 64, 3: 24}


def _default_shape(table, n, fallback):
    return table.get(n, (fallback,) * (n - 1))


# ---------------------------------------------------------------------------
# families


@dataclass(frozen=True)
class CurveFamily:
    """Finite set of polylines plus a descriptor of the family it samples.

    ``descriptor["kind"]`` is ``"ring"`` (keys ``center, a, b``),
    ``"spherical_cap"`` (keys ``y0, r, L, normal``) or ``"custom"``.
    """

    curves: tuple
    descriptor: dict
    dim: int

    def __post_init__(self):
        for c in self.curves:
            if c.dim != self.dim:
                raise ValueError("all curves must live in the same R^n")

    def __len__(self):
        return len(self.curves)


def _ray_directions(n, shape, hemisphere, axis):
    edges = angular_edges(n, shape, hemisphere)
    centers = [0.5 * (e[:-1] + e[1:]) for e in edges]
    mesh = np.meshgrid(*centers, indexing="ij")
    ang = np.column_stack([m.ravel() for m in mesh])
    return from_hyperspherical(ang) @ orthonormal_frame(axis)


def ring_family(a: float, b: float, center=None, n: int = 2, shape=None) -> CurveFamily:
    """Radial segments joining ``S(center, a)`` to ``S(center, b)``.

    Directions are the centers of a product partition of the sphere, so the
    family meets every angular sector of the default grids.
    """
    if not 0 < a < b:
        raise ValueError(f"ring family needs 0 < a < b, got {a}, {b}")
    c = np.zeros(n) if center is None else as_point(center)
    n = c.size
    shape = _default_shape(DEFAULT_FAMILY_SHAPE, n, 8) if shape is None else shape
    dirs = _ray_directions(n, shape, False, np.eye(n)[0])
    curves = tuple(radial_segment(c, e, a, b) for e in dirs)
    desc = {"kind": "ring", "center": c, "a": float(a), "b": float(b), "shape": tuple(np.atleast_1d(shape))}
    return CurveFamily(curves, desc, n)


def cap_family(y0, r: float, L: float, normal=None, shape=None) -> CurveFamily:
    """Radial segments ``y0 + t e``, ``r <= t <= L``, with ``(e, normal) > 0``."""
    if not 0 < r < L:
        raise ValueError(f"cap family needs 0 < r < L, got {r}, {L}")
    y0 = as_point(y0)
    n = y0.size
    nu = np.eye(n)[0] if normal is None else np.asarray(normal, dtype=float)
    nu = nu / np.linalg.norm(nu)
    shape = _default_shape(DEFAULT_FAMILY_SHAPE, n, 8) if shape is None else shape
    dirs = _ray_directions(n, shape, True, nu)
    curves = tuple(radial_segment(y0, e, r, L) for e in dirs)
    desc = {
        "kind": "spherical_cap", "y0": y0, "r": float(r), "L": float(L), "normal": nu,
        "shape": tuple(np.atleast_1d(shape)),
    }
    return CurveFamily(curves, desc, n)


def custom_family(curves) -> CurveFamily:
    curves = tuple(curves)
    if not curves:
        raise ValueError("custom family needs at least one curve; use empty_family(n)")
    return CurveFamily(curves, {"kind": "custom"}, curves[0].dim)


def empty_family(n: int) -> CurveFamily:
    return CurveFamily((), {"kind": "custom"}, n)


def image_family(map: MapHandle, family: CurveFamily, pieces: int = 128) -> CurveFamily:
    """``f(Gamma)``: each curve is refined into ``pieces`` chords per segment
    and its vertices are mapped."""
    out = []
    for c in family.curves:
        v = map(c.refined(pieces).vertices)
        if not np.all(np.isfinite(v)):
            raise ArithmeticError(f"{map.name} is not finite along a curve of the family")
        keep = np.concatenate([[True], np.linalg.norm(np.diff(v, axis=0), axis=1) > 0])
        v = v[keep]
        if len(v) >= 2:
            out.append(PolylineCurve(v))
    desc = {"kind": "custom", "source": family.descriptor.get("kind"), "map": map.name}
    return CurveFamily(tuple(out), desc, map.dim)


def default_grid(family: CurveFamily, radial_cells: int | None = None, angular_shape=None) -> Grid:
    """Spherical product grid adapted to a ring or cap family."""
    d = family.descriptor
    n = family.dim
    nr = DEFAULT_RADIAL_CELLS.get(n, 12) if radial_cells is None else radial_cells
    ash = _default_shape(DEFAULT_ANGULAR_SHAPE, n, 6) if angular_shape is None else angular_shape
    if d["kind"] == "ring":
        re = np.geomspace(d["a"], d["b"], nr + 1)
        return SphericalGrid(d["center"], re, angular_edges(n, ash, False))
    if d["kind"] == "spherical_cap":
        re = np.geomspace(d["r"], d["L"], nr + 1)
        return SphericalGrid(d["y0"], re, angular_edges(n, ash, True), axis=d["normal"])
    raise ValueError("custom families need an explicit grid")


def analytic_modulus(family_or_descriptor) -> float:
    """Closed-form n-modulus of a ring or spherical-cap family."""
    d = family_or_descriptor.descriptor if isinstance(family_or_descriptor, CurveFamily) else family_or_descriptor
    kind = d.get("kind")
    if kind == "ring":
        n = as_point(d["center"]).size
        a, b = float(d["a"]), float(d["b"])
        if not 0 < a < b:
            raise ValueError("ring needs 0 < a < b")
        return dimension_constants(n).omega / math.log(b / a) ** (n - 1)
    if kind == "spherical_cap":
        n = as_point(d["y0"]).size
        r, L = float(d["r"]), float(d["L"])
        if not 0 < r < L:
            raise ValueError("cap family needs 0 < r < L")
        return 0.5 * dimension_constants(n).omega / math.log(L / r) ** (n - 1)
    raise ValueError(f"no closed form for family kind {kind!r}")


# ---------------------------------------------------------------------------
# densities


@dataclass(frozen=True)
class RadialDensity:
    """``rho(x) = profile(|x - center|)`` on ``r_min < |x - center| < r_max``,
    zero elsewhere (and zero where ``(x - center, halfspace) <= 0`` if a
    half-space normal is given)."""

    center: np.ndarray
    profile: Callable
    r_min: float
    r_max: float
    halfspace: np.ndarray | None = None
    name: str = "radial"

    def __call__(self, points) -> np.ndarray:
        p = as_points(points, self.center.size) - self.center
        r = np.linalg.norm(p, axis=1)
        inside = (r > self.r_min) & (r < self.r_max)
        if self.halfspace is not None:
            inside &= p @ self.halfspace > 0
        out = np.zeros(len(r))
        if np.any(inside):
            out[inside] = self.profile(r[inside])
        return out

    def breakpoints(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Parameters ``t in (0, 1)`` where segment ``a + t(b-a)`` meets the
        spheres bounding the support."""
        c = self.center
        d = b - a
        w = a - c
        A = d @ d
        B = 2 * (w @ d)
        ts = []
        for R in (self.r_min, self.r_max):
            if R <= 0 or not math.isfinite(R):
                continue
            disc = B * B - 4 * A * (w @ w - R * R)
            if disc > 0:
                s = math.sqrt(disc)
                ts += [(-B - s) / (2 * A), (-B + s) / (2 * A)]
        if self.halfspace is not None:
            den = d @ self.halfspace
            if den != 0:
                ts.append(-(w @ self.halfspace) / den)
        return np.array(sorted(t for t in ts if 0 < t < 1))


def ring_extremal_density(a: float, b: float, center) -> RadialDensity:
    c = as_point(center)
    k = 1.0 / math.log(b / a)
    return RadialDensity(c, lambda r: k / r, a, b, name="ring_extremal")


def cap_extremal_density(family: CurveFamily) -> RadialDensity:
    d = family.descriptor
    k = 1.0 / math.log(d["L"] / d["r"])
    return RadialDensity(d["y0"], lambda r: k / r, d["r"], d["L"], halfspace=d["normal"], name="cap_extremal")


def rho_a_density(psi: WeightFunction, a: float, d: float, center) -> RadialDensity:
    """``psi(|x-b|) / I(a, d)`` on the annulus ``a < |x-b| < d``."""
    I = normalizer_I(psi, a, d)
    c = as_point(center)
    return RadialDensity(c, lambda r: psi(r) / I, a, d, name=f"rho_a[{psi.name}]")


def _piecewise_integral(curve: PolylineCurve, rho, order: int, max_intervals: int = 4000) -> float:
    """Line integral over a polyline, split at support breakpoints, then by
    level-wise bisection until each piece agrees with its two halves to 1e-14."""
    x, w = np.polynomial.legendre.leggauss(order)

    def gl(a, d, t0, t1):
        half = 0.5 * (t1 - t0)
        t = (0.5 * (t0 + t1))[:, None] + half[:, None] * x
        vals = rho(a + t.reshape(-1, 1) * d).reshape(t.shape)
        if not np.all(np.isfinite(vals)):
            raise ArithmeticError("density is not finite along the curve")
        return half * (vals @ w)

    total = 0.0
    for a, b, L in zip(curve.vertices[:-1], curve.vertices[1:], curve.seg_lengths):
        d = b - a
        cuts = rho.breakpoints(a, b) if hasattr(rho, "breakpoints") else np.array([])
        knots = np.concatenate([[0.0], cuts, [1.0]])
        t0, t1 = knots[:-1], knots[1:]
        whole = gl(a, d, t0, t1)
        seg, used = 0.0, len(t0)
        while t0.size:
            tm = 0.5 * (t0 + t1)
            left, right = gl(a, d, t0, tm), gl(a, d, tm, t1)
            done = (np.abs(left + right - whole) <= 1e-14 * (np.abs(whole) + 1e-300)) | (tm == t0) | (tm == t1)
            seg += float(np.sum((left + right)[done]))
            keep = ~done
            used += 2 * int(keep.sum())
            if used > max_intervals:
                raise ArithmeticError("line integral did not converge; density too irregular")
            t0, t1 = np.concatenate([t0[keep], tm[keep]]), np.concatenate([tm[keep], t1[keep]])
            whole = np.concatenate([left[keep], right[keep]])
        total += seg * L
    return total


@dataclass(frozen=True)
class AdmissibilityReport:
    margins: np.ndarray  # line integral of rho over each curve
    min_margin: float
    admissible: bool


def is_admissible(rho, family: CurveFamily, tol: float = 1e-9, order: int = 10) -> AdmissibilityReport:
    """Check ``int_gamma rho ds >= 1`` for every curve of the family.

    Grid densities are integrated exactly through the incidence matrix;
    other densities by adaptive Gauss-Legendre split at support boundaries.
    """
    if isinstance(rho, GridDensity):
        margins = rho.grid.incidence(family.curves) @ rho.values if len(family) else np.zeros(0)
    else:
        margins = np.array([_piecewise_integral(c, rho, order) for c in family.curves])
    mn = float(np.min(margins)) if margins.size else math.inf
    return AdmissibilityReport(margins=np.asarray(margins), min_margin=mn, admissible=bool(mn >= 1 - tol))


# ---------------------------------------------------------------------------
# discrete modulus


@dataclass(frozen=True)
class ModulusResult:
    upper_bound: float
    lower_bound: float
    density: GridDensity | None
    iterations: int
    converged: bool
    rel_gap: float
    multipliers: np.ndarray = field(repr=False, default=None)

    @property
    def estimate(self) -> float:
        return 0.5 * (self.upper_bound + self.lower_bound)


class _Dual:
    """Concave dual ``g(lam) = sum lam - (n-1) sum_j v_j rho_j(lam)^n`` with
    ``rho_j(lam) = ((A^T lam)_j / (n v_j))^(1/(n-1))``."""

    def __init__(self, A, v, n):
        self.A, self.AT, self.v, self.n = A, A.T.tocsr(), v, n
        self.p = 1.0 / (n - 1)

    def rho(self, lam):
        s = self.AT @ lam
        return (np.maximum(s, 0.0) / (self.n * self.v)) ** self.p

    def value_grad(self, lam):
        rho = self.rho(lam)
        E = float(np.dot(self.v, rho**self.n))
        return lam.sum() - (self.n - 1) * E, 1.0 - self.A @ rho, rho, E

    def bounds(self, lam):
        """Certified ``(lower, upper, rho_admissible)`` from multipliers."""
        n = self.n
        rho = self.rho(lam)
        E = float(np.dot(self.v, rho**n))
        S = float(lam.sum())
        # g(t lam) maximized over t > 0 in closed form
        lower = S**n / (n**n * E ** (n - 1)) if E > 0 else 0.0
        m = float(np.min(self.A @ rho))
        if m <= 0:
            return lower, math.inf, None
        return lower, E / m**n, rho / m


def discrete_modulus(
    family: CurveFamily,
    grid: Grid | None = None,
    tol: float = 1e-3,
    max_iter: int = 100_000,
    check_every: int = 10,
    oversample: int = 4,
) -> ModulusResult:
    """Bracket the n-modulus of ``family`` by the discrete program on ``grid``.

    Accelerated projected gradient ascent on the dual with backtracking and
    adaptive restart. Stops when ``(upper - lower) / upper < tol``.
    """
    n = family.dim
    if len(family) == 0:
        return ModulusResult(0.0, 0.0, None, 0, True, 0.0, np.zeros(0))
    grid = default_grid(family) if grid is None else grid
    if grid.dim != n:
        raise ValueError("grid and family live in different dimensions")
    A = grid.incidence(family.curves, oversample)
    covered = np.asarray(A.sum(axis=1)).ravel()
    if np.any(covered <= 0):
        raise ValueError(f"{int(np.sum(covered <= 0))} curves miss the grid entirely")
    cells_hit = np.diff(A.indptr)
    if np.any(cells_hit < 3):
        raise ValueError("every curve must cross at least 3 grid cells")

    used = np.unique(A.indices)
    Ar = A[:, used].tocsr()
    vr = grid.volumes[used]
    if np.any(vr <= 0):
        raise ValueError("grid cells met by the family must have positive volume")
    dual = _Dual(Ar, vr, n)

    lam = np.ones(len(family))
    lower, upper, rho_adm = dual.bounds(lam)
    # rescale the start to the optimal multiple of the uniform multiplier
    rho0 = dual.rho(lam)
    E0 = float(np.dot(vr, rho0**n))
    lam *= (lam.sum() / (n * E0)) ** (n - 1)

    best = (lower, upper, rho_adm, lam.copy())
    step = 1.0
    y = lam.copy()
    tk = 1.0
    g_prev = -math.inf
    it = 0
    converged = False
    while it < max_iter:
        it += 1
        gy, grad, _, _ = dual.value_grad(y)
        while True:
            cand = np.maximum(y + step * grad, 0.0)
            gc, _, _, _ = dual.value_grad(cand)
            d = cand - y
            if gc >= gy + grad @ d - (d @ d) / (2 * step) - 1e-14 * abs(gy):
                break
            step *= 0.5
            if step < 1e-30:
                break
        if gc < g_prev and tk > 1.0:  # adaptive restart; a plain step right after one is always taken
            tk = 1.0
            y = lam.copy()
            continue
        tk1 = 0.5 * (1 + math.sqrt(1 + 4 * tk * tk))
        y = cand + ((tk - 1) / tk1) * (cand - lam)
        lam, tk, g_prev = cand, tk1, gc
        step *= 1.25

        if it % check_every == 0 or it == 1:
            lo, up, ra = dual.bounds(lam)
            if lo > best[0]:
                best = (lo, best[1], best[2], lam.copy())
            if up < best[1]:
                best = (best[0], up, ra, best[3])
            if best[1] < math.inf and (best[1] - best[0]) <= tol * best[1]:
                converged = True
                break

    lower, upper, rho_adm, lam_best = best
    dens = None
    if rho_adm is not None:
        vals = np.zeros(grid.size)
        vals[used] = rho_adm
        dens = GridDensity(grid, vals)
    gap = (upper - lower) / upper if upper > 0 and math.isfinite(upper) else math.inf
    return ModulusResult(upper, lower, dens, it, converged, gap, lam_best)


# ---------------------------------------------------------------------------
# Poletskii-type inequality


@dataclass(frozen=True)
class PoletskiiReport:
    lhs_lower: float  # lower bound of M(f(Gamma))
    lhs_upper: float  # upper bound of M(f(Gamma)), used as the LHS
    rhs: float  # integral of K_I rho^n
    slack: float  # (rhs - lhs_upper) / rhs
    admissible_margin: float  # min over Gamma of int_gamma rho
    passed: bool
    tolerance: float


def weighted_energy(map: MapHandle, rho, grid: Grid, order: int = 3) -> float:
    """Integral of ``K_I(x, f) rho(x)^n`` over the grid's support."""
    pts, w, cells = grid.quadrature(order)
    vals = rho.values[cells] if isinstance(rho, GridDensity) else rho(pts)
    mask = vals > 0
    ki = np.ones(len(pts))
    if np.any(mask):
        ki[mask] = inner_dilatation(map, pts[mask])
    if not np.all(np.isfinite(ki[mask])):
        raise ArithmeticError("K_I is infinite where the density is positive")
    return float(np.dot(w, ki * vals**grid.dim))


def check_poletskii(
    map: MapHandle,
    family: CurveFamily,
    rho=None,
    grid: Grid | None = None,
    image_grid: Grid | None = None,
    tol: float = 1e-2,
    modulus_tol: float = 1e-3,
) -> PoletskiiReport:
    """Compare ``M(f(Gamma))`` with ``int K_I rho^n`` for an admissible rho.

    The image modulus is bracketed on ``image_grid``; the default maps a
    domain grid with one angular cell per ray, which keeps the conformal
    factor nearly constant on each image cell. The upper bound of the image
    modulus is the conservative LHS. The check passes
    when ``(rhs - lhs) / rhs >= -tol``.
    """
    grid = default_grid(family) if grid is None else grid
    if rho is None:
        kind = family.descriptor.get("kind")
        d = family.descriptor
        if kind == "ring":
            rho = ring_extremal_density(d["a"], d["b"], d["center"])
        elif kind == "spherical_cap":
            rho = cap_extremal_density(family)
        else:
            raise ValueError("custom families need an explicit admissible density")
    adm = is_admissible(rho, family)
    if not adm.admissible:
        raise ValueError(f"density is not admissible (min margin {adm.min_margin:.6g})")
    rhs = weighted_energy(map, rho, grid)
    img = image_family(map, family)
    if image_grid is None:
        shape = family.descriptor.get("shape")
        base = default_grid(family, angular_shape=shape) if shape is not None else grid
        image_grid = MappedGrid(base, map)
    res = discrete_modulus(img, image_grid, tol=modulus_tol)
    slack = (rhs - res.upper_bound) / rhs if rhs > 0 else -math.inf
    return PoletskiiReport(
        lhs_lower=res.lower_bound, lhs_upper=res.upper_bound, rhs=rhs, slack=slack,
        admissible_margin=adm.min_margin, passed=bool(slack >= -tol), tolerance=tol,
    )


__all__ = [
    "CartesianGrid", "CurveFamily", "GridDensity", "MappedGrid", "ModulusResult",
    "PoletskiiReport", "RadialDensity", "SphericalGrid", "AdmissibilityReport",
    "analytic_modulus", "cap_extremal_density", "cap_family", "check_poletskii",
    "custom_family", "default_grid", "discrete_modulus", "empty_family", "image_family",
    "is_admissible", "rho_a_density", "ring_extremal_density", "ring_family", "weighted_energy",
]
