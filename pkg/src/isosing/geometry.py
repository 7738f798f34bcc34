"""Dimension-generic geometry: points, spheres, annuli, polylines.

Every routine works in R^n for n >= 2. Points are plain float arrays of
shape ``(n,)``; batches are ``(N, n)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import special

# Default node counts per dimension; below these the sphere rules lose the
# ~1e-6 accuracy that the integral checks rely on.
DEFAULT_SPHERE_COUNTS = {2: 16, 3: 50, 4: 200}


def default_sphere_count(n: int) -> int:
    if n < 2:
        raise ValueError(f"dimension must be >= 2, got {n}")
    return DEFAULT_SPHERE_COUNTS.get(n, 200 * (n - 3))


def min_sphere_count(n: int) -> int:
    """Hard floor on sphere nodes: two nodes per angular coordinate."""
    if n < 2:
        raise ValueError(f"dimension must be >= 2, got {n}")
    return 2 * n


def as_point(x, dim: int | None = None) -> np.ndarray:
    """Validate and return a point as a float vector."""
    p = np.asarray(x, dtype=float)
    if p.ndim == 0:
        if dim is None:
            raise ValueError("scalar point needs an explicit dimension")
        p = np.full(dim, float(p))
    if p.ndim != 1:
        raise ValueError(f"point must be a vector, got shape {p.shape}")
    if p.size < 2:
        raise ValueError(f"point dimension must be >= 2, got {p.size}")
    if dim is not None and p.size != dim:
        raise ValueError(f"expected a point in R^{dim}, got R^{p.size}")
    if not np.all(np.isfinite(p)):
        raise ValueError("point coordinates must be finite")
    return p


def as_points(x, dim: int | None = None) -> np.ndarray:
    """Return a batch ``(N, n)`` of points; a single point becomes ``(1, n)``."""
    p = np.asarray(x, dtype=float)
    if p.ndim == 1:
        p = p[None, :]
    if p.ndim != 2:
        raise ValueError(f"expected points of shape (N, n), got {p.shape}")
    if dim is not None and p.shape[1] != dim:
        raise ValueError(f"expected points in R^{dim}, got R^{p.shape[1]}")
    return p


@dataclass(frozen=True)
class DimensionConstants:
    n: int
    omega: float  # area of the unit sphere S^{n-1}
    Omega: float  # volume of the unit ball B^n


@lru_cache(maxsize=None)
def dimension_constants(n: int) -> DimensionConstants:
    """Unit sphere area and unit ball volume in R^n (Gamma-function closed form)."""
    if int(n) != n or n < 2:
        raise ValueError(f"dimension must be an integer >= 2, got {n}")
    n = int(n)
    Omega = np.pi ** (n / 2) / special.gamma(n / 2 + 1)
    return DimensionConstants(n=n, omega=n * Omega, Omega=Omega)


@dataclass(frozen=True)
class AnnulusSpec:
    """Open spherical shell ``r_inner < |x - center| < r_outer``."""

    center: np.ndarray
    r_inner: float
    r_outer: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        if not (0.0 < self.r_inner < self.r_outer) or not np.isfinite(self.r_outer):
            raise ValueError(
                f"annulus needs 0 < r_inner < r_outer < inf, got "
                f"({self.r_inner}, {self.r_outer})"
            )

    @property
    def dim(self) -> int:
        return self.center.size

    def volume(self) -> float:
        c = dimension_constants(self.dim)
        n = self.dim
        return c.Omega * (self.r_outer**n - self.r_inner**n)

    def contains(self, points) -> np.ndarray:
        d = np.linalg.norm(as_points(points, self.dim) - self.center, axis=1)
        return (d > self.r_inner) & (d < self.r_outer)


# ---------------------------------------------------------------------------
# sphere quadrature


def _polar_rule(m: int, k: int):
    """Nodes/weights in t = cos(phi) for the weight sin^m(phi) dphi on [0, pi]."""
    a = (m - 1) / 2.0
    if a == 0.0:
        t, w = np.polynomial.legendre.leggauss(k)
    else:
        t, w = special.roots_jacobi(k, a, a)
    return t, w


@lru_cache(maxsize=64)
def _unit_sphere_rule(n: int, count: int):
    if n == 2:
        theta = 2.0 * np.pi * np.arange(count) / count
        pts = np.column_stack([np.cos(theta), np.sin(theta)])
        w = np.full(count, 2.0 * np.pi / count)
        return pts, w

    # hyperspherical product rule: k nodes for each polar angle, 2k azimuths
    k = max(2, int(np.ceil((count / 2.0) ** (1.0 / (n - 1)))))
    while 2 * k ** (n - 1) < count:
        k += 1
    naz = 2 * k
    az = 2.0 * np.pi * (np.arange(naz) + 0.5) / naz
    az_w = np.full(naz, 2.0 * np.pi / naz)

    # polar angles phi_1..phi_{n-2}; phi_j carries sin^{n-1-j}
    rules = [_polar_rule(n - 1 - j, k) for j in range(1, n - 1)]
    grids = np.meshgrid(*[r[0] for r in rules], np.arange(naz), indexing="ij")
    wgrids = np.meshgrid(*[r[1] for r in rules], az_w, indexing="ij")
    cos_phi = [g.ravel() for g in grids[:-1]]
    phi_az = az[grids[-1].ravel()]
    w = np.prod([g.ravel() for g in wgrids], axis=0)

    npts = w.size
    pts = np.empty((npts, n))
    sin_prod = np.ones(npts)
    for j, c in enumerate(cos_phi):
        pts[:, j] = sin_prod * c
        sin_prod = sin_prod * np.sqrt(np.clip(1.0 - c * c, 0.0, None))
    pts[:, n - 2] = sin_prod * np.cos(phi_az)
    pts[:, n - 1] = sin_prod * np.sin(phi_az)
    pts.setflags(write=False)
    w.setflags(write=False)
    return pts, w


def sphere_sample(center, radius: float, count: int | None = None):
    """Quadrature nodes and weights on the sphere ``S(center, radius)``.

    Parameters
    ----------
    center : array_like
        Sphere center, length n >= 2.
    radius : float
        Positive radius.
    count : int, optional
        Requested number of nodes. For n = 2 exactly ``count`` equally spaced
        nodes are returned (trapezoid rule). For n >= 3 a product rule with at
        least ``count`` nodes is returned: Gauss-Jacobi in the cosine of each
        polar angle (Gauss-Legendre for the last one) times the trapezoid
        rule in the azimuth.

    Returns
    -------
    points : ndarray, shape (N, n)
    weights : ndarray, shape (N,)
        Surface-measure weights; they sum to ``omega_{n-1} * radius**(n-1)``.
    """
    c = as_point(center)
    n = c.size
    if not radius > 0 or not np.isfinite(radius):
        raise ValueError(f"sphere radius must be positive and finite, got {radius}")
    if count is None:
        count = default_sphere_count(n)
    if count < min_sphere_count(n):
        raise ValueError(
            f"need at least {min_sphere_count(n)} sphere nodes in R^{n}, got {count}"
        )
    u, w = _unit_sphere_rule(n, int(count))
    return c + radius * u, w * radius ** (n - 1)


# ---------------------------------------------------------------------------
# curves


@dataclass(frozen=True)
class PolylineCurve:
    vertices: np.ndarray
    seg_lengths: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[0] < 2 or v.shape[1] < 2:
            raise ValueError(f"polyline needs >= 2 vertices in R^n (n>=2), got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("polyline vertices must be finite")
        seg = np.linalg.norm(np.diff(v, axis=0), axis=1)
        if np.any(seg == 0.0):
            raise ValueError("consecutive polyline vertices must be distinct")
        v.setflags(write=False)
        seg.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "seg_lengths", seg)

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def length(self) -> float:
        return float(self.seg_lengths.sum())

    def concat(self, other: "PolylineCurve") -> "PolylineCurve":
        if not np.allclose(self.vertices[-1], other.vertices[0], rtol=0, atol=1e-14):
            raise ValueError("curves do not join")
        return PolylineCurve(np.vstack([self.vertices, other.vertices[1:]]))

    def refined(self, pieces: int) -> "PolylineCurve":
        """Same locus with every segment split into ``pieces`` equal parts."""
        t = np.arange(pieces) / pieces
        a, b = self.vertices[:-1], self.vertices[1:]
        inner = a[:, None, :] + t[None, :, None] * (b - a)[:, None, :]
        return PolylineCurve(np.vstack([inner.reshape(-1, self.dim), self.vertices[-1:]]))


def segment(a, b) -> PolylineCurve:
    return PolylineCurve(np.vstack([as_point(a), as_point(b)]))


def radial_segment(center, direction, r0: float, r1: float, pieces: int = 1) -> PolylineCurve:
    """Straight ray piece ``center + t*direction``, t from r0 to r1."""
    c = as_point(center)
    e = np.asarray(direction, dtype=float)
    e = e / np.linalg.norm(e)
    t = np.linspace(r0, r1, pieces + 1)
    return PolylineCurve(c + t[:, None] * e)


def curve_line_integral(curve: PolylineCurve, field, order: int = 8, subdivisions: int = 1) -> float:
    """Integral of a scalar field along a polyline with respect to arc length.

    Each segment is split into ``subdivisions`` pieces and integrated with an
    ``order``-point Gauss-Legendre rule. ``field`` maps ``(N, n)`` points to
    ``(N,)`` values.
    """
    x, w = np.polynomial.legendre.leggauss(order)
    t = ((np.arange(subdivisions)[:, None] + (x[None, :] + 1) / 2) / subdivisions).ravel()
    tw = np.tile(w / (2.0 * subdivisions), subdivisions)
    a, b = curve.vertices[:-1], curve.vertices[1:]
    pts = a[:, None, :] + t[None, :, None] * (b - a)[:, None, :]
    vals = np.asarray(field(pts.reshape(-1, curve.dim)), dtype=float).reshape(len(a), -1)
    if not np.all(np.isfinite(vals)):
        raise ArithmeticError("field is not finite along the curve")
    return float(np.sum(vals @ tw * curve.seg_lengths))
