"""Cell grids for piecewise-constant densities.

A grid exposes cell ``centers``, ``volumes``, a vectorized ``cell_index``
(``-1`` outside the grid), per-cell tensor quadrature, and the incidence
matrix ``A[curve, cell] = length of the curve inside the cell``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .gallery import MapHandle
from .geometry import as_point, as_points

BISECT_STEPS = 52


def orthonormal_frame(axis) -> np.ndarray:
    """Rows form an orthonormal basis whose first row is ``axis/|axis|``."""
    a = np.asarray(axis, dtype=float)
    a = a / np.linalg.norm(a)
    n = a.size
    M = np.column_stack([a, np.eye(n)])
    q, _ = np.linalg.qr(M)
    q = q[:, :n]
    if np.dot(q[:, 0], a) < 0:
        q[:, 0] = -q[:, 0]
    # keep the frame right-handed so that azimuths match the usual orientation
    if np.linalg.det(q) < 0:
        q[:, -1] = -q[:, -1]
    return q.T


def to_hyperspherical(y: np.ndarray):
    """Frame coordinates ``(N, n)`` -> ``(r, angles)`` with angles
    ``(phi_1..phi_{n-2} in [0, pi], azimuth in (-pi, pi])``."""
    n = y.shape[1]
    r = np.linalg.norm(y, axis=1)
    angles = np.empty((len(y), n - 1))
    tail2 = np.cumsum((y**2)[:, ::-1], axis=1)[:, ::-1]  # sum_{j>=k} y_j^2
    for k in range(n - 2):
        norm = np.sqrt(tail2[:, k])
        with np.errstate(invalid="ignore", divide="ignore"):
            c = np.where(norm > 0, y[:, k] / norm, 1.0)
        angles[:, k] = np.arccos(np.clip(c, -1.0, 1.0))
    angles[:, n - 2] = np.arctan2(y[:, n - 1], y[:, n - 2])
    return r, angles


def from_hyperspherical(angles: np.ndarray) -> np.ndarray:
    """Unit vectors (frame coordinates) from hyperspherical angles."""
    angles = np.atleast_2d(angles)
    N, m = angles.shape
    n = m + 1
    y = np.empty((N, n))
    s = np.ones(N)
    for k in range(n - 2):
        y[:, k] = s * np.cos(angles[:, k])
        s = s * np.sin(angles[:, k])
    y[:, n - 2] = s * np.cos(angles[:, n - 2])
    y[:, n - 1] = s * np.sin(angles[:, n - 2])
    return y


def angular_edges(n: int, shape, hemisphere: bool = False) -> list:
    """Edges of a product partition of the sphere (or of the hemisphere
    around the frame axis). For n = 3 the polar bands are equal-area."""
    shape = tuple(int(k) for k in np.atleast_1d(shape))
    if len(shape) != n - 1 or min(shape) < 1:
        raise ValueError(f"angular shape for R^{n} needs {n - 1} positive entries, got {shape}")
    if n == 2:
        lim = np.pi / 2 if hemisphere else np.pi
        return [np.linspace(-lim, lim, shape[0] + 1)]
    edges = []
    top = 0.0 if hemisphere else -1.0
    if n == 3:
        edges.append(np.arccos(np.linspace(1.0, top, shape[0] + 1)))
    else:
        edges.append(np.linspace(0.0, np.pi / 2 if hemisphere else np.pi, shape[0] + 1))
    for k in shape[1:-1]:
        edges.append(np.linspace(0.0, np.pi, k + 1))
    edges.append(np.linspace(-np.pi, np.pi, shape[-1] + 1))
    return edges


def _sin_power_integral(m: int, lo, hi, order: int = 24):
    x, w = np.polynomial.legendre.leggauss(order)
    lo, hi = np.asarray(lo), np.asarray(hi)
    mid, half = (lo + hi) / 2, (hi - lo) / 2
    t = mid[:, None] + half[:, None] * x[None, :]
    return half * (np.sin(t) ** m @ w)


def _gl_in(edges, order):
    """Gauss-Legendre nodes/weights inside every interval of ``edges``."""
    x, w = np.polynomial.legendre.leggauss(order)
    lo, hi = edges[:-1], edges[1:]
    mid, half = (lo + hi) / 2, (hi - lo) / 2
    return mid[:, None] + half[:, None] * x[None, :], half[:, None] * w[None, :]


class Grid:
    """Base class; subclasses set ``dim``, ``centers``, ``volumes`` and
    implement ``cell_index`` and ``quadrature``."""

    dim: int
    centers: np.ndarray
    volumes: np.ndarray

    @property
    def size(self) -> int:
        return len(self.volumes)

    def cell_index(self, points: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def quadrature(self, order: int = 3):
        """Return ``(points, weights, cell_ids)`` of a per-cell tensor rule."""
        raise NotImplementedError

    def sample_spacing(self) -> float:
        """Length below which a straight segment crosses at most one cell face."""
        raise NotImplementedError

    def incidence(self, curves, oversample: int = 4) -> sparse.csr_matrix:
        """Sparse ``(len(curves), size)`` matrix of curve lengths per cell.

        Segments are sampled at spacing ``sample_spacing()/oversample``; each
        change of cell between consecutive samples is located by bisection.
        All curves are processed in one vectorized pass.
        """
        curves = list(curves)
        if not curves:
            return sparse.csr_matrix((0, self.size))
        h = self.sample_spacing() / oversample
        P = np.concatenate([c.vertices[:-1] for c in curves])
        Q = np.concatenate([c.vertices[1:] for c in curves])
        L = np.concatenate([c.seg_lengths for c in curves])
        owner = np.repeat(np.arange(len(curves)), [c.seg_lengths.size for c in curves])

        ks = np.maximum(1, np.ceil(L / h).astype(int))
        # sample intervals [t0, t1] of every segment
        sid = np.repeat(np.arange(L.size), ks)
        first = np.repeat(np.cumsum(ks) - ks, ks)
        j = np.arange(sid.size) - first
        t0 = j / ks[sid]
        t1 = (j + 1) / ks[sid]
        D = Q - P
        c0 = self.cell_index(P[sid] + t0[:, None] * D[sid])
        c1 = self.cell_index(P[sid] + t1[:, None] * D[sid])

        split = c0 != c1
        tc = t1.copy()
        if np.any(split):
            lo, hi = t0[split].copy(), t1[split].copy()
            cl, s_ = c0[split], sid[split]
            for _ in range(BISECT_STEPS):
                mid = 0.5 * (lo + hi)
                same = self.cell_index(P[s_] + mid[:, None] * D[s_]) == cl
                lo = np.where(same, mid, lo)
                hi = np.where(same, hi, mid)
            tc[split] = 0.5 * (lo + hi)
        seglen = L[sid]
        cells = np.concatenate([c0, c1[split]])
        lens = np.concatenate([(tc - t0) * seglen, ((t1 - tc) * seglen)[split]])
        rows = np.concatenate([owner[sid], owner[sid][split]])
        keep = (cells >= 0) & (lens > 0)
        A = sparse.coo_matrix(
            (lens[keep], (rows[keep], cells[keep])), shape=(len(curves), self.size)
        ).tocsr()
        A.sum_duplicates()
        return A

    def integrate(self, func, order: int = 3) -> float:
        pts, w, _ = self.quadrature(order)
        return float(np.dot(func(pts), w))


@dataclass(frozen=True, eq=False)
class SphericalGrid(Grid):
    """Product grid in (r, hyperspherical angles) about ``center``.

    ``radial_edges`` are radii; ``angle_edges`` come from :func:`angular_edges`
    and are measured in the frame whose first axis is ``axis``.
    """

    center: np.ndarray
    radial_edges: np.ndarray
    angle_edges: list
    axis: np.ndarray = None
    frame: np.ndarray = field(init=False, repr=False)
    centers: np.ndarray = field(init=False, repr=False)
    volumes: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        c = as_point(self.center)
        n = c.size
        re = np.asarray(self.radial_edges, dtype=float)
        if re.ndim != 1 or re.size < 2 or np.any(np.diff(re) <= 0) or re[0] <= 0:
            raise ValueError("radial edges must be positive and increasing")
        if len(self.angle_edges) != n - 1:
            raise ValueError(f"need {n - 1} angular edge arrays in R^{n}")
        axis = np.eye(n)[0] if self.axis is None else np.asarray(self.axis, dtype=float)
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radial_edges", re)
        object.__setattr__(self, "angle_edges", [np.asarray(e, dtype=float) for e in self.angle_edges])
        object.__setattr__(self, "axis", axis / np.linalg.norm(axis))
        object.__setattr__(self, "frame", orthonormal_frame(axis))

        rvol = (re[1:] ** n - re[:-1] ** n) / n
        factors = [rvol]
        for k, e in enumerate(self.angle_edges):
            m = n - 2 - k if k < n - 2 else 0
            factors.append(_sin_power_integral(m, e[:-1], e[1:]) if m else np.diff(e))
        vol = factors[0]
        for f in factors[1:]:
            vol = np.multiply.outer(vol, f)
        object.__setattr__(self, "volumes", vol.ravel())

        rc = 0.5 * (re[:-1] + re[1:])
        ac = [0.5 * (e[:-1] + e[1:]) for e in self.angle_edges]
        mesh = np.meshgrid(rc, *ac, indexing="ij")
        r = mesh[0].ravel()
        ang = np.column_stack([m.ravel() for m in mesh[1:]])
        object.__setattr__(self, "centers", c + (r[:, None] * from_hyperspherical(ang)) @ self.frame)

    @property
    def dim(self) -> int:
        return self.center.size

    @property
    def shape(self) -> tuple:
        return (self.radial_edges.size - 1,) + tuple(e.size - 1 for e in self.angle_edges)

    def coords(self, points):
        y = (as_points(points, self.dim) - self.center) @ self.frame.T
        return to_hyperspherical(y)

    def cell_index(self, points) -> np.ndarray:
        r, ang = self.coords(points)
        shape = self.shape
        idx = [np.searchsorted(self.radial_edges, r, side="right") - 1]
        for k, e in enumerate(self.angle_edges):
            idx.append(np.searchsorted(e, ang[:, k], side="right") - 1)
        ok = np.ones(len(r), dtype=bool)
        for i, s in zip(idx, shape):
            ok &= (i >= 0) & (i < s)
        flat = np.ravel_multi_index(tuple(np.clip(i, 0, s - 1) for i, s in zip(idx, shape)), shape)
        return np.where(ok, flat, -1)

    def sample_spacing(self) -> float:
        re = self.radial_edges
        h = np.min(np.diff(re))
        ang = min(np.min(np.diff(e)) for e in self.angle_edges)
        polar_sin = 1.0
        if self.dim >= 3:
            e0 = self.angle_edges[0]
            polar_sin = max(np.sin(min(e0[1] - e0[0], np.pi / 2)), 1e-3)
        return float(min(h, re[0] * ang * polar_sin))

    def quadrature(self, order: int = 3):
        n = self.dim
        re = self.radial_edges
        rn, rw = _gl_in(re, order)
        rw = rw * rn ** (n - 1)
        axes = [(rn, rw)]
        for k, e in enumerate(self.angle_edges):
            an, aw = _gl_in(e, order)
            m = n - 2 - k if k < n - 2 else 0
            if m:
                aw = aw * np.sin(an) ** m
            axes.append((an, aw))
        # tensor over (cell index per axis, node per axis)
        node_mesh = np.meshgrid(*[a[0].ravel() for a in axes], indexing="ij")
        w_mesh = np.meshgrid(*[a[1].ravel() for a in axes], indexing="ij")
        r = node_mesh[0].ravel()
        ang = np.column_stack([m.ravel() for m in node_mesh[1:]])
        w = np.prod([m.ravel() for m in w_mesh], axis=0)
        pts = self.center + (r[:, None] * from_hyperspherical(ang)) @ self.frame
        cell_axes = np.meshgrid(*[np.repeat(np.arange(a[0].shape[0]), order) for a in axes], indexing="ij")
        cells = np.ravel_multi_index(tuple(m.ravel() for m in cell_axes), self.shape)
        return pts, w, cells


@dataclass(frozen=True, eq=False)
class CartesianGrid(Grid):
    """Uniform box grid on ``[lower, upper]``."""

    lower: np.ndarray
    upper: np.ndarray
    shape: tuple
    centers: np.ndarray = field(init=False, repr=False)
    volumes: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        lo, hi = as_point(self.lower), as_point(self.upper)
        shape = tuple(int(s) for s in self.shape)
        if lo.size != hi.size or len(shape) != lo.size or np.any(hi <= lo) or min(shape) < 1:
            raise ValueError("invalid Cartesian grid")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        object.__setattr__(self, "shape", shape)
        h = (hi - lo) / np.array(shape)
        axes = [lo[k] + h[k] * (np.arange(shape[k]) + 0.5) for k in range(lo.size)]
        mesh = np.meshgrid(*axes, indexing="ij")
        object.__setattr__(self, "centers", np.column_stack([m.ravel() for m in mesh]))
        object.__setattr__(self, "volumes", np.full(int(np.prod(shape)), float(np.prod(h))))

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def spacing(self) -> np.ndarray:
        return (self.upper - self.lower) / np.array(self.shape)

    def cell_index(self, points) -> np.ndarray:
        p = as_points(points, self.dim)
        idx = np.floor((p - self.lower) / self.spacing).astype(int)
        ok = np.all((idx >= 0) & (idx < np.array(self.shape)), axis=1)
        flat = np.ravel_multi_index(tuple(np.clip(idx, 0, np.array(self.shape) - 1).T), self.shape)
        return np.where(ok, flat, -1)

    def sample_spacing(self) -> float:
        return float(np.min(self.spacing))

    def quadrature(self, order: int = 3):
        n = self.dim
        axes = []
        for k in range(n):
            e = np.linspace(self.lower[k], self.upper[k], self.shape[k] + 1)
            axes.append(_gl_in(e, order))
        node_mesh = np.meshgrid(*[a[0].ravel() for a in axes], indexing="ij")
        w_mesh = np.meshgrid(*[a[1].ravel() for a in axes], indexing="ij")
        pts = np.column_stack([m.ravel() for m in node_mesh])
        w = np.prod([m.ravel() for m in w_mesh], axis=0)
        cell_axes = np.meshgrid(*[np.repeat(np.arange(s), order) for s in self.shape], indexing="ij")
        cells = np.ravel_multi_index(tuple(m.ravel() for m in cell_axes), self.shape)
        return pts, w, cells


class MappedGrid(Grid):
    """Image of a grid under a homeomorphism with a known inverse.

    Cell ``j`` is ``f(C_j)``; its volume is the integral of ``|J(x, f)|`` over
    ``C_j`` and membership is decided by pulling points back through the
    inverse.
    """

    def __init__(self, base: Grid, map: MapHandle, order: int = 3):
        if map.inverse is None:
            raise ValueError(f"{map.name} has no inverse; pass an explicit image grid")
        self.base = base
        self.map = map
        self.dim = base.dim
        self.centers = map(base.centers)
        pts, w, cells = base.quadrature(order)
        if map.has_jacobian:
            detJ = np.abs(np.linalg.det(map.jacobian(pts)))
        else:
            from .dilatation import fd_jacobian

            detJ = np.abs([np.linalg.det(fd_jacobian(map, p)) for p in pts])
        self.volumes = np.bincount(cells, weights=w * detJ, minlength=base.size)
        self._order = order

    def cell_index(self, points) -> np.ndarray:
        return self.base.cell_index(self.map.inv(as_points(points, self.dim)))

    def sample_spacing(self) -> float:
        # local stretch bound from the Jacobian at the cell centers
        if self.map.has_jacobian:
            s = np.linalg.svd(self.map.jacobian(self.base.centers), compute_uv=False)[:, -1]
            return float(self.base.sample_spacing() * max(np.min(s), 1e-12))
        return self.base.sample_spacing()

    def quadrature(self, order: int = 3):
        pts, w, cells = self.base.quadrature(order)
        detJ = np.abs(np.linalg.det(self.map.jacobian(pts)))
        return self.map(pts), w * detJ, cells


@dataclass(frozen=True)
class GridDensity:
    """Piecewise-constant density: ``values[j]`` on cell ``j`` of ``grid``."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.size,):
            raise ValueError("one density value per grid cell required")
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise ValueError("density values must be finite and nonnegative")
        object.__setattr__(self, "values", v)

    @property
    def centers(self) -> np.ndarray:
        return self.grid.centers

    @property
    def volumes(self) -> np.ndarray:
        return self.grid.volumes

    def __call__(self, points) -> np.ndarray:
        idx = self.grid.cell_index(points)
        return np.where(idx >= 0, self.values[np.maximum(idx, 0)], 0.0)

    def energy(self, n: int | None = None) -> float:
        n = self.grid.dim if n is None else n
        return float(np.dot(self.volumes, self.values**n))
