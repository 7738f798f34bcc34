"""Evaluatable mappings, including the two counterexample constructions.

A :class:`MapHandle` wraps a vectorized function ``(N, n) -> (N, n)`` with an
optional analytic Jacobian ``(N, n) -> (N, n, n)`` and an optional inverse.
Handles never clamp to their domain; evaluating exactly at the singular point
raises.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .geometry import as_point, as_points

ArrayFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Domain:
    """Where a map is meant to be evaluated.

    ``kind`` is one of ``"space"``, ``"punctured_space"``, ``"ball"`` (punctured
    at ``center`` when ``punctured``) or ``"annulus"``.
    """

    kind: str
    center: np.ndarray
    radius: float = np.inf
    inner: float = 0.0
    punctured: bool = True

    def contains(self, points: np.ndarray) -> np.ndarray:
        d = np.linalg.norm(points - self.center, axis=1)
        ok = d < self.radius
        if self.kind == "annulus":
            ok &= d > self.inner
        elif self.punctured and self.kind != "space":
            ok &= d > 0
        return ok


@dataclass(frozen=True)
class MapHandle:
    dim: int
    name: str
    func: ArrayFn
    jac: Optional[ArrayFn] = None
    inverse: Optional[ArrayFn] = None
    singular_point: Optional[np.ndarray] = None
    domain: Optional[Domain] = None
    limit: Optional[np.ndarray] = None  # continuous extension at the singular point, if any

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError("maps act on R^n with n >= 2")
        if self.singular_point is not None:
            object.__setattr__(self, "singular_point", as_point(self.singular_point, self.dim))
        if self.domain is None:
            c = self.singular_point if self.singular_point is not None else np.zeros(self.dim)
            kind = "punctured_space" if self.singular_point is not None else "space"
            object.__setattr__(self, "domain", Domain(kind, c, punctured=self.singular_point is not None))

    @property
    def has_jacobian(self) -> bool:
        return self.jac is not None

    def _check(self, x):
        single = np.ndim(x) == 1
        pts = as_points(x, self.dim)
        if self.singular_point is not None:
            if np.any(np.all(pts == self.singular_point, axis=1)):
                raise ValueError(f"{self.name}: evaluation at the singular point")
        return pts, single

    def __call__(self, x) -> np.ndarray:
        pts, single = self._check(x)
        y = self.func(pts)
        return y[0] if single else y

    def jacobian(self, x) -> np.ndarray:
        if self.jac is None:
            raise AttributeError(f"{self.name} has no analytic Jacobian")
        pts, single = self._check(x)
        J = self.jac(pts)
        return J[0] if single else J

    def inv(self, y) -> np.ndarray:
        if self.inverse is None:
            raise AttributeError(f"{self.name} has no inverse")
        single = np.ndim(y) == 1
        out = self.inverse(as_points(y, self.dim))
        return out[0] if single else out


# ---------------------------------------------------------------------------
# radial maps  x -> phi(|x|) x/|x|


def _radial_jac(x, phi, dphi):
    r = np.linalg.norm(x, axis=1)
    u = x / r[:, None]
    n = x.shape[1]
    tang = (phi / r)[:, None, None]
    P = u[:, :, None] * u[:, None, :]
    return tang * (np.eye(n)[None] - P) + dphi[:, None, None] * P


@dataclass(frozen=True)
class RingMapParams:
    alpha: float
    dim: int

    def __post_init__(self):
        if not self.alpha > 0 or not np.isfinite(self.alpha):
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if self.dim < 2:
            raise ValueError("dimension must be >= 2")


def make_ring_map(params: RingMapParams) -> MapHandle:
    """``f(x) = (1 + |x|^alpha) x / |x|`` on the punctured unit ball.

    The image is the ring ``1 < |y| < 2``; the unit sphere is the cluster set
    at the origin.
    """
    a, n = float(params.alpha), params.dim

    def func(x):
        r = np.linalg.norm(x, axis=1)
        return ((1.0 + r**a) / r)[:, None] * x

    def jac(x):
        r = np.linalg.norm(x, axis=1)
        return _radial_jac(x, 1.0 + r**a, a * r ** (a - 1.0))

    def inverse(y):
        s = np.linalg.norm(y, axis=1)
        return ((s - 1.0) ** (1.0 / a) / s)[:, None] * y

    zero = np.zeros(n)
    return MapHandle(
        dim=n, name=f"ring(alpha={a:g})", func=func, jac=jac, inverse=inverse,
        singular_point=zero, domain=Domain("ball", zero, radius=1.0),
    )


def ring_map_ki(r, alpha: float, n: int):
    """Closed-form inner dilatation of the ring map at radius ``r`` (valid while
    the tangential stretch dominates, e.g. for all r < 1 when alpha < 1)."""
    r = np.asarray(r, dtype=float)
    return ((1.0 + r**alpha) / (alpha * r**alpha)) ** (n - 1)


def make_inversion(n: int, center=None) -> MapHandle:
    """Inversion in the unit sphere about ``center`` (default the origin)."""
    if n < 2:
        raise ValueError("dimension must be >= 2")
    c = np.zeros(n) if center is None else as_point(center, n)

    def func(x):
        d = x - c
        return c + d / np.sum(d * d, axis=1)[:, None]

    def jac(x):
        d = x - c
        r2 = np.sum(d * d, axis=1)
        u = d / np.sqrt(r2)[:, None]
        return (np.eye(n)[None] - 2.0 * u[:, :, None] * u[:, None, :]) / r2[:, None, None]

    return MapHandle(dim=n, name="inversion", func=func, jac=jac, inverse=func, singular_point=c)


# ---------------------------------------------------------------------------
# folding map


def fold(t):
    """Per-coordinate fold of R onto [-1, 1]: the period-4 triangle wave
    produced by reflecting across the odd integers toward the origin cube."""
    t = np.asarray(t, dtype=float)
    return np.abs(np.mod(t - 1.0, 4.0) - 2.0) - 1.0


def fold_slope(t):
    """Derivative of :func:`fold` (+1 or -1; fold points get the right-hand slope)."""
    t = np.asarray(t, dtype=float)
    return np.where(np.mod(t - 1.0, 4.0) - 2.0 >= 0.0, 1.0, -1.0)


def fold_by_reflections(t: float) -> float:
    """Reference fold: walk the reflections across 2k-1, 2k-3, ..., 1 for the
    cube ``[2k-1, 2k+1]`` containing t (mirror image for negative k)."""
    t = float(t)
    k = int(np.floor((abs(t) + 1.0) / 2.0))
    s = 1.0 if t >= 0 else -1.0
    y = abs(t)
    h = 2 * k - 1
    while h > -1:
        y = 2.0 * h - y
        h -= 2
    return s * y


@dataclass(frozen=True)
class FoldingParams:
    dim: int

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError("dimension must be >= 2")


def make_folding_map(params: FoldingParams) -> MapHandle:
    """Inversion, then per-coordinate folding into [-1, 1]^n, then scaling by
    sqrt(n)/n. Discrete, locally isometric after the inversion, bounded by 1,
    and not open at the fold hyperplanes."""
    n = params.dim
    s = np.sqrt(n) / n
    inv = make_inversion(n)

    def func(x):
        return s * fold(inv.func(x))

    def jac(x):
        z = inv.func(x)
        return s * fold_slope(z)[:, :, None] * inv.jac(x)

    return MapHandle(dim=n, name="folding", func=func, jac=jac, singular_point=np.zeros(n))


def folding_inverse_image(z) -> np.ndarray:
    """Point x with G3(x) = z, i.e. x = z / |z|^2 (used to place probes)."""
    z = np.asarray(z, dtype=float)
    return z / np.dot(z, z)


# ---------------------------------------------------------------------------
# standard fixtures


def _identity(n):
    return MapHandle(
        dim=n, name="identity", func=lambda x: x.copy(),
        jac=lambda x: np.broadcast_to(np.eye(n), (len(x), n, n)).copy(),
        inverse=lambda y: y.copy(), limit=np.zeros(n),
    )


def _linear(n, matrix=None, diag=None):
    if matrix is None:
        if diag is None:
            raise ValueError("linear map needs 'matrix' or 'diag'")
        matrix = np.diag(np.asarray(diag, dtype=float))
    M = np.array(matrix, dtype=float)
    if M.shape != (n, n):
        raise ValueError(f"linear map needs an {n}x{n} matrix, got {M.shape}")
    Minv = np.linalg.inv(M) if abs(np.linalg.det(M)) > 0 else None
    return MapHandle(
        dim=n, name="linear", func=lambda x: x @ M.T,
        jac=lambda x: np.broadcast_to(M, (len(x), n, n)).copy(),
        inverse=None if Minv is None else (lambda y: y @ Minv.T),
        limit=np.zeros(n),
    )


def _radial_power(n, c):
    c = float(c)
    if c == 0:
        raise ValueError("radial power exponent must be nonzero")

    def func(x):
        r = np.linalg.norm(x, axis=1)
        return (r ** (c - 1.0))[:, None] * x

    def jac(x):
        r = np.linalg.norm(x, axis=1)
        return _radial_jac(x, r**c, c * r ** (c - 1.0))

    def inverse(y):
        s = np.linalg.norm(y, axis=1)
        return (s ** (1.0 / c - 1.0))[:, None] * y

    return MapHandle(
        dim=n, name=f"radial_power(c={c:g})", func=func, jac=jac, inverse=inverse,
        singular_point=np.zeros(n), limit=np.zeros(n) if c > 0 else None,
    )


def _squaring(n):
    if n != 2:
        raise ValueError("the squaring map is planar (n = 2)")

    def func(x):
        return np.column_stack([x[:, 0] ** 2 - x[:, 1] ** 2, 2.0 * x[:, 0] * x[:, 1]])

    def jac(x):
        a, b = x[:, 0], x[:, 1]
        return np.stack([np.stack([2 * a, -2 * b], -1), np.stack([2 * b, 2 * a], -1)], 1)

    return MapHandle(dim=2, name="squaring", func=func, jac=jac, limit=np.zeros(2))


def _log_decay(n, beta, direction=None):
    """``x -> (log 1/|x|)^(-beta) u`` on the punctured ball of radius 1; tends
    to 0 at the origin exactly at the log-power rate ``beta``."""
    beta = float(beta)
    u = np.eye(n)[0] if direction is None else as_point(direction, n)
    u = u / np.linalg.norm(u)

    def func(x):
        r = np.linalg.norm(x, axis=1)
        return np.log(1.0 / r)[:, None] ** -beta * u

    def jac(x):
        r = np.linalg.norm(x, axis=1)
        L = np.log(1.0 / r)
        g = beta * L ** (-beta - 1.0) / r**2  # gradient of L^-beta is beta L^(-beta-1) x/r^2
        return u[None, :, None] * (g[:, None] * x)[:, None, :]

    zero = np.zeros(n)
    return MapHandle(
        dim=n, name=f"log_decay(beta={beta:g})", func=func, jac=jac,
        singular_point=zero, domain=Domain("ball", zero, radius=1.0), limit=zero,
    )


def _constant(n, value=None):
    v = np.zeros(n) if value is None else as_point(value, n)
    return MapHandle(
        dim=n, name="constant", func=lambda x: np.broadcast_to(v, x.shape).copy(),
        jac=lambda x: np.zeros((len(x), n, n)), limit=v,
    )


_STANDARD = {
    "identity": _identity,
    "linear": _linear,
    "radial_power": _radial_power,
    "squaring": _squaring,
    "log_decay": _log_decay,
    "constant": _constant,
}

STANDARD_NAMES = tuple(_STANDARD)


def make_standard(name: str, n: int, **params) -> MapHandle:
    """Fixture maps: ``identity``, ``linear`` (``matrix=`` or ``diag=``),
    ``radial_power`` (``c=``), ``squaring`` (planar z^2), ``log_decay``
    (``beta=``), ``constant`` (``value=``)."""
    try:
        build = _STANDARD[name]
    except KeyError:
        raise ValueError(f"unknown map {name!r}; known: {', '.join(_STANDARD)}") from None
    return build(n, **params)


def compose(outer: MapHandle, inner: MapHandle) -> MapHandle:
    """``outer o inner``; the Jacobian follows the chain rule when both exist."""
    if outer.dim != inner.dim:
        raise ValueError("dimension mismatch in composition")

    def func(x):
        y = inner.func(x)
        _check_inner_image(outer, y)
        return outer.func(y)

    jac = None
    if outer.jac is not None and inner.jac is not None:
        def jac(x):
            y = inner.func(x)
            _check_inner_image(outer, y)
            return outer.jac(y) @ inner.jac(x)

    inverse = None
    if outer.inverse is not None and inner.inverse is not None:
        def inverse(z):
            return inner.inverse(outer.inverse(z))

    return MapHandle(
        dim=outer.dim, name=f"{outer.name}∘{inner.name}", func=func, jac=jac,
        inverse=inverse, singular_point=inner.singular_point, domain=inner.domain,
    )


def _check_inner_image(outer: MapHandle, y: np.ndarray):
    if not np.all(np.isfinite(y)) or not np.all(outer.domain.contains(y)):
        raise ValueError(f"composition leaves the domain of {outer.name}")
