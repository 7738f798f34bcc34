"""Pointwise Jacobian analysis: singular values, J(x,f), K_I and K_O."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .gallery import MapHandle
from .geometry import AnnulusSpec, as_point, as_points, sphere_sample

FD_REL_STEP = 1e-6
ZERO_DERIVATIVE_TOL = 1e-12
DEGENERATE_RATIO = 1e-15  # sigma_min / sigma_max below this counts as J = 0


def fd_step(x) -> float:
    return FD_REL_STEP * (1.0 + float(np.linalg.norm(x)))


def fd_jacobian(map: MapHandle, x) -> np.ndarray:
    """Central finite differences with step ``1e-6 * (1 + |x|)``."""
    x = as_point(x, map.dim)
    h = fd_step(x)
    if map.singular_point is not None and np.linalg.norm(x - map.singular_point) <= 10 * h:
        raise ValueError("finite-difference stencil too close to the singular point")
    n = map.dim
    stencil = np.concatenate([x + h * np.eye(n), x - h * np.eye(n)])
    vals = map(stencil)
    if not np.all(np.isfinite(vals)):
        raise ArithmeticError("map evaluation failed on the finite-difference stencil")
    return ((vals[:n] - vals[n:]) / (2.0 * h)).T


def jacobian_at(map: MapHandle, x, method: str = "auto") -> np.ndarray:
    """Derivative matrix of ``map`` at ``x``: analytic if available, else FD."""
    if method not in ("auto", "analytic", "fd"):
        raise ValueError(f"unknown Jacobian method {method!r}")
    if method == "fd" or (method == "auto" and not map.has_jacobian):
        return fd_jacobian(map, x)
    J = map.jacobian(as_point(x, map.dim))
    if not np.all(np.isfinite(J)):
        raise ArithmeticError(f"{map.name}: Jacobian not finite at {x}")
    return J


@dataclass(frozen=True)
class DilatationRecord:
    point: np.ndarray
    singular_values: np.ndarray
    jac_det: float
    K_I: float
    K_O: float
    jacobian: np.ndarray = field(repr=False, default=None)


def dilatations_from_matrix(J: np.ndarray, scale: float = 1.0):
    """Return ``(sigma, det, K_I, K_O)`` for one derivative matrix.

    ``scale`` sets the threshold below which the derivative is treated as
    the zero matrix (``sigma_max < 1e-12 * scale``).
    """
    sigma = np.linalg.svd(J, compute_uv=False)
    det = float(np.linalg.det(J))
    smax, smin = sigma[0], sigma[-1]
    if smax < ZERO_DERIVATIVE_TOL * scale:
        return sigma, det, 1.0, 1.0
    if smin <= DEGENERATE_RATIO * smax:
        return sigma, det, np.inf, np.inf
    # products of ratios keep |J|/smin^n and smax^n/|J| exact in the sigmas
    K_I = float(np.prod(sigma / smin))
    K_O = float(np.prod(smax / sigma))
    return sigma, det, K_I, K_O


def dilatations_at(map: MapHandle, x, method: str = "auto") -> DilatationRecord:
    x = as_point(x, map.dim)
    J = jacobian_at(map, x, method)
    sigma, det, ki, ko = dilatations_from_matrix(J, 1.0 + np.linalg.norm(x))
    return DilatationRecord(point=x, singular_values=sigma, jac_det=det, K_I=ki, K_O=ko, jacobian=J)


def inner_dilatation(map: MapHandle, points, method: str = "auto") -> np.ndarray:
    """K_I at a batch of points (vectorized over the analytic Jacobian)."""
    pts = as_points(points, map.dim)
    if method == "fd" or (method == "auto" and not map.has_jacobian):
        return np.array([dilatations_at(map, p, "fd").K_I for p in pts])
    J = map.jacobian(pts)
    if not np.all(np.isfinite(J)):
        raise ArithmeticError(f"{map.name}: Jacobian not finite")
    sigma = np.linalg.svd(J, compute_uv=False)
    smax, smin = sigma[:, 0], sigma[:, -1]
    scale = 1.0 + np.linalg.norm(pts, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        ki = np.prod(sigma / smin[:, None], axis=1)
    ki = np.where(smin <= DEGENERATE_RATIO * smax, np.inf, ki)
    return np.where(smax < ZERO_DERIVATIVE_TOL * scale, 1.0, ki)


@dataclass(frozen=True)
class LqNormResult:
    value: float  # integral of K_I^q over the given annulus
    radii: np.ndarray  # inner radii, decreasing
    partial_integrals: np.ndarray  # integral over (radii[k], r_outer)
    tail_slope: float  # d log(shell integral) / d log r over the last decade
    converged: bool


def ki_lq_norm(
    map: MapHandle,
    annulus: AnnulusSpec,
    q: float,
    levels_per_decade: int = 4,
    nodes_per_level: int = 8,
    sphere_count: int | None = None,
) -> LqNormResult:
    """Shell quadrature of the integral of ``K_I(x, f)^q`` over an annulus.

    Radii are log-spaced from ``r_outer`` down to ``r_inner``; each level is
    integrated with Gauss-Legendre in ``log r``. The flag ``converged`` is
    ``False`` when the shell integral ``r -> int_{S(b,r)} K_I^q dS`` decays no
    slower than ``r^-1`` over the innermost decade, i.e. the integral diverges
    as the inner radius shrinks.
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    b = annulus.center
    n = annulus.dim
    lo, hi = np.log(annulus.r_inner), np.log(annulus.r_outer)
    nlev = max(1, int(np.ceil((hi - lo) / np.log(10.0) * levels_per_decade)))
    edges = np.linspace(hi, lo, nlev + 1)
    x, w = np.polynomial.legendre.leggauss(nodes_per_level)
    unit, uw = sphere_sample(np.zeros(n), 1.0, sphere_count)

    def shell(r):
        k = inner_dilatation(map, b + r * unit)
        if not np.all(np.isfinite(k)):
            raise ArithmeticError("K_I is infinite on the sample set")
        return r ** (n - 1) * np.dot(k**q, uw)

    pieces = []
    for a, c in zip(edges[:-1], edges[1:]):
        u = 0.5 * (a + c) + 0.5 * (a - c) * x
        r = np.exp(u)
        vals = np.array([shell(ri) for ri in r])
        pieces.append(0.5 * (a - c) * np.dot(w, vals * r))
    partial = np.cumsum(pieces)
    if not np.all(np.isfinite(partial)):
        raise ArithmeticError("quadrature produced non-finite values")

    # tail slope on the innermost decade
    tail = np.exp(np.linspace(lo, min(hi, lo + np.log(10.0)), 6))
    s = np.array([shell(r) for r in tail])
    slope = float(np.polyfit(np.log(tail), np.log(s), 1)[0])
    return LqNormResult(
        value=float(partial[-1]), radii=np.exp(edges[1:]), partial_integrals=partial,
        tail_slope=slope, converged=slope > -1.0,
    )
