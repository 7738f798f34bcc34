"""Integral hypotheses on spheres, annuli and balls around a singular point.

Every annulus or ball integral is reduced to a radial integral of sphere
averages, so n-dimensional integration becomes 1-D adaptive quadrature in
``u = log(1/r)`` (or ``s = r/eps`` on balls).
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

from .geometry import AnnulusSpec, as_point, dimension_constants, sphere_sample

QUAD_EPSABS = 1e-10
QUAD_EPSREL = 1e-10
QUAD_LIMIT = 200


@dataclass(frozen=True)
class MajorantField:
    """Scalar field ``Q: R^n -> [1, inf]``, vectorized over ``(N, n)`` points."""

    func: Callable[[np.ndarray], np.ndarray]
    name: str = "Q"

    def __call__(self, x) -> np.ndarray:
        return np.asarray(self.func(np.atleast_2d(x)), dtype=float)


@dataclass(frozen=True)
class WeightFunction:
    """Positive weight ``psi: (0, eps0] -> (0, inf)``, vectorized over t."""

    func: Callable[[np.ndarray], np.ndarray]
    name: str = "psi"

    def __call__(self, t):
        return self.func(np.asarray(t, dtype=float))


def constant_field(c: float) -> MajorantField:
    return MajorantField(lambda x: np.full(len(x), float(c)), f"const({c:g})")


def radial_field(profile: Callable, center, name: str = "radial") -> MajorantField:
    """``Q(x) = profile(|x - center|)``."""
    b = as_point(center)
    return MajorantField(lambda x: profile(np.linalg.norm(x - b, axis=1)), name)


def log_weight() -> WeightFunction:
    """``psi(t) = 1 / (t log(1/t))``."""
    return WeightFunction(lambda t: 1.0 / (t * np.log(1.0 / t)), "1/(t log(1/t))")


def constant_weight(c: float = 1.0) -> WeightFunction:
    return WeightFunction(lambda t: np.full(np.shape(t), float(c)), f"const({c:g})")


def _quad(fn, a, b, what: str) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, _ = integrate.quad(fn, a, b, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=QUAD_LIMIT)
        except integrate.IntegrationWarning as exc:
            raise ArithmeticError(f"{what}: quadrature did not converge ({exc})") from None
    if not math.isfinite(val):
        raise ArithmeticError(f"{what}: integral is not finite")
    return float(val)


def sphere_average(Q: MajorantField, center, r: float, count: int | None = None) -> float:
    """Mean of Q over the sphere ``|x - center| = r``."""
    pts, w = sphere_sample(center, r, count)
    vals = Q(pts)
    if not np.all(np.isfinite(vals)):
        raise ArithmeticError(f"{Q.name} is not finite on S(center, {r:g})")
    return float(np.dot(vals, w) / w.sum())


def normalizer_I(psi: WeightFunction, eps: float, eps0: float) -> float:
    """``I(eps, eps0)``: integral of psi over ``[eps, eps0]``, taken in log t."""
    if not 0 < eps < eps0:
        raise ValueError(f"need 0 < eps < eps0, got {eps}, {eps0}")

    def g(u):
        t = math.exp(-u)
        return float(psi(t)) * t

    return _quad(g, -math.log(eps0), -math.log(eps), "I(eps, eps0)")


def _radial_integral(h: Callable[[float], float], r0: float, r1: float, what: str) -> float:
    """Integral of ``h(r) dr`` over ``[r0, r1]`` in the variable u = log(1/r)."""
    if r0 == r1:
        return 0.0
    return _quad(lambda u: h(math.exp(-u)) * math.exp(-u), -math.log(r1), -math.log(r0), what)


def annulus_condition_lhs(Q: MajorantField, psi: WeightFunction, ann: AnnulusSpec, count: int | None = None) -> float:
    """Integral of ``Q(x) psi(|x-b|)^n`` over the annulus, computed as
    ``omega_{n-1} * int psi(r)^n r^{n-1} q_b(r) dr``."""
    n = ann.dim
    omega = dimension_constants(n).omega

    def h(r):
        return float(psi(r)) ** n * r ** (n - 1) * sphere_average(Q, ann.center, r, count)

    return omega * _radial_integral(h, ann.r_inner, ann.r_outer, "annulus integral")


@dataclass(frozen=True)
class ConditionRow:
    eps: float
    lhs: float
    rhs: float
    passed: bool


@dataclass(frozen=True)
class ConditionReport:
    name: str
    A: float
    eps0: float
    rows: tuple

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)


def _lhs(Q, psi, b, eps, eps0, count):
    if eps == eps0:
        return 0.0
    return annulus_condition_lhs(Q, psi, AnnulusSpec(b, eps, eps0), count)


def check_condition_4(Q, psi, b, eps0: float, A: float, eps_grid, count=None, rtol: float = 1e-9) -> ConditionReport:
    """Annulus condition with normalizer: ``LHS <= A I^n / (log log 1/eps)^(n-1)``."""
    b = as_point(b)
    n = b.size
    rows = []
    for eps in eps_grid:
        if not 0 < eps < eps0 / 2:
            raise ValueError(f"eps={eps} outside (0, eps0/2)")
        ll = math.log(math.log(1.0 / eps)) if eps < 1 else -1.0
        if ll <= 0:
            raise ValueError(f"log log(1/eps) must be positive, eps={eps}")
        lhs = _lhs(Q, psi, b, eps, eps0, count)
        rhs = A * normalizer_I(psi, eps, eps0) ** n / ll ** (n - 1)
        rows.append(ConditionRow(eps, lhs, rhs, lhs <= rhs * (1 + rtol) + QUAD_EPSABS))
    return ConditionReport("annulus_normalized", A, eps0, tuple(rows))


def check_condition_14(Q, b, eps0: float, A: float, eps_grid, count=None, rtol: float = 1e-9) -> ConditionReport:
    """Log-weight condition: ``LHS <= A log(log(1/eps) / log(1/eps0))``."""
    b = as_point(b)
    if not 0 < eps0 < 1:
        raise ValueError("eps0 must lie in (0, 1)")
    psi = log_weight()
    rows = []
    for eps in eps_grid:
        if not 0 < eps <= eps0:
            raise ValueError(f"eps={eps} outside (0, eps0]")
        lhs = _lhs(Q, psi, b, eps, eps0, count)
        rhs = A * math.log(math.log(1.0 / eps) / math.log(1.0 / eps0))
        rows.append(ConditionRow(eps, lhs, rhs, lhs <= rhs * (1 + rtol) + QUAD_EPSABS))
    return ConditionReport("log_weight", A, eps0, tuple(rows))


# ---------------------------------------------------------------------------
# finite mean oscillation

FMO_TAIL = 5
FMO_FLAT_SLOPE = 0.05
FMO_BLOWUP_FACTOR = 10.0


@dataclass(frozen=True)
class FmoEstimate:
    radii: np.ndarray
    means: np.ndarray
    oscillations: np.ndarray
    limsup: float
    tail_slope: float
    verdict: str  # "fmo" | "not_fmo" | "inconclusive"
    thresholds: dict


def default_radii(eps0: float, levels: int = 20) -> np.ndarray:
    return eps0 * 2.0 ** -np.arange(levels)


def _ball_mean_and_oscillation(Q, b, eps, count):
    n = b.size
    # shift by a reference value so a constant field gives exactly zero deviation
    ref = float(Q(b + eps * np.eye(n)[:1])[0])

    def shifted_avg(s):
        return sphere_average(MajorantField(lambda x: Q(x) - ref), b, eps * s, count)

    # ball average = n * int_0^1 s^(n-1) q(eps s) ds
    mean = ref + n * _quad(lambda s: s ** (n - 1) * shifted_avg(s), 0.0, 1.0, "ball mean")
    dev = mean - ref
    devfield = MajorantField(lambda x: np.abs(Q(x) - ref - dev))
    osc = n * _quad(lambda s: s ** (n - 1) * sphere_average(devfield, b, eps * s, count), 0.0, 1.0, "ball oscillation")
    return mean, osc


def fmo_estimate(Q: MajorantField, b, radii=None, count: int | None = None, workers: int = 1) -> FmoEstimate:
    """Mean oscillation of Q on the balls ``B(b, eps)`` for decreasing eps.

    Verdict: with ``x = log log(1/eps)`` over the last 5 radii, a fitted
    slope of the oscillation below 0.05 gives ``fmo``; a last oscillation
    above 10x the sequence median with positive slope gives ``not_fmo``;
    anything else is ``inconclusive``.
    """
    b = as_point(b)
    radii = default_radii(0.25) if radii is None else np.asarray(radii, dtype=float)
    if radii.ndim != 1 or radii.size < 2 or np.any(np.diff(radii) >= 0) or radii[-1] <= 0:
        raise ValueError("radii must be positive and strictly decreasing")

    job = lambda e: _ball_mean_and_oscillation(Q, b, float(e), count)  # noqa: E731
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            out = list(ex.map(job, radii))
    else:
        out = [job(e) for e in radii]
    means = np.array([m for m, _ in out])
    osc = np.array([o for _, o in out])

    tail_r = radii[-FMO_TAIL:]
    tail_o = osc[-FMO_TAIL:]
    thresholds = {"tail": FMO_TAIL, "flat_slope": FMO_FLAT_SLOPE, "blowup_factor": FMO_BLOWUP_FACTOR}
    if tail_r.size < 2 or np.any(tail_r >= 1 / math.e):
        slope = math.nan
        verdict = "inconclusive"
    else:
        x = np.log(np.log(1.0 / tail_r))
        slope = float(np.polyfit(x, tail_o, 1)[0])
        if slope < FMO_FLAT_SLOPE:
            verdict = "fmo"
        elif osc[-1] > FMO_BLOWUP_FACTOR * np.median(osc) and slope > 0:
            verdict = "not_fmo"
        else:
            verdict = "inconclusive"
    limsup = math.inf if verdict == "not_fmo" else float(np.max(tail_o))
    return FmoEstimate(
        radii=radii, means=means, oscillations=osc, limsup=limsup,
        tail_slope=slope, verdict=verdict, thresholds=thresholds,
    )
