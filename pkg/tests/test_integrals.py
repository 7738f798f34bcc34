import math

import numpy as np
import pytest

from isosing.geometry import AnnulusSpec
from isosing.integrals import (
    MajorantField,
    annulus_condition_lhs,
    check_condition_14,
    check_condition_4,
    constant_field,
    constant_weight,
    fmo_estimate,
    log_weight,
    normalizer_I,
    radial_field,
    sphere_average,
)


def test_sphere_average_of_polynomial():
    # mean of x1^2 + x2^2 on S(0, r) in R^3 is 2 r^2 / 3
    Q = MajorantField(lambda x: x[:, 0] ** 2 + x[:, 1] ** 2)
    assert sphere_average(Q, [0, 0, 0], 0.5) == pytest.approx(2 * 0.25 / 3, abs=1e-13)


def test_sphere_average_rejects_infinite_field():
    with pytest.raises(ArithmeticError):
        sphere_average(constant_field(math.inf), [0, 0], 0.1)


@pytest.mark.parametrize("eps,eps0", [(1e-3, 0.1), (1e-8, 0.2), (0.05, 0.1)])
def test_log_normalizer_closed_form(eps, eps0):
    expect = math.log(math.log(1 / eps) / math.log(1 / eps0))
    assert normalizer_I(log_weight(), eps, eps0) == pytest.approx(expect, rel=1e-9)


def test_constant_normalizer():
    assert normalizer_I(constant_weight(2.0), 0.1, 0.3) == pytest.approx(0.4)


@pytest.mark.parametrize("n", [2, 3])
def test_annulus_lhs_with_unit_field(n):
    # Q = 1, psi = 1/(t log 1/t): omega (L0^(1-n) - L^(1-n)) / (n-1), L = log 1/t
    omega = {2: 2 * math.pi, 3: 4 * math.pi}[n]
    eps, eps0 = math.exp(-math.e**2), math.exp(-math.e)
    L, L0 = math.log(1 / eps), math.log(1 / eps0)
    expect = omega * (L0 ** (1 - n) - L ** (1 - n)) / (n - 1)
    got = annulus_condition_lhs(constant_field(1.0), log_weight(), AnnulusSpec(np.zeros(n), eps, eps0))
    assert got == pytest.approx(expect, rel=1e-8)


def test_annulus_lhs_unit_field_planar_is_pi():
    # eps0 = 1/e, eps = e^-2: 2 pi (1/1 - 1/2) = pi
    lhs = annulus_condition_lhs(constant_field(1.0), log_weight(), AnnulusSpec([0, 0], math.exp(-2), math.exp(-1)))
    assert lhs == pytest.approx(math.pi, abs=1e-9)


def test_condition_14_for_log_field_planar():
    # Q = log(1/|x|) in the plane: LHS = 2 pi log(L/L0) which is <= A I with A = 2 pi
    Q = radial_field(lambda r: np.log(1 / r), [0, 0])
    grid = [1e-3, 1e-6, 1e-12]
    rep = check_condition_14(Q, [0, 0], 0.1, 2 * math.pi, grid)
    assert rep.passed
    for row in rep.rows:
        assert row.lhs == pytest.approx(row.rhs, rel=1e-7)
    assert not check_condition_14(Q, [0, 0], 0.1, 6.0, grid).passed


def test_condition_4_with_constant_field():
    rep = check_condition_4(constant_field(1.0), log_weight(), [0, 0], 0.1, 10.0, [1e-4, 1e-8])
    assert rep.passed and len(rep.rows) == 2
    with pytest.raises(ValueError):
        check_condition_4(constant_field(1.0), log_weight(), [0, 0], 0.1, 1.0, [0.09])


def test_fmo_constant_field_is_zero():
    est = fmo_estimate(constant_field(3.0), [0, 0], radii=0.2 * 2.0 ** -np.arange(8))
    assert np.all(est.oscillations == 0) and est.verdict == "fmo"
    assert np.allclose(est.means, 3.0)


@pytest.mark.parametrize("n", [2, 3])
def test_fmo_log_field_closed_form(n):
    # oscillation of log(1/|x|) on B(0, eps) is 2/(n e); mean is log(1/eps) + 1/n
    Q = radial_field(lambda r: np.log(1 / r), np.zeros(n))
    radii = 0.2 * 4.0 ** -np.arange(7)
    est = fmo_estimate(Q, np.zeros(n), radii=radii)
    assert np.allclose(est.oscillations, 2 / (n * math.e), rtol=1e-6)
    assert np.allclose(est.means, np.log(1 / radii) + 1 / n, rtol=1e-6)
    assert est.verdict == "fmo"


def test_fmo_power_singularity_is_not_fmo():
    Q = radial_field(lambda r: r**-0.5, [0, 0])
    est = fmo_estimate(Q, [0, 0], radii=0.2 * 4.0 ** -np.arange(10))
    assert est.verdict == "not_fmo" and est.limsup == math.inf


def test_fmo_rejects_bad_radii():
    with pytest.raises(ValueError):
        fmo_estimate(constant_field(1.0), [0, 0], radii=[0.1, 0.2])
