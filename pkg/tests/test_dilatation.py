import math

import numpy as np
import pytest

from isosing.dilatation import (
    dilatations_at,
    dilatations_from_matrix,
    fd_jacobian,
    inner_dilatation,
    ki_lq_norm,
)
from isosing.gallery import RingMapParams, make_ring_map, make_standard
from isosing.geometry import AnnulusSpec


def ring_ki(r, alpha, n):
    # frozen from the radial/tangential stretch of (1 + r^a) x/|x|
    return ((1 + r**alpha) / (alpha * r**alpha)) ** (n - 1)


def test_identity_and_conformal_scaling():
    for J in (np.eye(3), 4.0 * np.eye(2)):
        _, _, ki, ko = dilatations_from_matrix(J)
        assert ki == pytest.approx(1.0) and ko == pytest.approx(1.0)


def test_diagonal_matrix():
    # sigma = (2, 1): K_I = 2 / 1 * 1 = 2, K_O = 2
    _, det, ki, ko = dilatations_from_matrix(np.diag([2.0, 1.0]))
    assert (det, ki, ko) == (2.0, 2.0, 2.0)
    # sigma = (3, 1, 1): K_I = 3, K_O = 9
    _, _, ki, ko = dilatations_from_matrix(np.diag([1.0, 3.0, 1.0]))
    assert ki == pytest.approx(3.0) and ko == pytest.approx(9.0)


def test_zero_and_degenerate_derivatives():
    assert dilatations_from_matrix(np.zeros((2, 2)))[2:] == (1.0, 1.0)
    assert dilatations_from_matrix(np.diag([1.0, 0.0]))[2:] == (math.inf, math.inf)
    assert dilatations_from_matrix(np.diag([1.0, 1e-16]))[2] == math.inf


def test_ki_ko_inequalities():
    rng = np.random.default_rng(3)
    for _ in range(50):
        n = int(rng.integers(2, 5))
        _, _, ki, ko = dilatations_from_matrix(rng.normal(size=(n, n)))
        assert ki >= 1 and ko >= 1
        assert ko <= ki ** (n - 1) * (1 + 1e-9) and ki <= ko ** (n - 1) * (1 + 1e-9)


@pytest.mark.parametrize("n,alpha", [(2, 0.5), (3, 0.25), (3, 0.9), (4, 0.6)])
def test_ring_map_ki_matches_closed_form(n, alpha):
    f = make_ring_map(RingMapParams(alpha, n))
    x = np.zeros(n)
    for r in (0.3, 0.01, 1e-4):
        x[0] = r
        assert dilatations_at(f, x).K_I == pytest.approx(ring_ki(r, alpha, n), rel=1e-10)
    # fixed FD step 1e-6 carries an O((h/r)^2) error, so FD is checked at r >= 0.01
    for r in (0.3, 0.01):
        x[0] = r
        assert dilatations_at(f, x, "fd").K_I == pytest.approx(ring_ki(r, alpha, n), rel=1e-6)


def test_inner_dilatation_batch_agrees_with_pointwise():
    f = make_ring_map(RingMapParams(0.4, 3))
    pts = np.random.default_rng(0).uniform(-0.5, 0.5, size=(20, 3))
    batch = inner_dilatation(f, pts)
    single = [dilatations_at(f, p).K_I for p in pts]
    assert np.allclose(batch, single, rtol=1e-12)


def test_fd_jacobian_of_linear_map_is_exact():
    A = np.array([[2.0, 1.0], [0.5, -3.0]])
    f = make_standard("linear", 2, matrix=A)
    assert np.allclose(fd_jacobian(f, [0.4, -0.2]), A, atol=1e-8)


def test_fd_refuses_singular_point():
    f = make_ring_map(RingMapParams(0.5, 2))
    with pytest.raises(ValueError):
        fd_jacobian(f, [1e-9, 0.0])


@pytest.mark.parametrize("n,q,scale,finite", [
    (2, 1, 0.5, True), (2, 2, 0.9, True), (3, 1, 1.1, False), (3, 2, 2.0, False),
])
def test_lq_threshold(n, q, scale, finite):
    alpha = scale * n / ((n - 1) * q)
    f = make_ring_map(RingMapParams(alpha, n))
    r_in = min(1e-3, 10.0 ** (-3.0 / alpha))
    res = ki_lq_norm(f, AnnulusSpec(np.zeros(n), r_in, 0.5), q)
    assert res.converged is finite
    # shell integral ~ r^(n-1 - alpha (n-1) q) near 0
    assert res.tail_slope == pytest.approx(n - 1 - alpha * (n - 1) * q, abs=0.1)


def test_lq_value_for_identity_is_annulus_volume():
    res = ki_lq_norm(make_standard("identity", 3), AnnulusSpec(np.zeros(3), 0.1, 0.5), 2)
    assert res.value == pytest.approx(4 * math.pi / 3 * (0.5**3 - 0.1**3), rel=1e-10)
