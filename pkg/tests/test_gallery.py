import math

import numpy as np
import pytest

from isosing.dilatation import fd_jacobian
from isosing.gallery import (
    STANDARD_NAMES,
    FoldingParams,
    RingMapParams,
    compose,
    fold,
    fold_by_reflections,
    fold_slope,
    folding_inverse_image,
    make_folding_map,
    make_inversion,
    make_ring_map,
    make_standard,
)

RNG = np.random.default_rng(7)


def random_points(n, k, lo=0.05, hi=0.9):
    u = RNG.normal(size=(k, n))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    return u * RNG.uniform(lo, hi, size=(k, 1))


def test_ring_map_value_and_inverse():
    f = make_ring_map(RingMapParams(0.5, 2))
    assert np.allclose(f([0.25, 0.0]), [1.5, 0.0])
    x = random_points(3, 50)
    f3 = make_ring_map(RingMapParams(0.3, 3))
    assert np.allclose(f3.inv(f3(x)), x, atol=1e-12)
    r = np.linalg.norm(f3(x), axis=1)
    assert np.all((r > 1) & (r < 2))


def test_ring_params_validation():
    with pytest.raises(ValueError):
        RingMapParams(0.0, 2)
    with pytest.raises(ValueError):
        RingMapParams(0.5, 1)


@pytest.mark.parametrize("maker", [
    lambda: make_ring_map(RingMapParams(0.7, 3)),
    lambda: make_inversion(3),
    lambda: make_folding_map(FoldingParams(3)),
    lambda: make_standard("radial_power", 3, c=2.5),
    lambda: make_standard("log_decay", 3, beta=1.5),
    lambda: make_standard("linear", 3, diag=[2, 1, 0.5]),
])
def test_analytic_jacobian_matches_fd(maker):
    f = maker()
    for x in random_points(3, 10, 0.1, 0.3):
        J = f.jacobian(x)
        assert np.allclose(J, fd_jacobian(f, x), rtol=1e-5, atol=1e-5 * np.abs(J).max())


def test_inversion_is_involution():
    f = make_inversion(3)
    x = random_points(3, 20)
    assert np.allclose(f(f(x)), x)
    with pytest.raises(ValueError):
        f(np.zeros(3))


def test_fold_closed_form_matches_reflections():
    for t in np.linspace(-13.7, 13.7, 301):
        assert fold(np.array([t]))[0] == pytest.approx(fold_by_reflections(t), abs=1e-12)


def test_fold_properties():
    t = np.linspace(-9, 9, 1001)
    assert np.all(np.abs(fold(t)) <= 1)
    assert np.allclose(fold(-t), -fold(t))
    assert np.allclose(fold(t + 4), fold(t))
    assert set(np.unique(fold_slope(t))) <= {-1.0, 1.0}


def test_folding_map_bounded_and_inverse_image():
    n = 3
    g = make_folding_map(FoldingParams(n))
    x = random_points(n, 500, 1e-3, 2.0)
    assert np.max(np.linalg.norm(g(x), axis=1)) <= 1.0 + 1e-15
    z = np.array([0.3, -0.2, 0.5])
    assert np.allclose(g(folding_inverse_image(z)), z * math.sqrt(n) / n)


def test_standard_fixtures():
    assert set(STANDARD_NAMES) >= {"identity", "linear", "radial_power", "squaring", "log_decay", "constant"}
    sq = make_standard("squaring", 2)
    assert np.allclose(sq([1.0, 2.0]), [-3.0, 4.0])
    with pytest.raises(ValueError):
        make_standard("squaring", 3)
    with pytest.raises(ValueError):
        make_standard("nope", 2)
    ld = make_standard("log_decay", 2, beta=2.0)
    x = np.array([[math.exp(-3), 0.0]])
    assert np.linalg.norm(ld(x)) == pytest.approx(3.0**-2)
    c = make_standard("constant", 2, value=[1, 2])
    assert np.allclose(c(random_points(2, 3)), [1, 2])


def test_compose_chain_rule_and_inverse():
    outer = make_standard("linear", 2, diag=[2, 3])
    inner = make_ring_map(RingMapParams(0.5, 2))
    h = compose(outer, inner)
    x = np.array([0.3, 0.1])
    assert np.allclose(h(x), outer(inner(x)))
    assert np.allclose(h.jacobian(x), fd_jacobian(h, x), rtol=1e-6)
    assert np.allclose(h.inv(h(x)), x)


def test_compose_rejects_image_outside_outer_domain():
    h = compose(make_inversion(2), make_standard("constant", 2, value=[0, 0]))
    with pytest.raises(ValueError):
        h(np.array([0.5, 0.5]))
