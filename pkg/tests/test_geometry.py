import math

import numpy as np
import pytest

from isosing.geometry import (
    AnnulusSpec,
    PolylineCurve,
    as_point,
    curve_line_integral,
    default_sphere_count,
    dimension_constants,
    min_sphere_count,
    radial_segment,
    segment,
    sphere_sample,
)

# frozen closed forms: |S^1| = 2 pi, |S^2| = 4 pi, |S^3| = 2 pi^2, |S^4| = 8 pi^2 / 3
SPHERE_AREAS = {2: 2 * math.pi, 3: 4 * math.pi, 4: 2 * math.pi**2, 5: 8 * math.pi**2 / 3}
BALL_VOLUMES = {2: math.pi, 3: 4 * math.pi / 3, 4: math.pi**2 / 2, 5: 8 * math.pi**2 / 15}


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_dimension_constants_match_closed_forms(n):
    c = dimension_constants(n)
    assert c.omega == pytest.approx(SPHERE_AREAS[n], rel=1e-14)
    assert c.Omega == pytest.approx(BALL_VOLUMES[n], rel=1e-14)


def test_dimension_constants_reject_bad_n():
    for n in (1, 0, 2.5):
        with pytest.raises(ValueError):
            dimension_constants(n)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_sphere_weights_sum_to_area(n):
    pts, w = sphere_sample(np.ones(n), 0.7, None)
    assert w.sum() == pytest.approx(SPHERE_AREAS[n] * 0.7 ** (n - 1), rel=1e-12)
    assert np.allclose(np.linalg.norm(pts - 1.0, axis=1), 0.7, atol=1e-14)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_sphere_rule_moments(n):
    # E[x1^2] = 1/n and E[x1^4] = 3/(n(n+2)) for the uniform measure on S^{n-1}
    pts, w = sphere_sample(np.zeros(n), 1.0, None)
    avg = lambda v: float(np.dot(v, w) / w.sum())  # noqa: E731
    assert avg(pts[:, 0] ** 2) == pytest.approx(1 / n, abs=1e-12)
    assert avg(pts[:, -1] ** 4) == pytest.approx(3 / (n * (n + 2)), abs=1e-12)


def test_planar_rule_has_exact_count_and_starts_at_zero_angle():
    pts, w = sphere_sample([0, 0], 1.0, 8)
    assert len(pts) == 8
    assert np.allclose(pts[0], [1, 0])
    assert np.allclose(w, 2 * math.pi / 8)


def test_sphere_count_floor():
    assert min_sphere_count(3) == 6
    assert default_sphere_count(2) == 16 and default_sphere_count(6) == 600
    with pytest.raises(ValueError):
        sphere_sample([0, 0, 0], 1.0, 5)
    with pytest.raises(ValueError):
        sphere_sample([0, 0], 0.0, 8)


def test_as_point_validation():
    assert np.array_equal(as_point(0, 3), np.zeros(3))
    for bad in ([1.0], [[1, 2]], [np.nan, 1.0]):
        with pytest.raises(ValueError):
            as_point(bad)
    with pytest.raises(ValueError):
        as_point([1, 2], 3)


def test_annulus():
    a = AnnulusSpec([0, 0], 1.0, 2.0)
    assert a.volume() == pytest.approx(3 * math.pi)
    assert list(a.contains([[1.5, 0], [0.5, 0], [2.0, 0]])) == [True, False, False]
    with pytest.raises(ValueError):
        AnnulusSpec([0, 0], 2.0, 1.0)


def test_polyline_basics():
    c = PolylineCurve([[0, 0], [3, 0], [3, 4]])
    assert c.length == 7.0
    assert c.refined(4).length == pytest.approx(7.0)
    assert len(c.refined(4).vertices) == 9
    joined = segment([0, 0], [1, 0]).concat(segment([1, 0], [1, 1]))
    assert joined.length == 2.0
    with pytest.raises(ValueError):
        segment([0, 0], [1, 0]).concat(segment([2, 0], [3, 0]))
    with pytest.raises(ValueError):
        PolylineCurve([[0, 0], [0, 0]])


def test_line_integral_of_radial_density_along_ray():
    # int_1^e dr / r = 1
    ray = radial_segment([0, 0, 0], [1, 1, 0], 1.0, math.e)
    val = curve_line_integral(ray, lambda p: 1.0 / np.linalg.norm(p, axis=1), order=12, subdivisions=8)
    assert val == pytest.approx(1.0, abs=1e-12)


def test_line_integral_rejects_nonfinite_field():
    with pytest.raises(ArithmeticError):
        curve_line_integral(segment([0, 0], [1, 0]), lambda p: np.full(len(p), np.inf))
