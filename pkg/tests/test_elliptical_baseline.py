from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entropy_eads.elliptical_baseline import (
    EllipseModel,
    Point2,
    classify_point,
    ellipse_boundary,
    fit,
    mahalanobis_sq,
    threshold,
)
from entropy_eads.errors import DegenerateDataError

IDENTITY = ((1.0, 0.0), (0.0, 1.0))


def model(cov=IDENTITY, mean=(0.0, 0.0), confidence=0.90):
    return EllipseModel(mean, cov, confidence)


def test_fit_unit_square():
    m = fit([Point2(0, 0), Point2(1, 0), Point2(0, 1), Point2(1, 1)])
    assert m.mean == pytest.approx((0.5, 0.5))
    (a, b), (c, d) = m.covariance
    assert (a, b, c, d) == pytest.approx((1 / 3, 0.0, 0.0, 1 / 3), abs=1e-15)
    assert m.confidence == 0.90


def test_fit_matches_numpy_unbiased():
    rng = np.random.default_rng(3)
    xy = rng.normal(size=(50, 2)) @ np.array([[2.0, 0.3], [0.0, 0.5]])
    m = fit([Point2(*r) for r in xy])
    assert np.allclose(np.array(m.covariance), np.cov(xy.T, ddof=1), atol=1e-12)


@pytest.mark.parametrize(
    "pts",
    [
        [Point2(1, 2)] * 5,
        [Point2(i, 2 * i + 1) for i in range(6)],
        [Point2(0, 0), Point2(1, 1)],
    ],
)
def test_fit_degenerate(pts):
    with pytest.raises(DegenerateDataError):
        fit(pts)


def test_mahalanobis_examples():
    assert mahalanobis_sq(Point2(0, 0), model()) == 0.0
    assert mahalanobis_sq(Point2(3, 4), model()) == pytest.approx(25.0)
    assert mahalanobis_sq(Point2(2, 0), model(cov=((4.0, 0.0), (0.0, 1.0)))) == pytest.approx(1.0)


def test_mahalanobis_matches_numpy_inverse():
    cov = ((2.0, 0.7), (0.7, 1.3))
    m = model(cov=cov, mean=(1.0, -2.0))
    d = np.array([0.4, 1.9]) - np.array(m.mean)
    expected = d @ np.linalg.inv(np.array(cov)) @ d
    assert mahalanobis_sq(Point2(0.4, 1.9), m) == pytest.approx(expected, rel=1e-12)


def test_threshold_values():
    assert threshold(0.90) == pytest.approx(4.6052, abs=1e-4)
    assert threshold(0.90) == pytest.approx(-2 * math.log(0.10), rel=1e-14)
    assert threshold(0.50) == pytest.approx(1.3863, abs=1e-4)
    assert 0 < threshold(1e-9) < 1e-8


@pytest.mark.parametrize("c", [0.0, 1.0, -0.1, 1.5])
def test_threshold_parameter_error(c):
    with pytest.raises(ValueError):
        threshold(c)


def test_classify_examples():
    assert classify_point(Point2(0, 0), model()) is False
    assert classify_point(Point2(3, 0), model()) is True


def test_tie_is_normal():
    # 1 - e**-2 gives a threshold of exactly 4.0, so (2, 0) sits on the curve
    m = model(confidence=1 - math.exp(-2))
    assert m.threshold == 4.0
    assert mahalanobis_sq(Point2(2.0, 0.0), m) == 4.0
    assert not classify_point(Point2(2.0, 0.0), m)
    assert classify_point(Point2(math.nextafter(2.0, 3.0), 0.0), m)


def test_boundary_circle():
    m = model()
    r = math.sqrt(m.threshold)
    pts = ellipse_boundary(m, 8)
    axes = [pts[i] for i in (0, 2, 4, 6)]
    expected = [(r, 0), (0, r), (-r, 0), (0, -r)]
    for p, (t, h) in zip(axes, expected):
        assert (abs(p.t), abs(p.h)) == pytest.approx((abs(t), abs(h)), abs=1e-12)


def test_boundary_on_curve_and_refines():
    m = model(cov=((2.0, 0.7), (0.7, 1.3)), mean=(17.0, 44.0))
    coarse = ellipse_boundary(m, 16)
    fine = ellipse_boundary(m, 32)
    for p in fine:
        assert abs(mahalanobis_sq(p, m) - m.threshold) <= 1e-9
    assert fine[::2] == coarse


def test_boundary_needs_eight_points():
    with pytest.raises(ValueError):
        ellipse_boundary(model(), 4)


def test_model_rejects_non_pd():
    with pytest.raises(DegenerateDataError):
        EllipseModel((0, 0), ((1.0, 2.0), (2.0, 1.0)))
    with pytest.raises(ValueError):
        EllipseModel((0, 0), ((1.0, 0.1), (0.2, 1.0)))


coords = st.floats(-100, 100, allow_nan=False)


@settings(max_examples=100)
@given(st.lists(st.tuples(coords, coords), min_size=3, max_size=30), coords, coords)
def test_affine_consistency(raw, dx, dy):
    pts = [Point2(t, h) for t, h in raw]
    try:
        m = fit(pts)
    except DegenerateDataError:
        return
    shifted = fit([Point2(p.t + dx, p.h + dy) for p in pts])
    assert shifted.mean == pytest.approx((m.mean[0] + dx, m.mean[1] + dy), abs=1e-9)
    assert np.allclose(shifted.covariance, m.covariance, atol=1e-9, rtol=1e-9)
    for p in pts[:5]:
        q = Point2(p.t + dx, p.h + dy)
        a, b = mahalanobis_sq(p, m), mahalanobis_sq(q, shifted)
        assert a == pytest.approx(b, abs=1e-9, rel=1e-6)


@given(coords, coords)
def test_symmetry(dt, dh):
    m = model(cov=((2.0, 0.7), (0.7, 1.3)), mean=(17.0, 44.0))
    a = mahalanobis_sq(Point2(17.0 + dt, 44.0 + dh), m)
    b = mahalanobis_sq(Point2(17.0 - dt, 44.0 - dh), m)
    assert a == pytest.approx(b, rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("confidence", [0.5, 0.9, 0.99])
def test_fraction_inside(confidence):
    rng = np.random.default_rng(11)
    base = fit([Point2(*r) for r in rng.normal(size=(200, 2)) @ np.array([[1.0, 0.6], [0.0, 0.8]]) + [17, 44]])
    m = base.with_confidence(confidence)
    draws = rng.multivariate_normal(m.mean, np.array(m.covariance), size=100_000)
    inside = sum(not classify_point(Point2(t, h), m) for t, h in draws) / len(draws)
    assert abs(inside - confidence) <= 0.01
