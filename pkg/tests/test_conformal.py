import numpy as np
import pytest

from lemniprint.blaschke import circle_grid
from lemniprint.conformal import (
    JordanCurveSamples,
    exterior_angle,
    interior_riemann,
    invert_interior,
    recommended_resolution,
    trace_lemniscate,
)
from lemniprint.errors import NotInside, OffCurve
from lemniprint.polynomial import ComplexPolynomial, is_proper

from conftest import random_disk_points, random_proper

SQRT2 = np.sqrt(2.0)


def circle(M, r=1.0, c=0.0):
    t = circle_grid(M)
    return JordanCurveSamples(c + r * np.exp(1j * t), 1j * r * np.exp(1j * t))


def test_trace_circles():
    L = is_proper(ComplexPolynomial([0, 0, 0.5]))
    c = trace_lemniscate(L, 128)
    assert np.allclose(c.points, SQRT2 * np.exp(1j * circle_grid(128)), atol=1e-13)
    L = is_proper(ComplexPolynomial([0, 1]))
    c = trace_lemniscate(L, 64)
    assert np.allclose(c.points, np.exp(1j * circle_grid(64)), atol=1e-14)


def test_trace_cubic_residual_and_simplicity():
    L = is_proper(ComplexPolynomial([0, -1, 0, 1 / 3]))
    c = trace_lemniscate(L, 512)
    assert np.max(np.abs(np.abs(L.poly(c.points)) - 1)) <= 1e-10
    assert c.is_simple()
    assert c.signed_area() > 0
    # exterior-angle parametrization: P(w_j) = exp(i n theta_j)
    assert np.allclose(L.poly(c.points), np.exp(3j * c.param), atol=1e-12)


def test_trace_requires_grid():
    L = is_proper(ComplexPolynomial([0, -1, 0, 1 / 3]))
    with pytest.raises(ValueError):
        trace_lemniscate(L, 100)


def test_is_simple_detects_crossing():
    t = circle_grid(200)
    # self-intersecting loop with positive signed area
    curve = JordanCurveSamples(np.sin(2 * t) + 1j * np.sin(t) + 0.3 * np.cos(t))
    assert curve.signed_area() > 0
    assert not curve.is_simple()
    assert circle(64).is_simple()


def test_interior_map_centered_circle():
    im = interior_riemann(circle(128, SQRT2), 0.0)
    assert np.allclose(im.boundary_corr, circle_grid(128), atol=1e-12)
    assert im.derivative_at_center == pytest.approx(SQRT2, abs=1e-12)
    assert invert_interior(im, [0.0])[0] == pytest.approx(0, abs=1e-12)
    assert invert_interior(im, [0.7])[0] == pytest.approx(0.7 / SQRT2, abs=1e-10)


def test_interior_map_translated_circle(rng):
    c, r = 0.4 - 1.2j, 0.8
    im = interior_riemann(circle(128, r, c), c)
    z = random_disk_points(rng, 10, 0.95)
    assert np.allclose(im.evaluate(z), c + r * z, atol=1e-8)
    assert im.derivative_at_center == pytest.approx(r, abs=1e-10)


def test_interior_map_off_center_disk():
    a = 0.3 + 0.4j
    im = interior_riemann(circle(256), a)
    t = circle_grid(256)
    f = (np.exp(1j * t) - a) / (1 - np.conj(a) * np.exp(1j * t))
    assert np.allclose(np.exp(1j * im.boundary_corr), f, atol=1e-12)
    assert im.derivative_at_center == pytest.approx(1 - abs(a) ** 2, abs=1e-12)


def test_power_lemniscate_is_circle(rng):
    # P(z) = 2 z^3: circle of radius 2^(-1/3)
    L = is_proper(ComplexPolynomial([0, 0, 0, 2.0]))
    c = trace_lemniscate(L, 256)
    im = interior_riemann(c, 0.0)
    r = 2 ** (-1 / 3)
    z = random_disk_points(rng, 10, 0.9)
    assert np.allclose(im.evaluate(z), r * z, atol=1e-8)


def test_not_inside():
    with pytest.raises(NotInside):
        interior_riemann(circle(64), 2.0)


def test_cubic_center_reproduced():
    L = is_proper(ComplexPolynomial([0, -1, 0, 1 / 3]))
    im = interior_riemann(trace_lemniscate(L, recommended_resolution(L)), 0.0)
    assert abs(im.evaluate(0.0)) < 1e-8
    assert np.all(np.diff(im.boundary_corr) > 0)


def test_self_convergence(rng):
    L = random_proper(rng, (3, 3))
    w0 = np.mean(L.zeros)
    M = recommended_resolution(L)
    a = interior_riemann(trace_lemniscate(L, M), w0)
    b = interior_riemann(trace_lemniscate(L, 2 * M), w0)
    assert np.max(np.abs(b.boundary_corr[::2] - a.boundary_corr)) < 1e-6


def test_invert_round_trip(rng):
    L = random_proper(rng, (2, 4))
    im = interior_riemann(trace_lemniscate(L, recommended_resolution(L)), np.mean(L.zeros))
    zeta = random_disk_points(rng, 8, 0.8)
    pts = im.evaluate(zeta)
    back = invert_interior(im, pts)
    assert np.allclose(back, zeta, atol=1e-8)
    assert np.max(np.abs(im.evaluate(back) - pts)) <= 1e-8 * im.curve.diameter()


def test_exterior_angle_examples():
    L = is_proper(ComplexPolynomial([0, 1]))
    assert exterior_angle(L, 1j) == pytest.approx(np.pi / 2, abs=1e-12)
    L = is_proper(ComplexPolynomial([0, 0, 0.5]))
    assert exterior_angle(L, SQRT2) == pytest.approx(0, abs=1e-12)
    with pytest.raises(OffCurve):
        exterior_angle(L, 1.0)


def test_exterior_angle_round_trip():
    L = is_proper(ComplexPolynomial([0, -1, 0, 1 / 3]))
    M = 384
    c = trace_lemniscate(L, M)
    for j in range(0, M, 17):
        gap = np.angle(np.exp(1j * (exterior_angle(L, c.points[j], M) - 2 * np.pi * j / M)))
        assert abs(gap) < 1e-9
