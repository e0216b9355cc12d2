import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lemniprint.blaschke import (
    BlaschkeProduct,
    MobiusAut,
    blaschke_critical_values,
    circle_grid,
    diffeo_from_function,
    identity_diffeo,
    mobius_compose,
)
from lemniprint.conformal import JordanCurveSamples
from lemniprint.fingerprint import (
    blaschke_distance,
    c1_distance,
    fingerprint_distance,
    fingerprint_report,
    hausdorff_distance,
    lemniscate_fingerprint,
    normalize_triple,
)
from lemniprint.polynomial import AffineMap, ComplexPolynomial, affine_image, critical_data, is_proper, multiset_distance

from conftest import random_disk_points, random_proper

CUBIC = ComplexPolynomial([0, -1, 0, 1 / 3])


def rotation(alpha, M=256):
    return diffeo_from_function(lambda t: t + alpha, lambda t: np.ones_like(t), M)


def test_power_lemniscate_gives_power_product():
    k, B = lemniscate_fingerprint(is_proper(ComplexPolynomial([0, 0, 0.5])), 256)
    assert B.degree == 2
    assert np.allclose(B.zeros, 0, atol=1e-10)
    # k is a rigid rotation
    assert np.allclose(k.derivative, 1, atol=1e-9)
    assert np.allclose(np.diff(k.lift - k.theta), 0, atol=1e-9)


def test_degree_one_is_identity():
    k, B = lemniscate_fingerprint(is_proper(ComplexPolynomial([0, 1])), 128)
    assert B.degree == 1 and abs(B.zeros[0]) < 1e-10
    assert c1_distance(normalize_triple(k), identity_diffeo(128)) < 1e-9


def test_cubic_pipeline_residuals():
    L = is_proper(CUBIC)
    rep = fingerprint_report(L)
    assert rep.phase_error <= 1e-6
    assert rep.crosscheck_error <= 1e-6
    # the interior map sends the pulled-back zeros to the zeros of P
    assert np.max(np.abs(rep.interior.evaluate(rep.disk_zeros) - L.zeros)) <= 1e-6
    # B and P share critical values
    assert multiset_distance(blaschke_critical_values(rep.blaschke), critical_data(L.poly).values) < 1e-6
    k = rep.diffeo
    assert np.all(k.derivative > 0)
    assert abs(k.derivative.mean() - 1) < 1e-9


def test_grid_below_minimum_rejected():
    with pytest.raises(ValueError):
        lemniscate_fingerprint(is_proper(CUBIC), 128)


def test_normalize_triple_examples():
    k = normalize_triple(identity_diffeo(256))
    assert c1_distance(k, identity_diffeo(256)) < 1e-12
    k = normalize_triple(rotation(0.9))
    assert c1_distance(k, identity_diffeo(256)) < 1e-10
    lift, _ = normalize_triple(rotation(-2.0)).evaluate(np.array([0, np.pi / 2, np.pi]))
    assert np.allclose(np.exp(1j * lift), [1, 1j, -1], atol=1e-10)


def test_normalize_triple_well_defined(rng):
    k = diffeo_from_function(lambda t: t + 0.4 * np.sin(t) + 0.1 * np.cos(3 * t),
                             lambda t: 1 + 0.4 * np.cos(t) - 0.3 * np.sin(3 * t), 512)
    ref = normalize_triple(k)
    for _ in range(20):
        a = random_disk_points(rng, 1, 0.6)[0]
        phi = MobiusAut(np.exp(1j * rng.uniform(0, 2 * np.pi)), a)
        assert c1_distance(normalize_triple(k.compose_mobius(phi)), ref) < 1e-6


def test_c1_distance_examples():
    e = identity_diffeo(128)
    assert c1_distance(e, e) == 0
    # e^{i(t + pi)} = -e^{it}: both terms contribute 2
    assert c1_distance(e, rotation(np.pi, 128)) == pytest.approx(4, abs=1e-12)
    k = diffeo_from_function(lambda t: t + 0.2 * np.sin(t), lambda t: 1 + 0.2 * np.cos(t), 128)
    assert c1_distance(e, k) == c1_distance(k, e)


def test_c1_distance_mixed_grids():
    k1 = diffeo_from_function(lambda t: t + 0.2 * np.sin(t), lambda t: 1 + 0.2 * np.cos(t), 256)
    k2 = diffeo_from_function(lambda t: t + 0.2 * np.sin(t), lambda t: 1 + 0.2 * np.cos(t), 1024)
    assert c1_distance(k1, k2) < 1e-3


def test_fingerprint_distance_mod_rotation():
    k = diffeo_from_function(lambda t: t + 0.3 * np.sin(2 * t), lambda t: 1 + 0.6 * np.cos(2 * t), 512)
    assert fingerprint_distance(k, k.rotate(np.pi), n=2) < 1e-9
    assert fingerprint_distance(k, k.compose_mobius(MobiusAut(1j, 0.3)), n=1) < 1e-6


def test_blaschke_distance_of_equivalent_products(rng):
    B = BlaschkeProduct(np.exp(0.3j), random_disk_points(rng, 3, 0.7))
    C = mobius_compose(B, MobiusAut(np.exp(1.3j), 0.2 - 0.4j))
    assert blaschke_distance(B, C) < 1e-9
    D = BlaschkeProduct(np.exp(0.3j), random_disk_points(rng, 3, 0.7))
    assert blaschke_distance(B, D) > 1e-3
    assert blaschke_distance(B, BlaschkeProduct(1.0, [0.1, 0.2])) == np.inf


def test_hausdorff_examples():
    t = circle_grid(512)
    c1 = JordanCurveSamples(np.exp(1j * t))
    c2 = JordanCurveSamples(2 * np.exp(1j * t))
    assert hausdorff_distance(c1, c1) == 0
    # sum form: each one-sided distance is 1
    assert hausdorff_distance(c1, c2) == pytest.approx(2, abs=1e-4)
    shifted = c1.points + 0.3
    d = hausdorff_distance(c1, shifted)
    assert 0.3 <= d + 1e-12 and d <= 0.6 + 1e-12
    with pytest.raises(ValueError):
        hausdorff_distance([], c1)


points = st.lists(
    st.builds(complex, st.floats(-3, 3), st.floats(-3, 3)), min_size=3, max_size=12
)


@settings(max_examples=50, deadline=None)
@given(points, points, points)
def test_hausdorff_metric_properties(a, b, c):
    a, b, c = (np.array(x) for x in (a, b, c))
    dab = hausdorff_distance(a, b)
    assert dab == pytest.approx(hausdorff_distance(b, a))
    assert dab >= 0
    # the sum of the one-sided distances obeys the triangle inequality
    assert dab <= hausdorff_distance(a, c) + hausdorff_distance(c, b) + 1e-9


def test_affine_invariance(rng):
    for _ in range(3):
        L = random_proper(rng, (2, 4))
        T = AffineMap(rng.uniform(0.5, 2.0), complex(*rng.normal(size=2)))
        LT = is_proper(affine_image(L.poly, T))
        k1, _ = lemniscate_fingerprint(L, 512)
        k2, _ = lemniscate_fingerprint(LT, 512)
        assert c1_distance(k1, k2) <= 1e-5


def test_rotation_covariance(rng):
    L = random_proper(rng, (3, 3))
    alpha = 0.7
    LT = is_proper(affine_image(L.poly, AffineMap(np.exp(1j * alpha), 0)))
    M = 512
    k, _ = lemniscate_fingerprint(L, M)
    kT, _ = lemniscate_fingerprint(LT, M)
    lift, _ = k.evaluate(k.theta - alpha)
    assert np.max(np.abs(np.exp(1j * kT.lift) - np.exp(1j * (lift + alpha)))) < 1e-8
