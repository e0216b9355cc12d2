import numpy as np
import pytest

from lemniprint.errors import NotProper
from lemniprint.polynomial import ComplexPolynomial, is_proper


def random_proper(rng, degrees=(2, 4), margin=0.05, scale=0.6):
    """Monic polynomial with Gaussian roots, accepted when proper with the given margin."""
    while True:
        n = int(rng.integers(degrees[0], degrees[1] + 1))
        roots = scale * (rng.normal(size=n) + 1j * rng.normal(size=n))
        p = ComplexPolynomial.from_roots(roots, 1.0)
        try:
            return is_proper(p, margin)
        except NotProper:
            continue


def random_el(rng, degrees=(2, 3), margin=0.05, scale=0.6):
    """z^n / n plus Gaussian lower coefficients (no z^(n-1) term), proper with margin."""
    while True:
        n = int(rng.integers(degrees[0], degrees[1] + 1))
        c = np.zeros(n + 1, dtype=complex)
        c[n] = 1.0 / n
        c[: n - 1] = scale * (rng.normal(size=n - 1) + 1j * rng.normal(size=n - 1))
        try:
            return is_proper(ComplexPolynomial(c), margin)
        except NotProper:
            continue


def random_disk_points(rng, k, radius=0.9):
    return radius * np.sqrt(rng.uniform(size=k)) * np.exp(2j * np.pi * rng.uniform(size=k))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
