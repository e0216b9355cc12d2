"""Approximation of circle diffeomorphisms by n-th roots of Blaschke products.

Pipeline: positive trigonometric fit of psi', its harmonic extension to
|z| > R written as a Poisson integral over the circle |z| = R, and an
equal-mass discretization of that density into n zeros on |z| = R.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .blaschke import TWO_PI, BlaschkeProduct, CircleDiffeo, circle_grid
from .errors import NotPositive
from .fingerprint import c1_distance

DEFAULT_R = 0.9


@dataclass(frozen=True, eq=False)
class TrigPolynomial:
    """Real trigonometric polynomial sum_{|k|<=N} a_k e^{ik theta}; ``coeffs[k + N] = a_k``."""

    coeffs: np.ndarray
    fit_error: float = math.nan

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).ravel()
        if c.size % 2 != 1:
            raise ValueError("need an odd number of coefficients a_{-N..N}")
        N = c.size // 2
        if np.max(np.abs(c - np.conj(c[::-1]))) > 1e-12 * (1 + np.max(np.abs(c))):
            raise ValueError("coefficients must satisfy a_{-k} = conj(a_k)")
        c = 0.5 * (c + np.conj(c[::-1]))
        c[N] = c[N].real
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return self.coeffs.size // 2

    @property
    def orders(self) -> np.ndarray:
        return np.arange(-self.degree, self.degree + 1)

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        vals = np.exp(1j * np.multiply.outer(theta, self.orders)) @ self.coeffs
        return vals.real

    def exterior_extension(self, R: float) -> "TrigPolynomial":
        """Boundary values on |z| = R of the harmonic extension to |z| > R: a_k R^{-|k|}."""
        return TrigPolynomial(self.coeffs * float(R) ** (-np.abs(self.orders)))

    def min_on_grid(self, M: int | None = None) -> float:
        M = M or max(16 * self.degree, 64)
        return float(np.min(self(circle_grid(M))))


@dataclass(frozen=True, eq=False)
class AtomicMeasure:
    """n equal atoms of mass 1/n at R e^{i phi_j}."""

    radius: float
    angles: np.ndarray

    def __post_init__(self):
        if not 0.0 < self.radius < 1.0:
            raise ValueError("atom radius must lie in (0, 1)")
        a = np.array(self.angles, dtype=float).ravel()
        a.setflags(write=False)
        object.__setattr__(self, "angles", a)

    @property
    def size(self) -> int:
        return self.angles.size

    @property
    def points(self) -> np.ndarray:
        return self.radius * np.exp(1j * self.angles)

    def poisson_sum(self, theta) -> np.ndarray:
        """(1/n) sum_j of the Poisson kernel at the atoms, evaluated at e^{i theta}."""
        theta = np.asarray(theta, dtype=float)
        r = self.radius
        d = np.subtract.outer(theta, self.angles)
        return ((1 - r * r) / (1 + r * r - 2 * r * np.cos(d))).mean(axis=-1)


def fit_positive_trig(dpsi, N: int) -> TrigPolynomial:
    """Fejer mean of order N of samples on the uniform grid, rescaled to mean 1."""
    f = np.asarray(dpsi, dtype=float).ravel()
    M = f.size
    if np.any(f <= 0):
        raise NotPositive(f"input has a nonpositive sample ({f.min():.3g})")
    if abs(f.mean() - 1.0) > 1e-6:
        raise ValueError(f"samples must have mean 1 (got {f.mean():.9f})")
    if not 0 <= N < M // 2:
        raise ValueError(f"degree N={N} must be below M/2 = {M // 2}")
    spec = np.fft.fft(f) / M
    k = np.arange(-N, N + 1)
    c = spec[k % M] * (1.0 - np.abs(k) / (N + 1))
    c = c / c[N].real
    h = TrigPolynomial(c)
    if h.min_on_grid() <= 0:
        raise NotPositive("Fejer mean is not positive on the check grid")
    err = float(np.max(np.abs(h(circle_grid(M)) - f)))
    return TrigPolynomial(h.coeffs, err)


def _density_cdf(b: np.ndarray, orders: np.ndarray, phi: float) -> float:
    nz = orders != 0
    k = orders[nz]
    return phi / TWO_PI + float(
        np.real(np.sum(b[nz] * (np.exp(1j * k * phi) - 1.0) / (2j * np.pi * k)))
    )


def atoms_from_density(h: TrigPolynomial, R: float, n: int) -> AtomicMeasure:
    """Quantile atoms of the density H(R e^{i phi}) d phi / 2 pi on the R-circle."""
    if not 0.0 < R < 1.0:
        raise ValueError("R must lie in (0, 1)")
    if n < 1:
        raise ValueError("n must be positive")
    ext = h.exterior_extension(R)
    low = ext.min_on_grid(max(16 * h.degree, 64, 8 * n))
    if low <= 0:
        raise NotPositive(f"harmonic extension to |z| = {R} is not positive (min {low:.3g})")
    b, orders = ext.coeffs, ext.orders
    angles = np.empty(n)
    for j in range(n):
        q = (j + 0.5) / n
        angles[j] = brentq(
            lambda x: _density_cdf(b, orders, x) - q, 0.0, TWO_PI, xtol=1e-15, rtol=1e-15
        )
    return AtomicMeasure(float(R), angles)


@dataclass(frozen=True, eq=False)
class ApproxReport:
    diffeo: CircleDiffeo
    atoms: AtomicMeasure
    density: TrigPolynomial
    c1_error: float
    sup_lift_error: float
    sup_derivative_error: float
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "c1_error": self.c1_error,
            "sup_lift_error": self.sup_lift_error,
            "sup_derivative_error": self.sup_derivative_error,
        }


def default_trig_degree(M: int) -> int:
    return min(2 * math.ceil(math.sqrt(M)), M // 2 - 1)


def approximate_diffeo(
    psi: CircleDiffeo, n: int, R: float = DEFAULT_R, N: int | None = None
) -> tuple[BlaschkeProduct, ApproxReport]:
    """Degree-n Blaschke product whose n-th root approximates psi in C1.

    The phase is fixed so that the lift of the n-th root equals psi at theta = 0.
    """
    M = psi.grid_size
    N = default_trig_degree(M) if N is None else N
    h = fit_positive_trig(psi.derivative, N)
    # the extension inward to |z| = R amplifies mode k by R^{-k}; lower the degree until it stays positive
    while True:
        try:
            atoms = atoms_from_density(h, R, n)
            break
        except NotPositive:
            if N == 0:
                raise
            N //= 2
            h = fit_positive_trig(psi.derivative, N)
    unit = BlaschkeProduct(1.0, atoms.points)
    theta = circle_grid(M)
    base = unit.boundary_lift(theta) / n
    shift = psi.lift[0] - base[0]
    B = BlaschkeProduct(np.exp(1j * n * shift), atoms.points)
    k = CircleDiffeo(base + shift, atoms.poisson_sum(theta))
    report = ApproxReport(
        diffeo=k,
        atoms=atoms,
        density=h,
        c1_error=c1_distance(k, psi),
        sup_lift_error=float(np.max(np.abs(k.lift - psi.lift))),
        sup_derivative_error=float(np.max(np.abs(k.derivative - psi.derivative))),
        extra={"trig_degree": N, "trig_fit_error": h.fit_error},
    )
    return B, report
