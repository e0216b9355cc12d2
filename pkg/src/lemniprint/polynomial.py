"""Complex polynomials, critical data, properness and the affine normal form.

Coefficients are stored in ascending order ``a_0 ... a_n`` throughout.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import MarginTooSmall, NonConvergence, NotProper, ResolutionTooCoarse

ROOT_CLUSTER_TOL = 1e-7
DEFAULT_MIN_MARGIN = 1e-6


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=complex)
    out.setflags(write=False)
    return out


def sort_complex(values) -> np.ndarray:
    """Deterministic multiset order: real part (rounded to 1e-9), then imaginary part."""
    values = np.asarray(values, dtype=complex).ravel()
    if values.size == 0:
        return values
    order = np.lexsort((values.imag, np.round(values.real, 9)))
    return values[order]


def multiset_distance(u, v) -> float:
    """Max pairing error between two equal-size complex multisets under optimal matching."""
    from scipy.optimize import linear_sum_assignment

    u = np.asarray(u, dtype=complex).ravel()
    v = np.asarray(v, dtype=complex).ravel()
    if u.size != v.size:
        return math.inf
    if u.size == 0:
        return 0.0
    cost = np.abs(u[:, None] - v[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


@dataclass(frozen=True, eq=False)
class ComplexPolynomial:
    """P(z) = a_0 + a_1 z + ... + a_n z^n with complex coefficients."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))
        if c.ndim != 1 or c.size == 0:
            raise ValueError("coefficients must be a non-empty 1-d sequence")
        if c[-1] == 0:
            raise ValueError("leading coefficient must be nonzero")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "coeffs", _frozen(c))

    @classmethod
    def from_roots(cls, roots, leading=1.0) -> "ComplexPolynomial":
        desc = np.poly(np.asarray(roots, dtype=complex)) if len(roots) else np.ones(1)
        return cls(leading * np.asarray(desc, dtype=complex)[::-1])

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    @property
    def leading(self) -> complex:
        return complex(self.coeffs[-1])

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        acc = np.full(z.shape, self.coeffs[-1], dtype=complex)
        for c in self.coeffs[-2::-1]:
            acc = acc * z + c
        return acc if acc.ndim else complex(acc)

    def derivative(self) -> "ComplexPolynomial":
        if self.degree == 0:
            raise ValueError("derivative of a constant is not a ComplexPolynomial")
        k = np.arange(1, self.coeffs.size)
        return ComplexPolynomial(self.coeffs[1:] * k)

    def roots(self) -> np.ndarray:
        return find_roots(self.coeffs)

    def scaled(self, c: complex) -> "ComplexPolynomial":
        return ComplexPolynomial(self.coeffs * c)

    def max_coeff_error(self, other: "ComplexPolynomial") -> float:
        if other.degree != self.degree:
            return math.inf
        return float(np.max(np.abs(self.coeffs - other.coeffs)))

    def __repr__(self):
        terms = ", ".join(f"{c:.6g}" for c in self.coeffs)
        return f"ComplexPolynomial([{terms}])"


def find_roots(coeffs, max_iter: int = 500) -> np.ndarray:
    """All roots of the polynomial with ascending coefficients, by Aberth-Ehrlich iteration.

    Initial guesses sit on a circle around the root centroid with a fixed angular
    offset, so the result is deterministic. Roots closer than ``ROOT_CLUSTER_TOL``
    are merged into a cluster of equal values (a multiple root).
    """
    a = np.asarray(coeffs, dtype=complex)
    a = np.trim_zeros(a, "b")
    n = a.size - 1
    if n < 1:
        return np.zeros(0, dtype=complex)
    if n == 1:
        return np.array([-a[0] / a[1]], dtype=complex)
    monic = a / a[-1]
    desc = monic[::-1]
    ddesc = np.polyder(desc)

    center = -monic[n - 1] / n
    # radius from the shifted polynomial so guesses surround the roots
    shifted = np.polyval(np.poly1d(desc), np.poly1d([1.0, center])).coeffs[::-1]
    shifted = np.asarray(shifted, dtype=complex)
    mags = [abs(shifted[k]) ** (1.0 / (n - k)) for k in range(n) if shifted[k] != 0]
    radius = max(mags) if mags else 1.0
    radius = max(radius, 1e-3)
    z = center + radius * np.exp(1j * (2 * np.pi * np.arange(n) / n + 0.4))

    scale = 1.0 + np.abs(z)
    for _ in range(max_iter):
        p = np.polyval(desc, z)
        dp = np.polyval(ddesc, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = p / dp
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            inv = 1.0 / diff
            np.fill_diagonal(inv, 0.0)
            s = inv.sum(axis=1)
            step = ratio / (1.0 - ratio * s)
        bad = ~np.isfinite(step)
        step[bad] = 0.0
        z = z - step
        scale = 1.0 + np.abs(z)
        if np.all(np.abs(step) <= 4 * np.finfo(float).eps * scale):
            break

    z = _merge_clusters(z)
    z = _polish(desc, ddesc, z)

    resid = np.abs(np.polyval(a[::-1], z))
    bound = np.maximum(
        1e-10 * (1.0 + np.max(np.abs(a))),
        256 * np.finfo(float).eps * np.polyval(np.abs(a[::-1]), np.abs(z)),
    )
    if not np.all(resid <= bound):
        raise NonConvergence(
            f"root finder residual {resid.max():.3g} exceeds tolerance for degree {n}"
        )
    return sort_complex(z)


def _merge_clusters(z: np.ndarray) -> np.ndarray:
    z = z.copy()
    n = z.size
    label = -np.ones(n, dtype=int)
    for i in range(n):
        if label[i] >= 0:
            continue
        label[i] = i
        for j in range(i + 1, n):
            if label[j] < 0 and abs(z[i] - z[j]) <= ROOT_CLUSTER_TOL * max(1.0, abs(z[i])):
                label[j] = i
    for root in np.unique(label):
        members = label == root
        if members.sum() > 1:
            z[members] = z[members].mean()
    return z


def _polish(desc, ddesc, z):
    z = z.copy()
    counts = {}
    for v in z:
        counts[v] = counts.get(v, 0) + 1
    for i, v in enumerate(z):
        if counts[v] > 1:
            continue
        for _ in range(3):
            p = np.polyval(desc, z[i])
            dp = np.polyval(ddesc, z[i])
            if dp == 0:
                break
            cand = z[i] - p / dp
            if abs(np.polyval(desc, cand)) < abs(p):
                z[i] = cand
            else:
                break
    return z


@dataclass(frozen=True, eq=False)
class CriticalData:
    points: np.ndarray
    values: np.ndarray

    @property
    def max_abs_value(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0


@dataclass(frozen=True, eq=False)
class ProperLemniscate:
    """A polynomial certified to have all critical values inside the unit disk."""

    poly: ComplexPolynomial
    zeros: np.ndarray
    critical: CriticalData
    margin: float

    @property
    def degree(self) -> int:
        return self.poly.degree


@dataclass(frozen=True)
class AffineMap:
    """T(z) = a z + b."""

    a: complex = 1.0
    b: complex = 0.0

    def __post_init__(self):
        if self.a == 0:
            raise ValueError("affine map must be invertible (a != 0)")
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "b", complex(self.b))

    def __call__(self, z):
        return self.a * np.asarray(z, dtype=complex) + self.b

    def inverse(self) -> "AffineMap":
        return AffineMap(1.0 / self.a, -self.b / self.a)

    def compose(self, other: "AffineMap") -> "AffineMap":
        """self o other."""
        return AffineMap(self.a * other.a, self.a * other.b + self.b)


def critical_data(p: ComplexPolynomial) -> CriticalData:
    if p.degree < 1:
        raise ValueError("degree must be at least 1")
    if p.degree == 1:
        empty = _frozen(np.zeros(0))
        return CriticalData(empty, empty)
    points = sort_complex(p.derivative().roots())
    return CriticalData(_frozen(points), _frozen(p(points)))


def _check_lemniscate_leading(p: ComplexPolynomial):
    lead = p.leading
    if not (lead.real > 0 and abs(lead.imag) <= 1e-12 * abs(lead)):
        raise ValueError(f"leading coefficient must be real and positive, got {lead}")


def is_proper(p: ComplexPolynomial, min_margin: float = DEFAULT_MIN_MARGIN) -> ProperLemniscate:
    """Certify that {|p| = 1} is a proper lemniscate.

    Raises NotProper when a critical value lies on or outside the unit circle,
    and MarginTooSmall when it lies inside but closer than ``min_margin``.
    """
    if min_margin <= 0:
        raise ValueError("min_margin must be positive")
    _check_lemniscate_leading(p)
    crit = critical_data(p)
    m = crit.max_abs_value
    if m >= 1.0:
        raise NotProper(m)
    if m > 1.0 - min_margin:
        raise MarginTooSmall(m, min_margin)
    zeros = _frozen(sort_complex(p.roots()))
    return ProperLemniscate(p, zeros, crit, 1.0 - m)


def component_count_oracle(p: ComplexPolynomial, resolution: int = 512, max_resolution: int = 4096) -> int:
    """Number of connected components of {|p| < 1}, by flood fill on a square grid.

    The grid covers |Re z|, |Im z| <= R with R = max|zero| + |a_n|^(-1/n), which
    contains the whole sublevel set since |p(z)| >= |a_n| (|z| - max|zero|)^n.
    The grid is doubled while some component covers fewer than 4 cells.
    """
    if resolution < 64:
        raise ValueError("resolution must be at least 64")
    n = p.degree
    zeros = p.roots()
    half = 1.05 * (np.max(np.abs(zeros)) + abs(p.leading) ** (-1.0 / n))
    while True:
        xs = np.linspace(-half, half, resolution)
        mask = np.abs(p(xs[None, :] + 1j * xs[:, None])) < 1.0
        labels, count = ndimage.label(mask)
        smallest = np.bincount(labels.ravel())[1:].min() if count else 4
        if smallest >= 4:
            return int(count)
        if 2 * resolution > max_resolution:
            raise ResolutionTooCoarse(
                f"a component covers only {smallest} cells at resolution {resolution}"
            )
        resolution *= 2


def affine_pullback(p: ComplexPolynomial, t: AffineMap) -> ComplexPolynomial:
    """The polynomial z -> p(a z + b), by exact binomial expansion."""
    n = p.degree
    a, b = t.a, t.b
    out = np.zeros(n + 1, dtype=complex)
    for k, ck in enumerate(p.coeffs):
        if ck == 0:
            continue
        for j in range(k + 1):
            out[j] += ck * math.comb(k, j) * a**j * b ** (k - j)
    return ComplexPolynomial(out)


def affine_image(p: ComplexPolynomial, t: AffineMap) -> ComplexPolynomial:
    """Polynomial with positive leading coefficient whose lemniscate is t({|p| = 1})."""
    q = affine_pullback(p, t.inverse())
    lead = q.leading
    return q.scaled(abs(lead) / lead)


def normalize_EL(p: ComplexPolynomial) -> tuple[ComplexPolynomial, AffineMap]:
    """Affine normal form: leading coefficient 1/n, vanishing z^(n-1) coefficient.

    Returns ``(q, T)`` with ``q = p o T`` and ``T(z) = a z + b``, ``a > 0``.
    """
    _check_lemniscate_leading(p)
    n = p.degree
    an = p.leading.real
    a = (n * an) ** (-1.0 / n)
    b = -p.coeffs[n - 1] / (n * an)
    if abs(a - 1.0) <= 4 * np.finfo(float).eps:
        a = 1.0
    t = AffineMap(a, b)
    c = affine_pullback(p, t).coeffs.copy()
    c[n] = 1.0 / n
    c[n - 1] = 0.0
    return ComplexPolynomial(c), t


def psi_from_critical_points(zetas) -> tuple[ComplexPolynomial, np.ndarray]:
    """Integrate prod (s - zeta_k) from 0 and evaluate it at its own critical points."""
    zetas = np.asarray(zetas, dtype=complex).ravel()
    n = zetas.size + 1
    dcoef = np.asarray(np.poly(zetas), dtype=complex)[::-1] if zetas.size else np.ones(1, complex)
    coeffs = np.zeros(n + 1, dtype=complex)
    coeffs[1:] = dcoef / np.arange(1, n + 1)
    coeffs[n] = 1.0 / n
    tilde = ComplexPolynomial(coeffs)
    return tilde, np.asarray(tilde(zetas), dtype=complex).reshape(zetas.shape)


def lambda_project(tilde_p: ComplexPolynomial) -> ComplexPolynomial:
    n = tilde_p.degree
    if abs(tilde_p.leading - 1.0 / n) > 1e-12 or abs(tilde_p.coeffs[0]) > 1e-12 * (
        1 + np.max(np.abs(tilde_p.coeffs))
    ):
        raise ValueError("expected leading coefficient 1/n and zero constant term")
    return normalize_EL(tilde_p)[0]


def rotate_EL(p: ComplexPolynomial, eps: complex) -> ComplexPolynomial:
    """Polynomial of the rotated lemniscate eps * Gamma, rescaled to keep a_n > 0.

    For eps**n == 1 this is the epsilon-action on EL polynomials.
    """
    n = p.degree
    eps = complex(eps) / abs(eps)
    k = np.arange(n + 1)
    c = p.coeffs * np.conj(eps) ** k * eps**n
    c[n] = p.coeffs[n]
    return ComplexPolynomial(c)
