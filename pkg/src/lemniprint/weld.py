"""Inverse problem: from a Blaschke product back to a proper lemniscate.

The critical values of P and of the Blaschke product P o Phi coincide, so
candidates are the EL polynomials with prescribed critical values. These are
found by solving Psi(zeta) = w, where Psi sends the critical points of
P~(z) = int_0^z prod (s - zeta_k) ds to its critical values, and are then
certified by comparing fingerprints.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .blaschke import (
    TWO_PI,
    BlaschkeProduct,
    blaschke_critical_values,
    blaschke_resolution,
)
from .conformal import trace_lemniscate
from .errors import FingerprintMismatch, LemniprintError, NoCandidateMatches, NotProper
from .fingerprint import blaschke_distance, hausdorff_distance, lemniscate_fingerprint
from .polynomial import (
    AffineMap,
    ComplexPolynomial,
    ProperLemniscate,
    is_proper,
    lambda_project,
    multiset_distance,
    normalize_EL,
    psi_from_critical_points,
    rotate_EL,
)

DEDUP_TOL = 1e-7
EL_TOL = 1e-6
MATCH_TOL = 1e-4
SEED_RADIUS = 3.0


# ---------------------------------------------------------------- Psi solver


def _poly_batch(roots: np.ndarray) -> np.ndarray:
    """Ascending coefficients of prod_k (s - r_k) for each row of ``roots``."""
    B, m = roots.shape
    c = np.zeros((B, m + 1), dtype=complex)
    c[:, 0] = 1.0
    for k in range(m):
        shifted = np.zeros_like(c)
        shifted[:, 1:] = c[:, :-1]
        c = shifted - roots[:, k : k + 1] * c
    return c


def _antiderivative_at(c: np.ndarray, x: np.ndarray) -> np.ndarray:
    """int_0^x of the polynomial with ascending coefficients c (row-wise), at the columns of x."""
    deg = c.shape[1]
    ic = c / np.arange(1, deg + 1)
    acc = np.zeros(x.shape, dtype=complex)
    for j in range(deg - 1, -1, -1):
        acc = (acc + ic[:, j : j + 1]) * x
    return acc


def _psi_residual(z: np.ndarray, w: np.ndarray) -> np.ndarray:
    return _antiderivative_at(_poly_batch(z), z) - w[None, :]


def _psi_jacobian(z: np.ndarray) -> np.ndarray:
    """J[b, i, k] = d Psi_i / d zeta_k = -int_0^{zeta_i} prod_{l != k} (s - zeta_l) ds."""
    B, m = z.shape
    J = np.empty((B, m, m), dtype=complex)
    for k in range(m):
        others = np.delete(z, k, axis=1)
        J[:, :, k] = -_antiderivative_at(_poly_batch(others), z)
    return J


def _newton_batch(z: np.ndarray, w: np.ndarray, iters: int = 80) -> tuple[np.ndarray, np.ndarray]:
    norm = np.linalg.norm(_psi_residual(z, w), axis=1)
    for _ in range(iters):
        F = _psi_residual(z, w)
        J = _psi_jacobian(z)
        step = np.einsum("bij,bj->bi", np.linalg.pinv(J), F)
        alpha = np.ones(z.shape[0])
        active = np.ones(z.shape[0], dtype=bool)
        new_z, new_norm = z.copy(), norm.copy()
        for _ in range(12):
            trial = z[active] - alpha[active, None] * step[active]
            tn = np.linalg.norm(_psi_residual(trial, w), axis=1)
            ok = tn < norm[active] * (1 - 0.25 * alpha[active]) + 1e-300
            idx = np.flatnonzero(active)
            new_z[idx[ok]] = trial[ok]
            new_norm[idx[ok]] = tn[ok]
            active[idx[ok]] = False
            alpha[active] *= 0.5
            if not active.any():
                break
        # stuck rows take the full step anyway (escape flat regions)
        stuck = np.flatnonzero(active)
        if stuck.size:
            new_z[stuck] = z[stuck] - 0.5 * step[stuck]
            new_norm[stuck] = np.linalg.norm(_psi_residual(new_z[stuck], w), axis=1)
        z, norm = new_z, new_norm
        z[~np.isfinite(z)] = 0.0
        if np.all(norm < 1e-14):
            break
    return z, norm


@dataclass(frozen=True, eq=False)
class PsiSolutions:
    """Distinct solutions of Psi(zeta) = w for the given ordering of w."""

    w: np.ndarray
    solutions: np.ndarray
    expected: int
    attempts: int

    @property
    def count(self) -> int:
        return len(self.solutions)

    @property
    def complete(self) -> bool:
        return self.count >= self.expected

    def __len__(self):
        return self.count

    def __iter__(self):
        return iter(self.solutions)


def _newton_radius(z: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Size of the next Newton step: an error estimate that stays honest at multiple roots."""
    if z.shape[0] == 0:
        return np.zeros(0)
    step = np.einsum("bij,bj->bi", np.linalg.pinv(_psi_jacobian(z)), _psi_residual(z, w))
    return np.max(np.abs(step), axis=1)


def _dedupe_rows(rows: np.ndarray, tol: float, radius: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Greedy dedup; rows within max(tol, 10 * radius) of a kept row are merged into it."""
    if radius is None:
        radius = np.zeros(rows.shape[0])
    order = np.argsort(radius, kind="stable")
    kept: list[int] = []
    for i in order:
        if kept:
            K = rows[kept]
            r = rows[i]
            gap = np.max(np.abs(K - r), axis=1)
            lim = np.maximum(tol * (1 + np.max(np.abs(K), axis=1)), 10 * np.maximum(radius[kept], radius[i]))
            if np.any(gap <= lim):
                continue
        kept.append(int(i))
    kept.sort()
    return rows[kept].reshape(len(kept), rows.shape[1]), radius[kept]


def solve_psi(w, attempts: int | None = None, seed: int = 0, max_rounds: int = 8) -> PsiSolutions:
    """Multistart damped Newton for Psi(zeta) = w from seeds uniform in |zeta_k| < 3.

    Rounds of ``attempts`` seeds run until all n^(n-1) solutions are found, a
    round adds nothing new, or ``max_rounds`` is reached; an undercount is
    reported, not raised.
    """
    w = np.asarray(w, dtype=complex).ravel()
    m = w.size
    n = m + 1
    expected = n ** (n - 1)
    if m == 0:
        return PsiSolutions(w, np.zeros((1, 0), dtype=complex), 1, 0)
    attempts = attempts or 50 * expected
    rng = np.random.default_rng(seed)
    found = np.zeros((0, m), dtype=complex)
    radius = np.zeros(0)
    used = 0
    for _ in range(max_rounds):
        r = SEED_RADIUS * np.sqrt(rng.uniform(size=(attempts, m)))
        z0 = r * np.exp(1j * rng.uniform(0, TWO_PI, size=(attempts, m)))
        used += attempts
        z, res = _newton_batch(z0, w)
        good = z[res < 1e-11]
        before = found.shape[0]
        if good.size:
            found, radius = _dedupe_rows(
                np.concatenate([found, good]), DEDUP_TOL, np.concatenate([radius, _newton_radius(good, w)])
            )
        # saturated: full count, or a whole round without a new solution
        if found.shape[0] >= expected or (before and found.shape[0] == before):
            break
    order = np.lexsort([np.round(found[:, j].imag, 9) for j in range(m - 1, -1, -1)]
                       + [np.round(found[:, j].real, 9) for j in range(m - 1, -1, -1)])
    return PsiSolutions(w, found[order], expected, used)


# ------------------------------------------------------------ EL candidates


def _dedupe_polys(polys: list[ComplexPolynomial], tol: float = EL_TOL) -> list[ComplexPolynomial]:
    kept: list[ComplexPolynomial] = []
    for p in polys:
        if not any(p.max_coeff_error(q) <= tol for q in kept):
            kept.append(p)
    return kept


def el_candidates(w, attempts: int | None = None, seed: int = 0) -> tuple[list[ComplexPolynomial], PsiSolutions]:
    """Distinct EL polynomials whose critical values are w (in the given pairing)."""
    sols = solve_psi(w, attempts=attempts, seed=seed)
    polys = [lambda_project(psi_from_critical_points(z)[0]) for z in sols.solutions]
    return _dedupe_polys(polys), sols


def epsilon_orbits(polys: list[ComplexPolynomial], tol: float = EL_TOL) -> list[list[int]]:
    """Group polynomials into orbits of the action p -> rotate_EL(p, eps), eps^n = 1."""
    parent = list(range(len(polys)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, p in enumerate(polys):
        n = p.degree
        for m in range(1, n):
            q = rotate_EL(p, np.exp(1j * TWO_PI * m / n))
            for j, r in enumerate(polys):
                if q.max_coeff_error(r) <= tol:
                    parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(len(polys)):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


# ------------------------------------------------------------ reconstruction


@dataclass(frozen=True, eq=False)
class ReconstructionReport:
    blaschke: BlaschkeProduct
    lemniscate: ProperLemniscate
    critical_values: np.ndarray
    candidates: list[ComplexPolynomial]
    discrepancies: list[float]
    chosen: int
    psi_solutions: int
    psi_expected: int
    transport_error: float
    extra: dict = field(default_factory=dict)


def _default_grid(B: BlaschkeProduct) -> int:
    return blaschke_resolution(B, tol=1e-10, minimum=max(64 * B.degree, 256))


def reconstruct_report(
    B: BlaschkeProduct,
    M: int | None = None,
    seed: int = 0,
    attempts: int | None = None,
    tol: float = MATCH_TOL,
) -> ReconstructionReport:
    n = B.degree
    if n < 1:
        raise ValueError("degree must be at least 1")
    if n == 1:
        L = is_proper(ComplexPolynomial([0.0, 1.0]))
        return ReconstructionReport(B, L, np.zeros(0, complex), [L.poly], [0.0], 0, 1, 1, 0.0)
    w = blaschke_critical_values(B)
    polys, sols = el_candidates(w, attempts=attempts, seed=seed)
    M = M or _default_grid(B)
    discrepancies = [np.inf] * len(polys)
    fitted: dict[int, ProperLemniscate] = {}
    for orbit in epsilon_orbits(polys):
        # members of an epsilon orbit are rotations of one another and share a fingerprint class
        rep = orbit[0]
        try:
            L = is_proper(polys[rep])
            _, Bc = lemniscate_fingerprint(L, M)
            d = blaschke_distance(Bc, B)
        except NotProper:
            continue
        except LemniprintError:
            d = np.inf
        fitted[rep] = L
        for i in orbit:
            discrepancies[i] = d
    if not polys:
        raise NoCandidateMatches(np.inf, "critical-point equation produced no candidates")
    best = int(np.argmin(discrepancies))
    if not discrepancies[best] <= tol:
        raise NoCandidateMatches(discrepancies[best])
    L = fitted.get(best) or is_proper(polys[best])
    transport = multiset_distance(L.critical.values, w)
    return ReconstructionReport(
        B, L, w, polys, [float(d) for d in discrepancies], best, sols.count, sols.expected, transport
    )


def reconstruct(B: BlaschkeProduct, M: int | None = None, seed: int = 0) -> ProperLemniscate:
    """Proper lemniscate in EL normal form whose fingerprint is the n-th root of B."""
    return reconstruct_report(B, M=M, seed=seed).lemniscate


# ------------------------------------------------------------ affine recovery


def _rotation_between(q1: ComplexPolynomial, q2: ComplexPolynomial, tol: float) -> list[complex]:
    """All beta, |beta| = 1, with q2(z) = beta^-n q1(beta z) (candidates from the largest coefficient)."""
    n = q1.degree
    c1, c2 = q1.coeffs[: n - 1], q2.coeffs[: n - 1]
    scale = 1 + max(np.max(np.abs(c1), initial=0.0), np.max(np.abs(c2), initial=0.0))
    if np.max(np.abs(c1), initial=0.0) <= tol * scale and np.max(np.abs(c2), initial=0.0) <= tol * scale:
        return [1.0 + 0j]
    k = int(np.argmax(np.abs(c1)))
    if abs(c2[k]) <= tol * scale:
        return []
    # c2_k = beta^(k - n) c1_k
    ratio = c2[k] / c1[k]
    p = n - k
    base = (1.0 / ratio) ** (1.0 / p)
    out = []
    ks = np.arange(n + 1)
    for m in range(p):
        beta = base * np.exp(1j * TWO_PI * m / p)
        beta /= abs(beta)
        pred = q1.coeffs * beta ** (ks - n)
        if np.max(np.abs(pred - q2.coeffs)) <= 1e3 * tol * scale:
            out.append(complex(beta))
    return out


def _curve_samples(L: ProperLemniscate, M: int) -> np.ndarray:
    return trace_lemniscate(L, max(M, 64 * L.degree)).points


def recover_affine(
    L1: ProperLemniscate,
    L2: ProperLemniscate,
    positive: bool = False,
    tol: float = 1e-8,
    check_resolution: int = 2048,
) -> AffineMap:
    """Affine T with T(Gamma_1) = Gamma_2, read off the EL normal forms.

    With ``positive`` the scale factor must be real positive (fingerprint-level
    equivalence); otherwise a rotation is allowed. The result is verified by
    the Hausdorff distance between T(Gamma_1) and Gamma_2.
    """
    if L1.degree != L2.degree:
        raise FingerprintMismatch(f"degrees differ ({L1.degree} vs {L2.degree})")
    q1, T1 = normalize_EL(L1.poly)
    q2, T2 = normalize_EL(L2.poly)
    betas = _rotation_between(q1, q2, tol)
    if not betas:
        raise FingerprintMismatch("normal forms are not related by a rotation")
    maps = [T2.compose(AffineMap(np.conj(b), 0.0)).compose(T1.inverse()) for b in betas]
    if positive:
        maps = [T for T in maps if abs(np.angle(T.a)) <= 1e-8]
        if not maps:
            raise FingerprintMismatch("no scale-and-translate map relates the two lemniscates")
    T = min(maps, key=lambda t: abs(np.angle(t.a)))
    c1 = _curve_samples(L1, check_resolution)
    c2 = _curve_samples(L2, check_resolution)
    diam = float(np.max(np.abs(c2 - c2.mean()))) * 2
    d = hausdorff_distance(T(c1), c2)
    if d > 1e-5 * diam:
        raise FingerprintMismatch(f"T(Gamma_1) misses Gamma_2 by {d:.3g} (diameter {diam:.3g})")
    return T


# ------------------------------------------------------------ class counting


@dataclass(frozen=True, eq=False)
class ClassCount:
    polynomial_count: int
    class_count: int
    expected_polynomials: int
    expected_classes: int
    psi_solutions: int
    psi_expected: int
    polynomials: list[ComplexPolynomial]
    orbits: list[list[int]]

    @property
    def undercount(self) -> bool:
        return self.polynomial_count < self.expected_polynomials

    def as_tuple(self) -> tuple[int, int]:
        return self.polynomial_count, self.class_count


def count_classes(w, seed: int = 0, attempts: int | None = None, verify: bool = False) -> ClassCount:
    """Count EL polynomials with critical values w and their epsilon-classes.

    With ``verify``, the fingerprints of one member per class are computed and
    distinct classes are checked to have distinct fingerprints.
    """
    w = np.asarray(w, dtype=complex).ravel()
    n = w.size + 1
    if n == 1:
        polys = [ComplexPolynomial([0.0, 1.0])]
        return ClassCount(1, 1, 1, 1, 1, 1, polys, [[0]])
    polys, sols = el_candidates(w, attempts=attempts, seed=seed)
    orbits = epsilon_orbits(polys)
    if verify:
        reps = [is_proper(polys[o[0]]) for o in orbits]
        prints = [lemniscate_fingerprint(L)[1] for L in reps]
        for i in range(len(prints)):
            for j in range(i):
                if blaschke_distance(prints[i], prints[j]) <= MATCH_TOL:
                    raise FingerprintMismatch(f"classes {j} and {i} share a fingerprint")
    exp_poly = n ** (n - 2) if n >= 2 else 1
    exp_cls = 1 if n == 2 else n ** (n - 3)
    return ClassCount(
        len(polys), len(orbits), exp_poly, exp_cls, sols.count, sols.expected, polys, orbits
    )

