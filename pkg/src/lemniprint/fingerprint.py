"""Fingerprints of proper lemniscates, their canonical representatives, and shape metrics."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blaschke import (
    TWO_PI,
    BlaschkeProduct,
    CircleDiffeo,
    MobiusAut,
    blaschke_resolution,
    circle_grid,
    mobius_compose,
    nth_root_diffeo,
)
from .conformal import (
    InteriorMap,
    interior_riemann,
    invert_interior,
    recommended_resolution,
    trace_lemniscate,
)
from .errors import PhaseMismatch
from .polynomial import ProperLemniscate

PHASE_TOL = 1e-6
TRIPLE = (0.0, np.pi / 2, np.pi)


@dataclass(frozen=True, eq=False)
class FingerprintReport:
    diffeo: CircleDiffeo
    blaschke: BlaschkeProduct
    interior: InteriorMap
    disk_zeros: np.ndarray
    phase_error: float
    crosscheck_error: float
    branch: int


def fingerprint_report(
    L: ProperLemniscate, M: int | None = None, curve_resolution: int | None = None
) -> FingerprintReport:
    """Full forward pipeline with both boundary computations of B exposed.

    ``M`` is the output grid; by default the smallest power of two that
    resolves the Poisson kernels of the pulled-back zeros.
    """
    n = L.degree
    if M is not None and M < 64 * n:
        raise ValueError(f"grid size {M} below 64n = {64 * n}")
    Mc = curve_resolution or recommended_resolution(L)
    curve = trace_lemniscate(L, Mc)
    w0 = complex(np.mean(L.zeros))
    imap = interior_riemann(curve, w0)
    a = invert_interior(imap, L.zeros)

    # phase: P(Phi(e^{it_j})) = P(w_j) must equal lambda * B0(e^{it_j})
    b0 = BlaschkeProduct(1.0, a)
    pw = L.poly(curve.points)
    ratio = pw / b0(np.exp(1j * imap.boundary_corr))
    s = ratio.sum()
    lam = s / abs(s)
    phase_error = float(np.max(np.abs(lam * b0(np.exp(1j * imap.boundary_corr)) - pw)))
    if phase_error > PHASE_TOL:
        raise PhaseMismatch(f"P o Phi differs from the Blaschke product by {phase_error:.3g}")
    B = BlaschkeProduct(lam, a)
    if M is None:
        M = blaschke_resolution(B, tol=1e-10, minimum=max(64 * n, 256))

    root = nth_root_diffeo(B, M)
    # independent route: exterior angle of Phi(e^{it}), read off the traced curve
    ext = imap.boundary_inverse(circle_grid(M))
    gap = np.angle(np.exp(1j * (ext - root.lift)))
    m = int(np.round(gap[0] * n / TWO_PI)) % n
    lift = root.lift + TWO_PI * m / n
    cross = float(np.max(np.abs(np.exp(1j * ext) - np.exp(1j * lift))))
    if cross > PHASE_TOL:
        raise PhaseMismatch(f"the two boundary computations of k disagree by {cross:.3g}")
    lift = lift - TWO_PI * np.floor((lift[0] + np.pi) / TWO_PI)
    k = CircleDiffeo(lift, root.derivative)
    return FingerprintReport(k, B, imap, a, phase_error, cross, m)


def lemniscate_fingerprint(L: ProperLemniscate, M: int | None = None) -> tuple[CircleDiffeo, BlaschkeProduct]:
    """Fingerprint k = B^(1/n) of the lemniscate sampled on M points, together with B."""
    rep = fingerprint_report(L, M)
    return rep.diffeo, rep.blaschke


def normalize_triple(k: CircleDiffeo) -> CircleDiffeo:
    """Representative k o phi of the right Mobius class fixing the boundary points 1, i, -1."""
    pre = np.array([k.inverse_at(y) for y in TRIPLE])
    phi = MobiusAut.from_boundary_triple(np.exp(1j * pre))
    return k.compose_mobius(phi)


def normalize_blaschke(B: BlaschkeProduct, branch: int = 0) -> tuple[BlaschkeProduct, CircleDiffeo]:
    """Triple normalization carried out on the Blaschke product itself.

    Returns C = B o phi and the n-th root of C fixing 1, i, -1, where phi
    normalizes the branch exp(2 pi i branch / n) * B^(1/n). Since C is again a
    Blaschke product, its root is sampled exactly rather than interpolated.
    """
    n = B.degree
    k = nth_root_diffeo(B, blaschke_resolution(B, tol=1e-12, minimum=256))
    k = k.rotate(TWO_PI * branch / n)
    pre = np.array([k.inverse_at(y) for y in TRIPLE])
    phi = MobiusAut.from_boundary_triple(np.exp(1j * pre))
    C = mobius_compose(B, phi)
    return C, _fixed_root(C, blaschke_resolution(C, tol=1e-12, minimum=256))


def _fixed_root(C: BlaschkeProduct, M: int) -> CircleDiffeo:
    """The n-th root of C whose lift vanishes at 0 (requires C(1) = 1)."""
    root = nth_root_diffeo(C, M)
    n = C.degree
    lift = root.lift - TWO_PI / n * np.round(root.lift[0] * n / TWO_PI)
    return CircleDiffeo(lift, root.derivative)


def blaschke_distance(B1: BlaschkeProduct, B2: BlaschkeProduct) -> float:
    """C1 distance between the fingerprint classes of B1^(1/n) and B2^(1/n).

    Both sides are triple-normalized on the Blaschke level; the minimum over the
    n branches of the root of B1 is taken. B2 is normalized on the branch whose
    normalized zeros stay farthest from the circle, which keeps the comparison
    well conditioned (any fixed branch of B2 gives the same equivalence).
    """
    n = B1.degree
    if B2.degree != n:
        return float("inf")
    refs = [normalize_blaschke(B2, m)[0] for m in range(max(n, 1))]
    C2 = min(refs, key=lambda C: float(np.max(np.abs(C.zeros), initial=0.0)))
    best = np.inf
    for m in range(max(n, 1)):
        C1, _ = normalize_blaschke(B1, m)
        M = max(
            blaschke_resolution(C1, tol=1e-12, minimum=256),
            blaschke_resolution(C2, tol=1e-12, minimum=256),
        )
        best = min(best, c1_distance(_fixed_root(C1, M), _fixed_root(C2, M)))
    return float(best)


def _resample(k: CircleDiffeo, M: int) -> tuple[np.ndarray, np.ndarray]:
    if k.grid_size == M:
        return k.lift, k.derivative
    # the samples carry a trigonometric interpolant; a cubic would cap accuracy at O(h^3)
    return k.evaluate(circle_grid(M))


def c1_distance(k1: CircleDiffeo, k2: CircleDiffeo) -> float:
    """sup over the grid of |e^{i psi1} - e^{i psi2}| + |(e^{i psi1})' - (e^{i psi2})'|."""
    M = max(k1.grid_size, k2.grid_size)
    l1, d1 = _resample(k1, M)
    l2, d2 = _resample(k2, M)
    e1, e2 = np.exp(1j * l1), np.exp(1j * l2)
    return float(np.max(np.abs(e1 - e2) + np.abs(d1 * e1 - d2 * e2)))


def fingerprint_distance(k1: CircleDiffeo, k2: CircleDiffeo, n: int = 1) -> float:
    """C1 distance of triple-normalized representatives, minimized over rotations by n-th roots of unity."""
    target = normalize_triple(k2)
    best = np.inf
    for m in range(max(n, 1)):
        rot = normalize_triple(k1.rotate(TWO_PI * m / max(n, 1)))
        best = min(best, c1_distance(rot, target))
    return float(best)


def _point_to_polyline(points: np.ndarray, curve: np.ndarray) -> np.ndarray:
    """Distance from each point to the closed polyline through ``curve``."""
    a = curve
    ab = np.roll(curve, -1) - a
    ab2 = np.maximum(np.abs(ab) ** 2, 1e-300)
    out = np.empty(points.size)
    for s in range(0, points.size, 256):
        p = points[s : s + 256, None]
        t = np.clip(((p - a) * np.conj(ab)).real / ab2, 0.0, 1.0)
        out[s : s + 256] = np.min(np.abs(p - a - t * ab), axis=1)
    return out


def hausdorff_distance(c1, c2) -> float:
    """sup_{z in c2} d(z, c1) + sup_{w in c1} d(w, c2), with segment-distance refinement."""
    p1 = np.asarray(getattr(c1, "points", c1), dtype=complex).ravel()
    p2 = np.asarray(getattr(c2, "points", c2), dtype=complex).ravel()
    if p1.size == 0 or p2.size == 0:
        raise ValueError("curves must be nonempty")
    return float(_point_to_polyline(p2, p1).max() + _point_to_polyline(p1, p2).max())


__all__ = [
    "FingerprintReport",
    "c1_distance",
    "fingerprint_distance",
    "fingerprint_report",
    "blaschke_distance",
    "hausdorff_distance",
    "normalize_blaschke",
    "lemniscate_fingerprint",
    "normalize_triple",
]
