"""Finite Blaschke products, disk automorphisms and sampled circle diffeomorphisms."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.optimize import brentq

from .errors import CountMismatch, GridTooCoarse
from .polynomial import find_roots, sort_complex

ZERO_MODULUS_CAP = 1.0 - 1e-9
TWO_PI = 2.0 * np.pi


def _frozen(arr, dtype=complex) -> np.ndarray:
    out = np.array(arr, dtype=dtype)
    out.setflags(write=False)
    return out


def circle_grid(M: int) -> np.ndarray:
    return TWO_PI * np.arange(M) / M


def _factor_lift(a: complex, theta):
    """Continuous lift of arg((e^{it} - a)/(1 - conj(a) e^{it})) - t, i.e. 2 Arg(1 - a e^{-it})."""
    return 2.0 * np.angle(1.0 - a * np.exp(-1j * theta))


def _poisson(a: complex, theta):
    r = abs(a)
    phi = np.angle(a)
    return (1.0 - r * r) / (1.0 + r * r - 2.0 * r * np.cos(theta - phi))


@dataclass(frozen=True, eq=False)
class MobiusAut:
    """Disk automorphism z -> lam (z - a) / (1 - conj(a) z)."""

    lam: complex = 1.0
    a: complex = 0.0

    def __post_init__(self):
        lam = complex(self.lam)
        if abs(abs(lam) - 1.0) > 1e-12:
            raise ValueError("|lambda| must be 1")
        if abs(self.a) >= 1.0:
            raise ValueError("|a| must be < 1")
        object.__setattr__(self, "lam", lam / abs(lam))
        object.__setattr__(self, "a", complex(self.a))

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return self.lam * (z - self.a) / (1.0 - np.conj(self.a) * z)

    def inverse(self) -> "MobiusAut":
        return MobiusAut(np.conj(self.lam), -self.lam * self.a)

    def boundary_lift(self, theta):
        """Continuous lift of arg phi(e^{it})."""
        theta = np.asarray(theta, dtype=float)
        return np.angle(self.lam) + theta + _factor_lift(self.a, theta)

    def boundary_speed(self, theta):
        return _poisson(self.a, np.asarray(theta, dtype=float))

    @classmethod
    def from_boundary_triple(cls, targets) -> "MobiusAut":
        """The automorphism sending 1, i, -1 to the given positively ordered boundary points."""
        src = np.array([1.0, 1j, -1.0])
        dst = np.asarray(targets, dtype=complex)
        m = np.linalg.inv(_three_point(dst)) @ _three_point(src)

        def apply(mat, z):
            return (mat[0, 0] * z + mat[0, 1]) / (mat[1, 0] * z + mat[1, 1])

        # phi^{-1}(0): solve (m00 z + m01) = 0
        a = -m[0, 1] / m[0, 0]
        val = apply(m, 1.0)
        lam = val * (1.0 - np.conj(a)) / (1.0 - a)
        return cls(lam / abs(lam), a)


def _three_point(p):
    """Matrix of the Moebius map sending p0, p1, p2 to 0, 1, infinity."""
    p0, p1, p2 = p
    return np.array([[p1 - p2, -p0 * (p1 - p2)], [p1 - p0, -p2 * (p1 - p0)]], dtype=complex)


@dataclass(frozen=True, eq=False)
class BlaschkeProduct:
    """B(z) = lam * prod (z - a_j) / (1 - conj(a_j) z)."""

    lam: complex
    zeros: np.ndarray

    def __post_init__(self):
        lam = complex(self.lam)
        if abs(abs(lam) - 1.0) > 1e-12:
            raise ValueError(f"|lambda| must be 1 (got {abs(lam)!r})")
        zeros = np.atleast_1d(np.asarray(self.zeros, dtype=complex))
        if zeros.size == 0:
            raise ValueError("a Blaschke product needs at least one zero")
        if np.any(np.abs(zeros) > ZERO_MODULUS_CAP):
            raise ValueError("zeros must satisfy |a_j| <= 1 - 1e-9")
        object.__setattr__(self, "lam", lam / abs(lam))
        object.__setattr__(self, "zeros", _frozen(zeros))

    @property
    def degree(self) -> int:
        return self.zeros.size

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.full(z.shape, self.lam, dtype=complex)
        for a in self.zeros:
            out = out * (z - a) / (1.0 - np.conj(a) * z)
        return out if out.ndim else complex(out)

    def boundary_lift(self, theta):
        """Closed-form continuous lift of arg B(e^{it}); increases by 2 pi n per period."""
        theta = np.asarray(theta, dtype=float)
        out = np.angle(self.lam) + self.degree * theta
        for a in self.zeros:
            out = out + _factor_lift(a, theta)
        return out

    def numerator_denominator(self):
        """Ascending coefficients of prod(z - a_j) and prod(1 - conj(a_j) z)."""
        num = np.ones(1, dtype=complex)
        den = np.ones(1, dtype=complex)
        for a in self.zeros:
            num = npoly.polymul(num, [-a, 1.0])
            den = npoly.polymul(den, [1.0, -np.conj(a)])
        return num, den


@dataclass(frozen=True)
class BoundarySamples:
    theta: np.ndarray
    values: np.ndarray
    arg: np.ndarray


def unwrap_nearest(angles) -> np.ndarray:
    """Cumulative unwrap choosing the branch nearest the previous sample."""
    angles = np.asarray(angles, dtype=float)
    steps = np.diff(angles)
    steps = (steps + np.pi) % TWO_PI - np.pi
    return np.concatenate([angles[:1], angles[0] + np.cumsum(steps)])


def eval_boundary(B: BlaschkeProduct, M: int) -> BoundarySamples:
    if M < 16 * B.degree:
        raise ValueError(f"grid size {M} below 16n = {16 * B.degree}")
    theta = circle_grid(M)
    values = B(np.exp(1j * theta))
    arg = unwrap_nearest(np.angle(values))
    closing = (np.angle(values[0]) - arg[-1] + np.pi) % TWO_PI - np.pi
    steps = np.append(np.diff(arg), closing)
    if np.max(np.abs(steps)) > np.pi / 2:
        raise GridTooCoarse(f"argument jump {np.max(np.abs(steps)):.3f} > pi/2 at M={M}")
    total = arg[-1] + closing - arg[0]
    if abs(total - TWO_PI * B.degree) > 1e-6:
        raise GridTooCoarse(f"argument increase {total:.6f} != 2 pi n")
    return BoundarySamples(theta, values, arg)


def mobius_compose(B: BlaschkeProduct, phi: MobiusAut) -> BlaschkeProduct:
    """B o phi; its zeros are phi^{-1}(zeros of B)."""
    inv = phi.inverse()
    zeros = inv(B.zeros)
    partial = BlaschkeProduct(1.0, zeros)
    lam = B(phi(1.0 + 0j)) / partial(1.0 + 0j)
    return BlaschkeProduct(lam / abs(lam), zeros)


def canonical_forms(B: BlaschkeProduct) -> list[BlaschkeProduct]:
    """Equivalent products z * prod (z - b_k)/(1 - conj(b_k) z), one per zero of B.

    Each zero is sent to the origin in turn; the phase is removed by the
    rotation z -> mu z with mu the principal n-th root of 1/lambda.
    """
    n = B.degree
    forms: list[BlaschkeProduct] = []
    for a in B.zeros:
        C = mobius_compose(B, MobiusAut(1.0, -a))
        mu = np.exp(-1j * np.angle(C.lam) / n)
        C = mobius_compose(C, MobiusAut(mu, 0.0))
        zeros = C.zeros.copy()
        zeros[np.argmin(np.abs(zeros))] = 0.0
        cand = BlaschkeProduct(1.0, sort_complex(zeros))
        if not any(
            np.max(np.abs(cand.zeros - f.zeros)) < 1e-12 for f in forms
        ):
            forms.append(cand)
    forms.sort(key=lambda f: tuple((round(z.real, 9), z.imag) for z in f.zeros))
    return forms


def blaschke_critical_points(B: BlaschkeProduct) -> np.ndarray:
    n = B.degree
    if n < 2:
        return np.zeros(0, dtype=complex)
    num, den = B.numerator_denominator()
    top = npoly.polysub(
        npoly.polymul(npoly.polyder(num), den), npoly.polymul(num, npoly.polyder(den))
    )
    top = np.asarray(top, dtype=complex)
    scale = np.max(np.abs(top))
    keep = np.nonzero(np.abs(top) > 1e-14 * scale)[0]
    top = top[: keep[-1] + 1]
    roots = find_roots(top)
    inside = roots[np.abs(roots) < 1.0]
    if inside.size != n - 1:
        raise CountMismatch(f"found {inside.size} critical points in the disk, expected {n - 1}")
    return sort_complex(inside)


def blaschke_critical_values(B: BlaschkeProduct) -> np.ndarray:
    pts = blaschke_critical_points(B)
    return sort_complex(B(pts)) if pts.size else pts


def boundary_arg_derivative(B: BlaschkeProduct, M: int) -> np.ndarray:
    """d/dt arg B(e^{it}) as the sum of Poisson kernels at the zeros."""
    if M < 16 * B.degree:
        raise ValueError(f"grid size {M} below 16n = {16 * B.degree}")
    theta = circle_grid(M)
    out = np.zeros(M)
    for a in B.zeros:
        out += _poisson(a, theta)
    return out


MAX_COMPOSE_GRID = 1 << 15


@dataclass(frozen=True, eq=False)
class CircleDiffeo:
    """Lift psi of an orientation-preserving circle diffeomorphism, sampled on t_j = 2 pi j / M."""

    lift: np.ndarray
    derivative: np.ndarray

    def __post_init__(self):
        lift = np.asarray(self.lift, dtype=float).ravel()
        der = np.asarray(self.derivative, dtype=float).ravel()
        if lift.size != der.size or lift.size < 4:
            raise ValueError("lift and derivative must have the same length >= 4")
        if np.any(np.diff(lift) <= 0) or not lift[-1] < lift[0] + TWO_PI:
            raise ValueError("lift must be strictly increasing over one period")
        if np.any(der <= 0):
            raise ValueError("derivative must be positive")
        if abs(der.mean() - 1.0) > 1e-6:
            raise ValueError(f"derivative integrates to {TWO_PI * der.mean():.9f}, not 2 pi")
        object.__setattr__(self, "lift", _frozen(lift, float))
        object.__setattr__(self, "derivative", _frozen(der, float))

    @property
    def grid_size(self) -> int:
        return self.lift.size

    @property
    def theta(self) -> np.ndarray:
        return circle_grid(self.grid_size)

    def boundary_values(self) -> np.ndarray:
        return np.exp(1j * self.lift)

    def _coefficients(self):
        """One-sided Fourier data (g_k, d_k for k = 0..K) of lift - theta and of the derivative."""
        cache = self.__dict__.get("_coef")
        if cache is None:
            M = self.grid_size
            g = np.fft.rfft(self.lift - self.theta) / M
            d = np.fft.rfft(self.derivative) / M
            k = np.arange(g.size)
            # real data: fold the negative frequencies onto the positive ones
            w = np.full(g.size, 2.0)
            w[0] = 1.0
            if M % 2 == 0:
                w[-1] = 1.0
            g, d = g * w, d * w
            # drop the band of coefficients below rounding level
            mag = np.maximum(np.abs(g), np.abs(d) / np.maximum(k, 1))
            K = int(k[mag > 1e-17 * (1 + mag.max())].max(initial=0))
            cache = (g[: K + 1], d[: K + 1])
            object.__setattr__(self, "_coef", cache)
        return cache

    def evaluate(self, x, chunk: int = 512):
        """Lift and derivative at arbitrary real points, by trigonometric interpolation."""
        x = np.asarray(x, dtype=float)
        flat = x.ravel()
        g, d = self._coefficients()
        lift = np.empty(flat.size)
        der = np.empty(flat.size)
        for s in range(0, flat.size, chunk):
            xs = flat[s : s + chunk]
            e = np.empty((xs.size, g.size), dtype=complex)
            e[:, 0] = 1.0
            if g.size > 1:
                e[:, 1:] = np.exp(1j * xs)[:, None]
                # powers by running product, re-anchored every 64 steps
                for j in range(1, g.size, 64):
                    blk = e[:, j : j + 64]
                    np.cumprod(blk, axis=1, out=blk)
                    blk *= np.exp(1j * (j - 1) * xs)[:, None]
            lift[s : s + chunk] = xs + (e @ g).real
            der[s : s + chunk] = (e @ d).real
        return lift.reshape(x.shape), der.reshape(x.shape)

    def inverse_at(self, y: float) -> float:
        """The point x in [0, 2 pi) with psi(x) = y mod 2 pi."""
        lift = self.lift
        base = lift[0]
        y = base + (y - base) % TWO_PI
        ext = np.append(lift, base + TWO_PI)
        grid = np.append(self.theta, TWO_PI)
        j = int(np.searchsorted(ext, y, side="right")) - 1
        j = min(max(j, 0), lift.size - 1)
        lo, hi = grid[j], grid[j + 1]

        def f(t):
            return float(self.evaluate(np.array([t]))[0][0]) - y

        # the interpolant reproduces the samples, so the bracket holds up to rounding
        if f(lo) >= 0.0:
            return lo % TWO_PI
        if f(hi) <= 0.0:
            return hi % TWO_PI
        return brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps) % TWO_PI

    def inverse(self, y, tol: float = 1e-14, max_iter: int = 50) -> np.ndarray:
        """Vectorized inverse: points x with psi(x) = y mod 2 pi, each in [0, 2 pi)."""
        y = np.asarray(y, dtype=float)
        base = self.lift[0]
        yr = base + (y.ravel() - base) % TWO_PI
        ext = np.append(self.lift, base + TWO_PI)
        grid = np.append(self.theta, TWO_PI)
        x = np.interp(yr, ext, grid)
        prev = np.inf
        for _ in range(max_iter):
            lift, der = self.evaluate(x)
            dx = (lift - yr) / der
            x = np.clip(x - dx, -TWO_PI, 2 * TWO_PI)
            size = np.max(np.abs(dx))
            # quadratic convergence; stop once rounding noise dominates
            if size <= tol or (size < 1e-10 and size > 0.1 * prev):
                break
            prev = size
        return (x % TWO_PI).reshape(y.shape)

    def compose_mobius(self, phi: MobiusAut, M: int | None = None) -> "CircleDiffeo":
        """Samples of k o phi, with the lift shifted so its value at 0 lies in (-pi, pi].

        By default the grid is refined by the largest power of two not below the
        maximal boundary speed of phi, so that the composition stays resolved.
        """
        if M is None:
            speed = (1 + abs(phi.a)) / (1 - abs(phi.a))
            M = self.grid_size
            while M < self.grid_size * speed and M < MAX_COMPOSE_GRID:
                M *= 2
        t = circle_grid(M)
        inner = phi.boundary_lift(t)
        lift, der = self.evaluate(inner)
        der = der * phi.boundary_speed(t)
        shift = TWO_PI * np.round((lift[0] - _principal(lift[0])) / TWO_PI)
        return CircleDiffeo(lift - shift, der)

    def rotate(self, alpha: float) -> "CircleDiffeo":
        """Left rotation: the diffeo e^{i alpha} k."""
        return CircleDiffeo(self.lift + alpha, self.derivative)


def _principal(x: float) -> float:
    return float(np.angle(np.exp(1j * x)))


def blaschke_resolution(B: BlaschkeProduct, tol: float = 1e-9, minimum: int = 0) -> int:
    """Smallest power-of-two grid on which every Poisson kernel of B is resolved to tol."""
    M = max(16 * B.degree, minimum, 16)
    M = 1 << (M - 1).bit_length()
    r = float(np.max(np.abs(B.zeros))) if B.degree else 0.0
    while r > 0 and r**M > tol * (1 - r):
        M *= 2
    return M


def nth_root_diffeo(B: BlaschkeProduct, M: int) -> CircleDiffeo:
    if M < 16 * B.degree:
        raise ValueError(f"grid size {M} below 16n = {16 * B.degree}")
    n = B.degree
    r = float(np.max(np.abs(B.zeros))) if n else 0.0
    if r > 0 and r**M > 1e-7 * (1 - r):
        raise GridTooCoarse(
            f"zero of modulus {r:.6f} needs a grid of at least {blaschke_resolution(B)} points, got {M}"
        )
    theta = circle_grid(M)
    return CircleDiffeo(B.boundary_lift(theta) / n, boundary_arg_derivative(B, M) / n)


def identity_diffeo(M: int) -> CircleDiffeo:
    return CircleDiffeo(circle_grid(M), np.ones(M))


def diffeo_from_function(psi, dpsi, M: int) -> CircleDiffeo:
    theta = circle_grid(M)
    return CircleDiffeo(psi(theta), dpsi(theta))
