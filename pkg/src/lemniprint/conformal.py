"""Boundary tracing of proper lemniscates and the numerical interior Riemann map.

The interior map is obtained from the Szego kernel of the traced curve, which
solves the Kerzman-Stein integral equation

    S(z, a) + int_Gamma A(z, w) S(w, a) |dw| = conj(H(a, z)),
    A(z, w) = conj(H(w, z)) - H(z, w),   H(z, w) = T(w) / (2 pi i (w - z)),

discretized by the trapezoidal rule in the exterior-angle parameter (a
real-analytic parametrization, so the Nystrom scheme converges geometrically).
With f the Riemann map onto the disk, f(a) = 0 and f'(a) > 0:

    f(z) = -i T(z) S(z, a)^2 / |S(z, a)|^2   on the boundary,
    f'(z) = 2 pi S(z, a)^2 / S(a, a).
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np

from .blaschke import TWO_PI, CircleDiffeo, circle_grid, unwrap_nearest
from .errors import NoConvergence, NotInside, OffCurve, PathJump, SeedFailure
from .polynomial import ProperLemniscate

MAX_RESOLUTION = 4096


def _frozen(arr, dtype=complex):
    out = np.array(arr, dtype=dtype)
    out.setflags(write=False)
    return out


def spectral_derivative(values: np.ndarray) -> np.ndarray:
    """d/dt of periodic samples on t_j = 2 pi j / M."""
    M = values.size
    k = np.fft.fftfreq(M, 1.0 / M)
    if M % 2 == 0:
        k[M // 2] = 0.0
    return np.fft.ifft(1j * k * np.fft.fft(values))


@dataclass(frozen=True, eq=False)
class JordanCurveSamples:
    """Closed, positively oriented curve sampled at uniform parameter values.

    ``derivative`` holds dz/dt at the samples; when omitted it is obtained
    spectrally, which assumes a smooth periodic parametrization.
    """

    points: np.ndarray
    derivative: np.ndarray | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=complex).ravel()
        if pts.size < 3:
            raise ValueError("a curve needs at least 3 points")
        if abs(pts[-1] - pts[0]) < 1e-14 * (1 + abs(pts[0])):
            raise ValueError("do not repeat the first point at the end")
        object.__setattr__(self, "points", _frozen(pts))
        if self.signed_area() <= 0:
            raise ValueError("curve must be positively oriented")
        if self.derivative is not None:
            der = np.asarray(self.derivative, dtype=complex).ravel()
            if der.size != pts.size:
                raise ValueError("derivative length mismatch")
            object.__setattr__(self, "derivative", _frozen(der))

    def __len__(self):
        return self.points.size

    @property
    def param(self) -> np.ndarray:
        return circle_grid(self.points.size)

    def tangent_derivative(self) -> np.ndarray:
        if self.derivative is not None:
            return self.derivative
        return spectral_derivative(self.points)

    def signed_area(self) -> float:
        z = self.points
        zn = np.roll(z, -1)
        return 0.5 * float(np.sum(z.real * zn.imag - zn.real * z.imag))

    def diameter(self) -> float:
        z = self.points
        best = 0.0
        for s in range(0, z.size, 512):
            best = max(best, float(np.max(np.abs(z[s : s + 512, None] - z[None, :]))))
        return best

    def winding_number(self, w0: complex) -> int:
        d = np.angle(np.roll(self.points, -1) - w0) - np.angle(self.points - w0)
        d = (d + np.pi) % TWO_PI - np.pi
        return int(round(d.sum() / TWO_PI))

    def is_simple(self) -> bool:
        """Segment-intersection test over all non-adjacent segment pairs."""
        p = self.points
        q = np.roll(p, -1)
        n = p.size

        def cross(u, v):
            return u.real * v.imag - u.imag * v.real

        for s in range(0, n, 256):
            i = np.arange(s, min(s + 256, n))[:, None]
            j = np.arange(n)[None, :]
            a, b = p[i], q[i]
            c, d = p[j], q[j]
            d1 = cross(b - a, c - a)
            d2 = cross(b - a, d - a)
            d3 = cross(d - c, a - c)
            d4 = cross(d - c, b - c)
            hit = (d1 * d2 < 0) & (d3 * d4 < 0)
            near = (np.abs(i - j) <= 1) | (np.abs(i - j) >= n - 1)
            if np.any(hit & ~near):
                return False
        return True


def recommended_resolution(L: ProperLemniscate, tol: float = 1e-15) -> int:
    """Grid size resolving the exterior-angle parametrization of the lemniscate.

    The parametrization extends analytically to |z| > max|w_k|^(1/n), so the
    trapezoidal error decays like that radius to the power M.
    """
    n = L.degree
    base = 64 * n
    m = L.critical.max_abs_value
    if m == 0.0:
        return base
    rho = m ** (1.0 / n)
    need = 1.3 * math.log(tol) / math.log(rho)
    M = base
    while M < need and M < MAX_RESOLUTION:
        M *= 2
    return M


def _product_eval(an: float, zeros: tuple, w: complex) -> tuple[complex, complex]:
    """P(w) = a_n prod (w - xi_j) and P(w) / P'(w), in product form.

    Product form stays accurate for lemniscates far from the origin, where
    Horner on the monomial coefficients loses digits to cancellation.
    """
    val = an
    inv = 0j
    for z in zeros:
        d = w - z
        val *= d
        inv += 1.0 / d
    return val, 1.0 / inv


def _exterior_start(an: float, zeros: tuple) -> complex:
    """Point of the lemniscate at exterior angle 0, by continuation along P(w) = t^n, t from large to 1."""
    n = len(zeros)
    center = complex(np.mean(zeros))
    spread = 1.0 + max(abs(z - center) for z in zeros)
    big_t = 20.0 * spread * an ** (1.0 / n)
    w = complex(center + big_t * an ** (-1.0 / n))
    s0 = math.log(big_t)

    def newton(w, target):
        for _ in range(60):
            val, ratio = _product_eval(an, zeros, w)
            dw = (val - target) / val * ratio
            w -= dw
            if abs(dw) <= 1e-15 * (1 + abs(w)):
                break
        return w

    w = newton(w, big_t**n)
    steps = 400
    for j in range(1, steps + 1):
        s = s0 * (1 - j / steps)
        ds = -s0 / steps
        w_pred = w + ds * n * _product_eval(an, zeros, w)[1]
        w = newton(w_pred, math.exp(n * s))
    return w


@functools.lru_cache(maxsize=64)
def _trace_cached(an: float, zeros: tuple, M: int):
    n = len(zeros)
    start = _exterior_start(an, zeros)
    h = TWO_PI / M
    pts = np.empty(M, dtype=complex)
    w = start
    theta = 0.0
    pts[0] = w
    min_step = h * 2.0**-24

    def correct(w, target):
        total = 0.0
        for _ in range(30):
            val, ratio = _product_eval(an, zeros, w)
            dw = (val - target) / val * ratio
            w -= dw
            total += abs(dw)
            if abs(dw) <= 1e-15 * (1 + abs(w)):
                return w, total, True
        return w, total, False

    for j in range(1, M + 1):
        goal = j * h
        while theta < goal:
            s = goal - theta
            while True:
                tangent = 1j * n * _product_eval(an, zeros, w)[1]
                w_pred = w + s * tangent
                target = complex(math.cos(n * (theta + s)), math.sin(n * (theta + s)))
                w_new, corr, ok = correct(w_pred, target)
                if ok and corr <= 0.5 * abs(s * tangent):
                    break
                s *= 0.5
                if s < min_step:
                    raise PathJump(f"step underflow near exterior angle {theta:.6f}")
            w = w_new
            theta += s
        if j < M:
            pts[j] = w
    scale = 1.0 + abs(start)
    if abs(w - start) > 1e-8 * scale:
        raise PathJump(f"traced path does not close (gap {abs(w - start):.3g})")
    der = np.array([1j * n * _product_eval(an, zeros, z)[1] for z in pts])
    return pts, der


def trace_lemniscate(L: ProperLemniscate, M: int) -> JordanCurveSamples:
    """M points of the lemniscate at exterior angles 2 pi j / M.

    Sample j solves P(w) = exp(i n theta_j) on the branch continued from
    infinity, where P^(1/n) is the normalized exterior map. A single
    predictor-corrector path covers all n sheets of P^{-1} in exterior-angle order.
    """
    n = L.degree
    if M < 64 * n:
        raise ValueError(f"grid size {M} below 64n = {64 * n}")
    an = float(L.poly.leading.real)
    zeros = tuple(complex(z) for z in L.zeros)
    pts, der = _trace_cached(an, zeros, M)
    resid = np.abs(np.abs(an * np.prod(pts[:, None] - np.asarray(zeros)[None, :], axis=1)) - 1.0)
    if resid.max() > 1e-10:
        raise PathJump(f"trace residual {resid.max():.3g} exceeds 1e-10")
    return JordanCurveSamples(pts.copy(), der.copy())


def exterior_angle(L: ProperLemniscate, w: complex, M: int | None = None) -> float:
    """Exterior angle in [0, 2 pi) of a point of the lemniscate."""
    pw = complex(L.poly(complex(w)))
    if abs(abs(pw) - 1.0) > 1e-8:
        raise OffCurve(f"||P(w)| - 1| = {abs(abs(pw) - 1.0):.3g} exceeds 1e-8")
    n = L.degree
    M = M or max(64 * n, 1024)
    curve = trace_lemniscate(L, M)
    j = int(np.argmin(np.abs(curve.points - w)))
    ref = TWO_PI * j / M
    cands = (np.angle(pw) + TWO_PI * np.arange(n)) / n
    gaps = np.abs(np.angle(np.exp(1j * (cands - ref))))
    return float(cands[np.argmin(gaps)] % TWO_PI)


def _cauchy_barycentric(nodes, weights, values, z):
    """Interior Cauchy integral in barycentric form; accurate close to the boundary."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    out = np.empty(z.shape, dtype=complex)
    for s in range(0, z.size, 256):
        zz = z[s : s + 256]
        diff = nodes[None, :] - zz[:, None]
        hit = np.abs(diff) < 1e-14 * (1 + np.abs(nodes[None, :]))
        diff[hit] = 1.0
        kern = weights[None, :] / diff
        res = (kern @ values) / kern.sum(axis=1)
        rows, cols = np.nonzero(hit)
        res[rows] = values[cols]
        out[s : s + 256] = res
    return out


@dataclass(frozen=True, eq=False)
class InteriorMap:
    """Riemann map Phi: D -> interior of ``curve`` with Phi(0) = center, Phi'(0) > 0."""

    curve: JordanCurveSamples
    center: complex
    boundary_corr: np.ndarray
    corr_derivative: np.ndarray
    szego: np.ndarray
    szego_center: float
    derivative_at_center: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "boundary_corr", _frozen(self.boundary_corr, float))
        object.__setattr__(self, "corr_derivative", _frozen(self.corr_derivative, float))
        object.__setattr__(self, "szego", _frozen(self.szego))
        object.__setattr__(self, "derivative_at_center", 1.0 / (TWO_PI * self.szego_center))

    @functools.cached_property
    def correspondence(self) -> CircleDiffeo:
        """The circle map (curve parameter) -> (disk angle) as a CircleDiffeo."""
        t = self.boundary_corr
        return CircleDiffeo(t - TWO_PI * np.floor((t[0] + np.pi) / TWO_PI), self.corr_derivative)

    def _disk_nodes(self):
        t = self.boundary_corr
        zeta = np.exp(1j * t)
        return zeta, 1j * zeta * self.corr_derivative

    def evaluate(self, zeta):
        """Phi at points of the open disk."""
        nodes, weights = self._disk_nodes()
        res = _cauchy_barycentric(nodes, weights, self.curve.points, zeta)
        return res.reshape(np.shape(zeta)) if np.ndim(zeta) else complex(res[0])

    def to_disk(self, z):
        """Phi^{-1} by the Cauchy integral of its boundary values (no Newton polish)."""
        res = _cauchy_barycentric(
            self.curve.points, self.curve.tangent_derivative(), np.exp(1j * self.boundary_corr), z
        )
        return res.reshape(np.shape(z)) if np.ndim(z) else complex(res[0])

    def szego_interior(self, z):
        res = _cauchy_barycentric(self.curve.points, self.curve.tangent_derivative(), self.szego, z)
        return res.reshape(np.shape(z)) if np.ndim(z) else complex(res[0])

    def inverse_derivative(self, z):
        """(Phi^{-1})'(z) for z inside the curve."""
        s = self.szego_interior(z)
        return TWO_PI * s * s / self.szego_center

    def boundary_inverse(self, t) -> np.ndarray:
        """Curve parameter whose image is the disk angle t (inverse boundary correspondence)."""
        return self.correspondence.inverse(t)

    def boundary_on_grid(self, M: int) -> np.ndarray:
        """Phi(e^{i t_j}) on the uniform grid t_j = 2 pi j / M."""
        s = self.boundary_inverse(circle_grid(M))
        return _trig_interp(self.curve.points, s)


def _trig_interp(samples: np.ndarray, x: np.ndarray) -> np.ndarray:
    M = samples.size
    k = np.fft.fftfreq(M, 1.0 / M)
    c = np.fft.fft(samples) / M
    if M % 2 == 0:
        # split the Nyquist mode symmetrically
        c = np.append(c, c[M // 2] / 2)
        c[M // 2] /= 2
        k = np.append(k, M // 2)
    out = np.empty(x.size, dtype=complex)
    for s in range(0, x.size, 1024):
        out[s : s + 1024] = np.exp(1j * np.outer(x[s : s + 1024], k)) @ c
    return out


def interior_riemann(curve: JordanCurveSamples, w0: complex) -> InteriorMap:
    w0 = complex(w0)
    if curve.winding_number(w0) != 1:
        raise NotInside(f"curve does not wind once around {w0}")
    z = curve.points
    dz = curve.tangent_derivative()
    M = z.size
    h = TWO_PI / M
    speed = np.abs(dz)
    T = dz / speed
    sq = np.sqrt(speed * h)

    diff = z[None, :] - z[:, None]  # z_j - z_i
    np.fill_diagonal(diff, 1.0)
    # A(z_i, z_j) = conj(H(z_j, z_i)) - H(z_i, z_j), H(z, w) = T(w) / (2 pi i (w - z))
    A = -T[None, :] / (2j * np.pi * diff) - np.conj(T)[:, None] / (2j * np.pi * np.conj(-diff))
    np.fill_diagonal(A, 0.0)
    K = sq[:, None] * A * sq[None, :]
    K[np.diag_indices(M)] += 1.0
    rhs = sq * np.conj(T / (2j * np.pi * (z - w0)))
    try:
        v = np.linalg.solve(K, rhs)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(f"Kerzman-Stein system is singular: {exc}") from exc
    if not np.all(np.isfinite(v)):
        raise NoConvergence("Kerzman-Stein solution is not finite")
    u = v / sq
    saa = float(np.sum(np.abs(v) ** 2))
    fb = -1j * T * u * u / np.abs(u) ** 2
    t = unwrap_nearest(np.angle(fb))
    dt = TWO_PI * np.abs(u) ** 2 * speed / saa
    closing = (np.angle(fb[0]) - t[-1]) % TWO_PI
    if np.any(np.diff(t) <= 0) or abs(t[-1] + closing - t[0] - TWO_PI) > 1e-6:
        raise NoConvergence("boundary correspondence is not a circle homeomorphism")
    return InteriorMap(curve, w0, t, dt, u, saa)


def invert_interior(imap: InteriorMap, targets, tol: float = 1e-12) -> np.ndarray:
    """Phi^{-1}(target) for interior targets, by Newton iteration on Phi."""
    targets = np.atleast_1d(np.asarray(targets, dtype=complex))
    diam = imap.curve.diameter()
    out = np.empty(targets.size, dtype=complex)
    # coarse seed grid of (zeta, Phi(zeta)) pairs
    rr, aa = np.meshgrid(np.linspace(0.0, 0.95, 12), circle_grid(24))
    grid = (rr * np.exp(1j * aa)).ravel()
    grid_images = imap.evaluate(grid)
    for i, w in enumerate(targets):
        if imap.curve.winding_number(w) != 1:
            raise NotInside(f"target {w} is not inside the curve")
        seeds = [complex(imap.to_disk(w))]
        order = np.argsort(np.abs(grid_images - w))
        seeds.extend(grid[order[:4]])
        best = None
        for zeta in seeds:
            zeta = _newton_phi(imap, zeta, w, tol * diam)
            if zeta is not None:
                best = zeta
                break
        if best is None or abs(imap.evaluate(best) - w) > 1e-8 * diam:
            gap = float(np.min(np.abs(imap.curve.points - w)))
            raise SeedFailure(w, gap)
        out[i] = best
    return out


def _newton_phi(imap, zeta, target, tol, max_iter=40):
    if abs(zeta) >= 1.0:
        zeta = 0.99 * zeta / abs(zeta)
    for _ in range(max_iter):
        img = imap.evaluate(zeta)
        err = img - target
        if abs(err) <= tol:
            return zeta
        step = err * imap.inverse_derivative(img)
        new = zeta - step
        while abs(new) >= 1.0:
            step *= 0.5
            new = zeta - step
        zeta = new
    return zeta if abs(imap.evaluate(zeta) - target) <= 1e3 * tol else None
