"""Signal generators used by the experiments and tests."""

from __future__ import annotations

import math
from typing import Callable, Iterable, Mapping

import numpy as np

from ..errors import QuadratureError
from ..quadrature import check_grid
from ..signals import ExpSum, QuadDensity, Samples, SignalSource
from ..transfer import filter_samples, trapezoid_kernel, trapezoid_spectrum
from ..wiener import make_wiener


def _complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ValueError(f"complex value must be [re, im], got {v!r}")
        return complex(float(v[0]), float(v[1]))
    return complex(v)


def gen_exp_sum(terms: Iterable) -> ExpSum:
    """``sum_k a_k exp(i w_k t)`` from ``(a_k, w_k)`` pairs.

    ``a_k`` may be a number or ``[re, im]``.
    """
    terms = list(terms)
    if not terms:
        raise ValueError("an exponential sum needs at least one term")
    amps = [_complex(a) for a, _ in terms]
    freqs = [float(w) for _, w in terms]
    return ExpSum(amps, freqs)


def gen_noise(seed: int, window: tuple[int, int], amplitude: float = 1.0) -> Samples:
    """Bounded complex noise, real and imaginary parts uniform on ``[-a, a]``.

    Uses :func:`numpy.random.default_rng` (PCG64), whose stream is fixed for
    a given seed across platforms.
    """
    lo, hi = int(window[0]), int(window[1])
    if hi < lo:
        raise ValueError("empty window")
    rng = np.random.default_rng(int(seed))
    n = hi - lo + 1
    z = rng.uniform(-amplitude, amplitude, n) + 1j * rng.uniform(-amplitude, amplitude, n)
    return Samples(lo, z)


def gen_band_limited(base: SignalSource, p: float, q: float, K: int | None = None) -> SignalSource:
    """Trapezoid-filtered ``base``: band-limited to ``[-q, q]``.

    With ``K=None`` the exact trapezoid profile multiplies every tone of an
    exponential sum or quadrature density.  With ``K`` the truncated kernel
    is used: via the eigenrelation for spectral sources, by convolution for
    explicit samples (the window shrinks by ``K`` on each side).
    """
    H = trapezoid_spectrum(p, q)
    if K is None:
        if isinstance(base, QuadDensity):
            return QuadDensity(lambda w: base.density(w) * H(w), base.n)
        if isinstance(base, ExpSum):
            a, w = base.tones()
            return ExpSum(a * H(w), w)
        raise ValueError("explicit samples need a kernel half-width K")
    h = trapezoid_kernel(p, q, K)
    if isinstance(base, QuadDensity):
        return QuadDensity(lambda w: base.density(w) * h.spectrum(w), base.n)
    if isinstance(base, ExpSum):
        a, w = base.tones()
        return ExpSum(a * np.atleast_1d(h.spectrum(w)), w)
    if base.window is None:
        raise ValueError("base signal has neither tones nor a window")
    lo, hi = base.window[0] + K, base.window[1] - K
    if hi < lo:
        raise ValueError(f"window {base.window} too short for K={K}")
    return filter_samples(h, base, lo, hi)


def degenerate_density(omega_hat: float, c: float, q_exp: float,
                       profile: Callable[[np.ndarray], np.ndarray] | None = None):
    """``X(w) = exp(-c / |e^{iw} - e^{iw_hat}|^q) * profile(w)`` (0 at ``w_hat``)."""
    if not c > 0 or not q_exp > 0:
        raise ValueError("c and q_exp must be positive")

    def X(omega):
        w = np.asarray(omega, dtype=float)
        d = np.abs(np.exp(1j * w) - np.exp(1j * omega_hat))
        with np.errstate(divide="ignore", over="ignore"):
            v = np.where(d > 0, np.exp(-c / np.where(d > 0, d, 1.0) ** q_exp), 0.0)
        if profile is not None:
            v = v * profile(w)
        return v

    return X


def profile_from_coefficients(coeffs: Mapping[int, complex] | None):
    """Trigonometric-polynomial profile ``sum_k p_k exp(i w k)``; ``None`` means 1."""
    if not coeffs:
        return None
    f = make_wiener({int(k): complex(v) for k, v in coeffs.items()})
    return f.__call__


def gen_degenerate(omega_hat: float, c: float = 1.0, q_exp: float = 2.0,
                   profile: Callable[[np.ndarray], np.ndarray] | None = None, N: int = 1 << 12,
                   tol: float = 1e-10, check_times: int = 64) -> QuadDensity:
    """Signal with spectral density vanishing super-exponentially at ``w_hat``.

    The N-point rule is compared with the 2N-point rule on
    ``|t| <= check_times``; disagreement above ``tol`` (relative to the sup
    bound) raises :class:`QuadratureError`.
    """
    check_grid(N)
    X = degenerate_density(omega_hat, c, q_exp, profile)
    x = QuadDensity(X, N)
    x2 = QuadDensity(X, 2 * N)
    t = np.arange(-check_times, check_times + 1)
    diff = float(np.abs(x.sample(t) - x2.sample(t)).max())
    if diff > tol * max(1.0, x2.sup_bound):
        raise QuadratureError(f"quadrature with N={N} unstable: doubling changes samples by {diff:.3e}")
    return x


def smooth_step(u):
    """C-infinity step: 0 for ``u <= 0``, 1 for ``u >= 1``."""
    u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        a = np.where(u > 0, np.exp(-1.0 / np.where(u > 0, u, 1.0)), 0.0)
        b = np.where(u < 1, np.exp(-1.0 / np.where(u < 1, 1 - u, 1.0)), 0.0)
    return a / (a + b)


def switch_function(gap1: tuple[float, float], gap2: tuple[float, float]):
    """Smooth ``phi`` with ``phi = 0`` on ``gap1`` and ``phi = 1`` on ``gap2``.

    Both gaps are arcs given by ``(start, end)`` with ``end - start < 2 pi``;
    ``phi`` moves monotonically between them on the two arcs in between.
    """
    s1, e1 = (float(v) for v in gap1)
    s2, e2 = (float(v) for v in gap2)
    two_pi = 2 * math.pi

    def ccw(a, b):
        return (b - a) % two_pi

    if ccw(s1, s2) < e1 - s1 or ccw(s2, s1) < e2 - s2:
        raise ValueError("the two gaps overlap")

    def phi(omega):
        w = np.asarray(omega, dtype=float)
        out = np.zeros(w.shape)
        pos2 = ccw(s2, w)
        out = np.where(pos2 <= e2 - s2, 1.0, out)
        # rising from gap1's end to gap2's start
        up = ccw(e1, w)
        L_up = ccw(e1, s2)
        m = (up > 0) & (up < L_up)
        out = np.where(m, smooth_step(up / L_up), out)
        # falling from gap2's end to gap1's start
        down = ccw(e2, w)
        L_down = ccw(e2, s1)
        m = (down > 0) & (down < L_down)
        out = np.where(m, 1 - smooth_step(down / L_down), out)
        return out

    return phi


def gen_ambiguous_pair(y: Mapping[int, complex], gap1: tuple[float, float],
                       gap2: tuple[float, float], N: int = 1 << 14) -> tuple[QuadDensity, QuadDensity]:
    """Two signals that agree off ``supp y`` yet have different spectral gaps.

    With ``Y(w) = sum_t y(t) exp(-i w t)`` and a smooth switch ``phi``
    (0 on ``gap1``, 1 on ``gap2``), ``x1`` has density ``-Y phi`` and ``x2``
    has density ``Y (1 - phi)``; so ``x2 - x1 = y`` for ``|t| < N/2`` and
    ``gap_i`` is a spectral gap of ``x_i``.
    """
    check_grid(N)
    times = np.array([int(t) for t in y], dtype=float)
    vals = np.array([complex(v) for v in y.values()])
    if times.size and np.abs(times).max() >= N // 2:
        raise ValueError("support of y must lie within |t| < N/2")
    phi = switch_function(gap1, gap2)

    def Y(w):
        w = np.asarray(w, dtype=float)
        return np.exp(-1j * np.multiply.outer(w, times)) @ vals

    return (QuadDensity(lambda w: -Y(w) * phi(w), N),
            QuadDensity(lambda w: Y(w) * (1 - phi(w)), N))
