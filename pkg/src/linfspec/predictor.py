"""Causal one-step predictors ``H_g(z) = z (1 - exp(-g / (z + 1 - g^-r)))``.

On the unit circle ``H_g(e^{iw})`` approaches the unit advance ``e^{iw}`` for
every ``w`` away from ``pi`` as ``g`` grows, while staying analytic outside the
unit disk, so its kernel is causal.  A signal whose spectrum is thin near a
frequency ``w_hat`` is first shifted so that ``w_hat`` lands on ``pi``,
filtered, and shifted back.

The spectrum peaks at ``exp(g^(1+r))`` (at ``w = pi``) and the kernel has
l1 norm of the same order, so the small negative-index coefficients that
certify causality drown in double-precision round-off once that peak is
large.  Such kernels are computed in extended precision.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import gmpy2
import mpmath
import numpy as np

from .errors import GuardError, SaturationError, SingularityError
from .quadrature import EPS, check_grid, fft_roundoff, kernel_coefficients, mp_kernel_coefficients, sample_spectrum
from .signals import SignalSource, as_times, modulate, wrap_angle
from .transfer import Kernel, truncate_coefficients, convolve, mark_causal

#: largest admissible g^(1+r); exp(700) is still a finite double
GUARD = 700.0
#: spectra with log-peak above this are computed in extended precision
DOUBLE_LOG_PEAK = math.log(1e4)


@dataclass(frozen=True)
class PredictorConfig:
    gamma: float
    r: float = 0.5
    omega_hat: float = math.pi
    K: int = 512
    N: int = 1 << 16

    def __post_init__(self):
        if not (math.isfinite(self.gamma) and self.gamma > 0):
            raise ValueError(f"gamma must be positive, got {self.gamma!r}")
        if not (0 < self.r < 1):
            raise ValueError(f"r must lie in (0, 1), got {self.r!r}")
        if not (-math.pi < self.omega_hat <= math.pi):
            raise ValueError(f"omega_hat must lie in (-pi, pi], got {self.omega_hat!r}")
        if self.K < 0:
            raise ValueError("K must be nonnegative")
        check_grid(self.N, self.K)

    @property
    def log_peak(self) -> float:
        """``log max_w |H(e^{iw})| = g^(1+r)``."""
        return self.gamma ** (1 + self.r)

    @property
    def shift(self) -> float:
        """Demodulation frequency ``pi - w_hat``."""
        return math.pi - self.omega_hat


@dataclass(frozen=True)
class HGammaValue:
    """``value = z U(z)`` with ``U(z) = 1 - exp(-g/(z + 1 - g^-r))``.

    ``advance_error = z - value`` is the multiplier of the one-step
    prediction error; on the unit circle ``V = value``.
    """

    value: complex
    U: complex
    advance_error: complex


def singular_point(gamma: float, r: float) -> float:
    return gamma ** (-r) - 1


def _cexpm1(e: complex) -> complex:
    """``exp(e) - 1`` without cancellation for small ``|e|``."""
    a, b = e.real, e.imag
    return complex(math.expm1(a) * math.cos(b) - 2 * math.sin(b / 2) ** 2, math.exp(a) * math.sin(b))


def _exponent(gamma: float, r: float, z: complex) -> complex:
    d = z + 1 - gamma ** (-r)
    if d == 0:
        raise SingularityError(f"H_gamma is singular at z = {singular_point(gamma, r)!r}")
    return -gamma / d


def hgamma_log_value(gamma: float, r: float, z: complex) -> tuple[float, float]:
    """``(log|H(z)|, arg H(z))``, usable where ``H`` itself overflows."""
    e = _exponent(gamma, r, complex(z))
    z = complex(z)
    if e.real > 30:
        # 1 - exp(e) = -exp(e) (1 - exp(-e)), the second factor is 1 to double precision
        log_abs = math.log(abs(z)) + e.real + math.log1p(-math.exp(-e.real)) if z != 0 else -math.inf
        phase = cmath.phase(z) + math.pi + e.imag
        return log_abs, wrap_angle(phase)
    h = z * (-_cexpm1(e)) if math.isfinite(e.real) else 0j
    return (math.log(abs(h)) if h != 0 else -math.inf), cmath.phase(h)


def hgamma_value(gamma: float, r: float, z: complex) -> HGammaValue:
    """Evaluate ``H_g(z)``; raises :class:`SaturationError` if it overflows."""
    z = complex(z)
    e = _exponent(gamma, r, z)
    if e.real > 709:
        log_abs, _ = hgamma_log_value(gamma, r, z)
        raise SaturationError(f"|H_gamma(z)| = exp({log_abs:.6g}) exceeds the floating range",
                              log_magnitude=log_abs)
    U = -_cexpm1(e)
    return HGammaValue(z * U, U, z * cmath.exp(e))


def hgamma_spectrum(gamma: float, r: float):
    """Vectorised ``w -> H_g(e^{iw})``."""
    a = gamma ** (-r)

    def H(omega):
        z = np.exp(1j * np.asarray(omega, dtype=float))
        return -z * np.expm1(-gamma / (z + 1 - a))

    return H


def _extended_precision_bits(log_peak: float) -> int:
    return int(128 + log_peak / math.log(2))


@lru_cache(maxsize=64)
def _raw_kernel(gamma: float, r: float, K: int, N: int) -> Kernel:
    log_peak = gamma ** (1 + r)
    if log_peak > GUARD:
        raise GuardError(f"gamma^(1+r) = {log_peak:.6g} exceeds the overflow guard {GUARD}")
    label = f"H_gamma(gamma={gamma:g}, r={r:g})"
    if log_peak <= DOUBLE_LOG_PEAK:
        _, vals = sample_spectrum(hgamma_spectrum(gamma, r), N)
        c = kernel_coefficients(vals)
        return truncate_coefficients(c, K, N, fft_roundoff(N) * float(np.abs(vals).max()), label)
    bits = _extended_precision_bits(log_peak)
    g = gmpy2.mpfr(gamma)
    a = g ** (-gmpy2.mpfr(r))

    def H_mp(z):
        return z * (1 - gmpy2.exp(-g / (z + 1 - a)))

    c = mp_kernel_coefficients(H_mp, N, bits)
    h = truncate_coefficients(c, K, N, math.exp(log_peak) * 2.0 ** (8 - bits) * math.log2(N), label)
    # final rounding of every coefficient to double
    return Kernel(h.offset, h.coeffs, h.tail_bound, h.coeff_error + EPS * h.l1,
                  h.causal, h.causal_tol, label)


def hgamma_kernel(cfg: PredictorConfig, causal_tol: float = 1e-8) -> Kernel:
    """Kernel of ``H_g`` for ``|k| <= K`` with causality measured at ``causal_tol``.

    Raises :class:`GuardError` above the overflow guard and
    :class:`CausalityError` if the negative-index residual exceeds the
    tolerance.  Kernels are cached by ``(g, r, K, N)``.
    """
    raw = _raw_kernel(float(cfg.gamma), float(cfg.r), int(cfg.K), int(cfg.N))
    return mark_causal(raw, causal_tol, strict=True)


def hgamma_series_coefficients(gamma: float, r: float, K: int, dps: int | None = None) -> list:
    """``h_0 .. h_K`` from the Laurent expansion at infinity, as mpmath numbers.

    ``exp(-g/(z - z0)) = sum_m e_m z^-m`` with
    ``e_m = sum_{n=1}^m (-g)^n / n! * C(m-1, n-1) * z0^(m-n)``, ``z0 = g^-r - 1``,
    hence ``h_k = -e_{k+1}``.  The alternating sum cancels heavily, so the
    working precision grows with the size of its largest term.
    """
    z0 = gamma ** (-r) - 1
    M = K + 1
    # log of the largest term magnitude, for the working precision
    biggest = 0.0
    for n in range(1, M + 1):
        t = (n * math.log(gamma) - math.lgamma(n + 1) + math.lgamma(M) - math.lgamma(n)
             - math.lgamma(M - n + 1) + ((M - n) * math.log(abs(z0)) if M > n and z0 != 0 else 0.0))
        biggest = max(biggest, t)
    work = int(30 + biggest / math.log(10)) if dps is None else int(dps)
    with mpmath.workdps(work):
        g = mpmath.mpf(gamma)
        zz = g ** (-mpmath.mpf(r)) - 1
        out = []
        for m in range(1, M + 1):
            if zz == 0:
                out.append(-((-g) ** m) / mpmath.factorial(m))
                continue
            term = -g * zz ** (m - 1)  # n = 1
            s = term
            for n in range(1, m):
                # ratio of consecutive n terms: (-g)/(n+1) * (m-n)/n / z0
                term = term * (-g) * (m - n) / ((n + 1) * n * zz)
                s += term
            out.append(-s)
    return out


def hgamma_series_kernel(gamma: float, r: float, K: int) -> Kernel:
    """Structurally causal kernel from the series (coefficients rounded to double)."""
    c = np.array([complex(v) for v in hgamma_series_coefficients(gamma, r, K)], dtype=np.complex128)
    return Kernel(0, c, None, EPS * float(np.abs(c).sum()), "proven", 0.0,
                  f"H_gamma series(gamma={gamma:g}, r={r:g})")


# prediction -------------------------------------------------------------------

@dataclass(frozen=True)
class PredictionRun:
    """One-step predictions ``xh(t)`` of ``x(t+1)``.

    ``per_step_error`` is ``|x(t+1) - xh(t)|`` and NaN where ``x(t+1)`` is
    unavailable; ``error_bound`` bounds the numerical error of ``xh`` (kernel
    truncation plus round-off), ``None`` when the kernel tail is unknown.
    """

    times: np.ndarray
    predicted: np.ndarray
    per_step_error: np.ndarray
    kernel_tail: float | None
    error_bound: float | None


def predict_one_step(x: SignalSource, cfg: PredictorConfig, times, kernel: Kernel | None = None,
                     causal_tol: float = 1e-8) -> PredictionRun:
    """``xh(t) = e^{-i s (t+1)} sum_{k>=0} h_k e^{i s (t-k)} x(t-k)``, ``s = pi - w_hat``.

    Only ``k >= 0`` is used; the measured negative-index mass of the
    quadrature kernel is added to its tail bound.
    """
    t = as_times(times)
    h = kernel if kernel is not None else hgamma_kernel(cfg, causal_tol)
    h = h.causal_part()
    s = cfg.shift
    y = modulate(x, s)
    conv, absum, errsum = convolve(h, y, t)
    back = np.exp(-1j * s * (t + 1).astype(float))
    pred = back * conv
    bound = None
    if h.total_error() is not None:
        rounding = math.sqrt(5) * EPS * absum + math.sqrt(2) * EPS * np.abs(conv)
        remod = EPS * (np.abs(s * (t + 1)) + 4) * np.abs(conv)
        per_t = errsum + rounding + remod
        bound = (y.sup_bound * h.total_error() + (float(per_t.max()) if per_t.size else 0.0)) * (1 + 1e-12)
    err = np.full(t.shape, np.nan)
    avail = np.array([x.covers(int(tt) + 1, int(tt) + 1) for tt in t], dtype=bool)
    if avail.any():
        err[avail] = np.abs(x.sample(t[avail] + 1) - pred[avail])
    return PredictionRun(t, pred, err, h.tail_bound, bound)


def sinusoid_error_oracle(omega0: float, cfg: PredictorConfig) -> float:
    """Exact ``|x(t+1) - xh(t)|`` for ``x(t) = exp(i w0 t)``.

    Equals ``exp(-g Re(1/(e^{i th} + 1 - g^-r)))`` with
    ``th = w0 + pi - w_hat`` wrapped to ``(-pi, pi]``.
    """
    theta = wrap_angle(omega0 + cfg.shift)
    d = cmath.exp(1j * theta) + 1 - cfg.gamma ** (-cfg.r)
    log_err = -cfg.gamma * (1 / d).real
    if log_err > 709:
        raise SaturationError(f"error modulus exp({log_err:.6g}) exceeds the floating range",
                              log_magnitude=log_err)
    return math.exp(log_err)
