"""Transfer functions realised as l1 kernels.

A kernel ``h`` acts in time as ``xh(t) = sum_k h_k x(t - k)`` and in
frequency as multiplication by ``H(w) = sum_k h_k exp(-i w k)``.  With this
sign choice ``h_k = 0`` for ``k < 0`` is exactly causality: the output at
time ``t`` uses only ``x(s)`` with ``s <= t``.

Every kernel is a finite block ``h_{-K} .. h_K`` plus bookkeeping for what
was thrown away (``tail_bound``) and how accurate the kept coefficients are
(``coeff_error``).  :func:`apply_transfer` turns these into a rigorous bound
on the output error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping

import numpy as np

from .errors import CausalityError, NonFiniteError, WindowError
from .quadrature import (EPS, check_grid, fft_roundoff, kernel_coefficients,
                         sample_spectrum)
from .signals import Samples, SignalSource, as_times
from .wiener import WienerFunction

PROVEN = "proven"
NUMERIC = "numeric"
NOT_CAUSAL = "no"


@dataclass(frozen=True, eq=False)
class Kernel:
    """Impulse response ``coeffs[i] = h_{offset + i}``.

    Attributes
    ----------
    tail_bound:
        Bound on ``sum_{k outside support} |h_k|`` of the exact response, or
        ``None`` if unknown.
    coeff_error:
        Bound (or estimate, for quadrature kernels) on
        ``sum_{k in support} |h_k - stored h_k|``.
    causal:
        ``"proven"`` (structurally zero for ``k < 0``), ``"numeric"`` (negative
        part measured below ``causal_tol``) or ``"no"``.
    """

    offset: int
    coeffs: np.ndarray
    tail_bound: float | None = None
    coeff_error: float = 0.0
    causal: str = NOT_CAUSAL
    causal_tol: float | None = None
    label: str = ""
    l1: float = field(init=False)
    causal_residual: float = field(init=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=np.complex128).reshape(-1)
        bad = np.flatnonzero(~np.isfinite(c))
        if bad.size:
            k = int(self.offset) + int(bad[0])
            raise NonFiniteError(f"non-finite kernel coefficient at k={k}", index=k)
        if self.tail_bound is not None and not self.tail_bound >= 0:
            raise ValueError("tail_bound must be nonnegative")
        if self.causal not in (PROVEN, NUMERIC, NOT_CAUSAL):
            raise ValueError(f"unknown causal status {self.causal!r}")
        c.setflags(write=False)
        object.__setattr__(self, "offset", int(self.offset))
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "l1", math.fsum(np.abs(c)))
        neg = np.abs(c[: max(0, -self.offset)])
        object.__setattr__(self, "causal_residual", float(neg.max()) if neg.size else 0.0)
        if self.causal == PROVEN and self.causal_residual != 0:
            raise ValueError("kernel marked proven-causal has nonzero negative-index coefficients")

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.offset, self.offset + self.coeffs.size)

    @property
    def support(self) -> tuple[int, int] | None:
        if self.coeffs.size == 0:
            return None
        return self.offset, self.offset + self.coeffs.size - 1

    @property
    def negative_mass(self) -> float:
        """``sum_{k<0} |h_k|`` over the stored coefficients."""
        return math.fsum(np.abs(self.coeffs[: max(0, -self.offset)]))

    def coefficient(self, k: int) -> complex:
        i = k - self.offset
        return complex(self.coeffs[i]) if 0 <= i < self.coeffs.size else 0j

    def spectrum(self, omega):
        """``H(w) = sum_k h_k exp(-i w k)`` of the stored coefficients."""
        w = np.asarray(omega, dtype=float)
        out = np.exp(-1j * np.multiply.outer(w.reshape(-1), self.indices.astype(float))) @ self.coeffs
        out = out.reshape(w.shape)
        return out if out.ndim else complex(out)

    def as_wiener(self) -> WienerFunction:
        """The spectrum as an element of the Wiener algebra (index reversed)."""
        if self.coeffs.size == 0:
            return WienerFunction(0, self.coeffs)
        return WienerFunction(-(self.offset + self.coeffs.size - 1), self.coeffs[::-1])

    def causal_part(self) -> "Kernel":
        """Drop ``k < 0``; the dropped mass moves into ``tail_bound``."""
        lo = max(0, -self.offset)
        tail = None if self.tail_bound is None else self.tail_bound + self.negative_mass
        return Kernel(max(self.offset, 0), self.coeffs[lo:], tail, self.coeff_error,
                      PROVEN, 0.0, self.label)

    def total_error(self) -> float | None:
        if self.tail_bound is None:
            return None
        return self.tail_bound + self.coeff_error

    def __repr__(self) -> str:
        return (f"Kernel({self.label or 'h'}, support={self.support}, l1={self.l1:.6g}, "
                f"tail_bound={self.tail_bound}, causal={self.causal})")


def make_kernel(coeffs: Mapping[int, complex] | np.ndarray, offset: int | None = None, *,
                tail_bound: float | None = 0.0, causal: str | None = None, label: str = "") -> Kernel:
    """Kernel from explicit coefficients (exact by default: ``tail_bound=0``).

    The causal status is derived from the support when not given.
    """
    if isinstance(coeffs, Mapping):
        if coeffs:
            lo, hi = min(coeffs), max(coeffs)
            dense = np.zeros(hi - lo + 1, dtype=np.complex128)
            for k, v in coeffs.items():
                dense[int(k) - lo] = v
        else:
            lo, dense = 0, np.zeros(0, dtype=np.complex128)
        offset = lo
    else:
        dense = np.asarray(coeffs, dtype=np.complex128)
        offset = -((dense.size - 1) // 2) if offset is None else offset
    if causal is None:
        first = np.flatnonzero(dense)
        causal = PROVEN if first.size == 0 or offset + first[0] >= 0 else NOT_CAUSAL
        if causal == PROVEN and offset < 0:
            dense = dense[-offset:]
            offset = 0
    return Kernel(offset, dense, tail_bound, 0.0, causal, 0.0 if causal == PROVEN else None, label)


def kernel_from_spectrum(H: Callable[[np.ndarray], np.ndarray], K: int, N: int = 1 << 14, *,
                         label: str = "") -> Kernel:
    """Coefficients ``h_k``, ``|k| <= K``, of ``H`` by the N-point uniform rule.

    ``tail_bound`` is the measured mass ``sum_{K < |k| <= N/2}`` of the
    quadrature coefficients, and ``coeff_error`` combines FFT round-off with
    an aliasing estimate taken from the outer quarter of the coefficient
    range.  Both are numerical estimates, reliable when ``H`` is smooth
    enough for the coefficients to have decayed well before ``N/2``.
    """
    check_grid(N, K)
    _, vals = sample_spectrum(H, N)
    c = kernel_coefficients(vals)
    # ||ifft error||_2 <= fft_roundoff * ||c||_2 <= fft_roundoff * max|H|
    return truncate_coefficients(c, K, N, fft_roundoff(N) * float(np.abs(vals).max()), label)


def truncate_coefficients(c: np.ndarray, K: int, N: int, per_coeff: float, label: str) -> Kernel:
    """Keep ``|k| <= K`` of centred coefficients ``c`` (index ``-N/2 ..``)."""
    k = np.arange(-(N // 2), N - N // 2)
    mag = np.abs(c)
    keep = np.abs(k) <= K
    tail = math.fsum(mag[~keep])
    alias = math.fsum(mag[np.abs(k) > N // 4])
    coeff_error = (2 * K + 1) * per_coeff + alias
    return Kernel(-K, c[keep], tail, coeff_error, NOT_CAUSAL, None, label)


def is_causal(h: Kernel, tol: float = 0.0) -> bool:
    return h.causal_residual <= tol


def mark_causal(h: Kernel, tol: float, strict: bool = True) -> Kernel:
    """Record the causality status of ``h`` at tolerance ``tol``.

    With ``strict`` a residual above ``tol`` raises :class:`CausalityError`.
    """
    if h.causal == PROVEN:
        return h
    if h.causal_residual == 0 and tol >= 0:
        return h.causal_part()
    if h.causal_residual <= tol:
        return replace(h, causal=NUMERIC, causal_tol=float(tol))
    if strict:
        raise CausalityError(
            f"negative-index coefficients up to {h.causal_residual:.3e} exceed tolerance {tol:.3e}",
            h.causal_residual)
    return replace(h, causal=NOT_CAUSAL, causal_tol=None)


# trapezoid filters -----------------------------------------------------------

def _check_pq(p: float, q: float) -> None:
    if not (0 < p < q < math.pi):
        raise ValueError(f"trapezoid needs 0 < p < q < pi, got p={p!r}, q={q!r}")


def trapezoid_spectrum(p: float, q: float):
    """The even profile equal to 1 on ``|w| <= p``, 0 on ``|w| >= q``, linear between."""
    _check_pq(p, q)

    def H(omega):
        a = np.abs(np.asarray(omega, dtype=float))
        return np.clip((q - a) / (q - p), 0.0, 1.0)

    return H


def trapezoid_coefficients(p: float, q: float, k) -> np.ndarray:
    k = np.asarray(k)
    kf = k.astype(float)
    out = np.empty(kf.shape)
    zero = k == 0
    nz = ~zero
    out[zero] = (p + q) / (2 * math.pi)
    out[nz] = (np.cos(p * kf[nz]) - np.cos(q * kf[nz])) / (math.pi * (q - p) * kf[nz] ** 2)
    return out


def trapezoid_tail(p: float, q: float, K: int, extra: int = 1 << 20) -> float:
    """Rigorous bound on ``sum_{|k| > K} |h_k|``.

    Exact summation over ``K < |k| <= K2`` plus ``4 / (pi (q-p) K2)`` for the
    rest, using ``|h_k| <= 2 / (pi (q-p) k^2)``.
    """
    K2 = K + extra
    k = np.arange(K + 1, K2 + 1)
    part = math.fsum(np.abs(trapezoid_coefficients(p, q, k)))
    return 2 * part * (1 + 4 * EPS) + 4 / (math.pi * (q - p) * K2)


def trapezoid_kernel(p: float, q: float, K: int) -> Kernel:
    """Closed-form kernel of the trapezoid profile, truncated at ``|k| <= K``."""
    _check_pq(p, q)
    if K < 0:
        raise ValueError("K must be nonnegative")
    k = np.arange(-K, K + 1)
    c = trapezoid_coefficients(p, q, k)
    # a few ulps per coefficient from cos and the division
    coeff_error = 8 * EPS * math.fsum(np.abs(c)) + 8 * EPS * (2 * K + 1) / (math.pi * (q - p))
    return Kernel(-K, c, trapezoid_tail(p, q, K), coeff_error, NOT_CAUSAL, None,
                  f"trapezoid({p:.6g},{q:.6g})")


# application ----------------------------------------------------------------

@dataclass(frozen=True)
class TransferResult:
    """Filtered values with an error bound (``None``: bound unavailable)."""

    times: np.ndarray
    values: np.ndarray
    error_bound: float | None
    tail_bound: float | None

    @property
    def bound_available(self) -> bool:
        return self.error_bound is not None


def _accurate_dot(products: np.ndarray) -> complex:
    return complex(math.fsum(products.real), math.fsum(products.imag))


def convolve(h: Kernel, x: SignalSource, times) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``sum_k h_k x(t - k)`` for each ``t``; also returns the per-time
    ``sum |h_k| |x(t-k)|`` and ``sum |h_k| err(x(t-k))`` used in error bounds."""
    t = as_times(times)
    if h.coeffs.size == 0 or t.size == 0:
        z = np.zeros(t.shape)
        return z.astype(np.complex128), z, z
    k_lo, k_hi = h.support
    lo, hi = int(t.min()) - k_hi, int(t.max()) - k_lo
    if not x.covers(lo, hi):
        wlo, whi = x.window
        bad = lo if lo < wlo else hi
        raise WindowError(f"convolution needs x on [{lo}, {hi}] but window is [{wlo}, {whi}]",
                          index=bad)
    span = np.arange(lo, hi + 1)
    xs = x.sample(span)
    xe = x.sample_error(span)
    hr = h.coeffs[::-1]
    ha = np.abs(hr)
    n = h.coeffs.size
    out = np.empty(t.shape, dtype=np.complex128)
    absum = np.empty(t.shape)
    errsum = np.empty(t.shape)
    for i, tt in enumerate(t):
        s = int(tt) - k_hi - lo
        seg = xs[s:s + n]
        out[i] = _accurate_dot(hr * seg)
        absum[i] = float(ha @ np.abs(seg))
        errsum[i] = float(ha @ xe[s:s + n])
    return out, absum, errsum


def apply_transfer(h: Kernel, x: SignalSource, times) -> TransferResult:
    """Filter ``x`` with ``h`` at ``times``.

    The error bound covers the discarded kernel tail and coefficient error
    (``sup|x| * (tail_bound + coeff_error)``), the sample error of ``x``, and
    round-off: products are formed in double precision and summed exactly
    with :func:`math.fsum`.
    """
    t = as_times(times)
    values, absum, errsum = convolve(h, x, t)
    total = h.total_error()
    if total is None:
        return TransferResult(t, values, None, None)
    rounding = math.sqrt(5) * EPS * absum * (1 + 4 * EPS) + math.sqrt(2) * EPS * np.abs(values)
    per_t = errsum + rounding
    bound = x.sup_bound * total + (float(per_t.max()) if per_t.size else 0.0)
    return TransferResult(t, values, bound * (1 + 1e-12), h.tail_bound)


def spectral_response(h: Kernel, amplitudes, frequencies, times) -> np.ndarray:
    """Filtered exponential sum via ``sum_k a_k H(w_k) exp(i w_k t)``."""
    a = np.asarray(amplitudes, dtype=np.complex128)
    w = np.asarray(frequencies, dtype=float)
    t = as_times(times).astype(float)
    g = a * np.atleast_1d(h.spectrum(w))
    return np.exp(1j * np.multiply.outer(t, w)) @ g


class FilteredSamples(Samples):
    """Samples of ``h * base`` that remember how they were made.

    ``base_sup`` bounds ``|base|`` and ``error_bound`` the numerical error of
    the stored values against the exact convolution; together with the
    kernel they bound pairings: ``|<X, f>| <= base_sup ||H f||_A + error_bound ||f||_A``.
    """

    def __init__(self, t_min: int, values, kernel: Kernel, base_sup: float, error_bound: float):
        super().__init__(t_min, values)
        self.kernel = kernel
        self.base_sup = float(base_sup)
        self.error_bound = float(error_bound)


def filter_samples(h: Kernel, x: SignalSource, lo: int, hi: int) -> FilteredSamples:
    """``h * x`` on ``[lo, hi]`` as :class:`FilteredSamples`."""
    res = apply_transfer(h, x, np.arange(lo, hi + 1))
    err = res.error_bound if res.error_bound is not None else math.inf
    # the stored kernel itself is the filter here, so its own truncation and
    # coefficient errors do not count against the samples
    if h.total_error() is not None:
        err = max(0.0, err - x.sup_bound * h.total_error())
    return FilteredSamples(lo, res.values, h, x.sup_bound, err)
