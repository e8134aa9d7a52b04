"""Uniform-rule Fourier coefficients on ``[-pi, pi)``.

Nodes are ``w_j = -pi + 2 pi j / n``.  Two coefficient conventions are used:

* kernel coefficients ``h_k = (1/2pi) int H(w) exp(+i w k) dw``, so that
  ``H(w) = sum_k h_k exp(-i w k)``;
* standard coefficients ``f_k = (1/2pi) int f(w) exp(-i w k) dw``, so that
  ``f(w) = sum_k f_k exp(+i w k)``.

The n-point rule is exact for trigonometric polynomials of degree below
``n/2`` and otherwise aliases ``c_k`` onto ``sum_m c_{k + m n}``.

Spectra whose magnitude spans many orders (the predictor family peaks at
``exp(gamma^(1+r))``) lose their small coefficients to double-precision
round-off, so an extended-precision path based on gmpy2 is also provided.
"""

from __future__ import annotations

import math
from typing import Callable

import gmpy2
import numpy as np

from .errors import NonFiniteError

EPS = np.finfo(float).eps / 2


def uniform_nodes(n: int) -> np.ndarray:
    return -np.pi + 2 * np.pi * np.arange(n) / n


def is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


def check_grid(n: int, half_width: int | None = None) -> None:
    """Require a power-of-two ``n`` and, if given, ``n >= 4 * half_width``."""
    if not is_power_of_two(int(n)):
        raise ValueError(f"quadrature size N={n} must be a power of two")
    if half_width is not None:
        if half_width < 0:
            raise ValueError("half-width K must be nonnegative")
        if n < 4 * half_width:
            raise ValueError(f"quadrature size N={n} too small for K={half_width}; need N >= 4K")


def _check_finite(values: np.ndarray, nodes: np.ndarray) -> None:
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        j = int(bad[0])
        raise NonFiniteError(f"non-finite spectrum value at w={nodes[j]!r}", index=j)


def _signs(k: np.ndarray) -> np.ndarray:
    return np.where(k % 2 == 0, 1.0, -1.0)


def centered(c: np.ndarray) -> np.ndarray:
    """Reorder an FFT-ordered length-n array to indices ``-n/2 .. n/2 - 1``."""
    return np.fft.fftshift(c)


def kernel_coefficients(values: np.ndarray) -> np.ndarray:
    """All ``n`` kernel coefficients from node values, for ``k = -n/2 .. n/2-1``."""
    v = np.asarray(values, dtype=np.complex128)
    n = v.size
    k = np.arange(-(n // 2), n - n // 2)
    return _signs(k) * np.fft.ifft(v)[np.mod(k, n)]


def standard_coefficients(values: np.ndarray) -> np.ndarray:
    """All ``n`` standard coefficients from node values, for ``k = -n/2 .. n/2-1``."""
    v = np.asarray(values, dtype=np.complex128)
    n = v.size
    k = np.arange(-(n // 2), n - n // 2)
    return _signs(k) * np.fft.fft(v)[np.mod(k, n)] / n


def sample_spectrum(spectrum: Callable[[np.ndarray], np.ndarray], n: int) -> tuple[np.ndarray, np.ndarray]:
    nodes = uniform_nodes(n)
    with np.errstate(all="ignore"):
        vals = np.asarray(spectrum(nodes), dtype=np.complex128).reshape(-1)
    if vals.shape != nodes.shape:
        raise ValueError("spectrum must return one value per node")
    _check_finite(vals, nodes)
    return nodes, vals


def fft_roundoff(n: int) -> float:
    """Relative 2-norm error factor of a radix-2 FFT of length ``n``."""
    return 5 * EPS * max(1.0, math.log2(n))


# extended precision ---------------------------------------------------------

def _bit_reverse(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    return rev


def mp_fft_plus(a: np.ndarray) -> np.ndarray:
    """``A_k = sum_j a_j exp(+2 pi i j k / n)`` on an object array of ``mpc``.

    Radix-2 Cooley-Tukey in the current gmpy2 context precision.
    """
    n = a.size
    if not is_power_of_two(n):
        raise ValueError("length must be a power of two")
    a = a[_bit_reverse(n)]
    pi = gmpy2.const_pi()
    m = 2
    while m <= n:
        h = m // 2
        w = np.array([gmpy2.exp(gmpy2.mpc(0, 2 * pi * j / m)) for j in range(h)], dtype=object)
        a = a.reshape(-1, m)
        top = a[:, :h]
        bot = a[:, h:] * w
        a = np.concatenate([top + bot, top - bot], axis=1).reshape(-1)
        m *= 2
    return a


def mp_kernel_coefficients(spectrum_mp: Callable[[object], object], n: int, precision: int) -> np.ndarray:
    """Kernel coefficients computed with ``precision`` bits, rounded to complex128.

    ``spectrum_mp`` maps a gmpy2 ``mpc`` point ``z = exp(i w)`` to ``H``.
    Returned for ``k = -n/2 .. n/2 - 1``.
    """
    check_grid(n)
    ctx = gmpy2.get_context().copy()
    ctx.precision = int(precision)
    with gmpy2.context(ctx):
        pi = gmpy2.const_pi()
        vals = np.empty(n, dtype=object)
        for j in range(n):
            z = gmpy2.exp(gmpy2.mpc(0, -pi + 2 * pi * j / n))
            vals[j] = spectrum_mp(z)
        out = mp_fft_plus(vals)
        scale = gmpy2.mpfr(n)
        full = np.array([complex(v / scale) for v in out], dtype=np.complex128)
    k = np.arange(-(n // 2), n - n // 2)
    return _signs(k) * full[np.mod(k, n)]
