"""Finitely supported elements of the Wiener algebra and the l-infinity pairing.

A :class:`WienerFunction` is a trigonometric polynomial
``f(w) = sum_k f_k exp(i w k)`` stored as a dense coefficient block starting
at index ``offset``.  Every signal ``x`` acts on such an ``f`` through the
pairing ``<X, f> = sum_k x(k) f_k``; with this index convention the basis
function ``exp(i w t)`` (a single unit coefficient at ``k = t``) pairs to
``x(t)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping

import numpy as np

from .errors import NonFiniteError, WindowError
from .signals import SignalSource

_BLOCK = 1 << 22


@dataclass(frozen=True, eq=False)
class WienerFunction:
    """Coefficients ``coeffs[i] = f_{offset + i}``; immutable after construction."""

    offset: int
    coeffs: np.ndarray
    norm_a: float = field(init=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=np.complex128).reshape(-1)
        bad = np.flatnonzero(~np.isfinite(c))
        if bad.size:
            k = int(self.offset) + int(bad[0])
            raise NonFiniteError(f"non-finite coefficient at index k={k}", index=k)
        c.setflags(write=False)
        object.__setattr__(self, "offset", int(self.offset))
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "norm_a", math.fsum(np.abs(c)))

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.offset, self.offset + self.coeffs.size)

    @property
    def support(self) -> tuple[int, int] | None:
        if self.coeffs.size == 0:
            return None
        return self.offset, self.offset + self.coeffs.size - 1

    @property
    def half_width(self) -> int:
        s = self.support
        return 0 if s is None else max(abs(s[0]), abs(s[1]))

    def coefficient(self, k: int) -> complex:
        i = k - self.offset
        if 0 <= i < self.coeffs.size:
            return complex(self.coeffs[i])
        return 0j

    def as_dict(self) -> dict[int, complex]:
        return {int(k): complex(c) for k, c in zip(self.indices, self.coeffs)}

    def __call__(self, omega):
        return evaluate(self, omega)

    def __repr__(self) -> str:
        return f"WienerFunction(support={self.support}, norm_a={self.norm_a:.6g})"


def make_wiener(coeffs: Mapping[int, complex] | np.ndarray, offset: int | None = None) -> WienerFunction:
    """Build a trigonometric polynomial.

    ``coeffs`` is either a mapping ``k -> f_k`` or a dense array; a dense array
    starts at ``offset`` (default: centred, i.e. ``-(len - 1) // 2``).
    """
    if isinstance(coeffs, Mapping):
        if not coeffs:
            return WienerFunction(0, np.zeros(0, dtype=np.complex128))
        keys = [int(k) for k in coeffs]
        lo, hi = min(keys), max(keys)
        dense = np.zeros(hi - lo + 1, dtype=np.complex128)
        for k, v in coeffs.items():
            v = complex(v)
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise NonFiniteError(f"non-finite coefficient at index k={int(k)}", index=int(k))
            dense[int(k) - lo] = v
        return WienerFunction(lo, dense)
    arr = np.asarray(coeffs)
    if offset is None:
        offset = -((arr.size - 1) // 2)
    return WienerFunction(offset, arr)


def basis(t: int) -> WienerFunction:
    """The function ``exp(i w t)``."""
    return WienerFunction(int(t), np.ones(1))


def evaluate(f: WienerFunction, omega):
    """``f(w) = sum_k f_k exp(i w k)`` at scalar or array ``omega``."""
    w = np.asarray(omega, dtype=float)
    if not np.all(np.isfinite(w)):
        raise ValueError("evaluation point must be finite")
    flat = w.reshape(-1)
    out = np.zeros(flat.shape, dtype=np.complex128)
    if f.coeffs.size:
        k = f.indices.astype(float)
        step = max(1, _BLOCK // k.size)
        for s in range(0, flat.size, step):
            out[s:s + step] = np.exp(1j * np.multiply.outer(flat[s:s + step], k)) @ f.coeffs
    out = out.reshape(w.shape)
    return out if out.ndim else complex(out)


def evaluate_on_grid(f: WienerFunction, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Values at ``w_j = -pi + 2 pi j / n`` (``n`` even) via one FFT."""
    if n % 2:
        raise ValueError("grid size must be even")
    nodes = -np.pi + 2 * np.pi * np.arange(n) / n
    g = np.zeros(n, dtype=np.complex128)
    if f.coeffs.size:
        k = f.indices
        sign = np.where(k % 2 == 0, 1.0, -1.0)
        np.add.at(g, np.mod(k, n), sign * f.coeffs)
    return nodes, n * np.fft.ifft(g)


def product(f: WienerFunction, g: WienerFunction) -> WienerFunction:
    """Pointwise product, i.e. the full discrete convolution of coefficients."""
    if f.coeffs.size == 0 or g.coeffs.size == 0:
        return WienerFunction(0, np.zeros(0, dtype=np.complex128))
    return WienerFunction(f.offset + g.offset, np.convolve(f.coeffs, g.coeffs))


@dataclass(frozen=True)
class PairingValue:
    value: complex
    truncation_bound: float = 0.0

    @property
    def exact(self) -> bool:
        return self.truncation_bound == 0.0


def pairing(x: SignalSource, f: WienerFunction, outside_bound: float | None = None) -> PairingValue:
    """``<X, f> = sum_k x(k) f_k`` over the (finite) support of ``f``.

    For windowed signals the support must lie inside the window, unless
    ``outside_bound`` (an assumed bound on ``|x|`` outside the window) is
    given; the missing terms are then dropped and bounded.
    """
    supp = f.support
    if supp is None:
        return PairingValue(0j)
    if x.covers(*supp):
        vals = x.sample(f.indices)
        return PairingValue(complex(np.dot(vals, f.coeffs)))
    lo, hi = x.window
    if outside_bound is None:
        k = supp[0] if supp[0] < lo else supp[1]
        raise WindowError(f"support index k={k} outside sample window [{lo}, {hi}]", index=k)
    k = f.indices
    inside = (k >= lo) & (k <= hi)
    value = complex(np.dot(x.sample(k[inside]), f.coeffs[inside])) if inside.any() else 0j
    bound = float(outside_bound) * math.fsum(np.abs(f.coeffs[~inside]))
    return PairingValue(value, bound)


def sobolev_norm(f: WienerFunction) -> float:
    """``(sum_k (1 + k^2) |f_k|^2)^(1/2)``."""
    if f.coeffs.size == 0:
        return 0.0
    k = f.indices.astype(float)
    return math.sqrt(math.fsum((1 + k * k) * np.abs(f.coeffs) ** 2))


@lru_cache(maxsize=None)
def sobolev_constant(terms: int = 2000) -> float:
    """``C = (sum_{k in Z} 1/(1+k^2))^(1/2)``.

    Direct summation of ``|k| < terms`` plus an Euler-Maclaurin tail with
    three correction terms (error of order ``terms**-7``).
    """
    K = int(terms)
    k = np.arange(1, K, dtype=float)
    head = math.fsum(1.0 / (1.0 + k * k))
    x = float(K)
    g = 1 / (1 + x * x)
    g1 = -2 * x / (1 + x * x) ** 2
    g3 = -24 * x * (x * x - 1) / (1 + x * x) ** 4
    tail = math.atan(1 / x) + g / 2 - g1 / 12 + g3 / 720
    return math.sqrt(1 + 2 * (head + tail))


def embedding_bound(f: WienerFunction) -> float:
    """Upper bound ``C * ||f||_{W^1_2}`` on the Wiener norm of ``f``."""
    return sobolev_constant() * sobolev_norm(f)


def partial_spectrum(x: SignalSource, m: int, grid) -> np.ndarray:
    """``X_m(w) = sum_{|t| <= m} exp(-i w t) x(t)`` on ``grid``."""
    m = int(m)
    if m < 0:
        raise ValueError("m must be nonnegative")
    if not x.covers(-m, m):
        lo, hi = x.window
        raise WindowError(f"window [{lo}, {hi}] does not cover [-{m}, {m}]",
                          index=-m if -m < lo else m)
    t = np.arange(-m, m + 1)
    vals = x.sample(t)
    w = np.atleast_1d(np.asarray(grid, dtype=float))
    out = np.empty(w.shape, dtype=np.complex128)
    step = max(1, _BLOCK // t.size)
    for s in range(0, w.size, step):
        out[s:s + step] = np.exp(-1j * np.multiply.outer(w[s:s + step], t)) @ vals
    return out
