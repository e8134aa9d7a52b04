"""Bounded two-sided discrete-time signals.

Three concrete sources are provided:

* :class:`Samples` -- explicit values on a finite window ``[t_min, t_max]``;
* :class:`ExpSum` -- a finite exponential sum ``sum_k a_k exp(i w_k t)``;
* :class:`QuadDensity` -- the signal ``(1/n) sum_j X(w_j) exp(i w_j t)``
  obtained from a spectral density ``X`` by the ``n``-point uniform rule on
  ``[-pi, pi)``.  It is itself an exponential sum with ``n`` tones, which is
  what gives it exact pairings and exact filtering.

Samples are requested with integer time arrays and returned as complex128.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Callable, Iterable, Sequence

import math

import numpy as np

from .errors import NonFiniteError, WindowError

EPS = np.finfo(float).eps / 2  # unit roundoff
_BLOCK = 1 << 21


def wrap_angle(omega):
    """Map angles into ``(-pi, pi]``."""
    w = np.asarray(omega, dtype=float)
    r = np.pi - np.remainder(np.pi - w, 2 * np.pi)
    return r if r.ndim else float(r)


def as_times(t) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(t))
    if arr.dtype.kind not in "iu":
        if not np.all(np.equal(np.mod(arr, 1), 0)):
            raise ValueError("time indices must be integers")
        arr = arr.astype(np.int64)
    return arr.astype(np.int64, copy=False)


class SignalSource(ABC):
    """A two-sided bounded signal ``x: Z -> C``."""

    #: ``(t_min, t_max)`` if only finitely many samples are known.
    window: tuple[int, int] | None = None

    @property
    @abstractmethod
    def sup_bound(self) -> float:
        """Upper bound on ``|x(t)|`` over every representable ``t``."""

    @abstractmethod
    def sample(self, t) -> np.ndarray:
        ...

    def sample_error(self, t) -> np.ndarray:
        """Per-sample bound on the floating-point error of :meth:`sample`."""
        return np.zeros(as_times(t).shape)

    def covers(self, lo: int, hi: int) -> bool:
        if self.window is None:
            return True
        return self.window[0] <= lo and hi <= self.window[1]

    def __call__(self, t):
        return self.sample(t)


class Samples(SignalSource):
    """Explicit samples ``values[i] = x(t_min + i)``.

    ``filled`` lists times whose value was not supplied by the data source and
    was zero-filled instead (see :func:`linfspec.harness.csvio.read_series`).
    """

    def __init__(self, t_min: int, values: Sequence[complex], filled: Iterable[int] = ()):
        v = np.array(values, dtype=np.complex128)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("Samples needs a nonempty one-dimensional value array")
        bad = np.flatnonzero(~np.isfinite(v))
        if bad.size:
            idx = int(t_min) + int(bad[0])
            raise NonFiniteError(f"non-finite sample at t={idx}", index=idx)
        v.setflags(write=False)
        self.t_min = int(t_min)
        self.values = v
        self.filled = tuple(sorted(int(t) for t in filled))
        self.window = (self.t_min, self.t_min + v.size - 1)
        self._sup = float(np.abs(v).max())

    @property
    def sup_bound(self) -> float:
        return self._sup

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.window[0], self.window[1] + 1)

    def sample(self, t) -> np.ndarray:
        t = as_times(t)
        lo, hi = self.window
        outside = (t < lo) | (t > hi)
        if outside.any():
            bad = int(t[np.argmax(outside)])
            raise WindowError(f"t={bad} outside sample window [{lo}, {hi}]", index=bad)
        return self.values[t - lo]

    def restrict(self, lo: int, hi: int) -> "Samples":
        return Samples(lo, self.sample(np.arange(lo, hi + 1)),
                       [t for t in self.filled if lo <= t <= hi])

    def __repr__(self) -> str:
        return f"Samples(window={self.window})"


def _tone_sum(amplitudes: np.ndarray, frequencies: np.ndarray, t: np.ndarray) -> np.ndarray:
    out = np.empty(t.shape, dtype=np.complex128)
    flat_t = t.reshape(-1)
    flat = out.reshape(-1)
    step = max(1, _BLOCK // max(1, frequencies.size))
    for s in range(0, flat_t.size, step):
        tt = flat_t[s:s + step].astype(float)
        flat[s:s + step] = np.exp(1j * np.multiply.outer(tt, frequencies)) @ amplitudes
    return out


class ExpSum(SignalSource):
    """``x(t) = sum_k a_k exp(i w_k t)`` with every ``w_k`` in ``(-pi, pi]``."""

    def __init__(self, amplitudes: Sequence[complex], frequencies: Sequence[float]):
        a = np.array(amplitudes, dtype=np.complex128).reshape(-1)
        w = np.array(frequencies, dtype=float).reshape(-1)
        if a.shape != w.shape:
            raise ValueError("amplitudes and frequencies differ in length")
        for name, arr in (("amplitude", a), ("frequency", w)):
            bad = np.flatnonzero(~np.isfinite(arr))
            if bad.size:
                raise NonFiniteError(f"non-finite {name} at position {bad[0]}", index=int(bad[0]))
        out_of_range = np.flatnonzero((w <= -np.pi) | (w > np.pi))
        if out_of_range.size:
            k = int(out_of_range[0])
            raise ValueError(f"frequency w[{k}]={w[k]!r} outside (-pi, pi]")
        a.setflags(write=False)
        w.setflags(write=False)
        self.amplitudes = a
        self.frequencies = w
        self._sup = math.fsum(np.abs(a))

    @classmethod
    def tone(cls, frequency: float, amplitude: complex = 1.0) -> "ExpSum":
        return cls([amplitude], [frequency])

    @property
    def sup_bound(self) -> float:
        return self._sup

    def tones(self) -> tuple[np.ndarray, np.ndarray]:
        return self.amplitudes, self.frequencies

    def sample(self, t) -> np.ndarray:
        return _tone_sum(self.amplitudes, self.frequencies, as_times(t))

    def sample_error(self, t) -> np.ndarray:
        t = as_times(t).astype(float)
        mag = np.abs(self.amplitudes)
        # phase rounding u*|w t| plus exp, product and summation roundings
        per = np.abs(np.multiply.outer(t, self.frequencies)) + 4 + self.amplitudes.size
        return EPS * (per @ mag)

    def __repr__(self) -> str:
        return f"ExpSum({len(self.amplitudes)} tones)"


class QuadDensity(SignalSource):
    """Signal synthesised from a spectral density by the uniform rule.

    ``x(t) = (1/n) sum_j X(w_j) exp(i w_j t)`` with ``w_j = -pi + 2 pi j/n``.
    The density is sampled once at construction.
    """

    def __init__(self, density: Callable[[np.ndarray], np.ndarray], n: int):
        n = int(n)
        if n < 2:
            raise ValueError("quadrature size must be at least 2")
        nodes = -np.pi + 2 * np.pi * np.arange(n) / n
        vals = np.asarray(density(nodes), dtype=np.complex128).reshape(-1)
        if vals.shape != nodes.shape:
            raise ValueError("density must return one value per node")
        bad = np.flatnonzero(~np.isfinite(vals))
        if bad.size:
            raise NonFiniteError(f"non-finite density at w={nodes[bad[0]]!r}", index=int(bad[0]))
        vals.setflags(write=False)
        self.density = density
        self.n = n
        self.nodes = nodes
        self.density_values = vals
        self._amplitudes = vals / n
        self._frequencies = wrap_angle(nodes)
        self._sup = math.fsum(np.abs(self._amplitudes))
        self._base = np.fft.ifft(vals)

    @property
    def sup_bound(self) -> float:
        return self._sup

    def tones(self) -> tuple[np.ndarray, np.ndarray]:
        return self._amplitudes, self._frequencies

    def as_exp_sum(self) -> ExpSum:
        keep = self._amplitudes != 0
        if not keep.any():
            return ExpSum([0.0], [0.0])
        return ExpSum(self._amplitudes[keep], self._frequencies[keep])

    def sample(self, t) -> np.ndarray:
        t = as_times(t)
        # (1/n) sum_j X_j e^{i w_j t} = (-1)^t * ifft(X)[t mod n]
        sign = np.where(t % 2 == 0, 1.0, -1.0)
        return sign * self._base[np.mod(t, self.n)]

    def sample_error(self, t) -> np.ndarray:
        t = as_times(t)
        return np.full(t.shape, EPS * (2 * math.log2(self.n) + 4) * self._sup)

    def __repr__(self) -> str:
        return f"QuadDensity(n={self.n})"


class Modulated(SignalSource):
    """``y(t) = exp(i theta t) x(t)``."""

    def __init__(self, base: SignalSource, theta: float):
        self.base = base
        self.theta = float(theta)
        self.window = base.window

    @property
    def sup_bound(self) -> float:
        return self.base.sup_bound

    def sample(self, t) -> np.ndarray:
        t = as_times(t)
        return np.exp(1j * self.theta * t) * self.base.sample(t)

    def sample_error(self, t) -> np.ndarray:
        t = as_times(t)
        extra = EPS * (np.abs(self.theta * t) + 4) * self.base.sup_bound
        return self.base.sample_error(t) + extra


def modulate(x: SignalSource, theta: float) -> SignalSource:
    """Return ``exp(i theta t) x(t)``; exponential sums stay exponential sums."""
    if theta == 0:
        return x
    if isinstance(x, (ExpSum, QuadDensity)):
        a, w = x.tones()
        return ExpSum(a, wrap_angle(np.asarray(w) + theta))
    return Modulated(x, theta)
