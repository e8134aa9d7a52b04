"""Spectral gaps and their banks of test functions.

A frequency set ``D`` (a union of intervals in ``[-pi, pi]``) is a spectral
gap of ``x`` when ``<X, f> = 0`` for every ``f`` in the Wiener algebra that
vanishes off ``D``.  Numerically ``D`` is probed with a finite bank of smooth
bumps supported in ``D``.  Their coefficients are truncated at ``|k| <= K``,
so each bank member leaks slightly outside ``D``; the leakage is measured on
a fine grid and carried along.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .quadrature import check_grid, standard_coefficients, uniform_nodes
from .signals import EPS, QuadDensity, SignalSource, wrap_angle
from .transfer import FilteredSamples
from .wiener import WienerFunction, evaluate, evaluate_on_grid, pairing, product


def _check_intervals(intervals) -> tuple[tuple[float, float], ...]:
    out = []
    for iv in intervals:
        a, b = (float(v) for v in iv)
        if not (-math.pi <= a < b <= math.pi):
            raise ValueError(f"interval ({a!r}, {b!r}) must satisfy -pi <= a < b <= pi")
        out.append((a, b))
    if not out:
        raise ValueError("a spectral gap needs at least one interval")
    out.sort()
    for (a0, b0), (a1, b1) in zip(out, out[1:]):
        if a1 < b0:
            raise ValueError(f"intervals ({a0}, {b0}) and ({a1}, {b1}) overlap")
    return tuple(out)


def in_gap(omega, intervals) -> np.ndarray:
    """Whether each ``omega`` lies in the open union of ``intervals``."""
    w = np.asarray(omega, dtype=float)
    inside = np.zeros(w.shape, dtype=bool)
    for a, b in intervals:
        inside |= (w > a) & (w < b)
    return inside


def bump(center: float, width: float, power: int = 3):
    """``((1 + cos(2 pi d / width)) / 2) ** power`` for ``|d| <= width/2``, else 0,
    with ``d`` the wrapped distance to ``center``."""

    def f(omega):
        d = wrap_angle(np.asarray(omega, dtype=float) - center)
        v = 0.5 * (1 + np.cos(2 * np.pi * d / width))
        return np.where(np.abs(d) <= width / 2, v ** power, 0.0)

    return f


def bump_layout(intervals, n_bumps: int, overlap: float = 2.0) -> list[tuple[float, float]]:
    """Centres and widths of ``n_bumps`` bumps spread over ``intervals``.

    Bumps are shared among intervals in proportion to length (at least one
    each).  Within an interval of length ``L`` holding ``n`` bumps, adjacent
    centres are ``w / overlap`` apart, with ``w = L / (1 + (n - 1) / overlap)``,
    so the outer bumps end exactly at the interval edges.
    """
    if n_bumps < len(intervals):
        raise ValueError(f"need at least one bump per interval ({len(intervals)}), got {n_bumps}")
    if overlap < 1:
        raise ValueError("overlap must be >= 1")
    lengths = np.array([b - a for a, b in intervals])
    counts = np.ones(len(intervals), dtype=int)
    for _ in range(n_bumps - len(intervals)):
        counts[np.argmax(lengths / counts)] += 1
    layout = []
    for (a, b), n in zip(intervals, counts):
        w = (b - a) / (1 + (n - 1) / overlap)
        for j in range(n):
            layout.append((a + w / 2 + j * w / overlap, w))
    return layout


@dataclass(frozen=True, eq=False)
class SpectralGap:
    """Intervals ``D`` with a truncated bump bank.

    ``bank_leakage`` is ``max_j max |f_j(w)|`` over audit-grid points ``w``
    outside ``D``.
    """

    intervals: tuple[tuple[float, float], ...]
    bank: tuple[WienerFunction, ...]
    bank_leakage: float
    centers: tuple[float, ...] = ()
    widths: tuple[float, ...] = ()
    K: int = 0
    power: int = 3

    @property
    def measure(self) -> float:
        return math.fsum(b - a for a, b in self.intervals)

    def contains(self, omega) -> np.ndarray:
        return in_gap(omega, self.intervals)

    def matrix(self) -> tuple[int, np.ndarray]:
        """Bank coefficients as rows of a dense matrix over ``k = offset ..``."""
        lo = min(f.offset for f in self.bank)
        hi = max(f.offset + f.coeffs.size - 1 for f in self.bank)
        F = np.zeros((len(self.bank), hi - lo + 1), dtype=np.complex128)
        for j, f in enumerate(self.bank):
            F[j, f.offset - lo:f.offset - lo + f.coeffs.size] = f.coeffs
        return lo, F

    def __repr__(self) -> str:
        return (f"SpectralGap({list(self.intervals)}, bumps={len(self.bank)}, K={self.K}, "
                f"leakage={self.bank_leakage:.3e})")


def default_grid_size(K: int) -> int:
    return max(1 << 14, 1 << int(math.ceil(math.log2(8 * K + 8))))


def make_gap(intervals, n_bumps: int = 12, K: int = 4096, *, power: int = 3,
             overlap: float = 2.0, N: int | None = None) -> SpectralGap:
    """Build a bank of ``n_bumps`` Hann-power bumps inside ``intervals``.

    Coefficients come from the N-point rule (``N`` defaults to at least
    ``8 K``); the leakage is audited on the same grid, which is exact for the
    truncated bank since its degree ``K`` is below ``N / 2``.
    """
    iv = _check_intervals(intervals)
    if K < 1:
        raise ValueError("K must be positive")
    N = default_grid_size(K) if N is None else int(N)
    check_grid(N, K)
    nodes = uniform_nodes(N)
    k = np.arange(-(N // 2), N - N // 2)
    keep = np.abs(k) <= K
    outside = ~in_gap(nodes, iv)
    bank, leak = [], 0.0
    layout = bump_layout(iv, n_bumps, overlap)
    for c, w in layout:
        coeffs = standard_coefficients(bump(c, w, power)(nodes))[keep]
        f = WienerFunction(-K, coeffs)
        _, vals = evaluate_on_grid(f, N)
        if outside.any():
            leak = max(leak, float(np.abs(vals[outside]).max()))
        bank.append(f)
    return SpectralGap(iv, tuple(bank), leak, tuple(c for c, _ in layout),
                       tuple(w for _, w in layout), K, power)


def arc(start: float, length: float) -> tuple[tuple[float, float], ...]:
    """The arc ``(start, start + length)`` on the circle as intervals in ``[-pi, pi]``."""
    if not (0 < length < 2 * math.pi):
        raise ValueError("arc length must lie in (0, 2 pi)")
    a = wrap_angle(start)
    if a == math.pi:
        a = -math.pi
    b = a + length
    if b <= math.pi:
        return ((a, b),)
    return ((-math.pi, b - 2 * math.pi), (a, math.pi))


@dataclass(frozen=True)
class GapCertificate:
    """``residual = max_j |<X, f_j>|`` and the slack explained by leakage.

    ``slack`` bounds what a signal with no spectrum in ``D`` can still
    produce through bank leakage; ``certified`` is ``residual <= eps + slack``.
    """

    residual: float
    slack: float | None
    eps: float
    certified: bool | None


def gap_residual(x: SignalSource, D: SpectralGap, outside_bound: float | None = None) -> float:
    """``max_j |<X, f_j>|`` over the bank."""
    if not D.bank:
        return 0.0
    vals = [pairing(x, f, outside_bound) for f in D.bank]
    return max(abs(v.value) + v.truncation_bound for v in vals)


def _bank_at_tones(x: SignalSource, D: SpectralGap) -> tuple[np.ndarray, np.ndarray]:
    """Amplitudes and ``|f_j(w_k)|`` (rows ``j``) at the tones of ``x``."""
    a, w = x.tones()
    if isinstance(x, QuadDensity):
        vals = np.array([np.abs(evaluate_on_grid(f, x.n)[1]) for f in D.bank])
        return np.asarray(a), vals
    return np.asarray(a), np.array([np.abs(np.atleast_1d(evaluate(f, w))) for f in D.bank])


def gap_certificate(x: SignalSource, D: SpectralGap, eps: float = 0.0) -> GapCertificate:
    """Residual plus leakage slack.

    For exponential sums (including quadrature densities) with no tone in
    ``D`` the slack is ``max_j sum_k |a_k| |f_j(w_k)|``, the most the bank can
    pick up through leakage at the actual tones.  For filtered samples
    ``h * n`` it is ``max_j sup|n| ||H f_j||_A`` plus the sample error times
    ``||f_j||_A``.  Other sources get ``slack=None``.
    """
    res = gap_residual(x, D)
    if not D.bank:
        return GapCertificate(res, None, eps, None)
    if isinstance(x, FilteredSamples):
        H = x.kernel.as_wiener()
        slack = max(x.base_sup * product(H, f).norm_a + x.error_bound * f.norm_a for f in D.bank)
        # round-off of the residual sums themselves
        slack += 64 * EPS * max(f.norm_a for f in D.bank) * x.sup_bound
        return GapCertificate(res, slack, eps, bool(res <= eps + slack))
    if not hasattr(x, "tones"):
        return GapCertificate(res, None, eps, None)
    a, w = x.tones()
    if np.any(D.contains(w) & (np.asarray(a) != 0)):
        return GapCertificate(res, None, eps, False)
    amp, vals = _bank_at_tones(x, D)
    # leakage at the tones plus round-off of the pairing sums, scaled by the bank norm
    slack = float((vals @ np.abs(amp)).max()) + 64 * EPS * max(f.norm_a for f in D.bank) * x.sup_bound
    return GapCertificate(res, slack, eps, bool(res <= eps + slack))
