"""Spectrum degeneracy: does ``X`` damp the weight ``G(w) = exp(c / (|e^{iw} - e^{iw_hat}|^q + nu))``?

``G`` is bounded for each ``nu > 0`` but its peak ``exp(c / nu)`` at ``w_hat``
diverges as ``nu -> 0``.  A signal compensates the weight when ``X G`` stays
bounded in the dual norm, which equals the sup norm of the filtered signal
``F^-1(X G)``.  We evaluate that sup norm along a decreasing sequence of
``nu`` and flag divergence.

Exponential sums and quadrature densities are filtered exactly through the
eigenrelation (each tone is multiplied by ``G`` at its frequency).  Explicit
samples go through a quadrature kernel of ``G``; its double-precision
round-off grows like ``eps * exp(c / nu)``, which the reported error bars
make visible.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import SaturationError
from .signals import EPS, ExpSum, QuadDensity, SignalSource
from .transfer import apply_transfer, kernel_from_spectrum


@dataclass(frozen=True)
class DegeneracyWeight:
    omega_hat: float
    c: float = 1.0
    q_exp: float = 2.0
    nu: float = 0.5

    def __post_init__(self):
        if not (-math.pi < self.omega_hat <= math.pi):
            raise ValueError("omega_hat must lie in (-pi, pi]")
        if not self.c > 0:
            raise ValueError("c must be positive")
        if not self.q_exp > 1:
            raise ValueError("q_exp must exceed 1")
        if not (0 < self.nu < 1):
            raise ValueError("nu must lie in (0, 1)")
        if self.c / self.nu > 700:
            raise SaturationError(f"peak exp(c/nu) = exp({self.c / self.nu:.6g}) overflows",
                                  log_magnitude=self.c / self.nu)

    def with_nu(self, nu: float) -> "DegeneracyWeight":
        return DegeneracyWeight(self.omega_hat, self.c, self.q_exp, nu)

    def __call__(self, omega):
        w = np.asarray(omega, dtype=float)
        d = np.abs(np.exp(1j * w) - np.exp(1j * self.omega_hat))
        return np.exp(self.c / (d ** self.q_exp + self.nu))


@dataclass(frozen=True)
class DegeneracyReport:
    """Sup norms of ``F^-1(X G_nu)`` along ``nus``.

    ``values`` are the computed sup norms (over one period for quadrature
    densities, over ``times`` otherwise), ``upper`` upper bounds on the true
    sup over all ``t`` when available, and ``error_bounds`` the numerical
    error of ``values``.  ``diverging`` is judged on ``values - error_bounds``
    so that round-off blow-up is not mistaken for divergence.
    """

    nus: tuple[float, ...]
    values: tuple[float, ...]
    upper: tuple[float | None, ...]
    error_bounds: tuple[float | None, ...]
    route: str
    diverging: bool

    @property
    def value(self) -> float:
        return max(self.values) if self.values else 0.0

    @property
    def bounded(self) -> bool:
        return not self.diverging


def is_diverging(values, growth: float = 10.0) -> bool:
    """Strictly increasing with overall growth at least ``growth``."""
    v = list(values)
    if len(v) < 2:
        return False
    inc = all(b > a for a, b in zip(v, v[1:]))
    return inc and v[-1] >= growth * max(v[0], np.finfo(float).tiny)


def _spectral_one(x: SignalSource, w: DegeneracyWeight, times) -> tuple[float, float | None, float]:
    amps, freqs = x.tones()
    g = np.asarray(amps) * w(freqs)
    if isinstance(x, QuadDensity):
        vals = np.fft.ifft(x.density_values * w(x.nodes))
        sup = float(np.abs(vals).max())
        err = EPS * (2 * math.log2(x.n) + 6) * math.fsum(np.abs(g))
        return sup, sup + err, float(err)
    t = np.asarray(times, dtype=float)
    vals = np.exp(1j * np.multiply.outer(t, freqs)) @ g
    upper = math.fsum(np.abs(g))
    err = EPS * (float(np.abs(np.multiply.outer(t, freqs)).max(initial=0)) + 4 + len(g)) * upper
    return float(np.abs(vals).max(initial=0)), upper * (1 + 4 * EPS), float(err)


def degeneracy_norm(x: SignalSource, weight: DegeneracyWeight, nu_list, *, K: int = 256,
                    N: int = 1 << 14, times=None, workers: int | None = None) -> DegeneracyReport:
    """Evaluate ``||F^-1(X G_nu)||_inf`` for each ``nu`` in ``nu_list``.

    ``weight`` supplies ``w_hat``, ``c`` and ``q``; its own ``nu`` is ignored.
    ``K`` and ``N`` set the kernel used for explicit samples, ``times`` the
    evaluation times (default: ``-256 .. 256`` for exponential sums, every
    time the window allows for samples).
    """
    nus = tuple(float(v) for v in nu_list)
    if not nus:
        raise ValueError("nu_list must be nonempty")
    weights = [weight.with_nu(v) for v in nus]
    spectral = isinstance(x, (ExpSum, QuadDensity))
    if spectral:
        t = np.arange(-256, 257) if times is None else np.asarray(times)

        def run(w):
            return _spectral_one(x, w, t)
    else:
        if times is None:
            if x.window is None:
                raise ValueError("times are required for sources without a window")
            t = np.arange(x.window[0] + K, x.window[1] - K + 1)
            if t.size == 0:
                raise ValueError(f"window {x.window} too short for kernel half-width {K}")
        else:
            t = np.asarray(times)

        def run(w):
            h = kernel_from_spectrum(w, K, N, label=f"G(nu={w.nu:g})")
            res = apply_transfer(h, x, t)
            return float(np.abs(res.values).max()), None, res.error_bound

    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            out = list(pool.map(run, weights))
    else:
        out = [run(w) for w in weights]
    values = tuple(o[0] for o in out)
    errors = tuple(o[2] for o in out)
    # divergence must survive the error bars: use certified lower bounds
    lower = [max(v - (e or 0.0), 0.0) for v, e in zip(values, errors)]
    return DegeneracyReport(nus, values, tuple(o[1] for o in out), errors,
                            "spectral" if spectral else "kernel", is_diverging(lower))
