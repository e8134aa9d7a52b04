"""Recovery of missing samples from a spectral gap.

If ``D`` is a spectral gap of ``x`` then for every bank member ``f_j``

    sum_{t in M} f_{j,t} x(t) = - sum_{t not in M} f_{j,t} x(t),

which is linear in the unknown values ``x(t)``, ``t in M``.  The right-hand
side needs only observed samples.  When only ``Re X`` (or ``Im X``) has the
gap, only the real (imaginary) part of each identity holds, so the unknowns
are split into real and imaginary parts and solved over the reals.

Least squares is done through an SVD with optional ridge damping; the
singular values give the conditioning diagnostic and the ambiguity flag.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import AmbiguityBoundError, ConfigError, MaskError, WindowError
from .gaps import SpectralGap, arc, make_gap
from .signals import SignalSource, as_times

MODES = ("full", "real", "imag")


class Masked(SignalSource):
    """``base`` with the samples at ``missing`` hidden."""

    def __init__(self, base: SignalSource, missing: Iterable[int]):
        self.base = base
        self.missing = tuple(sorted({int(t) for t in missing}))
        self._missing = np.array(self.missing, dtype=np.int64)
        self.window = base.window

    @property
    def sup_bound(self) -> float:
        return self.base.sup_bound

    def sample(self, t) -> np.ndarray:
        t = as_times(t)
        hidden = np.isin(t, self._missing)
        if hidden.any():
            bad = int(t[np.argmax(hidden)])
            raise MaskError(f"sample at t={bad} is masked", index=bad)
        return self.base.sample(t)

    def sample_error(self, t) -> np.ndarray:
        return self.base.sample_error(t)


@dataclass(frozen=True)
class RecoveryProblem:
    observed: SignalSource
    missing: tuple[int, ...]
    gap: SpectralGap
    mode: str = "full"
    ridge: float = 0.0
    rank_tol: float = 1e-10

    def __post_init__(self):
        object.__setattr__(self, "missing", tuple(sorted({int(t) for t in self.missing})))
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not self.ridge >= 0:
            raise ConfigError("ridge must be nonnegative")
        if not self.gap.bank:
            raise ConfigError("gap bank is empty")


@dataclass(frozen=True)
class LinearSystem:
    """Real system ``A u = b`` with ``u = (Re x(M), Im x(M))``.

    ``complex_matrix`` and ``complex_rhs`` keep the underlying complex
    constraints ``sum_t f_{j,t} x(t) = b_j``.
    """

    matrix: np.ndarray
    rhs: np.ndarray
    complex_matrix: np.ndarray
    complex_rhs: np.ndarray
    missing: tuple[int, ...]
    mode: str


@dataclass(frozen=True)
class RecoveryResult:
    times: tuple[int, ...]
    values: np.ndarray
    residual: float
    condition: float
    singular_values: np.ndarray = field(repr=False)
    ambiguous: bool = False
    mode: str = "full"
    gap: tuple[tuple[float, float], ...] = ()

    def as_dict(self) -> dict[int, complex]:
        return {t: complex(v) for t, v in zip(self.times, self.values)}


def real_system(A: np.ndarray, b: np.ndarray, mode: str) -> tuple[np.ndarray, np.ndarray]:
    """Recast ``A x = b`` over real unknowns ``(Re x, Im x)``."""
    top = np.hstack([A.real, -A.imag])
    bottom = np.hstack([A.imag, A.real])
    if mode == "full":
        return np.vstack([top, bottom]), np.concatenate([b.real, b.imag])
    if mode == "real":
        return top, b.real.copy()
    if mode == "imag":
        return bottom, b.imag.copy()
    raise ConfigError(f"unknown mode {mode!r}")


def assemble_constraints(problem: RecoveryProblem, outside_bound: float | None = None) -> LinearSystem:
    """Constraint matrix ``A[j, t] = f_{j,t}`` (``t`` in ``M``) and right-hand
    side ``b_j = -sum_{t not in M} x(t) f_{j,t}`` from observed samples only.

    For windowed sources the bank support must lie in the window.
    """
    M = problem.missing
    m = len(M)
    nb = len(problem.gap.bank)
    if m == 0:
        z = np.zeros((0, 0))
        return LinearSystem(z, np.zeros(0), np.zeros((nb, 0), complex), np.zeros(nb, complex), M,
                            problem.mode)
    rows = nb * (2 if problem.mode == "full" else 1)
    if rows < 2 * m:
        raise ConfigError(f"bank of {nb} functions gives {rows} real constraints, "
                          f"fewer than the {2 * m} real unknowns")
    lo, F = problem.gap.matrix()
    k = np.arange(lo, lo + F.shape[1])
    Mi = np.array(M)
    in_support = (Mi >= lo) & (Mi < lo + F.shape[1])
    A = np.zeros((nb, m), dtype=np.complex128)
    A[:, in_support] = F[:, Mi[in_support] - lo]
    obs = ~np.isin(k, Mi)
    x = problem.observed
    if not x.covers(int(k[0]), int(k[-1])):
        lo_w, hi_w = x.window
        if outside_bound is None:
            bad = int(k[0]) if k[0] < lo_w else int(k[-1])
            raise WindowError(f"bank support [{k[0]}, {k[-1]}] exceeds the window [{lo_w}, {hi_w}]",
                              index=bad)
        obs &= (k >= lo_w) & (k <= hi_w)
    vals = x.sample(k[obs])
    b = -(F[:, obs] @ vals)
    R, r = real_system(A, b, problem.mode)
    return LinearSystem(R, r, A, b, M, problem.mode)


def _solve(R: np.ndarray, r: np.ndarray, ridge: float) -> tuple[np.ndarray, np.ndarray]:
    U, s, Vt = np.linalg.svd(R, full_matrices=False)
    with np.errstate(divide="ignore", invalid="ignore"):
        filt = np.where(s > 0, s / (s * s + ridge), 0.0)
    return Vt.T @ (filt * (U.T @ r)), s


def recover_missing(problem: RecoveryProblem, outside_bound: float | None = None) -> RecoveryResult:
    """Least-squares values at the missing times.

    ``residual`` is the largest violation of the real constraints; the
    solution is flagged ``ambiguous`` when the smallest singular value is
    below ``rank_tol`` times the largest, or not above the ridge level.
    """
    sys = assemble_constraints(problem, outside_bound)
    M = sys.missing
    iv = problem.gap.intervals
    if not M:
        return RecoveryResult((), np.zeros(0, dtype=np.complex128), 0.0, 1.0, np.zeros(0), False,
                              problem.mode, iv)
    u, s = _solve(sys.matrix, sys.rhs, problem.ridge)
    m = len(M)
    values = u[:m] + 1j * u[m:]
    residual = float(np.abs(sys.matrix @ u - sys.rhs).max())
    smin, smax = float(s.min()), float(s.max())
    condition = smax / smin if smin > 0 else math.inf
    ambiguous = bool(s.size < 2 * m or smin <= problem.rank_tol * smax or smin * smin <= problem.ridge)
    return RecoveryResult(M, values, residual, condition, s, ambiguous, problem.mode, iv)


# unknown gap -------------------------------------------------------------------

def ambiguity_bound(omega: float) -> int:
    """``floor(2 pi / Omega)``."""
    if not (0 < omega <= 2 * math.pi):
        raise ValueError("Omega must lie in (0, 2 pi]")
    return int(math.floor(2 * math.pi / omega * (1 + 1e-12)))


@dataclass(frozen=True)
class VariantsResult:
    """Distinct solutions over candidate gaps.

    ``solutions`` holds one representative per cluster, ``members`` the
    candidate indices of each cluster, ``candidates`` every accepted solve.
    """

    solutions: tuple[RecoveryResult, ...]
    members: tuple[tuple[int, ...], ...]
    candidates: tuple[RecoveryResult, ...]
    bound: int
    rejected: int
    cluster_tol: float

    @property
    def distinct(self) -> int:
        return len(self.solutions)


def cluster_solutions(results: Sequence[RecoveryResult], tol: float = 1e-4) -> list[list[int]]:
    """Greedy clustering: ``|u - v|_inf <= tol * max(|u|_inf, |v|_inf)``."""
    clusters: list[list[int]] = []
    for i, res in enumerate(results):
        for cl in clusters:
            ref = results[cl[0]].values
            scale = max(float(np.abs(ref).max(initial=0)), float(np.abs(res.values).max(initial=0)))
            if float(np.abs(ref - res.values).max(initial=0)) <= tol * max(scale, 1e-300):
                cl.append(i)
                break
        else:
            clusters.append([i])
    return clusters


def candidate_arcs(omega: float, step: float, anchor: float = 0.0):
    """Arcs ``(anchor + j step, anchor + j step + Omega)`` covering the circle once."""
    n = max(1, int(math.ceil(2 * math.pi / step - 1e-9)))
    return [arc(anchor + j * step, omega) for j in range(n)]


def recover_variants(observed: SignalSource, missing: Iterable[int], omega: float, gap_grid,
                     *, mode: str = "full", ridge: float = 0.0, residual_tol: float = 1e-8,
                     cluster_tol: float = 1e-4, n_bumps: int = 12, K: int = 4096,
                     workers: int | None = None, enforce_bound: bool = True) -> VariantsResult:
    """Solve for every candidate gap and count distinct solutions.

    ``gap_grid`` holds :class:`SpectralGap` objects or interval lists, each of
    measure at least ``omega``.  A candidate is accepted when its solve is
    unambiguous with residual at most ``residual_tol``.  Raises
    :class:`AmbiguityBoundError` if more than ``floor(2 pi / omega)`` distinct
    clusters appear (unless ``enforce_bound`` is false).
    """
    bound = ambiguity_bound(omega)
    M = tuple(sorted({int(t) for t in missing}))
    gaps = []
    for g in gap_grid:
        gap = g if isinstance(g, SpectralGap) else make_gap(g, n_bumps, K)
        if gap.measure < omega * (1 - 1e-12):
            raise ValueError(f"candidate gap {gap.intervals} has measure {gap.measure:.6g} < Omega")
        gaps.append(gap)

    def run(gap):
        return recover_missing(RecoveryProblem(observed, M, gap, mode, ridge))

    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(run, gaps))
    else:
        results = [run(g) for g in gaps]
    accepted = [r for r in results if not r.ambiguous and r.residual <= residual_tol]
    clusters = cluster_solutions(accepted, cluster_tol)
    out = VariantsResult(tuple(accepted[c[0]] for c in clusters), tuple(tuple(c) for c in clusters),
                         tuple(accepted), bound, len(results) - len(accepted), cluster_tol)
    if enforce_bound and out.distinct > bound:
        raise AmbiguityBoundError(f"{out.distinct} distinct solutions exceed the bound {bound}")
    return out
