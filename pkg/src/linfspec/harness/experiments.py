"""Experiment configs and runners.

A config is a JSON object with a ``kind``, a ``signal`` spec, a ``seed`` and
kind-specific parameters (see ``configs/`` for one example per kind).  Every
runner writes CSV reports (and optional SVG plots) into an output directory
and returns the written paths.  Outputs depend only on the config and the
seed, so reruns are byte-identical.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from ..degeneracy import DegeneracyWeight, degeneracy_norm
from ..errors import ConfigError
from ..gaps import gap_certificate, make_gap
from ..predictor import PredictorConfig, hgamma_kernel, predict_one_step, sinusoid_error_oracle
from ..recovery import Masked, RecoveryProblem, candidate_arcs, recover_missing, recover_variants
from ..signals import ExpSum, SignalSource
from ..transfer import apply_transfer, spectral_response, trapezoid_kernel
from ..wiener import partial_spectrum
from . import csvio, generators, svg

KINDS = ("gen", "filter-demo", "predict-sweep", "recover", "recover-variants", "spectrum")
SUBCOMMANDS = {"gen": "gen", "filter": "filter-demo", "predict": "predict-sweep",
               "recover": "recover", "recover-variants": "recover-variants", "spectrum": "spectrum"}


@dataclass
class ExperimentConfig:
    kind: str
    signal: dict
    params: dict = field(default_factory=dict)
    seed: int = 0
    plots: bool = True
    workers: int = 1
    base_dir: Path = Path(".")


def load_config(source, kind: str | None = None, seed: int | None = None) -> ExperimentConfig:
    """Parse a config from a path or a dict; ``kind``/``seed`` override the file."""
    base = Path(".")
    if isinstance(source, (str, Path)):
        path = Path(source)
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from None
        base = path.parent
    else:
        data = dict(source)
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    k = kind or data.get("kind")
    if k is None:
        raise ConfigError("config has no 'kind'")
    if kind is not None and data.get("kind") not in (None, kind):
        raise ConfigError(f"config kind {data.get('kind')!r} does not match subcommand kind {kind!r}")
    if k not in KINDS:
        raise ConfigError(f"unknown kind {k!r}; expected one of {KINDS}")
    if "signal" not in data or not isinstance(data["signal"], dict):
        raise ConfigError("config needs a 'signal' object")
    s = data.get("seed", 0) if seed is None else seed
    try:
        s = int(s)
    except (TypeError, ValueError):
        raise ConfigError(f"seed must be an integer, got {s!r}") from None
    if not 0 <= s < 2 ** 64:
        raise ConfigError("seed must be a 64-bit unsigned integer")
    params = {key: v for key, v in data.items()
              if key not in ("kind", "signal", "seed", "plots", "workers")}
    workers = data.get("workers", 1)
    if not isinstance(workers, int) or workers < 1:
        raise ConfigError("workers must be a positive integer")
    return ExperimentConfig(k, data["signal"], params, s, bool(data.get("plots", True)), workers, base)


# signal specs ------------------------------------------------------------------------

def _req(spec: dict, key: str, where: str):
    if key not in spec:
        raise ConfigError(f"{where}: missing field '{key}'")
    return spec[key]


def build_signal(spec: dict, seed: int = 0, base_dir: Path = Path(".")) -> SignalSource:
    """Instantiate a signal spec (schemas in ``configs/README.md``)."""
    kind = spec.get("type")
    where = f"signal type {kind!r}"
    if kind == "exp_sum":
        return generators.gen_exp_sum(_req(spec, "terms", where))
    if kind == "noise":
        return generators.gen_noise(spec.get("seed", seed), _req(spec, "window", where),
                                    spec.get("amplitude", 1.0))
    if kind == "filtered_noise":
        K = int(_req(spec, "K", where))
        lo, hi = _req(spec, "window", where)
        noise = generators.gen_noise(spec.get("seed", seed), (lo - K, hi + K), spec.get("amplitude", 1.0))
        return generators.gen_band_limited(noise, float(_req(spec, "p", where)),
                                           float(_req(spec, "q", where)), K)
    if kind == "band_limited":
        base = build_signal(_req(spec, "base", where), seed, base_dir)
        K = spec.get("K")
        return generators.gen_band_limited(base, float(_req(spec, "p", where)),
                                           float(_req(spec, "q", where)), None if K is None else int(K))
    if kind == "degenerate":
        prof = spec.get("profile")
        profile = generators.profile_from_coefficients(
            {int(k): complex(re, im) for k, re, im in prof} if prof else None)
        return generators.gen_degenerate(float(_req(spec, "omega_hat", where)), float(spec.get("c", 1.0)),
                                         float(spec.get("q_exp", 2.0)), profile, int(spec.get("N", 1 << 12)))
    if kind == "ambiguous_pair":
        y = {int(t): complex(re, im) for t, re, im in _req(spec, "y", where)}
        x1, x2 = generators.gen_ambiguous_pair(y, tuple(_req(spec, "gap1", where)),
                                               tuple(_req(spec, "gap2", where)), int(spec.get("N", 1 << 14)))
        member = spec.get("member", 1)
        if member not in (1, 2):
            raise ConfigError(f"{where}: member must be 1 or 2")
        return x1 if member == 1 else x2
    if kind == "csv":
        return csvio.read_series(base_dir / _req(spec, "path", where))
    raise ConfigError(f"unknown signal type {kind!r}")


# helpers -----------------------------------------------------------------------------

def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, complex):
        return [v.real, v.imag]
    return v


def write_json(path: Path, data: dict) -> Path:
    path.write_text(json.dumps(_jsonable(data), indent=2, sort_keys=True) + "\n")
    return path


def _times(params: dict, key: str, default: tuple[int, int]) -> np.ndarray:
    lo, hi = params.get(key, default)
    lo, hi = int(lo), int(hi)
    if hi < lo:
        raise ConfigError(f"'{key}' range [{lo}, {hi}] is empty")
    return np.arange(lo, hi + 1)


def _nonempty(params: dict, key: str, default=None) -> list:
    v = params.get(key, default)
    if v is None:
        raise ConfigError(f"missing parameter '{key}'")
    if not isinstance(v, list):
        v = [v]
    if not v:
        raise ConfigError(f"parameter grid '{key}' is empty")
    return v


def _map(fn: Callable, items: list, workers: int) -> list:
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(fn, items))
    return [fn(i) for i in items]


def _build_gap(spec: dict):
    if not isinstance(spec, dict):
        raise ConfigError("'gap' must be an object with 'intervals'")
    return make_gap(_req(spec, "intervals", "gap"), int(spec.get("n_bumps", 12)),
                    int(spec.get("K", 4096)), power=int(spec.get("power", 3)))


# runners -----------------------------------------------------------------------------

def run_gen(cfg: ExperimentConfig, x: SignalSource, out: Path) -> list[Path]:
    t = _times(cfg.params, "window", x.window or (-64, 64))
    meta = {"seed": cfg.seed, "signal": cfg.signal.get("type")}
    files = [csvio.write_series(out / "signal.csv", x, t, meta)]
    report: dict[str, Any] = {"seed": cfg.seed, "signal": cfg.signal, "sup_bound": x.sup_bound}
    if "gap" in cfg.params:
        D = _build_gap(cfg.params["gap"])
        cert = gap_certificate(x, D) if x.window is None or x.covers(-D.K, D.K) else None
        report["gap"] = {"intervals": D.intervals, "bank_leakage": D.bank_leakage,
                         "residual": None if cert is None else cert.residual,
                         "slack": None if cert is None else cert.slack,
                         "certified": None if cert is None else cert.certified}
    if "degeneracy" in cfg.params:
        d = cfg.params["degeneracy"]
        w = DegeneracyWeight(float(_req(d, "omega_hat", "degeneracy")), float(d.get("c", 1.0)),
                             float(d.get("q_exp", 2.0)))
        rep = degeneracy_norm(x, w, _nonempty(d, "nu", [0.5, 0.1, 0.02]), K=int(d.get("K", 256)))
        report["degeneracy"] = {"nu": rep.nus, "values": rep.values, "upper": rep.upper,
                                "error_bounds": rep.error_bounds, "route": rep.route,
                                "diverging": rep.diverging}
    files.append(write_json(out / "meta.json", report))
    if cfg.plots:
        v = x.sample(t)
        files.append(svg.line_chart({"Re x": (t, v.real), "Im x": (t, v.imag)}, out / "signal.svg",
                                    title="generated signal", xlabel="t", ylabel="x(t)"))
    return files


def _kernel_from_spec(spec: dict):
    kind = spec.get("type", "trapezoid")
    if kind == "trapezoid":
        return trapezoid_kernel(float(_req(spec, "p", "filter")), float(_req(spec, "q", "filter")),
                                int(spec.get("K", 256)))
    if kind == "hgamma":
        pc = PredictorConfig(float(_req(spec, "gamma", "filter")), float(spec.get("r", 0.5)),
                             float(spec.get("omega_hat", math.pi)), int(spec.get("K", 512)),
                             int(spec.get("N", 1 << 16)))
        return hgamma_kernel(pc, float(spec.get("causal_tol", 1e-8)))
    if kind == "csv":
        return csvio.read_kernel(_req(spec, "path", "filter"))
    raise ConfigError(f"unknown filter type {kind!r}")


def run_filter(cfg: ExperimentConfig, x: SignalSource, out: Path) -> list[Path]:
    spec = dict(_req(cfg.params, "filter", "filter-demo"))
    if spec.get("type") == "csv":
        spec["path"] = str(cfg.base_dir / spec["path"])
    h = _kernel_from_spec(spec)
    t = _times(cfg.params, "times", (-32, 32))
    res = apply_transfer(h, x, t)
    meta = {"seed": cfg.seed, "error_bound": "unavailable" if res.error_bound is None else res.error_bound}
    files = [csvio.write_kernel(out / "kernel.csv", h, {"seed": cfg.seed}),
             csvio.write_table(out / "filtered.csv", ("t", "re", "im"),
                               ((int(a), v.real, v.imag) for a, v in zip(t, res.values)), meta)]
    report = {"seed": cfg.seed, "kernel": h.label, "l1": h.l1, "tail_bound": h.tail_bound,
              "coeff_error": h.coeff_error, "causal": h.causal, "error_bound": res.error_bound}
    if isinstance(x, ExpSum):
        a, w = x.tones()
        exact = spectral_response(h, a, w, t)
        report["eigenrelation_deviation"] = float(np.abs(exact - res.values).max())
    files.append(write_json(out / "meta.json", report))
    if cfg.plots:
        files.append(svg.line_chart({"|x|": (t, np.abs(x.sample(t))), "|filtered|": (t, np.abs(res.values))},
                                    out / "filtered.svg", title=h.label, xlabel="t"))
    return files


def _oracle(x: SignalSource, pc: PredictorConfig) -> float:
    if not hasattr(x, "tones"):
        return math.nan
    a, w = x.tones()
    return math.fsum(abs(ak) * sinusoid_error_oracle(float(wk), pc) for ak, wk in zip(a, w) if ak != 0)


def run_predict(cfg: ExperimentConfig, x: SignalSource, out: Path) -> list[Path]:
    p = cfg.params
    gammas = [float(g) for g in _nonempty(p, "gamma")]
    rs = [float(r) for r in _nonempty(p, "r", [0.5])]
    omega_hat = float(p.get("omega_hat", math.pi))
    K, N = int(p.get("K", 512)), int(p.get("N", 1 << 16))
    t = _times(p, "times", (0, 16))
    cells = [PredictorConfig(g, r, omega_hat, K, N) for r in rs for g in gammas]
    tol = float(p.get("causal_tol", 1e-8))

    def run(pc):
        return pc, predict_one_step(x, pc, t, causal_tol=tol)

    results = _map(run, cells, cfg.workers)
    tones = x.tones()[1] if hasattr(x, "tones") and len(x.tones()[1]) == 1 else None
    omega0 = float(tones[0]) if tones is not None else math.nan
    rows, files = [], []
    for i, (pc, run_) in enumerate(results):
        measured = float(np.nanmax(run_.per_step_error)) if np.isfinite(run_.per_step_error).any() else math.nan
        oracle = _oracle(x, pc)
        rows.append((pc.gamma, pc.r, omega0, measured, oracle, run_.kernel_tail, run_.error_bound))
        truth = np.full(t.shape, np.nan, dtype=np.complex128)
        ok = np.isfinite(run_.per_step_error)
        truth[ok] = x.sample(t[ok] + 1)
        files.append(csvio.write_table(
            out / f"prediction_{i:02d}.csv", ("t", "re_x", "im_x", "re_xhat", "im_xhat", "err"),
            ((int(a), xv.real, xv.imag, v.real, v.imag, e)
             for a, xv, v, e in zip(t + 1, truth, run_.predicted, run_.per_step_error)),
            {"seed": cfg.seed, "gamma": pc.gamma, "r": pc.r, "omega_hat": pc.omega_hat,
             "note": "row t holds x(t) and its prediction from samples up to t-1"}))
    files.insert(0, csvio.write_table(
        out / "sweep.csv", ("gamma", "r", "omega0", "measured_err", "oracle_err", "kernel_tail", "error_bound"),
        rows, {"seed": cfg.seed, "omega_hat": omega_hat, "K": K, "N": N}))
    if cfg.plots:
        series = {}
        for r in rs:
            sel = [row for row in rows if row[1] == r]
            series[f"measured r={r:g}"] = ([s[0] for s in sel], [s[3] for s in sel])
            series[f"oracle r={r:g}"] = ([s[0] for s in sel], [s[4] for s in sel])
        files.append(svg.line_chart(series, out / "sweep.svg", title="one-step prediction error",
                                    xlabel="gamma", ylabel="max error", logy=True))
    return files


def run_recover(cfg: ExperimentConfig, x: SignalSource, out: Path) -> list[Path]:
    p = cfg.params
    M = [int(v) for v in p.get("missing", [])]
    D = _build_gap(_req(p, "gap", "recover"))
    prob = RecoveryProblem(Masked(x, M), tuple(M), D, p.get("mode", "full"), float(p.get("ridge", 0.0)))
    res = recover_missing(prob)
    truth = x.sample(list(res.times)) if res.times else np.zeros(0)
    err = np.abs(truth - res.values)
    files = [csvio.write_table(out / "recovery.csv", ("t", "re", "im", "residual"),
                               ((t, v.real, v.imag, res.residual) for t, v in zip(res.times, res.values)),
                               {"seed": cfg.seed, "mode": res.mode})]
    files.append(write_json(out / "diagnostics.json", {
        "seed": cfg.seed, "mode": res.mode, "residual": res.residual, "condition": res.condition,
        "ambiguous": res.ambiguous, "bank_leakage": D.bank_leakage, "gap": D.intervals,
        "max_error_vs_input": float(err.max()) if err.size else 0.0,
        "singular_values": list(res.singular_values)}))
    return files


def run_recover_variants(cfg: ExperimentConfig, x: SignalSource, out: Path) -> list[Path]:
    p = cfg.params
    M = [int(v) for v in _req(p, "missing", "recover-variants")]
    omega = float(_req(p, "omega", "recover-variants"))
    if "gaps" in p:
        grid = [[tuple(iv) for iv in g] for g in p["gaps"]]
    else:
        g = p.get("grid", {})
        grid = candidate_arcs(omega, float(g.get("step", 0.1)), float(g.get("anchor", 0.0)))
    res = recover_variants(Masked(x, M), M, omega, grid, mode=p.get("mode", "full"),
                           ridge=float(p.get("ridge", 0.0)), residual_tol=float(p.get("residual_tol", 1e-8)),
                           cluster_tol=float(p.get("cluster_tol", 1e-4)), n_bumps=int(p.get("n_bumps", 12)),
                           K=int(p.get("K", 4096)), workers=cfg.workers)
    rows = []
    for c, sol in enumerate(res.solutions):
        for t, v in zip(sol.times, sol.values):
            rows.append((c, t, v.real, v.imag, sol.residual))
    files = [csvio.write_table(out / "variants.csv", ("cluster", "t", "re", "im", "residual"), rows,
                               {"seed": cfg.seed, "bound": res.bound, "distinct": res.distinct})]
    files.append(write_json(out / "diagnostics.json", {
        "seed": cfg.seed, "omega": omega, "bound": res.bound, "distinct": res.distinct,
        "candidates": len(grid), "accepted": len(res.candidates), "rejected": res.rejected,
        "cluster_tol": res.cluster_tol,
        "clusters": [{"gaps": [res.candidates[i].gap for i in m]} for m in res.members]}))
    return files


def run_spectrum(cfg: ExperimentConfig, x: SignalSource, out: Path) -> list[Path]:
    p = cfg.params
    ms = [int(m) for m in _nonempty(p, "m", [16])]
    n = int(p.get("grid_size", 512))
    if n < 1:
        raise ConfigError("grid_size must be positive")
    grid = -np.pi + 2 * np.pi * np.arange(n) / n
    vals = _map(lambda m: partial_spectrum(x, m, grid), ms, cfg.workers)
    rows = [(m, w, v.real, v.imag) for m, V in zip(ms, vals) for w, v in zip(grid, V)]
    files = [csvio.write_table(out / "spectrum.csv", ("m", "omega", "re", "im"), rows, {"seed": cfg.seed})]
    if cfg.plots:
        files.append(svg.line_chart({f"|X_{m}|": (grid, np.abs(V)) for m, V in zip(ms, vals)},
                                    out / "spectrum.svg", title="partial spectra", xlabel="omega"))
    return files


RUNNERS = {"gen": run_gen, "filter-demo": run_filter, "predict-sweep": run_predict,
           "recover": run_recover, "recover-variants": run_recover_variants, "spectrum": run_spectrum}


def run_experiment(cfg: ExperimentConfig, out_dir) -> list[Path]:
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {out}: {exc}") from None
    x = build_signal(cfg.signal, cfg.seed, cfg.base_dir)
    return RUNNERS[cfg.kind](cfg, x, out)
