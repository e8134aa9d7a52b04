"""CSV interchange for series, Wiener functions, kernels and reports.

Floats are written with ``repr`` so a write-then-read round trip is
bit-identical.  Metadata lines start with ``#`` and hold ``key=value`` pairs
separated by ``; ``.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from ..signals import Samples, SignalSource
from ..transfer import Kernel
from ..wiener import WienerFunction


class CsvFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return str(int(v))
    if v is None:
        return ""
    return str(v)


def format_meta(meta: Mapping[str, object]) -> str:
    return "# " + "; ".join(f"{k}={_fmt(v)}" for k, v in meta.items())


def parse_meta(line: str) -> dict[str, str]:
    out = {}
    for part in line.lstrip("#").strip().split(";"):
        if "=" in part:
            k, v = part.split("=", 1)
            out[k.strip()] = v.strip()
    return out


def write_table(path, header: Sequence[str], rows: Iterable[Sequence], meta: Mapping | None = None) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        if meta:
            fh.write(format_meta(meta) + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def read_table(path, required: Sequence[str]) -> tuple[dict[str, str], list[tuple[int, dict[str, str]]]]:
    """Rows as dicts with their 1-based line numbers, plus merged metadata."""
    meta: dict[str, str] = {}
    rows = []
    header = None
    with open(path, newline="") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            if line.startswith("#"):
                meta.update(parse_meta(line))
                continue
            cells = next(csv.reader([line]))
            if header is None:
                header = [c.strip() for c in cells]
                for col in required:
                    if col not in header:
                        raise CsvFormatError(f"missing column '{col}'", lineno)
                continue
            if len(cells) != len(header):
                raise CsvFormatError(f"expected {len(header)} fields, got {len(cells)}", lineno)
            rows.append((lineno, dict(zip(header, (c.strip() for c in cells)))))
    if header is None:
        raise CsvFormatError(f"no header row (need columns {', '.join(required)})")
    return meta, rows


def _int(s: str, line: int, col: str) -> int:
    try:
        return int(s)
    except ValueError:
        raise CsvFormatError(f"column '{col}': {s!r} is not an integer", line) from None


def _float(s: str, line: int, col: str) -> float:
    try:
        v = float(s)
    except ValueError:
        raise CsvFormatError(f"column '{col}': {s!r} is not a number", line) from None
    if not math.isfinite(v):
        raise CsvFormatError(f"column '{col}': non-finite value {s!r}", line)
    return v


# series --------------------------------------------------------------------------

def write_series(path, x: SignalSource, times=None, meta: Mapping | None = None) -> Path:
    """Write ``(t, re, im)`` rows; ``times`` defaults to the window of ``x``."""
    if times is None:
        if x.window is None:
            raise ValueError("times are required for sources without a window")
        times = np.arange(x.window[0], x.window[1] + 1)
    t = np.asarray(times, dtype=np.int64)
    v = x.sample(t)
    meta = dict(meta or {})
    filled = getattr(x, "filled", ())
    if filled:
        meta["zero_filled"] = len(filled)
    return write_table(path, ("t", "re", "im"), ((int(a), b.real, b.imag) for a, b in zip(t, v)), meta)


def read_series(path) -> Samples:
    """Read ``(t, re, im)`` rows into :class:`Samples`.

    Rows may come in any order.  Missing times inside ``[min t, max t]`` are
    zero-filled and listed in :attr:`Samples.filled`; duplicates are errors.
    """
    _, rows = read_table(path, ("t", "re", "im"))
    if not rows:
        raise CsvFormatError("series has no data rows")
    data = {}
    for line, row in rows:
        t = _int(row["t"], line, "t")
        if t in data:
            raise CsvFormatError(f"duplicate time t={t}", line)
        data[t] = complex(_float(row["re"], line, "re"), _float(row["im"], line, "im"))
    lo, hi = min(data), max(data)
    values = np.zeros(hi - lo + 1, dtype=np.complex128)
    filled = []
    for t in range(lo, hi + 1):
        if t in data:
            values[t - lo] = data[t]
        else:
            filled.append(t)
    return Samples(lo, values, filled)


# Wiener functions and kernels -------------------------------------------------------

def write_wiener(path, f: WienerFunction, meta: Mapping | None = None) -> Path:
    return write_table(path, ("k", "re", "im"),
                       ((int(k), c.real, c.imag) for k, c in zip(f.indices, f.coeffs)), meta)


def _read_coefficients(path) -> tuple[dict[str, str], int, np.ndarray]:
    meta, rows = read_table(path, ("k", "re", "im"))
    data = {}
    for line, row in rows:
        k = _int(row["k"], line, "k")
        if k in data:
            raise CsvFormatError(f"duplicate index k={k}", line)
        data[k] = complex(_float(row["re"], line, "re"), _float(row["im"], line, "im"))
    if not data:
        return meta, 0, np.zeros(0, dtype=np.complex128)
    lo, hi = min(data), max(data)
    dense = np.zeros(hi - lo + 1, dtype=np.complex128)
    for k, v in data.items():
        dense[k - lo] = v
    return meta, lo, dense


def read_wiener(path) -> WienerFunction:
    _, lo, dense = _read_coefficients(path)
    return WienerFunction(lo, dense)


def write_kernel(path, h: Kernel, meta: Mapping | None = None) -> Path:
    m = {"tail_bound": "unknown" if h.tail_bound is None else h.tail_bound,
         "coeff_error": h.coeff_error, "causal": h.causal,
         "causal_residual": h.causal_residual}
    if h.causal_tol is not None:
        m["causal_tol"] = h.causal_tol
    if h.label:
        m["label"] = h.label.replace(";", ",")
    m.update(meta or {})
    return write_table(path, ("k", "re", "im"),
                       ((int(k), c.real, c.imag) for k, c in zip(h.indices, h.coeffs)), m)


def read_kernel(path) -> Kernel:
    meta, lo, dense = _read_coefficients(path)
    tail = meta.get("tail_bound", "unknown")
    causal = meta.get("causal", "no")
    tol = meta.get("causal_tol")
    if causal == "proven" and lo < 0:
        if np.any(dense[:-lo]):
            raise CsvFormatError("kernel marked proven-causal has negative-index coefficients")
        dense, lo = dense[-lo:], 0
    return Kernel(lo, dense, None if tail == "unknown" else float(tail),
                  float(meta.get("coeff_error", 0.0)), causal,
                  None if tol is None else float(tol), meta.get("label", ""))
