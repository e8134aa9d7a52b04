import json
import math
import shutil
import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np
import pytest

from linfspec.gaps import gap_certificate, make_gap
from linfspec.harness import csvio, svg
from linfspec.harness.cli import main
from linfspec.harness.experiments import load_config
from linfspec.harness.generators import gen_band_limited, gen_exp_sum, gen_noise
from linfspec.signals import ExpSum, Samples
from linfspec.transfer import FilteredSamples, make_kernel, trapezoid_kernel, trapezoid_spectrum
from linfspec.wiener import make_wiener

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
P, Q = math.pi / 4, math.pi / 2


def write_config(tmp_path, data, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


# generators ---------------------------------------------------------------------------

def test_gen_exp_sum():
    x = gen_exp_sum([[1.0, 0.3], [[0.0, 2.0], -1.0]])
    a, w = x.tones()
    assert list(a) == [1, 2j] and list(w) == [0.3, -1.0]
    with pytest.raises(ValueError):
        gen_exp_sum([])
    with pytest.raises(ValueError):
        gen_exp_sum([[[1, 2, 3], 0.0]])


def test_gen_noise_is_deterministic_and_bounded():
    a, b = gen_noise(5, (-10, 10)), gen_noise(5, (-10, 10))
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, gen_noise(6, (-10, 10)).values)
    assert a.window == (-10, 10)
    big = gen_noise(1, (0, 999), amplitude=0.5)
    assert np.abs(big.values.real).max() <= 0.5 and np.abs(big.values.imag).max() <= 0.5


def test_band_limited_exp_sum_multiplies_tones():
    x = gen_band_limited(ExpSum([1, 1, 1], [0.3, 1.2, 2.9]), P, Q)
    a, w = x.tones()
    expect = trapezoid_spectrum(P, Q)(np.asarray(w))
    assert np.allclose(a, expect, rtol=0, atol=1e-15)
    assert a[0] == 1 and a[2] == 0


def test_band_limited_samples_shrink_window_and_certify_gap():
    base = gen_noise(7, (-2304, 2304))
    x = gen_band_limited(base, P, Q, 256)
    assert isinstance(x, FilteredSamples)
    assert x.window == (-2048, 2048)
    cert = gap_certificate(x, make_gap([(1.8, 3.0)], 6, K=1024))
    assert cert.certified and cert.residual <= cert.slack


# csv ----------------------------------------------------------------------------------

def test_series_round_trip_is_bit_identical(tmp_path):
    rng = np.random.default_rng(11)
    x = Samples(-50, rng.normal(size=101) * 1e-7 + 1j * rng.normal(size=101) * 1e5)
    csvio.write_series(tmp_path / "s.csv", x, meta={"seed": 11})
    y = csvio.read_series(tmp_path / "s.csv")
    assert y.window == x.window
    assert np.array_equal(y.values, x.values)
    assert y.filled == ()


def test_series_missing_column_is_named(tmp_path):
    (tmp_path / "s.csv").write_text("t,re\n0,1.0\n")
    with pytest.raises(csvio.CsvFormatError, match="'im'"):
        csvio.read_series(tmp_path / "s.csv")


def test_series_gaps_are_zero_filled(tmp_path):
    (tmp_path / "s.csv").write_text("# seed=1\nt,re,im\n3,1.0,0.0\n0,2.0,1.0\n")
    y = csvio.read_series(tmp_path / "s.csv")
    assert y.window == (0, 3)
    assert list(y.values) == [2 + 1j, 0, 0, 1]
    assert tuple(y.filled) == (1, 2)
    csvio.write_series(tmp_path / "back.csv", y)
    assert "zero_filled=2" in (tmp_path / "back.csv").read_text().splitlines()[0]


@pytest.mark.parametrize("body, match", [
    ("t,re,im\n0,1,0\n0,2,0\n", "line 3: duplicate time t=0"),
    ("t,re,im\n0,nan,0\n", "non-finite"),
    ("t,re,im\n0.5,1,0\n", "not an integer"),
    ("t,re,im\n0,1\n", "expected 3 fields"),
    ("t,re,im\n", "no data rows"),
])
def test_series_format_errors(tmp_path, body, match):
    (tmp_path / "s.csv").write_text(body)
    with pytest.raises(csvio.CsvFormatError, match=match):
        csvio.read_series(tmp_path / "s.csv")


def test_wiener_round_trip(tmp_path):
    f = make_wiener({-3: 0.1 + 0.2j, 5: -1e-300})
    csvio.write_wiener(tmp_path / "f.csv", f)
    g = csvio.read_wiener(tmp_path / "f.csv")
    assert g.offset == f.offset and np.array_equal(g.coeffs, f.coeffs)


def test_kernel_round_trip(tmp_path):
    h = trapezoid_kernel(P, Q, 32)
    csvio.write_kernel(tmp_path / "h.csv", h, {"seed": 3})
    g = csvio.read_kernel(tmp_path / "h.csv")
    assert np.array_equal(g.coeffs, h.coeffs) and g.offset == h.offset
    assert g.tail_bound == h.tail_bound and g.coeff_error == h.coeff_error
    assert g.causal == h.causal
    u = make_kernel({0: 1.0, 1: 0.5})
    csvio.write_kernel(tmp_path / "u.csv", u)
    assert csvio.read_kernel(tmp_path / "u.csv").tail_bound == u.tail_bound


# svg ----------------------------------------------------------------------------------

def test_line_chart_is_valid_svg(tmp_path):
    path = svg.line_chart({"a": ([0, 1, 2], [1.0, math.nan, 3.0]), "b": ([0, 1, 2], [1e-3, 1e-2, 0.0])},
                          tmp_path / "c.svg", title="t", logy=True)
    root = ET.parse(path).getroot()
    assert root.tag.endswith("svg")
    assert len([e for e in root.iter() if e.tag.endswith("polyline")]) == 2


# cli ----------------------------------------------------------------------------------

@pytest.mark.parametrize("name", sorted(p.name for p in CONFIGS.glob("*.json")))
def test_shipped_configs_run(tmp_path, name):
    kind = json.loads((CONFIGS / name).read_text())["kind"]
    sub = {"filter-demo": "filter", "predict-sweep": "predict"}.get(kind, kind)
    assert main([sub, "--config", str(CONFIGS / name), "--out", str(tmp_path / "out")]) == 0
    assert any((tmp_path / "out").glob("*.csv"))


def test_cli_config_errors(tmp_path, capsys):
    good = {"kind": "predict-sweep", "signal": {"type": "exp_sum", "terms": [[1, 0]]},
            "gamma": [], "K": 16, "N": 64}
    out = str(tmp_path / "o")
    assert main(["predict", "--config", write_config(tmp_path, good), "--out", out]) == 2
    assert "gamma" in capsys.readouterr().err
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["predict", "--config", str(bad), "--out", out]) == 2
    assert main(["recover", "--config", write_config(tmp_path, dict(good, gamma=[1])), "--out", out]) == 2
    assert main(["predict", "--config", str(tmp_path / "missing.json"), "--out", out]) == 2
    unknown = dict(good, gamma=[1], signal={"type": "bogus"})
    assert main(["predict", "--config", write_config(tmp_path, unknown), "--out", out]) == 2
    assert main(["predict"]) == 2


def test_cli_numerical_guard(tmp_path, capsys):
    cfg = {"kind": "predict-sweep", "signal": {"type": "exp_sum", "terms": [[1, 0]]},
           "gamma": [100], "K": 16, "N": 64}
    assert main(["predict", "--config", write_config(tmp_path, cfg), "--out", str(tmp_path / "o")]) == 1
    assert "numerical failure" in capsys.readouterr().err


def test_reruns_are_byte_identical(tmp_path):
    cfg = str(CONFIGS / "gen.json")
    for d in ("a", "b"):
        assert main(["gen", "--config", cfg, "--out", str(tmp_path / d)]) == 0
    for f in ("signal.csv", "meta.json", "signal.svg"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
    assert main(["gen", "--config", cfg, "--out", str(tmp_path / "c"), "--seed", "8", "--no-plots"]) == 0
    assert (tmp_path / "c" / "signal.csv").read_bytes() != (tmp_path / "a" / "signal.csv").read_bytes()
    assert not (tmp_path / "c" / "signal.svg").exists()


def test_gen_report_certifies_filtered_noise(tmp_path):
    assert main(["gen", "--config", str(CONFIGS / "gen.json"), "--out", str(tmp_path)]) == 0
    meta = json.loads((tmp_path / "meta.json").read_text())
    assert meta["seed"] == 7
    assert meta["gap"]["certified"] is True
    assert meta["degeneracy"]["route"] == "kernel" and meta["degeneracy"]["diverging"] is False


def test_predict_sweep_reports_oracle_and_measured(tmp_path):
    cfg = {"kind": "predict-sweep", "seed": 0, "signal": {"type": "exp_sum", "terms": [[1.0, 0.0]]},
           "gamma": [1, 4], "r": [0.5], "K": 256, "N": 4096, "times": [0, 8]}
    assert main(["predict", "--config", write_config(tmp_path, cfg), "--out", str(tmp_path / "o")]) == 0
    _, rows = csvio.read_table(tmp_path / "o" / "sweep.csv", ("gamma", "measured_err", "oracle_err"))
    assert len(rows) == 2
    for _, row in rows:
        g = float(row["gamma"])
        assert float(row["oracle_err"]) == pytest.approx(math.exp(-g / (2 - g ** -0.5)), rel=1e-13)
        assert abs(float(row["measured_err"]) - float(row["oracle_err"])) <= float(row["error_bound"])
    pred = csvio.read_table(tmp_path / "o" / "prediction_00.csv", ("t", "re_x", "re_xhat", "err"))[1]
    assert [int(r["t"]) for _, r in pred] == list(range(1, 10))


def test_csv_signal_relative_to_config(tmp_path):
    csvio.write_series(tmp_path / "x.csv", Samples(-40, np.exp(0.2j * np.arange(-40, 41))))
    cfg = {"kind": "spectrum", "signal": {"type": "csv", "path": "x.csv"}, "m": [8], "grid_size": 16}
    path = write_config(tmp_path, cfg)
    assert load_config(path).base_dir == tmp_path
    assert main(["spectrum", "--config", path, "--out", str(tmp_path / "o"), "--no-plots"]) == 0
    shutil.rmtree(tmp_path / "o")
    assert main(["spectrum", "--config", path, "--out", str(tmp_path / "o"), "--seed", "-1"]) == 2
