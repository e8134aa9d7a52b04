import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from linfspec.errors import CausalityError, GuardError, SaturationError, SingularityError
from linfspec.predictor import (PredictorConfig, hgamma_kernel, hgamma_log_value,
                                hgamma_series_coefficients, hgamma_series_kernel, hgamma_spectrum,
                                hgamma_value, predict_one_step, singular_point,
                                sinusoid_error_oracle)
from linfspec.quadrature import uniform_nodes
from linfspec.signals import ExpSum, Samples


def direct_h(g, r, z):
    return z * (1 - cmath.exp(-g / (z + 1 - g ** (-r))))


def test_hgamma_value_examples():
    assert hgamma_value(4, 0.5, 1).value == pytest.approx(1 - math.exp(-8 / 3), rel=1e-15)
    assert hgamma_value(4, 0.5, 1).value.real == pytest.approx(0.930517, abs=1e-6)
    assert hgamma_value(4, 0.5, -1).value.real == pytest.approx(math.exp(8) - 1, rel=1e-14)
    assert hgamma_value(4, 0.5, -1).value.real == pytest.approx(2979.958, abs=1e-3)
    for g, r in ((0.5, 0.3), (3.0, 0.9)):
        z = g ** (-r) - 1 + g
        v = hgamma_value(g, r, z)
        assert math.isfinite(abs(v.value))
        assert v.value == pytest.approx(direct_h(g, r, z), rel=1e-14)
        assert v.advance_error == pytest.approx(z - v.value, rel=1e-12, abs=1e-15)


def test_small_exponent_is_accurate():
    # U = 1 - exp(-g/d) with tiny g/d, where the naive form cancels
    e = -1e-12 / (2 - 1e-12 ** -0.5)
    v = hgamma_value(1e-12, 0.5, 1.0)
    assert v.U.real == pytest.approx(-math.expm1(e), rel=1e-14)
    z = cmath.exp(0.7j)
    e = -1e-9 / (z + 1 - 1e-9 ** -0.5)
    assert hgamma_value(1e-9, 0.5, z).U == pytest.approx(-e - e * e / 2, rel=1e-12)


def test_singularity_and_saturation():
    with pytest.raises(SingularityError):
        hgamma_value(4, 0.5, singular_point(4, 0.5))
    with pytest.raises(SaturationError) as err:
        hgamma_value(100, 0.5, -1)
    assert err.value.log_magnitude == pytest.approx(1000, rel=1e-12)
    la, _ = hgamma_log_value(100, 0.5, -1)
    assert la == pytest.approx(1000, rel=1e-12)
    la, ph = hgamma_log_value(4, 0.5, cmath.exp(2j))
    v = hgamma_value(4, 0.5, cmath.exp(2j)).value
    assert la == pytest.approx(math.log(abs(v)), rel=1e-13)
    assert ph == pytest.approx(cmath.phase(v), abs=1e-13)


def test_config_validation():
    for bad in (dict(gamma=0), dict(gamma=1, r=1), dict(gamma=1, omega_hat=-math.pi),
                dict(gamma=1, K=512, N=1024)):
        with pytest.raises(ValueError):
            PredictorConfig(**bad)
    assert PredictorConfig(4).shift == 0 and PredictorConfig(4).log_peak == 8


def test_kernel_gamma4_is_causal_and_matches_spectrum():
    cfg = PredictorConfig(4, 0.5, K=512, N=1 << 16)
    h = hgamma_kernel(cfg, 1e-8)
    assert h.causal_residual <= 1e-8 and h.causal == "numeric"
    assert abs(h.spectrum(0.0) - hgamma_value(4, 0.5, 1).value) <= h.tail_bound + h.coeff_error
    assert h.spectrum(0.0).real == pytest.approx(0.930517, abs=1e-6)
    w = uniform_nodes(64)
    recon = h.spectrum(w)
    assert np.abs(recon - hgamma_spectrum(4, 0.5)(w)).max() <= h.tail_bound + h.coeff_error


def test_kernel_gamma1_causal_at_tight_tolerance():
    h = hgamma_kernel(PredictorConfig(1, 0.5), 1e-10)
    assert h.causal_residual <= 1e-10


def test_causality_failure_is_reported():
    cfg = PredictorConfig(4, 0.5, K=512, N=1 << 16)
    res = hgamma_kernel(cfg, 1e-8).causal_residual
    assert res > 0
    with pytest.raises(CausalityError) as err:
        hgamma_kernel(cfg, res / 10)
    assert err.value.residual == res


def test_guard():
    with pytest.raises(GuardError):
        hgamma_kernel(PredictorConfig(100, 0.5, K=16, N=64))


def test_series_oracle_matches_quadrature():
    for g, r in ((1, 0.5), (2, 0.25), (2, 0.75)):
        series = hgamma_series_coefficients(g, r, 64)
        h = hgamma_kernel(PredictorConfig(g, r))
        diff = max(abs(complex(s) - h.coefficient(k)) for k, s in enumerate(series))
        assert diff <= h.coeff_error


def test_series_kernel_is_structurally_causal():
    h = hgamma_series_kernel(1.5, 0.5, 32)
    assert h.causal == "proven" and h.support == (0, 32)
    # first coefficient: -e_1 = g
    assert h.coefficient(0) == pytest.approx(1.5, rel=1e-15)


def test_predict_zero():
    run = predict_one_step(ExpSum([0.0], [0.0]), PredictorConfig(4), np.arange(5))
    assert np.all(run.predicted == 0)
    assert np.all(run.per_step_error == 0)


@pytest.mark.parametrize("w0, expect", [(0.0, math.exp(-8 / 3)), (math.pi / 2, math.exp(-1.6))])
def test_predict_single_tones(w0, expect):
    cfg = PredictorConfig(4, 0.5)
    run = predict_one_step(ExpSum.tone(w0), cfg, np.arange(-30, 31))
    assert sinusoid_error_oracle(w0, cfg) == pytest.approx(expect, rel=1e-13)
    assert np.abs(run.per_step_error - expect).max() <= run.error_bound
    assert np.ptp(run.per_step_error) <= 2 * run.error_bound


def test_error_oracle_values():
    # frozen from a 30-digit evaluation of exp(-g / (2 - g^-1/2))
    frozen = [0.367879441171442321, 0.212903096952080248, 0.0694834512228015348, 0.00775863443286766663]
    got = [sinusoid_error_oracle(0.0, PredictorConfig(g)) for g in (1, 2, 4, 8)]
    assert got == pytest.approx(frozen, rel=1e-14)
    assert all(a > b for a, b in zip(got, got[1:]))


def test_error_oracle_is_monotone_in_real_part():
    cfg = PredictorConfig(4, 0.5, omega_hat=1.0)
    th = np.linspace(0, 3.0, 31)
    errs = [sinusoid_error_oracle(1.0 - math.pi + t, cfg) for t in th]
    re = [(1 / (cmath.exp(1j * t) + 1 - 0.5)).real for t in th]
    order_e = np.argsort(errs)
    order_r = np.argsort(re)[::-1]
    assert np.array_equal(order_e, order_r)


def test_prediction_window_edges():
    cfg = PredictorConfig(1, 0.5, K=32, N=256)
    x = Samples(0, np.exp(0.3j * np.arange(100)))
    run = predict_one_step(x, cfg, np.arange(32, 100))
    assert np.isnan(run.per_step_error[-1])
    assert np.all(np.isfinite(run.per_step_error[:-1]))
    oracle = sinusoid_error_oracle(0.3, cfg)
    assert np.abs(run.per_step_error[:-1] - oracle).max() <= run.error_bound


@settings(max_examples=25, deadline=None)
@given(st.floats(-3.0, 3.0), st.floats(-1.0, 1.0), st.floats(-0.8, 0.8))
def test_modulation_covariance(w0, w_hat, delta):
    a = PredictorConfig(1.5, 0.5, omega_hat=w_hat, K=64, N=1024)
    b = PredictorConfig(1.5, 0.5, omega_hat=w_hat + delta, K=64, N=1024)
    t = np.arange(0, 10)
    ra = predict_one_step(ExpSum.tone(w0), a, t)
    w1 = math.remainder(w0 + delta, 2 * math.pi)
    rb = predict_one_step(ExpSum.tone(w1 if w1 != -math.pi else math.pi), b, t)
    assert np.abs(ra.per_step_error - rb.per_step_error).max() <= ra.error_bound + rb.error_bound
