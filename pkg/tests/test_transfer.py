import math

import gmpy2
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from linfspec.errors import CausalityError, NonFiniteError, WindowError
from linfspec.quadrature import (check_grid, kernel_coefficients, mp_kernel_coefficients,
                                 standard_coefficients, uniform_nodes)
from linfspec.signals import ExpSum, Samples
from linfspec.transfer import (NOT_CAUSAL, NUMERIC, PROVEN, Kernel, apply_transfer, is_causal,
                               kernel_from_spectrum, make_kernel, mark_causal, spectral_response,
                               trapezoid_coefficients, trapezoid_kernel, trapezoid_spectrum,
                               trapezoid_tail)
from linfspec.wiener import evaluate

P, Q = math.pi / 4, math.pi / 2


# quadrature ---------------------------------------------------------------------

def test_check_grid():
    check_grid(1 << 10, 256)
    with pytest.raises(ValueError):
        check_grid(1000)
    with pytest.raises(ValueError):
        check_grid(1 << 10, 257)


def test_coefficient_conventions_on_exponentials():
    n = 64
    w = uniform_nodes(n)
    k = np.arange(-n // 2, n // 2)
    h = kernel_coefficients(np.exp(-3j * w))
    assert np.allclose(h, k == 3, atol=1e-15)
    f = standard_coefficients(np.exp(-3j * w))
    assert np.allclose(f, k == -3, atol=1e-15)


def test_extended_precision_matches_double_for_mild_spectrum():
    n = 64

    def H(z):
        return z * z + gmpy2.mpfr(1) / 2

    c = mp_kernel_coefficients(H, n, 200)
    k = np.arange(-n // 2, n // 2)
    assert np.allclose(c, np.where(k == -2, 1.0, 0.0) + np.where(k == 0, 0.5, 0.0), atol=1e-30)


# kernel_from_spectrum ---------------------------------------------------------------

def test_kernel_from_constant_and_delay():
    h = kernel_from_spectrum(lambda w: np.ones_like(w), 16, 64)
    assert h.coefficient(0) == pytest.approx(1, abs=1e-15)
    assert np.abs(np.delete(h.coeffs, 16)).max() <= 1e-15
    d = kernel_from_spectrum(lambda w: np.exp(-1j * w), 16, 64)
    assert d.coefficient(1) == pytest.approx(1, abs=1e-15)
    assert np.abs(np.delete(d.coeffs, 17)).max() <= 1e-15


def test_kernel_from_spectrum_rejects_bad_input():
    with pytest.raises(ValueError):
        kernel_from_spectrum(lambda w: np.ones_like(w), 32, 64)
    with pytest.raises(NonFiniteError):
        kernel_from_spectrum(lambda w: 1 / (w - w[5]), 4, 64)


def test_trapezoid_quadrature_equals_aliased_closed_form():
    # The uniform rule returns sum_m c_{k + m N}; the profile has kinks, so this
    # differs from c_k by O(N^-2) and is checked exactly against the aliased sum.
    K, N = 256, 1 << 14
    h = kernel_from_spectrum(trapezoid_spectrum(P, Q), K, N)
    k = np.arange(-K, K + 1)
    # cos(pk) - cos(qk) is N-periodic here, and sum_m (k + m N)^-2 = (pi / (N sin(pi k / N)))^2
    num = np.cos(P * k) - np.cos(Q * k)
    with np.errstate(divide="ignore", invalid="ignore"):
        aliased = num / (math.pi * (Q - P)) * (math.pi / (N * np.sin(math.pi * k / N))) ** 2
    aliased[k == 0] = (P + Q) / (2 * math.pi)
    assert np.abs(h.coeffs - aliased).max() <= 1e-15
    direct = trapezoid_coefficients(P, Q, k)
    assert np.abs(h.coeffs - direct).max() <= 1e-8
    assert np.abs(h.coeffs - direct).max() <= h.coeff_error


def test_trapezoid_quadrature_converges_to_closed_form():
    K = 256
    h = kernel_from_spectrum(trapezoid_spectrum(P, Q), K, 1 << 18)
    assert np.abs(h.coeffs - trapezoid_kernel(P, Q, K).coeffs).max() <= 1e-10


def test_spectrum_round_trip_on_grid():
    def H(w):
        return 1 / (1.5 - np.cos(w)) + 0.2j * np.sin(2 * w)

    K, N = 64, 256
    h = kernel_from_spectrum(H, K, N)
    w = uniform_nodes(N)
    assert np.abs(h.spectrum(w) - H(w)).max() <= h.tail_bound + h.coeff_error
    assert np.abs(h.spectrum(w) - H(w)).max() <= 1e-12


# trapezoid ---------------------------------------------------------------------------

def test_trapezoid_examples():
    h = trapezoid_kernel(P, Q, 256)
    assert h.coefficient(0) == 0.375
    assert h.coefficient(1).real == pytest.approx(math.cos(P) / (math.pi * (Q - P)), rel=1e-15)
    assert h.coefficient(1).real == pytest.approx(0.286580, abs=1e-6)
    assert all(h.coefficient(k) == h.coefficient(-k) for k in range(257))
    with pytest.raises(ValueError):
        trapezoid_kernel(Q, P, 8)


def test_trapezoid_tail_bounds():
    for K in (16, 64, 256):
        tail = trapezoid_tail(P, Q, K)
        assert tail <= 4 / (math.pi * (Q - P) * K)
        k = np.arange(K + 1, K + 200001)
        assert 2 * np.abs(trapezoid_coefficients(P, Q, k)).sum() <= tail


def test_truncated_trapezoid_at_zero():
    h = trapezoid_kernel(P, Q, 256)
    assert abs(h.spectrum(0.0) - 1) <= h.tail_bound
    f = h.as_wiener()
    assert abs(evaluate(f, 0.0) - 1) <= h.tail_bound


# apply_transfer ----------------------------------------------------------------------

def test_identity_and_delay():
    x = ExpSum([1, 0.3j], [0.2, -1.1])
    t = np.arange(-5, 6)
    r = apply_transfer(make_kernel({0: 1}), x, t)
    assert np.array_equal(r.values, x.sample(t))
    d = apply_transfer(make_kernel({1: 1}), x, t)
    assert np.array_equal(d.values, x.sample(t - 1))
    s = Samples(0, np.arange(10.0))
    assert np.array_equal(apply_transfer(make_kernel({1: 1}), s, [3, 9]).values, [2, 8])


def test_plateau_tone_passes():
    h = trapezoid_kernel(P, Q, 256)
    x = ExpSum.tone(0.3)
    t = np.arange(0, 50)
    r = apply_transfer(h, x, t)
    assert np.abs(r.values - x.sample(t)).max() <= r.error_bound
    assert r.error_bound <= 2 * h.tail_bound


def test_stop_band_is_suppressed():
    h = trapezoid_kernel(P, Q, 256)
    x = ExpSum([1, -0.5j, 0.25], [2.9, -1.8, 1.6])
    r = apply_transfer(h, x, np.arange(-40, 40))
    assert np.abs(r.values).max() <= x.sup_bound * h.tail_bound


def test_window_errors_and_unknown_tail():
    s = Samples(0, np.ones(20))
    h = trapezoid_kernel(P, Q, 4)
    with pytest.raises(WindowError) as err:
        apply_transfer(h, s, [2])
    assert err.value.index == -2
    apply_transfer(h, s, [4, 15])
    unknown = Kernel(0, np.array([1.0, 0.5]), tail_bound=None)
    r = apply_transfer(unknown, s, [5])
    assert r.error_bound is None and not r.bound_available
    assert r.values[0] == 1.5


@settings(max_examples=50)
@given(st.lists(st.builds(complex, st.floats(-2, 2), st.floats(-2, 2)), min_size=1, max_size=30),
       st.integers(-15, 15), st.floats(-math.pi, math.pi, exclude_min=True), st.integers(-100, 100))
def test_eigenrelation(c, off, w0, t):
    h = Kernel(off, np.array(c), tail_bound=0.0)
    x = ExpSum.tone(w0)
    r = apply_transfer(h, x, [t])
    expect = spectral_response(h, [1.0], [w0], [t])[0]
    assert abs(r.values[0] - expect) <= 1e-12 * (1 + h.l1)
    assert abs(r.values[0] - expect) <= r.error_bound + 1e-12 * h.l1


@given(st.lists(st.floats(-5, 5), min_size=1, max_size=20), st.integers(-20, 20))
def test_causal_kernel_ignores_the_future(c, tau):
    h = make_kernel(np.array(c), offset=0)
    assert is_causal(h, 0)
    vals = np.where(np.arange(-60, 61) <= tau, 0.0, 1.0 + np.arange(121))
    x = Samples(-60, vals)
    assert apply_transfer(h, x, [tau]).values[0] == 0


# causality ----------------------------------------------------------------------------

def test_is_causal_examples():
    assert is_causal(make_kernel({1: 1}), 0)
    assert make_kernel({1: 1}).causal == PROVEN
    assert not is_causal(make_kernel({-1: 1}), 0.999)
    assert make_kernel({-1: 1}).causal == NOT_CAUSAL


def test_mark_causal():
    h = Kernel(-2, np.array([1e-12, 0, 1, 0.5]), tail_bound=0.0)
    m = mark_causal(h, 1e-10)
    assert m.causal == NUMERIC and m.causal_tol == 1e-10
    with pytest.raises(CausalityError) as err:
        mark_causal(h, 1e-13)
    assert err.value.residual == 1e-12
    assert mark_causal(h, 1e-13, strict=False).causal == NOT_CAUSAL
    p = h.causal_part()
    assert p.causal == PROVEN and p.support == (0, 1)
    assert p.tail_bound == pytest.approx(1e-12)


def test_proven_kernel_cannot_hold_anticausal_mass():
    with pytest.raises(ValueError):
        Kernel(-1, np.array([1.0, 1.0]), causal=PROVEN)
    with pytest.raises(NonFiniteError) as err:
        Kernel(-1, np.array([1.0, np.nan]))
    assert err.value.index == 0


def test_as_wiener_reverses_index():
    h = make_kernel({0: 1.0, 2: 0.5j})
    f = h.as_wiener()
    assert f.coefficient(-2) == 0.5j and f.coefficient(0) == 1.0
    for w in (0.1, -2.0, 3.0):
        assert evaluate(f, w) == pytest.approx(h.spectrum(w), abs=1e-15)
