import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ml_oracle_table import NAMED, TABLE
from mlsep.ml_core import (
    DEFAULT_ACCURACY,
    MLAccuracy,
    MLDomainError,
    MLQuery,
    _asymptotic,
    _contour,
    _series,
    mittag_leffler,
    ml_deriv_neg_axis,
    ml_eval,
    ml_neg_axis,
    ml_neg_axis_grid,
    rgamma,
)

alphas = st.floats(1.0, 2.0, exclude_min=True)
betas_any = st.floats(0.5, 2.5)


def _mp_series(alpha, beta, x, terms=100):
    with mp.workdps(50):
        a, b, x = mp.mpf(alpha), mp.mpf(beta), mp.mpf(x)
        return float(mp.fsum(x**k * mp.rgamma(a * k + b) for k in range(terms)))


# -- fixed examples -------------------------------------------------------------


def test_exp_at_minus_one():
    assert ml_eval(MLQuery(1.0, 1.0, -1.0)) == pytest.approx(0.36787944117144233, abs=1e-15)


def test_value_at_zero_is_reciprocal_gamma():
    assert ml_eval(MLQuery(1.5, 2.0, 0.0)) == 1.0


def test_cos_zero_at_half_pi():
    assert abs(ml_eval(MLQuery(2.0, 1.0, -(math.pi / 2) ** 2))) <= 1e-12


def test_against_extended_precision_series_at_minus_eight():
    ref = _mp_series(1.5, 1.5, -8.0, terms=200)
    assert ml_eval(MLQuery(1.5, 1.5, -8.0)) == pytest.approx(ref, abs=1e-12)


def test_neg_axis_examples():
    assert abs(ml_neg_axis(2.0, 2.0, math.pi)) <= 1e-12
    assert ml_neg_axis(1.5, 1.0, 0.0) == 1.0
    assert abs(ml_neg_axis(1.5, 1.0, 1.645)) < 5e-4


def test_neg_axis_is_eval_at_minus_z_power():
    for a, b, z in [(1.3, 1.0, 2.7), (1.8, 1.8, 4.1), (1.6, 2.0, 9.3)]:
        assert ml_neg_axis(a, b, z) == ml_eval(MLQuery(a, b, -(z**a)))


@pytest.mark.parametrize("alpha,beta,x,ref", TABLE)
def test_frozen_oracle_table(alpha, beta, x, ref):
    v = mittag_leffler(alpha, beta, x)
    assert abs(v - ref) <= 1e-12 * max(1.0, abs(ref))


def test_gronwall_factor_value():
    assert mittag_leffler(1.5, 1.0, 1.0) == pytest.approx(NAMED["E_1.5_1_at_1"], rel=1e-14)


# -- closed forms -----------------------------------------------------------------


def test_closed_form_limits_on_dense_grid():
    z = np.linspace(0.0, 10.0, 1000)
    e_exp = max(abs(ml_neg_axis(1.0, 1.0, t) - math.exp(-t)) for t in z)
    e_cos = max(abs(ml_neg_axis(2.0, 1.0, t) - math.cos(t)) for t in z)
    e_sinc = max(abs(ml_neg_axis(2.0, 2.0, t) - (math.sin(t) / t if t else 1.0)) for t in z)
    assert max(e_exp, e_cos, e_sinc) <= 1e-11


def test_grid_evaluator_matches_scalar():
    z = np.linspace(0.0, 12.0, 777)
    for a, b in [(1.2, 1.0), (1.586, 1.586), (1.7, 2.0), (2.0, 1.0)]:
        scalar = np.array([ml_neg_axis(a, b, t) for t in z])
        assert np.max(np.abs(ml_neg_axis_grid(a, b, z) - scalar)) <= 1e-12


# -- gamma -----------------------------------------------------------------------


@given(st.floats(0.5, 50.0))
def test_rgamma_relative_accuracy(x):
    ref = float(mp.rgamma(x))
    assert rgamma(x) == pytest.approx(ref, rel=1e-13)


def test_rgamma_poles_and_reflection():
    for n in range(0, 6):
        assert rgamma(-float(n)) == 0.0
    assert rgamma(-0.5) == pytest.approx(float(mp.rgamma(-0.5)), rel=1e-13)
    assert rgamma(-3.7) == pytest.approx(float(mp.rgamma(-3.7)), rel=1e-12)


# -- properties -------------------------------------------------------------------


@given(alphas, betas_any, st.floats(-1.0, 1.0))
def test_series_consistency_near_origin(alpha, beta, x):
    assert mittag_leffler(alpha, beta, x) == pytest.approx(_mp_series(alpha, beta, x), abs=1e-12)


@given(alphas, betas_any, st.floats(-30.0, 8.0))
def test_recurrence(alpha, beta, x):
    lhs = mittag_leffler(alpha, beta, x)
    rhs = x * mittag_leffler(alpha, alpha + beta, x) + rgamma(beta)
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))


@given(alphas, st.sampled_from(["one", "alpha", "two", "free"]), st.floats(0.5, 2.5),
       st.floats(0.05, 8.0))
def test_derivative_matches_central_difference(alpha, which, free, z):
    beta = {"one": 1.0, "alpha": alpha, "two": 2.0, "free": free}[which]
    h = 1e-5 * max(1.0, z)
    fd = (ml_neg_axis(alpha, beta, z + h) - ml_neg_axis(alpha, beta, z - h)) / (2 * h)
    d = ml_deriv_neg_axis(alpha, beta, z)
    assert abs(d - fd) <= max(1e-6 * abs(fd), 1e-8)


def test_derivative_examples():
    assert ml_deriv_neg_axis(2.0, 1.0, math.pi / 2) == pytest.approx(-1.0, abs=1e-11)
    assert ml_deriv_neg_axis(2.0, 2.0, math.pi) == pytest.approx(-1 / math.pi, abs=1e-11)
    h = 1e-6
    fd = (ml_neg_axis(1.5, 1.5, 1 + h) - ml_neg_axis(1.5, 1.5, 1 - h)) / (2 * h)
    assert ml_deriv_neg_axis(1.5, 1.5, 1.0) == pytest.approx(fd, rel=1e-6)


@given(alphas, betas_any, st.floats(-200.0, 20.0))
def test_deterministic(alpha, beta, x):
    assert mittag_leffler(alpha, beta, x) == mittag_leffler(alpha, beta, x)


@pytest.mark.parametrize("alpha", [1.05, 1.3, 1.586, 1.9, 2.0])
@pytest.mark.parametrize("beta", [1.0, 1.5, 2.0])
def test_series_and_contour_agree_on_overlap(alpha, beta):
    for x in np.linspace(-5.0, -1.0, 9):
        assert abs(_series(alpha, beta, x, DEFAULT_ACCURACY) - _contour(alpha, beta, x)) <= 1e-11


@pytest.mark.parametrize("alpha", [1.05, 1.3, 1.586, 1.9])
@pytest.mark.parametrize("beta", [1.0, 1.5, 2.0])
def test_asymptotic_and_contour_agree_on_overlap(alpha, beta):
    for x in [-60.0, -200.0, -1000.0]:
        v = _asymptotic(alpha, beta, x, 1e-12)
        if v is not None:
            assert abs(v - _contour(alpha, beta, x)) <= 1e-11


def test_crossovers_are_configuration():
    x = -12.0
    a = mittag_leffler(1.5, 1.0, x, MLAccuracy(series_radius=5.0))
    b = mittag_leffler(1.5, 1.0, x, MLAccuracy(series_radius=30.0, asymptotic_threshold=60.0))
    assert a == pytest.approx(b, abs=1e-11)


# -- errors ---------------------------------------------------------------------------


@pytest.mark.parametrize("args", [(math.nan, 1.0, 0.0), (1.5, math.inf, 0.0), (1.5, 1.0, math.nan),
                                  (0.0, 1.0, 1.0), (2.5, 1.0, 1.0), (1.5, 0.0, 1.0)])
def test_query_domain_errors(args):
    with pytest.raises(MLDomainError):
        MLQuery(*args)


def test_negative_z_and_derivative_at_zero_rejected():
    with pytest.raises(MLDomainError):
        ml_neg_axis(1.5, 1.0, -1.0)
    with pytest.raises(MLDomainError):
        ml_deriv_neg_axis(1.5, 1.0, 0.0)


def test_accuracy_validation():
    with pytest.raises(ValueError):
        MLAccuracy(abs_tol=0.0)
    with pytest.raises(ValueError):
        MLAccuracy(series_radius=60.0, asymptotic_threshold=50.0)
