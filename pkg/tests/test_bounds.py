import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ml_oracle_table import NAMED
from mlsep import registry
from mlsep.bounds import (
    CONDITION_BETAS,
    CaseError,
    PreconditionError,
    RangeError,
    comparison_check,
    gronwall_envelope,
    horizon_Tstar,
    linear_envelope,
    nonlinear_coeffs,
    nonlinear_envelope,
    separation_check,
    shifted_coeffs,
    shifted_envelope,
)
from mlsep.fode import IVProblem, linear_closed_form, solve_ivp
from mlsep.zeros import smallest_zero

# 1-D minimisation oracle: -min sin(x)/x, attained where tan x = x (mpmath findroot)
SINC_MAX_SLOPE = 0.217233628211222


def sine(t, y):
    return -math.sin(y)


# -- Gronwall --------------------------------------------------------------------------------


def test_gronwall_examples():
    assert gronwall_envelope(1.5, 0.0, 1.0, 2.0, 3.0) == 7.0
    assert gronwall_envelope(1.7, 3.0, 0.4, 9.0, 0.0) == 0.4
    assert gronwall_envelope(1.5, 1.0, 0.0, 1.0, 1.0) == pytest.approx(NAMED["E_1.5_1_at_1"], rel=1e-14)
    with pytest.raises(ValueError):
        gronwall_envelope(1.5, -1.0, 1.0, 0.0, 1.0)


# -- horizon -----------------------------------------------------------------------------------


def test_horizon_alpha_two():
    rep = horizon_Tstar(2.0, 1.0, CONDITION_BETAS)
    assert rep.t_star == pytest.approx(math.pi / 2, abs=1e-10)
    assert rep.binding_condition == "beta_1"
    assert set(rep.zero_inputs) == set(CONDITION_BETAS)


def test_horizon_no_zero_below_threshold():
    rep = horizon_Tstar(1.5, 1.0, ["beta_2"])
    assert rep.t_star == math.inf and rep.binding_condition is None and not rep.finite
    assert rep.zero_inputs["beta_2"] is None


def test_horizon_scaling_example():
    rep = horizon_Tstar(1.5, 16.0, ["beta_1"])
    assert rep.t_star == pytest.approx(smallest_zero(1.5, 1.0).z_min / 16 ** (2 / 3), rel=1e-15)


@settings(max_examples=30)
@given(st.floats(1.05, 2.0), st.floats(0.01, 100.0), st.floats(0.01, 100.0),
       st.sets(st.sampled_from(CONDITION_BETAS), min_size=1))
def test_horizon_scaling_identity(alpha, L, c, conds):
    a = horizon_Tstar(alpha, c * L, conds).t_star
    b = horizon_Tstar(alpha, L, conds).t_star / c ** (1 / alpha)
    if math.isinf(b):
        assert math.isinf(a)
    else:
        # Z (cL)^(-1/a) against Z L^(-1/a) c^(-1/a): equal up to the rounding of the powers
        assert math.isclose(a, b, rel_tol=1e-15)


def test_horizon_errors():
    with pytest.raises(ValueError):
        horizon_Tstar(1.5, 0.0)
    with pytest.raises(ValueError):
        horizon_Tstar(1.5, 1.0, [])
    with pytest.raises(ValueError):
        horizon_Tstar(1.5, 1.0, ["beta_3"])


def test_horizon_report_text():
    text = horizon_Tstar(1.7, 2.0).as_text()
    assert "t_star = " in text and "binding_condition = beta_1" in text


# -- linear envelope --------------------------------------------------------------------------


def test_constant_coefficient_collapses_to_closed_form():
    ts = np.linspace(0.0, 1.5, 31)
    env = linear_envelope(1.5, lambda t: -1.3, 0.7, 0.4, ts)
    exact = [abs(linear_closed_form(1.5, -1.3, 0.7, 0.4, t)) for t in ts]
    assert np.array_equal(env.lower, env.upper)
    assert np.max(np.abs(env.lower - exact)) <= 1e-14
    assert env.kind == "linear"


def test_linear_envelope_at_zero():
    env = linear_envelope(1.5, lambda t: -1 + t / 4, 2.5, 1.0, [0.0, 0.5])
    assert env.lower[0] == env.upper[0] == 2.5


def test_linear_ramp_sandwich():
    a = lambda t: -1 + t / 4  # noqa: E731
    p = IVProblem(1.5, lambda t, y: a(t) * y, 1.0, 0.0, 1.0, 1.0)
    sol = solve_ivp(p, 2048)
    env = linear_envelope(1.5, a, 1.0, 0.0, sol.times[::32])
    assert np.all(env.contains(sol.values[::32], eps=1e-3))
    assert np.all(env.lower <= env.upper)
    assert env.a_lower[-1] == -1.0 and env.a_upper[-1] == pytest.approx(-0.75)


# -- coefficients -------------------------------------------------------------------------------


def test_linear_rhs_coefficients():
    c = nonlinear_coeffs(lambda t, y: -2.5 * y, 1.0, (-3.0, 3.0))
    assert c.a_lower == pytest.approx(-2.5, abs=1e-12) and c.a_upper == pytest.approx(-2.5, abs=1e-12)


def test_sine_coefficients():
    c = nonlinear_coeffs(sine, 1.0, (-20.0, 20.0))
    assert c.a_lower == pytest.approx(-1.0, abs=1e-12)
    assert c.a_upper == pytest.approx(SINC_MAX_SLOPE, abs=1e-10)
    assert "[-20.0, 20.0]" in c.domain_used and "limit" in c.domain_used


def test_cubic_coefficients():
    c = nonlinear_coeffs(lambda t, y: -(y**3), 1.0, (-2.0, 2.0))
    assert c.a_lower == pytest.approx(-4.0, abs=1e-12)
    assert c.a_upper == pytest.approx(0.0, abs=1e-12)


def test_time_dependent_coefficients():
    c = nonlinear_coeffs(lambda t, y: -(1 + t) * math.tanh(y), 2.0, (-5.0, 5.0))
    assert c.a_lower == pytest.approx(-3.0, abs=1e-9)
    assert c.a_upper == pytest.approx(-math.tanh(5.0) / 5.0, abs=1e-9)


def test_precondition_error():
    with pytest.raises(PreconditionError):
        nonlinear_coeffs(lambda t, y: 1.0 - y, 1.0)


def test_shifted_coefficients():
    ref = solve_ivp(IVProblem(1.5, sine, 0.3, 0.0, 1.5, 1.0), 512)
    lin = shifted_coeffs(lambda t, y: -0.8 * y, ref, 1.0, (-3.0, 3.0))
    # the |y| = 1e-8 limit samples lose ~8 digits to the shift's cancellation
    assert lin.a_lower == pytest.approx(-0.8, abs=1e-8) and lin.a_upper == pytest.approx(-0.8, abs=1e-8)
    zero = solve_ivp(IVProblem(1.5, sine, 0.0, 0.0, 1.5, 1.0), 64)
    a = shifted_coeffs(sine, zero, 1.0)
    b = nonlinear_coeffs(sine, 1.0)
    assert a.a_lower == pytest.approx(b.a_lower, abs=1e-12) and a.a_upper == pytest.approx(b.a_upper, abs=1e-12)
    c = shifted_coeffs(sine, ref, 1.0)
    # brute-force oracle: dense (tau, y) grid of the shifted secant slope
    taus = np.linspace(0.0, 1.0, 41)[:, None]
    ys = np.linspace(-20.0, 20.0, 40000)
    ys = ys[np.abs(ys) > 1e-3][None, :]
    base = ref(taus.ravel())[:, None]
    slopes = (-np.sin(ys + base) + np.sin(base)) / ys
    assert slopes.min() - 1e-12 >= c.a_lower >= slopes.min() - 1e-4
    assert slopes.max() + 1e-12 <= c.a_upper <= slopes.max() + 1e-4
    assert -1.0 - 1e-12 <= c.a_lower < c.a_upper <= 1.0
    with pytest.raises(RangeError):
        shifted_coeffs(sine, ref, 2.0)


# -- nonlinear and shifted envelopes -----------------------------------------------------------------


def test_nonlinear_envelope_linear_case():
    p = IVProblem(1.5, lambda t, y: -0.6 * y, 1.0, 0.0, 1.0, 0.6)
    ts = np.linspace(0.0, 1.0, 11)
    env = nonlinear_envelope(p, ts, x_domain=(-2.0, 2.0))
    exact = [linear_closed_form(1.5, -0.6, 1.0, 0.0, t) for t in ts]
    assert np.max(np.abs(env.lower - exact)) <= 1e-11
    assert np.max(np.abs(env.upper - exact)) <= 1e-11


def test_nonlinear_envelope_sine_sandwich():
    p = IVProblem(1.5, sine, 0.5, 0.0, 1.6, 1.0)
    sol = solve_ivp(p, 2048)
    env = nonlinear_envelope(p, sol.times[::64])
    assert env.sign == 1
    assert np.all(env.contains(sol.values[::64], eps=1e-3))


def test_nonlinear_envelope_case_b():
    p = IVProblem(1.5, sine, -0.5, -0.2, 1.2, 1.0)
    sol = solve_ivp(p, 1024)
    env = nonlinear_envelope(p, sol.times[::64])
    assert env.sign == -1
    assert np.all(env.contains(sol.values[::64], eps=1e-3))


def test_nonlinear_envelope_trivial_and_errors():
    p = IVProblem(1.5, sine, 0.0, 0.0, 1.0, 1.0)
    env = nonlinear_envelope(p, [0.0, 0.5, 1.0])
    assert np.all(env.lower == 0) and np.all(env.upper == 0)
    with pytest.raises(CaseError):
        nonlinear_envelope(p.with_initial(0.5, -0.1), [0.0, 0.5])
    with pytest.raises(CaseError):
        nonlinear_envelope(p.with_initial(0.5, 0.1), [0.0, 0.5], sign_case="b")
    with pytest.raises(RangeError):
        nonlinear_envelope(p.with_initial(0.5, 0.0), [0.0, 2.0])


def test_shifted_envelope_linear_collapses():
    p1 = IVProblem(1.5, lambda t, y: -y, 0.2, 0.0, 1.5, 1.0)
    p2 = p1.with_initial(0.9, 0.3)
    ts = np.linspace(0.0, 1.5, 16)
    a = shifted_envelope(p1, p2, ts, y_domain=(-3.0, 3.0), n_steps=256)
    b = linear_envelope(1.5, lambda t: -1.0, 0.7, 0.3, ts)
    # same cancellation as in the shifted coefficients
    assert np.max(np.abs(a.lower - b.lower)) <= 1e-8
    assert np.max(np.abs(a.upper - b.upper)) <= 1e-8


def test_shifted_envelope_sine_sandwich():
    p1 = IVProblem(1.5, sine, 0.2, 0.0, 1.5, 1.0)
    p2 = p1.with_initial(0.5, 0.1)
    s1, s2 = solve_ivp(p1, 2048), solve_ivp(p2, 2048)
    env = shifted_envelope(p1, p2, s1.times[::64])
    assert np.all(env.contains(s2.values[::64] - s1.values[::64], eps=1e-3))


def test_shifted_envelope_trivial_and_errors():
    p1 = IVProblem(1.5, sine, 0.2, 0.0, 1.5, 1.0)
    env = shifted_envelope(p1, p1, [0.0, 1.0])
    assert np.all(env.upper == 0)
    with pytest.raises(CaseError):
        shifted_envelope(p1, p1.with_initial(0.1, 0.0), [0.0, 1.0])


# -- separation ----------------------------------------------------------------------------------


def test_example_one_crossing():
    p1 = IVProblem(1.5, lambda t, y: -y, 0.0, 0.0, 3.0, 1.0)
    rep = separation_check(p1, p1.with_initial(1.0, 0.0), 1024)
    assert rep.configuration == "ordered_values" and rep.separated
    assert rep.t_star == pytest.approx(1.6452288, abs=1e-6)
    assert rep.first_crossing == pytest.approx(1.645, abs=5e-3)
    assert rep.crossing_after_tstar


def test_equal_values_ordered_slopes():
    p1 = IVProblem(1.5, lambda t, y: -y, 1.0, 0.0, 3.0, 1.0)
    rep = separation_check(p1, p1.with_initial(1.0, 0.5), 1024)
    assert rep.configuration == "equal_values" and rep.separated
    assert rep.horizon.binding_condition == "beta_alpha"
    assert rep.min_gap > 0


def test_identical_data_zero_difference():
    p = IVProblem(1.5, sine, 0.4, 0.1, 2.0, 1.0)
    rep = separation_check(p, p, 256)
    assert rep.configuration == "identical"
    assert np.max(np.abs(rep.diff)) == 0.0


def test_unordered_data_rejected():
    p = IVProblem(1.5, sine, 0.4, 0.1, 2.0, 1.0)
    with pytest.raises(CaseError):
        separation_check(p, p.with_initial(0.1, 0.1), 64)


def test_sharp_condition_for_decreasing_slopes():
    # y10 < y20 but y11 > y21: only the alpha condition and the pointwise check apply
    p1 = IVProblem(1.5, lambda t, y: -y, 0.0, 0.5, 3.0, 1.0)
    rep = separation_check(p1, p1.with_initial(1.0, 0.0), 1024)
    assert rep.separated
    assert rep.t_star < rep.horizon.t_star
    # for linear f the sharp condition is the difference itself, so T* is the crossing
    assert rep.t_star == pytest.approx(rep.first_crossing, abs=1e-4)


def test_parallel_report_identical():
    p1 = IVProblem(1.5, sine, 0.0, 0.0, 2.0, 1.0)
    p2 = p1.with_initial(0.5, 0.2)
    a = separation_check(p1, p2, 256)
    b = separation_check(p1, p2, 256, parallel=True)
    assert np.array_equal(a.diff, b.diff) and a.t_star == b.t_star and a.band == b.band


# -- registry-wide properties ------------------------------------------------------------------------


@pytest.fixture(scope="module")
def reports():
    return {name: registry.evaluate_pair(pair) for name, pair in registry.REGISTRY.items()}


@pytest.mark.parametrize("name", sorted(registry.REGISTRY))
def test_registry_sandwich(reports, name):
    assert reports[name].sandwich_ok


@pytest.mark.parametrize("name", sorted(registry.REGISTRY))
def test_registry_gronwall_dominance(reports, name):
    assert reports[name].dominance_ok


@pytest.mark.parametrize("name", sorted(registry.REGISTRY))
def test_registry_non_crossing(reports, name):
    sep = reports[name].separation
    assert sep.configuration == "identical" or sep.separated


def test_registry_covers_both_configurations(reports):
    configs = {r.separation.configuration for r in reports.values()}
    assert {"ordered_values", "equal_values"} <= configs


def test_envelope_ordering_on_registry(reports):
    for r in reports.values():
        have = ~np.isnan(r.lower)
        assert np.all(r.lower[have] <= r.upper[have])
        assert np.all(r.lower[have] >= 0)


def test_registry_lookup():
    with pytest.raises(KeyError):
        registry.get("missing")


# -- comparison lemma ----------------------------------------------------------------------------------


@settings(max_examples=25)
@given(st.floats(1.05, 1.95), st.floats(0.0, 2.0), st.floats(0.0, 1.0), st.floats(-1.0, 1.0),
       st.floats(-1.0, 1.0), st.floats(1e-3, 1.0), st.floats(0.0, 1.0), st.sampled_from([16, 32, 64]))
def test_comparison_lemma_brute_force(alpha, k, m, a, b, gap, slope_gap, n):
    def g(t, x):  # nondecreasing in x
        return k * math.tanh(x) + m * x

    ok, v, w, _ = comparison_check(alpha, g, lambda t: a + b * t,
                                   lambda t: a + gap + (b + slope_gap) * t, 1.0, n)
    assert ok


def test_comparison_requires_ordered_forcing():
    with pytest.raises(CaseError):
        comparison_check(1.5, lambda t, x: x, lambda t: 1.0, lambda t: 0.0, 1.0, 8)
