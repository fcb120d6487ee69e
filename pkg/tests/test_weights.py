import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from wsobolev import (DivergentIntegralError, ExponentPair, check_S6, custom_weight,
                      integrate_power, make_pair, power_weight, unit_weight)


def test_exponent_pair_conjugacy():
    for p in (1.1, 1.5, 2.0, 3.0, 7.5):
        ep = ExponentPair(p)
        assert abs(1.0 / ep.p + 1.0 / ep.p_conj - 1.0) < 1e-15
        assert ep.p > 1 and ep.p_conj > 1


@pytest.mark.parametrize("p", [1.0, 0.5, -2.0, math.inf])
def test_exponent_pair_rejects_bad_p(p):
    with pytest.raises(ValueError):
        ExponentPair(p)


def test_exponent_pair_rejects_mismatched_conjugate():
    with pytest.raises(ValueError):
        ExponentPair(2.0, 3.0)


def test_integrate_power_examples():
    assert integrate_power(power_weight(1.0), -2.0, 1.0, 2.0) == pytest.approx(0.5, abs=1e-12)
    assert integrate_power(unit_weight(), 3.0, 0.0, 3.0) == pytest.approx(3.0, abs=1e-12)
    assert integrate_power(power_weight(0.5), 2.0, 0.0, 1.0) == pytest.approx(0.5, abs=1e-12)


def test_integrate_power_divergence_sides():
    with pytest.raises(DivergentIntegralError) as ei:
        integrate_power(power_weight(1.0), -2.0, 0.0, 1.0)
    assert ei.value.side == "lower"
    with pytest.raises(DivergentIntegralError) as ei:
        integrate_power(unit_weight(), 1.0, 1.0, math.inf)
    assert ei.value.side == "upper"
    # logarithmic borderline diverges at both kinds of endpoint
    with pytest.raises(DivergentIntegralError) as ei:
        integrate_power(power_weight(1.0), -1.0, 0.0, 1.0)
    assert ei.value.side == "lower"
    with pytest.raises(DivergentIntegralError) as ei:
        integrate_power(power_weight(1.0), -1.0, 1.0, math.inf)
    assert ei.value.side == "upper"


def test_integrate_power_numeric_divergence_probe():
    w = custom_weight(lambda x: np.asarray(x, dtype=float))
    with pytest.raises(DivergentIntegralError) as ei:
        integrate_power(w, -2.0, 0.0, 1.0)
    assert ei.value.side == "lower"
    with pytest.raises(DivergentIntegralError) as ei:
        integrate_power(w, 1.0, 1.0, math.inf)
    assert ei.value.side == "upper"


def test_s6_spec_cases():
    r = check_S6(make_pair(unit_weight(), power_weight(1.0), 2.0), 1.0)
    assert r.satisfied is True
    r = check_S6(make_pair(unit_weight(), unit_weight(), 2.0), 1.0)
    assert r.satisfied is False
    # both factors finite: the zero-side product is exactly c
    assert r.zero_side.v0_value * r.zero_side.v1_value == pytest.approx(1.0, abs=1e-12)
    r = check_S6(make_pair(power_weight(-1.0), unit_weight(), 2.0), 1.0)
    assert r.satisfied is True


def test_s6_numeric_route_matches_closed_form():
    closed = check_S6(make_pair(unit_weight(), power_weight(1.0), 2.0), 1.0)
    probed = check_S6(
        make_pair(unit_weight(),
                  custom_weight(lambda x: np.asarray(x, dtype=float)), 2.0), 1.0)
    assert probed.satisfied is closed.satisfied is True
    assert probed.zero_side.v1_status == "divergent"
    assert probed.infinity_side.v0_status == "divergent"


def test_s6_side_is_not_a_silent_boolean():
    r = check_S6(make_pair(unit_weight(), unit_weight(), 2.0), 1.0)
    with pytest.raises(TypeError):
        bool(r.zero_side)


def test_s6_slowly_converging_tail_is_undetermined():
    """A tail that converges too slowly to resolve reports undetermined, not a guess."""
    pc = 2.0  # p = 2

    def v1(x):
        x = np.asarray(x, dtype=float)
        return (x * np.log(np.e + x) ** 1.1) ** (1.0 / pc)

    r = check_S6(make_pair(unit_weight(), custom_weight(v1), 2.0), 1.0)
    assert r.infinity_side.v1_status == "undetermined"
    assert r.satisfied is None


@given(gamma=st.floats(-1.2, 1.5), r=st.floats(-2.0, 2.0),
       s=st.floats(0.1, 5.0), width=st.floats(0.1, 10.0), frac=st.floats(0.05, 0.95))
@settings(max_examples=40, deadline=None)
def test_integrate_power_additive_and_monotone(gamma, r, s, width, frac):
    assume(abs(r * gamma + 1.0) > 1e-3)
    w = power_weight(gamma)
    t = s + width
    u = s + frac * width
    whole = integrate_power(w, r, s, t)
    left = integrate_power(w, r, s, u)
    right = integrate_power(w, r, u, t)
    tol = 2e-10 * max(1.0, abs(whole))
    assert abs(left + right - whole) <= 2 * tol
    assert left <= whole + tol  # monotone in t for nonnegative integrands
    assert right >= -tol


def test_closed_form_vs_adaptive_quadrature():
    rng = np.random.default_rng(42)
    for _ in range(25):
        gamma = rng.uniform(-1.2, 1.5)
        r = rng.uniform(-2.0, 2.0)
        s = rng.uniform(0.05, 3.0)
        t = s + rng.uniform(0.1, 8.0)
        closed = integrate_power(power_weight(gamma), r, s, t)
        numeric = integrate_power(
            custom_weight(lambda x, g=gamma: np.asarray(x, dtype=float) ** g), r, s, t)
        assert numeric == pytest.approx(closed, rel=1e-8, abs=1e-10)


def test_weight_pair_rejects_negative_weight():
    with pytest.raises(ValueError):
        make_pair(custom_weight(lambda x: np.asarray(x, dtype=float) - 10.0),
                  unit_weight(), 2.0)


def test_weight_pair_rejects_non_integrable_reciprocal():
    # v1 vanishes on [0.5, 1], so 1/v1 fails the local p'-integrability probe
    w = custom_weight(lambda x: np.maximum(np.asarray(x, dtype=float) - 1.0, 0.0))
    with pytest.raises((ValueError, DivergentIntegralError)):
        make_pair(unit_weight(), w, 2.0)
