import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nefcone.cli import random_period_point
from nefcone.theta import (
    ExponentForm,
    InconclusiveValuation,
    LevelConditionError,
    SectionSpec,
    ThetaCharacteristic,
    _factor_minimum,
    brute_force_minimum,
    characteristics,
    check_extension,
    check_transformation,
    exponent_form,
    form_order,
    log_quasi_period_factor,
    pushforward_to_chart,
    quasi_periodicity_residual,
    term_exponents_T,
    term_exponents_t,
    theta_numeric,
    valuation,
)

F = Fraction
SIXTH = ThetaCharacteristic(["1/6", "1/6"], ["1/6", "1/6"])
ZERO = ThetaCharacteristic([0, 0])


def test_characteristic_infers_p_and_validates():
    assert SIXTH.p == 3
    assert ThetaCharacteristic(["1/2", 0]).p == 1
    with pytest.raises(ValueError):
        ThetaCharacteristic(["1/6", 0], p=1)
    with pytest.raises(ValueError):
        ThetaCharacteristic([0, 0], [0])


def test_characteristics_enumeration_size():
    assert len(characteristics(3)) == 36
    assert len(characteristics(1, with_dblprime=True)) == 16


def test_term_t_zero_characteristic():
    term = term_exponents_t((0, 0), ZERO, 4)
    assert all(v == 0 for v in term.exponents.values()) and term.phase == 0


def test_term_t_t11_exponent():
    assert term_exponents_t((0, 0), SIXTH, 72).exponents["t11"] == 1


def test_term_t_phase():
    ch = ThetaCharacteristic([0, 0], ["1/2", 0])
    assert term_exponents_t((1, 0), ch, 4).phase == F(1, 2)


def test_term_T_examples():
    t = term_exponents_T((0, 0), SIXTH, 72).exponents
    assert t["T2"] == 1 and t["T4"] == -11
    assert all(v == 0 for v in term_exponents_T((0, 0), ZERO, 8).exponents.values())
    assert term_exponents_T((1, 1), ZERO, 8).exponents["T6"] == 0


def test_term_dimension_mismatch():
    with pytest.raises(ValueError):
        term_exponents_t((0, 0, 0), SIXTH, 72)


half_sixths = st.integers(0, 5).map(lambda j: F(j, 6))


@given(
    st.tuples(st.integers(-6, 6), st.integers(-6, 6)),
    st.tuples(half_sixths, half_sixths),
    st.sampled_from([8, 36, 72]),
)
def test_T_exponents_are_pushforward_of_t_exponents(q, mp, n):
    ch = ThetaCharacteristic(mp)
    pushed = pushforward_to_chart(term_exponents_t(q, ch, n))
    direct = term_exponents_T(q, ch, n).exponents
    assert pushed["T3"] == 0
    assert {k: pushed[k] for k in direct} == direct


def test_valuation_single_factor():
    v = valuation(SIXTH, "T2", 3, level=72)
    assert v.value == 1 and v.certified and v.attained_at == (0, 0)
    assert valuation(ZERO, "T2", 1, level=4).value == 0


def test_valuation_of_product_adds():
    spec = SectionSpec([SIXTH, ThetaCharacteristic([0, 0])], 72)
    assert valuation(spec, "T2", 3).value == 1


@pytest.mark.parametrize("var", ["T1", "T2", "T4", "T5", "T6"])
def test_valuation_matches_brute_force(var):
    spec = SectionSpec([SIXTH, ThetaCharacteristic(["1/2", "1/3"])], 72)
    assert valuation(spec, var, 3).value == brute_force_minimum(spec, var, 3)


def test_valuation_rejects_bad_inputs():
    with pytest.raises(ValueError):
        valuation(SIXTH, "T3", 2, level=72)
    with pytest.raises(ValueError):
        valuation(SIXTH, "T2", 0, level=72)


def test_valuation_inconclusive_when_box_misses_vertex():
    form = ExponentForm((0, 1), -5, 8, F(0))
    with pytest.raises(InconclusiveValuation):
        _factor_minimum(form, 1)
    assert _factor_minimum(form, 6)[0] == form.of_k(5)


@pytest.mark.parametrize("chart", [(0, -2), (0, 0), (0, 3)])
def test_valuation_in_shifted_charts_matches_brute_force(chart):
    spec = SectionSpec([SIXTH], 72)
    for var in ("T2", "T4", "T6"):
        assert valuation(spec, var, 4, chart=chart).value == brute_force_minimum(spec, var, 4, chart)


@pytest.mark.parametrize("p", [1, 2, 3])
def test_T2_exponent_identity(p):
    n = 8 * p * p
    for j in range(2 * p):
        ch = ThetaCharacteristic([0, F(j, 2 * p)])
        form = exponent_form("T2", ch, n)
        for q2 in range(-20, 21):
            value = form.at((0, q2))
            assert value == (2 * p * q2 + j) ** 2 * F(n, 8 * p * p)
            assert value.denominator == 1 and value >= 0


def test_extension_examples():
    rep = check_extension(SectionSpec([SIXTH, SIXTH], 72))
    assert rep.passed and rep.charts[0].min_exponent == 2
    rep = check_extension(SectionSpec([ThetaCharacteristic(["1/2", "1/2"])], 8), [(0, m) for m in range(-2, 3)])
    assert rep.passed
    with pytest.raises(LevelConditionError):
        check_extension(SectionSpec([SIXTH], 36))


def test_extension_detects_non_integral_exponents_at_lower_level():
    # with only 4p^2 | n the integrality of the T2 exponent is lost for odd j
    ch = ThetaCharacteristic([0, "1/2"])
    form = exponent_form("T2", ch, 4)
    assert not form.integer_valued()


def test_theta_numeric_factorises_at_diagonal_tau():
    val = theta_numeric(1j * np.eye(2), np.zeros(2), ZERO, radius=8)
    one_d = sum(math.exp(-math.pi * k * k) for k in range(-30, 31))
    assert abs(val.value - one_d**2) < 1e-14
    assert val.value.real > 1


def test_theta_numeric_rejects_bad_tau():
    with pytest.raises(ValueError):
        theta_numeric(np.array([[1j, 0], [0, -1j]]), np.zeros(2), ZERO)


def test_theta_numeric_reports_tail_above_tolerance():
    with pytest.raises(ValueError):
        theta_numeric(0.05j * np.eye(2), np.zeros(2), ZERO, radius=1)


def test_theta_even_up_to_sign_for_half_characteristics():
    rng = np.random.default_rng(5)
    ch = ThetaCharacteristic(["1/2", "1/2"], ["1/2", 0])
    for _ in range(10):
        tau, z = random_period_point(rng)
        a = theta_numeric(tau, z, ch).value
        b = theta_numeric(tau, -z, ch).value
        assert abs(abs(a) - abs(b)) <= 1e-10 * max(abs(a), 1e-300)


def test_quasi_periodicity_example():
    tau = 1j * np.eye(2)
    z = np.zeros(2, dtype=complex)
    assert log_quasi_period_factor(tau, z, (4, 0), (0, 0)) == pytest.approx(16 * math.pi)
    assert quasi_periodicity_residual(tau, z, ZERO, (4, 0), (0, 0)) < 1e-8


def test_quasi_periodicity_requires_lattice_shift():
    with pytest.raises(LevelConditionError):
        quasi_periodicity_residual(1j * np.eye(2), np.zeros(2), ThetaCharacteristic(["1/2", 0]), (0, 0), (1, 0))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_tail_bound_holds_under_radius_doubling(seed):
    rng = np.random.default_rng(seed)
    tau, z = random_period_point(rng)
    ch = ThetaCharacteristic([F(int(a), 2) for a in rng.integers(0, 2, 2)])
    v = theta_numeric(tau, z, ch)
    w = theta_numeric(tau, z, ch, radius=2 * v.radius)
    diff = abs(v.mantissa * math.exp(v.log_offset - w.log_offset) - w.mantissa)
    # every term is at most 1 after normalisation by the largest one
    rounding = 4 * (4 * v.radius + 1) ** 2 * np.finfo(float).eps
    assert v.tail_bound < 1e-14
    assert diff <= v.tail_bound + rounding


def test_transformation_examples():
    tau = np.array([[1.2j, 0.3 + 0.2j], [0.3 + 0.2j, 0.9j]])
    z = np.array([0.2 + 0.1j, -0.3 + 0.05j])
    spec = SectionSpec([ThetaCharacteristic(["1/2", 0], [0, "1/2"]), ThetaCharacteristic(["1/2", "1/2"], ["1/2", "1/2"])], 4)
    translation = [[1, 0, 4, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
    lower = [[1, 0, 0, 0], [0, 1, 0, 0], [4, 4, 1, 0], [4, -4, 0, 1]]
    rep = check_transformation(spec, [(None, (0, 0), (0, 0)), (None, (4, 0), (0, 0)), (translation, (0, 4), (4, 0)), (lower, (0, 0), (0, 0))], tau, z)
    assert rep.passed
    assert rep.samples[0].shift_residual == 0


def test_transformation_preconditions():
    spec = SectionSpec([SIXTH], 8)
    with pytest.raises(LevelConditionError):
        check_transformation(spec, [], 1j * np.eye(2), np.zeros(2))
    spec = SectionSpec([ThetaCharacteristic(["1/2", 0])], 4)
    with pytest.raises(LevelConditionError):
        check_transformation(spec, [(None, (2, 0), (0, 0))], 1j * np.eye(2), np.zeros(2))
    with pytest.raises(LevelConditionError):
        check_transformation(spec, [([[1, 0, 1, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]], (0, 0), (0, 0))], 1j * np.eye(2), np.zeros(2))


def test_section_spec_flags():
    spec = SectionSpec([SIXTH, ThetaCharacteristic(["1/4", 0])], 36)
    assert spec.p == 6  # lcm of 3 and 2
    assert not spec.level_4p2


def test_form_order():
    assert form_order(12, 1) == F(1, 12)
    assert form_order(1, 0) == 0
    assert form_order(13 * 12, 13) == F(1, 12)
    with pytest.raises(ValueError):
        form_order(0, 1)
