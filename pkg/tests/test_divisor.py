import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from nefcone.divisor import (
    CurveClass,
    DivisorClass,
    MissingLedgerEntry,
    canonical_class,
    epsilon_margin,
    fiber_curve,
    general_type_coefficient,
    general_type_n0,
    general_type_table,
    humbert_decompose,
    intersect,
    max_epsilon,
    modular_curve,
    nef_test,
    pigeonhole_boundary,
    pullback_level,
    restrict_to_boundary,
    to_LD,
)

F = Fraction
rationals = st.fractions(min_value=-50, max_value=50, max_denominator=30)
levels = st.integers(1, 12)


def ab(g, n, a, b):
    return DivisorClass.from_ab(g, n, a, b)


def test_class_validation():
    with pytest.raises(ValueError):
        DivisorClass(2, 0)
    with pytest.raises(KeyError):
        DivisorClass(2, 1, aux={"X": 1})
    assert ab(2, 3, 5, 2).a == 5 and ab(2, 3, 5, 2).b == 2


def test_nef_boundary_case_level_one():
    v = nef_test(ab(2, 1, 12, 1))
    assert v.is_nef and v.margin == 0 and v.witness is None


def test_nef_failure_has_modular_witness():
    v = nef_test(ab(2, 1, 11, 1))
    assert not v.is_nef
    assert v.witness.name.startswith("C_mod") and v.witness_value == F(-1, 12)


def test_negative_b_has_fiber_witness():
    v = nef_test(ab(3, 3, 1, -1))
    assert not v.is_nef
    assert v.witness.name.startswith("C_fib") and v.witness_value == F(-2, 3)


def test_nef_status_outside_proved_range():
    assert nef_test(ab(4, 3, 12, 1)).status == "conjectural"
    assert nef_test(ab(3, 3, 12, 1)).status == "theorem"


def test_intersect_examples():
    assert intersect(ab(1 + 1, 1, 12, 1), modular_curve(1)) == 0
    assert intersect(DivisorClass.symbol(3, 3, "L"), fiber_curve(3)) == 0
    assert intersect(DivisorClass.symbol(3, 3, "D"), fiber_curve(3, 3)) == -2


def test_intersect_missing_symbol():
    with pytest.raises(MissingLedgerEntry, match="Mbar"):
        intersect(DivisorClass.symbol(2, 1, "Mbar"), modular_curve(1))
    with pytest.raises(ValueError):
        intersect(ab(2, 3, 1, 0), modular_curve(1))


def test_curve_ledger_must_cover_L_and_D():
    with pytest.raises(ValueError):
        CurveClass("c", 1, {"L": 1}, "")


@given(rationals, rationals, rationals, rationals, levels)
def test_intersect_is_bilinear(a1, b1, a2, b2, n):
    c1, c2 = ab(2, n, a1, b1), ab(2, n, a2, b2)
    for curve in (modular_curve(n), fiber_curve(n, 2)):
        assert intersect(c1 + c2, curve) == intersect(c1, curve) + intersect(c2, curve)
        assert intersect(c1.scale(3), curve) == 3 * intersect(c1, curve)


@given(st.fractions(min_value=F(1, 50), max_value=20, max_denominator=50), st.fractions(min_value=F(1, 1000), max_value=5), levels, st.sampled_from([2, 3, 5]))
def test_verdict_flips_exactly_at_the_wall(b, delta, n, g):
    wall = 12 * b / n
    assert nef_test(ab(g, n, wall, b)).is_nef
    off = nef_test(ab(g, n, wall - delta, b))
    assert not off.is_nef and off.witness_value < 0


def test_modular_ledger_is_pullback_of_level_one():
    for n in (1, 2, 6):
        curve = modular_curve(n)
        c = ab(2, 1, 7, 3)
        assert intersect(pullback_level(c, 1, n), curve) == intersect(c, modular_curve(1))


def test_pullback_examples():
    assert pullback_level(ab(2, 1, 5, 2), 1, 4) == ab(2, 4, 5, 8)
    assert pullback_level(DivisorClass.symbol(3, 2, "Mbar"), 2, 4) == DivisorClass.symbol(3, 4, "Mbar")
    assert pullback_level(DivisorClass.symbol(2, 3, "L"), 3, 3) == DivisorClass.symbol(2, 3, "L")
    with pytest.raises(ValueError):
        pullback_level(ab(2, 2, 1, 1), 2, 3)


def test_pullback_respects_mbar_definition():
    # Mbar = L - n N must be compatible with the scaling of N
    n1, n2 = 2, 6
    mbar = DivisorClass(3, n1, 1, 0, {"N": -n1})
    assert pullback_level(mbar, n1, n2) == DivisorClass(3, n2, 1, 0, {"N": -n2})


@given(rationals, rationals, st.integers(1, 6), st.integers(1, 4))
def test_nef_inequality_invariant_under_pullback(a, b, n1, k):
    c = ab(3, n1, a, b)
    up = nef_test(pullback_level(c, n1, n1 * k))
    down = nef_test(c)
    for key in ("b >= 0", "a - 12b/n", "a - 12b/n >= 0"):
        assert up.inequalities[key] == down.inequalities[key]
    assert up.is_nef == down.is_nef


def test_canonical_class_thresholds():
    k = canonical_class(2, 4)
    assert k.coeff_L == 3 and k.coeff_D == -1 and k.caveat
    assert nef_test(k).is_nef and nef_test(k).margin == 0
    assert nef_test(canonical_class(2, 5)).margin == F(3, 5)
    assert nef_test(canonical_class(3, 3)).is_nef and nef_test(canonical_class(3, 3)).margin == 0
    assert nef_test(canonical_class(3, 4)).margin > 0


def test_general_type_coefficients():
    assert general_type_coefficient(7, 1) == F(-1, 16)
    assert general_type_coefficient(4, 2) == F(3, 4)
    assert general_type_coefficient(3, 3) == 1
    assert general_type_coefficient(2, 7) == 3 - F(10, 7)


@pytest.mark.parametrize("g", range(2, 12))
def test_general_type_sign_pattern(g):
    n0 = general_type_n0(g)
    for n in range(1, 13):
        expected = n >= n0 and (g, n) != (7, 1)
        assert (general_type_coefficient(g, n) > 0) == expected, (g, n)


def test_general_type_table_flags_exceptions():
    cells = {(c.g, c.n0): c for c in general_type_table()}
    assert cells[(7, 1)].exception and cells[(4, 2)].exception
    assert all(c.positive for key, c in cells.items() if key != (7, 1))


def test_theta_null_elimination_reproduces_canonical_class():
    for g, n in [(4, 3), (5, 2), (7, 1)]:
        w = F(1) / (n * F(2) ** (2 * g - 5))
        k = DivisorClass(g, n, general_type_coefficient(g, n), 0, {"Theta_null": w})
        assert to_LD(k) == canonical_class(g, n)


def test_humbert_examples():
    for n in (1, 3, 4, 7):
        h = humbert_decompose(canonical_class(2, n))
        assert h.coeff_L == 3 - F(10, n) and h.coeff_D == 0 and h.aux == {"H1": F(2, n)}
        assert to_LD(h) == canonical_class(2, n)
    assert humbert_decompose(ab(2, 1, 10, 1)) == DivisorClass(2, 1, 0, 0, {"H1": 2})
    assert humbert_decompose(DivisorClass(2, 1)) == DivisorClass(2, 1)
    with pytest.raises(ValueError):
        humbert_decompose(ab(3, 1, 1, 1))


def test_restrict_examples():
    r = restrict_to_boundary(ab(3, 3, 12, 1))
    assert r.base.coeff_L == F(35, 3) and r.base.aux == {"B": -1} and r.mbar_coeff == F(1, 3)
    r = restrict_to_boundary(ab(2, 5, 7, 0))
    assert r.base.coeff_L == 7 and r.mbar_coeff == 0
    r = restrict_to_boundary(canonical_class(3, 3))
    assert r.base.coeff_L == F(11, 3) and r.mbar_coeff == F(1, 3)


@given(rationals, rationals, levels, st.sampled_from([2, 3]))
def test_restriction_roundtrip(a, b, n, g):
    r = restrict_to_boundary(ab(g, n, a, b))
    assert r.expand() == r.intermediate
    assert r.intermediate.coeff_L == a
    assert r.intermediate.aux.get("B", 0) == -b and r.intermediate.aux.get("N", 0) == -b


def test_epsilon_margin_examples():
    assert epsilon_margin(13, 1, 1, 1) == F(12, 13)
    for eps in (F(1, 10), 1, 100):
        assert epsilon_margin(12, 1, 1, eps) < 0
        assert epsilon_margin(5, 0, 3, eps) == 5
    with pytest.raises(ValueError):
        epsilon_margin(1, 1, 1, 0)


def test_max_epsilon():
    e = max_epsilon(F(25, 2), 1, 1)
    assert e == 12 and epsilon_margin(F(25, 2), 1, 1, e) == 0
    assert epsilon_margin(F(25, 2), 1, 1, e - F(1, 100)) > 0
    assert max_epsilon(13, 1, 1) == math.inf
    assert max_epsilon(12, 1, 1) is None


def test_pigeonhole():
    assert pigeonhole_boundary([1, -2, 1]) == 1
    assert pigeonhole_boundary([0, 0]) == 0
    assert pigeonhole_boundary([F(-1, 3), F(1, 4)]) == 0
    with pytest.raises(ValueError):
        pigeonhole_boundary([1, 1, -1])
    with pytest.raises(ValueError):
        pigeonhole_boundary([])
