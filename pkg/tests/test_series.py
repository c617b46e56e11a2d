"""Truncated power series: multiplication, inversion, composition,
compositional inverse, evaluation, and rationality detection."""

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from prepkit import (InsufficientXPrecision, NonBinaryCoefficient,
                     NonzeroConstantInner, NotAUnitSeries, OracleSeries,
                     PointNotSmall, WindowTooSmall, comp_inverse,
                     comp_inverse_newton, compose, detect_periodic_01,
                     detect_recurrence, evaluate, make_ring, make_series,
                     series_add, series_invert, series_mul, series_sub)

Z4 = make_ring("zmodpk", 2, 2)
F5 = make_ring("zp", 5, 1)
F7 = make_ring("zp", 7, 1)
Z = make_ring("z")


def ints(f):
    return [int(c) for c in f.coeffs]


def test_mul_golden_zmod4():
    f = make_series(Z4, [2, 2], 3)
    assert ints(series_mul(f, f)) == [0, 0, 0]


def test_invert_golden_f5():
    f = make_series(F5, [2, 1], 4)
    g = series_invert(f)
    assert ints(g) == oracles.pinv_series([2, 1], 4, 5)
    assert ints(series_mul(f, g)) == [1, 0, 0, 0]


def test_invert_rejects_non_unit():
    f = make_series(Z4, [2, 1], 3)
    with pytest.raises(NotAUnitSeries):
        series_invert(f)


def test_compose_golden():
    f = make_series(Z, [0, 0, 1], 7)
    g = make_series(Z, [0, 1, 0, 1], 7)
    assert ints(compose(f, g)) == [0, 0, 1, 0, 2, 0, 1]


def test_compose_rejects_unit_constant_inner():
    f = make_series(Z, [1, 1], 4)
    g = make_series(Z, [1, 1], 4)
    with pytest.raises(NonzeroConstantInner):
        compose(f, g)


def test_comp_inverse_goldens():
    f = make_series(Z, [0, 1, 1], 7)
    assert ints(comp_inverse(f)) == [0, 1, -1, 2, -5, 14, -42]
    f3 = make_series(Z, [0, 1, 0, 1], 6)
    assert ints(comp_inverse(f3)) == [0, 1, 0, -1, 0, 3]


def test_comp_inverse_routes_agree():
    f = make_series(Z, [0, 1, 3, -2, 7, 1, 0, 4], 8)
    assert comp_inverse(f).coeffs == comp_inverse_newton(f).coeffs
    g = make_series(F7, [0, 1, 6, 3, 2], 5)
    assert comp_inverse(g).coeffs == comp_inverse_newton(g).coeffs


def test_evaluate_geometric():
    R = make_ring("zp", 2, 8)
    f = make_series(R, [1] * 8, 8)
    assert evaluate(f, R.from_int(2), 8) == 255
    with pytest.raises(PointNotSmall):
        evaluate(f, R.one(), 8)
    with pytest.raises(InsufficientXPrecision):
        evaluate(make_series(R, [1] * 3, 3), R.from_int(2), 8)


def test_add_sub_roundtrip():
    f = make_series(F7, [1, 2, 3], 3)
    g = make_series(F7, [6, 5, 4], 3)
    assert ints(series_add(f, g)) == [0, 0, 0]
    assert ints(series_sub(series_add(f, g), g)) == ints(f)


def test_oracle_series_window_and_materialize():
    s = OracleSeries(Z, lambda n: n * n, 10)
    assert s.window(4) == [0, 1, 4, 9]
    m = s.materialize(5)
    assert ints(m) == [0, 1, 4, 9, 16]
    with pytest.raises(InsufficientXPrecision):
        s.coeff(10)


@given(st.lists(st.integers(min_value=-50, max_value=50), min_size=2,
                max_size=10))
@settings(derandomize=True, deadline=None, max_examples=50)
def test_invert_roundtrip_random(coeffs):
    for R in (make_ring("zp", 3, 5), make_ring("fpt", 2, 6)):
        vals = [R.from_int(c) for c in coeffs]
        vals[0] = R.one()
        f = make_series(R, vals, len(vals))
        g = series_invert(f)
        one = make_series(R, [R.one()] + [R.zero()] * (len(vals) - 1),
                          len(vals))
        assert series_mul(f, g).coeffs == one.coeffs


@given(st.lists(st.integers(min_value=-20, max_value=20), min_size=3,
                max_size=9))
@settings(derandomize=True, deadline=None, max_examples=40)
def test_comp_inverse_roundtrip_random(tail):
    coeffs = [0, 1] + tail
    f = make_series(Z, coeffs, len(coeffs))
    g = comp_inverse(f)
    m = len(coeffs)
    idx = [0, 1] + [0] * (m - 2)
    assert ints(compose(f, g)) == idx
    assert ints(compose(g, f)) == idx


# ------------------------------------------------------------- rationality

def test_detect_periodic_goldens():
    v = detect_periodic_01([0, 1] * 8, 16)
    assert (v.kind, v.d, v.s, v.q) == ("rational", 2, 0, (1, 0, -1))
    v = detect_periodic_01([1] * 16, 16)
    assert (v.kind, v.d, v.s) == ("rational", 1, 0)
    v = detect_periodic_01([0, 1] + [0] * 30, 32)
    assert (v.kind, v.d, v.s) == ("rational", 1, 2)
    assert v.q == (1, -1)


def test_detect_periodic_thue_morse_irrational():
    tm = [oracles.thue_morse(i) for i in range(512)]
    v = detect_periodic_01(tm, 512)
    assert v.kind == "irrational_at_budget"
    assert v.budget == 512


def test_detect_periodic_input_guards():
    with pytest.raises(ValueError):
        detect_periodic_01([0, 1, 0], 3)
    with pytest.raises(NonBinaryCoefficient):
        detect_periodic_01([0, 1, 2, 0, 1], 5)


def test_detect_periodic_accepts_series():
    R = make_ring("zp", 7, 1)
    f = make_series(R, [1, 0] * 10, 20)
    v = detect_periodic_01(f, 20)
    assert (v.kind, v.d, v.s) == ("rational", 2, 0)


def test_detect_recurrence_fibonacci_mod5():
    fib = [0, 1]
    for _ in range(30):
        fib.append(fib[-1] + fib[-2])
    f = make_series(F5, fib[:32], 32)
    v = detect_recurrence(f, 3)
    assert v.kind == "rational"
    assert v.d == 2
    assert list(v.q) == [1, 4, 4]
    assert v == detect_recurrence(f, 3)


def test_detect_recurrence_geometric_mod7():
    geom = [pow(3, i, 7) for i in range(20)]
    f = make_series(F7, geom, 20)
    v = detect_recurrence(f, 2)
    assert (v.kind, v.d) == ("rational", 1)
    assert list(v.q) == [1, 4]


def test_detect_recurrence_thue_morse_f2():
    F2 = make_ring("zp", 2, 1)
    tm = [oracles.thue_morse(i) for i in range(64)]
    f = make_series(F2, tm, 64)
    v = detect_recurrence(f, 8)
    assert v.kind == "irrational_at_budget"


def test_detect_recurrence_rational_function_witness():
    # over exact Q: 1/(1-x) has q = 1 - x
    f = make_series(Z, [1] * 10, 10)
    v = detect_recurrence(f, 2)
    assert v.kind == "rational" and v.d == 1


def test_detect_recurrence_window_guard():
    f = make_series(F5, [1, 2, 3, 4], 4)
    with pytest.raises(WindowTooSmall):
        detect_recurrence(f, 3)
