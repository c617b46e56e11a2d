"""Coefficient-ring kinds: construction, canonical forms, valuations,
unit inversion, and the packed GF(2)[t] kernels."""

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from prepkit import (BadPrecision, CompositeModulus, NotAUnit, make_ring,
                     val_unit_decompose)
from prepkit.rings import (b2_deg, b2_divmod, b2_gcd, b2_mod, b2_mul,
                           b2_pow_mod, digits_from_mask, is_prime,
                           mask_from_digits)

SMALL = st.integers(min_value=-10 ** 6, max_value=10 ** 6)


def test_make_ring_validation():
    make_ring("zp", 5, 12)
    make_ring("fpt", 3, 10)
    make_ring("zmodpk", 2, 6)
    make_ring("z")
    make_ring("z", 7)
    make_ring("fpt_exact", 2)
    with pytest.raises(CompositeModulus):
        make_ring("zp", 6, 3)
    with pytest.raises(CompositeModulus):
        make_ring("fpt", 4, 2)
    with pytest.raises(BadPrecision):
        make_ring("zp", 5, 0)
    with pytest.raises(BadPrecision):
        make_ring("zmodpk", 2, -1)
    with pytest.raises(ValueError):
        make_ring("nope", 2, 2)


def test_ring_equality_and_desc():
    assert make_ring("zp", 5, 12) == make_ring("zp", 5, 12)
    assert make_ring("zp", 5, 12) != make_ring("zp", 5, 11)
    assert make_ring("zp", 5, 12) != make_ring("zmodpk", 5, 12)
    assert make_ring("z") == make_ring("z")
    assert make_ring("z", 2) != make_ring("z")


def test_intmod_goldens():
    R = make_ring("zp", 5, 3)
    assert R.canon(126) == 1
    assert R.invert_unit(R.from_int(2)) == oracles.inv_mod(2, 125)
    assert R.val(R.from_int(50)) == 2
    assert R.val(R.zero()) is None
    assert R.val(R.one()) == 0
    with pytest.raises(NotAUnit):
        R.invert_unit(R.from_int(5))


def test_val_unit_decompose():
    R = make_ring("zp", 5, 8)
    v, u = val_unit_decompose(R, R.from_int(50))
    assert (v, u % 5 != 0) == (2, True)
    assert R.mul(R.pow(R.uniformizer(), v), u) == R.from_int(50)
    T = make_ring("fpt", 3, 6)
    x = T.from_digits((0, 0, 2, 1))
    v, u = val_unit_decompose(T, x)
    assert v == 2 and T.val(u) == 0
    assert T.mul(T.pow(T.uniformizer(), v), u) == x


def test_exact_z_valuations():
    Z2 = make_ring("z", 2)
    assert Z2.val(Z2.from_int(48)) == 4
    assert Z2.val(Z2.from_int(7)) == 0
    Z5 = make_ring("z", 5)
    assert Z5.val(Z5.from_int(7)) == 0
    assert Z5.val(Z5.zero()) is None
    Z = make_ring("z")
    with pytest.raises(ValueError):
        Z.uniformizer()


def test_is_prime_small():
    primes = [2, 3, 5, 7, 11, 13, 97, 101]
    for n in primes:
        assert is_prime(n)
    for n in [0, 1, 4, 6, 9, 15, 91, 100]:
        assert not is_prime(n)


# ---------------------------------------------------------------- GF(2)[t]

def test_b2_kernels_golden():
    # (1 + t)(1 + t) = 1 + t^2 over GF(2)
    assert b2_mul(0b11, 0b11) == 0b101
    assert b2_mul(0b11, 0b11) == oracles.b2mul(0b11, 0b11)
    q, r = b2_divmod(0b1011, 0b11)
    assert b2_mul(q, 0b11) ^ r == 0b1011
    assert b2_deg(r) < b2_deg(0b11)
    assert b2_gcd(0b110, 0b10) == 0b10
    assert b2_gcd(0b111, 0b11) == 1


@given(st.integers(min_value=1, max_value=2 ** 24 - 1),
       st.integers(min_value=1, max_value=2 ** 12 - 1))
@settings(derandomize=True, deadline=None, max_examples=60)
def test_b2_divmod_identity(a, b):
    q, r = b2_divmod(a, b)
    assert b2_mul(q, b) ^ r == a
    assert r == b2_mod(a, b)
    assert b2_deg(r) < b2_deg(b)


@given(st.integers(min_value=0, max_value=2 ** 16 - 1),
       st.integers(min_value=0, max_value=64),
       st.integers(min_value=2, max_value=2 ** 10 - 1))
@settings(derandomize=True, deadline=None, max_examples=60)
def test_b2_pow_mod_matches_oracle(a, e, m):
    assert b2_pow_mod(a, e, m) == oracles.b2pow_mod(a, e, m)


def test_mask_digit_roundtrip():
    assert mask_from_digits((1, 0, 1, 1)) == 0b1101
    assert digits_from_mask(0b1101) == (1, 0, 1, 1)
    assert digits_from_mask(0b1, width=4) == (1, 0, 0, 0)
    assert digits_from_mask(0) == ()


def test_fpt_ring_arithmetic():
    T = make_ring("fpt", 3, 4)
    a = T.from_digits((1, 2))
    b = T.from_digits((2, 1))
    # (1 + 2t)(2 + t) = 2 + 5t + 2t^2 = 2 + 2t + 2t^2 mod 3
    assert T.mul(a, b) == T.from_digits((2, 2, 2))
    assert T.add(a, T.neg(a)) == T.zero()
    u = T.invert_unit(a)
    assert T.mul(a, u) == T.one()
    with pytest.raises(NotAUnit):
        T.invert_unit(T.uniformizer())
    assert T.val(T.from_digits((0, 0, 1))) == 2


def test_fpt2_matches_mask_kernels():
    T = make_ring("fpt", 2, 8)
    a = T.from_digits((1, 1, 0, 1))
    b = T.from_digits((0, 1, 1))
    am, bm = mask_from_digits(a), mask_from_digits(b)
    prod = b2_mul(am, bm) & ((1 << 8) - 1)
    assert mask_from_digits(T.mul(a, b)) == prod


def test_exact_fpt_divmod():
    E = make_ring("fpt_exact", 3)
    a = E.from_digits((1, 0, 2, 1))
    b = E.from_digits((2, 1))
    q, r = E.divmod(a, b)
    assert E.add(E.mul(q, b), r) == a
    assert r == E.zero() or E.deg(r) < E.deg(b)
    assert E.exact_div(E.mul(a, b), b) == a


@given(st.lists(SMALL, min_size=1, max_size=8),
       st.lists(SMALL, min_size=1, max_size=8))
@settings(derandomize=True, deadline=None, max_examples=40)
def test_convolve_matches_reference(xs, ys):
    for R in (make_ring("zp", 7, 4), make_ring("fpt", 2, 9), make_ring("z")):
        a = [R.from_int(x) for x in xs]
        b = [R.from_int(y) for y in ys]
        n = len(xs) + len(ys)
        assert R.convolve(a, b, n) == R.convolve_ref(a, b, n)


@given(SMALL, SMALL)
@settings(derandomize=True, deadline=None, max_examples=60)
def test_val_multiplicative(x, y):
    for R in (make_ring("zp", 3, 9), make_ring("z", 3)):
        a, b = R.from_int(x), R.from_int(y)
        va, vb = R.val(a), R.val(b)
        vp = R.val(R.mul(a, b))
        if va is None or vb is None:
            assert vp is None or R.prec is not None
        elif R.is_exact:
            assert vp == va + vb
        elif va + vb < R.prec:
            assert vp == va + vb


def test_unit_inverse_is_involutive():
    R = make_ring("zmodpk", 2, 6)
    for n in range(1, 64, 2):
        u = R.from_int(n)
        assert R.mul(u, R.invert_unit(u)) == R.one()
        assert R.invert_unit(R.invert_unit(u)) == u
