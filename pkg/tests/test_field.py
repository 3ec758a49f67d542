import itertools

import pytest

from pirlab.field import FieldError, PrimeField, fe_arith, fe_inv, field_new

SMALL_PRIMES = [2, 3, 5, 7, 11, 13]


def test_field_new_accepts_primes():
    assert field_new(5).p == 5
    assert field_new(2).p == 2
    assert field_new(2**31 - 1).p == 2**31 - 1


@pytest.mark.parametrize("p, factor", [(6, 2), (9, 3), (15, 3), (49, 7), (1, None), (0, None)])
def test_field_new_rejects_non_primes(p, factor):
    with pytest.raises(FieldError) as err:
        field_new(p)
    if factor is not None:
        assert f"divisible by {factor}" in str(err.value)


def test_arith_examples():
    F = PrimeField(5)
    assert fe_arith(F(3), F(4), "add") == F(2)
    assert fe_arith(F(4), F(4), "mul") == F(1)
    assert fe_arith(F(1), F(3), "sub") == F(3)
    for x in range(5):
        assert fe_arith(F(0), F(x), "mul") == F(0)


def test_inverse_examples():
    F = PrimeField(5)
    assert fe_inv(F(2)) == F(3)
    assert fe_inv(F(4)) == F(4)
    for p in SMALL_PRIMES:
        assert fe_inv(PrimeField(p)(1)).value == 1


def test_zero_has_no_inverse():
    with pytest.raises(ZeroDivisionError):
        fe_inv(PrimeField(7)(0))


def test_mixed_fields_rejected():
    with pytest.raises(FieldError):
        fe_arith(PrimeField(5)(1), PrimeField(7)(1), "add")
    with pytest.raises(FieldError):
        PrimeField(5)(1) * PrimeField(3)(1)


def test_canonical_residues():
    F = PrimeField(7)
    assert F(-1).value == 6
    assert F(15) == F(1)
    assert hash(F(15)) == hash(F(1))


@pytest.mark.parametrize("p", SMALL_PRIMES)
def test_field_axioms_exhaustive(p):
    F = PrimeField(p)
    els = F.elements()
    zero, one = F.zero, F.one
    for a, b in itertools.product(els, repeat=2):
        assert a + b == b + a
        assert a * b == b * a
        assert (a - b) + b == a
    for a, b, c in itertools.product(els, repeat=3):
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
    for a in els:
        assert a + zero == a and a * one == a
        if a != zero:
            inverses = [b for b in els if a * b == one]
            assert inverses == [a.inverse()]
            assert a.inverse().inverse() == a
