import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thetaforge import ffield
from thetaforge.ffield import (PRIMITIVE_POLYS, FieldElement, field, largest_prime_power_with,
                               random_element)

from oracles import (brute_inverse, brute_largest_prime_power, from_digits,
                     is_prime_power_bruteforce, poly_mul_mod, to_digits)

SMALL_Q = [2, 3, 4, 5, 7, 8, 9]


def el(q, v):
    return FieldElement(field(q), v)


def test_add_examples():
    assert ffield.add(el(5, 3), el(5, 4)).value == 2
    assert ffield.add(el(2, 1), el(2, 1)).value == 0
    F9 = field(9)
    x = F9.from_digits((0, 1))
    assert F9.add(x, F9.mul(2, x)) == 0


def test_inverse_examples():
    assert ffield.inv(el(5, 2)).value == 3 == brute_inverse(5, 2)
    for q in SMALL_Q + [11, 16, 27]:
        assert ffield.inv(el(q, 1)).value == 1


def test_pow_fermat():
    acc = 1
    for _ in range(6):
        acc = acc * 3 % 7
    assert ffield.power(el(7, 3), 6).value == acc == 1
    assert field(7).pow(0, 0) == 1


def test_inverse_of_zero_raises():
    with pytest.raises(ZeroDivisionError):
        el(5, 0).inverse()
    with pytest.raises(ZeroDivisionError):
        field(9).inv(0)


def test_mismatched_fields():
    with pytest.raises(ValueError):
        el(5, 1) + el(7, 1)
    with pytest.raises(ValueError):
        ffield.mul(el(4, 1), el(2, 1))


def test_int_operands_coerced():
    a = el(7, 3)
    assert (a + 5).value == 1
    assert (a * 3).value == 2
    assert (a / 3).value == 1


@pytest.mark.parametrize("q", [1, 6, 10, 12, 15, 100])
def test_rejects_non_prime_powers(q):
    with pytest.raises(ValueError):
        field(q)


def test_prime_power_detection_matches_trial_division():
    for q in range(2, 600):
        assert ffield.is_prime_power(q) == is_prime_power_bruteforce(q)


@pytest.mark.parametrize("bound,ell,q", [(54, 3, 3), (250, 3, 5), (8, 2, 2)])
def test_largest_prime_power_examples(bound, ell, q):
    assert largest_prime_power_with(bound, ell).q == q


def test_largest_prime_power_against_enumeration():
    for ell in (1, 2, 3):
        for bound in range(2 * 2**ell, 700, 7):
            got = largest_prime_power_with(bound, ell).q
            assert got == brute_largest_prime_power(bound, ell)
            assert 2 * got**ell <= bound


def test_largest_prime_power_too_small():
    with pytest.raises(ValueError):
        largest_prime_power_with(7, 2)


def test_random_element_frequency():
    rng = np.random.default_rng(0)
    F2 = field(2)
    ones = sum(random_element(F2, rng).value for _ in range(10000))
    assert 0.47 <= ones / 10000 <= 0.53


def test_random_element_deterministic():
    def draw():
        rng = np.random.default_rng(5)
        return [random_element(field(3), rng).value for _ in range(50)]

    assert draw() == draw()


def test_random_element_coverage():
    rng = np.random.default_rng(1)
    seen = {random_element(field(5), rng).value for _ in range(500)}
    assert seen == set(range(5))


@pytest.mark.parametrize("q", SMALL_Q)
def test_field_axioms_exhaustive(q):
    F = field(q)
    els = range(q)
    for a, b in itertools.product(els, els):
        assert F.add(a, b) == F.add(b, a)
        assert F.mul(a, b) == F.mul(b, a)
        assert F.add(a, F.neg(a)) == 0
    for a, b, c in itertools.product(els, els, els):
        assert F.add(F.add(a, b), c) == F.add(a, F.add(b, c))
        assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
        assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    for a in range(1, q):
        assert F.mul(a, F.inv(a)) == 1


@settings(max_examples=200, deadline=None)
@given(q=st.sampled_from([11, 13, 16, 25, 27, 32, 49, 81, 101, 125, 243, 256, 65521]),
       data=st.data())
def test_field_axioms_random(q, data):
    F = field(q)
    a, b, c = (data.draw(st.integers(0, q - 1)) for _ in range(3))
    assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
    assert F.sub(F.add(a, b), b) == a
    if a:
        assert F.mul(a, F.inv(a)) == 1


@pytest.mark.parametrize("q", [4, 8, 9])
def test_extension_matches_polynomial_tables(q):
    F = field(q)
    for a, b in itertools.product(range(q), repeat=2):
        want = from_digits(poly_mul_mod(to_digits(a, F.p, F.k), to_digits(b, F.p, F.k),
                                        F.modulus, F.p), F.p)
        assert F.mul(a, b) == want


def test_pinned_polynomials_are_primitive_everywhere():
    # every table entry yields an order q-1 generator; spot-check products too
    rng = np.random.default_rng(3)
    for (p, k), mod in PRIMITIVE_POLYS.items():
        F = field(p**k)
        assert F.modulus == mod
        for a, b in rng.integers(0, F.q, size=(5, 2)).tolist():
            want = from_digits(poly_mul_mod(to_digits(a, p, k), to_digits(b, p, k), mod, p), p)
            assert F.mul(a, b) == want


def test_vectorised_ops_match_scalar():
    for q in (7, 9, 16):
        F = field(q)
        a = np.arange(q).repeat(q)
        b = np.tile(np.arange(q), q)
        assert F.vadd(a, b).tolist() == [F.add(x, y) for x, y in zip(a.tolist(), b.tolist())]
        assert F.vmul(a, b).tolist() == [F.mul(x, y) for x, y in zip(a.tolist(), b.tolist())]
