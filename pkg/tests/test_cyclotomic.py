import cmath

import pytest
from hypothesis import given
from hypothesis import strategies as st

from metasum.cyclotomic import (
    CycNum,
    cyclotomic_polynomial,
    cyclotomic_polynomial_mobius,
    euler_totient,
    factorize,
    root_of_unity,
)
from oracles import cyclotomic_value

moduli = st.sampled_from([1, 2, 3, 4, 5, 6, 7, 9, 12, 15, 21, 25, 63])


@st.composite
def cycnums(draw, modulus=None):
    m = draw(moduli) if modulus is None else modulus
    coeffs = draw(st.lists(st.integers(-20, 20), min_size=0, max_size=2 * m))
    return CycNum(m, coeffs) if coeffs else CycNum.from_int(0)


def test_factorize_and_totient():
    assert factorize(360) == {2: 3, 3: 2, 5: 1}
    assert [euler_totient(k) for k in (1, 7, 12, 63)] == [1, 6, 4, 36]


@pytest.mark.parametrize("m", range(1, 40))
def test_cyclotomic_polynomial_two_constructions_agree(m):
    assert cyclotomic_polynomial(m) == cyclotomic_polynomial_mobius(m)
    assert len(cyclotomic_polynomial(m)) == euler_totient(m) + 1


@pytest.mark.parametrize("m", [3, 5, 8, 12, 21])
def test_cyclotomic_polynomial_vanishes_at_primitive_root(m):
    z = cmath.exp(2j * cmath.pi / m)
    value = sum(c * z**i for i, c in enumerate(cyclotomic_polynomial(m)))
    assert abs(value) < 1e-9


def test_roots_of_unity_examples():
    assert root_of_unity(0, 12).equals(1)
    assert root_of_unity(6, 12).equals(-1)
    zeta3 = root_of_unity(4, 12)
    assert abs(zeta3.to_complex() - cmath.exp(2j * cmath.pi / 3)) < 1e-12
    assert zeta3.equals(root_of_unity(1, 3))


def test_ring_examples():
    assert (CycNum.from_int(1) + CycNum.from_int(-1)).is_zero()
    z5 = root_of_unity(1, 5)
    assert (z5.conjugate() * z5).equals(1)
    total = sum((root_of_unity(a, 5) for a in range(1, 5)), CycNum.from_int(0))
    assert total.equals(-1)
    assert root_of_unity(1, 6).equals(-(root_of_unity(1, 3) ** 2))
    assert not root_of_unity(1, 7).equals(root_of_unity(2, 7))


def test_p_denominators():
    x = root_of_unity(2, 7) + 3
    assert x.scale(7).divide_by_p_power(7, 1).equals(x)
    assert x.divide_by_p_power(7, 2).scale(49).equals(x)


def test_to_complex_examples():
    assert CycNum.from_int(1).to_complex() == 1
    assert CycNum.from_int(-1).to_complex() == -1
    assert abs(root_of_unity(1, 4).to_complex() - 1j) < 1e-12
    assert abs(root_of_unity(1, 4).to_complex(precision=30) - 1j) < 1e-12


def test_json_round_trip():
    x = (root_of_unity(1, 15) * 4 - 7).divide_by_p_power(5, 3)
    assert CycNum.from_json(x.to_json()).equals(x)


def test_bad_construction():
    with pytest.raises(ValueError):
        CycNum(0, [1])
    with pytest.raises(ValueError):
        CycNum(3, [1], den_exp=1)


@given(cycnums(), cycnums())
def test_addition_matches_complex(a, b):
    assert abs((a + b).to_complex() - (a.to_complex() + b.to_complex())) < 1e-6


@given(cycnums(), cycnums())
def test_multiplication_matches_complex(a, b):
    assert abs((a * b).to_complex() - a.to_complex() * b.to_complex()) < 1e-6 * (1 + abs(a.to_complex() * b.to_complex()))


@given(cycnums(), cycnums(), cycnums())
def test_ring_axioms(a, b, c):
    assert ((a + b) * c).equals(a * c + b * c)
    assert ((a * b) * c).equals(a * (b * c))
    assert (a - a).is_zero()


@given(cycnums())
def test_canonical_form_is_unique(a):
    # the same value written with redundant coefficients normalizes identically
    doubled = CycNum(a.modulus, list(a.coeffs) + [0] * a.modulus)
    assert doubled.coeffs == a.coeffs
    assert a.equals(CycNum.from_json(a.to_json()))


@given(cycnums())
def test_conjugation_is_complex_conjugation(a):
    assert abs(a.conjugate().to_complex() - a.to_complex().conjugate()) < 1e-6


@given(moduli, st.integers(-50, 50))
def test_root_of_unity_value(m, k):
    assert abs(root_of_unity(k, m).to_complex() - cmath.exp(2j * cmath.pi * k / m)) < 1e-9


@given(st.integers(1, 30))
def test_power_sum_of_all_roots(m):
    total = sum((root_of_unity(a, m) for a in range(m)), CycNum.from_int(0))
    assert total.equals(1 if m == 1 else 0)


@given(st.sampled_from([5, 9, 12]), st.lists(st.integers(-5, 5), min_size=1, max_size=12))
def test_coefficients_agree_with_oracle(m, coeffs):
    assert abs(CycNum(m, coeffs).to_complex() - cyclotomic_value(coeffs, m)) < 1e-9
