import itertools
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from metasum.charsums import PrimeContext, euler_phi, gauss_g, gauss_gml, gauss_h
from metasum.cyclotomic import CycNum
from metasum.expsum import (
    CompositeSumSpec,
    SumSpec,
    brute_force_H,
    cancellation_sum,
    composite_H,
    compositions,
    default_signs,
    generic_vanishing_applies,
    gl4_brute_force,
    gl4_closed_form,
    gl4_divisibility,
    hw_inequalities_hold,
    in_region_b,
    phifun_closed_form,
    support_condition,
    verify_twisted_mult_d,
    verify_twisted_mult_t,
)
from metasum.root_system import build_parabolic, build_root_datum
from oracles import gl4_sum

P3, P5, P7 = PrimeContext(3, 1), PrimeContext(5, 2), PrimeContext(7, 3)


def small_points(ctx, budget):
    for ell in itertools.product(range(3), repeat=4):
        l1, l2, l3, l4 = ell
        if ctx.p ** (l1 + 2 * l2 + 2 * l3 + l4) > budget:
            continue
        for m in itertools.product(range(2), repeat=3):
            yield ell, m


# Values first produced by the naive oracle in tests/oracles.py, then frozen.
FROZEN = [
    (P3, (1, 2, 2, 1), (0, 0, 0), -13122),
    (P3, (0, 1, 1, 0), (0, 0, 0), 18),
    (P3, (0, 2, 2, 0), (0, 0, 0), 486),
    (P3, (0, 2, 1, 1), (0, 0, 0), 0),
    (PrimeContext(5, 1), (0, 0, 0, 1), (0, 0, 0), -25),
]


@pytest.mark.parametrize("ctx, ell, m, value", FROZEN, ids=[f"{c.p}-{e}-{m}" for c, e, m, _ in FROZEN])
def test_frozen_values(ctx, ell, m, value):
    assert gl4_brute_force(ctx, ell, m).equals(value)
    assert gl4_closed_form(ctx, ell, m)[0].equals(value)


@pytest.mark.parametrize("ctx, ell, m, value", FROZEN[:2] + FROZEN[4:], ids=["p3-0110-oracle", "p3-1221-oracle", "p5-0001-oracle"])
def test_frozen_values_reproduce_oracle(ctx, ell, m, value):
    z = gl4_sum(ctx.p, ctx.n, ctx.generator, ell, m)
    assert abs(z - value) < 1e-6


@pytest.mark.parametrize("ctx", [P3, P5, P7], ids=["p3", "p5", "p7"])
def test_brute_force_matches_naive_oracle(ctx):
    checked = 0
    for ell, m in small_points(ctx, 20000):
        if not gl4_divisibility(ell, m):
            continue
        exact = gl4_brute_force(ctx, ell, m).to_complex()
        naive = gl4_sum(ctx.p, ctx.n, ctx.generator, ell, m)
        scale = max(1.0, abs(naive), ctx.p ** (2 * ell[3]))
        assert abs(exact - naive) < 1e-6 * scale, (ell, m)
        checked += 1
    assert checked > 50


def test_outside_divisibility_is_zero_by_convention():
    # the raw loop is nonzero here; the explicit sum is only defined inside
    assert abs(gl4_sum(3, 1, 2, (3, 1, 1, 0), (0, 0, 0)) - 324) < 1e-6
    assert gl4_brute_force(P3, (3, 1, 1, 0), (0, 0, 0)).is_zero()
    assert gl4_closed_form(P3, (3, 1, 1, 0), (0, 0, 0)) == (CycNum.from_int(0), "outside-divisibility")


@given(st.tuples(*[st.integers(0, 3)] * 3))
def test_zero_ell_gives_one(m):
    assert gl4_brute_force(P7, (0, 0, 0, 0), m).equals(1)
    assert brute_force_H(SumSpec(build_parabolic(build_root_datum("A", 3), 2), P7, (0,) * 4, m)).equals(1)
    assert gl4_closed_form(P7, (0, 0, 0, 0), m) == (CycNum.from_int(1), "trivial")


@given(st.tuples(*[st.integers(0, 6)] * 4), st.tuples(*[st.integers(0, 6)] * 3))
def test_support_condition_is_gl4_divisibility(ell, m):
    pd = build_parabolic(build_root_datum("A", 3), 2)
    assert support_condition(SumSpec(pd, P7, ell, m)) == gl4_divisibility(ell, m)


def test_support_condition_examples(gl4):
    assert not support_condition(SumSpec(gl4, P7, (2, 0, 0, 0), (0, 0, 0)))
    assert support_condition(SumSpec(gl4, P7, (0, 0, 0, 0), (0, 0, 0)))


def test_spec_validation(gl4):
    with pytest.raises(ValueError):
        SumSpec(gl4, P7, (0, 0, 0), (0, 0, 0))
    with pytest.raises(ValueError):
        SumSpec(gl4, P7, (0, 0, 0, -1), (0, 0, 0))
    with pytest.raises(ValueError):
        SumSpec(gl4, P7, (0, 0, 0, 0), (0, 0, 0), signs={(1, (2, 1)): 1})
    with pytest.raises(ValueError):
        CompositeSumSpec(gl4, (11, 1, 1, 1), (1, 1, 1), {7: P7})


@pytest.mark.parametrize("ctx", [P3, P5, P7], ids=["p3", "p5", "p7"])
def test_general_route_matches_gl4_route(ctx, gl4):
    for ell in itertools.product(range(3), repeat=4):
        for m in [(0, 0, 0), (1, 0, 2), (2, 1, 0)]:
            assert brute_force_H(SumSpec(gl4, ctx, ell, m)).equals(gl4_brute_force(ctx, ell, m)), (ell, m)


def test_histogram_and_modular_gl4_engines_agree():
    for ell in [(1, 1, 1, 1), (2, 1, 2, 1), (0, 2, 1, 2)]:
        a = gl4_brute_force(P7, ell, (1, 1, 1), method="histogram")
        b = gl4_brute_force(P7, ell, (1, 1, 1), method="modular")
        assert a.equals(b)


def test_degenerate_l1_formula_by_hand():
    ell, m = (0, 1, 1, 2), (1, 1, 1)
    l1, l2, l3, l4 = ell
    m1, m2, m3 = m
    expected = gauss_gml(P7, m3, l2) * gauss_gml(P7, m1, l3) * gauss_gml(P7, m2 + l2 + l3, l2 + l3 + l4)
    expected = expected.scale(7 ** (2 * l4))
    value, label = gl4_closed_form(P7, ell, m)
    assert label == "degenerate-l1"
    assert value.equals(expected)
    assert gl4_brute_force(P7, ell, m).equals(expected)


def test_case_1_formula_by_hand():
    ell, m = (1, 1, 1, 1), (1, 1, 1)
    value, label = gl4_closed_form(P7, ell, m)
    assert label == "case-1"
    expected = (gauss_h(P7, 1) * gauss_gml(P7, 1, 1) * gauss_gml(P7, 1, 1) * gauss_gml(P7, 3, 3)).scale(49)
    assert value.equals(expected)


def test_region_b_point():
    ell, m = (1, 2, 2, 1), (0, 0, 0)
    assert in_region_b(ell, m) and not hw_inequalities_hold(ell, m)
    value, label = gl4_closed_form(P3, ell, m)
    assert label == "region-b"
    assert value.equals(gl4_brute_force(P3, ell, m))


def test_region_b_uses_trivial_gauss_sum_at_l4_zero():
    # l1 = l4 = 0 makes g_0(m2, 0) = 1
    ell, m = (0, 2, 2, 0), (0, 0, 0)
    value, label = gl4_closed_form(P3, ell, m)
    assert label == "region-b"
    assert value.equals(gauss_h(P3, 4).scale(3 ** (4 - 2)))


def test_case_4a_formula_by_hand():
    # l4 < l1, l1 + l2 = m3 + l4 + 1, l1 + l3 = m1 + l4 + 1
    ell, m = (2, 1, 1, 1), (1, 1, 1)
    value, label = gl4_closed_form(P7, ell, m)
    assert label == "case-4A"
    expected = (gauss_gml(P7, 1, 1) * gauss_h(P7, 4) * gauss_g(P7, 1).conjugate() * gauss_g(P7, 1).conjugate()).scale(49)
    assert value.equals(expected)
    assert value.equals(gl4_brute_force(P7, ell, m))


@pytest.mark.parametrize("ctx", [P5, P7], ids=["p5", "p7"])
def test_phifun_on_multiples_of_n(ctx, gl4):
    n = ctx.n
    spec = SumSpec(gl4, ctx, (n,) * 4, (20, 20, 20))
    eps = [sum(gl4.pairing[k][i] for i in range(k + 1, 4)) * n for k in range(4)]
    expected = ctx.p ** sum(eps) * euler_phi(ctx.p, n) ** 4
    assert phifun_closed_form(spec).equals(expected)
    assert brute_force_H(spec).equals(expected)


def test_phifun_zero_when_n_does_not_divide(gl4):
    spec = SumSpec(gl4, P7, (1, 0, 0, 0), (20, 20, 20))
    assert phifun_closed_form(spec).is_zero()
    assert brute_force_H(spec).is_zero()
    assert phifun_closed_form(SumSpec(gl4, P7, (0, 0, 0, 0), (0, 0, 0))).equals(1)
    assert phifun_closed_form(SumSpec(gl4, P7, (0, 0, 0, 3), (0, 0, 0))) is None


def test_generic_vanishing_examples(gl4):
    assert not generic_vanishing_applies(SumSpec(gl4, P7, (0, 0, 0, 0), (0, 0, 0)))
    assert not generic_vanishing_applies(SumSpec(gl4, P7, (2, 2, 2, 2), (30, 30, 30)))
    # both node-1 and node-3 excesses equal 4: no strict maximum, and the
    # point lies outside divisibility, where S = 0 anyway
    spec = SumSpec(gl4, P7, (3, 1, 1, 0), (0, 0, 0))
    assert not generic_vanishing_applies(spec)
    assert brute_force_H(spec).is_zero()
    spec = SumSpec(gl4, P7, (0, 0, 0, 3), (0, 0, 0))
    assert generic_vanishing_applies(spec)
    assert brute_force_H(spec).is_zero()


FLIPS = list(itertools.product((1, -1), repeat=4))


@pytest.mark.parametrize("ell", [(1, 1, 1, 1), (1, 2, 1, 1), (2, 1, 1, 2), (0, 1, 2, 1)])
@pytest.mark.parametrize("ctx", [P5, P7], ids=["p5", "p7"])
def test_sign_insensitivity(gl4, ctx, ell):
    keys = sorted(default_signs(gl4))
    m = (1, 0, 1)
    base = brute_force_H(SumSpec(gl4, ctx, ell, m))
    for flip in FLIPS:
        signs = dict(zip(keys, flip))
        assert brute_force_H(SumSpec(gl4, ctx, ell, m, signs=signs)).equals(base), flip


def test_default_signs_off_gl4():
    pd = build_parabolic(build_root_datum("A", 4), 2)
    assert set(default_signs(pd).values()) == {1}


def test_composite_matches_prime_power(gl4):
    contexts = {7: P7}
    for ell in [(1, 1, 0, 1), (0, 1, 1, 2), (1, 2, 1, 1)]:
        d = tuple(7**x for x in ell)
        spec = CompositeSumSpec(gl4, d, (7, 1, 7), contexts)
        assert composite_H(spec).equals(brute_force_H(SumSpec(gl4, P7, ell, (1, 0, 1))))
    assert composite_H(CompositeSumSpec(gl4, (1, 1, 1, 1), (1, 1, 1), contexts)).equals(1)


TWO_PRIMES = {7: P7, 13: PrimeContext(13, 3)}


def test_twisted_d_examples(gl4):
    spec = CompositeSumSpec(gl4, (7, 13, 91, 7), (7, 13, 7), TWO_PRIMES)
    split = (7, 1, 7, 7)
    swapped = tuple(d // e for d, e in zip(spec.d, split))
    assert verify_twisted_mult_d(spec, split)
    assert verify_twisted_mult_d(spec, swapped)
    assert verify_twisted_mult_d(spec, (1, 1, 1, 1))
    with pytest.raises(ValueError):
        verify_twisted_mult_d(spec, (7, 13, 7, 7))  # not coprime to the rest


def test_twisted_t_examples(gl4):
    spec = CompositeSumSpec(gl4, (7, 1, 7, 7), (91, 13, 7), TWO_PRIMES)
    assert verify_twisted_mult_t(spec, (13, 13, 1))
    assert verify_twisted_mult_t(spec, (1, 1, 1))
    unit = CompositeSumSpec(gl4, (1, 1, 1, 1), (13, 13, 13), TWO_PRIMES)
    assert composite_H(unit).equals(1)
    assert verify_twisted_mult_t(unit, (13, 13, 13))
    with pytest.raises(ValueError):
        verify_twisted_mult_t(spec, (7, 1, 1))


@given(st.integers(0, 7), st.integers(1, 4))
def test_compositions(total, parts):
    found = list(compositions(total, parts))
    assert len(found) == math.comb(total + parts - 1, parts - 1)
    assert len(set(found)) == len(found)
    assert all(sum(c) == total and len(c) == parts and min(c) >= 0 for c in found)


LONE_EXCEPTIONAL_POINT = pytest.mark.xfail(
    strict=True,
    reason="only l = (0, 3, 3, 0) survives outside the polytope and nothing cancels it",
)


@pytest.mark.parametrize(
    "m, k",
    [
        ((0, 0, 0), 1),
        ((0, 0, 0), 4),
        ((0, 0, 0), 6),
        ((2, 2, 2), 3),
        pytest.param((1, 1, 1), 6, marks=LONE_EXCEPTIONAL_POINT),
    ],
)
def test_cancellation_examples(m, k):
    assert cancellation_sum(P7, m, k).is_zero()


def test_cancellation_counterexample_value():
    # q^(l2 + l3 - k') h(6) with k' = 2, checked against the naive loop at p = 3
    assert cancellation_sum(P3, (1, 1, 1), 6).equals(3**4 * euler_phi(3, 6))
    assert cancellation_sum(P7, (1, 1, 1), 6).equals(7**4 * euler_phi(7, 6))
    assert abs(gl4_sum(3, 1, 2, (0, 3, 3, 0), (1, 1, 1)) - 39366) < 1e-5


def test_cancellation_rejects_nonpositive_k():
    with pytest.raises(ValueError):
        cancellation_sum(P7, (0, 0, 0), 0)


def test_unknown_method(gl4):
    with pytest.raises(ValueError):
        gl4_brute_force(P7, (1, 1, 1, 1), (1, 1, 1), method="fft")
