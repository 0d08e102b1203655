import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from metasum._kernel import IllDefinedSumError, SumProblem, _cyclic_convolve
from metasum.charsums import PrimeContext, gauss_sum
from metasum.expsum import SumSpec, _composite_problem, gl4_parabolic
from metasum.root_system import build_parabolic, build_root_datum

CTX = {(p, n): PrimeContext(p, n) for p, n in [(3, 1), (5, 2), (7, 3)]}


@pytest.mark.parametrize("pn", sorted(CTX))
@pytest.mark.parametrize("m, ell", [(0, 1), (0, 2), (1, 2), (2, 2), (0, 3), (2, 3)])
def test_single_variable_problem_is_a_gauss_sum(pn, m, ell):
    ctx = CTX[pn]
    p = ctx.p
    problem = SumProblem([p**ell], [p**ell], [1], [], [(0, p**m, p**ell)], {p: ctx}, ctx.n)
    expected = gauss_sum(ctx, 1, m, ell)
    assert problem.evaluate_histogram().equals(expected)
    assert problem.evaluate_modular().equals(expected)


def test_empty_problem_is_one():
    problem = SumProblem([], [], [], [], [], {}, 1)
    assert problem.evaluate_histogram().equals(1)


def test_pair_term_needs_distinct_variables():
    ctx = CTX[(3, 1)]
    with pytest.raises(ValueError):
        SumProblem([9, 9], [9, 9], [1, 1], [(0, 0, 1, 9)], [], {3: ctx}, 1)


def test_missing_context_is_rejected():
    with pytest.raises(ValueError):
        SumProblem([5], [5], [1], [], [(0, 1, 5)], {}, 1)


def test_non_periodic_summand_is_rejected():
    ctx = CTX[(3, 1)]
    # c ranges mod 3 but the additive character needs c mod 9
    with pytest.raises(IllDefinedSumError):
        SumProblem([3], [3], [1], [], [(0, 1, 9)], {3: ctx}, 1)


def test_lift_sensitive_inverse_is_flagged():
    ctx = CTX[(3, 1)]
    # b_1 is defined mod 3 but appears over the denominator 9
    problem = SumProblem([9, 9], [3, 9], [1, 1], [(0, 1, 1, 9)], [], {3: ctx}, 1)
    assert problem.lift_sensitive
    alternate = problem.with_alternate_lifts([0])
    assert problem.multiplicity == alternate.multiplicity


@given(
    st.lists(st.integers(0, 40), min_size=1, max_size=25),
    st.lists(st.integers(0, 40), min_size=1, max_size=25),
)
def test_cyclic_convolution_matches_naive(a_list, b_list):
    M = max(len(a_list), len(b_list))
    a = np.zeros(M, dtype=np.int64)
    b = np.zeros(M, dtype=np.int64)
    a[: len(a_list)] = a_list
    b[: len(b_list)] = b_list
    naive = [sum(int(a[i]) * int(b[(k - i) % M]) for i in range(M)) for k in range(M)]
    assert [int(x) for x in _cyclic_convolve(a, b, M)] == naive


def test_cyclic_convolution_sparse_path():
    M = 1000
    a = np.zeros(M, dtype=np.int64)
    a[[3, 700]] = [2, 5]
    b = np.arange(M, dtype=np.int64)
    out = _cyclic_convolve(a, b, M)
    expected = 2 * np.roll(b, 3) + 5 * np.roll(b, 700)
    assert np.array_equal(np.asarray(out, dtype=np.int64), expected)


ells = st.tuples(*[st.integers(0, 2)] * 4)
ms = st.tuples(*[st.integers(0, 2)] * 3)


@given(st.sampled_from(sorted(CTX)), ells, ms)
def test_engines_agree_on_gl4(pn, ell, m):
    spec = SumSpec(gl4_parabolic(), CTX[pn], ell, m)
    problem = _composite_problem(spec.to_composite())
    assert problem.evaluate_histogram().equals(problem.evaluate_modular())


@given(st.sampled_from([("A", 2, 1), ("A", 3, 1), ("A", 4, 2), ("D", 4, 1), ("B", 3, 1), ("C", 3, 3)]), st.data())
def test_engines_agree_on_other_parabolics(key, data):
    kind, rank, node = key
    pd = build_parabolic(build_root_datum(kind, rank), node)
    ell = data.draw(st.tuples(*[st.integers(0, 1)] * pd.size))
    m = data.draw(st.tuples(*[st.integers(0, 2)] * rank))
    spec = SumSpec(pd, CTX[(7, 3)], ell, m)
    try:
        problem = _composite_problem(spec.to_composite())
    except IllDefinedSumError:
        return
    assert problem.evaluate_histogram().equals(problem.evaluate_modular())
