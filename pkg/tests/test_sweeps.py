import pytest

from metasum.charsums import PrimeContext
from metasum.expsum import gl4_parabolic
from metasum.root_system import build_parabolic, build_root_datum
from metasum.sweeps import (
    THEOREMS,
    GL4Matrix,
    SweepResult,
    box,
    parallel_map,
    sweep_cancel,
    sweep_closed_form,
    sweep_gauss_identities,
    sweep_phifun,
    sweep_polytope_equiv,
    sweep_region_b,
    sweep_stringmatch,
    sweep_structure,
    sweep_support,
    sweep_transition_inverse,
    sweep_twisted_d,
    sweep_twisted_t,
    sweep_vanish,
)

P5 = PrimeContext(5, 2)


@pytest.fixture(scope="module")
def small_matrix():
    return GL4Matrix.compute(P5, 1, [(0, 0, 0), (1, 0, 1)])


def test_box():
    assert box(1, 2) == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert box(0, 3) == [(0, 0, 0)]


def _square(x):
    return x * x


def test_parallel_map_preserves_order():
    items = list(range(10))
    assert parallel_map(_square, items) == [x * x for x in items]
    assert parallel_map(_square, items, workers=2) == [x * x for x in items]


def test_sweep_result_bookkeeping():
    res = SweepResult("demo")
    assert res.ok
    res.checked = 3
    res.fail(ell=[1, 0, 0, 0])
    assert not res.ok
    assert res.summary() == "demo: 3 checked, 1 counterexamples"


def test_matrix_shape(small_matrix):
    assert len(small_matrix.values) == 16 * 2
    assert sum(1 for _ in small_matrix.points()) == 32


def test_gl4_sweeps_on_small_matrix(small_matrix):
    for sweep in (sweep_closed_form, sweep_support, sweep_region_b):
        res = sweep(small_matrix)
        assert res.ok, res.counterexamples
    assert sweep_closed_form(small_matrix).checked == 32
    assert "cases" in sweep_closed_form(small_matrix).report


def test_stringmatch_report(small_matrix):
    res = sweep_stringmatch(small_matrix)
    assert "outcomes" in res.report
    assert sum(res.report["outcomes"].values()) >= res.checked


def test_cancel_sweep():
    res = sweep_cancel(PrimeContext(7, 3), [(0, 0, 0)], 5)
    assert res.ok and res.checked == 5


def test_general_sweeps():
    pd = build_parabolic(build_root_datum("A", 2), 1)
    ctx = PrimeContext(7, 3)
    assert sweep_phifun(pd, ctx, 2, box(1, 2)).ok
    assert sweep_vanish(pd, ctx, 2, box(1, 2)).ok


def test_twisted_sweeps():
    contexts = {7: PrimeContext(7, 3), 13: PrimeContext(13, 3)}
    res = sweep_twisted_d(gl4_parabolic(), contexts, samples=8, seed=3)
    assert res.ok and res.checked == 8
    res = sweep_twisted_t(gl4_parabolic(), contexts, samples=8, seed=3)
    assert res.ok and res.checked == 8


def test_crystal_and_structure_sweeps():
    assert sweep_polytope_equiv(1).ok
    res = sweep_transition_inverse(2, 2)
    assert res.ok and res.report["words"] == 2
    assert sweep_structure(4).ok


def test_gauss_sweep_covers_trivial_character():
    res = sweep_gauss_identities([PrimeContext(3, 1), PrimeContext(13, 6)], k_max=4)
    assert res.ok
    assert res.checked == 4 + 1 + 4 + 2


def test_theorem_names_unique():
    assert len(set(THEOREMS)) == len(THEOREMS)
    assert {"support", "cancel", "stringmatch", "polytope-equiv"} <= set(THEOREMS)
