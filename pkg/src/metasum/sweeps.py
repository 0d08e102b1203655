"""Exhaustive verification sweeps shared by the command line and the test suite.

Each sweep walks its grid in lexicographic order and returns a
:class:`SweepResult` listing every counterexample it met.  GL(4) sweeps that
need S_{l,m} on a whole box share one :class:`GL4Matrix`, so a box is brute
forced once no matter how many statements are checked against it.
"""

from __future__ import annotations

import functools
import itertools
import random
from collections import Counter
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any

from metasum.charsums import PrimeContext, gauss_g, gauss_h
from metasum.crystal import (
    applicable_moves,
    hw_membership_lusztig,
    hw_membership_string,
    relative_string_from_ell,
    stringmatching_check,
    transition,
)
from metasum.cyclotomic import CycNum
from metasum.expsum import (
    CompositeSumSpec,
    IllDefinedSumError,
    SumSpec,
    _composite_support,
    brute_force_H,
    cancellation_sum,
    generic_vanishing_applies,
    gl4_brute_force,
    gl4_closed_form,
    hw_inequalities_hold,
    in_region_b,
    phifun_closed_form,
    verify_twisted_mult_d,
    verify_twisted_mult_t,
)
from metasum.root_system import (
    ParabolicData,
    build_parabolic,
    build_root_datum,
    commutation_coefficient_violations,
    cominuscule_parabolics,
    convex_order_violations,
    denominator_identity_violations,
    long_word,
    pairing_violations,
)

__all__ = [
    "THEOREMS",
    "GL4Matrix",
    "SweepResult",
    "box",
    "parallel_map",
    "sweep_cancel",
    "sweep_closed_form",
    "sweep_dmod_identity",
    "sweep_gauss_identities",
    "sweep_pairing_nonneg",
    "sweep_phifun",
    "sweep_polytope_equiv",
    "sweep_region_b",
    "sweep_stringmatch",
    "sweep_structure",
    "sweep_support",
    "sweep_transition_inverse",
    "sweep_twisted_d",
    "sweep_twisted_t",
    "sweep_vanish",
]

Ell = tuple[int, ...]


@dataclass
class SweepResult:
    """Outcome of one sweep: how many points were checked and which failed."""

    theorem: str
    checked: int = 0
    counterexamples: list[dict] = field(default_factory=list)
    report: dict[str, Any] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.counterexamples

    def fail(self, **point: Any) -> None:
        self.counterexamples.append(point)

    def summary(self) -> str:
        return f"{self.theorem}: {self.checked} checked, {len(self.counterexamples)} counterexamples"


def box(bound: int, length: int) -> list[Ell]:
    """All vectors in [0, bound]^length, lexicographically."""
    return list(itertools.product(range(bound + 1), repeat=length))


def parallel_map(fn: Callable, items: Sequence, workers: int = 1) -> list:
    """``[fn(x) for x in items]``, optionally over worker processes, in input order."""
    items = list(items)
    if workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


# -- GL(4) value matrix --------------------------------------------------------------


def _gl4_row(ell: Ell, ctx: PrimeContext, ms: tuple[Ell, ...]) -> list[CycNum]:
    return [gl4_brute_force(ctx, ell, m) for m in ms]


@dataclass
class GL4Matrix:
    """Brute-force S_{l,m} for every l in [0, ell_max]^4 and m in ``ms``."""

    ctx: PrimeContext
    ells: list[Ell]
    ms: list[Ell]
    values: dict[tuple[Ell, Ell], CycNum]

    @classmethod
    def compute(
        cls, ctx: PrimeContext, ell_max: int, ms: Iterable[Sequence[int]], workers: int = 1
    ) -> GL4Matrix:
        ells = box(ell_max, 4)
        ms = [tuple(int(x) for x in m) for m in ms]
        rows = parallel_map(functools.partial(_gl4_row, ctx=ctx, ms=tuple(ms)), ells, workers)
        values = {(ell, m): v for ell, row in zip(ells, rows) for m, v in zip(ms, row)}
        return cls(ctx, ells, ms, values)

    def points(self):
        for ell in self.ells:
            for m in self.ms:
                yield ell, m, self.values[(ell, m)]


def _point(ctx: PrimeContext, ell: Sequence[int], m: Sequence[int]) -> dict:
    return {"p": ctx.p, "n": ctx.n, "ell": list(ell), "m": list(m)}


def sweep_closed_form(matrix: GL4Matrix) -> SweepResult:
    """Closed forms agree exactly with the brute-force sum."""
    res = SweepResult("closed-form")
    labels: Counter = Counter()
    for ell, m, value in matrix.points():
        closed, label = gl4_closed_form(matrix.ctx, ell, m)
        labels[label] += 1
        res.checked += 1
        if not closed.equals(value):
            res.fail(**_point(matrix.ctx, ell, m), case=label)
    res.report["cases"] = dict(sorted(labels.items()))
    return res


def sweep_support(matrix: GL4Matrix) -> SweepResult:
    """S vanishes outside the highest-weight region and the exceptional plane."""
    res = SweepResult("support")
    outside = 0
    for ell, m, value in matrix.points():
        if hw_inequalities_hold(ell, m) or in_region_b(ell, m):
            continue
        outside += 1
        res.checked += 1
        if not value.is_zero():
            res.fail(**_point(matrix.ctx, ell, m))
    res.report["outside_points"] = outside
    return res


def sweep_region_b(matrix: GL4Matrix) -> SweepResult:
    """Every exceptional-plane point matches its Gauss-sum formula."""
    res = SweepResult("region-b")
    for ell, m, value in matrix.points():
        if hw_inequalities_hold(ell, m) or not in_region_b(ell, m):
            continue
        closed, label = gl4_closed_form(matrix.ctx, ell, m)
        if label == "outside-divisibility":
            continue
        res.checked += 1
        if label != "region-b" or not closed.equals(value):
            res.fail(**_point(matrix.ctx, ell, m), case=label)
    return res


def sweep_stringmatch(matrix: GL4Matrix) -> SweepResult:
    """q^{2 l1 - 2 l4} S = G(P) at every generic pattern point.

    Points in the excluded configurations and points outside the divisibility
    conditions are tabulated in ``report`` but never counted as failures.
    """
    res = SweepResult("stringmatch")
    tally: Counter = Counter()
    for ell, m, value in matrix.points():
        outcome = stringmatching_check(matrix.ctx, ell, m, value)
        if outcome.status == "outside-polytope":
            continue
        tally[(outcome.status, bool(outcome.holds))] += 1
        if outcome.applicable:
            res.checked += 1
            if not outcome.holds:
                res.fail(**_point(matrix.ctx, ell, m), case=gl4_closed_form(matrix.ctx, ell, m)[1])
    res.report["outcomes"] = {f"{status}/{'match' if held else 'differ'}": k for (status, held), k in sorted(tally.items())}
    return res


# -- cancellation --------------------------------------------------------------------


def sweep_cancel(ctx: PrimeContext, ms: Iterable[Sequence[int]], k_max: int) -> SweepResult:
    """The weight-k sum of S over l outside the polytope is 0 for k = 1..k_max."""
    res = SweepResult("cancel")
    for m in ms:
        for k in range(1, k_max + 1):
            res.checked += 1
            total = cancellation_sum(ctx, m, k)
            if not total.is_zero():
                res.fail(p=ctx.p, n=ctx.n, m=list(m), k=k, total=total.to_json())
    return res


# -- general parabolics --------------------------------------------------------------


def _general_point(pd: ParabolicData, ctx: PrimeContext, ell: Ell, m: Ell) -> tuple[SumSpec, CycNum | None]:
    spec = SumSpec(pd, ctx, ell, m)
    try:
        return spec, brute_force_H(spec)
    except IllDefinedSumError:
        return spec, None


def _general_grid(pd: ParabolicData, ell_max: int, ms: Iterable[Sequence[int]]):
    ms = [tuple(m) for m in ms]
    for ell in box(ell_max, pd.size):
        for m in ms:
            yield ell, m


def sweep_phifun(
    pd: ParabolicData, ctx: PrimeContext, ell_max: int, ms: Iterable[Sequence[int]]
) -> SweepResult:
    """The Euler-phi evaluation equals the brute-force sum wherever it applies."""
    res = SweepResult("phifun")
    for ell, m in _general_grid(pd, ell_max, ms):
        spec = SumSpec(pd, ctx, ell, m)
        closed = phifun_closed_form(spec)
        if closed is None:
            continue
        res.checked += 1
        _, value = _general_point(pd, ctx, ell, m)
        if value is None or not closed.equals(value):
            res.fail(p=ctx.p, n=ctx.n, ell=list(ell), m=list(m))
    return res


def sweep_vanish(
    pd: ParabolicData, ctx: PrimeContext, ell_max: int, ms: Iterable[Sequence[int]]
) -> SweepResult:
    """The brute-force sum is 0 wherever a generic vanishing criterion applies."""
    res = SweepResult("vanish")
    for ell, m in _general_grid(pd, ell_max, ms):
        spec = SumSpec(pd, ctx, ell, m)
        if not generic_vanishing_applies(spec):
            continue
        res.checked += 1
        _, value = _general_point(pd, ctx, ell, m)
        if value is None or not value.is_zero():
            res.fail(p=ctx.p, n=ctx.n, ell=list(ell), m=list(m))
    return res


# -- twisted multiplicativity --------------------------------------------------------


def _exponent_vectors(length: int, bound: int = 1) -> list[Ell]:
    return box(bound, length)


def sweep_twisted_d(
    pd: ParabolicData,
    contexts: dict[int, PrimeContext],
    samples: int,
    seed: int = 0,
) -> SweepResult:
    """H(d; t) factors over the coprime split of d into its two prime parts.

    Candidates are all d, t with per-prime exponents at most 1.  Half of the
    sample is drawn from pairs meeting the divisibility condition (where H
    can be nonzero) and the rest uniformly.
    """
    p1, p2 = sorted(contexts)[:2]
    rng = random.Random(seed)
    candidates = []
    for e1 in _exponent_vectors(pd.size):
        for e2 in _exponent_vectors(pd.size):
            d = tuple(p1**a * p2**b for a, b in zip(e1, e2))
            split = tuple(p1**a for a in e1)
            for t1 in _exponent_vectors(pd.rank):
                for t2 in _exponent_vectors(pd.rank):
                    t = tuple(p1**a * p2**b for a, b in zip(t1, t2))
                    candidates.append((d, split, t))
    supported = [c for c in candidates if _composite_support(CompositeSumSpec(pd, c[0], c[2], contexts))]
    chosen = rng.sample(supported, min(len(supported), samples // 2))
    chosen += rng.sample(candidates, samples - len(chosen))
    res = SweepResult("twistmult-d")
    nonzero = 0
    for d, split, t in chosen:
        spec = CompositeSumSpec(pd, d, t, contexts)
        res.checked += 1
        try:
            if not verify_twisted_mult_d(spec, split):
                res.fail(d=list(d), e=list(split), t=list(t))
        except IllDefinedSumError as exc:
            res.fail(d=list(d), e=list(split), t=list(t), error=str(exc))
        if _composite_support(spec):
            nonzero += 1
    res.report["in_support"] = nonzero
    return res


def sweep_twisted_t(
    pd: ParabolicData,
    contexts: dict[int, PrimeContext],
    samples: int,
    seed: int = 0,
) -> SweepResult:
    """H(d; t) changes only by residue symbols when a part of t coprime to d is removed.

    d lives on the first prime and the removed part of t on the second.
    """
    p1, p2 = sorted(contexts)[:2]
    rng = random.Random(seed)
    candidates = []
    for e1 in _exponent_vectors(pd.size):
        d = tuple(p1**a for a in e1)
        for t1 in _exponent_vectors(pd.rank):
            for t2 in _exponent_vectors(pd.rank):
                coprime = tuple(p2**b for b in t2)
                t = tuple(p1**a * c for a, c in zip(t1, coprime))
                candidates.append((d, t, coprime))
    supported = [c for c in candidates if _composite_support(CompositeSumSpec(pd, c[0], c[1], contexts))]
    chosen = rng.sample(supported, min(len(supported), samples // 2))
    chosen += rng.sample(candidates, samples - len(chosen))
    res = SweepResult("twistmult-t")
    for d, t, coprime in chosen:
        spec = CompositeSumSpec(pd, d, t, contexts)
        res.checked += 1
        if not verify_twisted_mult_t(spec, coprime):
            res.fail(d=list(d), t=list(t), t_coprime=list(coprime))
    return res


# -- crystal layer -------------------------------------------------------------------


def sweep_polytope_equiv(m_max: int, slack: int = 3) -> SweepResult:
    """The Lusztig-data inequalities cut out the same set as the string-data ones."""
    res = SweepResult("polytope-equiv")
    for m in box(m_max, 3):
        bound = max(m) + slack
        for ell in box(bound, 4):
            res.checked += 1
            lusztig = hw_membership_lusztig(ell, m)
            string = hw_membership_string(relative_string_from_ell(ell), m)
            if lusztig != string or lusztig != hw_inequalities_hold(ell, m):
                res.fail(ell=list(ell), m=list(m), lusztig=lusztig, string=string)
    return res


def _words_of_longest(rank: int) -> list[tuple[int, ...]]:
    """Every reduced word of w0 in type A_rank, by search over braid moves."""
    datum = build_root_datum("A", rank)
    start = tuple(long_word(datum).indices)
    seen = {start}
    stack = [start]
    zeros = (0,) * len(start)
    while stack:
        w = stack.pop()
        for pos in applicable_moves(w, datum):
            nxt, _ = transition(w, zeros, pos, datum)
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return sorted(seen)


def sweep_transition_inverse(rank: int, data_max: int) -> SweepResult:
    """Every braid move undoes itself on Lusztig data, at every edge of the word graph."""
    res = SweepResult("transition-inverse")
    datum = build_root_datum("A", rank)
    words = _words_of_longest(rank)
    for word in words:
        moves = applicable_moves(word, datum)
        for data in box(data_max, len(word)):
            for pos in moves:
                res.checked += 1
                w2, c2 = transition(word, data, pos, datum)
                back = transition(w2, c2, pos, datum)
                if back != (word, data):
                    res.fail(word=list(word), data=list(data), position=pos)
    res.report["words"] = len(words)
    return res


# -- root combinatorics --------------------------------------------------------------


def _parabolics(max_rank: int):
    for kind, rank, node in cominuscule_parabolics(max_rank):
        yield (kind, rank, node), build_parabolic(build_root_datum(kind, rank), node)


def sweep_pairing_nonneg(max_rank: int) -> SweepResult:
    """Pairings between unipotent-radical roots are nonnegative."""
    res = SweepResult("pairing-nonneg")
    for key, pd in _parabolics(max_rank):
        res.checked += 1
        for bad in pairing_violations(pd):
            res.fail(parabolic=list(key), pair=list(bad))
    return res


def sweep_dmod_identity(max_rank: int) -> SweepResult:
    """ord_p D(k, k'; alpha_j) = ord_p D_k' - ord_p D_k for every commutation pair."""
    res = SweepResult("dmod-identity")
    for key, pd in _parabolics(max_rank):
        res.checked += 1
        for j, pair, ell in denominator_identity_violations(pd):
            res.fail(parabolic=list(key), node=j, pair=list(pair), ell=list(ell))
    return res


def sweep_structure(max_rank: int) -> SweepResult:
    """Convexity of the root order and unit commutation coefficients."""
    res = SweepResult("structure")
    for key, pd in _parabolics(max_rank):
        res.checked += 1
        for bad in convex_order_violations(pd.datum, pd.full_word):
            res.fail(parabolic=list(key), convexity=[list(bad[0]), list(bad[1]), bad[2], bad[3]])
        for bad in commutation_coefficient_violations(pd):
            res.fail(parabolic=list(key), coefficients=list(bad))
    return res


# -- Gauss sums ----------------------------------------------------------------------


def sweep_gauss_identities(contexts: Iterable[PrimeContext], k_max: int = 6) -> SweepResult:
    """h(k) = phi(p^k) [n | k], and g(1) conj(g(1)) = p when n > 1 (g(1) = -1 when n = 1)."""
    res = SweepResult("gauss")
    for ctx in contexts:
        p, n = ctx.p, ctx.n
        for k in range(1, k_max + 1):
            res.checked += 1
            expected = (p**k - p ** (k - 1)) if k % n == 0 else 0
            if not gauss_h(ctx, k).equals(CycNum.from_int(expected)):
                res.fail(p=p, n=n, identity="h", k=k)
        g1 = gauss_g(ctx, 1)
        if n == 1:
            # trivial character: g(1) is the Ramanujan sum c_p(1) = -1
            res.checked += 1
            if not g1.equals(CycNum.from_int(-1)):
                res.fail(p=p, n=n, identity="ramanujan")
            continue
        res.checked += 2
        if not (g1 * g1.conjugate()).equals(CycNum.from_int(p)):
            res.fail(p=p, n=n, identity="norm-exact")
        if abs(abs(g1.to_complex()) ** 2 - p) > 1e-9:
            res.fail(p=p, n=n, identity="norm-numeric")
    return res


# Names accepted by ``metasum verify``.
THEOREMS = (
    "support",
    "cancel",
    "phifun",
    "vanish",
    "twistmult-d",
    "twistmult-t",
    "stringmatch",
    "polytope-equiv",
    "transition-inverse",
    "pairing-nonneg",
    "dmod-identity",
    "closed-form",
    "region-b",
    "structure",
    "gauss",
)
