"""Lusztig data, string data and BZL patterns for the GL(4) parabolic example.

Lusztig data for one reduced word of w_0 are moved to another by the
piecewise-linear transition maps attached to single braid moves.  String data
are read off by repeatedly stripping the first entry and moving to a word
that starts with the next required letter (breadth-first search over braid
moves, type A only).

The second half of the module is specific to the parabolic of GL(4) with
Levi GL(2) x GL(2): relative string data (n_3, n_4, n_5, n_6), the cone and
highest-weight inequalities, decorated BZL patterns and their standard
contribution as a product of Gauss sums.
"""

from __future__ import annotations

import functools
from collections import deque
from collections.abc import Sequence
from dataclasses import dataclass
from typing import NamedTuple

from metasum.charsums import PrimeContext, gauss_g, gauss_h
from metasum.cyclotomic import CycNum
from metasum.root_system import ReducedWord, RootDatum, build_root_datum, is_reduced

__all__ = [
    "GL4_WORD",
    "BzlPattern",
    "LusztigDatum",
    "StringDatum",
    "StringMatch",
    "bzl_pattern",
    "cone_membership",
    "datamap",
    "enumerate_hw_lattice",
    "hw_membership_lusztig",
    "hw_membership_string",
    "lusztig_to_string",
    "pattern_from_string",
    "relative_string_from_ell",
    "standard_contribution",
    "stringmatching_check",
    "stringmatching_excluded",
    "transition",
]

GL4_WORD: tuple[int, ...] = (1, 3, 2, 1, 3, 2)


@dataclass(frozen=True)
class LusztigDatum:
    word: tuple[int, ...]
    data: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "word", tuple(int(x) for x in self.word))
        object.__setattr__(self, "data", tuple(int(x) for x in self.data))
        if len(self.word) != len(self.data):
            raise ValueError("word and data must have the same length")
        if min(self.data, default=0) < 0:
            raise ValueError("Lusztig data must be nonnegative")


@dataclass(frozen=True)
class StringDatum:
    word: tuple[int, ...]
    data: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.word) != len(self.data):
            raise ValueError("word and data must have the same length")


def _datum_for(word: Sequence[int], datum: RootDatum | None) -> RootDatum:
    if datum is not None:
        return datum
    if not word:
        raise ValueError("empty word")
    return build_root_datum("A", max(word))


def _bond(datum: RootDatum, i: int, j: int) -> int:
    """Number of edges between nodes i and j of the Dynkin diagram (1-based)."""
    a = datum.cartan_matrix
    return int(a[i - 1][j - 1] * a[j - 1][i - 1])


def _move_kind(datum: RootDatum, word: Sequence[int], pos: int) -> str | None:
    if pos < 0:
        return None
    if pos + 1 < len(word):
        a, b = word[pos], word[pos + 1]
        if a != b and _bond(datum, a, b) == 0:
            return "commute"
    if pos + 2 < len(word):
        a, b, c = word[pos : pos + 3]
        if a == c and a != b:
            bond = _bond(datum, a, b)
            if bond == 1:
                return "braid"
            if bond > 1:
                raise NotImplementedError("transition maps for double or triple bonds are not implemented")
    return None


def transition(
    word: Sequence[int] | ReducedWord,
    data: Sequence[int],
    position: int,
    datum: RootDatum | None = None,
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Apply the braid move starting at ``position`` (0-based) to (word, data).

    A commuting pair (a, b) becomes (b, a); a length-three move
    (a, b, c) becomes (b + c - min(a, c), min(a, c), a + b - min(a, c)).
    """
    word = tuple(word)
    data = tuple(int(x) for x in data)
    if len(word) != len(data):
        raise ValueError("word and data must have the same length")
    datum = _datum_for(word, datum)
    kind = _move_kind(datum, word, position)
    if kind is None:
        raise ValueError(f"no braid move applies at position {position} of {word}")
    w, c = list(word), list(data)
    if kind == "commute":
        w[position], w[position + 1] = w[position + 1], w[position]
        c[position], c[position + 1] = c[position + 1], c[position]
    else:
        i, j = w[position], w[position + 1]
        a, b, cc = c[position : position + 3]
        low = min(a, cc)
        w[position : position + 3] = [j, i, j]
        c[position : position + 3] = [b + cc - low, low, a + b - low]
    return tuple(w), tuple(c)


def applicable_moves(word: Sequence[int], datum: RootDatum | None = None) -> list[int]:
    """Positions at which :func:`transition` applies."""
    datum = _datum_for(word, datum)
    return [i for i in range(len(word)) if _move_kind(datum, word, i) is not None]


@functools.lru_cache(maxsize=None)
def _neighbours(datum: RootDatum, word: tuple[int, ...]) -> tuple[tuple[int, tuple[int, ...]], ...]:
    out = []
    for pos in range(len(word)):
        kind = _move_kind(datum, word, pos)
        if kind == "commute":
            w = list(word)
            w[pos], w[pos + 1] = w[pos + 1], w[pos]
            out.append((pos, tuple(w)))
        elif kind == "braid":
            w = list(word)
            i, j = w[pos], w[pos + 1]
            w[pos : pos + 3] = [j, i, j]
            out.append((pos, tuple(w)))
    return tuple(out)


@functools.lru_cache(maxsize=None)
def _path_to_letter(datum: RootDatum, word: tuple[int, ...], letter: int) -> tuple[int, ...]:
    """Shortest sequence of move positions turning ``word`` into one starting with ``letter``."""
    if word and word[0] == letter:
        return ()
    seen = {word: None}
    queue = deque([word])
    while queue:
        w = queue.popleft()
        for pos, nxt in _neighbours(datum, w):
            if nxt in seen:
                continue
            seen[nxt] = (w, pos)
            if nxt[0] == letter:
                path = []
                cur = nxt
                while seen[cur] is not None:
                    prev, p = seen[cur]
                    path.append(p)
                    cur = prev
                return tuple(reversed(path))
            queue.append(nxt)
    raise ValueError(f"no word in the braid class of {word} starts with {letter}")


def lusztig_to_string(datum_in: LusztigDatum, datum: RootDatum | None = None) -> StringDatum:
    """String data (lowering operators) of the canonical basis element with these Lusztig data.

    At step t the first entry of the current data is recorded as n_t and
    zeroed, then the data are transported along braid moves to a word whose
    first letter is the (t+1)-th letter of the original word.
    """
    word = datum_in.word
    datum = _datum_for(word, datum)
    if datum.cartan_type != "A":
        raise NotImplementedError("string data are only implemented in type A")
    if not is_reduced(datum, word):
        raise ValueError(f"{word} is not a reduced word")
    if len(word) != len(datum.positive_roots):
        raise ValueError(f"{word} is not a reduced word of the longest element")
    cur_w, cur_c = tuple(word), list(datum_in.data)
    out = []
    for letter in word:
        for pos in _path_to_letter(datum, cur_w, letter):
            cur_w, c = transition(cur_w, cur_c, pos, datum)
            cur_c = list(c)
        out.append(cur_c[0])
        cur_c[0] = 0
    return StringDatum(tuple(word), tuple(out))


def datamap(c: Sequence[int]) -> tuple[int, ...]:
    """Closed form of the string data for the GL(4) word (1, 3, 2, 1, 3, 2)."""
    c1, c2, c3, c4, c5, c6 = c
    return (c1, c2, c4 + c5 + max(c3, c6), c3 + c5, c3 + c4, min(c3, c6))


# -- GL(4) parabolic: relative string data and polytopes -------------------------------


def relative_string_from_ell(ell: Sequence[int]) -> tuple[int, int, int, int]:
    """(n_3, n_4, n_5, n_6) for Lusztig data (0, 0, l_1, l_2, l_3, l_4)."""
    l1, l2, l3, l4 = ell
    return (l2 + l3 + max(l1, l4), l1 + l3, l1 + l2, min(l1, l4))


def cone_membership(n: Sequence[int]) -> bool:
    n3, n4, n5, n6 = n
    return n3 >= max(n4, n5) and min(n4, n5) >= n6 >= 0


def hw_membership_string(n: Sequence[int], m: Sequence[int]) -> bool:
    """Cone plus highest-weight inequalities for weight m + rho."""
    n3, n4, n5, n6 = n
    m1, m2, m3 = m
    return (
        cone_membership(n)
        and n6 <= m2 + 1
        and n5 <= m3 + 1 + n6
        and n4 <= m1 + 1 + n6
        and n3 <= m2 + 1 + n4 + n5 - 2 * n6
    )


def hw_membership_lusztig(ell: Sequence[int], m: Sequence[int]) -> bool:
    """The same polytope written directly in the Lusztig data."""
    l1, l2, l3, l4 = ell
    m1, m2, m3 = m
    if min(ell) < 0:
        return False
    low = min(l1, l4)
    return l4 <= m2 + 1 and l1 + l2 <= m3 + 1 + low and l1 + l3 <= m1 + 1 + low


def enumerate_hw_lattice(m: Sequence[int]) -> list[tuple[int, int, int, int]]:
    """All Lusztig data in the highest-weight polytope, in lexicographic order.

    The inequalities force l_4 <= m_2 + 1, l_2 <= m_3 + 1, l_3 <= m_1 + 1 and
    l_1 <= l_4 + min(m_1, m_3) + 1, which bounds the search box.
    """
    m1, m2, m3 = m
    out = []
    for l1 in range(m2 + min(m1, m3) + 3):
        for l2 in range(m3 + 2):
            for l3 in range(m1 + 2):
                for l4 in range(m2 + 2):
                    ell = (l1, l2, l3, l4)
                    if hw_membership_lusztig(ell, m):
                        out.append(ell)
    return out


DECORATIONS = ("minimal", "maximal", "interior", "both")


@dataclass(frozen=True)
class BzlPattern:
    """The one-row array (n_3, n_4, n_5, n_6) with bounds and decorations."""

    entries: tuple[int, int, int, int]
    bounds: tuple[tuple[int, int], ...]
    decorations: tuple[str, ...]
    valid: bool

    def to_json(self) -> dict:
        return {
            "entries": list(self.entries),
            "bounds": [list(b) for b in self.bounds],
            "decorations": list(self.decorations),
            "valid": self.valid,
        }


def _decorate(value: int, lo: int, hi: int) -> str:
    at_lo, at_hi = value == lo, value == hi
    if at_lo and at_hi:
        return "both"
    if at_lo:
        return "minimal"
    if at_hi:
        return "maximal"
    return "interior"


def bzl_pattern(ell: Sequence[int], m: Sequence[int]) -> BzlPattern:
    """The pattern of relative string data attached to Lusztig data l."""
    return pattern_from_string(relative_string_from_ell(ell), m)


def pattern_from_string(entries: Sequence[int], m: Sequence[int]) -> BzlPattern:
    """Decorate (n_3, n_4, n_5, n_6): each entry against its own cone and hw bound."""
    entries = tuple(int(x) for x in entries)
    if len(entries) != 4:
        raise ValueError("a pattern has exactly four entries")
    n3, n4, n5, n6 = entries
    m1, m2, m3 = m
    bounds = (
        (max(n4, n5), m2 + 1 + n4 + n5 - 2 * n6),
        (n6, m1 + 1 + n6),
        (n6, m3 + 1 + n6),
        (0, m2 + 1),
    )
    valid = all(lo <= v <= hi for v, (lo, hi) in zip(entries, bounds))
    decorations = tuple(_decorate(v, lo, hi) for v, (lo, hi) in zip(entries, bounds))
    return BzlPattern(entries, bounds, decorations, valid)


def standard_contribution(ctx: PrimeContext, pattern: BzlPattern) -> CycNum:
    """Product over entries a of g(a), h(a), q^a or 0 according to the decoration."""
    if not pattern.valid:
        raise ValueError("pattern lies outside the highest-weight polytope")
    total = CycNum.from_int(1)
    for a, deco in zip(pattern.entries, pattern.decorations):
        if deco == "both":
            return CycNum.from_int(0)
        if deco == "maximal":
            total = total * gauss_g(ctx, a)
        elif deco == "interior":
            total = total * gauss_h(ctx, a)
        else:
            total = total.scale(ctx.p**a)
    return total


def stringmatching_excluded(ell: Sequence[int], m: Sequence[int]) -> bool:
    """Whether l lies in one of the five configurations the matching theorem excludes."""
    l1, l2, l3, l4 = ell
    m1, m2, m3 = m
    return (
        (l1 == l4 == m2 + 1)
        or (l1 == m2 + 1 and l4 == 0)
        or (l2 == m3 + 1 and l3 == m1 + 1 and l1 == l4)
        or (l1 == l4 == 0)
        or (l2 == l3 == 0)
    )


class StringMatch(NamedTuple):
    """Outcome of one string-matching comparison.

    ``status`` is ``"generic"`` for points the theorem covers,
    ``"excluded"`` for its five listed configurations,
    ``"outside-divisibility"`` when the explicit sum is not in force (S is
    defined to be 0 there) and ``"outside-polytope"`` when there is no pattern.
    """

    applicable: bool
    holds: bool | None  # None when the pattern is outside the polytope
    status: str = "generic"


def stringmatching_check(
    ctx: PrimeContext,
    ell: Sequence[int],
    m: Sequence[int],
    value: CycNum | None = None,
) -> StringMatch:
    """Compare q^{2 l1 - 2 l4} S_{l,m} with the standard contribution.

    ``value`` may carry a precomputed S_{l,m}; otherwise it is brute-forced.
    ``holds`` is reported for non-generic points too, so callers can tabulate
    where the match happens to survive.
    """
    from metasum.expsum import gl4_brute_force, gl4_divisibility

    pattern = bzl_pattern(ell, m)
    if not pattern.valid:
        return StringMatch(False, None, "outside-polytope")
    if value is None:
        value = gl4_brute_force(ctx, ell, m)
    p = ctx.p
    l1, _l2, _l3, l4 = ell
    lhs = value.scale(p ** (2 * l1))
    rhs = standard_contribution(ctx, pattern).scale(p ** (2 * l4))
    holds = lhs.equals(rhs)
    if not gl4_divisibility(ell, m):
        return StringMatch(False, holds, "outside-divisibility")
    if stringmatching_excluded(ell, m):
        return StringMatch(False, holds, "excluded")
    return StringMatch(True, holds, "generic")
