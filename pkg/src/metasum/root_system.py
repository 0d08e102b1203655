"""Root data, reduced words and cominuscule parabolic combinatorics.

Roots are integer vectors of simple-root coefficients (Bourbaki numbering,
nodes 1..r stored at positions 0..r-1).  The pairing <beta, gamma^vee> is
computed from a symmetrized Cartan matrix, so every coroot pairing is exact.

The central object is :class:`ParabolicData`: for a maximal parabolic with
omitted node i it orders the roots gamma_1, ..., gamma_N of the unipotent
radical through a reduced word w0 = w_M * w^P and records the pairing matrix,
the commutation pairs and the per-root quadratic-form values that the sum
evaluators consume.
"""

from __future__ import annotations

import functools
import warnings
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ParabolicData",
    "ReducedWord",
    "RootDatum",
    "build_parabolic",
    "build_root_datum",
    "cominuscule_parabolics",
    "commutation_coefficient_violations",
    "convex_order_violations",
    "denominator_exponent",
    "denominator_identity_violations",
    "inversion_sequence",
    "is_braidless",
    "is_cominuscule",
    "is_reduced",
    "long_word",
    "modulus_exponent",
    "order_convexity_violations",
    "pairing_violations",
]

Root = tuple[int, ...]

SUPPORTED_TYPES = ("A", "B", "C", "D", "E")


def _cartan_matrix(kind: str, rank: int) -> np.ndarray:
    """A[i, j] = <alpha_j, alpha_i^vee>, Bourbaki numbering."""
    a = 2 * np.eye(rank, dtype=np.int64)
    if kind in "ABCD":
        for i in range(rank - 1):
            a[i, i + 1] = a[i + 1, i] = -1
        if kind == "B" and rank >= 2:
            # alpha_r short: <alpha_{r-1}, alpha_r^vee> = -2
            a[rank - 1, rank - 2] = -2
        elif kind == "C" and rank >= 2:
            # alpha_r long: <alpha_r, alpha_{r-1}^vee> = -2
            a[rank - 2, rank - 1] = -2
        elif kind == "D":
            a[rank - 2, rank - 1] = a[rank - 1, rank - 2] = 0
            a[rank - 3, rank - 1] = a[rank - 1, rank - 3] = -1
    elif kind == "E":
        # chain 1-3-4-5-6(-7), node 2 attached to 4
        edges = [(1, 3), (3, 4), (4, 5), (5, 6), (2, 4)]
        if rank == 7:
            edges.append((6, 7))
        for i, j in edges:
            a[i - 1, j - 1] = a[j - 1, i - 1] = -1
    return a


def _half_lengths(kind: str, rank: int) -> np.ndarray:
    """(alpha_i, alpha_i) / 2, with short roots normalized to 1."""
    d = np.ones(rank, dtype=np.int64)
    if kind == "B":
        d[: rank - 1] = 2
    elif kind == "C":
        d[rank - 1] = 2
    return d


@dataclass(frozen=True)
class RootDatum:
    """A reduced irreducible root system of type A-E7 in simple-root coordinates."""

    cartan_type: str
    rank: int
    cartan_matrix: np.ndarray = field(repr=False, compare=False)
    positive_roots: tuple[Root, ...] = field(repr=False, compare=False)
    highest_root: Root = field(repr=False, compare=False)
    half_lengths: np.ndarray = field(repr=False, compare=False)

    @property
    def simple_roots(self) -> tuple[Root, ...]:
        return tuple(tuple(int(i == j) for j in range(self.rank)) for i in range(self.rank))

    @functools.cached_property
    def _gram(self) -> np.ndarray:
        # (alpha_i, alpha_j) = d_i * A[i, j]
        return self.half_lengths[:, None] * self.cartan_matrix

    def inner(self, x: Sequence[int], y: Sequence[int]) -> int:
        return int(np.asarray(x) @ self._gram @ np.asarray(y))

    def pair(self, beta: Sequence[int], gamma: Sequence[int]) -> int:
        """<beta, gamma^vee> = 2 (beta, gamma) / (gamma, gamma)."""
        num = 2 * self.inner(beta, gamma)
        den = self.inner(gamma, gamma)
        if num % den:
            raise ArithmeticError(f"non-integral pairing <{beta}, {gamma}^vee>")
        return num // den

    def reflect(self, i: int, beta: Sequence[int]) -> Root:
        """s_i(beta) for the simple reflection at node i (1-based)."""
        coeff = int(np.asarray(beta) @ self.cartan_matrix[i - 1])
        out = list(beta)
        out[i - 1] -= coeff
        return tuple(out)

    def act(self, word: Sequence[int], beta: Sequence[int]) -> Root:
        """Apply s_{w_1} s_{w_2} ... s_{w_k} to beta (rightmost letter first)."""
        out = tuple(beta)
        for i in reversed(word):
            out = self.reflect(i, out)
        return out

    @functools.cached_property
    def root_set(self) -> frozenset[Root]:
        neg = {tuple(-c for c in r) for r in self.positive_roots}
        return frozenset(self.positive_roots) | frozenset(neg)

    def is_root(self, beta: Sequence[int]) -> bool:
        return tuple(beta) in self.root_set

    @staticmethod
    def is_positive(beta: Sequence[int]) -> bool:
        return all(c >= 0 for c in beta) and any(beta)

    def to_json(self) -> dict:
        return {
            "type": self.cartan_type,
            "rank": self.rank,
            "cartan_matrix": self.cartan_matrix.tolist(),
            "positive_roots": [list(r) for r in self.positive_roots],
            "highest_root": list(self.highest_root),
        }


def _positive_roots(cartan: np.ndarray) -> list[Root]:
    """Positive roots by height, growing root strings with the Cartan matrix."""
    rank = cartan.shape[0]
    simple = [tuple(int(i == j) for j in range(rank)) for i in range(rank)]
    roots = set(simple)
    layer = list(simple)
    while layer:
        nxt = []
        for beta in layer:
            for i in range(rank):
                if beta == simple[i]:
                    continue
                # q = largest k with beta - k alpha_i a root
                q = 0
                probe = list(beta)
                while True:
                    probe[i] -= 1
                    if tuple(probe) in roots:
                        q += 1
                    else:
                        break
                p = q - int(np.asarray(beta) @ cartan[i])
                if p > 0:
                    up = list(beta)
                    up[i] += 1
                    up = tuple(up)
                    if up not in roots:
                        roots.add(up)
                        nxt.append(up)
        layer = nxt
    return sorted(roots, key=lambda r: (sum(r), tuple(-c for c in r)))


_EXPECTED_COUNTS = {
    "A": lambda r: r * (r + 1) // 2,
    "B": lambda r: r * r,
    "C": lambda r: r * r,
    "D": lambda r: r * (r - 1),
    "E": lambda r: {6: 36, 7: 63}[r],
}


@functools.cache
def build_root_datum(cartan_type: str, rank: int) -> RootDatum:
    """Build the root datum of type A_r, B_r, C_r, D_r, E6 or E7."""
    kind = cartan_type.strip().upper()
    if len(kind) > 1 and kind[0] == "E" and kind[1:].isdigit():
        kind, declared = "E", int(kind[1:])
        if declared != rank:
            raise ValueError(f"type E{declared} has rank {declared}, not {rank}")
    if kind not in SUPPORTED_TYPES:
        raise ValueError(f"unsupported Cartan type {cartan_type!r} (F4, G2, E8 are excluded)")
    minimum = {"A": 1, "B": 2, "C": 2, "D": 4}
    if kind == "E" and rank not in (6, 7):
        raise ValueError("only E6 and E7 are supported")
    if kind != "E" and rank < minimum[kind]:
        raise ValueError(f"type {kind} needs rank >= {minimum[kind]}")
    cartan = _cartan_matrix(kind, rank)
    roots = _positive_roots(cartan)
    if len(roots) != _EXPECTED_COUNTS[kind](rank):
        raise AssertionError(f"root generation produced {len(roots)} roots for {kind}{rank}")
    highest = max(roots, key=sum)
    return RootDatum(
        cartan_type=kind,
        rank=rank,
        cartan_matrix=cartan,
        positive_roots=tuple(roots),
        highest_root=highest,
        half_lengths=_half_lengths(kind, rank),
    )


def is_cominuscule(datum: RootDatum, node: int) -> bool:
    _check_node(datum, node)
    return datum.highest_root[node - 1] == 1


def is_braidless(datum: RootDatum, node: int) -> bool:
    """Membership in the list of braidless fundamental weights."""
    _check_node(datum, node)
    r = datum.rank
    kind = datum.cartan_type
    if kind == "A":
        return True
    if kind in "BC":
        return node in (1, r)
    if kind == "D":
        return node in (1, r - 1, r)
    if kind == "E":
        return node in ((1, 6) if r == 6 else (7,))
    return False


def _check_node(datum: RootDatum, node: int) -> None:
    if not 1 <= node <= datum.rank:
        raise ValueError(f"node {node} outside 1..{datum.rank}")


@dataclass(frozen=True)
class ReducedWord:
    indices: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)


def _extend_greedily(datum: RootDatum, prefix: list[int], letters: Iterable[int]) -> list[int]:
    """Append letters i with w(alpha_i) > 0 (smallest first) until none remain.

    The word stays reduced because w s_i is longer than w exactly when
    w(alpha_i) is positive.
    """
    letters = sorted(letters)
    word = list(prefix)
    while True:
        for i in letters:
            simple = tuple(int(j == i - 1) for j in range(datum.rank))
            if datum.is_positive(datum.act(word, simple)):
                word.append(i)
                break
        else:
            return word


def long_word(datum: RootDatum, restrict_to: Iterable[int] | None = None) -> ReducedWord:
    """Reduced word of the longest element (of the Levi if ``restrict_to`` is given)."""
    letters = range(1, datum.rank + 1) if restrict_to is None else restrict_to
    letters = list(letters)
    for i in letters:
        _check_node(datum, i)
    return ReducedWord(tuple(_extend_greedily(datum, [], letters)))


def inversion_sequence(datum: RootDatum, word: Sequence[int]) -> list[Root]:
    """alpha_{i_1}, s_{i_1}(alpha_{i_2}), ...; all positive iff the word is reduced."""
    out = []
    for k, i in enumerate(word):
        simple = tuple(int(j == i - 1) for j in range(datum.rank))
        out.append(datum.act(word[:k], simple))
    return out


def is_reduced(datum: RootDatum, word: Sequence[int]) -> bool:
    inv = inversion_sequence(datum, word)
    return all(datum.is_positive(b) for b in inv) and len(set(inv)) == len(inv)


@dataclass(frozen=True)
class ParabolicData:
    """Ordered roots of the unipotent radical of a maximal parabolic.

    ``gammas[k]`` is gamma_(k+1); ``pairing[j][k]`` is <gamma_j, gamma_k^vee>;
    ``commutation_pairs[j]`` (j a node of the Levi) lists 1-based pairs (k, k')
    with k > k' and gamma_k - gamma_k' = -alpha_j; ``q_values[k]`` is Q(gamma_k^vee).
    """

    datum: RootDatum
    omitted_node: int
    word_levi: tuple[int, ...]
    word_p: tuple[int, ...]
    gammas: tuple[Root, ...]
    pairing: tuple[tuple[int, ...], ...]
    commutation_pairs: dict[int, tuple[tuple[int, int], ...]] = field(compare=False)
    q_values: tuple[int, ...]
    cominuscule: bool

    @property
    def size(self) -> int:
        return len(self.gammas)

    @property
    def rank(self) -> int:
        return self.datum.rank

    @property
    def full_word(self) -> tuple[int, ...]:
        return self.word_levi + self.word_p

    @property
    def levi_nodes(self) -> tuple[int, ...]:
        return tuple(j for j in range(1, self.rank + 1) if j != self.omitted_node)

    def heights(self) -> tuple[int, ...]:
        return tuple(sum(g) for g in self.gammas)

    def coweight_pairing(self, k: int, i: int) -> int:
        """<gamma_k, omega_i^vee>: the alpha_i coefficient of gamma_k (1-based)."""
        return self.gammas[k - 1][i - 1]

    def simple_pairing(self, j: int, k: int) -> int:
        """<alpha_j, gamma_k^vee> (1-based node j, 1-based root index k)."""
        simple = tuple(int(i == j - 1) for i in range(self.rank))
        return self.datum.pair(simple, self.gammas[k - 1])

    def to_json(self) -> dict:
        return {
            "type": self.datum.cartan_type,
            "rank": self.rank,
            "node": self.omitted_node,
            "word_levi": list(self.word_levi),
            "word_p": list(self.word_p),
            "gammas": [list(g) for g in self.gammas],
            "pairing": [list(r) for r in self.pairing],
            "commutation_pairs": {
                str(j): [list(pr) for pr in prs] for j, prs in self.commutation_pairs.items()
            },
            "q_values": list(self.q_values),
        }


def _quadratic_values(datum: RootDatum, gammas: Sequence[Root], q: Sequence[int] | None) -> tuple[int, ...]:
    """Q(gamma^vee) for a W-invariant form given by its values on simple coroots.

    W-invariance forces Q to be constant on coroots of the same length, so a
    root's value is read from any simple root of the same length.  ``q=None``
    means Q = 1 on every coroot.
    """
    if q is None:
        return tuple(1 for _ in gammas)
    q = list(q)
    if len(q) != datum.rank:
        raise ValueError("need one quadratic-form value per simple coroot")
    lengths = datum.half_lengths
    by_length: dict[int, int] = {}
    for i in range(datum.rank):
        prev = by_length.setdefault(int(lengths[i]), q[i])
        if prev != q[i]:
            raise ValueError("quadratic form is not W-invariant: same-length coroots differ")
    return tuple(by_length[datum.inner(g, g) // 2] for g in gammas)


def build_parabolic(
    datum: RootDatum,
    node: int,
    q: Sequence[int] | None = None,
    *,
    allow_non_cominuscule: bool = False,
) -> ParabolicData:
    """Order the roots of the unipotent radical for the parabolic omitting ``node``."""
    _check_node(datum, node)
    if not is_braidless(datum, node):
        raise ValueError(f"node {node} of {datum.cartan_type}{datum.rank} is not braidless")
    comin = is_cominuscule(datum, node)
    if not comin:
        if not allow_non_cominuscule:
            raise ValueError(f"node {node} of {datum.cartan_type}{datum.rank} is not cominuscule")
        warnings.warn("braidless but not cominuscule: sum evaluators will reject this parabolic")
    levi = [j for j in range(1, datum.rank + 1) if j != node]
    word_levi = _extend_greedily(datum, [], levi)
    full = _extend_greedily(datum, word_levi, range(1, datum.rank + 1))
    word_p = full[len(word_levi):]
    t = len(word_levi)
    gammas = []
    for k in range(len(word_p)):
        simple = tuple(int(j == word_p[k] - 1) for j in range(datum.rank))
        gammas.append(datum.act(full[: t + k], simple))
    pairing = tuple(tuple(datum.pair(a, b) for b in gammas) for a in gammas)
    pairs: dict[int, tuple[tuple[int, int], ...]] = {}
    for j in levi:
        found = []
        for k in range(len(gammas)):
            for kp in range(k):
                diff = [x - y for x, y in zip(gammas[k], gammas[kp])]
                if diff == [-int(i == j - 1) for i in range(datum.rank)]:
                    found.append((k + 1, kp + 1))
        pairs[j] = tuple(sorted(found))
    return ParabolicData(
        datum=datum,
        omitted_node=node,
        word_levi=tuple(word_levi),
        word_p=tuple(word_p),
        gammas=tuple(gammas),
        pairing=pairing,
        commutation_pairs=pairs,
        q_values=_quadratic_values(datum, gammas, q),
        cominuscule=comin,
    )


def modulus_exponent(pd: ParabolicData, ell: Sequence[int], j: int) -> int:
    """ord_p(D_j) = ell_j + sum_{i > j} <gamma_j, gamma_i^vee> ell_i (1-based j)."""
    if len(ell) != pd.size:
        raise ValueError(f"expected {pd.size} exponents, got {len(ell)}")
    if not pd.cominuscule:
        raise ValueError("moduli are only available for cominuscule parabolics")
    row = pd.pairing[j - 1]
    return ell[j - 1] + sum(row[i] * ell[i] for i in range(j, pd.size))


def denominator_exponent(pd: ParabolicData, ell: Sequence[int], pair: tuple[int, int], j: int) -> int:
    """Exponent of p in D(k, k'; alpha_j), the denominator of the b_k c_k' term.

    Computed term by term: ell_k + ell_k' + sum_{l >= k} <alpha_j, gamma_l^vee> ell_l
    + sum_{k' < l < k} <gamma_k', gamma_l^vee> ell_l.
    """
    if len(ell) != pd.size:
        raise ValueError(f"expected {pd.size} exponents, got {len(ell)}")
    k, kp = pair
    if pair not in pd.commutation_pairs.get(j, ()):
        raise ValueError(f"{pair} is not a commutation pair for node {j}")
    total = ell[k - 1] + ell[kp - 1]
    total += sum(pd.simple_pairing(j, l) * ell[l - 1] for l in range(k, pd.size + 1))
    total += sum(pd.pairing[kp - 1][l - 1] * ell[l - 1] for l in range(kp + 1, k))
    return total


# -- structural checks -------------------------------------------------------------


def cominuscule_parabolics(max_rank: int) -> list[tuple[str, int, int]]:
    """Every supported (type, rank, node) with rank <= max_rank that is cominuscule."""
    found = []
    for kind, low in (("A", 1), ("B", 2), ("C", 2), ("D", 4), ("E", 6)):
        for rank in range(low, max_rank + 1):
            if kind == "E" and rank not in (6, 7):
                continue
            datum = build_root_datum(kind, rank)
            found.extend((kind, rank, node) for node in range(1, rank + 1) if is_cominuscule(datum, node))
    return found


def convex_order_violations(datum: RootDatum, word: Sequence[int], max_coeff: int = 3) -> list[tuple]:
    """Root pairs breaking the convexity of the order induced by a reduced word of w0.

    A root earlier in the inversion sequence is larger.  For alpha < beta and
    gamma = i alpha - j beta a root, gamma must be a positive root below alpha
    or a negative root whose negative lies above beta; for alpha > beta and
    gamma = i alpha + j beta a root, gamma lies strictly between them.
    """
    return order_convexity_violations(inversion_sequence(datum, word), max_coeff)


def order_convexity_violations(order: Sequence[Root], max_coeff: int = 3) -> list[tuple]:
    """Convexity failures of an explicit total order on the positive roots (largest first)."""
    rank_of = {tuple(root): -pos for pos, root in enumerate(order)}
    order = list(rank_of)
    bad = []
    for alpha in order:
        for beta in order:
            if alpha == beta:
                continue
            for i in range(1, max_coeff + 1):
                for j in range(1, max_coeff + 1):
                    if rank_of[alpha] < rank_of[beta]:
                        gamma = tuple(i * a - j * b for a, b in zip(alpha, beta))
                        if gamma in rank_of:
                            ok = rank_of[gamma] < rank_of[alpha]
                        else:
                            neg = tuple(-g for g in gamma)
                            ok = neg not in rank_of or rank_of[neg] > rank_of[beta]
                    else:
                        gamma = tuple(i * a + j * b for a, b in zip(alpha, beta))
                        ok = gamma not in rank_of or rank_of[alpha] > rank_of[gamma] > rank_of[beta]
                    if not ok:
                        bad.append((alpha, beta, i, j))
    return bad


def pairing_violations(pd: ParabolicData) -> list[tuple[int, int]]:
    """1-based (j, k) with <gamma_j, gamma_k^vee> < 0."""
    return [
        (j + 1, k + 1)
        for j, row in enumerate(pd.pairing)
        for k, value in enumerate(row)
        if value < 0
    ]


def commutation_coefficient_violations(pd: ParabolicData, max_coeff: int = 3) -> list[tuple]:
    """(k, k', i, i', j) with i gamma_k - i' gamma_k' = -alpha_j but (i, i') != (1, 1)."""
    bad = []
    for k in range(1, pd.size + 1):
        for kp in range(1, k):
            for i in range(1, max_coeff + 1):
                for ip in range(1, max_coeff + 1):
                    diff = [i * a - ip * b for a, b in zip(pd.gammas[k - 1], pd.gammas[kp - 1])]
                    for j in pd.levi_nodes:
                        target = [-int(x == j - 1) for x in range(pd.rank)]
                        if diff == target and (i, ip) != (1, 1):
                            bad.append((k, kp, i, ip, j))
    return bad


def denominator_identity_violations(pd: ParabolicData, ells: Iterable[Sequence[int]] | None = None) -> list[tuple]:
    """Pairs where ord_p D(k, k'; alpha_j) differs from ord_p D_k' - ord_p D_k.

    Both sides are linear forms in ell, so with ``ells=None`` the forms are
    compared on the unit vectors, which settles the identity for every ell.
    """
    if ells is None:
        ells = [tuple(int(i == t) for i in range(pd.size)) for t in range(pd.size)]
    ells = list(ells)
    bad = []
    for j, pairs in pd.commutation_pairs.items():
        for pair in pairs:
            k, kp = pair
            for ell in ells:
                lhs = denominator_exponent(pd, ell, pair, j)
                rhs = modulus_exponent(pd, ell, kp) - modulus_exponent(pd, ell, k)
                if lhs != rhs:
                    bad.append((j, pair, tuple(ell)))
    return bad
