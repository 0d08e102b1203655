"""Exact evaluation of character sums over products of residue rings.

A sum handled here has the shape

    sum_{c_1 mod D_1, ..., c_N mod D_N}  prod_k chi_k(c_k)
        * psi( sum_{pairs} a * b_k * c_k' / den + sum_{linear} a * c_k / den )

where b_k is the inverse of c_k modulo d_k (0 when d_k = 1), c_k runs over
units modulo the primes dividing d_k, and chi_k(c) = prod_{p | d_k}
(c/p)_n^(q_k * ord_p d_k).  :class:`SumProblem` first shrinks every range
to the period R_k that the summand actually sees (the multiplicity D_k / R_k
becomes an integer factor), then tabulates each factor as an exponent of
zeta_M.  Two independent evaluators are offered:

* :meth:`SumProblem.evaluate_histogram` enumerates residue tuples and counts
  exponents.  Variable 0 is never an inverse, so its contribution is a
  function of one linear form in the other variables and is tabulated first.
* :meth:`SumProblem.evaluate_modular` contracts the factor graph (variable
  elimination) inside F_P for primes P = 1 mod M, one embedding of the
  cyclotomic ring per run, then recovers the integer coefficients with a
  Vandermonde solve and the Chinese remainder theorem.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from collections.abc import Callable, Sequence

import numpy as np

from metasum.cyclotomic import CycNum, euler_totient, factorize

__all__ = ["IllDefinedSumError", "SumProblem"]

# elements of the histogram evaluator are processed in blocks of this size
_BLOCK = 1 << 20


class IllDefinedSumError(ValueError):
    """The summand depends on choices (lifts or representatives) it should not."""


@dataclass
class _Var:
    modulus: int  # original range D_k
    inv_modulus: int  # d_k
    q: int
    period: int = 1  # R_k
    residues: np.ndarray = field(default=None, repr=False)  # type: ignore[assignment]
    inverses: np.ndarray = field(default=None, repr=False)  # type: ignore[assignment]
    alt_inverses: np.ndarray = field(default=None, repr=False)  # type: ignore[assignment]
    lift_sensitive: bool = False


def _rad(x: int) -> int:
    return math.prod(factorize(x)) if x > 1 else 1


class SumProblem:
    """Tabulated form of one character sum; see the module docstring.

    Parameters
    ----------
    moduli, inv_moduli, q_values
        D_k, d_k and the residue-symbol exponent q_k of each variable.
    pair_terms
        (k, k', a, den): psi(a * b_k * c_k' / den), 0-based indices.
    linear_terms
        (k, a, den): psi(a * c_k / den).
    contexts
        one PrimeContext per prime dividing some d_k; all share the same n.
    """

    def __init__(
        self,
        moduli: Sequence[int],
        inv_moduli: Sequence[int],
        q_values: Sequence[int],
        pair_terms: Sequence[tuple[int, int, int, int]],
        linear_terms: Sequence[tuple[int, int, int]],
        contexts: dict,
        n: int,
    ) -> None:
        self.n = n
        self.contexts = contexts
        self.vars = [_Var(D, d, q) for D, d, q in zip(moduli, inv_moduli, q_values)]
        self.pair_terms = []
        for k, kp, a, den in pair_terms:
            if k == kp:
                raise ValueError("a pair term needs two distinct variables")
            a, den = self._reduce_fraction(a, den)
            if den > 1:
                self.pair_terms.append((k, kp, a, den))
        self.linear_terms = []
        for k, a, den in linear_terms:
            a, den = self._reduce_fraction(a, den)
            if den > 1:
                self.linear_terms.append((k, a, den))
        for p in {q for v in self.vars for q in factorize(v.inv_modulus)} if self.vars else ():
            if p not in contexts:
                raise ValueError(f"no residue-symbol context for the prime {p}")
        self._setup_periods()
        dens = [t[3] for t in self.pair_terms] + [t[2] for t in self.linear_terms]
        self.M = math.lcm(n, *dens) if dens else n
        self._setup_tables()

    @staticmethod
    def _reduce_fraction(a: int, den: int) -> tuple[int, int]:
        if den < 1:
            raise ValueError("denominators must be positive")
        g = math.gcd(a, den)
        return (a // g) % (den // g), den // g

    # -- setup -----------------------------------------------------------------

    def _setup_periods(self) -> None:
        for k, v in enumerate(self.vars):
            needs = [_rad(v.inv_modulus)]
            for t in self.linear_terms:
                if t[0] == k:
                    needs.append(t[2])
            for kk, kp, _a, den in self.pair_terms:
                if kp == k:
                    needs.append(den)
                if kk == k:
                    if v.inv_modulus % den == 0:
                        needs.append(den)
                    else:
                        # b_k is only defined mod d_k but the term sees it mod den
                        needs.append(v.inv_modulus)
                        v.lift_sensitive = True
            v.period = math.lcm(*needs)
            if v.modulus % v.period:
                raise IllDefinedSumError(
                    f"summand is not periodic in variable {k + 1}: needs {v.period}, "
                    f"range is {v.modulus}"
                )
            rad = _rad(v.inv_modulus)
            r = np.arange(v.period, dtype=np.int64)
            if rad > 1:
                r = r[np.gcd(r, rad) == 1]
            v.residues = r
            inv_mod = math.gcd(v.period, v.inv_modulus)
            if inv_mod > 1:
                v.inverses = _unit_inverses(r, inv_mod)
            else:
                v.inverses = np.zeros_like(r)
            v.alt_inverses = v.inverses + v.inv_modulus

    @property
    def multiplicity(self) -> int:
        return math.prod(v.modulus // v.period for v in self.vars)

    @property
    def lift_sensitive(self) -> bool:
        return any(v.lift_sensitive for v in self.vars)

    def _char_exponents(self, v: _Var) -> np.ndarray:
        """Exponent of zeta_n carried by chi_k at each residue."""
        out = np.zeros(len(v.residues), dtype=np.int64)
        for p, e in factorize(v.inv_modulus).items() if v.inv_modulus > 1 else ():
            ctx = self.contexts[p]
            out += v.q * e * ctx.chi_exponents[v.residues % p]
        return out % self.n

    def _setup_tables(self, alt: frozenset[int] = frozenset()) -> None:
        M = self.M
        self._alt = alt
        unary = []
        for k, v in enumerate(self.vars):
            u = self._char_exponents(v) * (M // self.n)
            for kk, a, den in self.linear_terms:
                if kk == k:
                    u = u + (a * v.residues % den) * (M // den)
            unary.append(u % M)
        pairs: dict[tuple[int, int], np.ndarray] = {}
        for k, kp, a, den in self.pair_terms:
            vk, vkp = self.vars[k], self.vars[kp]
            b = vk.alt_inverses if k in alt else vk.inverses
            b = b % den
            table = (a * np.multiply.outer(b, vkp.residues % den)) % den * (M // den)
            key = (k, kp)
            pairs[key] = (pairs.get(key, 0) + table) % M
        self.unary = unary
        self.pairs = pairs

    def with_alternate_lifts(self, which: Sequence[int]) -> SumProblem:
        """A copy whose b_k for k in ``which`` uses the lift b_k + d_k."""
        clone = object.__new__(SumProblem)
        clone.__dict__.update(self.__dict__)
        clone._setup_tables(frozenset(which))
        return clone

    # -- histogram evaluator ----------------------------------------------------

    def evaluate_histogram(self) -> CycNum:
        M = self.M
        if not self.vars:
            return CycNum.from_int(1)
        counts = self._histogram_counts()
        return CycNum.from_exponent_counts(M, counts).scale(self.multiplicity)

    def _histogram_counts(self) -> np.ndarray:
        """Exponent counts of the whole sum (length M, int or object)."""
        M = self.M
        N = len(self.vars)
        if N == 1:
            return np.bincount(self.unary[0], minlength=M)
        if any(key[0] == 0 for key in self.pairs):
            raise ValueError("variable 0 must not appear through its inverse")
        # Variable 0 enters as zeta_M^(unary_0(c_0) + c_0 * Y), where
        # Y = sum over pairs (k, 0) of a * b_k * (M / den) is a multiple of M / L1.
        touching = [t for t in self.pair_terms if t[1] == 0]
        L1 = math.lcm(*(t[3] for t in touching)) if touching else 1
        step = M // L1
        slopes = {k: self._slope(k) for k in {t[0] for t in touching}}
        size = L1 * M
        hist = np.zeros(size, dtype=np.int64)
        pending: list[np.ndarray] = []
        pending_len = 0
        for y_vals, e_vals in self._enumerate(list(range(1, N)), slopes):
            pending.append((y_vals // step) * M + e_vals)
            pending_len += len(pending[-1])
            # a full-length bincount per block would cost O(size) each time
            if pending_len * 4 >= size:
                hist += np.bincount(np.concatenate(pending), minlength=size)
                pending, pending_len = [], 0
        if pending:
            hist += np.bincount(np.concatenate(pending), minlength=size)
        hist = hist.reshape(L1, M)
        gauss_row = self._gauss_table()
        total = np.zeros(M, dtype=object)
        for yi in np.nonzero(hist.any(axis=1))[0]:
            total += _cyclic_convolve(hist[yi], gauss_row(int(yi) * step), M)
        return total

    def _slope(self, k: int) -> np.ndarray:
        """Y-contribution of b_k for each residue of variable k (mod M)."""
        M = self.M
        vk = self.vars[k]
        b_all = vk.alt_inverses if k in self._alt else vk.inverses
        out = np.zeros(len(vk.residues), dtype=np.int64)
        for kk, kp, a, den in self.pair_terms:
            if kk == k and kp == 0:
                out = (out + (a * (b_all % den) % den) * (M // den)) % M
        return out

    def _gauss_table(self) -> Callable[[int], np.ndarray]:
        M = self.M
        r = self.vars[0].residues
        base = self.unary[0]
        cache: dict[int, np.ndarray] = {}

        def row(y: int) -> np.ndarray:
            if y not in cache:
                cache[y] = np.bincount((base + r * y) % M, minlength=M)
            return cache[y]

        return row

    def _enumerate(self, var_ids: list[int], slopes: dict[int, np.ndarray]):
        """Yield (Y, exponent) arrays over all residue tuples of ``var_ids``.

        Trailing variables whose residue counts multiply to at most _BLOCK form
        a dense block; the next variable is cut into chunks so that every
        block stays near _BLOCK; the remaining leading variables are looped.
        """
        M = self.M
        sizes = [len(self.vars[k].residues) for k in var_ids]
        split = len(var_ids)
        inner = 1
        while split > 0 and inner * sizes[split - 1] <= _BLOCK:
            split -= 1
            inner *= sizes[split]
        if split > 0:
            chunked = split - 1
            chunk = max(1, _BLOCK // inner)
        else:
            chunked, chunk = None, 1
        outer_ids = var_ids[: chunked if chunked is not None else 0]
        block_ids = var_ids[split:]
        block_grid = (
            np.indices(sizes[split:], dtype=np.int64).reshape(len(block_ids), -1)
            if block_ids
            else np.zeros((0, 1), dtype=np.int64)
        )
        chunk_ranges = (
            [(a, min(a + chunk, sizes[chunked])) for a in range(0, sizes[chunked], chunk)]
            if chunked is not None
            else [None]
        )
        for outer in itertools.product(*(range(sizes[i]) for i in range(len(outer_ids)))):
            for rng in chunk_ranges:
                idx: dict[int, np.ndarray | int] = dict(zip(outer_ids, outer))
                width = block_grid.shape[1]
                if rng is not None:
                    a, b = rng
                    idx[var_ids[chunked]] = np.repeat(np.arange(a, b, dtype=np.int64), width)
                    reps = b - a
                else:
                    reps = 1
                for j, k in enumerate(block_ids):
                    idx[k] = np.tile(block_grid[j], reps)
                length = width * reps
                e = np.zeros(length, dtype=np.int64)
                for k in var_ids:
                    e = e + self.unary[k][idx[k]]
                for (k, kp), tab in self.pairs.items():
                    if kp == 0:
                        continue
                    e = e + tab[idx[k], idx[kp]]
                y = np.zeros(length, dtype=np.int64)
                for k, sl in slopes.items():
                    y = y + sl[idx[k]]
                yield y % M, e % M

    # -- modular evaluator ------------------------------------------------------

    def evaluate_modular(self, primes: Sequence[int] | None = None) -> CycNum:
        """Exact value via contraction in F_P and CRT reconstruction."""
        from metasum import _modular

        return _modular.evaluate(self, primes)


def _unit_inverses(r: np.ndarray, modulus: int) -> np.ndarray:
    """Inverses mod ``modulus`` of an array of units, via x^(phi - 1)."""
    if modulus >= 2**31:
        return np.array([pow(int(x), -1, modulus) for x in r], dtype=np.int64)
    exponent = euler_totient(modulus) - 1
    base = r % modulus
    out = np.ones_like(base)
    while exponent:
        if exponent & 1:
            out = out * base % modulus
        base = base * base % modulus
        exponent >>= 1
    return out


def _cyclic_convolve(a: np.ndarray, b: np.ndarray, M: int) -> np.ndarray:
    """Cyclic convolution of two count vectors of length M (exact)."""
    amax = int(np.abs(a).max()) if a.size else 0
    bmax = int(np.abs(b).max()) if b.size else 0
    dtype = np.int64 if amax * bmax * M < 2**62 else object
    nz_a, nz_b = np.flatnonzero(a), np.flatnonzero(b)
    if len(nz_a) > len(nz_b):
        a, b, nz_a = b, a, nz_b
    if len(nz_a) * 8 < M:
        # sparse side: shift-and-add is O(nnz * M) instead of O(M^2)
        out = np.zeros(M, dtype=dtype)
        dense = b.astype(dtype)
        for i in nz_a:
            out += np.roll(dense, int(i)) * int(a[i])
        return out.astype(object)
    full = np.convolve(a.astype(dtype), b.astype(dtype))
    out = full[:M].astype(object)
    out[: len(full) - M] += full[M:]
    return out
