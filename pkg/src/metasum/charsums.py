"""Residue symbols, additive characters and Gauss sums modulo prime powers."""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from metasum.cyclotomic import CycNum, factorize, root_of_unity

__all__ = [
    "PrimeContext",
    "additive_char",
    "euler_phi",
    "gauss_g",
    "gauss_gml",
    "gauss_h",
    "gauss_sum",
    "inverse_mod",
    "residue_symbol",
]


def _is_prime(p: int) -> bool:
    return p > 1 and factorize(p) == {p: 1}


def _primitive_root(p: int) -> int:
    order_factors = list(factorize(p - 1))
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in order_factors):
            return g
    return 1  # p == 2


@dataclass(frozen=True)
class PrimeContext:
    """A prime p and a cover degree n with 2n | p - 1.

    The residue character sends the fixed primitive root g to zeta_n, i.e.
    chi(a) = zeta_n^(ind_g(a) mod n).  ``index_table[a]`` is ind_g(a) for
    units a mod p (entry 0 is unused and set to -1).
    """

    p: int
    n: int
    generator: int = 0
    index_table: tuple[int, ...] = field(default=(), repr=False, compare=False)

    def __post_init__(self) -> None:
        p, n = self.p, self.n
        if n < 1:
            raise ValueError("cover degree n must be at least 1")
        if p < 3 or not _is_prime(p):
            raise ValueError(f"p = {p} must be an odd prime")
        if (p - 1) % (2 * n):
            raise ValueError(f"2n = {2 * n} must divide p - 1 = {p - 1}")
        g = self.generator or _primitive_root(p)
        if any(pow(g, (p - 1) // q, p) == 1 for q in factorize(p - 1)):
            raise ValueError(f"{g} is not a primitive root mod {p}")
        table = [-1] * p
        x = 1
        for i in range(p - 1):
            table[x] = i
            x = x * g % p
        object.__setattr__(self, "generator", g)
        object.__setattr__(self, "index_table", tuple(table))

    @functools.cached_property
    def chi_exponents(self) -> np.ndarray:
        """chi(a) = zeta_n^chi_exponents[a mod p]; -1 marks a = 0."""
        idx = np.array(self.index_table, dtype=np.int64)
        return np.where(idx >= 0, idx % self.n, -1)

    def chi_exponent(self, a: int) -> int:
        r = a % self.p
        if r == 0:
            raise ValueError(f"{a} is not a unit mod {self.p}")
        return self.index_table[r] % self.n

    def to_json(self) -> dict:
        return {"p": self.p, "n": self.n, "generator": self.generator}


def residue_symbol(ctx: PrimeContext, a: int, power: int = 1) -> CycNum:
    """The n-th power residue symbol (a/p) raised to ``power``."""
    return root_of_unity(power * ctx.chi_exponent(a), ctx.n)


def additive_char(ctx: PrimeContext | int, a: int, k: int) -> CycNum:
    """psi(a / p^k) = zeta_(p^k)^a."""
    p = ctx.p if isinstance(ctx, PrimeContext) else ctx
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        return CycNum.from_int(1)
    return root_of_unity(a, p**k)


def inverse_mod(a: int, p: int, k: int) -> int:
    """The inverse of a modulo p^k in [0, p^k); by convention 0 when k == 0."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        return 0
    if a % p == 0:
        raise ValueError(f"{a} is not invertible modulo {p}^{k}")
    return pow(a, -1, p**k)


def euler_phi(p: int, k: int) -> int:
    if k < 0:
        raise ValueError("k must be nonnegative")
    return 1 if k == 0 else p ** (k - 1) * (p - 1)


@functools.lru_cache(maxsize=4096)
def gauss_sum(ctx: PrimeContext, j: int, m: int, ell: int) -> CycNum:
    """g_j(m, ell): sum over units a mod p^ell of chi(a)^(j*ell) psi(p^m a / p^ell).

    Evaluated by direct summation.  The summand only depends on a modulo
    p^r with r = max(1, ell - m), so the sum runs over units mod p^r and is
    multiplied by p^(ell - r).  ell == 0 gives 1.
    """
    if m < 0 or ell < 0:
        raise ValueError("m and ell must be nonnegative")
    if ell == 0:
        return CycNum.from_int(1)
    p, n = ctx.p, ctx.n
    r = max(1, ell - m)
    reps = np.arange(p**r, dtype=np.int64)
    reps = reps[reps % p != 0]
    char_exp = (j * ell * ctx.chi_exponents[reps % p]) % n
    # psi(p^m a / p^ell) = zeta_(p^r)^a when m < ell; trivial otherwise
    add_exp = reps % p ** (ell - m) if m < ell else np.zeros_like(reps)
    add_den = p ** max(ell - m, 0)
    modulus = n * add_den
    exps = (char_exp * add_den + add_exp * n) % modulus
    counts = np.bincount(exps, minlength=modulus)
    value = CycNum.from_exponent_counts(modulus, counts)
    return value.scale(p ** (ell - r))


def gauss_g(ctx: PrimeContext, k: int) -> CycNum:
    """g(k) = g_1(k - 1, k)."""
    if k < 1:
        raise ValueError("g(k) needs k >= 1")
    return gauss_sum(ctx, 1, k - 1, k)


def gauss_h(ctx: PrimeContext, k: int) -> CycNum:
    """h(k) = g_1(k, k)."""
    return gauss_sum(ctx, 1, k, k)


def gauss_gml(ctx: PrimeContext, m: int, ell: int) -> CycNum:
    """g(m, ell) = g_1(m, ell)."""
    return gauss_sum(ctx, 1, m, ell)
