"""Modular evaluation of a :class:`~metasum._kernel.SumProblem`.

For a prime P = 1 mod M, every choice of a primitive M-th root of unity w in
F_P gives a ring map Z[zeta_M] -> F_P.  Under such a map each factor of the
summand becomes an element of F_P, and the sum becomes an ordinary tensor
contraction, done here by eliminating one variable at a time.

The value lies in Z[zeta_L] with L = lcm(n, rad(M)) (every p-power
additive-character denominator collapses to p once all variables are summed).
The power-basis coefficients of the value modulo P are recovered from its
phi(L) images with a Vandermonde solve, and several primes are combined by
CRT until their product exceeds twice an a priori coefficient bound.  Extra
embeddings that agree modulo L but differ modulo M serve as a membership
check; if it fails the reconstruction is redone over Z[zeta_M].
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from typing import TYPE_CHECKING

import numpy as np

from metasum.cyclotomic import CycNum, _reduction_table, euler_totient, factorize

if TYPE_CHECKING:
    from metasum._kernel import SumProblem

_PRIME_CEILING = 2**31
_CHUNK_ELEMENTS = 1 << 22


def _is_prime(x: int) -> bool:
    if x < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if x % q == 0:
            return x == q
    d, s = x - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17):  # deterministic below 3.4e14
        y = pow(a, d, x)
        if y in (1, x - 1):
            continue
        for _ in range(s - 1):
            y = y * y % x
            if y == x - 1:
                break
        else:
            return False
    return True


def primes_one_mod(M: int, count: int, ceiling: int = _PRIME_CEILING) -> list[int]:
    """The ``count`` largest primes below ``ceiling`` that are 1 mod M."""
    out = []
    t = (ceiling - 2) // M
    while len(out) < count:
        if t <= 0:
            raise ValueError(f"not enough primes = 1 mod {M} below {ceiling}")
        cand = t * M + 1
        if _is_prime(cand):
            out.append(cand)
        t -= 1
    return out


def _primitive_root_of_unity(M: int, P: int) -> int:
    qs = list(factorize(M)) if M > 1 else []
    for x in range(2, P):
        w = pow(x, (P - 1) // M, P)
        if all(pow(w, M // q, P) != 1 for q in qs):
            return w
    raise ValueError("no primitive root of unity found")


def _coefficient_bound(L: int) -> int:
    """Largest |coefficient| of x^e reduced mod Phi_L, over 0 <= e < L."""
    _rad, _step, table = _reduction_table(L)
    return max(1, max(abs(int(x)) for x in table.flat))


def _align(arr: np.ndarray, vs: tuple[int, ...], v: int, union: list[int]) -> np.ndarray:
    """Reorder a factor to axes (E, v, *union), inserting length-1 axes."""
    order = [vs.index(v)] + [vs.index(u) for u in union if u in vs]
    arr = np.transpose(arr, [0] + [1 + i for i in order])
    shape = [arr.shape[0], arr.shape[1]]
    it = iter(arr.shape[2:])
    for u in union:
        shape.append(next(it) if u in vs else 1)
    return arr.reshape(shape)


def _contract(factors: list, sizes: dict[int, int], P: int, E: int) -> np.ndarray:
    """Sum over all variables of the product of factors, modulo P (per embedding)."""
    factors = list(factors)
    remaining = set(sizes)
    while remaining:
        def cost(v: int) -> int:
            union = set()
            for vs, _ in factors:
                if v in vs:
                    union |= set(vs)
            union.discard(v)
            return math.prod(sizes[u] for u in union) * sizes[v]

        v = min(sorted(remaining), key=cost)
        involved = [f for f in factors if v in f[0]]
        others = [f for f in factors if v not in f[0]]
        union = sorted(set().union(*(set(vs) for vs, _ in involved)) - {v})
        out_shape = [E] + [sizes[u] for u in union]
        result = np.zeros(out_shape, dtype=np.int64)
        inner = max(1, math.prod(out_shape))
        chunk = max(1, min(sizes[v], _CHUNK_ELEMENTS // inner))
        if not involved:
            # a variable carrying no factor contributes its range size
            result = np.full(out_shape, sizes[v] % P, dtype=np.int64)
        for start in range(0, sizes[v], chunk):
            acc = None
            for vs, arr in involved:
                sl = [slice(None)] * arr.ndim
                sl[1 + vs.index(v)] = slice(start, start + chunk)
                piece = _align(arr[tuple(sl)], vs, v, union)
                acc = piece if acc is None else (acc * piece) % P
            if acc is not None:
                result = (result + acc.sum(axis=1)) % P
        factors = others + [(tuple(union), result)]
        remaining.discard(v)
    total = np.ones(E, dtype=np.int64)
    for vs, arr in factors:
        total = (total * arr.reshape(E)) % P
    return total


def _solve_mod(A: np.ndarray, b: np.ndarray, P: int) -> np.ndarray:
    """Solve A x = b over F_P (A square, invertible)."""
    n = A.shape[0]
    aug = np.concatenate([A % P, (b % P)[:, None]], axis=1).astype(object)
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r, col] % P)
        if piv != col:
            aug[[col, piv]] = aug[[piv, col]]
        inv = pow(int(aug[col, col]), -1, P)
        aug[col] = (aug[col] * inv) % P
        for r in range(n):
            if r != col and aug[r, col]:
                aug[r] = (aug[r] - aug[r, col] * aug[col]) % P
    return aug[:, n]


def _embedding_values(problem: SumProblem, P: int, ks: Sequence[int]) -> np.ndarray:
    M = problem.M
    w = _primitive_root_of_unity(M, P)
    powers = np.empty(M, dtype=np.int64)
    x = 1
    for i in range(M):
        powers[i] = x
        x = x * w % P
    kk = np.asarray(ks, dtype=np.int64)
    E = len(kk)

    def lift(table: np.ndarray) -> np.ndarray:
        exps = (kk.reshape((E,) + (1,) * table.ndim) * table[None]) % M
        return powers[exps]

    factors = []
    sizes = {}
    for k, v in enumerate(problem.vars):
        sizes[k] = len(v.residues)
        factors.append(((k,), lift(problem.unary[k])))
    for (k, kp), tab in problem.pairs.items():
        factors.append(((k, kp), lift(tab)))
    return _contract(factors, sizes, P, E)


def _reconstruct(problem: SumProblem, L: int, primes: Sequence[int] | None) -> CycNum | None:
    M = problem.M
    units = [k for k in range(1, L + 1) if math.gcd(k, L) == 1] if L > 1 else [1]
    d = euler_totient(L)
    checks = []
    if M != L:
        checks = [units[0] + L, units[-1] + L]
    terms = math.prod(len(v.residues) for v in problem.vars)
    bound = terms * _coefficient_bound(L)
    if primes is None:
        count = 1
        while True:
            cand = primes_one_mod(M, count)
            if math.prod(cand) > 2 * bound:
                break
            count += 1
        primes = cand
    elif math.prod(primes) <= 2 * bound:
        raise ValueError("supplied primes are too small for the coefficient bound")
    residues = []
    for P in primes:
        if (P - 1) % M:
            raise ValueError(f"prime {P} is not 1 mod {M}")
        vals = _embedding_values(problem, P, units + checks)
        main = vals[: len(units)]
        for i, k in enumerate(checks):
            ref = units.index(k - L)
            if vals[len(units) + i] != main[ref]:
                return None
        w = _primitive_root_of_unity(M, P)
        z = [pow(w, (k * (M // L)) % M, P) for k in units]
        V = np.array([[pow(zi, j, P) for j in range(d)] for zi in z], dtype=object)
        residues.append(_solve_mod(V, np.array(main, dtype=object), P))
    # CRT to symmetric representatives
    modulus = 1
    coeffs = [0] * d
    for P, res in zip(primes, residues):
        for i in range(d):
            r = int(res[i])
            c = coeffs[i]
            t = ((r - c) * pow(modulus, -1, P)) % P
            coeffs[i] = c + modulus * t
        modulus *= P
    coeffs = [c - modulus if c > modulus // 2 else c for c in coeffs]
    return CycNum(L, coeffs)


def evaluate(problem: SumProblem, primes: Sequence[int] | None = None) -> CycNum:
    if not problem.vars:
        return CycNum.from_int(1)
    M = problem.M
    L = math.lcm(problem.n, math.prod(factorize(M))) if M > 1 else 1
    value = _reconstruct(problem, L, primes)
    if value is None:
        value = _reconstruct(problem, M, primes)
        if value is None:
            raise AssertionError("inconsistent embeddings at the full modulus")
    return value.scale(problem.multiplicity)
