"""Slow, independent reference evaluations used to pin exact values in tests.

Everything here works in floating-point complex numbers with plain Python
loops and shares no code with the package beyond the choice of generator
for the residue symbol.
"""

from __future__ import annotations

import cmath
import functools
import math
from collections.abc import Sequence


def e(x: float) -> complex:
    return cmath.exp(2j * cmath.pi * x)


@functools.lru_cache(maxsize=None)
def discrete_logs(p: int, generator: int) -> dict[int, int]:
    out, x = {}, 1
    for i in range(p - 1):
        out[x] = i
        x = x * generator % p
    return out


def residue_symbol(p: int, n: int, generator: int, a: int, power: int = 1) -> complex:
    """chi(a)^power with chi(generator) = exp(2 pi i / n); 0 when p | a."""
    if a % p == 0:
        return 0
    log = discrete_logs(p, generator)[a % p]
    return e((log * power % n) / n)


def gauss_sum(p: int, n: int, generator: int, j: int, m: int, ell: int) -> complex:
    """sum over units c mod p^ell of chi(c)^(j ell) psi(p^m c / p^ell)."""
    if ell == 0:
        return 1
    total = 0
    for c in range(p**ell):
        if c % p:
            total += residue_symbol(p, n, generator, c, j * ell) * e(p**m * c / p**ell)
    return total


def gl4_sum(
    p: int,
    n: int,
    generator: int,
    ell: Sequence[int],
    m: Sequence[int],
) -> complex:
    """The explicit GL(4) sum, looped naively over every c-tuple.

    c1 runs mod p^(l1+l2+l3), ci mod p^li (units when li > 0); bi is the
    inverse of ci mod p^li and 0 when li = 0.  The divisibility conditions
    are not imposed, so callers see the raw value.
    """
    l1, l2, l3, l4 = ell
    m1, m2, m3 = m

    def chi(c: int, k: int) -> complex:
        return residue_symbol(p, n, generator, c, k) if k else 1

    def values(k: int) -> list[int]:
        return [c for c in range(p**k) if k == 0 or c % p]

    def inv(c: int, k: int) -> int:
        return pow(c, -1, p**k) if k else 0

    total = 0
    for c4 in values(l4):
        b4 = inv(c4, l4)
        for c2 in values(l2):
            b2 = inv(c2, l2)
            for c3 in values(l3):
                b3 = inv(c3, l3)
                for c1 in (c for c in range(p ** (l1 + l2 + l3)) if l1 == 0 or c % p):
                    x = (
                        -(p**m1) * (b2 * c1 * p**l4 / p ** (l1 + l3) + b4 * c3 / p**l3)
                        + p**m2 * c4 / p**l4
                        + p**m3 * (c1 * b3 * p**l4 / p ** (l1 + l2) + c2 * b4 / p**l2)
                    )
                    total += chi(c1, l1) * chi(c2, l2) * chi(c3, l3) * chi(c4, l4) * e(x)
    return total * p ** (2 * l4)


def highest_root_coefficients(cartan: Sequence[Sequence[int]]) -> tuple[int, ...]:
    """Grow roots from the simple ones by adding simple roots; return the tallest.

    ``cartan[i][j]`` is <alpha_j, alpha_i^vee>.
    """
    rank = len(cartan)
    simple = [tuple(int(i == j) for j in range(rank)) for i in range(rank)]
    roots = set(simple)
    frontier = list(simple)
    while frontier:
        nxt = []
        for beta in frontier:
            for i in range(rank):
                # alpha_i-string through beta: (steps down) - (steps up) = <beta, alpha_i^vee>
                pairing = sum(beta[j] * cartan[i][j] for j in range(rank))
                down = 0
                probe = list(beta)
                while True:
                    probe[i] -= 1
                    if tuple(probe) in roots:
                        down += 1
                    else:
                        break
                if down - pairing > 0:
                    up = list(beta)
                    up[i] += 1
                    if tuple(up) not in roots:
                        roots.add(tuple(up))
                        nxt.append(tuple(up))
        frontier = nxt
    return max(roots, key=sum)


def cyclotomic_value(coeffs: Sequence[int], modulus: int) -> complex:
    return sum(c * e(i / modulus) for i, c in enumerate(coeffs))


def close(a: complex, b: complex, tol: float = 1e-6) -> bool:
    return abs(a - b) <= tol * max(1.0, abs(b))


def phi(p: int, k: int) -> int:
    return p**k - p ** (k - 1) if k else 1


def isclose_int(z: complex, target: int) -> bool:
    return math.isclose(z.real, target, abs_tol=1e-6) and abs(z.imag) < 1e-6
