"""Exact arithmetic in Z[zeta_M][1/p].

An element is stored as an integer coefficient vector in the power basis
1, z, ..., z^(phi(M)-1) of Z[z] / Phi_M(z), together with a denominator p^e.
Every constructor returns the canonical representative, so two elements with
the same modulus are equal exactly when their (coeffs, den_exp) agree.

Elements with different moduli are compared and combined after embedding both
into the lcm modulus (z_M = z_L^(L/M)).  After each operation the modulus is
shrunk where this is a pure relabelling:

* if q^2 | M and only exponents divisible by q carry coefficients, the element
  lives in Z[zeta_(M/q)] and the coefficients are read off directly;
* M = 2 mod 4 is rewritten over M/2, since zeta_(2m) = -zeta_m^((m+1)/2).

Neither step tries to find the smallest field containing the value.
"""

from __future__ import annotations

import cmath
import functools
import math
from collections.abc import Iterable, Sequence

import numpy as np

__all__ = [
    "CycNum",
    "cyclotomic_polynomial",
    "cyclotomic_polynomial_mobius",
    "euler_totient",
    "factorize",
    "root_of_unity",
]

_INT64_SAFE = 2**62


def factorize(n: int) -> dict[int, int]:
    """Trial-division factorization; the moduli used here are small."""
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def euler_totient(n: int) -> int:
    result = n
    for q in factorize(n):
        result = result // q * (q - 1)
    return result


def _mobius(n: int) -> int:
    f = factorize(n)
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def _poly_mul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_exact_div(num: list[int], den: list[int]) -> list[int]:
    """Divide integer polynomials when den is monic and divides num."""
    num = list(num)
    if den[-1] != 1:
        raise ValueError("divisor must be monic")
    dq = len(den) - 1
    quot = [0] * (len(num) - dq)
    for i in range(len(num) - 1, dq - 1, -1):
        c = num[i]
        if c:
            quot[i - dq] = c
            for j in range(dq + 1):
                num[i - dq + j] -= c * den[j]
    if any(num):
        raise ArithmeticError("polynomial division left a remainder")
    return quot


def _xd_minus_one(d: int) -> list[int]:
    return [-1] + [0] * (d - 1) + [1]


@functools.cache
def cyclotomic_polynomial_mobius(m: int) -> tuple[int, ...]:
    """Phi_m from the product over d | m of (x^d - 1)^mu(m/d).

    Low-order coefficient first.  This is the slow textbook route, kept as a
    cross-check for :func:`cyclotomic_polynomial`.
    """
    if m < 1:
        raise ValueError("modulus must be positive")
    num, den = [1], [1]
    for d in range(1, m + 1):
        if m % d:
            continue
        mu = _mobius(m // d)
        if mu == 1:
            num = _poly_mul(num, _xd_minus_one(d))
        elif mu == -1:
            den = _poly_mul(den, _xd_minus_one(d))
    return tuple(_poly_exact_div(num, den))


@functools.cache
def cyclotomic_polynomial(m: int) -> tuple[int, ...]:
    """Phi_m with low-order coefficient first.

    Uses Phi_m(x) = Phi_r(x^(m/r)) where r is the radical of m, so only the
    squarefree polynomial goes through the Mobius product.
    """
    if m < 1:
        raise ValueError("modulus must be positive")
    rad = math.prod(factorize(m))
    base = cyclotomic_polynomial_mobius(rad)
    step = m // rad
    out = [0] * ((len(base) - 1) * step + 1)
    for i, c in enumerate(base):
        out[i * step] = c
    return tuple(out)


@functools.cache
def _reduction_table(m: int) -> tuple[int, int, np.ndarray]:
    """Return (rad, step, R) where row b of R is y^b mod Phi_rad(y), b < rad."""
    rad = math.prod(factorize(m))
    step = m // rad
    phi = cyclotomic_polynomial_mobius(rad)
    deg = len(phi) - 1
    table = np.zeros((rad, deg), dtype=object)
    row = [0] * deg
    if deg:
        row[0] = 1
    else:  # rad == 1: the ring is Z and y = 1
        table = np.ones((1, 1), dtype=object)
        return rad, step, table
    for b in range(rad):
        table[b, :] = row
        # multiply by y and reduce the overflow with the monic relation
        top = row[-1]
        row = [0] + row[:-1]
        if top:
            for j in range(deg):
                row[j] -= top * phi[j]
    return rad, step, table


def _matmul_exact(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Integer matrix product that stays in int64 only when provably safe."""
    amax = int(np.max(np.abs(a))) if a.size else 0
    bmax = int(np.max(np.abs(b))) if b.size else 0
    if amax * bmax * max(1, a.shape[-1]) < _INT64_SAFE:
        return a.astype(np.int64) @ b.astype(np.int64)
    return a.astype(object) @ b.astype(object)


def _canonical_from_exponents(m: int, vec: np.ndarray) -> np.ndarray:
    """Reduce sum_e vec[e] z^e (len(vec) == m) to canonical coefficients."""
    rad, step, table = _reduction_table(m)
    if rad == 1:
        return np.array([sum(int(x) for x in vec)], dtype=object)
    grid = np.asarray(vec).reshape(rad, step)
    reduced = _matmul_exact(table.T, grid)
    return reduced.reshape(-1)


def _fold(m: int, exponents: Iterable[int], values: Iterable[int]) -> np.ndarray:
    vec = np.zeros(m, dtype=object)
    for e, v in zip(exponents, values):
        vec[e % m] += v
    return vec


class CycNum:
    """An exact element of Z[zeta_M][1/p].

    ``coeffs[i]`` multiplies zeta_M^i; the represented value is
    ``sum(coeffs[i] * zeta_M**i) / prime**den_exp``.
    """

    __slots__ = ("modulus", "coeffs", "den_exp", "prime")

    def __init__(
        self,
        modulus: int,
        coeffs: Sequence[int],
        den_exp: int = 0,
        prime: int | None = None,
    ) -> None:
        if modulus < 1:
            raise ValueError("modulus must be positive")
        if den_exp < 0:
            raise ValueError("denominator exponent must be nonnegative")
        if den_exp and not prime:
            raise ValueError("a denominator needs a prime")
        deg = euler_totient(modulus)
        cs = [int(c) for c in coeffs]
        if len(cs) > deg:
            vec = np.zeros(modulus, dtype=object)
            for i, c in enumerate(cs):
                vec[i % modulus] += c
            cs = [int(c) for c in _canonical_from_exponents(modulus, vec)]
        cs = cs + [0] * (deg - len(cs))
        self.modulus = modulus
        self.coeffs = tuple(cs)
        self.den_exp = den_exp
        self.prime = prime if den_exp else None
        self._normalize()

    # -- construction -----------------------------------------------------

    @classmethod
    def from_int(cls, value: int) -> CycNum:
        return cls(1, [value])

    @classmethod
    def from_exponent_counts(
        cls, modulus: int, counts: Sequence[int] | np.ndarray
    ) -> CycNum:
        """Build sum_e counts[e] * zeta_M^e from a length-M count vector."""
        vec = np.asarray(counts)
        if vec.shape != (modulus,):
            raise ValueError("count vector must have one entry per exponent")
        if vec.dtype != object:
            vec = vec.astype(object)
        return cls(modulus, list(_canonical_from_exponents(modulus, vec)))

    @classmethod
    def from_terms(cls, modulus: int, terms: dict[int, int]) -> CycNum:
        vec = _fold(modulus, terms.keys(), terms.values())
        return cls.from_exponent_counts(modulus, vec)

    # -- normalization ----------------------------------------------------

    def _set(self, modulus: int, coeffs: Sequence[int]) -> None:
        self.modulus = modulus
        self.coeffs = tuple(int(c) for c in coeffs)

    def _normalize(self) -> None:
        if self.den_exp:
            p = self.prime
            cs = self.coeffs
            e = self.den_exp
            while e and all(c % p == 0 for c in cs):
                cs = tuple(c // p for c in cs)
                e -= 1
            self.coeffs = cs
            self.den_exp = e
            if not e:
                self.prime = None
        self._shrink_modulus()

    def _shrink_modulus(self) -> None:
        changed = True
        while changed and self.modulus > 1:
            changed = False
            m = self.modulus
            if m % 4 == 2:
                half = m // 2
                shift = (half + 1) // 2
                vec = np.zeros(half, dtype=object)
                for e, c in enumerate(self.coeffs):
                    if c:
                        sign = -1 if e % 2 else 1
                        vec[(e * shift) % half] += sign * c
                self._set(half, _canonical_from_exponents(half, vec))
                changed = True
                continue
            for q, k in factorize(m).items():
                if k < 2:
                    continue
                if all(c == 0 for i, c in enumerate(self.coeffs) if i % q):
                    self._set(m // q, self.coeffs[::q])
                    changed = True
                    break

    # -- helpers ------------------------------------------------------------

    def embed(self, modulus: int) -> tuple[int, ...]:
        """Canonical coefficients of self viewed in Z[zeta_modulus]."""
        if modulus % self.modulus:
            raise ValueError(f"{self.modulus} does not divide {modulus}")
        if modulus == self.modulus:
            return self.coeffs
        scale = modulus // self.modulus
        vec = np.zeros(modulus, dtype=object)
        for i, c in enumerate(self.coeffs):
            vec[i * scale] += c
        return tuple(int(c) for c in _canonical_from_exponents(modulus, vec))

    @staticmethod
    def _common_prime(a: CycNum, b: CycNum) -> int | None:
        if a.prime and b.prime and a.prime != b.prime:
            raise ValueError(
                f"denominators in different primes ({a.prime}, {b.prime})"
            )
        return a.prime or b.prime

    @staticmethod
    def _coerce(x: CycNum | int) -> CycNum:
        if isinstance(x, CycNum):
            return x
        if isinstance(x, (int, np.integer)):
            return CycNum.from_int(int(x))
        return NotImplemented  # type: ignore[return-value]

    def _aligned(self, other: CycNum) -> tuple[int, list[int], list[int], int, int | None]:
        m = math.lcm(self.modulus, other.modulus)
        prime = self._common_prime(self, other)
        e = max(self.den_exp, other.den_exp)
        a = [c * prime ** (e - self.den_exp) for c in self.embed(m)] if e else list(self.embed(m))
        b = [c * prime ** (e - other.den_exp) for c in other.embed(m)] if e else list(other.embed(m))
        return m, a, b, e, prime

    # -- ring operations ----------------------------------------------------

    def __add__(self, other: CycNum | int) -> CycNum:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        m, a, b, e, prime = self._aligned(other)
        return CycNum(m, [x + y for x, y in zip(a, b)], e, prime)

    __radd__ = __add__

    def __neg__(self) -> CycNum:
        return CycNum(self.modulus, [-c for c in self.coeffs], self.den_exp, self.prime)

    def __sub__(self, other: CycNum | int) -> CycNum:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: CycNum | int) -> CycNum:
        return (-self) + other

    def __mul__(self, other: CycNum | int) -> CycNum:
        if isinstance(other, (int, np.integer)):
            return self.scale(int(other))
        if not isinstance(other, CycNum):
            return NotImplemented
        m = math.lcm(self.modulus, other.modulus)
        prime = self._common_prime(self, other)
        a = np.array(self.embed(m), dtype=object)
        b = np.array(other.embed(m), dtype=object)
        amax = max((abs(int(x)) for x in a), default=0)
        bmax = max((abs(int(x)) for x in b), default=0)
        if amax * bmax * len(a) < _INT64_SAFE:
            prod = np.convolve(a.astype(np.int64), b.astype(np.int64)).astype(object)
        else:
            prod = np.convolve(a, b)
        vec = np.zeros(m, dtype=object)
        for i, c in enumerate(prod):
            if c:
                vec[i % m] += c
        return CycNum(
            m,
            list(_canonical_from_exponents(m, vec)),
            self.den_exp + other.den_exp,
            prime,
        )

    __rmul__ = __mul__

    def scale(self, k: int) -> CycNum:
        """Multiply by a rational integer."""
        return CycNum(self.modulus, [k * c for c in self.coeffs], self.den_exp, self.prime)

    def __pow__(self, k: int) -> CycNum:
        if k < 0:
            raise ValueError("negative powers need divide_by_p_power or a conjugate")
        result = CycNum.from_int(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conjugate(self) -> CycNum:
        """Complex conjugation: zeta_M^i -> zeta_M^(-i)."""
        m = self.modulus
        vec = np.zeros(m, dtype=object)
        for i, c in enumerate(self.coeffs):
            vec[(-i) % m] += c
        return CycNum(m, list(_canonical_from_exponents(m, vec)), self.den_exp, self.prime)

    def divide_by_p_power(self, p: int, k: int) -> CycNum:
        """Exact division by p^k (k may be negative, meaning multiplication)."""
        if k < 0:
            return self.scale(p ** (-k))
        if self.prime and self.prime != p:
            raise ValueError(f"denominator already involves {self.prime}")
        return CycNum(self.modulus, self.coeffs, self.den_exp + k, p if (self.den_exp + k) else None)

    def divide_exact(self, other: CycNum) -> CycNum:
        """Divide by an element whose norm to Q is a signed prime power.

        Computes self * conj(other) / (other * conj(other)), which is valid
        whenever other * conj(other) is a rational integer +-p^k; this covers
        the Gauss sums g(k) with n not dividing k.
        """
        norm = other * other.conjugate()
        if not norm.is_rational():
            raise ArithmeticError("divisor times its conjugate is not rational")
        value = norm.rational_value()
        num, den = value.numerator, value.denominator
        if num == 0:
            raise ZeroDivisionError("division by zero")
        sign = 1 if num > 0 else -1
        num = abs(num)
        prime = self.prime or other.prime
        if num == 1:
            k = 0
        else:
            f = factorize(num)
            if len(f) != 1:
                raise ArithmeticError(f"norm {num} is not a prime power")
            (q, k), = f.items()
            if prime and prime != q:
                raise ArithmeticError("norm prime differs from denominator prime")
            prime = q
        quotient = self * other.conjugate()
        # dividing by num / den: multiply by den, divide by prime^k
        quotient = quotient.scale(sign * den)
        if k:
            quotient = quotient.divide_by_p_power(prime, k)
        return quotient

    # -- queries ------------------------------------------------------------

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def rational_value(self):
        from fractions import Fraction

        if not self.is_rational():
            raise ValueError("not a rational number")
        den = self.prime**self.den_exp if self.den_exp else 1
        return Fraction(self.coeffs[0] if self.coeffs else 0, den)

    def equals(self, other: CycNum | int) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        _, a, b, _, _ = self._aligned(other)
        return a == b

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, (CycNum, int, np.integer)):
            return NotImplemented
        return self.equals(other)  # type: ignore[arg-type]

    __hash__ = None  # type: ignore[assignment]

    def to_complex(self, precision: int | None = None) -> complex:
        """Floating-point value; for display and sanity checks only."""
        m = self.modulus
        if precision is not None and precision > 15:
            import mpmath

            with mpmath.workdps(precision + 5):
                total = mpmath.mpc(0)
                for i, c in enumerate(self.coeffs):
                    if c:
                        total += c * mpmath.expjpi(mpmath.mpf(2 * i) / m)
                if self.den_exp:
                    total /= mpmath.mpf(self.prime) ** self.den_exp
                return complex(total)
        total = 0j
        for i, c in enumerate(self.coeffs):
            if c:
                total += c * cmath.exp(2j * cmath.pi * i / m)
        if self.den_exp:
            total /= self.prime**self.den_exp
        return total

    def to_json(self, digits: int = 12) -> dict:
        z = self.to_complex()
        return {
            "modulus": self.modulus,
            "coeffs": list(self.coeffs),
            "p_denom_exp": self.den_exp,
            "prime": self.prime,
            "approx": [round(z.real, digits), round(z.imag, digits)],
        }

    @classmethod
    def from_json(cls, data: dict) -> CycNum:
        return cls(data["modulus"], data["coeffs"], data.get("p_denom_exp", 0), data.get("prime"))

    def __repr__(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            terms.append(str(c) if i == 0 else f"{c}*z{self.modulus}^{i}")
        body = " + ".join(terms) if terms else "0"
        if self.den_exp:
            body = f"({body})/{self.prime}^{self.den_exp}"
        return f"CycNum({body})"


def root_of_unity(a: int, modulus: int) -> CycNum:
    """zeta_M^a, stored over the smallest cyclotomic ring the reduced fraction needs."""
    if modulus < 1:
        raise ValueError("modulus must be positive")
    a %= modulus
    g = math.gcd(a, modulus)
    m = modulus // g
    vec = np.zeros(m, dtype=object)
    vec[a // g] = 1
    return CycNum.from_exponent_counts(m, vec)
