"""
Exact arithmetic in the cyclotomic field Q(zeta_N).

Elements are dense rational coefficient vectors in the power basis
1, zeta, ..., zeta^(phi(N) - 1); products are reduced modulo the N-th
cyclotomic polynomial and inverses come from the polynomial extended
Euclidean algorithm.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Union

from sympy import QQ, Matrix, Poly, Rational, cyclotomic_poly, divisors, symbols, totient
from sympy.ntheory import mobius

logger = logging.getLogger(__name__)

x = symbols("x")

Scalar = Union[int, Fraction]


@lru_cache(maxsize=None)
def cyclotomic_modulus(n: int) -> Poly:
    if n < 1:
        raise ValueError("conductor must be positive")
    return Poly(cyclotomic_poly(n, x), x, domain=QQ)


@lru_cache(maxsize=None)
def degree(n: int) -> int:
    return int(totient(n))


def _to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    rational = Rational(value)
    return Fraction(int(rational.p), int(rational.q))


def _to_poly(coeffs: Iterable[Fraction]) -> Poly:
    return Poly(
        [Rational(c.numerator, c.denominator) for c in reversed(tuple(coeffs))] or [0],
        x,
        domain=QQ,
    )


def ramanujan_sum(n: int, k: int) -> int:
    """Trace of zeta_n^k from Q(zeta_n) to Q."""
    g = math.gcd(k, n)
    return int(mobius(n // g)) * degree(n) // degree(n // g)


@dataclass(frozen=True)
class CyclotomicNumber:
    N: int
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("conductor must be positive")
        coeffs = tuple(_to_fraction(c) for c in self.coeffs)
        if len(coeffs) != degree(self.N):
            raise ValueError(f"expected {degree(self.N)} coefficients for N={self.N}")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def from_poly(cls, n: int, poly: Poly) -> "CyclotomicNumber":
        reduced = poly.rem(cyclotomic_modulus(n)) if poly.degree() >= degree(n) else poly
        values = [_to_fraction(c) for c in reversed(reduced.all_coeffs())]
        values += [Fraction(0)] * (degree(n) - len(values))
        return cls(n, tuple(values[: degree(n)]))

    @classmethod
    def rational(cls, n: int, value: Scalar) -> "CyclotomicNumber":
        return cls(n, (Fraction(value),) + (Fraction(0),) * (degree(n) - 1))

    def to_poly(self) -> Poly:
        return _to_poly(self.coeffs)

    def _coerce(self, other) -> tuple["CyclotomicNumber", "CyclotomicNumber"]:
        if isinstance(other, (int, Fraction)):
            return self, CyclotomicNumber.rational(self.N, other)
        if not isinstance(other, CyclotomicNumber):
            return NotImplemented
        if other.N == self.N:
            return self, other
        n = math.lcm(self.N, other.N)
        return self.lift(n // self.N), other.lift(n // other.N)

    def __add__(self, other):
        pair = self._coerce(other)
        if pair is NotImplemented:
            return NotImplemented
        a, b = pair
        return CyclotomicNumber(a.N, tuple(p + q for p, q in zip(a.coeffs, b.coeffs)))

    __radd__ = __add__

    def __neg__(self) -> "CyclotomicNumber":
        return CyclotomicNumber(self.N, tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        pair = self._coerce(other)
        if pair is NotImplemented:
            return NotImplemented
        a, b = pair
        return CyclotomicNumber(a.N, tuple(p - q for p, q in zip(a.coeffs, b.coeffs)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CyclotomicNumber(self.N, tuple(c * other for c in self.coeffs))
        pair = self._coerce(other)
        if pair is NotImplemented:
            return NotImplemented
        a, b = pair
        return CyclotomicNumber.from_poly(a.N, a.to_poly() * b.to_poly())

    __rmul__ = __mul__

    def inverse(self) -> "CyclotomicNumber":
        if self.is_zero():
            raise ZeroDivisionError("division by zero in Q(zeta_N)")
        if degree(self.N) == 1:
            return CyclotomicNumber(self.N, (1 / self.coeffs[0],))
        return CyclotomicNumber.from_poly(self.N, self.to_poly().invert(cyclotomic_modulus(self.N)))

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero in Q(zeta_N)")
            return CyclotomicNumber(self.N, tuple(c / other for c in self.coeffs))
        pair = self._coerce(other)
        if pair is NotImplemented:
            return NotImplemented
        a, b = pair
        return a * b.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int) -> "CyclotomicNumber":
        if k < 0:
            return self.inverse() ** (-k)
        result = CyclotomicNumber.rational(self.N, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coeffs[0] == other
        if not isinstance(other, CyclotomicNumber):
            return NotImplemented
        pair = self._coerce(other)
        return pair[0].coeffs == pair[1].coeffs

    def __hash__(self) -> int:
        if self.is_rational():
            return hash(self.coeffs[0])
        canonical = self.canonical()
        return hash((canonical.N, canonical.coeffs))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def rational_part(self) -> Fraction:
        """The value when the element lies in Q."""
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    def trace(self) -> Fraction:
        """Trace from Q(zeta_N) down to Q."""
        return sum(
            (c * ramanujan_sum(self.N, k) for k, c in enumerate(self.coeffs) if c),
            Fraction(0),
        )

    def conjugate(self, k: int) -> "CyclotomicNumber":
        """Image under the Galois automorphism zeta -> zeta^k, gcd(k, N) = 1."""
        if math.gcd(k, self.N) != 1:
            raise ValueError(f"{k} is not a unit mod {self.N}")
        total = CyclotomicNumber.rational(self.N, 0)
        for j, c in enumerate(self.coeffs):
            if c:
                total = total + zeta_pow(self.N, j * k) * c
        return total

    def complex_conjugate(self) -> "CyclotomicNumber":
        return self.conjugate(-1 % self.N if self.N > 1 else 1)

    def galois_sum(self) -> "CyclotomicNumber":
        total = CyclotomicNumber.rational(self.N, 0)
        for k in range(1, self.N + 1):
            if math.gcd(k, self.N) == 1:
                total = total + self.conjugate(k)
        return total

    def lift(self, k: int) -> "CyclotomicNumber":
        """The same element of Q(zeta_(N k)), using zeta_N = zeta_(N k)^k."""
        if k == 1:
            return self
        n = self.N * k
        total = CyclotomicNumber.rational(n, 0)
        for j, c in enumerate(self.coeffs):
            if c:
                total = total + zeta_pow(n, j * k) * c
        return total

    def descend(self, n: int) -> "CyclotomicNumber":
        """The element as a member of the subfield Q(zeta_n); n must divide N."""
        if self.N % n:
            raise ValueError(f"{n} does not divide {self.N}")
        k = self.N // n
        columns = [zeta_pow(n, j).lift(k).coeffs for j in range(degree(n))]
        system = Matrix(
            len(self.coeffs),
            len(columns),
            lambda r, c: Rational(columns[c][r].numerator, columns[c][r].denominator),
        )
        target = Matrix([Rational(c.numerator, c.denominator) for c in self.coeffs])
        try:
            solution, params = system.gauss_jordan_solve(target)
        except ValueError as exc:
            raise ValueError(f"element does not lie in Q(zeta_{n})") from exc
        if params.shape[0]:
            solution = solution.subs({p: 0 for p in params})
        return CyclotomicNumber(n, tuple(_to_fraction(v) for v in solution))

    def canonical(self) -> "CyclotomicNumber":
        """The element over the smallest n dividing N with it in Q(zeta_n)."""
        for n in divisors(self.N):
            try:
                return self.descend(n)
            except ValueError:
                continue
        return self

    def to_payload(self) -> dict:
        return {"N": self.N, "coeffs": list(self.coeffs)}

    def __str__(self) -> str:
        terms = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            power = "" if k == 0 else ("z" if k == 1 else f"z^{k}")
            if power and c == 1:
                terms.append(power)
            elif power and c == -1:
                terms.append(f"-{power}")
            else:
                terms.append(f"{c}{'*' + power if power else ''}")
        return " + ".join(terms).replace("+ -", "- ") or "0"

    def __repr__(self) -> str:
        return f"CyclotomicNumber(N={self.N}, {self})"


@lru_cache(maxsize=4096)
def zeta_pow(n: int, k: int) -> CyclotomicNumber:
    """zeta_n^k in the power basis of Q(zeta_n)."""
    exponent = k % n
    if n <= 2:
        return CyclotomicNumber.rational(n, -1 if (n == 2 and exponent == 1) else 1)
    if exponent < degree(n):
        coeffs = [Fraction(0)] * degree(n)
        coeffs[exponent] = Fraction(1)
        return CyclotomicNumber(n, tuple(coeffs))
    return CyclotomicNumber.from_poly(n, Poly(x**exponent, x, domain=QQ))


def one(n: int) -> CyclotomicNumber:
    return CyclotomicNumber.rational(n, 1)
