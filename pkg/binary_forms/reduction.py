"""
Even binary lattices [[2a, b], [b, 2c]] and classical reduction theory.

The Gram matrix [[2a, b], [b, 2c]] is twice the form a x^2 + b xy + c y^2, so a
Gram determinant d corresponds to the form discriminant -d. Reduced means
|b| <= a <= c with b >= 0 when |b| = a or a = c.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Iterable

from sympy import ImmutableMatrix

from core.exceptions import DegenerateLatticeError, IndefiniteLatticeError
from lattices.lattice import IntegerLattice

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BinaryEvenLattice:
    a: int
    b: int
    c: int

    @classmethod
    def from_gram(cls, rows: Iterable[Iterable[int]]) -> "BinaryEvenLattice":
        (p, q), (r, s) = [[int(x) for x in row] for row in rows]
        if q != r:
            raise ValueError("Gram matrix must be symmetric")
        if p % 2 or s % 2:
            raise ValueError("Gram matrix must have even diagonal")
        return cls(p // 2, q, s // 2)

    @property
    def gram(self) -> ImmutableMatrix:
        return ImmutableMatrix([[2 * self.a, self.b], [self.b, 2 * self.c]])

    @property
    def rows(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return ((2 * self.a, self.b), (self.b, 2 * self.c))

    @property
    def det(self) -> int:
        return 4 * self.a * self.c - self.b * self.b

    @property
    def is_positive_definite(self) -> bool:
        return self.a > 0 and self.det > 0

    @property
    def is_negative_definite(self) -> bool:
        return self.a < 0 and self.det > 0

    @property
    def is_definite(self) -> bool:
        return self.det > 0

    @property
    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        if not self.is_positive_definite:
            return False
        if not abs(b) <= a <= c:
            return False
        if (abs(b) == a or a == c) and b < 0:
            return False
        return True

    def __neg__(self) -> "BinaryEvenLattice":
        return BinaryEvenLattice(-self.a, -self.b, -self.c)

    def value(self, x: int, y: int) -> int:
        """(x, y) G (x, y)^T"""
        return 2 * (self.a * x * x + self.b * x * y + self.c * y * y)

    @property
    def lattice(self) -> IntegerLattice:
        return IntegerLattice(self.gram, label=str(self))

    def to_payload(self) -> dict[str, Any]:
        return {"a": self.a, "b": self.b, "c": self.c, "det": self.det, "gram": self.gram}

    def __str__(self) -> str:
        return f"[[{2 * self.a},{self.b}],[{self.b},{2 * self.c}]]"


@dataclass(frozen=True)
class Reduction:
    """
    ``reduced`` is positive definite; W satisfies W^T G W = reduced, where G is
    the input Gram matrix, negated first when ``negated`` is set.
    """

    source: BinaryEvenLattice
    reduced: BinaryEvenLattice
    change_of_basis: ImmutableMatrix
    negated: bool = False

    @property
    def signed(self) -> BinaryEvenLattice:
        """The reduced representative carrying the sign of the input."""
        return -self.reduced if self.negated else self.reduced

    def verify(self) -> bool:
        w = self.change_of_basis
        gram = self.source.gram * (-1 if self.negated else 1)
        return w.T * gram * w == self.reduced.gram and abs(w.det()) == 1

    def to_payload(self) -> dict[str, Any]:
        return {
            "input": self.source.to_payload(),
            "reduced": self.signed.to_payload(),
            "change_of_basis": self.change_of_basis,
            "negated": self.negated,
        }


def _check_definite(form: BinaryEvenLattice) -> None:
    if form.det == 0:
        raise DegenerateLatticeError()
    if form.det < 0:
        raise IndefiniteLatticeError("binary form is indefinite")


def gauss_reduce(form: BinaryEvenLattice) -> Reduction:
    """Reduce a definite even binary lattice, tracking a unimodular change of basis."""
    _check_definite(form)
    negated = form.is_negative_definite
    a, b, c = (-form.a, -form.b, -form.c) if negated else (form.a, form.b, form.c)
    w = [[1, 0], [0, 1]]

    # translate so that -a < b <= a
    r = (a - b) // (2 * a)
    a, b, c = a, b + 2 * r * a, a * r * r + b * r + c
    w = [[w[0][0], w[0][0] * r + w[0][1]], [w[1][0], w[1][0] * r + w[1][1]]]

    while not (a < c or (a == c and b >= 0)):
        s = (c + b) // (2 * c)
        a, b, c = c, -b + 2 * s * c, c * s * s - b * s + a
        # new basis (e2, -e1 + s e2)
        w = [[w[0][1], -w[0][0] + s * w[0][1]], [w[1][1], -w[1][0] + s * w[1][1]]]

    reduced = BinaryEvenLattice(a, b, c)
    result = Reduction(form, reduced, ImmutableMatrix(w), negated)
    if not result.verify():
        raise AssertionError(f"reduction of {form} failed verification")
    return result


def enumerate_even(det: int, sign: int = 1) -> list[BinaryEvenLattice]:
    """
    All reduced even binary lattices of Gram determinant ``det``, ordered by
    (a, |b|, b < 0); ``sign=-1`` returns their negatives.
    """
    if det <= 0:
        raise ValueError("determinant must be positive")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    found = []
    a = 1
    while 3 * a * a <= det:
        for b in range(-a, a + 1):
            if (det + b * b) % (4 * a):
                continue
            c = (det + b * b) // (4 * a)
            form = BinaryEvenLattice(a, b, c)
            if form.is_reduced:
                found.append(form)
        a += 1
    found.sort(key=lambda f: (f.a, abs(f.b), f.b < 0))
    logger.debug(f"det {det}: {len(found)} reduced even forms")
    return [form if sign > 0 else -form for form in found]


def class_counts(det: int) -> tuple[int, int]:
    """Class counts up to proper and up to improper equivalence."""
    forms = enumerate_even(det)
    return len(forms), len({(f.a, abs(f.b), f.c) for f in forms})


@dataclass(frozen=True)
class RepresentationVerdict:
    form: BinaryEvenLattice
    n: int
    witness: tuple[int, int] | None

    def __bool__(self) -> bool:
        return self.witness is not None

    def to_payload(self) -> dict[str, Any]:
        return {
            "form": str(self.form),
            "n": self.n,
            "represented": bool(self),
            "witness": list(self.witness) if self.witness else None,
        }


def representation_bounds(form: BinaryEvenLattice, n: int) -> tuple[int, int]:
    """|x| and |y| bounds for (x, y) G (x, y)^T = n on a positive definite form."""
    return math.isqrt(n * 2 * form.c // form.det), math.isqrt(n * 2 * form.a // form.det)


def _signed_range(bound: int) -> list[int]:
    values = [0]
    for k in range(1, bound + 1):
        values += [k, -k]
    return values


def represents(form: BinaryEvenLattice, n: int) -> RepresentationVerdict:
    """Search a nonzero (x, y) with (x, y) G (x, y)^T = n inside the exact ellipse bound."""
    _check_definite(form)
    positive = -form if form.is_negative_definite else form
    target = -n if form.is_negative_definite else n
    if target <= 0:
        return RepresentationVerdict(form, n, None)
    x_bound, y_bound = representation_bounds(positive, target)
    for y in _signed_range(y_bound):
        for x in _signed_range(x_bound):
            if (x or y) and positive.value(x, y) == target:
                return RepresentationVerdict(form, n, (x, y))
    return RepresentationVerdict(form, n, None)
