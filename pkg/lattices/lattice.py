"""
Integer lattices given by symmetric Gram matrices, and the standard lattices
of K3 geometry.

Sign convention: ``E8`` is stored positive definite; ``E8minus`` is
``twist(E8, -1)``. The K3 lattice is U^3 + E8(-1)^2 and the Mukai lattice is
U^4 + E8(-1)^2.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Iterable, Sequence

from sympy import ImmutableMatrix, MatrixBase, diag

from core.exceptions import DegenerateLatticeError, UnknownLatticeError

from .normal_forms import as_int_rows, integer_kernel

logger = logging.getLogger(__name__)

Vector = Sequence[int | Fraction]


@dataclass(frozen=True)
class IntegerLattice:
    """A free Z-module of finite rank with a symmetric integral bilinear form."""

    gram: ImmutableMatrix
    label: str = ""
    allow_degenerate: bool = field(default=False, compare=False)

    def __post_init__(self):
        gram = self.gram
        if not isinstance(gram, MatrixBase):
            rows = as_int_rows(gram)
            gram = ImmutableMatrix(len(rows), len(rows), [x for row in rows for x in row])
        elif not isinstance(gram, ImmutableMatrix):
            gram = ImmutableMatrix(gram)
        if gram.rows != gram.cols:
            raise ValueError(f"Gram matrix must be square, got {gram.rows}x{gram.cols}")
        if any(not entry.is_Integer for entry in gram):
            raise ValueError("Gram matrix entries must be integers")
        if gram != gram.T:
            raise ValueError("Gram matrix must be symmetric")
        object.__setattr__(self, "gram", gram)
        if not self.allow_degenerate and self.det == 0:
            raise DegenerateLatticeError()

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]], label: str = "", **kwargs):
        rows = [list(row) for row in rows]
        return cls(ImmutableMatrix(len(rows), len(rows), [x for r in rows for x in r]), label, **kwargs)

    @classmethod
    def from_payload(cls, payload: dict[str, Any]) -> "IntegerLattice":
        return cls.from_rows(payload["gram"], label=payload.get("label", ""))

    def to_payload(self) -> dict[str, Any]:
        return {"label": self.label, "gram": self.rows_as_lists()}

    @property
    def rank(self) -> int:
        return self.gram.rows

    @cached_property
    def rows(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(int(x) for x in self.gram.row(i)) for i in range(self.rank))

    def rows_as_lists(self) -> list[list[int]]:
        return [list(row) for row in self.rows]

    @cached_property
    def det(self) -> int:
        if self.rank == 0:
            return 1
        return int(self.gram.det(method="bareiss"))

    @property
    def is_degenerate(self) -> bool:
        return self.det == 0

    def require_nondegenerate(self) -> None:
        if self.is_degenerate:
            raise DegenerateLatticeError()

    @property
    def is_even(self) -> bool:
        return all(self.rows[i][i] % 2 == 0 for i in range(self.rank))

    @property
    def is_unimodular(self) -> bool:
        return abs(self.det) == 1

    @cached_property
    def signature(self) -> tuple[int, int]:
        """(positive, negative) index of inertia."""
        positive, negative, _ = inertia(self.rows)
        return positive, negative

    @property
    def is_positive_definite(self) -> bool:
        return self.signature == (self.rank, 0) and not self.is_degenerate

    @property
    def is_negative_definite(self) -> bool:
        return self.signature == (0, self.rank) and not self.is_degenerate

    @property
    def is_definite(self) -> bool:
        return self.is_positive_definite or self.is_negative_definite

    def evaluate(self, u: Vector, v: Vector) -> Fraction:
        """u^T G v for rational coordinate vectors."""
        total = Fraction(0)
        for i, ui in enumerate(u):
            if not ui:
                continue
            row = self.rows[i]
            total += ui * sum((row[j] * vj for j, vj in enumerate(v) if vj), Fraction(0))
        return total

    def norm(self, v: Vector) -> Fraction:
        return self.evaluate(v, v)

    def twist(self, k: int) -> "IntegerLattice":
        return twist(self, k)

    def __add__(self, other: "IntegerLattice") -> "IntegerLattice":
        return direct_sum(self, other)

    def __neg__(self) -> "IntegerLattice":
        return twist(self, -1)

    def __str__(self) -> str:
        name = self.label or "L"
        return f"{name} (rank {self.rank}, det {self.det})"


def inertia(rows: Sequence[Sequence[int | Fraction]]) -> tuple[int, int, int]:
    """
    (positive, negative, zero) counts of a symmetric matrix by congruence
    diagonalisation over Q.
    """
    a = [[Fraction(x) for x in row] for row in rows]
    positive = negative = zero = 0
    while a:
        size = len(a)
        pivot = next((i for i in range(size) if a[i][i]), None)
        if pivot is None:
            pair = next(
                ((i, j) for i in range(size) for j in range(i + 1, size) if a[i][j]),
                None,
            )
            if pair is None:
                zero += size
                break
            i, j = pair
            # basis change e_i -> e_i + e_j makes the diagonal entry 2 a_ij
            for k in range(size):
                a[i][k] += a[j][k]
            for k in range(size):
                a[k][i] += a[k][j]
            pivot = i
        p = a[pivot][pivot]
        if p > 0:
            positive += 1
        else:
            negative += 1
        keep = [k for k in range(size) if k != pivot]
        a = [
            [a[k][l] - a[k][pivot] * a[pivot][l] / p for l in keep]
            for k in keep
        ]
    return positive, negative, zero


def direct_sum(first: IntegerLattice, second: IntegerLattice) -> IntegerLattice:
    label = f"{first.label or 'L'} + {second.label or 'L'}"
    return IntegerLattice(
        ImmutableMatrix(diag(first.gram, second.gram)),
        label,
        allow_degenerate=first.allow_degenerate or second.allow_degenerate,
    )


def orthogonal_sum(*lattices: IntegerLattice, label: str = "") -> IntegerLattice:
    result = lattices[0]
    for lattice in lattices[1:]:
        result = direct_sum(result, lattice)
    if label:
        result = IntegerLattice(result.gram, label, allow_degenerate=result.allow_degenerate)
    return result


def twist(lattice: IntegerLattice, k: int) -> IntegerLattice:
    """L(k): every Gram entry multiplied by k."""
    if k == 0:
        raise ValueError("twist factor must be nonzero")
    label = f"{lattice.label or 'L'}({k})"
    return IntegerLattice(lattice.gram * k, label, allow_degenerate=lattice.allow_degenerate)


E8_CARTAN = (
    (2, 0, -1, 0, 0, 0, 0, 0),
    (0, 2, 0, -1, 0, 0, 0, 0),
    (-1, 0, 2, -1, 0, 0, 0, 0),
    (0, -1, -1, 2, -1, 0, 0, 0),
    (0, 0, 0, -1, 2, -1, 0, 0),
    (0, 0, 0, 0, -1, 2, -1, 0),
    (0, 0, 0, 0, 0, -1, 2, -1),
    (0, 0, 0, 0, 0, 0, -1, 2),
)

HYPERBOLIC_PLANE = ((0, 1), (1, 0))


def _build_standard(name: str) -> IntegerLattice:
    u = IntegerLattice.from_rows(HYPERBOLIC_PLANE, "U")
    e8 = IntegerLattice.from_rows(E8_CARTAN, "E8")
    if name == "U":
        return u
    if name == "E8":
        return e8
    if name == "E8minus":
        return IntegerLattice(e8.gram * -1, "E8(-1)")
    e8minus = _build_standard("E8minus")
    if name == "K3":
        return orthogonal_sum(u, u, u, e8minus, e8minus, label="K3")
    if name == "Mukai":
        return orthogonal_sum(u, u, u, u, e8minus, e8minus, label="Mukai")
    raise UnknownLatticeError(name)


STANDARD_NAMES = ("U", "E8", "E8minus", "K3", "Mukai")
_standard_cache: dict[str, IntegerLattice] = {}


def standard_lattice(name: str) -> IntegerLattice:
    """U, E8 (positive), E8minus, K3 = U^3 + E8(-1)^2, Mukai = U^4 + E8(-1)^2."""
    if name not in STANDARD_NAMES:
        raise UnknownLatticeError(name)
    if name not in _standard_cache:
        _standard_cache[name] = _build_standard(name)
    return _standard_cache[name]


def complement_basis(ambient: IntegerLattice, span: Sequence[Sequence[int]]) -> list[list[int]]:
    """
    Basis (as coordinate vectors) of {x : <x, s> = 0 for all s in span}.
    The basis spans a primitive sublattice of the ambient lattice.
    """
    ambient.require_nondegenerate()
    if not span:
        return [[int(i == j) for i in range(ambient.rank)] for j in range(ambient.rank)]
    for vector in span:
        if len(vector) != ambient.rank:
            raise ValueError(f"span vector {list(vector)} has wrong length for rank {ambient.rank}")
    conditions = [
        [sum(int(s[i]) * ambient.rows[i][j] for i in range(ambient.rank)) for j in range(ambient.rank)]
        for s in span
    ]
    return integer_kernel(conditions, ncols=ambient.rank)


def sublattice(
    ambient: IntegerLattice,
    basis: Sequence[Sequence[int]],
    label: str = "",
    allow_degenerate: bool = False,
) -> IntegerLattice:
    """The lattice spanned by ``basis`` with the restricted form B^T G B."""
    k = len(basis)
    rows = [[int(ambient.evaluate(basis[i], basis[j])) for j in range(k)] for i in range(k)]
    return IntegerLattice(
        ImmutableMatrix(k, k, [x for row in rows for x in row]), label, allow_degenerate=allow_degenerate
    )


def orthogonal_complement(
    ambient: IntegerLattice,
    span: Sequence[Sequence[int]],
    allow_degenerate: bool = False,
) -> IntegerLattice:
    basis = complement_basis(ambient, span)
    logger.debug(f"complement of {len(span)} vectors in {ambient}: rank {len(basis)}")
    label = f"{ambient.label or 'L'}^perp"
    return sublattice(ambient, basis, label=label, allow_degenerate=allow_degenerate)


def eigenlattice_basis(matrix: MatrixBase | Sequence[Sequence[int]], eigenvalue: int) -> list[list[int]]:
    """Saturated basis of ker(M - eigenvalue * I)."""
    rows = as_int_rows(matrix)
    shifted = [[x - eigenvalue * int(i == j) for j, x in enumerate(row)] for i, row in enumerate(rows)]
    return integer_kernel(shifted, ncols=len(rows))


def eigenlattice(
    ambient: IntegerLattice,
    matrix: MatrixBase | Sequence[Sequence[int]],
    eigenvalue: int,
    label: str = "",
) -> IntegerLattice:
    basis = eigenlattice_basis(matrix, eigenvalue)
    return sublattice(ambient, basis, label=label or f"{ambient.label or 'L'}^({eigenvalue:+d})")


def is_isometry(lattice: IntegerLattice, matrix: MatrixBase | Sequence[Sequence[int]]) -> bool:
    """True when M^T G M = G."""
    m = ImmutableMatrix(as_int_rows(matrix)) if not isinstance(matrix, MatrixBase) else matrix
    if m.shape != lattice.gram.shape:
        return False
    return m.T * lattice.gram * m == lattice.gram
