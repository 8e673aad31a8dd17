"""
Isometry testing for definite lattices by short-vector enumeration and
Gram-constrained backtracking over the columns of a witness matrix.
"""

import logging
import math
from dataclasses import dataclass
from enum import StrEnum
from fractions import Fraction
from typing import Any

from django.conf import settings
from sympy import ImmutableMatrix

from core.exceptions import IndefiniteLatticeError, SearchBudgetExceeded

from .lattice import IntegerLattice

logger = logging.getLogger(__name__)


class IsometryStatus(StrEnum):
    ISOMETRIC = "isometric"
    NOT_ISOMETRIC = "not isometric"
    BUDGET_EXCEEDED = "budget exceeded"


@dataclass(frozen=True)
class IsometryVerdict:
    status: IsometryStatus
    witness: ImmutableMatrix | None = None
    nodes: int = 0
    reason: str = ""
    budget: int | None = None

    def __bool__(self) -> bool:
        return self.status == IsometryStatus.ISOMETRIC

    def require_decided(self) -> "IsometryVerdict":
        """The verdict itself, or SearchBudgetExceeded when the search gave up."""
        if self.status == IsometryStatus.BUDGET_EXCEEDED:
            raise SearchBudgetExceeded(self.budget or 0, "isometry search")
        return self

    def to_payload(self) -> dict[str, Any]:
        return {
            "status": self.status,
            "witness": self.witness,
            "nodes": self.nodes,
            "reason": self.reason,
        }


def _ldl(rows: tuple[tuple[int, ...], ...]) -> tuple[list[Fraction], list[list[Fraction]]]:
    """q(x) = sum_i d_i (x_i + sum_{j>i} mu_ij x_j)^2 for a positive definite form."""
    n = len(rows)
    a = [[Fraction(x) for x in row] for row in rows]
    d: list[Fraction] = []
    mu = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        d.append(a[i][i])
        for j in range(i + 1, n):
            mu[i][j] = a[i][j] / a[i][i]
        for j in range(i + 1, n):
            for k in range(i + 1, n):
                a[j][k] -= a[j][i] * a[i][k] / a[i][i]
    return d, mu


def short_vectors(lattice: IntegerLattice, bound: int) -> list[tuple[tuple[int, ...], int]]:
    """
    All nonzero vectors x of a positive definite lattice with x^T G x <= bound,
    paired with their norms. Both x and -x are listed.
    """
    if not lattice.is_positive_definite:
        raise IndefiniteLatticeError("short vectors need a positive definite lattice")
    n = lattice.rank
    d, mu = _ldl(lattice.rows)
    found: list[tuple[tuple[int, ...], int]] = []
    x = [0] * n

    def descend(i: int, remaining: Fraction) -> None:
        if i < 0:
            if any(x):
                norm = bound - remaining
                found.append((tuple(x), int(norm)))
            return
        center = -sum((mu[i][j] * x[j] for j in range(i + 1, n)), Fraction(0))
        radius_sq = remaining / d[i]
        reach = math.isqrt(math.floor(radius_sq)) + 1
        low = math.floor(center) - reach
        high = math.ceil(center) + reach
        for value in range(low, high + 1):
            offset = value - center
            used = d[i] * offset * offset
            if used <= remaining:
                x[i] = value
                descend(i - 1, remaining - used)
        x[i] = 0

    descend(n - 1, Fraction(bound))
    found.sort(key=lambda item: (item[1], sum(1 for c in item[0] if c), tuple(-c for c in item[0])))
    return found


def is_isometric_definite(
    first: IntegerLattice, second: IntegerLattice, search_budget: int | None = None
) -> IsometryVerdict:
    """
    Decide whether two definite lattices are isometric. A witness W satisfies
    W^T G1 W = G2.
    """
    budget = search_budget if search_budget is not None else settings.K3EQ_SEARCH_BUDGET
    for lattice in (first, second):
        lattice.require_nondegenerate()
        if not lattice.is_definite:
            raise IndefiniteLatticeError()
    if first.rank != second.rank or first.det != second.det:
        return IsometryVerdict(IsometryStatus.NOT_ISOMETRIC, reason="rank or determinant differ")
    if first.is_positive_definite != second.is_positive_definite:
        return IsometryVerdict(IsometryStatus.NOT_ISOMETRIC, reason="opposite signs")
    if first.gram == second.gram:
        return IsometryVerdict(
            IsometryStatus.ISOMETRIC, ImmutableMatrix.eye(first.rank), reason="equal Gram matrices"
        )
    if first.is_negative_definite:
        first, second = -first, -second

    n = first.rank
    target = second.rows
    norms = {target[k][k] for k in range(n)}
    pool = short_vectors(first, max(norms))
    by_norm: dict[int, list[tuple[tuple[int, ...], tuple[int, ...]]]] = {}
    g1 = first.rows
    for vector, norm in pool:
        if norm in norms:
            image = tuple(sum(g1[i][j] * vector[j] for j in range(n)) for i in range(n))
            by_norm.setdefault(norm, []).append((vector, image))

    columns: list[tuple[tuple[int, ...], tuple[int, ...]]] = []
    nodes = 0

    def extend() -> bool:
        nonlocal nodes
        k = len(columns)
        if k == n:
            return True
        for vector, image in by_norm.get(target[k][k], ()):
            nodes += 1
            if nodes > budget:
                return False
            if all(
                sum(a * b for a, b in zip(vector, columns[j][1])) == target[k][j]
                for j in range(k)
            ):
                columns.append((vector, image))
                if extend():
                    return True
                columns.pop()
        return False

    found = extend()
    if nodes > budget:
        logger.warning(f"isometry search stopped after {budget} nodes")
        return IsometryVerdict(
            IsometryStatus.BUDGET_EXCEEDED,
            nodes=nodes,
            reason="search budget exhausted",
            budget=budget,
        )
    if not found:
        return IsometryVerdict(
            IsometryStatus.NOT_ISOMETRIC, nodes=nodes, reason="exhaustive search found no isometry"
        )
    witness = ImmutableMatrix([[columns[j][0][i] for j in range(n)] for i in range(n)])
    if witness.T * first.gram * witness != second.gram:
        raise AssertionError("isometry witness failed verification")
    return IsometryVerdict(IsometryStatus.ISOMETRIC, witness, nodes, "witness verified")
