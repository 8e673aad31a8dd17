"""
Genus and stable equivalence of even lattices.

Two even nondegenerate lattices lie in the same genus iff they have the same
rank, the same signature and isometric discriminant forms. For the definite
rank-two lattices of the binary form layer this is the same as
A + U being isometric to B + U, and an explicit isometry can often be found by
splitting a hyperbolic plane off A + U along an isotropic vector.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from enum import StrEnum
from typing import Any

from django.conf import settings
from sympy import ImmutableMatrix, divisors

from core.exceptions import PreconditionError, SearchBudgetExceeded

from .discriminant import (
    ComparisonMode,
    FormIsomorphismVerdict,
    discriminant_forms_isomorphic,
    discriminant_group,
)
from .isometry import IsometryStatus, is_isometric_definite
from .lattice import IntegerLattice, complement_basis, direct_sum, standard_lattice, sublattice
from .normal_forms import solve_integer

logger = logging.getLogger(__name__)


class GenusStatus(StrEnum):
    SAME_GENUS = "same genus"
    DIFFERENT_GENUS = "different genus"


class StableStatus(StrEnum):
    EQUIVALENT = "equivalent"
    NOT_EQUIVALENT = "not equivalent"


@dataclass(frozen=True)
class GenusVerdict:
    status: GenusStatus
    reason: str
    form_verdict: FormIsomorphismVerdict | None = None

    def __bool__(self) -> bool:
        return self.status == GenusStatus.SAME_GENUS

    def to_payload(self) -> dict[str, Any]:
        return {
            "status": self.status,
            "reason": self.reason,
            "discriminant_form": self.form_verdict.to_payload() if self.form_verdict else None,
        }


def same_genus(first: IntegerLattice, second: IntegerLattice) -> GenusVerdict:
    for lattice in (first, second):
        lattice.require_nondegenerate()
        if not lattice.is_even:
            raise PreconditionError("genus test by discriminant forms needs even lattices")
    if first.rank != second.rank:
        return GenusVerdict(GenusStatus.DIFFERENT_GENUS, "ranks differ")
    if first.signature != second.signature:
        return GenusVerdict(GenusStatus.DIFFERENT_GENUS, "signatures differ")
    if first.det != second.det:
        return GenusVerdict(GenusStatus.DIFFERENT_GENUS, "determinants differ")
    forms = discriminant_forms_isomorphic(
        discriminant_group(first), discriminant_group(second), ComparisonMode.ISOMETRY
    )
    if not forms:
        return GenusVerdict(GenusStatus.DIFFERENT_GENUS, f"discriminant forms: {forms.reason}", forms)
    return GenusVerdict(GenusStatus.SAME_GENUS, "signature and discriminant form agree", forms)


@dataclass(frozen=True)
class StableEquivalenceVerdict:
    status: StableStatus
    genus: GenusVerdict

    def __bool__(self) -> bool:
        return self.status == StableStatus.EQUIVALENT

    def to_payload(self) -> dict[str, Any]:
        return {"status": self.status, "genus": self.genus.to_payload()}


def _check_binary_pair(first: IntegerLattice, second: IntegerLattice) -> None:
    for lattice in (first, second):
        if lattice.rank != 2:
            raise PreconditionError("stable equivalence check needs rank-two lattices")
        if not lattice.is_even:
            raise PreconditionError("stable equivalence check needs even lattices")
        if not lattice.is_definite:
            raise PreconditionError("stable equivalence check needs definite lattices")
    if first.is_positive_definite != second.is_positive_definite:
        raise PreconditionError("lattices must be definite of the same sign")
    if first.det != second.det:
        raise PreconditionError("lattices must have the same determinant")


def stable_equivalence_check(first: IntegerLattice, second: IntegerLattice) -> StableEquivalenceVerdict:
    """A + U = B + U for rank-two even definite lattices, decided through the genus."""
    _check_binary_pair(first, second)
    genus = same_genus(first, second)
    status = StableStatus.EQUIVALENT if genus else StableStatus.NOT_EQUIVALENT
    return StableEquivalenceVerdict(status, genus)


class CertificateKind(StrEnum):
    ISOMETRY = "isometry"
    GENUS = "genus"


@dataclass(frozen=True)
class StableCertificate:
    """
    Either an explicit matrix Phi with Phi^T (A + U) Phi = B + U, or the
    discriminant-form isometry that puts A and B in one genus.
    """

    kind: CertificateKind
    source: IntegerLattice
    target: IntegerLattice
    matrix: ImmutableMatrix | None = None
    genus: GenusVerdict | None = None
    isotropic_vector: tuple[int, ...] | None = None
    notes: tuple[str, ...] = field(default_factory=tuple)

    def verify(self) -> bool:
        if self.kind == CertificateKind.ISOMETRY:
            m = self.matrix
            return (
                m is not None
                and m.T * self.source.gram * m == self.target.gram
                and abs(m.det()) == 1
            )
        if self.genus is None or not self.genus.form_verdict:
            return False
        return bool(same_genus(self.source, self.target))

    def to_payload(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "source": self.source.to_payload(),
            "target": self.target.to_payload(),
            "matrix": self.matrix,
            "isotropic_vector": list(self.isotropic_vector) if self.isotropic_vector else None,
            "genus": self.genus.to_payload() if self.genus else None,
            "verified": self.verify(),
        }


def _isotropic_candidates(lattice: IntegerLattice, radius: int):
    """
    Primitive isotropic e = (a; u1, u2) in A + U with |u1|, |u2| >= 2 and
    <e, A + U> = Z. Vectors with a unit U-coordinate only reproduce A.
    """
    rows = lattice.rows
    for a in itertools.product(range(-radius, radius + 1), repeat=2):
        if max(abs(a[0]), abs(a[1])) != radius:
            continue
        half = -(rows[0][0] * a[0] * a[0] + 2 * rows[0][1] * a[0] * a[1] + rows[1][1] * a[1] * a[1]) // 2
        if half == 0:
            continue
        pairing = [rows[0][0] * a[0] + rows[0][1] * a[1], rows[1][0] * a[0] + rows[1][1] * a[1]]
        for u1 in divisors(abs(half)):
            u1 = int(u1)
            for sign in (1, -1):
                first = sign * u1
                second = half // first
                if min(abs(first), abs(second)) < 2:
                    continue
                if math.gcd(*pairing, first, second) != 1:
                    continue
                yield (a[0], a[1], first, second)


def stable_isometry_witness(
    first: IntegerLattice,
    second: IntegerLattice,
    budget: int | None = None,
    max_radius: int = 12,
) -> StableCertificate:
    """
    Certificate that A + U and B + U are isometric: an explicit integral
    isometry when the budgeted search finds one, otherwise the genus
    certificate through discriminant forms.
    """
    _check_binary_pair(first, second)
    budget = budget if budget is not None else settings.K3EQ_SEARCH_BUDGET
    hyperbolic = standard_lattice("U")
    source = direct_sum(first, hyperbolic)
    target = direct_sum(second, hyperbolic)
    genus = same_genus(first, second)
    if not genus:
        raise PreconditionError(f"lattices are not stably equivalent: {genus.reason}")
    if first.gram == second.gram:
        return StableCertificate(
            CertificateKind.ISOMETRY, source, target, ImmutableMatrix.eye(4), genus
        )

    spent = 0
    try:
        for radius in range(1, max_radius + 1):
            for e in _isotropic_candidates(first, radius):
                spent += 1
                if spent > budget:
                    raise SearchBudgetExceeded(budget, "stable isometry search")
                certificate = _split_along(source, target, second, e, budget - spent, genus)
                if certificate is not None:
                    logger.info(f"✅ stable isometry found along isotropic vector {e}")
                    return certificate
    except SearchBudgetExceeded:
        logger.warning("stable isometry search exhausted its budget; using genus certificate")
        return StableCertificate(
            CertificateKind.GENUS, source, target, genus=genus, notes=("search budget exhausted",)
        )
    return StableCertificate(
        CertificateKind.GENUS,
        source,
        target,
        genus=genus,
        notes=(f"no isotropic splitting up to radius {max_radius}",),
    )


def _split_along(
    source: IntegerLattice,
    target: IntegerLattice,
    second: IntegerLattice,
    e: tuple[int, ...],
    budget: int,
    genus: GenusVerdict,
) -> StableCertificate | None:
    rows = source.rows
    pairing = [sum(rows[i][j] * e[j] for j in range(4)) for i in range(4)]
    f = solve_integer([pairing], [1])
    if f is None:
        return None
    f_norm = int(source.norm(f))
    f_prime = [fi - (f_norm // 2) * ei for fi, ei in zip(f, e)]
    basis = complement_basis(source, [list(e), f_prime])
    complement = sublattice(source, basis)
    if complement.det != second.det:
        return None
    verdict = is_isometric_definite(complement, second, search_budget=max(budget, 1))
    if verdict.status == IsometryStatus.BUDGET_EXCEEDED:
        raise SearchBudgetExceeded(budget, "stable isometry search")
    if not verdict:
        return None
    w = verdict.witness
    columns = [
        [sum(basis[k][i] * int(w[k, c]) for k in range(2)) for i in range(4)] for c in range(2)
    ]
    columns += [list(e), f_prime]
    matrix = ImmutableMatrix([[columns[c][i] for c in range(4)] for i in range(4)])
    if matrix.T * source.gram * matrix != target.gram:
        return None
    return StableCertificate(
        CertificateKind.ISOMETRY, source, target, matrix, genus, isotropic_vector=tuple(e)
    )
