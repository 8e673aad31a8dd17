"""
Services comparing group actions on derived-equivalent K3 surfaces.

Each service returns a report object with ``to_payload()``; the management
commands and the reproductions only format these.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import StrEnum
from fractions import Fraction
from typing import Any, Sequence

from django.conf import settings
from sympy import ImmutableMatrix, divisors

from binary_forms.reduction import BinaryEvenLattice, represents
from core.exceptions import (
    InconsistentTraceError,
    OrderLimitExceeded,
    PreconditionError,
    SearchBudgetExceeded,
)
from lattices.discriminant import (
    ComparisonMode,
    DiscriminantForm,
    discriminant_forms_isomorphic,
    discriminant_group,
)
from lattices.genus import same_genus, stable_isometry_witness
from lattices.isometry import is_isometric_definite
from lattices.lattice import (
    IntegerLattice,
    eigenlattice,
    is_isometry,
    orthogonal_complement,
    orthogonal_sum,
    standard_lattice,
    twist,
)
from lefschetz.contributions import chi_equals_count, fixed_points_guaranteed
from lefschetz.tables import (
    EXCLUDED_MIXED,
    FIXED_POINT_FREE_EIGENSPACES,
    FIXED_POINT_FREE_MIN_PICARD_RANK,
    MAX_SYMPLECTIC_ORDER,
    MIXED_FIXED_POINT_OPTIONS,
    NIKULIN_FIXED_POINTS,
    PURELY_NONSYMPLECTIC_ORDERS,
    UNSATURATED_MIXED,
)

from .k3action import K3Action, trace_sequence

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Check:
    name: str
    matches: bool | None
    detail: str = ""

    def to_payload(self) -> dict[str, Any]:
        return {"name": self.name, "matches": self.matches, "detail": self.detail}


COMPATIBLE = "compatible with equivariant derived equivalence"
INCOMPATIBLE = "incompatible"
UNDECIDED = "undecided"


@dataclass(frozen=True)
class InvariantLatticeRow:
    r: int
    first: IntegerLattice
    second: IntegerLattice
    matches: bool | None
    reason: str

    def to_payload(self) -> dict[str, Any]:
        return {
            "r": self.r,
            "rank": [self.first.rank, self.second.rank],
            "det": [self.first.det, self.second.det],
            "signature": [list(self.first.signature), list(self.second.signature)],
            "matches": self.matches,
            "reason": self.reason,
        }


def invariant_lattice_report(
    first: K3Action, second: K3Action, budget: int | None = None
) -> list[InvariantLatticeRow]:
    """
    Compare the sublattices fixed by sigma^r for every proper divisor r of N:
    rank, signature, determinant and discriminant form.
    """
    mukai = standard_lattice("Mukai")
    rows = []
    for r in (int(d) for d in divisors(first.N)):
        if r == first.N:
            continue
        a = eigenlattice(mukai, first.matrix_power(r), 1, label=f"H^(sigma^{r})")
        b = eigenlattice(mukai, second.matrix_power(r), 1, label=f"H^(tau^{r})")
        if (a.rank, a.signature, a.det) != (b.rank, b.signature, b.det):
            rows.append(InvariantLatticeRow(r, a, b, False, "rank, signature or determinant differ"))
            continue
        try:
            verdict = discriminant_forms_isomorphic(
                discriminant_group(a), discriminant_group(b), budget=budget
            )
        except (OrderLimitExceeded, SearchBudgetExceeded) as exc:
            rows.append(InvariantLatticeRow(r, a, b, None, f"undecided: {exc}"))
            continue
        rows.append(InvariantLatticeRow(r, a, b, bool(verdict), f"discriminant forms: {verdict.reason}"))
    return rows


@dataclass(frozen=True)
class PartnerReport:
    first: K3Action
    second: K3Action
    checks: tuple[Check, ...]
    invariant_lattices: tuple[InvariantLatticeRow, ...] = ()

    @property
    def verdict(self) -> str:
        if any(check.matches is False for check in self.checks):
            return INCOMPATIBLE
        if any(check.matches is None for check in self.checks):
            return UNDECIDED
        return COMPATIBLE

    @property
    def first_mismatch(self) -> Check | None:
        return next((check for check in self.checks if check.matches is False), None)

    @property
    def integral_obstruction(self) -> str:
        statuses = [row.matches for row in self.invariant_lattices]
        if any(status is False for status in statuses):
            return "found"
        if any(status is None for status in statuses):
            return "undecided"
        return "not found"

    def to_payload(self) -> dict[str, Any]:
        return {
            "verdict": self.verdict,
            "checks": [check.to_payload() for check in self.checks],
            "invariant_lattices": [row.to_payload() for row in self.invariant_lattices],
            "integral_obstruction": self.integral_obstruction,
        }


def _fixed_locus_status(action: K3Action) -> str:
    factorization = action.factorization
    if factorization.N == 1:
        return "everything fixed"
    if fixed_points_guaranteed(factorization.n, factorization.m):
        return "nonempty"
    if factorization.n >= 2:
        return "nonempty" if action.trace() > 0 else "empty"
    return "unknown"


def _point_counts(action: K3Action) -> dict[int, int | str]:
    counts: dict[int, int | str] = {}
    m = action.factorization.m
    for r in (int(d) for d in divisors(action.N)):
        if r == action.N:
            continue
        m_r = m // math.gcd(m, r)
        n_r = (action.N // r) // m_r
        if n_r < 2:
            continue
        try:
            counts[r] = chi_equals_count(action.trace(r), n_r, m_r)
        except InconsistentTraceError as exc:
            counts[r] = f"inconsistent: {exc}"
    return counts


def derived_partner_check(
    first: K3Action, second: K3Action, budget: int | None = None
) -> PartnerReport:
    """
    Necessary conditions for an equivariant derived equivalence between two
    actions: equal order, (n, m), trace sequence, fixed-locus behaviour and
    point counts, then the invariant sublattices of every power.
    """
    checks = [
        Check(
            "order",
            first.N == second.N,
            f"N = {first.N} vs {second.N}",
        )
    ]
    if first.N != second.N:
        return PartnerReport(first, second, tuple(checks))
    fa, fb = first.factorization, second.factorization
    checks.append(
        Check("factorization", fa == fb, f"(n, m) = ({fa.n}, {fa.m}) vs ({fb.n}, {fb.m})")
    )
    ta, tb = trace_sequence(first), trace_sequence(second)
    differing = [r for r in ta.values if ta.values[r] != tb.values.get(r)]
    checks.append(
        Check(
            "traces",
            not differing,
            "equal" if not differing else ", ".join(
                f"chi(sigma^{r}) = {ta.values[r]} vs {tb.values[r]}" for r in differing
            ),
        )
    )
    la, lb = _fixed_locus_status(first), _fixed_locus_status(second)
    checks.append(Check("fixed locus", la == lb, f"{la} vs {lb}"))
    pa, pb = _point_counts(first), _point_counts(second)
    consistent = not any(isinstance(v, str) for v in (*pa.values(), *pb.values()))
    checks.append(
        Check(
            "fixed point counts",
            consistent and pa == pb,
            f"{pa} vs {pb}",
        )
    )
    rows: list[InvariantLatticeRow] = []
    if all(check.matches for check in checks):
        rows = invariant_lattice_report(first, second, budget)
        undecided = [row.r for row in rows if row.matches is None]
        mismatched = [row.r for row in rows if row.matches is False]
        checks.append(
            Check(
                "invariant lattices",
                None if undecided and not mismatched else not mismatched,
                f"mismatch at r = {mismatched}" if mismatched else (
                    f"undecided at r = {undecided}" if undecided else "isometric genus data"
                ),
            )
        )
    report = PartnerReport(first, second, tuple(checks), tuple(rows))
    logger.info(f"derived partner check {first.label} vs {second.label}: {report.verdict}")
    return report


@dataclass(frozen=True)
class AdmissibilityVerdict:
    n: int
    m: int
    admissible: bool
    rule: str
    notes: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.admissible

    def to_payload(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "m": self.m,
            "N": self.n * self.m,
            "admissible": self.admissible,
            "rule": self.rule,
            "notes": list(self.notes),
        }


def order_admissibility(n: int, m: int) -> AdmissibilityVerdict:
    """Whether a cyclic action with symplectic part n and 2-form order m can exist."""
    if n < 1 or m < 1:
        return AdmissibilityVerdict(n, m, False, "orders must be positive")
    if n > MAX_SYMPLECTIC_ORDER:
        return AdmissibilityVerdict(n, m, False, f"symplectic order n <= {MAX_SYMPLECTIC_ORDER}")
    if n == 1:
        if m == 1:
            return AdmissibilityVerdict(n, m, True, "identity")
        if m not in PURELY_NONSYMPLECTIC_ORDERS:
            return AdmissibilityVerdict(n, m, False, "purely nonsymplectic order list")
        notes = ("fixed points guaranteed",) if m != 2 else ()
        return AdmissibilityVerdict(n, m, True, "purely nonsymplectic order list", notes)
    if m == 1:
        return AdmissibilityVerdict(
            n, m, True, "symplectic order bound", (f"{NIKULIN_FIXED_POINTS[n]} fixed points",)
        )
    if (n, m) in EXCLUDED_MIXED:
        return AdmissibilityVerdict(n, m, False, EXCLUDED_MIXED[(n, m)])
    notes = []
    if fixed_points_guaranteed(n, m):
        notes.append("fixed points guaranteed")
    if m == 2:
        notes.append("fixed-point free actions are not excluded by the holomorphic formula")
    if (n, m) == (7, 2):
        notes.append("sigma^2 generates a symplectic C7 with 3 fixed points, so Fix(sigma) is nonempty")
    if (n, m) in UNSATURATED_MIXED:
        notes.append("never the saturation of a mixed action with m = 2")
    if (n, m) in MIXED_FIXED_POINT_OPTIONS:
        notes.append(f"number of fixed points in {MIXED_FIXED_POINT_OPTIONS[(n, m)]}")
    if (n, m) in FIXED_POINT_FREE_EIGENSPACES:
        eigen = FIXED_POINT_FREE_EIGENSPACES[(n, m)]
        notes.append(
            "fixed-point free: eigenspace dimensions "
            + ", ".join(f"{k:+d} -> {v}" for k, v in eigen.items())
            + f", Picard rank >= {FIXED_POINT_FREE_MIN_PICARD_RANK[(n, m)]}"
        )
    return AdmissibilityVerdict(n, m, True, "mixed order", tuple(notes))


def enriques_reference() -> IntegerLattice:
    """U(2) + E8(-2), of signature (1, 9)."""
    return orthogonal_sum(
        twist(standard_lattice("U"), 2),
        twist(standard_lattice("E8minus"), 2),
        label="U(2)+E8(-2)",
    )


@dataclass(frozen=True)
class EnriquesVerdict:
    lattice: IntegerLattice
    checks: tuple[Check, ...]
    full_isometry: bool | None = None

    @property
    def matches(self) -> bool:
        return all(check.matches for check in self.checks)

    def __bool__(self) -> bool:
        return self.matches

    def to_payload(self) -> dict[str, Any]:
        return {
            "matches": self.matches,
            "checks": [check.to_payload() for check in self.checks],
            "full_isometry": self.full_isometry,
        }


def enriques_signature(
    lattice: IntegerLattice, full_isometry: bool = False, budget: int | None = None
) -> EnriquesVerdict:
    """
    Genus-level comparison with U(2) + E8(-2). With ``full_isometry`` the
    lattice is also tested for being isometric: L = M(2) for an even unimodular
    M of signature (1, 9), which determines M up to isometry.
    """
    reference = enriques_reference()
    checks = [
        Check("rank", lattice.rank == 10, f"{lattice.rank}"),
        Check("signature", lattice.signature == reference.signature, f"{lattice.signature}"),
        Check("determinant", abs(lattice.det) == 2**10, f"{lattice.det}"),
        Check("even", lattice.is_even, ""),
    ]
    if all(check.matches for check in checks):
        verdict = discriminant_forms_isomorphic(
            discriminant_group(lattice), discriminant_group(reference), budget=budget
        )
        checks.append(Check("discriminant form", bool(verdict), verdict.reason))
    isometric = None
    if full_isometry:
        rows = lattice.rows
        halved_integral = all(x % 2 == 0 for row in rows for x in row)
        isometric = (
            halved_integral
            and all(rows[i][i] % 4 == 0 for i in range(lattice.rank))
            and lattice.rank == 10
            and lattice.signature == (1, 9)
            and abs(lattice.det) == 2**10
        )
    return EnriquesVerdict(lattice, tuple(checks), isometric)


class ActionClass(StrEnum):
    PLUS = "+1"
    MINUS = "-1"
    OTHER = "other"


@dataclass(frozen=True)
class DiscriminantAction:
    form: DiscriminantForm
    images: tuple[tuple[int, ...], ...]
    classification: str

    def to_payload(self) -> dict[str, Any]:
        return {
            "orders": list(self.form.orders),
            "images": [list(row) for row in self.images],
            "classification": self.classification,
        }


def discriminant_action(
    lattice: IntegerLattice,
    matrix: ImmutableMatrix | Sequence[Sequence[int]],
    form: DiscriminantForm | None = None,
) -> DiscriminantAction:
    """The induced automorphism of d(L), as images of the generators."""
    matrix = matrix if isinstance(matrix, ImmutableMatrix) else ImmutableMatrix(matrix)
    if not is_isometry(lattice, matrix):
        raise PreconditionError("matrix is not an isometry of the lattice")
    form = form or discriminant_group(lattice)
    images = []
    for g in form.generators:
        image = [
            sum((Fraction(int(matrix[i, j])) * g.coordinates[j] for j in range(lattice.rank)), Fraction(0))
            for i in range(lattice.rank)
        ]
        images.append(form.reduce(image))
    basis = [form.normalize([int(i == j) for j in range(len(form.orders))]) for i in range(len(form.orders))]
    negated = [form.scale(-1, b) for b in basis]
    if images == basis:
        classification = ActionClass.PLUS
    elif images == negated:
        classification = ActionClass.MINUS
    else:
        classification = ActionClass.OTHER
    return DiscriminantAction(form, tuple(images), classification)


def form_automorphisms(form: DiscriminantForm) -> list[tuple[tuple[int, ...], ...]]:
    """
    Every isometry of a discriminant form, as images of the generators. Meant
    for the small groups of Picard lattices.
    """
    limit = settings.DISCRIMINANT_ORDER_LIMIT
    if form.order > limit:
        raise OrderLimitExceeded(form.order, limit)
    k = len(form.orders)
    basis = [tuple(int(i == j) for j in range(k)) for i in range(k)]
    candidates = [
        [c for c in form.elements() if form.element_order(c) == form.orders[i] and form.q(c) == form.q(basis[i])]
        for i in range(k)
    ]
    found = []

    def extend(images: list[tuple[int, ...]]) -> None:
        j = len(images)
        if j == k:
            span = {tuple(0 for _ in range(k))}
            for image, order in zip(images, form.orders):
                span = {form.add(s, form.scale(t, image)) for s in span for t in range(order)}
            if len(span) == form.order:
                found.append(tuple(images))
            return
        for h in candidates[j]:
            if all(form.b(images[i], h) == form.b(basis[i], basis[j]) for i in range(j)):
                extend(images + [h])

    extend([])
    return found


def _apply_automorphism(form: DiscriminantForm, images, c) -> tuple[int, ...]:
    result = tuple(0 for _ in form.orders)
    for ci, image in zip(c, images):
        result = form.add(result, form.scale(ci, image))
    return result


@dataclass
class ReportSection:
    title: str
    lines: list[str] = field(default_factory=list)
    checks: list[Check] = field(default_factory=list)


@dataclass
class ExampleReport:
    verdict: str
    sections: list[ReportSection]

    @property
    def passed(self) -> bool:
        return all(check.matches for section in self.sections for check in section.checks)

    def to_payload(self) -> dict[str, Any]:
        return {
            "verdict": self.verdict,
            "passed": self.passed,
            "sections": [
                {
                    "title": section.title,
                    "lines": section.lines,
                    "checks": [check.to_payload() for check in section.checks],
                }
                for section in self.sections
            ],
        }


EXAMPLE_PICARD = ((2, 5), (5, 2))
EXAMPLE_INVOLUTION = ((1, 5), (0, -1))
EXAMPLE_SWAP = ((0, 1), (1, 0))
EXAMPLE_GENERATORS = ((Fraction(1, 3), Fraction(-1, 3)), (Fraction(1, 7), Fraction(1, 7)))
INCOMPATIBLE_VERDICT = "incompatible: no Mukai-lattice automorphism conjugates ι₁, ι₂"


def _congruent(first: Sequence[int], second: Sequence[int], orders: Sequence[int]) -> bool:
    return all((a - b) % o == 0 for a, b, o in zip(first, second, orders))


def example_compatible_report() -> ExampleReport:
    """
    Two involutions on the Picard lattice [[2, 5], [5, 2]], each negating one
    of the (-42)-classes 2 f2 - 5 f1 and 2 f1 - 5 f2. An equivariant derived
    equivalence would need an isometry exchanging the two classes up to sign
    which acts as +-1 on the discriminant group; none exists.
    """
    pic = IntegerLattice.from_rows(EXAMPLE_PICARD, "Pic(X)")
    form = discriminant_group(pic).with_generators(EXAMPLE_GENERATORS)
    v1, v2 = (-5, 2), (2, -5)
    glue1 = form.reduce([Fraction(x, 21) for x in v1])
    glue2 = form.reduce([Fraction(x, 21) for x in v2])

    lattice_section = ReportSection("Picard lattice")
    lattice_section.lines += [
        f"Gram {pic.rows_as_lists()}, det {pic.det}, d(Pic) = {form.group}",
        f"q(d1) = {form.q((1, 0))}, q(d2) = {form.q((0, 1))}",
        f"v1 = 2f2 - 5f1, v1^2 = {pic.norm(v1)}; v2 = 2f1 - 5f2, v2^2 = {pic.norm(v2)}",
        f"v1/21 = {glue1} and v2/21 = {glue2} in (d1, d2) with d1 = (f1 - f2)/3",
    ]
    flipped = form.with_generators([[-x for x in EXAMPLE_GENERATORS[0]], list(EXAMPLE_GENERATORS[1])])
    flipped1 = flipped.reduce([Fraction(x, 21) for x in v1])
    flipped2 = flipped.reduce([Fraction(x, 21) for x in v2])
    lattice_section.lines.append(
        f"with d1' = (f2 - f1)/3: v1/21 = {flipped1}, v2/21 = {flipped2}"
    )
    lattice_section.checks += [
        Check("v1^2 = -42", pic.norm(v1) == -42),
        Check("v2^2 = -42", pic.norm(v2) == -42),
        Check("v1/21 = -d1' + 3 d2", _congruent(flipped1, (-1, 3), form.orders)),
        Check("v2/21 = d1' - 4 d2", _congruent(flipped2, (1, -4), form.orders)),
    ]

    action_section = ReportSection("Induced actions on d(Pic)")
    involution = discriminant_action(pic, EXAMPLE_INVOLUTION, form)
    swap = discriminant_action(pic, EXAMPLE_SWAP, form)
    action_section.lines += [
        f"ι₁ = {list(EXAMPLE_INVOLUTION)} fixes f1, negates v1: acts as {involution.classification}",
        f"f1 <-> f2 carries v1 to v2: acts as {swap.classification}",
    ]
    automorphisms = form_automorphisms(form)
    exchanging = []
    for images in automorphisms:
        image1 = _apply_automorphism(form, images, glue1)
        if image1 in (glue2, form.scale(-1, glue2)):
            exchanging.append(images)
    identity = tuple(tuple(int(i == j) for j in range(2)) for i in range(2))
    minus = tuple(form.scale(-1, row) for row in identity)
    central = [images for images in exchanging if images in (identity, minus)]
    action_section.lines.append(
        f"{len(automorphisms)} isometries of d(Pic); {len(exchanging)} send v1/21 to ±v2/21, "
        f"{len(central)} of them central"
    )
    action_section.checks += [
        Check("ι₁ acts as -1", involution.classification == ActionClass.MINUS),
        Check("exchanging map acts as other", swap.classification == ActionClass.OTHER),
        Check("no central exchanging isometry", bool(exchanging) and not central),
    ]

    transcendental_section = ReportSection("Transcendental lattice")
    k3 = standard_lattice("K3")
    f1 = [1, 1] + [0] * 20
    f2 = [5, 0, 1, 1] + [0] * 18
    embedded = IntegerLattice.from_rows(
        [[int(k3.evaluate(a, b)) for b in (f1, f2)] for a in (f1, f2)], "Pic(X)"
    )
    transcendental = orthogonal_complement(k3, [f1, f2])
    d_t = discriminant_group(transcendental)
    isometric = discriminant_forms_isomorphic(d_t, form, ComparisonMode.ISOMETRY)
    anti = discriminant_forms_isomorphic(d_t, form, ComparisonMode.ANTI_ISOMETRY)
    transcendental_section.lines += [
        "Pic(X) embedded as f1 = e1 + f1', f2 = 5 e1 + e2 + f2' in U^3 + E8(-1)^2",
        f"T(X): rank {transcendental.rank}, signature {transcendental.signature}, det {transcendental.det}",
        f"d(T) vs d(Pic): isometry {isometric.status}, anti-isometry {anti.status}",
        "±1 are central, so the argument closes for either identification of d(T) with d(Pic)",
    ]
    transcendental_section.checks += [
        Check("embedding reproduces Pic", embedded.gram == pic.gram),
        Check("T(X) has rank 20", transcendental.rank == 20),
        Check("d(T) anti-isometric to d(Pic)", bool(anti)),
    ]
    report = ExampleReport(
        INCOMPATIBLE_VERDICT, [lattice_section, action_section, transcendental_section]
    )
    logger.info(f"{'✅' if report.passed else '❌'} compatible example: {report.verdict}")
    return report


@dataclass(frozen=True)
class LatticePackage:
    """A Picard lattice Zf + A with the involution +1 on f and -1 on A."""

    picard: IntegerLattice
    involution: ImmutableMatrix
    negative_part: IntegerLattice


def mazur_package(polarization: int, part: IntegerLattice, label: str) -> LatticePackage:
    pol = IntegerLattice.from_rows([[polarization]], "Zf")
    picard = orthogonal_sum(pol, part, label=label)
    involution = ImmutableMatrix.diag(1, *([-1] * part.rank))
    negative = eigenlattice(picard, involution, -1, label=f"{label}^-")
    return LatticePackage(picard, involution, negative)


MAZUR_FIRST = ((-4, -1), (-1, -12))
MAZUR_SECOND = ((-6, -1), (-1, -8))


def mazur_action_pair() -> ExampleReport:
    """
    Picard lattices Zf + A and Zg + B with A = -[[4, 1], [1, 12]] and
    B = -[[6, 1], [1, 8]]: A and B share a genus but are not isometric and
    neither represents -2.
    """
    a = IntegerLattice.from_rows(MAZUR_FIRST, "A")
    b = IntegerLattice.from_rows(MAZUR_SECOND, "B")
    x = mazur_package(2, a, "Pic(X)")
    y = mazur_package(2, b, "Pic(Y)")
    packages = ReportSection("Lattice packages")
    for name, package, part in (("X", x, a), ("Y", y, b)):
        packages.lines.append(
            f"Pic({name}) = {package.picard.rows_as_lists()}, (-1)-eigenlattice "
            f"{package.negative_part.rows_as_lists()}"
        )
        packages.checks.append(
            Check(
                f"(-1)-eigenlattice of Pic({name}) is {part.label}",
                bool(is_isometric_definite(package.negative_part, part).require_decided()),
            )
        )
        packages.checks.append(
            Check(f"involution preserves Pic({name})", is_isometry(package.picard, package.involution))
        )

    comparison = ReportSection("A versus B")
    isometry = is_isometric_definite(a, b).require_decided()
    genus = same_genus(a, b)
    rep_a = represents(BinaryEvenLattice.from_gram(a.rows), -2)
    rep_b = represents(BinaryEvenLattice.from_gram(b.rows), -2)
    comparison.lines += [
        f"A = {a.rows_as_lists()}, B = {b.rows_as_lists()}, det {a.det}",
        f"isometric: {isometry.status}; genus: {genus.status}",
        f"A represents -2: {bool(rep_a)}; B represents -2: {bool(rep_b)}",
    ]
    comparison.checks += [
        Check("A and B not isometric", not isometry),
        Check("A and B in one genus", bool(genus)),
        Check("neither represents -2", not rep_a and not rep_b),
    ]
    stable = ReportSection("Stable equivalence")
    certificate = stable_isometry_witness(a, b)
    stable.lines.append(f"A + U = B + U certified by {certificate.kind}")
    stable.checks.append(Check("certificate verifies", certificate.verify()))
    full = same_genus(x.picard, y.picard)
    stable.lines.append(f"Pic(X) and Pic(Y): {full.status}")
    stable.checks.append(Check("Pic(X), Pic(Y) in one genus", bool(full)))
    report = ExampleReport(
        "the involutions are not conjugate by a lattice isometry, but the pair is stably equivalent",
        [packages, comparison, stable],
    )
    logger.info(f"{'✅' if report.passed else '❌'} mazur example: {report.verdict}")
    return report
