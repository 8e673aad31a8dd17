"""
Discriminant groups d(L) = L*/L, their glue vectors and finite quadratic forms.

Generators come from the Smith form U G V = D: the column V e_i / d_i spans a
cyclic factor of order d_i. Each cyclic factor is split into prime-power
parts, and the primary generators are listed by increasing (prime, exponent).
"""

import itertools
import logging
import math
from dataclasses import dataclass
from enum import StrEnum
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Any, Iterator, Sequence

from django.conf import settings
from sympy import factorint

from core.exceptions import (
    NotAGlueVectorError,
    OrderLimitExceeded,
    PreconditionError,
    SearchBudgetExceeded,
)

from .lattice import IntegerLattice
from .normal_forms import invariant_factors as snf_invariant_factors
from .normal_forms import smith_normal_form_rows, solve_integer

logger = logging.getLogger(__name__)

Coefficients = tuple[int, ...]


def _frac_part(x: Fraction) -> Fraction:
    return x - math.floor(x)


def _mod2(x: Fraction) -> Fraction:
    return x - 2 * math.floor(x / 2)


def _lcm_denominator(values: Sequence[Fraction]) -> int:
    return math.lcm(1, *(Fraction(v).denominator for v in values))


@dataclass(frozen=True)
class FiniteAbelianGroup:
    invariant_factors: tuple[int, ...]

    def __post_init__(self):
        factors = tuple(int(d) for d in self.invariant_factors)
        if any(d <= 1 for d in factors):
            raise ValueError("invariant factors must exceed 1")
        if any(factors[i + 1] % factors[i] for i in range(len(factors) - 1)):
            raise ValueError("invariant factors must form a divisibility chain")
        object.__setattr__(self, "invariant_factors", factors)

    @classmethod
    def from_cyclic_orders(cls, orders: Sequence[int]) -> "FiniteAbelianGroup":
        """Invariant factors of a product of cyclic groups of the given orders."""
        powers: dict[int, list[int]] = {}
        for order in orders:
            for p, e in factorint(order).items():
                powers.setdefault(int(p), []).append(int(p) ** int(e))
        length = max((len(v) for v in powers.values()), default=0)
        factors = [1] * length
        for values in powers.values():
            for i, q in enumerate(sorted(values, reverse=True)):
                factors[length - 1 - i] *= q
        return cls(tuple(f for f in factors if f > 1))

    @property
    def order(self) -> int:
        return math.prod(self.invariant_factors)

    @property
    def exponent(self) -> int:
        return self.invariant_factors[-1] if self.invariant_factors else 1

    @property
    def is_trivial(self) -> bool:
        return not self.invariant_factors

    def __str__(self) -> str:
        if self.is_trivial:
            return "0"
        return " x ".join(f"Z/{d}" for d in self.invariant_factors)


@dataclass(frozen=True)
class GlueVector:
    coordinates: tuple[Fraction, ...]
    order: int

    @classmethod
    def of(cls, coordinates: Sequence[int | Fraction]) -> "GlueVector":
        coords = tuple(Fraction(x) for x in coordinates)
        return cls(coords, _lcm_denominator(coords))

    def reduced(self) -> "GlueVector":
        """Representative with every coordinate in [0, 1)."""
        return GlueVector(tuple(_frac_part(x) for x in self.coordinates), self.order)

    def __mul__(self, k: int) -> "GlueVector":
        return GlueVector.of([k * x for x in self.coordinates])

    __rmul__ = __mul__


class IsomorphismStatus(StrEnum):
    ISOMORPHIC = "isomorphic"
    NOT_ISOMORPHIC = "not isomorphic"


class ComparisonMode(StrEnum):
    ISOMETRY = "isometry"
    ANTI_ISOMETRY = "anti-isometry"


@dataclass(frozen=True)
class FormIsomorphismVerdict:
    status: IsomorphismStatus
    mode: ComparisonMode
    witness: tuple[Coefficients, ...] | None = None
    reason: str = ""
    nodes: int = 0

    def __bool__(self) -> bool:
        return self.status == IsomorphismStatus.ISOMORPHIC

    def to_payload(self) -> dict[str, Any]:
        return {
            "status": self.status,
            "mode": self.mode,
            "witness": (
                [list(row) for row in self.witness] if self.witness is not None else None
            ),
            "reason": self.reason,
        }


@dataclass(frozen=True)
class DiscriminantForm:
    """
    The discriminant form of an even (or odd) nondegenerate lattice on a
    chosen independent generating set of glue vectors.
    """

    lattice: IntegerLattice
    generators: tuple[GlueVector, ...]

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(g.order for g in self.generators)

    @cached_property
    def group(self) -> FiniteAbelianGroup:
        return FiniteAbelianGroup.from_cyclic_orders(self.orders)

    @property
    def order(self) -> int:
        return math.prod(self.orders)

    @property
    def is_even(self) -> bool:
        return self.lattice.is_even

    @cached_property
    def gram(self) -> tuple[tuple[Fraction, ...], ...]:
        """Exact g_i^T G g_j on the generators (not reduced)."""
        gens = [g.coordinates for g in self.generators]
        return tuple(tuple(self.lattice.evaluate(a, b) for b in gens) for a in gens)

    @cached_property
    def _scaled(self) -> tuple[int, tuple[tuple[int, ...], ...]]:
        denominator = _lcm_denominator([x for row in self.gram for x in row])
        return denominator, tuple(tuple(int(x * denominator) for x in row) for row in self.gram)

    @cached_property
    def bilinear_values(self) -> tuple[tuple[Fraction, ...], ...]:
        return tuple(tuple(_frac_part(x) for x in row) for row in self.gram)

    @cached_property
    def quadratic_values(self) -> tuple[Fraction, ...] | None:
        if not self.is_even:
            return None
        return tuple(_mod2(self.gram[i][i]) for i in range(len(self.generators)))

    def q_numerator(self, c: Sequence[int]) -> int:
        """Numerator of q(c) over the common denominator, reduced mod 2*denominator."""
        denominator, scaled = self._scaled
        total = 0
        for i, ci in enumerate(c):
            if ci:
                row = scaled[i]
                total += ci * sum(row[j] * cj for j, cj in enumerate(c) if cj)
        return total % (2 * denominator)

    def b_numerator(self, c1: Sequence[int], c2: Sequence[int]) -> int:
        denominator, scaled = self._scaled
        total = 0
        for i, ci in enumerate(c1):
            if ci:
                row = scaled[i]
                total += ci * sum(row[j] * cj for j, cj in enumerate(c2) if cj)
        return total % denominator

    def q(self, c: Sequence[int]) -> Fraction:
        """Quadratic value mod 2 (even lattices only)."""
        if not self.is_even:
            raise PreconditionError("quadratic form needs an even lattice")
        return Fraction(self.q_numerator(c), self._scaled[0])

    def b(self, c1: Sequence[int], c2: Sequence[int]) -> Fraction:
        return Fraction(self.b_numerator(c1, c2), self._scaled[0])

    def vector(self, c: Sequence[int]) -> GlueVector:
        coords = [Fraction(0)] * self.lattice.rank
        for ci, g in zip(c, self.generators):
            if ci:
                coords = [x + ci * y for x, y in zip(coords, g.coordinates)]
        return GlueVector.of(coords).reduced()

    def element_order(self, c: Sequence[int]) -> int:
        return math.lcm(1, *(o // math.gcd(ci, o) for ci, o in zip(c, self.orders)))

    def normalize(self, c: Sequence[int]) -> Coefficients:
        return tuple(int(ci) % o for ci, o in zip(c, self.orders))

    def elements(self) -> Iterator[Coefficients]:
        return itertools.product(*(range(o) for o in self.orders))

    def add(self, c1: Sequence[int], c2: Sequence[int]) -> Coefficients:
        return tuple((a + b) % o for a, b, o in zip(c1, c2, self.orders))

    def scale(self, k: int, c: Sequence[int]) -> Coefficients:
        return tuple((k * a) % o for a, o in zip(c, self.orders))

    def reduce(self, v: Sequence[int | Fraction]) -> Coefficients:
        """Coefficients c with v = sum c_i g_i in d(L), reduced mod the orders."""
        coords = [Fraction(x) for x in v]
        if len(coords) != self.lattice.rank:
            raise NotAGlueVectorError(f"not a glue vector: expected {self.lattice.rank} coordinates")
        if not self.generators:
            if any(x.denominator != 1 for x in coords):
                raise NotAGlueVectorError()
            return ()
        rows = self.lattice.rows
        gv = [sum(rows[i][j] * coords[j] for j in range(len(coords))) for i in range(len(coords))]
        if any(x.denominator != 1 for x in gv):
            raise NotAGlueVectorError()
        images = [
            [int(sum(rows[i][j] * g.coordinates[j] for j in range(len(coords)))) for i in range(len(coords))]
            for g in self.generators
        ]
        k = len(images)
        system = [
            [images[j][i] for j in range(k)] + list(rows[i])
            for i in range(len(coords))
        ]
        solution = solve_integer(system, [int(x) for x in gv])
        if solution is None:
            raise NotAGlueVectorError()
        return self.normalize(solution[:k])

    def with_generators(self, vectors: Sequence[Sequence[int | Fraction]]) -> "DiscriminantForm":
        """Rebase onto user-chosen glue vectors, checking they form a basis of d(L)."""
        generators = tuple(GlueVector.of(v) for v in vectors)
        rows = self.lattice.rows
        n = self.lattice.rank
        for g in generators:
            if len(g.coordinates) != n:
                raise NotAGlueVectorError(f"not a glue vector: expected {n} coordinates")
            image = [sum(rows[i][j] * g.coordinates[j] for j in range(n)) for i in range(n)]
            if any(x.denominator != 1 for x in image):
                raise NotAGlueVectorError()
        if math.prod(g.order for g in generators) != abs(self.lattice.det):
            raise PreconditionError(
                "glue vectors do not form an independent generating set: "
                f"orders {[g.order for g in generators]} vs |d(L)| = {abs(self.lattice.det)}"
            )
        system = [
            [int(sum(rows[i][j] * g.coordinates[j] for j in range(n))) for g in generators] + list(rows[i])
            for i in range(n)
        ]
        factors = snf_invariant_factors(system)
        if len(factors) != n or any(d != 1 for d in factors):
            raise PreconditionError("glue vectors do not generate the discriminant group")
        return DiscriminantForm(self.lattice, generators)

    def fingerprint(self, sign: int = 1) -> tuple[tuple[int, Fraction], ...]:
        """Sorted multiset of (element order, value) over the whole group."""
        values = []
        for c in self.elements():
            if self.is_even:
                value = _mod2(sign * self.q(c))
            else:
                value = _frac_part(sign * self.b(c, c))
            values.append((self.element_order(c), value))
        return tuple(sorted(values))

    def to_payload(self) -> dict[str, Any]:
        return {
            "invariant_factors": list(self.group.invariant_factors),
            "generator_orders": list(self.orders),
            "generators": [list(g.coordinates) for g in self.generators],
            "q_values": list(self.quadratic_values) if self.quadratic_values is not None else None,
            "b_values": [list(row) for row in self.bilinear_values],
        }


@lru_cache(maxsize=256)
def discriminant_group(lattice: IntegerLattice) -> DiscriminantForm:
    """d(L) with primary generators sorted by (prime, exponent)."""
    lattice.require_nondegenerate()
    n = lattice.rank
    if n == 0:
        return DiscriminantForm(lattice, ())
    d, _, v = smith_normal_form_rows([list(row) for row in lattice.rows])
    primary: list[tuple[int, int, GlueVector]] = []
    for i in range(n):
        di = d[i][i]
        if di == 1:
            continue
        column = [Fraction(v[r][i], di) for r in range(n)]
        for p, e in sorted(factorint(di).items()):
            q = int(p) ** int(e)
            part = GlueVector.of([(di // q) * x for x in column]).reduced()
            primary.append((int(p), q, part))
    primary.sort(key=lambda item: (item[0], item[1]))
    logger.debug(f"d({lattice.label or 'L'}) has primary orders {[q for _, q, _ in primary]}")
    return DiscriminantForm(lattice, tuple(g for _, _, g in primary))


def reduce_glue_vector(
    lattice: IntegerLattice,
    v: Sequence[int | Fraction],
    generators: Sequence[Sequence[int | Fraction]] | None = None,
) -> Coefficients:
    form = discriminant_group(lattice)
    if generators is not None:
        form = form.with_generators(generators)
    return form.reduce(v)


def discriminant_forms_isomorphic(
    first: DiscriminantForm,
    second: DiscriminantForm,
    mode: ComparisonMode | str = ComparisonMode.ISOMETRY,
    order_limit: int | None = None,
    budget: int | None = None,
) -> FormIsomorphismVerdict:
    """
    Search for a group isomorphism d1 -> d2 carrying q1 to q2 (isometry) or
    to -q2 (anti-isometry); odd lattices compare the bilinear form instead.
    """
    mode = ComparisonMode(mode)
    sign = 1 if mode == ComparisonMode.ISOMETRY else -1
    limit = order_limit if order_limit is not None else settings.DISCRIMINANT_ORDER_LIMIT
    budget = budget if budget is not None else settings.K3EQ_SEARCH_BUDGET

    def verdict(status: IsomorphismStatus, reason: str, witness=None, nodes: int = 0):
        return FormIsomorphismVerdict(status, mode, witness, reason, nodes)

    if first.order != second.order:
        return verdict(IsomorphismStatus.NOT_ISOMORPHIC, "group orders differ")
    for form in (first, second):
        if form.order > limit:
            raise OrderLimitExceeded(form.order, limit)
    if first.group != second.group:
        return verdict(IsomorphismStatus.NOT_ISOMORPHIC, "groups are not isomorphic")
    use_q = first.is_even and second.is_even
    if first.is_even != second.is_even:
        return verdict(IsomorphismStatus.NOT_ISOMORPHIC, "one form is even, the other odd")
    if not first.generators:
        return verdict(IsomorphismStatus.ISOMORPHIC, "trivial groups", witness=())
    if first.fingerprint() != second.fingerprint(sign):
        return verdict(IsomorphismStatus.NOT_ISOMORPHIC, "value multisets differ")

    d1 = first._scaled[0]
    d2 = second._scaled[0]
    scale = math.lcm(d1, d2)
    modulus_q = 2 * scale
    basis = [tuple(int(i == j) for j in range(len(first.orders))) for i in range(len(first.orders))]

    def value1_q(c):
        return (first.q_numerator(c) * (scale // d1)) % modulus_q

    def value2_q(c):
        return (sign * second.q_numerator(c) * (scale // d2)) % modulus_q

    def value1_b(a, c):
        return (first.b_numerator(a, c) * (scale // d1)) % scale

    def value2_b(a, c):
        return (sign * second.b_numerator(a, c) * (scale // d2)) % scale

    candidates: dict[tuple[int, int], list[Coefficients]] = {}
    for c in second.elements():
        key = (second.element_order(c), value2_q(c) if use_q else value2_b(c, c))
        candidates.setdefault(key, []).append(c)

    images: list[Coefficients] = []
    nodes = 0
    zero = tuple(0 for _ in second.orders)

    def extend(span: frozenset[Coefficients]) -> tuple[Coefficients, ...] | None:
        nonlocal nodes
        j = len(images)
        if j == len(basis):
            return tuple(images) if len(span) == second.order else None
        g = basis[j]
        key = (first.orders[j], value1_q(g) if use_q else value1_b(g, g))
        for h in candidates.get(key, ()):
            nodes += 1
            if nodes > budget:
                raise SearchBudgetExceeded(budget, "discriminant form search")
            if any(value2_b(images[i], h) != value1_b(basis[i], g) for i in range(j)):
                continue
            multiples = [zero]
            for _ in range(1, first.orders[j]):
                multiples.append(second.add(multiples[-1], h))
            if any(m in span for m in multiples[1:]):
                continue
            images.append(h)
            grown = frozenset(second.add(s, m) for s in span for m in multiples)
            found = extend(grown)
            if found is not None:
                return found
            images.pop()
        return None

    witness = extend(frozenset([zero]))
    if witness is None:
        logger.debug(f"no {mode} between forms of order {first.order} after {nodes} nodes")
        return verdict(IsomorphismStatus.NOT_ISOMORPHIC, "exhaustive search found no isomorphism", nodes=nodes)
    return verdict(IsomorphismStatus.ISOMORPHIC, f"{mode} found", witness=witness, nodes=nodes)
