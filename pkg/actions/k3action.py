"""
Cyclic group actions on the Mukai lattice: validation, the factorization
N = n * m and trace sequences.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any

from sympy import ImmutableMatrix, divisors, primefactors, totient

from core.exceptions import InconsistentTraceError, InvalidConfigurationError
from lattices.lattice import IntegerLattice, is_isometry, standard_lattice
from lefschetz.contributions import chi_equals_count
from lefschetz.cyclotomic import ramanujan_sum
from lefschetz.tables import MIXED_FIXED_POINT_OPTIONS, NIKULIN_FIXED_POINTS

logger = logging.getLogger(__name__)

MUKAI_RANK = 24


def _matrix(rows) -> ImmutableMatrix:
    matrix = rows if isinstance(rows, ImmutableMatrix) else ImmutableMatrix(rows)
    if any(not entry.is_Integer for entry in matrix):
        raise InvalidConfigurationError("action matrices must be integral")
    return matrix


@dataclass(frozen=True)
class Factorization:
    n: int
    m: int

    @property
    def N(self) -> int:
        return self.n * self.m

    @property
    def is_symplectic(self) -> bool:
        return self.m == 1

    @property
    def is_purely_nonsymplectic(self) -> bool:
        return self.n == 1

    @property
    def kind(self) -> str:
        if self.N == 1:
            return "trivial"
        if self.is_symplectic:
            return "symplectic"
        if self.is_purely_nonsymplectic:
            return "purely nonsymplectic"
        return "mixed"

    def to_payload(self) -> dict[str, Any]:
        return {"n": self.n, "m": self.m, "kind": self.kind}


def factor_order(N: int, s: int) -> Factorization:
    """The 2-form eigenvalue zeta_N^s has order m = N / gcd(N, s); n = N / m."""
    m = N // math.gcd(N, s % N) if s % N else 1
    return Factorization(N // m, m)


@dataclass(frozen=True)
class PicardData:
    lattice: IntegerLattice
    matrix: ImmutableMatrix

    def __post_init__(self):
        object.__setattr__(self, "matrix", _matrix(self.matrix))


@dataclass(frozen=True)
class K3Action:
    """
    The generator sigma* of a cyclic group of order N acting on the Mukai
    lattice, with sigma acting on the 2-form by zeta_N^s.
    """

    N: int
    mukai_matrix: ImmutableMatrix
    s: int
    pic: PicardData | None = None
    label: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "mukai_matrix", _matrix(self.mukai_matrix))

    @classmethod
    def from_payload(cls, payload: dict[str, Any]) -> "K3Action":
        pic = payload.get("pic")
        return cls(
            N=int(payload["N"]),
            mukai_matrix=ImmutableMatrix(payload["mukai_matrix"]),
            s=int(payload["s"]),
            pic=(
                PicardData(IntegerLattice.from_rows(pic["gram"], "Pic"), ImmutableMatrix(pic["matrix"]))
                if pic
                else None
            ),
            label=payload.get("label", ""),
        )

    def to_payload(self) -> dict[str, Any]:
        payload: dict[str, Any] = {"N": self.N, "s": self.s, "mukai_matrix": self.mukai_matrix}
        if self.pic is not None:
            payload["pic"] = {"gram": self.pic.lattice.gram, "matrix": self.pic.matrix}
        if self.label:
            payload["label"] = self.label
        return payload

    @property
    def factorization(self) -> Factorization:
        return factor_order(self.N, self.s)

    def matrix_power(self, r: int) -> ImmutableMatrix:
        return self._powers[r % self.N] if self.N > 0 else self.mukai_matrix

    @cached_property
    def _powers(self) -> tuple[ImmutableMatrix, ...]:
        powers = [ImmutableMatrix.eye(self.mukai_matrix.rows)]
        for _ in range(1, max(self.N, 1)):
            powers.append(powers[-1] * self.mukai_matrix)
        return tuple(powers)

    def power(self, r: int) -> "K3Action":
        """sigma^r as an action of order N / gcd(N, r)."""
        g = math.gcd(self.N, r)
        order = self.N // g
        exponent = (self.s * (r // g)) % order if order > 1 else 0
        return K3Action(order, self.matrix_power(r), exponent, label=f"{self.label or 'sigma'}^{r}")

    def trace(self, r: int = 1) -> int:
        return int(self.matrix_power(r).trace())


@dataclass(frozen=True)
class ActionVerdict:
    action: K3Action
    violations: tuple[str, ...]

    def __bool__(self) -> bool:
        return not self.violations

    def to_payload(self) -> dict[str, Any]:
        return {"valid": bool(self), "violations": list(self.violations)}


def validate_action(action: K3Action) -> ActionVerdict:
    violations = []
    m = action.mukai_matrix
    if action.N < 1:
        return ActionVerdict(action, ("order N must be positive",))
    if m.shape != (MUKAI_RANK, MUKAI_RANK):
        return ActionVerdict(action, (f"matrix is {m.rows}x{m.cols}, expected 24x24",))
    identity = ImmutableMatrix.eye(MUKAI_RANK)
    if m ** action.N != identity:
        violations.append(f"matrix does not satisfy M^{action.N} = I")
    else:
        for p in primefactors(action.N):
            if m ** (action.N // p) == identity:
                actual = _multiplicative_order(m, action.N)
                violations.append(f"order is {actual}, not {action.N}")
                break
    if not is_isometry(standard_lattice("Mukai"), m):
        violations.append("matrix does not preserve the Mukai pairing")
    if not 0 <= action.s < action.N:
        violations.append(f"exponent s={action.s} outside 0..{action.N - 1}")
    if action.pic is not None:
        pic = action.pic
        if not is_isometry(pic.lattice, pic.matrix):
            violations.append("Picard matrix does not preserve the Picard lattice")
        elif pic.matrix ** action.N != ImmutableMatrix.eye(pic.lattice.rank):
            violations.append(f"Picard matrix order does not divide {action.N}")
    if violations:
        logger.info(f"❌ action {action.label or ''} invalid: {'; '.join(violations)}")
    return ActionVerdict(action, tuple(violations))


def _multiplicative_order(m: ImmutableMatrix, bound: int) -> int:
    identity = ImmutableMatrix.eye(m.rows)
    for d in divisors(bound):
        if m**d == identity:
            return int(d)
    return bound


@dataclass(frozen=True)
class GateVerdict:
    violations: tuple[str, ...]
    notes: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return not self.violations

    def to_payload(self) -> dict[str, Any]:
        return {"accepted": bool(self), "violations": list(self.violations), "notes": list(self.notes)}


@dataclass(frozen=True)
class TraceSequence:
    """chi(sigma^r) for every divisor r of N; chi(sigma^N) is the rank 24."""

    N: int
    values: dict[int, int]

    def __post_init__(self):
        values = {int(r): int(v) for r, v in self.values.items()}
        values.setdefault(self.N, MUKAI_RANK)
        for r in values:
            if r < 1 or self.N % r:
                raise InvalidConfigurationError(f"{r} is not a divisor of {self.N}")
        object.__setattr__(self, "values", dict(sorted(values.items())))

    def __hash__(self) -> int:
        return hash((self.N, tuple(self.values.items())))

    def value(self, r: int) -> int:
        """chi(sigma^r) for any r; integral characters only depend on gcd(r, N)."""
        return self.values[math.gcd(r, self.N)]

    @property
    def is_complete(self) -> bool:
        return all(int(d) in self.values for d in divisors(self.N))

    def character_sum(self) -> int:
        """sum over k = 0..N-1 of chi(sigma^k)."""
        return sum(int(totient(self.N // r)) * self.value(r) for r in divisors(self.N))

    def rational_multiplicities(self) -> dict[int, Fraction]:
        """
        Multiplicity of each Q-irreducible constituent; the constituent of order d
        has dimension phi(d).
        """
        result = {}
        for d in divisors(self.N):
            d = int(d)
            total = sum(
                int(totient(self.N // int(r))) * self.value(int(r)) * ramanujan_sum(d, int(r))
                for r in divisors(self.N)
            )
            result[d] = Fraction(total, self.N * int(totient(d)))
        return result

    def consistency(self) -> GateVerdict:
        violations = []
        if not self.is_complete:
            violations.append("trace values missing for some divisors of N")
            return GateVerdict(tuple(violations))
        if self.values[self.N] != MUKAI_RANK:
            violations.append(f"chi(sigma^N) = {self.values[self.N]}, expected {MUKAI_RANK}")
        if self.character_sum() % self.N:
            violations.append("trivial character has non-integral multiplicity")
        for d, mult in self.rational_multiplicities().items():
            if mult.denominator != 1 or mult < 0:
                violations.append(f"constituent of order {d} has multiplicity {mult}")
        for r, value in self.values.items():
            if abs(value) > MUKAI_RANK:
                violations.append(f"|chi(sigma^{r})| = {abs(value)} exceeds {MUKAI_RANK}")
        return GateVerdict(tuple(violations))

    def to_payload(self) -> dict[str, Any]:
        return {
            "N": self.N,
            "values": {str(r): v for r, v in self.values.items()},
            "multiplicities": {str(d): m for d, m in self.rational_multiplicities().items()}
            if self.is_complete
            else None,
        }


def trace_sequence(action: K3Action) -> TraceSequence:
    return TraceSequence(action.N, {int(r): action.trace(int(r)) for r in divisors(action.N)})


def power_gate(traces: TraceSequence, n: int, m: int) -> GateVerdict:
    """
    Constraints on chi(sigma^r) from the fixed loci of the powers: point counts
    are nonnegative, symplectic powers have Nikulin's counts, and nested fixed
    sets differ by whole orbits.
    """
    N = traces.N
    if n * m != N:
        raise InvalidConfigurationError(f"n*m = {n * m} does not match N = {N}")
    violations: list[str] = []
    notes: list[str] = []
    point_counts: dict[int, int] = {}
    for r in (int(d) for d in divisors(N)):
        if r == N or r not in traces.values:
            continue
        order = N // r
        m_r = m // math.gcd(m, r)
        n_r = order // m_r
        value = traces.values[r]
        if n_r >= 2:
            try:
                point_counts[r] = chi_equals_count(value, n_r, m_r)
            except InconsistentTraceError as exc:
                violations.append(f"sigma^{r}: {exc}")
                continue
        if m_r == 1:
            expected = NIKULIN_FIXED_POINTS.get(order)
            if expected is None:
                violations.append(f"sigma^{r} is symplectic of order {order} > 8")
            elif value != expected:
                violations.append(
                    f"sigma^{r} is symplectic of order {order}: chi = {value}, expected {expected}"
                )
            else:
                notes.append(f"sigma^{r}: symplectic of order {order}, {expected} fixed points")
    for r, count in point_counts.items():
        for p in primefactors(N // r):
            outer = r * int(p)
            if outer in point_counts:
                bigger = point_counts[outer]
                if count > bigger:
                    violations.append(f"sigma^{r} fixes {count} points but sigma^{outer} only {bigger}")
                elif (bigger - count) % int(p):
                    violations.append(
                        f"sigma^{outer} fixed points outside Fix(sigma^{r}) do not form orbits of size {p}"
                    )
    options = MIXED_FIXED_POINT_OPTIONS.get((n, m))
    if options is not None and 1 in traces.values and traces.values[1] not in options:
        violations.append(f"chi(sigma) = {traces.values[1]} not among {options} for N = {n}*{m}")
    return GateVerdict(tuple(violations), tuple(notes))
