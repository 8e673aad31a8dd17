"""
Local contributions to the holomorphic Lefschetz formula on a K3 surface and
the topological Lefschetz bookkeeping.

For sigma of order N acting on the 2-form by zeta^s (zeta = zeta_N):

    1 + zeta^(-s) = sum_p a(p) + sum_C (1 - g(C)) (1 + zeta^s) / (1 - zeta^s)^2

with a(p) = 1 / ((1 - zeta^i)(1 - zeta^j)) for a fixed point with weights (i, j).
"""

import logging
from dataclasses import dataclass
from enum import StrEnum
from typing import Any

from core.exceptions import InconsistentTraceError, PoleError, PreconditionError

from .cyclotomic import CyclotomicNumber, one, zeta_pow

logger = logging.getLogger(__name__)


def holomorphic_lhs(s: int, n: int) -> CyclotomicNumber:
    """1 + zeta_n^(-s)"""
    return one(n) + zeta_pow(n, -s)


def point_contribution(i: int, j: int, n: int) -> CyclotomicNumber:
    """1 / ((1 - zeta^i)(1 - zeta^j))"""
    if i % n == 0 or j % n == 0:
        raise PoleError(f"weight ({i}, {j}) has a zero entry mod {n}")
    return ((one(n) - zeta_pow(n, i)) * (one(n) - zeta_pow(n, j))).inverse()


def curve_contribution(g: int, r: int, c2: int, n: int) -> CyclotomicNumber:
    """
    b(C) = (1 - g) / (1 - w) - w C^2 / (1 - w)^2 with w = zeta^(-r), for a
    fixed curve of genus g, normal weight r and self-intersection C^2.
    """
    if r % n == 0:
        raise PoleError(f"normal weight {r} vanishes mod {n}")
    w = zeta_pow(n, -r)
    denominator = one(n) - w
    return (1 - g) / denominator - (w * c2) / (denominator * denominator)


def k3_curve_contribution(g: int, s: int, n: int) -> CyclotomicNumber:
    """(1 - g) (1 + zeta^s) / (1 - zeta^s)^2"""
    if s % n == 0:
        raise PoleError("a symplectic action has no fixed curves")
    z = zeta_pow(n, s)
    denominator = one(n) - z
    return (one(n) + z) * (1 - g) / (denominator * denominator)


@dataclass(frozen=True)
class SpecializationCheck:
    """
    The general curve term with C^2 = 2g - 2 against the K3 term: equal for
    normal weight r = -s, complex conjugate for r = s.
    """

    g: int
    s: int
    n: int
    matches_at_minus_s: bool
    conjugate_at_s: bool

    def __bool__(self) -> bool:
        return self.matches_at_minus_s and self.conjugate_at_s


def curve_specialization_check(g: int, s: int, n: int) -> SpecializationCheck:
    k3_term = k3_curve_contribution(g, s, n)
    c2 = 2 * g - 2
    at_minus_s = curve_contribution(g, -s, c2, n)
    at_s = curve_contribution(g, s, c2, n)
    return SpecializationCheck(
        g,
        s,
        n,
        matches_at_minus_s=at_minus_s == k3_term,
        conjugate_at_s=at_s == k3_term.complex_conjugate(),
    )


def topological_chi(trace: int) -> int:
    """chi(X^sigma) equals the trace of sigma on cohomology."""
    return int(trace)


def chi_equals_count(trace: int, n: int, m: int = 1) -> int:
    """
    With a nontrivial symplectic part (n >= 2) the fixed locus is a finite set
    of points, so the trace is their number.
    """
    if n < 2:
        raise PreconditionError("the fixed locus is a point set only when n >= 2")
    if m < 1:
        raise PreconditionError("m must be positive")
    if trace < 0:
        raise InconsistentTraceError(
            f"trace {trace} is negative but counts {n}*{m} fixed points"
        )
    return int(trace)


class Guarantee(StrEnum):
    GUARANTEED = "guaranteed"
    NOT_GUARANTEED = "not guaranteed"


@dataclass(frozen=True)
class FixedPointGuarantee:
    n: int
    m: int
    status: Guarantee
    lhs: CyclotomicNumber

    def __bool__(self) -> bool:
        return self.status == Guarantee.GUARANTEED

    def to_payload(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "m": self.m,
            "N": self.n * self.m,
            "status": self.status,
            "lhs": self.lhs.to_payload(),
        }


def fixed_points_guaranteed(n: int, m: int) -> FixedPointGuarantee:
    """
    For N = n m the 2-form eigenvalue is zeta_N^n; a nonzero left-hand side of
    the holomorphic formula forces a fixed point.
    """
    if n < 1 or m < 1:
        raise PreconditionError("n and m must be positive")
    lhs = holomorphic_lhs(n, n * m)
    status = Guarantee.NOT_GUARANTEED if lhs.is_zero() else Guarantee.GUARANTEED
    return FixedPointGuarantee(n, m, status, lhs)


def nonvanishing_table(limit: int = 66) -> list[tuple[int, int, bool]]:
    """(n, m, lhs is zero) for every n m <= limit."""
    rows = []
    for big_n in range(1, limit + 1):
        for n in range(1, big_n + 1):
            if big_n % n == 0:
                rows.append((n, big_n // n, holomorphic_lhs(n, big_n).is_zero()))
    return rows
