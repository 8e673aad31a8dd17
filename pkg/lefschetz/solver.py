"""
Fixed-point configurations and the exact solver for the holomorphic
Lefschetz formula.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import StrEnum
from typing import Any

from django.conf import settings

from core.exceptions import InvalidConfigurationError, SearchBudgetExceeded

from .contributions import curve_contribution, holomorphic_lhs, point_contribution
from .cyclotomic import CyclotomicNumber
from .tables import NIKULIN_FIXED_POINTS, NIKULIN_STABILIZERS

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FixedCurve:
    g: int
    r: int
    c2: int

    def to_payload(self) -> dict[str, int]:
        return {"g": self.g, "r": self.r, "c2": self.c2}


@dataclass(frozen=True)
class FixedPointConfig:
    """
    Fixed locus data of sigma: isolated points with unordered weights (i, j)
    and fixed curves. ``points`` holds (i, j, multiplicity) with i <= j; a
    fixed curve has C^2 = 2g - 2 and normal weight r = -s mod N.
    """

    N: int
    s: int
    points: tuple[tuple[int, int, int], ...] = ()
    curves: tuple[FixedCurve, ...] = ()

    def __post_init__(self):
        if self.N < 1:
            raise InvalidConfigurationError("order N must be positive")
        s = self.s % self.N
        merged: dict[tuple[int, int], int] = {}
        for entry in self.points:
            i, j, count = (int(v) for v in entry)
            if not (1 <= i <= self.N - 1 and 1 <= j <= self.N - 1):
                raise InvalidConfigurationError(f"weight ({i}, {j}) outside 1..{self.N - 1}")
            if (i + j - s) % self.N:
                raise InvalidConfigurationError(
                    f"weight ({i}, {j}) violates i + j = {s} mod {self.N}"
                )
            if count < 0:
                raise InvalidConfigurationError("multiplicities must be nonnegative")
            key = (min(i, j), max(i, j))
            merged[key] = merged.get(key, 0) + count
        curves = tuple(
            c if isinstance(c, FixedCurve) else FixedCurve(**c) for c in self.curves
        )
        if curves and s == 0:
            raise InvalidConfigurationError("a symplectic action has no fixed curves")
        for curve in curves:
            if curve.g < 0:
                raise InvalidConfigurationError("curve genus must be nonnegative")
            if curve.r % self.N == 0:
                raise InvalidConfigurationError("normal weight of a fixed curve must be nonzero")
            if (curve.r + s) % self.N:
                raise InvalidConfigurationError(
                    f"normal weight {curve.r} of a fixed curve must be {-s % self.N} mod {self.N}"
                )
            if curve.c2 != 2 * curve.g - 2:
                raise InvalidConfigurationError(
                    f"a fixed curve of genus {curve.g} has self-intersection {2 * curve.g - 2}, "
                    f"not {curve.c2}"
                )
        object.__setattr__(self, "s", s)
        object.__setattr__(
            self, "points", tuple((i, j, c) for (i, j), c in sorted(merged.items()) if c)
        )
        object.__setattr__(self, "curves", curves)

    @classmethod
    def from_payload(cls, payload: dict[str, Any]) -> "FixedPointConfig":
        return cls(
            N=payload["N"],
            s=payload["s"],
            points=tuple(tuple(p) for p in payload.get("points", [])),
            curves=tuple(FixedCurve(**c) for c in payload.get("curves", [])),
        )

    def to_payload(self) -> dict[str, Any]:
        return {
            "N": self.N,
            "s": self.s,
            "points": [list(p) for p in self.points],
            "curves": [c.to_payload() for c in self.curves],
        }

    @property
    def point_count(self) -> int:
        return sum(c for _, _, c in self.points)

    @property
    def euler_characteristic(self) -> int:
        """Topological Euler characteristic of the fixed locus."""
        return self.point_count + sum(2 - 2 * c.g for c in self.curves)

    def rhs(self) -> CyclotomicNumber:
        total = CyclotomicNumber.rational(self.N, 0)
        for i, j, count in self.points:
            total = total + point_contribution(i, j, self.N) * count
        for curve in self.curves:
            total = total + curve_contribution(curve.g, curve.r, curve.c2, self.N)
        return total

    def __str__(self) -> str:
        parts = [f"{c}x({i},{j})" for i, j, c in self.points]
        parts += [f"C(g={c.g})" for c in self.curves]
        return f"N={self.N} s={self.s}: " + (" + ".join(parts) or "empty")


class Balance(StrEnum):
    BALANCED = "balanced"
    UNBALANCED = "unbalanced"


@dataclass(frozen=True)
class ConfigVerdict:
    config: FixedPointConfig
    status: Balance
    lhs: CyclotomicNumber
    rhs: CyclotomicNumber
    residual: CyclotomicNumber

    def __bool__(self) -> bool:
        return self.status == Balance.BALANCED

    def to_payload(self) -> dict[str, Any]:
        return {
            "config": self.config.to_payload(),
            "status": self.status,
            "lhs": self.lhs.to_payload(),
            "rhs": self.rhs.to_payload(),
            "residual": self.residual.to_payload(),
        }


def verify_config(config: FixedPointConfig) -> ConfigVerdict:
    lhs = holomorphic_lhs(config.s, config.N)
    rhs = config.rhs()
    residual = lhs - rhs
    status = Balance.BALANCED if residual.is_zero() else Balance.UNBALANCED
    return ConfigVerdict(config, status, lhs, rhs, residual)


def admissible_weights(n: int, s: int, faithful_only: bool = True) -> list[tuple[int, int]]:
    """
    Unordered weights (i, j), i <= j, with i + j = s mod n and i, j != 0.
    A faithful action has gcd(i, j, n) = 1 at every isolated fixed point.
    """
    weights = []
    for i in range(1, n):
        j = (s - i) % n
        if j == 0 or j < i:
            continue
        if faithful_only and math.gcd(i, j, n) != 1:
            continue
        weights.append((i, j))
    return weights


@dataclass
class PointConfigSolver:
    """
    Depth-first enumeration over weight multiplicities. When every
    contribution has positive trace, the trace of the residual bounds the
    remaining multiplicities; the last multiplicity is solved exactly.
    """

    N: int
    s: int
    max_points: int | None = None
    faithful_only: bool = True
    budget: int | None = None
    nodes: int = field(default=0, init=False)

    def __post_init__(self):
        if self.max_points is None:
            self.max_points = settings.LEFSCHETZ_MAX_POINTS
        if self.budget is None:
            self.budget = settings.K3EQ_SEARCH_BUDGET
        if self.max_points < 0:
            raise InvalidConfigurationError("max_points must be nonnegative")
        self.s %= self.N

    def solve(self) -> list[FixedPointConfig]:
        weights = admissible_weights(self.N, self.s, self.faithful_only)
        lhs = holomorphic_lhs(self.s, self.N)
        if not weights:
            return [FixedPointConfig(self.N, self.s)] if lhs.is_zero() else []
        contributions = [point_contribution(i, j, self.N) for i, j in weights]
        traces = [c.trace() for c in contributions]
        last_inverse = contributions[-1].inverse()
        positive = all(t > 0 for t in traces)
        solutions: list[tuple[int, ...]] = []
        counts: list[int] = []

        def visit(index: int, residual: CyclotomicNumber, left: int) -> None:
            self.nodes += 1
            if self.nodes > self.budget:
                raise SearchBudgetExceeded(self.budget, "fixed-point configuration search")
            if index == len(weights) - 1:
                last = residual * last_inverse
                if not last.is_rational():
                    return
                value = last.rational_part()
                if value.denominator == 1 and 0 <= value <= left:
                    solutions.append(tuple(counts) + (int(value),))
                return
            ceiling = left
            if positive:
                remaining_trace = residual.trace()
                if remaining_trace < 0:
                    return
                ceiling = min(ceiling, math.floor(remaining_trace / traces[index]))
            for count in range(ceiling + 1):
                counts.append(count)
                visit(index + 1, residual - contributions[index] * count, left - count)
                counts.pop()

        logger.debug(f"solving N={self.N} s={self.s} over weights {weights}")
        visit(0, lhs, self.max_points)
        configs = [
            FixedPointConfig(self.N, self.s, tuple((i, j, c) for (i, j), c in zip(weights, sol)))
            for sol in solutions
        ]
        configs.sort(key=lambda cfg: (cfg.point_count, cfg.points))
        return configs


def search_point_configs(
    N: int,
    s: int,
    max_points: int | None = None,
    faithful_only: bool = True,
    budget: int | None = None,
) -> list[FixedPointConfig]:
    """Every point-only configuration with at most max_points points balancing the formula."""
    solver = PointConfigSolver(N, s, max_points, faithful_only, budget)
    configs = solver.solve()
    logger.info(f"N={N} s={s}: {len(configs)} configurations after {solver.nodes} nodes")
    return configs


@dataclass(frozen=True)
class PowerConsistency:
    n: int
    rows: tuple[tuple[int, int, int], ...]  # (r, order of sigma^r, predicted count)

    def __bool__(self) -> bool:
        return all(NIKULIN_FIXED_POINTS[order] == count for _, order, count in self.rows)


def nikulin_power_consistency(n: int) -> PowerConsistency:
    """
    Fixed points of sigma^r from the stabilizer table of sigma: a point with
    stabilizer of order d is fixed by sigma^r iff n / gcd(n, r) divides d.
    """
    stabilizers = NIKULIN_STABILIZERS[n]
    rows = []
    for r in range(1, n):
        if n % r:
            continue
        order = n // r
        count = sum(c for d, c in stabilizers.items() if d % order == 0)
        rows.append((r, order, count))
    return PowerConsistency(n, tuple(rows))
