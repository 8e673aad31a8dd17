"""
Explicit isometries of the Mukai lattice U^4 + E8(-1)^2.

E8 isometries are written in the even coordinate system of R^8, where the
root lattice consists of the vectors in Z^8 or (Z + 1/2)^8 with even
coordinate sum. Permutations of coordinates and an even number of sign
changes preserve it, and conjugating by the simple roots gives integral
matrices in the Cartan basis.
"""

import logging
from functools import lru_cache
from typing import Sequence

from sympy import ImmutableMatrix, Rational, diag, eye, zeros

from core.exceptions import InvalidConfigurationError
from lattices.lattice import E8_CARTAN

from .k3action import K3Action

logger = logging.getLogger(__name__)

# simple roots in the Bourbaki numbering used by E8_CARTAN
_HALF = Rational(1, 2)
E8_SIMPLE_ROOTS = (
    (_HALF, -_HALF, -_HALF, -_HALF, -_HALF, -_HALF, -_HALF, _HALF),
    (1, 1, 0, 0, 0, 0, 0, 0),
    (-1, 1, 0, 0, 0, 0, 0, 0),
    (0, -1, 1, 0, 0, 0, 0, 0),
    (0, 0, -1, 1, 0, 0, 0, 0),
    (0, 0, 0, -1, 1, 0, 0, 0),
    (0, 0, 0, 0, -1, 1, 0, 0),
    (0, 0, 0, 0, 0, -1, 1, 0),
)

# signed coordinate maps: position i holds (sign, target) meaning e_i -> sign * e_target
SignedPermutation = Sequence[tuple[int, int]]


@lru_cache(maxsize=1)
def root_matrix() -> ImmutableMatrix:
    roots = ImmutableMatrix(E8_SIMPLE_ROOTS)
    if roots * roots.T != ImmutableMatrix(E8_CARTAN):
        raise InvalidConfigurationError("simple roots do not reproduce the E8 Cartan matrix")
    return roots


def signed_permutation_matrix(images: SignedPermutation) -> ImmutableMatrix:
    size = len(images)
    if sorted(target for _, target in images) != list(range(size)):
        raise InvalidConfigurationError("targets must form a permutation")
    matrix = zeros(size, size)
    for i, (sign, target) in enumerate(images):
        if sign not in (1, -1):
            raise InvalidConfigurationError("signs must be +1 or -1")
        matrix[target, i] = sign
    return ImmutableMatrix(matrix)


def e8_isometry(images: SignedPermutation) -> ImmutableMatrix:
    """The isometry of E8 (in the Cartan basis) induced by a signed permutation."""
    if len(images) != 8:
        raise InvalidConfigurationError("E8 signed permutations act on 8 coordinates")
    if sum(1 for sign, _ in images if sign < 0) % 2:
        raise InvalidConfigurationError("an odd number of sign changes does not preserve E8")
    roots = root_matrix()
    coordinate_map = signed_permutation_matrix(images)
    matrix = roots.T.inv() * coordinate_map * roots.T
    if any(not entry.is_Integer for entry in matrix):
        raise InvalidConfigurationError("signed permutation does not preserve the E8 lattice")
    return ImmutableMatrix(matrix)


def twisted_cycle(copies: int) -> ImmutableMatrix:
    """
    Cyclic shift of ``copies`` hyperbolic planes, the last one returning with
    a sign: order 2 * copies, trace 0 below that order.
    """
    if copies < 1:
        raise InvalidConfigurationError("need at least one hyperbolic plane")
    size = 2 * copies
    matrix = zeros(size, size)
    for k in range(copies):
        target = (k + 1) % copies
        sign = -1 if k == copies - 1 else 1
        for a in range(2):
            matrix[2 * target + a, 2 * k + a] = sign
    return ImmutableMatrix(matrix)


def mukai_block_matrix(
    u_block: ImmutableMatrix | None = None,
    first_e8: ImmutableMatrix | None = None,
    second_e8: ImmutableMatrix | None = None,
) -> ImmutableMatrix:
    """Assemble an isometry of U^4 + E8(-1) + E8(-1); missing blocks act trivially."""
    u_block = u_block if u_block is not None else eye(8)
    if u_block.rows < 8:
        u_block = diag(u_block, eye(8 - u_block.rows))
    return ImmutableMatrix(
        diag(
            u_block,
            first_e8 if first_e8 is not None else eye(8),
            second_e8 if second_e8 is not None else eye(8),
        )
    )


# rotation in the plane (1, 2), rotation in (3, 4), swaps (5 6) and (7 8)
E8_ROTATION_PAIR = ((1, 1), (-1, 0), (1, 3), (-1, 2), (1, 5), (1, 4), (1, 7), (1, 6))

# rotation in (1, 2) and x3 -> -x3; the rest depends on the wanted trace
_E8_TRACE_PATTERNS = {
    4: ((1, 1), (-1, 0), (-1, 2), (1, 3), (1, 4), (1, 5), (1, 6), (1, 7)),
    2: ((1, 1), (-1, 0), (-1, 2), (1, 4), (1, 3), (1, 5), (1, 6), (1, 7)),
    0: ((1, 1), (-1, 0), (-1, 2), (1, 4), (1, 3), (1, 6), (1, 5), (1, 7)),
}


def order_eight_action(fixed_points: int) -> K3Action:
    """
    An order-8 isometry with s = 4 (n = 4, m = 2) whose traces on sigma,
    sigma^2, sigma^4 are (fixed_points, 4, 8).
    """
    if fixed_points not in _E8_TRACE_PATTERNS:
        raise InvalidConfigurationError(
            f"fixed point count {fixed_points} not in {sorted(_E8_TRACE_PATTERNS)}"
        )
    matrix = mukai_block_matrix(
        twisted_cycle(4),
        e8_isometry(E8_ROTATION_PAIR),
        e8_isometry(_E8_TRACE_PATTERNS[fixed_points]),
    )
    return K3Action(8, matrix, 4, label=f"order8[chi={fixed_points}]")


def order_four_action(s: int) -> K3Action:
    """A twisted cycle of two hyperbolic planes: order 4, traces (20, 16)."""
    return K3Action(4, mukai_block_matrix(twisted_cycle(2)), s, label=f"order4[s={s}]")


def block_involution(s: int) -> K3Action:
    """+1 on U^4 and -1 on both copies of E8(-1)."""
    minus = -eye(8)
    return K3Action(2, mukai_block_matrix(None, minus, minus), s, label=f"involution[s={s}]")
