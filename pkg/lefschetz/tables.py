"""Classification data used as constraints and regression fixtures."""

# fixed points of a symplectic automorphism of order n
NIKULIN_FIXED_POINTS = {2: 8, 3: 6, 4: 4, 5: 4, 6: 2, 7: 3, 8: 2}

# order n -> {stabilizer order: number of fixed points of sigma with that stabilizer}
NIKULIN_STABILIZERS = {
    2: {2: 8},
    3: {3: 6},
    4: {4: 4, 2: 4},
    5: {5: 4},
    6: {6: 2, 3: 4, 2: 6},
    7: {7: 3},
    8: {8: 2, 4: 2, 2: 4},
}

MAX_SYMPLECTIC_ORDER = 8

PURELY_NONSYMPLECTIC_ORDERS = frozenset(
    set(range(2, 29)) - {23} | {30, 32, 33, 34, 36, 40, 44, 48, 50, 54, 66}
)

# (n, m) -> possible numbers of fixed points of sigma
MIXED_FIXED_POINT_OPTIONS = {
    (2, 2): (0, 2, 4, 6, 8),
    (3, 2): (0, 2, 4, 6),
}

# eigenvalue multiplicities on H^2(X, Q) of a fixed-point free action with N = 2*2
FIXED_POINT_FREE_EIGENSPACES = {(2, 2): {1: 6, -1: 8}}
FIXED_POINT_FREE_MIN_PICARD_RANK = {(2, 2): 14}

# mixed orders (n, m) ruled out outright
EXCLUDED_MIXED = {(8, 2): "m = 2 forces n != 8"}

# symplectic parts that never occur as the saturation of a mixed action with m = 2
UNSATURATED_MIXED = frozenset({(5, 2), (6, 2), (7, 2)})

# (chi(sigma), chi(sigma^2), chi(sigma^4)) for the three types of the group (8, 1)
GAP_8_1_TRACE_ROWS = ((0, 4, 8), (2, 4, 8), (4, 4, 8))

# the distinguished order-ten generator of the group (720, 764)
GAP_720_764_ORDER_TEN = {"N": 10, "n": 5, "m": 2, "chi": 0}
