"""
Smith normal form over the integers and the integer linear algebra built on it.

The elimination runs on plain Python ints; sympy matrices are accepted and
returned at the public boundary.
"""

import logging
from typing import Sequence

from sympy import ImmutableMatrix, MatrixBase

logger = logging.getLogger(__name__)

IntRows = list[list[int]]


def as_int_rows(matrix: MatrixBase | Sequence[Sequence[int]]) -> IntRows:
    """Copy a sympy matrix or nested sequence into a list of int rows."""
    if isinstance(matrix, MatrixBase):
        return [[int(matrix[i, j]) for j in range(matrix.cols)] for i in range(matrix.rows)]
    rows = [[int(x) for x in row] for row in matrix]
    if rows and any(len(row) != len(rows[0]) for row in rows):
        raise ValueError("ragged matrix")
    return rows


def _identity(n: int) -> IntRows:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _swap_rows(a: IntRows, i: int, j: int) -> None:
    a[i], a[j] = a[j], a[i]


def _swap_cols(a: IntRows, i: int, j: int) -> None:
    for row in a:
        row[i], row[j] = row[j], row[i]


def _add_row(a: IntRows, target: int, source: int, factor: int) -> None:
    """row[target] += factor * row[source]"""
    src = a[source]
    a[target] = [x + factor * y for x, y in zip(a[target], src)]


def _add_col(a: IntRows, target: int, source: int, factor: int) -> None:
    for row in a:
        row[target] += factor * row[source]


def smith_normal_form_rows(rows: IntRows) -> tuple[IntRows, IntRows, IntRows]:
    """
    Smith normal form of an integer matrix given as rows.

    Returns (D, U, V) with U * M * V = D, D diagonal with d_i | d_(i+1) and
    nonnegative entries, U and V unimodular.
    """
    a = [list(row) for row in rows]
    m = len(a)
    n = len(a[0]) if m else 0
    left = _identity(m)
    right = _identity(n)

    for t in range(min(m, n)):
        pivot = None
        for i in range(t, m):
            for j in range(t, n):
                if a[i][j] and (pivot is None or abs(a[i][j]) < abs(a[pivot[0]][pivot[1]])):
                    pivot = (i, j)
        if pivot is None:
            break
        _swap_rows(a, t, pivot[0])
        _swap_rows(left, t, pivot[0])
        _swap_cols(a, t, pivot[1])
        _swap_cols(right, t, pivot[1])

        while True:
            clean = True
            p = a[t][t]
            for i in range(t + 1, m):
                if a[i][t]:
                    q = a[i][t] // p
                    _add_row(a, i, t, -q)
                    _add_row(left, i, t, -q)
                    if a[i][t]:
                        clean = False
            for j in range(t + 1, n):
                if a[t][j]:
                    q = a[t][j] // p
                    _add_col(a, j, t, -q)
                    _add_col(right, j, t, -q)
                    if a[t][j]:
                        clean = False
            if not clean:
                # a remainder smaller than the pivot is left on the edge
                best = (t, t)
                for i in range(t + 1, m):
                    if a[i][t] and abs(a[i][t]) < abs(a[best[0]][best[1]]):
                        best = (i, t)
                for j in range(t + 1, n):
                    if a[t][j] and abs(a[t][j]) < abs(a[best[0]][best[1]]):
                        best = (t, j)
                if best[0] != t:
                    _swap_rows(a, t, best[0])
                    _swap_rows(left, t, best[0])
                elif best[1] != t:
                    _swap_cols(a, t, best[1])
                    _swap_cols(right, t, best[1])
                continue

            offender = next(
                (
                    i
                    for i in range(t + 1, m)
                    for j in range(t + 1, n)
                    if a[i][j] % p
                ),
                None,
            )
            if offender is None:
                break
            _add_row(a, t, offender, 1)
            _add_row(left, t, offender, 1)

        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            left[t] = [-x for x in left[t]]

    return a, left, right


def smith_normal_form(
    matrix: MatrixBase | Sequence[Sequence[int]],
) -> tuple[ImmutableMatrix, ImmutableMatrix, ImmutableMatrix]:
    """(D, U, V) with U * M * V = D; see smith_normal_form_rows."""
    rows = as_int_rows(matrix)
    m = len(rows)
    n = len(rows[0]) if m else (matrix.cols if isinstance(matrix, MatrixBase) else 0)
    if m == 0 or n == 0:
        return (
            ImmutableMatrix.zeros(m, n),
            ImmutableMatrix.eye(m),
            ImmutableMatrix.eye(n),
        )
    d, u, v = smith_normal_form_rows(rows)
    return ImmutableMatrix(d), ImmutableMatrix(u), ImmutableMatrix(v)


def invariant_factors(matrix: MatrixBase | Sequence[Sequence[int]]) -> list[int]:
    """Nonzero diagonal entries of the Smith form."""
    rows = as_int_rows(matrix)
    if not rows or not rows[0]:
        return []
    d, _, _ = smith_normal_form_rows(rows)
    return [d[i][i] for i in range(min(len(d), len(d[0]))) if d[i][i]]


def integer_kernel(matrix: MatrixBase | Sequence[Sequence[int]], ncols: int | None = None) -> IntRows:
    """
    Basis of the integer kernel {x in Z^n : M x = 0}, as a list of column
    vectors. The kernel is saturated: it is a primitive sublattice of Z^n.
    """
    rows = as_int_rows(matrix)
    if ncols is None:
        ncols = len(rows[0]) if rows else (matrix.cols if isinstance(matrix, MatrixBase) else 0)
    if not rows:
        return [[int(i == j) for i in range(ncols)] for j in range(ncols)]
    d, _, v = smith_normal_form_rows(rows)
    rank = sum(1 for i in range(min(len(d), ncols)) if d[i][i])
    return [[v[i][j] for i in range(ncols)] for j in range(rank, ncols)]


def solve_integer(
    matrix: MatrixBase | Sequence[Sequence[int]], rhs: Sequence[int]
) -> list[int] | None:
    """One integer solution x of M x = rhs, or None when there is none."""
    rows = as_int_rows(matrix)
    m = len(rows)
    n = len(rows[0]) if m else 0
    d, u, v = smith_normal_form_rows(rows)
    target = [sum(u[i][k] * rhs[k] for k in range(m)) for i in range(m)]
    y = [0] * n
    for i in range(m):
        di = d[i][i] if i < n else 0
        if di == 0:
            if target[i]:
                return None
            continue
        if target[i] % di:
            return None
        y[i] = target[i] // di
    return [sum(v[i][j] * y[j] for j in range(n)) for i in range(n)]
