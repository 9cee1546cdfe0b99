"""
Exact rational linear algebra on small dense matrices.

Matrices are sequences of rows; every routine copies its input into
Fraction rows first, so callers may pass ints, Fractions or tuples.
"""
from fractions import Fraction
from functools import lru_cache
from typing import List, Sequence, Tuple

Matrix = List[List[Fraction]]


def to_fraction_rows(rows: Sequence[Sequence]) -> Matrix:
    return [[Fraction(value) for value in row] for row in rows]


def row_echelon(rows: Sequence[Sequence]) -> Tuple[Matrix, int, int]:
    """
    Reduce a copy of the matrix to row echelon form with partial pivoting

    Returns:
        (reduced rows, rank, number of row swaps)
    """
    m = to_fraction_rows(rows)
    n_rows = len(m)
    if n_rows == 0:
        return m, 0, 0
    n_cols = len(m[0])
    swaps = 0
    piv_r = 0
    for piv_c in range(n_cols):
        for i_row in range(piv_r, n_rows):
            if m[i_row][piv_c] != 0:
                break
        else:
            continue
        if i_row != piv_r:
            m[piv_r], m[i_row] = m[i_row], m[piv_r]
            swaps += 1
        fp = m[piv_r][piv_c]
        for r in range(piv_r + 1, n_rows):
            fr = m[r][piv_c]
            if fr == 0:
                continue
            frp = fr / fp
            for c in range(piv_c, n_cols):
                m[r][c] -= m[piv_r][c] * frp
        piv_r += 1
        if piv_r == n_rows:
            break
    return m, piv_r, swaps


def determinant(rows: Sequence[Sequence]) -> Fraction:
    n = len(rows)
    if n == 0:
        return Fraction(1)
    if any(len(row) != n for row in rows):
        raise ValueError("determinant needs a square matrix")
    m, rank, swaps = row_echelon(rows)
    if rank < n:
        return Fraction(0)
    det = Fraction(-1 if swaps % 2 else 1)
    for i in range(n):
        det *= m[i][i]
    return det


def rank(rows: Sequence[Sequence]) -> int:
    if not rows:
        return 0
    return row_echelon(rows)[1]


def leading_minors(rows: Sequence[Sequence]) -> List[Fraction]:
    n = len(rows)
    return [determinant([row[:k] for row in rows[:k]]) for k in range(1, n + 1)]


@lru_cache(maxsize=8192)
def is_positive_definite(entries: Tuple[Tuple[Fraction, ...], ...]) -> bool:
    """Sylvester's criterion on a symmetric matrix"""
    return all(minor > 0 for minor in leading_minors(entries))


def ldl_decomposition(rows: Sequence[Sequence]) -> Tuple[List[Fraction], Matrix]:
    """
    Exact G = L D L^t for a symmetric positive definite G

    Returns:
        (D as a list of pivots, L unit lower triangular)
    """
    g = to_fraction_rows(rows)
    n = len(g)
    lower = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    pivots: List[Fraction] = []
    for j in range(n):
        d_j = g[j][j] - sum(lower[j][k] ** 2 * pivots[k] for k in range(j))
        if d_j <= 0:
            raise ValueError(f"matrix is not positive definite (pivot {j + 1} is {d_j})")
        pivots.append(d_j)
        for i in range(j + 1, n):
            s = g[i][j] - sum(lower[i][k] * lower[j][k] * pivots[k] for k in range(j))
            lower[i][j] = s / d_j
    return pivots, lower


def inverse(rows: Sequence[Sequence]) -> Matrix:
    """Gauss-Jordan inverse; raises ValueError on a singular matrix"""
    x = to_fraction_rows(rows)
    n = len(x)
    y = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]

    # downward elimination: make lower triangle zero and main diagonal 1.
    for i in range(n):
        for j in range(i, n):
            if x[j][i] != 0:
                if i != j:
                    x[i], x[j] = x[j], x[i]
                    y[i], y[j] = y[j], y[i]
                break
        else:
            raise ValueError("matrix is not invertible")

        pivot = x[i][i]
        x[i] = [value / pivot for value in x[i]]
        y[i] = [value / pivot for value in y[i]]

        for j in range(i + 1, n):
            factor = x[j][i]
            if factor == 0:
                continue
            x[j] = [xj - factor * xi for xj, xi in zip(x[j], x[i])]
            y[j] = [yj - factor * yi for yj, yi in zip(y[j], y[i])]

    # upward elimination: zero the upper triangle.
    for j in range(n - 2, -1, -1):
        for i in range(j + 1, n):
            factor = x[j][i]
            if factor == 0:
                continue
            x[j] = [xj - factor * xi for xj, xi in zip(x[j], x[i])]
            y[j] = [yj - factor * yi for yj, yi in zip(y[j], y[i])]

    return y
