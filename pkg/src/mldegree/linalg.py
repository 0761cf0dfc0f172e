"""Gauss-Jordan elimination over the rationals for small dense matrices."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

FracMatrix = list[list[Fraction]]


def as_fractions(mat) -> FracMatrix:
    return [[x if isinstance(x, Fraction) else Fraction(x) for x in row] for row in mat]


def frac_det(mat: Sequence[Sequence]) -> Fraction:
    a = as_fractions(mat)
    n = len(a)
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        p = a[col][col]
        det *= p
        for r in range(col + 1, n):
            f = a[r][col] / p
            if f:
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return det


def frac_inverse(mat: Sequence[Sequence]) -> FracMatrix:
    a = as_fractions(mat)
    n = len(a)
    aug = [row + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("matrix is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def frac_matmul(a: Sequence[Sequence[Fraction]], b: Sequence[Sequence[Fraction]]) -> FracMatrix:
    bt = list(zip(*b))
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt] for row in a]


def submatrix(mat: Sequence[Sequence], rows: Sequence[int], cols: Sequence[int]) -> FracMatrix:
    return [[mat[i][j] for j in cols] for i in rows]
