"""Exact integer lattice helpers: gcd chains, Hermite forms, kernels, saturation.

Matrices are lists of row vectors (lists of ints).  All reductions are
unimodular row operations, so spans and kernels are exact over the integers.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

IntVec = tuple[int, ...]


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with a*x + b*y = g = gcd(a, b) >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def gcd_list(values: Sequence[int]) -> int:
    g = 0
    for v in values:
        g = gcd(g, v)
    return g


def hnf_with_transform(
    rows: Sequence[Sequence[int]], width: int | None = None
) -> tuple[list[list[int]], list[list[int]]]:
    """Row Hermite form: returns (H, U) with U unimodular and U @ rows = H.

    H is in echelon shape with positive pivots and entries above each pivot
    reduced into [0, pivot).  Zero rows of H sit at the bottom.
    """
    a = [list(r) for r in rows]
    m = len(a)
    n = width if width is not None else (len(a[0]) if a else 0)
    for r in a:
        if len(r) != n:
            raise ValueError("ragged matrix")
    u = [[1 if i == j else 0 for j in range(m)] for i in range(m)]

    def row_sub(i: int, j: int, q: int) -> None:
        if q:
            ai, aj = a[i], a[j]
            for k in range(n):
                ai[k] -= q * aj[k]
            ui, uj = u[i], u[j]
            for k in range(m):
                ui[k] -= q * uj[k]

    def row_swap(i: int, j: int) -> None:
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def row_negate(i: int) -> None:
        a[i] = [-x for x in a[i]]
        u[i] = [-x for x in u[i]]

    r = 0
    for c in range(n):
        while True:
            nz = [i for i in range(r, m) if a[i][c]]
            if len(nz) <= 1:
                break
            i0 = min(nz, key=lambda i: abs(a[i][c]))
            for i in nz:
                if i != i0:
                    row_sub(i, i0, a[i][c] // a[i0][c])
        nz = [i for i in range(r, m) if a[i][c]]
        if not nz:
            continue
        if nz[0] != r:
            row_swap(r, nz[0])
        if a[r][c] < 0:
            row_negate(r)
        for i in range(r):
            row_sub(i, r, a[i][c] // a[r][c])
        r += 1
    return a, u


def lattice_basis(rows: Sequence[Sequence[int]]) -> list[IntVec]:
    """Basis of the integer row span, as the nonzero Hermite rows."""
    h, _ = hnf_with_transform(rows)
    return [tuple(r) for r in h if any(r)]


def left_kernel(rows: Sequence[Sequence[int]], width: int | None = None) -> list[IntVec]:
    """Basis of {x in Z^m : x @ rows = 0}."""
    h, u = hnf_with_transform(rows, width)
    return [tuple(u[i]) for i in range(len(h)) if not any(h[i])]


def right_kernel(rows: Sequence[Sequence[int]], width: int | None = None) -> list[IntVec]:
    """Basis of {x in Z^n : rows @ x = 0}."""
    n = width if width is not None else (len(rows[0]) if rows else 0)
    t = [[rows[i][j] for i in range(len(rows))] for j in range(n)]
    return left_kernel(t, width=len(rows))


def saturate(rows: Sequence[Sequence[int]], width: int) -> list[IntVec]:
    """Basis of (R-span of rows) intersected with Z^width."""
    ker = right_kernel(rows, width)
    if not ker:
        return [tuple(1 if i == j else 0 for j in range(width)) for i in range(width)]
    return right_kernel(ker, width)


def solve_integer(
    basis_rows: Sequence[Sequence[int]], target: Sequence[int]
) -> IntVec | None:
    """Integer coefficients c with c @ basis_rows = target, or None.

    Exact rational elimination; returns None when the system is inconsistent
    or the unique rational solution is not integral.  The rows must be
    linearly independent.
    """
    m = len(basis_rows)
    n = len(target)
    cols = [[Fraction(basis_rows[i][j]) for i in range(m)] + [Fraction(target[j])] for j in range(n)]
    pivot_of_row: list[int | None] = []
    rank = 0
    for col in range(m):
        piv = next((r for r in range(rank, n) if cols[r][col]), None)
        if piv is None:
            raise ValueError("basis rows are dependent")
        cols[rank], cols[piv] = cols[piv], cols[rank]
        pivot = cols[rank][col]
        for r in range(n):
            if r != rank and cols[r][col]:
                f = cols[r][col] / pivot
                for k in range(col, m + 1):
                    cols[r][k] -= f * cols[rank][k]
        pivot_of_row.append(col)
        rank += 1
    out = [Fraction(0)] * m
    for r in range(rank):
        col = pivot_of_row[r]
        out[col] = cols[r][m] / cols[r][col]
    for r in range(rank, n):
        if cols[r][m]:
            return None
    if any(v.denominator != 1 for v in out):
        return None
    return tuple(int(v) for v in out)
