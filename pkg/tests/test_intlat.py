"""Integer lattice routines: Hermite forms, kernels, membership."""

from __future__ import annotations

import math
import random

from blochcert.intlat import (
    gcd_list,
    hnf_with_transform,
    lattice_basis,
    left_kernel,
    right_kernel,
    saturate,
    solve_integer,
    xgcd,
)


def random_rows(rng, m: int, n: int, span: int = 4) -> list[list[int]]:
    return [[rng.randint(-span, span) for _ in range(n)] for _ in range(m)]


def test_xgcd_bezout() -> None:
    rng = random.Random(301)
    for _ in range(300):
        a, b = rng.randint(-50, 50), rng.randint(-50, 50)
        g, x, y = xgcd(a, b)
        assert g == math.gcd(a, b)
        assert a * x + b * y == g


def test_gcd_list() -> None:
    assert gcd_list([]) == 0
    assert gcd_list([0, 0]) == 0
    assert gcd_list([6, -15, 9]) == 3


def test_hnf_transform_is_unimodular_and_reproduces() -> None:
    rng = random.Random(302)
    for _ in range(100):
        rows = random_rows(rng, rng.randint(1, 4), rng.randint(1, 4))
        h, u = hnf_with_transform(rows)
        m = len(rows)
        for i in range(m):
            for j in range(len(rows[0])):
                s = sum(u[i][k] * rows[k][j] for k in range(m))
                assert s == h[i][j]


def test_lattice_basis_spans_same_lattice() -> None:
    rng = random.Random(303)
    for _ in range(100):
        rows = random_rows(rng, rng.randint(1, 4), 3)
        basis = lattice_basis(rows)
        for r in rows:
            if basis:
                assert solve_integer(basis, r) is not None
            else:
                assert not any(r)
        for b in basis:
            combo = solve_integer(lattice_basis(rows), b)
            assert combo is not None


def test_left_kernel_annihilates() -> None:
    rng = random.Random(304)
    for _ in range(100):
        rows = random_rows(rng, rng.randint(1, 4), rng.randint(1, 4))
        for y in left_kernel(rows):
            for j in range(len(rows[0])):
                assert sum(y[i] * rows[i][j] for i in range(len(rows))) == 0


def test_right_kernel_annihilates() -> None:
    rng = random.Random(305)
    for _ in range(100):
        rows = random_rows(rng, rng.randint(1, 4), rng.randint(1, 4))
        for x in right_kernel(rows):
            for i in range(len(rows)):
                assert sum(rows[i][j] * x[j] for j in range(len(x))) == 0


def test_saturate_contains_rows_and_is_saturated() -> None:
    rows = [[2, 4, 0]]
    sat = saturate(rows, 3)
    assert solve_integer(sat, (1, 2, 0)) is not None
    assert solve_integer(sat, (0, 0, 1)) is None


def test_solve_integer_detects_non_integral() -> None:
    basis = [(2, 0), (0, 3)]
    assert solve_integer(basis, (1, 0)) is None
    assert solve_integer(basis, (4, -3)) == (2, -1)
