"""Independent reference implementations used to cross-check the library.

Every oracle here recomputes a quantity from first principles, using only
LaurentPoly arithmetic or plain integer work, never the code path under test.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Iterable, Sequence

from blochcert.laurent import LaurentMatrix, LaurentPoly


def det_by_permutations(m: LaurentMatrix) -> LaurentPoly:
    """Signed permutation sum; exponential, fine for size <= 5."""
    n = m.size
    total = LaurentPoly.zero(m.nz)
    for perm in itertools.permutations(range(n)):
        sign = 1
        seen = [False] * n
        for start in range(n):
            if seen[start]:
                continue
            length = 0
            k = start
            while not seen[k]:
                seen[k] = True
                k = perm[k]
                length += 1
            if length % 2 == 0:
                sign = -sign
        prod = LaurentPoly.const(m.nz, sign)
        for i in range(n):
            prod = prod * m.entry(i, perm[i])
        total = total + prod
    return total


def facial_by_filter(f: LaurentPoly, w: Sequence[int]) -> LaurentPoly:
    """Keep exactly the terms minimizing the pairing with w."""
    supp = f.support()
    if not supp:
        return LaurentPoly.zero(f.nz)
    best = min(sum(a * b for a, b in zip(w, e)) for e in supp)
    keep = {
        e: f.coeff(e)
        for e in supp
        if sum(a * b for a, b in zip(w, e)) == best
    }
    return LaurentPoly(f.nz, keep)


def _combo_gcd(points: list[tuple[int, ...]], j: int, zero_cols: list[int], bound: int) -> int:
    g = 0
    ranges = [range(-bound, bound + 1)] * len(points)
    for coeffs in itertools.product(*ranges):
        vec = [
            sum(c * p[k] for c, p in zip(coeffs, points))
            for k in range(len(points[0]))
        ]
        if any(vec[c] != 0 for c in zero_cols):
            continue
        g = math.gcd(g, abs(vec[j - 1]))
    return g


def div_by_enumeration(f: LaurentPoly, j: int, sigma: Iterable[int], bound: int = 4) -> int:
    """Gcd of j-th coordinates over integer combinations of support points
    with the other sigma coordinates forced to zero.  Combinations use
    coefficients up to the bound, enough to saturate small instances."""
    sig = sorted(set(sigma))
    pts = f.support()
    zero_cols = [i - 1 for i in sig if i != j]
    return _combo_gcd(pts, j, zero_cols, bound)


def minkowski_points(a: Iterable[Sequence[int]], b: Iterable[Sequence[int]]) -> set[tuple[int, ...]]:
    """All pairwise sums of two point sets."""
    return {
        tuple(x + y for x, y in zip(p, q))
        for p in a
        for q in b
    }


def support_min(f: LaurentPoly, w: Sequence[int]) -> int:
    return min(sum(a * b for a, b in zip(w, e)) for e in f.support())


def eig_real_symmetric(rows: list[list[complex]]) -> list[float]:
    """Reference eigenvalues of a Hermitian matrix via numpy."""
    import numpy as np

    return sorted(float(x) for x in np.linalg.eigvalsh(np.array(rows)))


def random_laurent(rng, nz: int, terms: int, span: int = 2, lmax: int = 2) -> LaurentPoly:
    """Seeded random Laurent polynomial with small rational coefficients."""
    f = LaurentPoly.zero(nz)
    for _ in range(terms):
        e = tuple(rng.randint(-span, span) for _ in range(nz)) + (rng.randint(0, lmax),)
        num = rng.choice([n for n in range(-9, 10) if n])
        f = f + LaurentPoly.term(nz, e, Fraction(num, rng.randint(1, 9)))
    return f


def random_fraction(rng) -> Fraction:
    return Fraction(rng.choice([n for n in range(-9, 10) if n]), rng.randint(1, 9))
