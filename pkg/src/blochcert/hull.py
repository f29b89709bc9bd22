"""Exact convex hulls of integer point sets by incremental insertion.

Works in any dimension r >= 1 but is tuned for the small r (<= 4) and modest
point counts this package produces.  All predicates use integer arithmetic;
inserted points must affinely span R^r, lower-dimensional inputs are the
caller's job (see polytope.py, which charts them down first).

Facets carry primitive integer outward normals: the hull is the set of x
with normal . x <= offset for every facet.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

from .intlat import hnf_with_transform, right_kernel

Point = tuple[int, ...]


@dataclass(frozen=True)
class HullFacet:
    """A facet: primitive outward normal, offset, and indices of its vertices."""

    normal: Point
    offset: int
    vertex_ids: tuple[int, ...]


@dataclass(frozen=True)
class Hull:
    """Convex hull of full-dimensional integer points."""

    points: tuple[Point, ...]
    vertex_ids: tuple[int, ...]
    facets: tuple[HullFacet, ...]

    def vertices(self) -> list[Point]:
        return [self.points[i] for i in self.vertex_ids]


def _dot(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(x * y for x, y in zip(a, b))


def _rank(rows: list[list[int]]) -> int:
    h, _ = hnf_with_transform(rows)
    return sum(1 for r in h if any(r))


def _simplex_plane(points: Sequence[Point], verts: Sequence[int]) -> tuple[Point, int]:
    """Primitive normal and offset of the hyperplane through r given points."""
    base = points[verts[0]]
    diffs = [[points[v][k] - base[k] for k in range(len(base))] for v in verts[1:]]
    ker = right_kernel(diffs, width=len(base))
    if len(ker) != 1:
        raise ValueError("degenerate facet simplex")
    n = ker[0]
    g = 0
    for x in n:
        g = gcd(g, x)
    n = tuple(x // g for x in n)
    return n, _dot(n, base)


def convex_hull(raw_points: Sequence[Sequence[int]]) -> Hull:
    """Hull of points that affinely span their ambient space."""
    points: list[Point] = sorted({tuple(int(x) for x in p) for p in raw_points})
    if not points:
        raise ValueError("no points")
    r = len(points[0])
    if any(len(p) != r for p in points):
        raise ValueError("mixed dimensions")
    if r == 0:
        return Hull(tuple(points), (0,), ())
    if r == 1:
        return _hull_1d(points)

    simplex = _initial_simplex(points, r)
    interior = tuple(
        Fraction(sum(points[i][k] for i in simplex), r + 1) for k in range(r)
    )

    facets: dict[int, tuple[tuple[int, ...], Point, int]] = {}
    next_id = 0

    def add_facet(verts: tuple[int, ...]) -> None:
        nonlocal next_id
        n, c = _simplex_plane(points, verts)
        side = sum(f * x for f, x in zip(interior, n)) - c
        if side == 0:
            raise ValueError("interior point on facet plane")
        if side > 0:
            n = tuple(-x for x in n)
            c = -c
        facets[next_id] = (verts, n, c)
        next_id += 1

    for verts in itertools.combinations(simplex, r):
        add_facet(verts)

    for idx in range(len(points)):
        if idx in simplex:
            continue
        p = points[idx]
        visible = [
            fid for fid, (_, n, c) in facets.items() if _dot(n, p) > c
        ]
        if not visible:
            continue
        ridge_count: dict[frozenset[int], int] = {}
        for fid in visible:
            verts = facets[fid][0]
            for drop in verts:
                ridge = frozenset(verts) - {drop}
                ridge_count[ridge] = ridge_count.get(ridge, 0) + 1
        for fid in visible:
            del facets[fid]
        for ridge, count in ridge_count.items():
            if count == 1:
                add_facet(tuple(sorted(ridge)) + (idx,))

    merged: dict[tuple[Point, int], set[int]] = {}
    for verts, n, c in facets.values():
        merged.setdefault((n, c), set()).update(verts)

    active: dict[int, list[Point]] = {}
    for (n, _c), ids in merged.items():
        for i in ids:
            active.setdefault(i, []).append(n)
    vertex_ids = tuple(
        sorted(i for i, normals in active.items() if _rank([list(v) for v in normals]) == r)
    )
    vertex_set = set(vertex_ids)

    hull_facets = tuple(
        HullFacet(n, c, tuple(sorted(i for i in ids if i in vertex_set)))
        for (n, c), ids in sorted(merged.items())
    )

    for p in points:
        for f in hull_facets:
            if _dot(f.normal, p) > f.offset:
                raise AssertionError("hull misses a point")

    return Hull(tuple(points), vertex_ids, hull_facets)


def _hull_1d(points: list[Point]) -> Hull:
    lo = min(range(len(points)), key=lambda i: points[i][0])
    hi = max(range(len(points)), key=lambda i: points[i][0])
    if lo == hi:
        raise ValueError("points are not full-dimensional")
    facets = (
        HullFacet((-1,), -points[lo][0], (lo,)),
        HullFacet((1,), points[hi][0], (hi,)),
    )
    return Hull(tuple(points), tuple(sorted({lo, hi})), facets)


def _initial_simplex(points: list[Point], r: int) -> tuple[int, ...]:
    chosen = [0]
    diffs: list[list[int]] = []
    for i in range(1, len(points)):
        cand = [points[i][k] - points[0][k] for k in range(r)]
        if _rank(diffs + [cand]) > len(diffs):
            diffs.append(cand)
            chosen.append(i)
            if len(chosen) == r + 1:
                return tuple(chosen)
    raise ValueError("points are not full-dimensional")
