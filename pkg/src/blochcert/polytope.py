"""Exact integral polytopes: faces, pyramids, cross-polytopes, Minkowski sums.

An IntegralPolytope is the convex hull of finitely many integer points in
Z^r.  Lower-dimensional hulls are charted onto a saturated basis of their
direction lattice, so facet data and lattice heights stay exact.  Exposed
faces use the minimizing convention: face_exposed(P, w) collects the
vertices with smallest w . v.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from . import hull as _hull
from .intlat import gcd_list, hnf_with_transform, saturate, solve_integer

Point = tuple[int, ...]


def affine_dim(points: Iterable[Sequence[int]]) -> int:
    """Affine dimension of a point set (-1 for empty, 0 for a single point)."""
    pts = [tuple(p) for p in points]
    if not pts:
        return -1
    base = pts[0]
    diffs = [[p[k] - base[k] for k in range(len(base))] for p in pts[1:]]
    if not diffs:
        return 0
    h, _ = hnf_with_transform(diffs)
    return sum(1 for row in h if any(row))


def _rational_solve(rows: Sequence[Sequence[int]], rhs: Sequence[int]) -> list[Fraction]:
    """One rational solution w of rows @ w = rhs (full row rank, free vars 0)."""
    m = len(rows)
    n = len(rows[0]) if rows else len(rhs)
    a = [[Fraction(rows[i][j]) for j in range(n)] + [Fraction(rhs[i])] for i in range(m)]
    pivots: list[int] = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        for i in range(m):
            if i != r and a[i][c]:
                f = a[i][c] / a[r][c]
                for k in range(c, n + 1):
                    a[i][k] -= f * a[r][k]
        pivots.append(c)
        r += 1
        if r == m:
            break
    if r < m:
        raise ValueError("rows are rank deficient")
    w = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        w[c] = a[i][n] / a[i][c]
    return w


class IntegralPolytope:
    """Convex hull of integer points with exact face and lattice structure."""

    __slots__ = (
        "points",
        "ambient_dim",
        "dim",
        "_origin",
        "_basis",
        "_chart_hull",
        "_vertices",
        "_facets",
    )

    def __init__(self, points: Iterable[Sequence[int]]):
        pts = sorted({tuple(int(x) for x in p) for p in points})
        if not pts:
            raise ValueError("a polytope needs at least one point")
        r = len(pts[0])
        if any(len(p) != r for p in pts):
            raise ValueError("mixed ambient dimensions")
        self.points: tuple[Point, ...] = tuple(pts)
        self.ambient_dim = r
        self._origin = pts[0]
        diffs = [[p[k] - self._origin[k] for k in range(r)] for p in pts[1:]]
        self._basis = saturate(diffs, r) if diffs else []
        nonzero = [b for b in self._basis if any(b)]
        self._basis = nonzero
        self.dim = len(self._basis)
        if diffs:
            h, _ = hnf_with_transform(diffs)
            rank = sum(1 for row in h if any(row))
            if rank != self.dim:
                raise AssertionError("saturation rank mismatch")
        if self.dim == 0:
            self._chart_hull = None
        else:
            chart_pts = [self._to_chart(p) for p in pts]
            self._chart_hull = _hull.convex_hull(chart_pts)
        self._vertices: tuple[Point, ...] | None = None
        self._facets: tuple[Face, ...] | None = None

    # -- charts ---------------------------------------------------------------

    def _to_chart(self, p: Sequence[int]) -> Point:
        d = tuple(p[k] - self._origin[k] for k in range(self.ambient_dim))
        c = solve_integer(self._basis, d)
        if c is None:
            raise ValueError("point outside the affine hull lattice")
        return c

    def _from_chart(self, c: Sequence[int]) -> Point:
        return tuple(
            self._origin[k] + sum(ci * bi[k] for ci, bi in zip(c, self._basis))
            for k in range(self.ambient_dim)
        )

    def _ambient_witness(self, chart_normal: Sequence[int]) -> Point:
        """Integer ambient vector whose restriction exposes the same face."""
        if self.dim == self.ambient_dim:
            return tuple(chart_normal)
        w = _rational_solve(self._basis, list(chart_normal))
        scale = 1
        for x in w:
            scale = scale * x.denominator // gcd(scale, x.denominator)
        return tuple(int(x * scale) for x in w)

    # -- vertices and faces -----------------------------------------------------

    def vertices(self) -> tuple[Point, ...]:
        if self._vertices is None:
            if self._chart_hull is None:
                self._vertices = (self._origin,)
            else:
                self._vertices = tuple(
                    sorted(self._from_chart(v) for v in self._chart_hull.vertices())
                )
        return self._vertices

    def is_simplex(self) -> bool:
        return len(self.vertices()) == self.dim + 1

    def face_exposed(self, w: Sequence[int]) -> Face:
        if len(w) != self.ambient_dim:
            raise ValueError("exposing vector has wrong length")
        verts = self.vertices()
        values = [sum(x * y for x, y in zip(v, w)) for v in verts]
        h = min(values)
        sub = tuple(v for v, val in zip(verts, values) if val == h)
        return Face(self, sub, tuple(int(x) for x in w), affine_dim(sub))

    def facets(self) -> tuple[Face, ...]:
        if self._facets is None:
            out = []
            if self._chart_hull is not None:
                for f in self._chart_hull.facets:
                    w = self._ambient_witness(f.normal)
                    verts = tuple(
                        sorted(
                            self._from_chart(self._chart_hull.points[i])
                            for i in f.vertex_ids
                        )
                    )
                    out.append(Face(self, verts, w, affine_dim(verts)))
            self._facets = tuple(out)
        return self._facets

    def contains_point(self, p: Sequence[int]) -> bool:
        pt = tuple(int(x) for x in p)
        if len(pt) != self.ambient_dim:
            raise ValueError("point has wrong dimension")
        d = [pt[k] - self._origin[k] for k in range(self.ambient_dim)]
        if self.dim == 0:
            return not any(d)
        try:
            # Integral points of the affine hull always chart integrally
            # because the basis is saturated.
            c = self._to_chart(pt)
        except ValueError:
            return False
        assert self._chart_hull is not None
        for f in self._chart_hull.facets:
            if sum(n * x for n, x in zip(f.normal, c)) > f.offset:
                return False
        return True

    def contains(self, other: IntegralPolytope) -> bool:
        return all(self.contains_point(v) for v in other.vertices())

    # -- structure tests -----------------------------------------------------------

    def pyramid_candidates(self) -> list[tuple[Point, Face]]:
        """All (apex, base facet) pairs; empty when P is not a pyramid."""
        if self.dim < 1:
            return []
        verts = set(self.vertices())
        out = []
        for f in self.facets():
            others = verts - set(f.vertices)
            if len(others) == 1:
                out.append((next(iter(others)), f))
        return out

    def pyramid_height(self, apex: Sequence[int]) -> int:
        """Lattice distance from the apex to its base facet."""
        apex_t = tuple(int(x) for x in apex)
        for cand_apex, base in self.pyramid_candidates():
            if cand_apex == apex_t:
                assert self._chart_hull is not None
                for f in self._chart_hull.facets:
                    if tuple(
                        sorted(self._from_chart(self._chart_hull.points[i]) for i in f.vertex_ids)
                    ) == base.vertices:
                        c = self._to_chart(apex_t)
                        return abs(sum(n * x for n, x in zip(f.normal, c)) - f.offset)
        raise ValueError("not an apex of this polytope")

    def cross_polytope_dilation(self) -> tuple[int, ...] | None:
        """Dilation vector A when vertices are {center +- a_i e_i}, else None."""
        verts = self.vertices()
        r = self.ambient_dim
        if len(verts) != 2 * r or self.dim != r:
            return None
        center = [Fraction(sum(v[k] for v in verts), len(verts)) for k in range(r)]
        if any(c.denominator != 1 for c in center):
            return None
        c = [int(x) for x in center]
        a = [0] * r
        for v in verts:
            off = [v[k] - c[k] for k in range(r)]
            axes = [k for k in range(r) if off[k]]
            if len(axes) != 1:
                return None
            k = axes[0]
            if a[k] == 0:
                a[k] = abs(off[k])
            elif a[k] != abs(off[k]):
                return None
        if any(x <= 0 for x in a):
            return None
        want = set()
        for k in range(r):
            for s in (1, -1):
                want.add(tuple(c[j] + (s * a[k] if j == k else 0) for j in range(r)))
        return tuple(a) if set(verts) == want else None

    # -- constructions ------------------------------------------------------------

    def translate(self, a: Sequence[int]) -> IntegralPolytope:
        return IntegralPolytope([tuple(x + y for x, y in zip(p, a)) for p in self.points])

    def scale_coords(self, factors: Sequence[int]) -> IntegralPolytope:
        if len(factors) != self.ambient_dim:
            raise ValueError("factor vector has wrong length")
        return IntegralPolytope(
            [tuple(x * f for x, f in zip(p, factors)) for p in self.points]
        )

    def minkowski_sum(self, other: IntegralPolytope) -> IntegralPolytope:
        if self.ambient_dim != other.ambient_dim:
            raise ValueError("ambient dimension mismatch")
        return IntegralPolytope(
            [
                tuple(x + y for x, y in zip(p, q))
                for p in self.vertices()
                for q in other.vertices()
            ]
        )

    # -- comparisons ---------------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, IntegralPolytope)
            and self.ambient_dim == other.ambient_dim
            and self.vertices() == other.vertices()
        )

    def __hash__(self) -> int:
        return hash((self.ambient_dim, self.vertices()))

    def __repr__(self) -> str:
        return f"IntegralPolytope(dim={self.dim}, vertices={list(self.vertices())})"

    # -- export ----------------------------------------------------------------------

    def to_json_dict(self) -> dict:
        verts = list(self.vertices())
        index = {v: i for i, v in enumerate(verts)}
        return {
            "vertices": [list(v) for v in verts],
            "facets": [
                {
                    "normal": list(f.w),
                    "vertex_ids": [index[v] for v in f.vertices],
                }
                for f in self.facets()
            ],
        }


@dataclass(frozen=True)
class Face:
    """A face of a polytope: its vertices, one exposing witness, and its dimension."""

    parent: IntegralPolytope = field(repr=False, compare=False)
    vertices: tuple[Point, ...]
    w: tuple[int, ...]
    dim: int

    def polytope(self) -> IntegralPolytope:
        return IntegralPolytope(self.vertices)

    def contains_vertex(self, v: Sequence[int]) -> bool:
        return tuple(v) in self.vertices


def hull(points: Iterable[Sequence[int]]) -> IntegralPolytope:
    """Convex hull of a nonempty finite integer point set."""
    return IntegralPolytope(points)


def face_intersection_dim(f1: Face, f2: Face) -> int:
    """Affine dimension of the intersection face; -1 when disjoint."""
    if f1.parent is not f2.parent:
        raise ValueError("faces belong to different polytopes")
    common = sorted(set(f1.vertices) & set(f2.vertices))
    return affine_dim(common)


def strong_chain_exists(
    polytope_: IntegralPolytope,
    certified_faces: Sequence[Face],
    a: Sequence[int],
    b: Sequence[int],
) -> list[Face] | None:
    """Chain of certified faces from one containing a to one containing b.

    Consecutive faces must intersect in dimension >= 1; returns a witness
    chain or None.
    """
    av, bv = tuple(a), tuple(b)
    faces = list(certified_faces)
    starts = [i for i, f in enumerate(faces) if f.contains_vertex(av)]
    if not starts:
        return None
    prev: dict[int, int | None] = {i: None for i in starts}
    queue = list(starts)
    while queue:
        i = queue.pop(0)
        if faces[i].contains_vertex(bv):
            chain = []
            cur: int | None = i
            while cur is not None:
                chain.append(faces[cur])
                cur = prev[cur]
            return chain[::-1]
        for j, g in enumerate(faces):
            if j not in prev and face_intersection_dim(faces[i], g) >= 1:
                prev[j] = i
                queue.append(j)
    return None


def minkowski_sum(p: IntegralPolytope, k: IntegralPolytope) -> IntegralPolytope:
    return p.minkowski_sum(k)


def homothety_of(
    k: IntegralPolytope, p: IntegralPolytope
) -> tuple[Fraction, tuple[Fraction | int, ...]] | None:
    """(r, a) with k = r*p + a exactly, r >= 0 rational, or None."""
    if k.ambient_dim != p.ambient_dim:
        return None
    kv = k.vertices()
    pv = p.vertices()
    if len(kv) == 1:
        return Fraction(0), kv[0]
    if len(pv) == 1:
        return None
    r_dim = k.ambient_dim
    widths_k = [max(v[i] for v in kv) - min(v[i] for v in kv) for i in range(r_dim)]
    widths_p = [max(v[i] for v in pv) - min(v[i] for v in pv) for i in range(r_dim)]
    ratio: Fraction | None = None
    for wk, wp in zip(widths_k, widths_p):
        if wp:
            ratio = Fraction(wk, wp)
            break
    if ratio is None or ratio <= 0:
        return None
    if any(Fraction(wk) != ratio * wp for wk, wp in zip(widths_k, widths_p)):
        return None
    a = tuple(
        Fraction(min(v[i] for v in kv)) - ratio * min(v[i] for v in pv)
        for i in range(r_dim)
    )
    mapped = sorted(
        tuple(ratio * x + ai for x, ai in zip(v, a)) for v in pv
    )
    if mapped != sorted(tuple(Fraction(x) for x in v) for v in kv):
        return None
    a_out = tuple(int(x) if x.denominator == 1 else x for x in a)
    return ratio, a_out


def is_pyramid(p: IntegralPolytope) -> list[tuple[Point, Face]]:
    return p.pyramid_candidates()


def pyramid_height(p: IntegralPolytope, apex: Sequence[int]) -> int:
    return p.pyramid_height(apex)


def is_cross_polytope_dilation(p: IntegralPolytope) -> tuple[int, ...] | None:
    return p.cross_polytope_dilation()


def contracted_dilation(p: IntegralPolytope, q: Sequence[int]) -> IntegralPolytope:
    """Coordinate map (a, a_last) -> ((|Q|/q_i) a_i, |Q| a_last) on points."""
    qv = [int(x) for x in q]
    if len(qv) + 1 != p.ambient_dim:
        raise ValueError("period vector does not match polytope dimension")
    if any(x <= 0 for x in qv):
        raise ValueError("period entries must be positive")
    total = math.prod(qv)
    factors = [total // qi for qi in qv] + [total]
    if any(total % qi for qi in qv):
        raise ValueError("period entries must divide their product")
    return p.scale_coords(factors)


def exposing_vector_map(w: Sequence[int], q: Sequence[int]) -> tuple[int, ...]:
    """Base exposing vector w to the expanded one: (q_i w_i, ..., w_last)."""
    if len(w) != len(q) + 1:
        raise ValueError("weight vector does not match period vector")
    return tuple(int(wi) * int(qi) for wi, qi in zip(w[:-1], q)) + (int(w[-1]),)


def off_export(p: IntegralPolytope, coords: Sequence[int] = (0, 1, 2)) -> str:
    """OFF text of the hull of a 3-coordinate projection, for plotting.

    Coordinates beyond the ambient dimension read as zero, so low-dimensional
    polytopes embed in the coordinate planes.
    """
    if len(coords) != 3:
        raise ValueError("need exactly three coordinates")
    proj = [tuple(pt[i] if i < len(pt) else 0 for i in coords) for pt in p.points]
    q = IntegralPolytope(proj)
    verts = list(q.vertices())
    index = {v: i for i, v in enumerate(verts)}
    faces: list[list[int]] = []
    if q.dim == 3:
        for f in q.facets():
            faces.append([index[v] for v in _order_cycle(f.vertices, f.w)])
    elif q.dim == 2:
        w = _plane_normal_3d(verts)
        faces.append([index[v] for v in _order_cycle(tuple(verts), w)])
    lines = ["OFF", f"{len(verts)} {len(faces)} 0"]
    lines += [" ".join(str(x) for x in v) for v in verts]
    lines += [str(len(f)) + " " + " ".join(str(i) for i in f) for f in faces]
    return "\n".join(lines) + "\n"


def _plane_normal_3d(verts: Sequence[Point]) -> tuple[int, int, int]:
    base = verts[0]
    d = [tuple(v[k] - base[k] for k in range(3)) for v in verts[1:]]
    for u, v in itertools.combinations(d, 2):
        n = (
            u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0],
        )
        if any(n):
            g = gcd_list(n)
            return tuple(x // g for x in n)  # type: ignore[return-value]
    raise ValueError("degenerate polygon")


def _order_cycle(verts: tuple[Point, ...], normal: Sequence[int]) -> list[Point]:
    """Vertices of a planar face in cyclic order (float angles, plotting only)."""
    n = [float(x) for x in normal]
    nn = math.sqrt(sum(x * x for x in n)) or 1.0
    n = [x / nn for x in n]
    c = [sum(v[k] for v in verts) / len(verts) for k in range(len(verts[0]))]
    ref = None
    for v in verts:
        d = [v[k] - c[k] for k in range(len(c))]
        d = [d[k] - n[k] * sum(di * ni for di, ni in zip(d, n)) for k in range(len(d))]
        if any(abs(x) > 1e-9 for x in d):
            ref = d
            break
    if ref is None:
        return list(verts)
    rl = math.sqrt(sum(x * x for x in ref))
    e1 = [x / rl for x in ref]
    e2 = [
        n[1] * e1[2] - n[2] * e1[1],
        n[2] * e1[0] - n[0] * e1[2],
        n[0] * e1[1] - n[1] * e1[0],
    ]

    def angle(v: Point) -> float:
        d = [v[k] - c[k] for k in range(len(c))]
        return math.atan2(
            sum(di * yi for di, yi in zip(d, e2)),
            sum(di * xi for di, xi in zip(d, e1)),
        )

    return sorted(verts, key=angle)
