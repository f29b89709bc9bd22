"""Periodic graphs, labelings, builders, and period-lattice expansion."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from blochcert.graphs import (
    BUILDERS,
    Labeling,
    PeriodicGraph,
    build_named,
    cells,
    disjoint_union,
    expanded_name,
    potential_is_periodic_mod,
    q_expand,
    split_expanded_name,
    validate,
)

from oracles import random_fraction


def test_builders_validate_cleanly() -> None:
    cases = [("square_lattice", 1), ("square_lattice", 2), ("square_lattice", 3),
             ("honeycomb_diamond", 1), ("honeycomb_diamond", 2), ("honeycomb_diamond", 3),
             ("dice", 2), ("dense_2d", 2), ("dense_3d", 3)]
    for name, d in cases:
        g, c = build_named(name, d)
        assert validate(g, c) == []
        assert g.d == d


def test_build_named_rejects_unknown_and_bad_d() -> None:
    with pytest.raises(ValueError):
        build_named("nonexistent", 2)
    with pytest.raises(ValueError):
        build_named("dense_2d", 3)
    with pytest.raises(ValueError):
        build_named("dense_3d", 2)
    assert set(BUILDERS) == {
        "square_lattice", "honeycomb_diamond", "dice", "dense_2d", "dense_3d",
    }


def test_expanded_name_round_trip() -> None:
    assert expanded_name((0, 2), "u1") == "0,2+u1"
    k, v = split_expanded_name("0,2+u1")
    assert k == (0, 2) and v == "u1"
    k, v = split_expanded_name(expanded_name((3,), "a+b"))
    assert k == (3,) and v == "a+b"


def test_cells_enumerates_the_fundamental_box() -> None:
    assert sorted(cells((2, 3))) == [
        (i, j) for i in range(2) for j in range(3)
    ]


def test_q_expand_structure_and_carries() -> None:
    g, c = build_named("square_lattice", 1)
    Q = (3,)
    vals = {expanded_name((k,), "u"): Fraction(k) for k in range(3)}
    qe = q_expand(g, c, Q, vals)
    assert qe.size() == 3
    eg = qe.expanded
    offsets = {}
    for (u, v, a) in eg.edges:
        offsets[(u, v)] = a
    crossing = [a for a in offsets.values() if any(a)]
    assert len(crossing) == 1 and crossing[0] in ((1,), (-1,))
    internal = [a for a in offsets.values() if not any(a)]
    assert len(internal) == 2


def test_q_expand_requires_full_potential() -> None:
    g, c = build_named("square_lattice", 1)
    with pytest.raises(Exception):
        q_expand(g, c, (2,), {expanded_name((0,), "u"): 1})


def test_potential_periodicity_detection() -> None:
    g, c = build_named("honeycomb_diamond", 2)
    Q = (2, 2)
    rng = random.Random(501)
    base = {v: random_fraction(rng) for v in g.vertices}
    per = {expanded_name(k, v): base[v] for k in cells(Q) for v in g.vertices}
    qe = q_expand(g, c, Q, per)
    assert potential_is_periodic_mod(qe, (1, 1))
    assert potential_is_periodic_mod(qe, (2, 2))
    rough = dict(per)
    rough[expanded_name((1, 1), "u")] = Fraction(99)
    qe2 = q_expand(g, c, Q, rough)
    assert not potential_is_periodic_mod(qe2, (1, 1))
    assert potential_is_periodic_mod(qe2, (2, 2))


def test_sublattice_periodicity() -> None:
    g, c = build_named("square_lattice", 2)
    Q = (4, 1)
    vals = {}
    for k in cells(Q):
        vals[expanded_name(k, "u")] = Fraction(1 if k[0] % 2 == 0 else 2)
    qe = q_expand(g, c, Q, vals)
    assert not potential_is_periodic_mod(qe, (1, 1))
    assert potential_is_periodic_mod(qe, (2, 1))


def test_disjoint_union_keeps_components() -> None:
    g1 = PeriodicGraph.build(2, ["w"], [])
    c1 = Labeling.build({"w": 3}, {})
    g2, c2 = build_named("honeycomb_diamond", 2)
    gu, cu = disjoint_union(g1, c1, g2, c2)
    assert set(gu.vertices) == {"w", "u", "v"}
    assert len(gu.edges) == len(g2.edges)
    assert validate(gu, cu) == []


def test_validate_flags_broken_input() -> None:
    g = PeriodicGraph.build(1, ["a"], [("a", "b", (0,))])
    c = Labeling.build({"a": 0}, {("a", "b", (0,)): 1})
    assert validate(g, c) != []
