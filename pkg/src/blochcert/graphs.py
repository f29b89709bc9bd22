"""Z^d-periodic graphs: orbit-level model, labelings, Q-expansions, families.

A graph is stored by its vertex orbits (the fundamental domain) and a list
of orbit edges (u, v, offset) meaning an edge from u to offset + v.  The
identification (u, v, a) == (v, u, -a) is canonicalized at insertion.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .params import ParamPoly

Edge = tuple[str, str, tuple[int, ...]]

LabelLike = ParamPoly | str | int | Fraction


def as_label(value: LabelLike) -> ParamPoly:
    """Coerce a label value: rationals stay rational, other strings are symbols."""
    if isinstance(value, ParamPoly):
        return value
    if isinstance(value, (int, Fraction)):
        return ParamPoly.const(Fraction(value))
    try:
        return ParamPoly.const(Fraction(value))
    except ValueError:
        return ParamPoly.symbol(value)


def canonical_edge(u: str, v: str, offset: Sequence[int]) -> Edge:
    a = tuple(int(x) for x in offset)
    neg = tuple(-x for x in a)
    return min((u, v, a), (v, u, neg))


@dataclass(frozen=True)
class PeriodicGraph:
    """Vertex orbits and canonical orbit edges of a Z^d-periodic graph."""

    d: int
    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]

    @staticmethod
    def build(
        d: int,
        vertices: Sequence[str],
        edges: Iterable[tuple[str, str, Sequence[int]]],
    ) -> PeriodicGraph:
        """Canonicalize edges; structural problems are left for validate."""
        if d < 1:
            raise ValueError("d must be at least 1")
        names = tuple(vertices)
        if len(set(names)) != len(names):
            raise ValueError("duplicate vertex names")
        canon = tuple(canonical_edge(u, v, a) for (u, v, a) in edges)
        for (_, _, a) in canon:
            if len(a) != d:
                raise ValueError("edge offset length differs from d")
        return PeriodicGraph(d, names, canon)

    def vertex_index(self, name: str) -> int:
        return self.vertices.index(name)

    def offsets(self) -> set[tuple[int, ...]]:
        """All offsets a with an edge between the domain and its a-translate."""
        out: set[tuple[int, ...]] = set()
        for (_, _, a) in self.edges:
            out.add(a)
            out.add(tuple(-x for x in a))
        return out


@dataclass(frozen=True)
class Labeling:
    """Potential per vertex orbit and one label per canonical edge."""

    potential: Mapping[str, ParamPoly]
    edge_labels: Mapping[Edge, ParamPoly]

    @staticmethod
    def build(
        potential: Mapping[str, LabelLike],
        edge_labels: Mapping[tuple[str, str, Sequence[int]], LabelLike],
    ) -> Labeling:
        pot = {name: as_label(val) for name, val in potential.items()}
        lab = {
            canonical_edge(u, v, a): as_label(val)
            for (u, v, a), val in edge_labels.items()
        }
        return Labeling(pot, lab)

    def substitute(self, env: Mapping[str, Fraction]) -> Labeling:
        """Replace parameter symbols by rationals wherever they occur."""
        sub = {name: ParamPoly.const(val) for name, val in env.items()}
        return Labeling(
            {v: p.substitute(sub) for v, p in self.potential.items()},
            {e: p.substitute(sub) for e, p in self.edge_labels.items()},
        )

    def symbols(self) -> set[str]:
        out: set[str] = set()
        for p in self.potential.values():
            out |= p.symbols()
        for p in self.edge_labels.values():
            out |= p.symbols()
        return out


def validate(g: PeriodicGraph, c: Labeling) -> list[str]:
    """Structural diagnostics; an empty list means the pair is usable."""
    problems: list[str] = []
    known = set(g.vertices)
    seen: set[Edge] = set()
    for e in g.edges:
        u, v, a = e
        if u not in known or v not in known:
            problems.append(f"edge {e} mentions an unknown vertex")
        if u == v and all(x == 0 for x in a):
            problems.append(f"edge {e} is a zero-offset self-loop")
        if e in seen:
            problems.append(f"edge {e} occurs more than once")
        seen.add(e)
        label = c.edge_labels.get(e)
        if label is None:
            problems.append(f"edge {e} has no label")
        elif label.is_zero():
            problems.append(f"edge {e} has a zero label")
    for name in g.vertices:
        if name not in c.potential:
            problems.append(f"vertex {name} has no potential value")
    for name in c.potential:
        if name not in known:
            problems.append(f"potential names an unknown vertex {name}")
    for e in c.edge_labels:
        if e not in seen:
            problems.append(f"label given for an absent edge {e}")
    return problems


def require_valid(g: PeriodicGraph, c: Labeling) -> None:
    problems = validate(g, c)
    if problems:
        raise ValueError("; ".join(problems))


def expanded_name(k: Sequence[int], name: str) -> str:
    return ",".join(str(x) for x in k) + "+" + name


def split_expanded_name(full: str) -> tuple[tuple[int, ...], str]:
    head, _, name = full.partition("+")
    return tuple(int(x) for x in head.split(",")), name


def cells(Q: Sequence[int]) -> list[tuple[int, ...]]:
    """Lattice cells of the expansion, in lexicographic order."""
    return [tuple(k) for k in itertools.product(*(range(q) for q in Q))]


@dataclass(frozen=True)
class QExpansion:
    """A base graph together with its Q-expansion and expanded labeling."""

    base: PeriodicGraph
    base_labeling: Labeling
    Q: tuple[int, ...]
    expanded: PeriodicGraph
    labeling: Labeling

    def size(self) -> int:
        return len(self.expanded.vertices)


def q_expand(
    g: PeriodicGraph,
    c: Labeling,
    Q: Sequence[int],
    potential_q: Mapping[str, LabelLike],
) -> QExpansion:
    """Expand the period lattice to Q*Z^d with the given expanded potential.

    An edge (u, v, a) in cell k becomes ((k,u), ((k+a) mod Q, v)) with new
    offset floor((k+a) / Q): the floor-division carry is the new action.
    """
    Qt = tuple(int(q) for q in Q)
    if len(Qt) != g.d or any(q < 1 for q in Qt):
        raise ValueError("Q must be a positive integer vector of length d")
    ks = cells(Qt)
    names = [expanded_name(k, name) for k in ks for name in g.vertices]
    new_edges: list[tuple[str, str, tuple[int, ...]]] = []
    labels: dict[tuple[str, str, tuple[int, ...]], ParamPoly] = {}
    for k in ks:
        for e in g.edges:
            u, v, a = e
            shifted = [k[i] + a[i] for i in range(g.d)]
            target = tuple(shifted[i] % Qt[i] for i in range(g.d))
            carry = tuple(shifted[i] // Qt[i] for i in range(g.d))
            ne = (expanded_name(k, u), expanded_name(target, v), carry)
            new_edges.append(ne)
            labels[ne] = c.edge_labels[e]
    missing = [name for name in names if name not in potential_q]
    if missing:
        raise ValueError(f"potential_q misses vertices: {', '.join(missing)}")
    pot = {name: as_label(potential_q[name]) for name in names}
    expanded = PeriodicGraph.build(g.d, names, new_edges)
    return QExpansion(g, c, Qt, expanded, Labeling.build(pot, labels))


def lift_base_potential(g: PeriodicGraph, Q: Sequence[int], c: Labeling) -> dict[str, ParamPoly]:
    """The Z^d-periodic expanded potential induced by the base potential."""
    return {
        expanded_name(k, name): c.potential[name]
        for k in cells(Q)
        for name in g.vertices
    }


def symbolic_expanded_potential(g: PeriodicGraph, Q: Sequence[int]) -> dict[str, ParamPoly]:
    """One fresh potential symbol per expanded vertex."""
    return {
        expanded_name(k, name): ParamPoly.symbol("V_" + expanded_name(k, name))
        for k in cells(Q)
        for name in g.vertices
    }


def potential_is_periodic_mod(qe: QExpansion, A: Sequence[int]) -> bool:
    """True when the expanded potential only depends on the cell modulo A."""
    At = tuple(int(a) for a in A)
    if len(At) != qe.base.d or any(a < 1 for a in At):
        raise ValueError("A must be a positive integer vector of length d")
    if any(q % a != 0 for q, a in zip(qe.Q, At)):
        raise ValueError("A must divide Q componentwise")
    classes: dict[tuple, ParamPoly] = {}
    for full, val in qe.labeling.potential.items():
        k, name = split_expanded_name(full)
        key = (tuple(ki % ai for ki, ai in zip(k, At)), name)
        if key in classes and classes[key] != val:
            return False
        classes[key] = val
    return True


def potential_is_base_periodic(qe: QExpansion) -> bool:
    """True when the expanded potential is the lift of the base potential."""
    ones = (1,) * qe.base.d
    if not potential_is_periodic_mod(qe, ones):
        return False
    for name in qe.base.vertices:
        lifted = qe.labeling.potential[expanded_name((0,) * qe.base.d, name)]
        if lifted != qe.base_labeling.potential[name]:
            return False
    return True


def _unit(d: int, i: int) -> tuple[int, ...]:
    return tuple(1 if j == i else 0 for j in range(d))


def one_vertex(
    d: int, loops: Sequence[tuple[Sequence[int], LabelLike]]
) -> tuple[PeriodicGraph, Labeling]:
    """Single orbit with loop edges at the given nonzero offsets."""
    edges = []
    labels: dict[tuple[str, str, Sequence[int]], LabelLike] = {}
    for off, lab in loops:
        a = tuple(int(x) for x in off)
        if all(x == 0 for x in a):
            raise ValueError("loop offsets must be nonzero")
        edges.append(("u", "u", a))
        labels[("u", "u", a)] = lab
    g = PeriodicGraph.build(d, ["u"], edges)
    c = Labeling.build({"u": "V_u"}, labels)
    return g, c


def square_lattice(d: int) -> tuple[PeriodicGraph, Labeling]:
    """Nearest-neighbor lattice: one orbit, unit label on each axis loop."""
    return one_vertex(d, [(_unit(d, i), 1) for i in range(d)])


def honeycomb_diamond(d: int) -> tuple[PeriodicGraph, Labeling]:
    """Two orbits joined by a zero-offset rung and one edge per axis."""
    if d < 1:
        raise ValueError("d must be at least 1")
    if d == 2:
        axis_labels = ["beta", "gamma"]
    else:
        axis_labels = [f"gamma_{i + 1}" for i in range(d)]
    edges: list[tuple[str, str, Sequence[int]]] = [("u", "v", (0,) * d)]
    labels: dict[tuple[str, str, Sequence[int]], LabelLike] = {
        ("u", "v", (0,) * d): "alpha"
    }
    for i in range(d):
        off = tuple(-x for x in _unit(d, i))
        edges.append(("u", "v", off))
        labels[("u", "v", off)] = axis_labels[i]
    g = PeriodicGraph.build(d, ["u", "v"], edges)
    c = Labeling.build({"u": "V_u", "v": "V_v"}, labels)
    return g, c


def dice(d: int) -> tuple[PeriodicGraph, Labeling]:
    """Three orbits: two rung-and-axis ladders sharing the middle orbit."""
    if d < 2:
        raise ValueError("dice requires d >= 2")
    zero = (0,) * d
    edges: list[tuple[str, str, Sequence[int]]] = []
    labels: dict[tuple[str, str, Sequence[int]], LabelLike] = {}
    edges.append(("u1", "u2", zero))
    labels[("u1", "u2", zero)] = "gamma_0"
    edges.append(("u2", "u3", zero))
    labels[("u2", "u3", zero)] = "beta_0"
    for i in range(d):
        off = tuple(-x for x in _unit(d, i))
        edges.append(("u1", "u2", off))
        labels[("u1", "u2", off)] = f"gamma_{i + 1}"
        edges.append(("u2", "u3", off))
        labels[("u2", "u3", off)] = f"beta_{i + 1}"
    g = PeriodicGraph.build(d, ["u1", "u2", "u3"], edges)
    c = Labeling.build({"u1": "V_u1", "u2": "V_u2", "u3": "V_u3"}, labels)
    return g, c


def _dense_axis(
    edges: list[tuple[str, str, Sequence[int]]],
    labels: dict[tuple[str, str, Sequence[int]], LabelLike],
    off: tuple[int, ...],
    stem: str,
) -> None:
    """Loops on both orbits plus both diagonal rungs along one axis."""
    neg = tuple(-x for x in off)
    edges.append(("u1", "u1", off))
    labels[("u1", "u1", off)] = f"{stem}_1"
    edges.append(("u1", "u2", off))
    labels[("u1", "u2", off)] = f"{stem}_2"
    edges.append(("u1", "u2", neg))
    labels[("u1", "u2", neg)] = f"{stem}_3"
    edges.append(("u2", "u2", off))
    labels[("u2", "u2", off)] = f"{stem}_4"


def dense_2d() -> tuple[PeriodicGraph, Labeling]:
    """Two orbits with a rung plus loops and double rungs along both axes."""
    zero = (0, 0)
    edges: list[tuple[str, str, Sequence[int]]] = [("u1", "u2", zero)]
    labels: dict[tuple[str, str, Sequence[int]], LabelLike] = {
        ("u1", "u2", zero): "alpha"
    }
    _dense_axis(edges, labels, (1, 0), "beta")
    _dense_axis(edges, labels, (0, 1), "gamma")
    g = PeriodicGraph.build(2, ["u1", "u2"], edges)
    c = Labeling.build({"u1": "V_u1", "u2": "V_u2"}, labels)
    return g, c


def dense_3d() -> tuple[PeriodicGraph, Labeling]:
    """The 2d dense pair with a third fully wired axis."""
    zero = (0, 0, 0)
    edges: list[tuple[str, str, Sequence[int]]] = [("u1", "u2", zero)]
    labels: dict[tuple[str, str, Sequence[int]], LabelLike] = {
        ("u1", "u2", zero): "alpha"
    }
    _dense_axis(edges, labels, (1, 0, 0), "beta")
    _dense_axis(edges, labels, (0, 1, 0), "gamma")
    _dense_axis(edges, labels, (0, 0, 1), "epsilon")
    g = PeriodicGraph.build(3, ["u1", "u2"], edges)
    c = Labeling.build({"u1": "V_u1", "u2": "V_u2"}, labels)
    return g, c


def disjoint_union(
    g1: PeriodicGraph, c1: Labeling, g2: PeriodicGraph, c2: Labeling
) -> tuple[PeriodicGraph, Labeling]:
    """Side-by-side union; clashing vertex names get a./b. prefixes."""
    if g1.d != g2.d:
        raise ValueError("graphs must share the same d")
    clash = set(g1.vertices) & set(g2.vertices)
    p1 = "a." if clash else ""
    p2 = "b." if clash else ""
    names = [p1 + n for n in g1.vertices] + [p2 + n for n in g2.vertices]
    edges: list[tuple[str, str, Sequence[int]]] = []
    labels: dict[tuple[str, str, Sequence[int]], LabelLike] = {}
    pot: dict[str, LabelLike] = {}
    for prefix, g, c in ((p1, g1, c1), (p2, g2, c2)):
        for (u, v, a) in g.edges:
            e = (prefix + u, prefix + v, a)
            edges.append(e)
            labels[e] = c.edge_labels[(u, v, a)]
        for n in g.vertices:
            pot[prefix + n] = c.potential[n]
    g = PeriodicGraph.build(g1.d, names, edges)
    return g, Labeling.build(pot, labels)


BUILDERS = {
    "square_lattice": square_lattice,
    "honeycomb_diamond": honeycomb_diamond,
    "dice": dice,
    "dense_2d": lambda d=2: dense_2d(),
    "dense_3d": lambda d=3: dense_3d(),
}


def build_named(name: str, d: int) -> tuple[PeriodicGraph, Labeling]:
    """Look up a family by name; dense families ignore mismatched d."""
    if name not in BUILDERS:
        raise ValueError(f"unknown graph family {name}")
    if name == "dense_2d" and d not in (0, 2):
        raise ValueError("dense_2d is a d=2 family")
    if name == "dense_3d" and d not in (0, 3):
        raise ValueError("dense_3d is a d=3 family")
    if name.startswith("dense"):
        return BUILDERS[name]()
    return BUILDERS[name](d)
