"""Canonical JSON forms for polynomials, graphs, and labelings."""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Mapping

from .graphs import Labeling, PeriodicGraph
from .laurent import LaurentPoly
from .params import ParamPoly, mono_from_key, mono_to_key


def fraction_to_text(x: Fraction | int) -> str:
    f = Fraction(x)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def fraction_from_text(s: str) -> Fraction:
    return Fraction(s.strip())


def label_to_text(p: ParamPoly) -> str:
    """A label is storable as a rational constant or a bare symbol name."""
    if p.is_rational():
        return fraction_to_text(p.rational_value())
    if len(p.terms) == 1:
        (mono, coeff), = p.terms.items()
        if coeff == 1 and len(mono) == 1 and mono[0][1] == 1:
            return mono[0][0]
    raise ValueError(f"label {p.to_text()} is not a symbol or a rational")


def label_from_text(s: str) -> ParamPoly:
    try:
        return ParamPoly.const(Fraction(s.strip()))
    except (ValueError, ZeroDivisionError):
        return ParamPoly.symbol(s.strip())


def coeff_to_json_dict(c: ParamPoly) -> dict[str, str]:
    return {
        mono_to_key(m): fraction_to_text(v)
        for m, v in sorted(c.terms.items(), key=lambda kv: mono_to_key(kv[0]))
    }


def coeff_from_json_dict(data: Mapping[str, str]) -> ParamPoly:
    return ParamPoly(
        {mono_from_key(k): fraction_from_text(v) for k, v in data.items()}
    )


def poly_to_json_dict(f: LaurentPoly) -> dict:
    return {
        "vars": f.nz,
        "terms": [
            {"z": list(e[:-1]), "l": e[-1], "coeff": coeff_to_json_dict(f.terms[e])}
            for e in f.support()
        ],
    }


def poly_from_json_dict(data: Mapping) -> LaurentPoly:
    nz = int(data["vars"])
    terms = {}
    for t in data["terms"]:
        exp = tuple(int(x) for x in t["z"]) + (int(t["l"]),)
        terms[exp] = coeff_from_json_dict(t["coeff"])
    return LaurentPoly(nz, terms)


def graph_to_json_dict(g: PeriodicGraph, labeling: Labeling) -> dict:
    return {
        "d": g.d,
        "vertices": list(g.vertices),
        "edges": [
            {
                "u": u,
                "v": v,
                "offset": list(a),
                "label": label_to_text(labeling.edge_labels[(u, v, a)]),
            }
            for (u, v, a) in g.edges
        ],
        "potential": {
            name: label_to_text(labeling.potential[name]) for name in g.vertices
        },
    }


def graph_from_json_dict(data: Mapping) -> tuple[PeriodicGraph, Labeling]:
    d = int(data["d"])
    vertices = [str(v) for v in data["vertices"]]
    edges = []
    labels = {}
    for e in data["edges"]:
        u, v = str(e["u"]), str(e["v"])
        a = tuple(int(x) for x in e["offset"])
        edges.append((u, v, a))
        labels[(u, v, a)] = label_from_text(str(e["label"]))
    potential = {
        str(name): label_from_text(str(text))
        for name, text in data.get("potential", {}).items()
    }
    g = PeriodicGraph.build(d, vertices, edges)
    c = Labeling.build(potential, labels)
    return g, c


def potential_map_to_json(potential: Mapping[str, ParamPoly]) -> dict[str, str]:
    return {name: label_to_text(p) for name, p in sorted(potential.items())}


def potential_map_from_json(data: Mapping[str, str]) -> dict[str, ParamPoly]:
    return {str(k): label_from_text(str(v)) for k, v in data.items()}


def canonical_json(obj) -> str:
    """Stable byte form: sorted keys, no whitespace drift, trailing newline."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False) + "\n"


def pretty_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
