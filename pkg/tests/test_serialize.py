"""Round trips and stability of the canonical JSON and text forms."""

from __future__ import annotations

import json
import random
from fractions import Fraction

import pytest

from blochcert.graphs import build_named
from blochcert.params import ParamPoly, mono_from_key, mono_to_key
from blochcert.serialize import (
    canonical_json,
    coeff_from_json_dict,
    coeff_to_json_dict,
    fraction_from_text,
    fraction_to_text,
    graph_from_json_dict,
    graph_to_json_dict,
    label_from_text,
    label_to_text,
    poly_from_json_dict,
    poly_to_json_dict,
    potential_map_from_json,
    potential_map_to_json,
    pretty_json,
)

from oracles import random_fraction, random_laurent


def test_fraction_text_round_trip() -> None:
    rng = random.Random(701)
    for _ in range(200):
        x = random_fraction(rng)
        assert fraction_from_text(fraction_to_text(x)) == x
    assert fraction_to_text(Fraction(5)) == "5"
    assert fraction_to_text(Fraction(-3, 7)) == "-3/7"


def test_label_text_round_trip() -> None:
    assert label_to_text(ParamPoly.const(Fraction(2, 3))) == "2/3"
    assert label_from_text("2/3").rational_value() == Fraction(2, 3)
    sym = label_from_text("alpha_1")
    assert sym.symbols() == {"alpha_1"}
    assert label_to_text(sym) == "alpha_1"
    with pytest.raises(ValueError):
        label_to_text(ParamPoly.symbol("a") + ParamPoly.const(1))


def test_coeff_round_trip_sparse_polynomial() -> None:
    p = (
        ParamPoly.symbol("a", 2) * ParamPoly.symbol("b")
        + ParamPoly.const(Fraction(-7, 3))
        + ParamPoly.symbol("V_u")
    )
    back = coeff_from_json_dict(coeff_to_json_dict(p))
    assert back == p


def test_mono_key_round_trip() -> None:
    mono = (("V_u", 1), ("alpha", 3))
    assert mono_from_key(mono_to_key(mono)) == mono
    assert mono_from_key(mono_to_key(())) == ()


def test_poly_json_round_trip_random() -> None:
    rng = random.Random(702)
    for _ in range(100):
        f = random_laurent(rng, nz=2, terms=6)
        back = poly_from_json_dict(poly_to_json_dict(f))
        assert back == f


def test_poly_json_round_trip_symbolic() -> None:
    from blochcert.laurent import LaurentPoly

    f = LaurentPoly.term(2, (1, -2, 0), ParamPoly.symbol("alpha")) + LaurentPoly.lam(2)
    back = poly_from_json_dict(poly_to_json_dict(f))
    assert back == f


def test_graph_json_round_trip_named_families() -> None:
    for name, d in [("square_lattice", 2), ("honeycomb_diamond", 2), ("dice", 2), ("dense_3d", 3)]:
        g, c = build_named(name, d)
        data = graph_to_json_dict(g, c)
        g2, c2 = graph_from_json_dict(data)
        assert g2.d == g.d
        assert list(g2.vertices) == list(g.vertices)
        assert list(g2.edges) == list(g.edges)
        assert graph_to_json_dict(g2, c2) == data


def test_graph_json_edge_shape() -> None:
    g, c = build_named("square_lattice", 2)
    data = graph_to_json_dict(g, c)
    for e in data["edges"]:
        assert set(e) == {"u", "v", "offset", "label"}
    assert set(data) == {"d", "vertices", "edges", "potential"}


def test_potential_map_round_trip() -> None:
    rng = random.Random(703)
    pot = {f"u{i}": ParamPoly.const(random_fraction(rng)) for i in range(4)}
    pot["w"] = ParamPoly.symbol("V_w")
    back = potential_map_from_json(potential_map_to_json(pot))
    assert back == pot


def test_canonical_json_is_stable_and_sorted() -> None:
    a = canonical_json({"b": 1, "a": [2, 3]})
    b = canonical_json({"a": [2, 3], "b": 1})
    assert a == b == '{"a":[2,3],"b":1}\n'
    assert json.loads(pretty_json({"x": 1})) == {"x": 1}
    assert pretty_json({"x": 1}).endswith("\n")
