"""Inference engine: divisor invariants, shapes, flat bands, verdicts, replay."""

from __future__ import annotations

import copy
import math
import random
from fractions import Fraction

import pytest

from blochcert.criteria import (
    AnalysisOptions,
    Subject,
    analyze,
    dice_genericity,
    div_j_sigma,
    flat_bands,
    potential_independent,
    pyramid_irreducible,
    replay_certificate,
    shape_only_homothetic,
    validate_axioms,
)
from blochcert.graphs import (
    Labeling,
    PeriodicGraph,
    build_named,
    cells,
    disjoint_union,
    expanded_name,
    one_vertex,
    q_expand,
)
from blochcert.laurent import LaurentPoly

from oracles import div_by_enumeration, random_fraction, random_laurent

FS_AXIOM = (
    {
        "grants": "facial_irreducible",
        "text": "facial polynomials of the dispersion relation are irreducible"
        " for these labels, supplied as input citing [FS, Theorem 4.2]",
    },
)


def zper_vals(g, Q, rng):
    base = {v: random_fraction(rng) for v in g.vertices}
    return {expanded_name(k, v): base[v] for k in cells(Q) for v in g.vertices}


def rand_vals(g, Q, rng):
    return {expanded_name(k, v): random_fraction(rng) for k in cells(Q) for v in g.vertices}


# -- divisor invariant ------------------------------------------------------------


def test_div_pinned_values() -> None:
    f = (
        LaurentPoly.term(2, (2, 2, 0), 1)
        + LaurentPoly.term(2, (4, 0, 1), 1)
        + LaurentPoly.term(2, (0, 0, 3), 1)
    )
    assert div_j_sigma(f, 1, {1}) == 2
    assert div_j_sigma(f, 1, {1, 2}) == 4


def test_div_mixed_monomial_case() -> None:
    h = (
        LaurentPoly.term(2, (3, 2, 0), 1)
        + LaurentPoly.term(2, (2, -1, 0), 1)
        + LaurentPoly.lam(2)
    )
    assert div_j_sigma(h, 1, {1, 2}) == 7


def test_div_argument_validation() -> None:
    f = LaurentPoly.term(2, (1, 0, 0), 1)
    with pytest.raises(ValueError):
        div_j_sigma(f, 2, {1})
    with pytest.raises(ValueError):
        div_j_sigma(f, 3, {3})
    with pytest.raises(ValueError):
        div_j_sigma(LaurentPoly.zero(2), 1, {1})


def test_div_matches_enumeration_oracle() -> None:
    rng = random.Random(801)
    agreements = 0
    while agreements < 200:
        f = random_laurent(rng, 2, rng.randint(1, 4), span=3, lmax=2)
        if f.is_zero():
            continue
        sigma = rng.choice([{1}, {2}, {1, 2}])
        j = rng.choice(sorted(sigma))
        assert div_j_sigma(f, j, sigma) == div_by_enumeration(f, j, sigma)
        agreements += 1


def test_div_monotone_in_sigma() -> None:
    rng = random.Random(802)
    for _ in range(150):
        f = random_laurent(rng, 2, rng.randint(1, 4), span=3, lmax=2)
        if f.is_zero():
            continue
        small = div_j_sigma(f, 1, {1})
        large = div_j_sigma(f, 1, {1, 2})
        if small == 0:
            assert large == 0
        else:
            assert large % small == 0


# -- shape tests ------------------------------------------------------------------


def test_pyramid_irreducible_on_unit_simplex() -> None:
    g, c = build_named("square_lattice", 2)
    from blochcert.floquet import dispersion

    f = dispersion(g, c.substitute({"V_u": Fraction(0)}))
    rep = pyramid_irreducible(f)
    assert rep.holds


def test_pyramid_irreducible_rejects_common_divisor() -> None:
    f = (
        LaurentPoly.term(1, (6, 0), 1)
        + LaurentPoly.lam(1, 3)
        + LaurentPoly.const(1, 1)
    )
    rep = pyramid_irreducible(f)
    assert not rep.holds
    assert "factor 3" in rep.reason
    assert shape_only_homothetic(f).holds


def test_pyramid_irreducible_rejects_lambda_multiples() -> None:
    f = LaurentPoly.lam(1, 1) + LaurentPoly.term(1, (1, 2), 1)
    assert not pyramid_irreducible(f).holds


def test_shape_only_homothetic_on_segment() -> None:
    f = LaurentPoly.term(1, (2, 0), 1) + LaurentPoly.term(1, (-1, 0), Fraction(1, 2))
    assert shape_only_homothetic(f).holds


def test_potential_independence_flag() -> None:
    free = LaurentPoly.term(1, (1, 0), 1) + LaurentPoly.lam(1)
    from blochcert.params import ParamPoly

    tied = free + LaurentPoly.const(1, ParamPoly.symbol("V_0,0+u"))
    assert potential_independent(free, ["V_0,0+u"])
    assert not potential_independent(tied, ["V_0,0+u"])


# -- flat bands -------------------------------------------------------------------


def test_flat_bands_multiplicity_one() -> None:
    hop = LaurentPoly.term(1, (1, 0), 1) + LaurentPoly.term(1, (-1, 0), 1) - LaurentPoly.lam(1)
    flat = LaurentPoly.lam(1) - LaurentPoly.const(1, 3)
    bands, rest = flat_bands(flat * hop)
    assert bands == [(Fraction(3), 1)]
    assert rest == hop


def test_flat_bands_high_multiplicity() -> None:
    hop = LaurentPoly.term(1, (1, 0), 1) + LaurentPoly.term(1, (-1, 0), 1) - LaurentPoly.lam(1)
    flat = LaurentPoly.lam(1) - LaurentPoly.const(1, 3)
    prod = hop
    for _ in range(4):
        prod = prod * flat
    bands, rest = flat_bands(prod)
    assert bands == [(Fraction(3), 4)]
    assert rest == hop


def test_flat_bands_fractional_eigenvalue() -> None:
    hop = LaurentPoly.term(1, (1, 0), 1) + LaurentPoly.term(1, (-1, 0), 1) - LaurentPoly.lam(1)
    flat = LaurentPoly.lam(1) - LaurentPoly.const(1, Fraction(5, 7))
    bands, _ = flat_bands(flat * flat * hop)
    assert bands == [(Fraction(5, 7), 2)]


def test_flat_bands_absent_for_free_hopping() -> None:
    hop = LaurentPoly.term(1, (1, 0), 1) + LaurentPoly.term(1, (-1, 0), 1) - LaurentPoly.lam(1)
    bands, rest = flat_bands(hop)
    assert bands == [] and rest == hop


def test_flat_bands_reject_symbolic_coefficients() -> None:
    from blochcert.params import ParamPoly

    f = LaurentPoly.const(1, ParamPoly.symbol("a")) - LaurentPoly.lam(1)
    with pytest.raises(ValueError):
        flat_bands(f)


# -- axioms and genericity --------------------------------------------------------


def test_validate_axioms() -> None:
    cleaned = validate_axioms(FS_AXIOM)
    assert len(cleaned) == 1 and cleaned[0]["grants"] == "facial_irreducible"
    with pytest.raises(ValueError):
        validate_axioms(({"grants": "nonsense", "text": "x"},))
    with pytest.raises(ValueError):
        validate_axioms(({"text": "missing grants"},))


def test_dice_genericity_detects_degenerate_labels() -> None:
    g, c = build_named("dice", 2)
    base = {"beta_0": Fraction(7), "gamma_0": Fraction(4)}
    ok_labels = c.substitute(
        dict(base, beta_1=Fraction(2), beta_2=Fraction(3), gamma_1=Fraction(1), gamma_2=Fraction(5))
    )
    ok, reasons = dice_genericity(ok_labels, 2)
    assert ok and reasons == []
    bad_labels = c.substitute(
        dict(base, beta_1=Fraction(2), beta_2=Fraction(3), gamma_1=Fraction(1), gamma_2=Fraction(-6))
    )
    ok, reasons = dice_genericity(bad_labels, 2)
    assert not ok and reasons


# -- end-to-end verdicts ----------------------------------------------------------


def test_verdict_irreducible_honeycomb_periodic() -> None:
    rng = random.Random(803)
    g, c = build_named("honeycomb_diamond", 2)
    Q = (2, 1)
    qe = q_expand(g, c, Q, zper_vals(g, Q, rng))
    res = analyze(qe, AnalysisOptions())
    assert res.verdict == "Irreducible"
    assert replay_certificate(res.certificate) == []


def test_verdict_only_homothetic_for_perfect_power() -> None:
    g, c = one_vertex(1, [((3,), 1)])
    Q = (3,)
    vals = {expanded_name(k, v): 0 for k in cells(Q) for v in g.vertices}
    qe = q_expand(g, c, Q, vals)
    res = analyze(qe, AnalysisOptions())
    assert res.verdict == "OnlyHomotheticallyReducible"
    assert replay_certificate(res.certificate) == []


def test_verdict_inconclusive_when_loop_exponent_matches_order() -> None:
    rng = random.Random(804)
    g, c = one_vertex(1, [((3,), 1)])
    Q = (3,)
    vals = rand_vals(g, Q, rng)
    qe = q_expand(g, c, Q, vals)
    res = analyze(qe, AnalysisOptions())
    assert res.verdict == "Inconclusive"
    joined = " ".join(res.blockers)
    assert "gcd(q_1=3, Div=3) > 1" in joined
    assert res.certificate["blockers"]


def test_verdict_reducible_with_flat_bands() -> None:
    rng = random.Random(805)
    g1 = PeriodicGraph.build(2, ["w"], [])
    c1 = Labeling.build({"w": 3}, {})
    g2, c2 = build_named("honeycomb_diamond", 2)
    c2 = c2.substitute(
        {s: random_fraction(rng) for s in sorted(c2.symbols()) if not s.startswith("V_")}
    )
    gu, cu = disjoint_union(g1, c1, g2, c2)
    Q = (1, 1)
    vals = {
        expanded_name(k, v): 3 if v == "w" else random_fraction(rng)
        for k in cells(Q)
        for v in gu.vertices
    }
    qe = q_expand(gu, cu, Q, vals)
    res = analyze(qe, AnalysisOptions())
    assert res.verdict == "ReducibleWithFactors"
    assert res.flat_band_list == [(Fraction(3), 1)]
    assert replay_certificate(res.certificate) == []


def test_axiom_unlocks_dense_expansion() -> None:
    rng = random.Random(806)
    g, c = build_named("dense_2d", 2)
    Q = (5, 7)
    qe = q_expand(g, c, Q, zper_vals(g, Q, rng))
    plain = analyze(qe, AnalysisOptions())
    assert plain.verdict == "OnlyHomotheticallyReducible"
    with_axiom = analyze(qe, AnalysisOptions(axioms=FS_AXIOM))
    assert with_axiom.verdict == "Irreducible"
    assert replay_certificate(with_axiom.certificate) == []
    assert any(f.rule == "axiom" for f in with_axiom.facts)


# -- negative controls ------------------------------------------------------------


def test_pairwise_coprime_rule_blocks_shared_factor() -> None:
    g, c = one_vertex(2, [((1, 1), 1), ((1, -1), 1)])
    Q = (2, 4)
    vals = {expanded_name(k, v): 0 for k in cells(Q) for v in g.vertices}
    qe = q_expand(g, c, Q, vals)
    res = analyze(qe, AnalysisOptions())
    joined = " ".join(res.notes)
    assert "share the factor 2" in joined
    full_zero = Subject("zero", Q, None, None)
    assert not any(
        f.subject == full_zero and f.claim == "Irreducible" for f in res.facts
    )


def test_divisor_rule_blocks_missing_guard_point() -> None:
    rng = random.Random(807)
    g, c = build_named("dense_3d", 3)
    Q = (2, 3, 5)
    qe = q_expand(g, c, Q, zper_vals(g, Q, rng))
    res = analyze(qe, AnalysisOptions(lambda0="1/2", axioms=FS_AXIOM))
    assert res.verdict == "Irreducible"
    joined = " ".join(res.notes)
    assert "no support point with zero coordinates on sigma=[1, 2, 3]" in joined


# -- certificate replay and tampering ----------------------------------------------


def fresh_certificate():
    rng = random.Random(808)
    g, c = build_named("honeycomb_diamond", 2)
    Q = (2, 1)
    qe = q_expand(g, c, Q, zper_vals(g, Q, rng))
    res = analyze(qe, AnalysisOptions())
    assert res.verdict == "Irreducible"
    return res.certificate


def test_replay_accepts_untouched_certificate() -> None:
    cert = fresh_certificate()
    assert replay_certificate(cert) == []


def test_replay_rejects_verdict_flip() -> None:
    cert = copy.deepcopy(fresh_certificate())
    cert["verdict"] = "OnlyHomotheticallyReducible"
    assert replay_certificate(cert) != []


def test_replay_rejects_deleted_premise() -> None:
    cert = copy.deepcopy(fresh_certificate())
    used = set()
    for f in cert["facts"]:
        used.update(f["premises"])
    assert used
    victim = sorted(used)[0]
    cert["facts"] = [f for f in cert["facts"] if f["id"] != victim]
    problems = replay_certificate(cert)
    assert problems
    assert any("premise" in p for p in problems)


def test_replay_rejects_forged_claim() -> None:
    cert = copy.deepcopy(fresh_certificate())
    flipped = False
    for f in cert["facts"]:
        if f["rule"] == "shape_only_homothetic":
            f["claim"] = "Irreducible"
            flipped = True
            break
    if not flipped:
        pytest.skip("certificate has no shape fact to forge")
    assert replay_certificate(cert) != []


def test_replay_rejects_tampered_flat_bands() -> None:
    rng = random.Random(809)
    g1 = PeriodicGraph.build(2, ["w"], [])
    c1 = Labeling.build({"w": 3}, {})
    g2, c2 = build_named("honeycomb_diamond", 2)
    c2 = c2.substitute(
        {s: random_fraction(rng) for s in sorted(c2.symbols()) if not s.startswith("V_")}
    )
    gu, cu = disjoint_union(g1, c1, g2, c2)
    vals = {
        expanded_name(k, v): 3 if v == "w" else random_fraction(rng)
        for k in cells((1, 1))
        for v in gu.vertices
    }
    qe = q_expand(gu, cu, (1, 1), vals)
    res = analyze(qe, AnalysisOptions())
    cert = copy.deepcopy(res.certificate)
    assert cert["flat_bands"]
    cert["flat_bands"][0]["multiplicity"] = 5
    assert replay_certificate(cert) != []


def test_replay_rejects_potential_tamper() -> None:
    cert = copy.deepcopy(fresh_certificate())
    key = sorted(cert["inputs"]["expanded_potential"])[0]
    cert["inputs"]["expanded_potential"][key] = "999"
    assert replay_certificate(cert) != []


def test_subject_render_format() -> None:
    s = Subject("given", (2, 3), (-2, -2, -1), "1/2")
    assert s.render() == "expansion[given-potential,Q=(2,3)]|face(-2,-2,-1)|lambda0=1/2"
    assert Subject("zero", (1, 1), None, None).render() == "dispersion[zero-potential]"


def test_certificate_facts_carry_statements() -> None:
    cert = fresh_certificate()
    for f in cert["facts"]:
        assert f["rule_statement"]
        assert f["rule"]
