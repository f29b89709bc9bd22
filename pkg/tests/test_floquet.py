"""Floquet matrices, dispersion polynomials, expansion products, spectra."""

from __future__ import annotations

import cmath
import random
from fractions import Fraction

import pytest

from blochcert.floquet import (
    dispersion,
    expanded_dispersion,
    floquet_matrix,
    periodic_expanded_dispersion,
    sample_spectrum,
    unit_phases,
)
from blochcert.graphs import build_named, cells, expanded_name, q_expand
from blochcert.laurent import CapExceeded, LaurentPoly

from oracles import eig_real_symmetric, random_fraction


def bind_labels(c, rng):
    subs = {s: random_fraction(rng) for s in sorted(c.symbols()) if not s.startswith("V_")}
    return c.substitute(subs)


def bind_potential(c, base):
    return c.substitute({f"V_{v}": val for v, val in base.items()})


def test_square_lattice_dispersion_is_classical() -> None:
    g, c = build_named("square_lattice", 2)
    c = c.substitute({"V_u": Fraction(0)})
    f = dispersion(g, c)
    expect = (
        LaurentPoly.const(2, 4)
        - LaurentPoly.lam(2)
        - LaurentPoly.term(2, (1, 0, 0), 1)
        - LaurentPoly.term(2, (-1, 0, 0), 1)
        - LaurentPoly.term(2, (0, 1, 0), 1)
        - LaurentPoly.term(2, (0, -1, 0), 1)
    )
    assert f == expect


def test_honeycomb_dispersion_support() -> None:
    g, c = build_named("honeycomb_diamond", 2)
    f = dispersion(g, c)
    expect = {
        (0, 0, 2), (0, 0, 1), (0, 0, 0),
        (1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0),
        (1, -1, 0), (-1, 1, 0),
    }
    assert set(f.support()) == expect


def test_dispersion_leading_lambda_term() -> None:
    rng = random.Random(601)
    for name, d in [("square_lattice", 2), ("honeycomb_diamond", 2), ("dice", 2)]:
        g, c = build_named(name, d)
        f = dispersion(g, bind_labels(c, rng))
        m = len(g.vertices)
        assert f.lambda_coefficient(m) == LaurentPoly.const(2, (-1) ** m)


def test_floquet_matrix_hermitian_on_torus() -> None:
    rng = random.Random(602)
    g, c = build_named("honeycomb_diamond", 2)
    c2 = bind_potential(bind_labels(c, rng), {v: random_fraction(rng) for v in g.vertices})
    m = floquet_matrix(g, c2)
    for _ in range(10):
        z = [cmath.exp(2j * cmath.pi * rng.random()) for _ in range(2)]
        rows = m.eval_numeric(z, 0.0)
        n = len(rows)
        for i in range(n):
            for j in range(n):
                assert abs(rows[i][j] - rows[j][i].conjugate()) < 1e-9


def test_expanded_dispersion_equals_periodic_product() -> None:
    rng = random.Random(603)
    cases = [("square_lattice", 1, (3,)), ("square_lattice", 2, (2, 2)),
             ("honeycomb_diamond", 2, (2, 1)), ("dice", 2, (2, 1)),
             ("dense_2d", 2, (1, 3))]
    for name, d, Q in cases:
        g, c = build_named(name, d)
        c2 = bind_labels(c, rng)
        base = {v: random_fraction(rng) for v in g.vertices}
        cb = bind_potential(c2, base)
        vals = {expanded_name(k, v): base[v] for k in cells(Q) for v in g.vertices}
        qe = q_expand(g, cb, Q, vals)
        direct = expanded_dispersion(qe, cap=16)
        product = periodic_expanded_dispersion(g, cb, Q, cap=16)
        assert direct == product


def test_unit_phases_are_roots_of_unity() -> None:
    Q = (2, 3)
    for k in cells(Q):
        mu = unit_phases(Q, k)
        for j, q in enumerate(Q):
            assert abs(mu[j] ** q - 1) < 1e-12


def test_product_identity_numeric_at_generic_points() -> None:
    rng = random.Random(604)
    g, c = build_named("honeycomb_diamond", 2)
    c2 = bind_labels(c, rng)
    Q = (2, 1)
    base = {v: random_fraction(rng) for v in g.vertices}
    cb = bind_potential(c2, base)
    vals = {expanded_name(k, v): base[v] for k in cells(Q) for v in g.vertices}
    qe = q_expand(g, cb, Q, vals)
    fq = expanded_dispersion(qe, cap=16)
    fb = dispersion(g, cb)
    for _ in range(10):
        w = [complex(rng.uniform(0.9, 1.1)) * cmath.exp(2j * cmath.pi * rng.random())
             for _ in range(2)]
        lam = complex(rng.uniform(-2, 2), rng.uniform(-1, 1))
        lhs = fq.eval_numeric([w[j] ** Q[j] for j in range(2)], lam)
        rhs = 1 + 0j
        for k in cells(Q):
            mu = unit_phases(Q, k)
            rhs *= fb.eval_numeric([mu[j] * w[j] for j in range(2)], lam)
        assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(lhs), abs(rhs))


def test_expansion_cap() -> None:
    rng = random.Random(605)
    g, c = build_named("dice", 2)
    c2 = bind_labels(c, rng)
    vals = {expanded_name(k, v): Fraction(0) for k in cells((3, 2)) for v in g.vertices}
    qe = q_expand(g, c2, (3, 2), vals)
    with pytest.raises(CapExceeded):
        expanded_dispersion(qe, cap=16)


def test_sample_spectrum_matches_reference_eigensolver() -> None:
    rng = random.Random(606)
    g, c = build_named("honeycomb_diamond", 2)
    c2 = bind_potential(bind_labels(c, rng), {v: random_fraction(rng) for v in g.vertices})
    m = floquet_matrix(g, c2)
    for z, eigs in sample_spectrum(g, c2, grid_n=3, env={}):
        rows = m.eval_numeric(z, 0j)
        ref = eig_real_symmetric(rows)
        assert len(eigs) == len(ref)
        for a, b in zip(sorted(eigs), ref):
            assert abs(a - b) < 1e-8


def test_sample_spectrum_rejects_unbound_symbols() -> None:
    g, c = build_named("honeycomb_diamond", 2)
    with pytest.raises(ValueError):
        sample_spectrum(g, c, grid_n=2, env={})
