"""Laurent polynomials and matrices: ring laws, facials, determinants."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from blochcert.laurent import CapExceeded, LaurentMatrix, LaurentPoly

from oracles import (
    det_by_permutations,
    facial_by_filter,
    random_fraction,
    random_laurent,
)


def test_ring_laws_seeded() -> None:
    rng = random.Random(201)
    for _ in range(150):
        f = random_laurent(rng, 2, rng.randint(0, 5))
        g = random_laurent(rng, 2, rng.randint(0, 5))
        h = random_laurent(rng, 2, rng.randint(0, 5))
        assert f + g == g + f
        assert (f + g) + h == f + (g + h)
        assert f * g == g * f
        assert (f * g) * h == f * (g * h)
        assert f * (g + h) == f * g + f * h
        assert f + LaurentPoly.zero(2) == f
        assert f * LaurentPoly.const(2, 1) == f
        assert (f - f).is_zero()


def test_support_drops_cancelled_terms() -> None:
    f = LaurentPoly.term(1, (1, 0), 1) + LaurentPoly.term(1, (0, 1), 2)
    g = LaurentPoly.term(1, (1, 0), -1) + LaurentPoly.term(1, (0, 1), 2)
    s = f + g
    assert sorted(s.support()) == [(0, 1)]
    assert s.coeff((0, 1)).rational_value() == 4


def test_facial_polynomial_matches_filter() -> None:
    rng = random.Random(202)
    for _ in range(200):
        f = random_laurent(rng, 2, rng.randint(1, 6))
        w = tuple(rng.randint(-3, 3) for _ in range(3))
        assert f.facial_polynomial(w) == facial_by_filter(f, w)


def test_facial_multiplicative() -> None:
    rng = random.Random(203)
    for _ in range(150):
        f = random_laurent(rng, 2, rng.randint(1, 5))
        g = random_laurent(rng, 2, rng.randint(1, 5))
        if f.is_zero() or g.is_zero():
            continue
        w = tuple(rng.randint(-3, 3) for _ in range(3))
        lhs = (f * g).facial_polynomial(w)
        rhs = f.facial_polynomial(w) * g.facial_polynomial(w)
        assert lhs == rhs


def test_exact_divide_round_trip() -> None:
    rng = random.Random(204)
    hits = 0
    for _ in range(150):
        f = random_laurent(rng, 2, rng.randint(1, 4))
        g = random_laurent(rng, 2, rng.randint(1, 4))
        if f.is_zero() or g.is_zero():
            continue
        q = (f * g).exact_divide(g)
        assert q is not None and q == f
        hits += 1
    assert hits > 80


def test_exact_divide_rejects_non_multiple() -> None:
    f = LaurentPoly.term(1, (2, 0), 1) + LaurentPoly.const(1, 1)
    g = LaurentPoly.term(1, (1, 0), 1) + LaurentPoly.const(1, 3)
    assert f.exact_divide(g) is None


def test_substitute_power_scales_exponents() -> None:
    f = LaurentPoly.term(2, (1, -2, 1), Fraction(1, 2))
    g = f.substitute_power((3, 2))
    assert g.support() == [(3, -4, 1)]


def test_specialize_lambda_substitutes_value() -> None:
    f = LaurentPoly.lam(1, 2) + LaurentPoly.z_var(1, 0) - LaurentPoly.const(1, Fraction(1, 4))
    g = f.specialize_lambda(Fraction(1, 2))
    assert g == LaurentPoly.z_var(1, 0)
    assert g.lambda_degree() == 0


def test_eval_numeric_agrees_with_exact_substitution() -> None:
    rng = random.Random(205)
    for _ in range(60):
        f = random_laurent(rng, 2, rng.randint(1, 5))
        z = [complex(rng.uniform(0.5, 1.5), rng.uniform(-0.5, 0.5)) for _ in range(2)]
        lam = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        direct = f.eval_numeric(z, lam)
        by_terms = sum(
            complex(f.coeff(e).rational_value())
            * z[0] ** e[0]
            * z[1] ** e[1]
            * lam ** e[2]
            for e in f.support()
        )
        assert abs(direct - by_terms) < 1e-9


def test_determinant_matches_permutation_sum() -> None:
    rng = random.Random(206)
    for n in (1, 2, 3, 4, 5):
        for _ in range(12 if n < 5 else 4):
            entries = {}
            for i in range(n):
                for j in range(n):
                    if rng.random() < 0.75:
                        entries[(i, j)] = random_laurent(rng, 1, rng.randint(1, 2), span=1, lmax=1)
            m = LaurentMatrix(1, [f"r{i}" for i in range(n)], entries)
            assert m.determinant(cap=8) == det_by_permutations(m)


def test_determinant_cap_enforced() -> None:
    n = 4
    entries = {(i, i): LaurentPoly.const(1, 1) for i in range(n)}
    m = LaurentMatrix(1, [f"r{i}" for i in range(n)], entries)
    with pytest.raises(CapExceeded):
        m.determinant(cap=3)


def test_monomial_normalization() -> None:
    f = LaurentPoly.term(2, (1, -1, 2), Fraction(-3, 4))
    assert f.is_monomial()
    g = f.normalize_monomial_unit()
    assert g.support() == [(0, 0, 0)]
    assert g.coeff((0, 0, 0)).rational_value() == Fraction(-3, 4)


def test_lambda_coefficient_reassembles() -> None:
    rng = random.Random(207)
    for _ in range(50):
        f = random_laurent(rng, 2, rng.randint(1, 6))
        rebuilt = LaurentPoly.zero(2)
        for k in range(f.lambda_degree() + 1):
            rebuilt = rebuilt + f.lambda_coefficient(k) * LaurentPoly.lam(2, k)
        assert rebuilt == f
