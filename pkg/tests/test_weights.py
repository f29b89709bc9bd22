"""Weight certificates: assignment minima versus actual expanded facials."""

from __future__ import annotations

import random
from fractions import Fraction

from blochcert.floquet import dispersion, expanded_dispersion, floquet_matrix
from blochcert.graphs import Labeling, build_named, cells, expanded_name, q_expand
from blochcert.polytope import contracted_dilation, exposing_vector_map, hull
from blochcert.weights import (
    FaceCertificate,
    assignment_minimum,
    check_face_certificate,
    entry_min_weights,
    face_expansion_certificate,
)

from oracles import random_fraction, support_min


def zero_potential(c: Labeling) -> Labeling:
    return Labeling({v: 0 for v in c.potential}, dict(c.edge_labels))


def certified_cases():
    rng = random.Random(701)
    out = []
    for name, d, Q in [("dice", 2, (2, 1)), ("honeycomb_diamond", 2, (2, 1))]:
        g, c = build_named(name, d)
        subs = {s: random_fraction(rng) for s in sorted(c.symbols()) if not s.startswith("V_")}
        out.append((g, c.substitute(subs), Q))
    return out


def test_assignment_minimum_bounds_every_facet_offset() -> None:
    for g, c, Q in certified_cases():
        czero = zero_potential(c)
        m_zero = floquet_matrix(g, czero)
        f0 = dispersion(g, czero)
        p = hull(f0.support())
        for face in p.facets():
            ew = tuple(-x for x in face.w)
            offset = support_min(f0, ew)
            omega = entry_min_weights(m_zero, ew)
            a_star = assignment_minimum(omega)
            assert a_star is not None
            assert a_star <= offset


def test_certificates_pin_expanded_facials() -> None:
    """A potential-safe facet certificate forces the expanded facial to
    ignore the potential: the symbolic-potential facial must equal the
    zero-potential facial at the rescaled exposing vector."""
    for g, c, Q in certified_cases():
        czero = zero_potential(c)
        m_zero = floquet_matrix(g, czero)
        f0 = dispersion(g, czero)
        p = hull(f0.support())

        vals_sym = {expanded_name(k, v): "V_" + expanded_name(k, v)
                    for k in cells(Q) for v in g.vertices}
        qe_sym = q_expand(g, c, Q, vals_sym)
        fq_sym = expanded_dispersion(qe_sym, cap=16)

        vals_zero = {expanded_name(k, v): 0 for k in cells(Q) for v in g.vertices}
        qe_zero = q_expand(g, c, Q, vals_zero)
        fq_zero = expanded_dispersion(qe_zero, cap=16)

        pot_symbols = sorted(fq_sym.parameter_symbols())
        assert pot_symbols

        safe_seen = 0
        for face in p.facets():
            ew = tuple(-x for x in face.w)
            offset = support_min(f0, ew)
            cert = face_expansion_certificate(m_zero, ew, offset)
            if isinstance(cert, str):
                continue
            assert check_face_certificate(m_zero, cert, offset) == []
            safe_seen += 1
            big_ew = exposing_vector_map(ew, Q)
            fac_sym = fq_sym.facial_polynomial(big_ew)
            fac_zero = fq_zero.facial_polynomial(big_ew)
            assert not fac_sym.mentions_any(pot_symbols)
            assert fac_sym == fac_zero
        assert safe_seen >= 2


def test_tampered_certificate_is_rejected() -> None:
    g, c, Q = certified_cases()[0]
    czero = zero_potential(c)
    m_zero = floquet_matrix(g, czero)
    f0 = dispersion(g, czero)
    p = hull(f0.support())
    for face in p.facets():
        ew = tuple(-x for x in face.w)
        offset = support_min(f0, ew)
        cert = face_expansion_certificate(m_zero, ew, offset)
        if isinstance(cert, str):
            continue
        forged = FaceCertificate(
            w=cert.w,
            assignment_min=cert.assignment_min - 1,
            face_offset=cert.face_offset - 1,
            potential_min=cert.potential_min,
            margin=cert.margin,
        )
        assert check_face_certificate(m_zero, forged, offset) != []
        break


def test_zero_context_expansion_polytope_is_the_dilation() -> None:
    for g, c, Q in certified_cases():
        czero = zero_potential(c)
        f0 = dispersion(g, czero)
        vals_zero = {expanded_name(k, v): 0 for k in cells(Q) for v in g.vertices}
        qe_zero = q_expand(g, czero, Q, vals_zero)
        fq_zero = expanded_dispersion(qe_zero, cap=16)
        dilated = contracted_dilation(hull(f0.support()), Q)
        assert sorted(hull(fq_zero.support()).vertices()) == sorted(dilated.vertices())
