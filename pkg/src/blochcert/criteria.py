"""Reducibility calculus for dispersion polynomials under lattice expansion.

Facts are claims about members of expansion families: the zero-potential or
given-potential dispersion polynomial, one of its facial polynomials, or an
eigenvalue specialization, at the base or at a componentwise divisor of the
expansion order.  Rules consume facts whose premises are recorded by id, so
every derivation replays from the stored inputs alone.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import serialize
from .floquet import DEFAULT_CAP, dispersion, expanded_dispersion, floquet_matrix
from .graphs import (
    Labeling,
    PeriodicGraph,
    QExpansion,
    expanded_name,
    potential_is_periodic_mod,
    q_expand,
    require_valid,
)
from .intlat import gcd_list, lattice_basis, left_kernel
from .laurent import LaurentMatrix, LaurentPoly
from .params import ParamPoly
from .polytope import (
    Face,
    IntegralPolytope,
    contracted_dilation,
    exposing_vector_map,
    hull,
    strong_chain_exists,
)
from .weights import (
    MAX_CERT_SIZE,
    assignment_minimum,
    entry_min_weights,
    potential_insertion_minimum,
)

CLAIM_IRR = "Irreducible"
CLAIM_OHR = "OnlyHomotheticallyReducible"
CLAIM_PI = "PotentialIndependent"
CLAIM_RED = "Reducible"

AXIOM_KINDS = ("facial_irreducible", "base_irreducible")


# -- support lattice invariant ---------------------------------------------------


def div_j_sigma(f: LaurentPoly, j: int, sigma: Iterable[int]) -> int:
    """Nonnegative generator of the j-th coordinates of support-lattice points
    whose other sigma coordinates vanish.  Variable indices are 1-based."""
    sig = sorted(set(int(i) for i in sigma))
    if j not in sig:
        raise ValueError("j must belong to sigma")
    if any(i < 1 or i > f.nz for i in sig):
        raise ValueError("sigma indices out of range")
    pts = f.support()
    if not pts:
        raise ValueError("zero polynomial has no divisor invariant")
    basis = lattice_basis(pts)
    if not basis:
        return 0
    cols = [i - 1 for i in sig if i != j]
    if cols:
        m = [[row[c] for c in cols] for row in basis]
        ker = left_kernel(m, width=len(cols))
        lattice = [
            [
                sum(y[r] * basis[r][c] for r in range(len(basis)))
                for c in range(len(basis[0]))
            ]
            for y in ker
        ]
    else:
        lattice = basis
    values = [row[j - 1] for row in lattice]
    return abs(gcd_list(values)) if values else 0


# -- Newton polytope shape tests -------------------------------------------------


@dataclass(frozen=True)
class ShapeReport:
    """Outcome of a structural test on a Newton polytope."""

    holds: bool
    kind: str | None
    reason: str
    data: dict


def _pairwise_vertex_gcd(p: IntegralPolytope) -> int:
    g = 0
    verts = p.vertices()
    for a, b in itertools.combinations(verts, 2):
        for x, y in zip(a, b):
            g = math.gcd(g, abs(x - y))
    return g


def pyramid_irreducible(f: LaurentPoly) -> ShapeReport:
    """Structural irreducibility from the Newton polytope alone.

    A polynomial with at least two terms, not divisible by the eigenvalue
    variable, is irreducible when its polytope is a height-1 pyramid over a
    facet (such polytopes have no nontrivial Minkowski summand) or a simplex
    whose pairwise vertex differences have componentwise gcd 1 (so no shrunk
    homothet is a lattice summand).  Monomial factors are then units.
    """
    supp = f.support()
    if len(supp) < 2:
        return ShapeReport(False, None, "fewer than two terms", {})
    if min(e[-1] for e in supp) > 0:
        return ShapeReport(False, None, "divisible by the eigenvalue variable", {})
    p = hull(supp)
    for apex, base in p.pyramid_candidates():
        if p.pyramid_height(apex) == 1:
            return ShapeReport(
                True,
                "height1_pyramid",
                "height-1 pyramid polytopes are Minkowski indecomposable",
                {"apex": list(apex), "base_normal": list(base.w)},
            )
    if p.is_simplex():
        g = _pairwise_vertex_gcd(p)
        if g == 1:
            return ShapeReport(
                True,
                "unit_gcd_simplex",
                "simplex summands are homothets and gcd 1 blocks proper ratios",
                {"vertex_difference_gcd": 1},
            )
        return ShapeReport(
            False, None, f"simplex vertex differences share the factor {g}", {}
        )
    return ShapeReport(False, None, "polytope is neither a unit pyramid nor a simplex", {})


def shape_only_homothetic(f: LaurentPoly) -> ShapeReport:
    """Only-homothetic reducibility from the polytope shape.

    Segments, simplices, and height-1 pyramids admit only homothetic Minkowski
    summands, so every factorization splits the polytope homothetically.
    """
    supp = f.support()
    if len(supp) < 2:
        return ShapeReport(False, None, "fewer than two terms", {})
    p = hull(supp)
    if p.dim <= 1:
        return ShapeReport(True, "segment", "summands of a segment are parallel segments", {})
    if p.is_simplex():
        return ShapeReport(True, "simplex", "summands of a simplex are homothets", {})
    for apex, base in p.pyramid_candidates():
        if p.pyramid_height(apex) == 1:
            return ShapeReport(
                True,
                "height1_pyramid",
                "height-1 pyramid polytopes are Minkowski indecomposable",
                {"apex": list(apex)},
            )
    return ShapeReport(False, None, "polytope shape gives no homothety constraint", {})


def potential_independent(face_poly: LaurentPoly, potential_symbols: Iterable[str]) -> bool:
    """True when no potential symbol appears in the facial coefficients."""
    return not face_poly.mentions_any(potential_symbols)


# -- flat bands -------------------------------------------------------------------


def _upoly_trim(p: list[Fraction]) -> list[Fraction]:
    while p and p[-1] == 0:
        p.pop()
    return p


def _upoly_monic(p: list[Fraction]) -> list[Fraction]:
    lead = p[-1]
    return [c / lead for c in p]


def _upoly_mod(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    a = list(a)
    db, lb = len(b) - 1, b[-1]
    while len(a) - 1 >= db and a:
        q = a[-1] / lb
        shift = len(a) - 1 - db
        for i, c in enumerate(b):
            a[shift + i] -= q * c
        _upoly_trim(a)
    return a


def _upoly_gcd(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    a, b = _upoly_trim(list(a)), _upoly_trim(list(b))
    while b:
        a, b = b, _upoly_mod(a, b)
    return _upoly_monic(a) if a else []


def _upoly_eval(p: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _upoly_div_linear(p: Sequence[Fraction], r: Fraction) -> list[Fraction] | None:
    """Divide by (t - r); None unless the remainder vanishes."""
    acc = Fraction(0)
    out: list[Fraction] = [Fraction(0)] * (len(p) - 1)
    for i in range(len(p) - 1, 0, -1):
        acc = p[i] + acc * r
        out[i - 1] = acc
    if p[0] + acc * r != 0:
        return None
    return out


def _rational_roots(g: list[Fraction]) -> list[tuple[Fraction, int]]:
    """Rational roots with multiplicity: float candidates, exact confirmation."""
    roots: list[tuple[Fraction, int]] = []
    work = list(g)
    candidates: list[Fraction] = [Fraction(0)]
    if len(work) > 1:
        coeffs = [float(c) for c in reversed(work)]
        for x in np.roots(coeffs):
            # multiple real roots surface as complex clusters, so keep every
            # real part as a candidate; confirmation below is exact anyway
            for den in (1, 6, 24, 840, 10**6):
                candidates.append(Fraction(x.real).limit_denominator(den))
            candidates.append(Fraction(round(x.real)))
    seen = set()
    for r in candidates:
        if r in seen:
            continue
        seen.add(r)
        mult = 0
        while len(work) > 1 and _upoly_eval(work, r) == 0:
            nxt = _upoly_div_linear(work, r)
            if nxt is None:
                break
            work = nxt
            mult += 1
        if mult:
            roots.append((r, mult))
    return sorted(roots)


def flat_bands(f: LaurentPoly) -> tuple[list[tuple[Fraction, int]], LaurentPoly]:
    """Eigenvalue-linear factors (lambda - r)^k of f, with the exact quotient.

    Groups terms by z-monomial, takes the gcd of the class polynomials in the
    eigenvalue variable, extracts its rational roots, and confirms each factor
    by exact division of f.  Requires rational coefficients.
    """
    if f.parameter_symbols():
        raise ValueError("flat-band scan needs rational coefficients")
    if f.is_zero():
        raise ValueError("flat-band scan needs a nonzero polynomial")
    classes: dict[tuple[int, ...], dict[int, Fraction]] = {}
    for e, c in f.terms.items():
        classes.setdefault(e[:-1], {})[e[-1]] = c.rational_value()
    g: list[Fraction] = []
    for byl in classes.values():
        deg = max(byl)
        p = [byl.get(i, Fraction(0)) for i in range(deg + 1)]
        g = _upoly_gcd(g, p) if g else _upoly_trim(p)
        if len(g) == 1:
            return [], f
    bands = _rational_roots(g)
    quotient = f
    for r, mult in bands:
        divisor = LaurentPoly.lam(f.nz) - LaurentPoly.const(f.nz, r)
        for _ in range(mult):
            nxt = quotient.exact_divide(divisor)
            if nxt is None:
                raise RuntimeError("class gcd root failed exact division")
            quotient = nxt
    return bands, quotient


# -- facts ------------------------------------------------------------------------


@dataclass(frozen=True)
class Subject:
    """One family member: context, expansion orders, optional face and level."""

    context: str
    member: tuple[int, ...]
    face_w: tuple[int, ...] | None
    lambda0: str | None

    def is_base(self) -> bool:
        return all(q == 1 for q in self.member)

    def render(self) -> str:
        tag = "given-potential" if self.context == "given" else "zero-potential"
        if self.is_base():
            s = f"dispersion[{tag}]"
        else:
            s = f"expansion[{tag},Q=({','.join(str(q) for q in self.member)})]"
        if self.face_w is not None:
            s += f"|face({','.join(str(x) for x in self.face_w)})"
        if self.lambda0 is not None:
            s += f"|lambda0={self.lambda0}"
        return s

    def to_json_dict(self) -> dict:
        return {
            "context": self.context,
            "member": list(self.member),
            "face_w": None if self.face_w is None else list(self.face_w),
            "lambda0": self.lambda0,
        }

    @staticmethod
    def from_json_dict(data: Mapping) -> "Subject":
        return Subject(
            context=str(data["context"]),
            member=tuple(int(q) for q in data["member"]),
            face_w=None
            if data.get("face_w") is None
            else tuple(int(x) for x in data["face_w"]),
            lambda0=data.get("lambda0"),
        )


RULE_STATEMENTS = {
    "axiom": "externally supplied input, recorded verbatim and trusted",
    "indecomposable_shape": (
        "a polynomial with two or more terms, not divisible by the eigenvalue "
        "variable, whose Newton polytope is a height-1 pyramid or a simplex "
        "with unit vertex-difference gcd, is irreducible"
    ),
    "shape_only_homothetic": (
        "a polynomial whose Newton polytope is a segment, a simplex, or a "
        "height-1 pyramid factors only with homothetic Newton polytopes"
    ),
    "irreducible_weakening": (
        "an irreducible polynomial is only homothetically reducible"
    ),
    "restriction_to_divisor": (
        "if the expanded polynomial at order B is irreducible and the potential "
        "is periodic for a componentwise divisor A of B, the order-A polynomial "
        "is irreducible"
    ),
    "pure_power_coprime": (
        "an irreducible base with a pure-power term in each expanded direction, "
        "a pure eigenvalue term, and orders coprime to those pure exponents "
        "stays irreducible at the expanded order"
    ),
    "coprime_divisor_step": (
        "if every proper sub-expansion inside sigma is irreducible, the support "
        "has a point with zero sigma coordinates, and some order in sigma is "
        "coprime to the support-lattice divisor of that direction, the sigma "
        "expansion is irreducible"
    ),
    "pairwise_coprime_expansion": (
        "if every k-subset expansion is irreducible and every k+1 of the orders "
        "are jointly coprime, the full expansion is irreducible"
    ),
    "expansion_only_homothetic": (
        "only-homothetic reducibility of the family base passes to every "
        "expansion member, including facial and specialized variants"
    ),
    "weight_certificate": (
        "entry-weight assignment bounds force every minimal-weight monomial of "
        "the expanded determinant to avoid potential terms, so the facial "
        "polynomial matches the zero-potential one at every expansion order"
    ),
    "facet_potential_transfer": (
        "a facial polynomial certified potential-independent equals its "
        "zero-potential twin, so the twin's classification applies"
    ),
    "expansion_facet_chain": (
        "when every vertex pair of the expanded Newton polytope is joined by a "
        "strong chain of facets whose facial polynomials are potential-free and "
        "only homothetically reducible, the expanded polynomial is only "
        "homothetically reducible"
    ),
    "irreducible_facial_upgrade": (
        "an only-homothetically-reducible polynomial with an irreducible, "
        "non-monomial facial polynomial is irreducible"
    ),
    "flat_band_factor": (
        "a rational eigenvalue whose linear factor exactly divides the "
        "dispersion polynomial is a flat band"
    ),
}


@dataclass
class Fact:
    """One derived claim with machine-checkable provenance."""

    id: int
    subject: Subject
    claim: str
    rule: str
    premises: tuple[int, ...]
    statement: str
    data: dict

    def to_json_dict(self) -> dict:
        return {
            "id": self.id,
            "subject": self.subject.render(),
            "subject_data": self.subject.to_json_dict(),
            "claim": self.claim,
            "rule": self.rule,
            "premises": list(self.premises),
            "rule_statement": self.statement,
            "data": self.data,
        }


class FactStore:
    """Insertion-ordered fact set, one fact per (subject, claim)."""

    def __init__(self) -> None:
        self.facts: list[Fact] = []
        self._index: dict[tuple[Subject, str], Fact] = {}

    def get(self, subject: Subject, claim: str) -> Fact | None:
        return self._index.get((subject, claim))

    def has(self, subject: Subject, claim: str) -> bool:
        return (subject, claim) in self._index

    def add(
        self,
        subject: Subject,
        claim: str,
        rule: str,
        premises: Sequence[int],
        data: dict,
        statement: str | None = None,
    ) -> tuple[Fact, bool]:
        existing = self._index.get((subject, claim))
        if existing is not None:
            return existing, False
        fact = Fact(
            id=len(self.facts) + 1,
            subject=subject,
            claim=claim,
            rule=rule,
            premises=tuple(premises),
            statement=RULE_STATEMENTS[rule] if statement is None else statement,
            data=data,
        )
        self.facts.append(fact)
        self._index[(subject, claim)] = fact
        return fact, True


# -- analysis options and state ---------------------------------------------------


@dataclass(frozen=True)
class AnalysisOptions:
    """Knobs for one analysis run."""

    lambda0: Fraction | None = None
    axioms: tuple[dict, ...] = ()
    div_zero_as_q: bool = False
    cap: int = DEFAULT_CAP
    flat_band_scan: bool = True


def validate_axioms(axioms: Sequence[Mapping]) -> list[dict]:
    out = []
    for entry in axioms:
        kind = entry.get("grants")
        text = entry.get("text")
        if kind not in AXIOM_KINDS:
            raise ValueError(f"unknown axiom kind {kind!r}; expected one of {AXIOM_KINDS}")
        if not isinstance(text, str) or not text.strip():
            raise ValueError("axiom entries need a nonempty 'text'")
        clean: dict = {"grants": kind, "text": text}
        if "faces" in entry and entry["faces"] is not None:
            clean["faces"] = [[int(x) for x in f] for f in entry["faces"]]
        out.append(clean)
    return out


@dataclass
class FacetInfo:
    """Zero-potential base facet with its expansion weight analysis."""

    ew: tuple[int, ...]
    offset: int
    face: Face
    facial: LaurentPoly
    a_star: int | None
    p_star: int | None
    bound_tight: bool
    containment_ok: bool
    potential_safe: bool
    pyramidal: bool

    def weight_json(self) -> dict:
        return {
            "ew": list(self.ew),
            "offset": self.offset,
            "assignment_min": self.a_star,
            "potential_min": self.p_star,
            "containment": self.containment_ok,
            "potential_safe": self.potential_safe,
            "pyramidal": self.pyramidal,
        }


def zero_potential_labeling(g: PeriodicGraph, c: Labeling) -> Labeling:
    pot = {v: ParamPoly.const(0) for v in g.vertices}
    return Labeling.build(pot, dict(c.edge_labels))


class _State:
    """Everything analyze and replay share: polytopes, facets, family polys."""

    def __init__(self, qe: QExpansion, options: AnalysisOptions):
        require_valid(qe.expanded, qe.labeling)
        self.qe = qe
        self.g = qe.base
        self.options = options
        self.Q = tuple(qe.Q)
        self.d = qe.base.d
        self.m = len(qe.base.vertices)
        self.lam0 = options.lambda0
        self.lam0_str = (
            None if self.lam0 is None else serialize.fraction_to_text(self.lam0)
        )
        self.axioms = validate_axioms(options.axioms)

        self.czero = zero_potential_labeling(self.g, qe.base_labeling)
        self.base_periodic = potential_is_periodic_mod(qe, (1,) * qe.base.d)
        self.potential_symbols = frozenset(
            s for p in qe.labeling.potential.values() for s in p.symbols()
        )

        d_zero = dispersion(self.g, self.czero, cap=options.cap)
        m_zero = floquet_matrix(self.g, self.czero)
        if self.lam0 is not None:
            d_zero = d_zero.specialize_lambda(self.lam0)
            m_zero = LaurentMatrix(
                m_zero.nz,
                m_zero.labels,
                {k: v.specialize_lambda(self.lam0) for k, v in m_zero.entries.items()},
            )
        if d_zero.is_zero():
            raise ValueError("zero-potential dispersion polynomial vanishes")
        self.d_zero = d_zero
        self.m_zero = m_zero

        self.d_given_base: LaurentPoly | None = None
        if self.base_periodic:
            zero_cell = (0,) * self.d
            pot = {
                v: qe.labeling.potential[expanded_name(zero_cell, v)]
                for v in self.g.vertices
            }
            cg = Labeling.build(pot, dict(qe.base_labeling.edge_labels))
            dg = dispersion(self.g, cg, cap=options.cap)
            self.d_given_base = (
                dg if self.lam0 is None else dg.specialize_lambda(self.lam0)
            )

        self.newt = hull(self.d_zero.support())
        self.top_lambda = max(e[-1] for e in self.d_zero.support())
        self.facets = self._facet_infos()
        self.dilated = contracted_dilation(self.newt, self.Q)

    def _facet_infos(self) -> list[FacetInfo]:
        out = []
        supp = self.d_zero.support()
        small = self.m <= MAX_CERT_SIZE
        for face in self.newt.facets():
            ew = tuple(-x for x in face.w)
            offset = min(sum(e * w for e, w in zip(pt, ew)) for pt in supp)
            facial = self.d_zero.facial_polynomial(ew)
            a_star = p_star = None
            if small:
                omega = entry_min_weights(self.m_zero, ew)
                a_star = assignment_minimum(omega)
                p_star = potential_insertion_minimum(omega)
            tight = a_star is not None and a_star == offset
            contain = tight and (p_star is None or p_star >= offset)
            safe = tight and (p_star is None or p_star > offset)
            pyramidal = any(
                e[-1] == self.top_lambda for e in facial.support()
            )
            out.append(
                FacetInfo(ew, offset, face, facial, a_star, p_star, tight, contain, safe, pyramidal)
            )
        out.sort(key=lambda fi: fi.ew)
        return out

    # -- families ------------------------------------------------------------

    def base_member(self) -> tuple[int, ...]:
        return (1,) * self.d

    def all_members(self) -> list[tuple[int, ...]]:
        out = {
            tuple(self.Q[i] if i in sigma else 1 for i in range(self.d))
            for r in range(self.d + 1)
            for sigma in itertools.combinations(range(self.d), r)
        }
        return sorted(out)

    def member_exists(self, context: str, member: tuple[int, ...]) -> bool:
        if context == "zero":
            return True
        return potential_is_periodic_mod(self.qe, member)

    def product_capable(self, context: str) -> bool:
        return context == "zero" or self.base_periodic

    def family_base_poly(self, context: str, face_w: tuple[int, ...] | None) -> LaurentPoly | None:
        if context == "zero":
            base = self.d_zero
        elif self.base_periodic:
            base = self.d_given_base
        else:
            return None
        if base is None:
            return None
        return base if face_w is None else base.facial_polynomial(face_w)

    def subject(
        self,
        context: str,
        member: tuple[int, ...],
        face_w: tuple[int, ...] | None,
    ) -> Subject:
        return Subject(context, member, face_w, self.lam0_str)


# -- rules -------------------------------------------------------------------------


def _family_iter(state: _State) -> list[tuple[str, tuple[int, ...] | None]]:
    faces: list[tuple[int, ...] | None] = [None] + [fi.ew for fi in state.facets]
    return [(ctx, fw) for ctx in ("zero", "given") for fw in faces]


def _seed_shapes(state: _State, store: FactStore) -> None:
    base = state.base_member()
    for ctx, fw in _family_iter(state):
        f = state.family_base_poly(ctx, fw)
        if f is None or f.is_zero() or f.is_monomial():
            continue
        rep = pyramid_irreducible(f)
        if rep.holds:
            store.add(
                state.subject(ctx, base, fw),
                CLAIM_IRR,
                "indecomposable_shape",
                (),
                {"kind": rep.kind, **rep.data},
            )
        rep = shape_only_homothetic(f)
        if rep.holds:
            store.add(
                state.subject(ctx, base, fw),
                CLAIM_OHR,
                "shape_only_homothetic",
                (),
                {"kind": rep.kind, **rep.data},
            )


def _base_facet_ew(state: _State) -> tuple[int, ...] | None:
    base = (0,) * state.d + (1,)
    return base if any(fi.ew == base for fi in state.facets) else None


def _seed_axioms(state: _State, store: FactStore) -> None:
    base = state.base_member()
    base_ew = _base_facet_ew(state)
    for entry in state.axioms:
        if entry["grants"] == "base_irreducible":
            store.add(
                state.subject("zero", base, None),
                CLAIM_IRR,
                "axiom",
                (),
                {"grants": entry["grants"]},
                statement=entry["text"],
            )
            continue
        if "faces" in entry:
            faces = [tuple(f) for f in entry["faces"]]
            known = {fi.ew for fi in state.facets}
            for fw in faces:
                if fw not in known:
                    raise ValueError(f"axiom names unknown facet {list(fw)}")
        else:
            faces = [fi.ew for fi in state.facets if fi.ew != base_ew]
        for fw in faces:
            store.add(
                state.subject("zero", base, fw),
                CLAIM_IRR,
                "axiom",
                (),
                {"grants": entry["grants"], "face": list(fw)},
                statement=entry["text"],
            )


def _seed_weight_facts(state: _State, store: FactStore) -> None:
    for fi in state.facets:
        if fi.potential_safe:
            store.add(
                state.subject("given", state.Q, fi.ew),
                CLAIM_PI,
                "weight_certificate",
                (),
                fi.weight_json(),
            )


def _rule_lemma_red(state: _State, store: FactStore) -> bool:
    changed = False
    for ctx, fw in _family_iter(state):
        members = [a for a in state.all_members() if state.member_exists(ctx, a)]
        for a, b in itertools.permutations(members, 2):
            if a == b or any(x % y for x, y in zip(b, a)):
                continue
            fb = store.get(state.subject(ctx, b, fw), CLAIM_IRR)
            if fb is None or store.has(state.subject(ctx, a, fw), CLAIM_IRR):
                continue
            _, added = store.add(
                state.subject(ctx, a, fw),
                CLAIM_IRR,
                "restriction_to_divisor",
                (fb.id,),
                {"from_member": list(b), "to_member": list(a)},
            )
            changed |= added
    return changed


def _pure_powers(f: LaurentPoly, d: int) -> dict[int, list[int]]:
    """For each 1-based direction, nonzero pure exponents (other z-coords zero)."""
    out: dict[int, list[int]] = {i: [] for i in range(1, d + 1)}
    for e in f.support():
        nonzero = [i for i in range(d) if e[i] != 0]
        if len(nonzero) == 1:
            out[nonzero[0] + 1].append(e[nonzero[0]])
    for i in out:
        out[i] = sorted(set(out[i]), key=lambda a: (abs(a), a < 0))
    return out


def _guard_point(f: LaurentPoly, sigma: Iterable[int]) -> tuple[int, ...] | None:
    """A support point whose sigma z-coordinates all vanish."""
    sig = sorted(set(sigma))
    for e in f.support():
        if all(e[i - 1] == 0 for i in sig):
            return e
    return None


def _rule_cor_coprime(state: _State, store: FactStore, blockers: dict) -> bool:
    changed = False
    for ctx, fw in _family_iter(state):
        if not state.product_capable(ctx):
            continue
        f = state.family_base_poly(ctx, fw)
        if f is None:
            continue
        base_fact = store.get(state.subject(ctx, state.base_member(), fw), CLAIM_IRR)
        if base_fact is None:
            continue
        guard = _guard_point(f, range(1, state.d + 1))
        pure = _pure_powers(f, state.d)
        for member in state.all_members():
            if member == state.base_member():
                continue
            if not state.member_exists(ctx, member):
                continue
            if store.has(state.subject(ctx, member, fw), CLAIM_IRR):
                continue
            if guard is None:
                _note(blockers, state.subject(ctx, member, fw), "pure-power rule: no support point free of every z-variable")
                continue
            chosen: dict[int, int] = {}
            ok = True
            for i in range(1, state.d + 1):
                if member[i - 1] == 1:
                    continue
                good = [a for a in pure[i] if math.gcd(member[i - 1], a) == 1]
                if not good:
                    have = pure[i] or ["none"]
                    _note(
                        blockers,
                        state.subject(ctx, member, fw),
                        f"pure-power rule: no pure term in direction {i} has exponent coprime to {member[i - 1]} (pure exponents: {have})",
                    )
                    ok = False
                    break
                chosen[i] = good[0]
            if not ok:
                continue
            _, added = store.add(
                state.subject(ctx, member, fw),
                CLAIM_IRR,
                "pure_power_coprime",
                (base_fact.id,),
                {
                    "member": list(member),
                    "pure_exponents": {str(i): a for i, a in chosen.items()},
                    "guard_point": list(guard),
                },
            )
            changed |= added
    return changed


def _sigma_of_member(member: tuple[int, ...], Q: tuple[int, ...]) -> list[int]:
    return [i + 1 for i in range(len(Q)) if member[i] != 1]


def _rule_lemma_coprime(state: _State, store: FactStore, blockers: dict) -> bool:
    changed = False
    for ctx, fw in _family_iter(state):
        if not state.product_capable(ctx):
            continue
        f = state.family_base_poly(ctx, fw)
        if f is None:
            continue
        for member in state.all_members():
            if member == state.base_member():
                continue
            if not state.member_exists(ctx, member):
                continue
            subject = state.subject(ctx, member, fw)
            if store.has(subject, CLAIM_IRR):
                continue
            sigma = [i for i in range(1, state.d + 1) if member[i - 1] != 1]
            premise_ids = []
            missing = False
            for r in range(len(sigma)):
                for sub in itertools.combinations(sigma, r):
                    sub_member = tuple(
                        state.Q[i - 1] if i in sub else 1 for i in range(1, state.d + 1)
                    )
                    pf = store.get(state.subject(ctx, sub_member, fw), CLAIM_IRR)
                    if pf is None:
                        missing = True
                        break
                    premise_ids.append(pf.id)
                if missing:
                    break
            if missing:
                continue
            guard = _guard_point(f, sigma)
            if guard is None:
                _note(blockers, subject, f"divisor rule: no support point with zero coordinates on sigma={sigma}")
                continue
            hit = None
            divs = {}
            for i in sigma:
                b = div_j_sigma(f, i, sigma)
                divs[str(i)] = b
                q_i = member[i - 1]
                if b == 0:
                    if state.options.div_zero_as_q and q_i == 1:
                        hit = (i, b)
                        break
                    _note(blockers, subject, f"divisor rule: Div_{i},sigma={sigma} is 0, blocked" + ("" if state.options.div_zero_as_q else " (zero-divisor convention off)"))
                    continue
                if math.gcd(q_i, b) == 1:
                    hit = (i, b)
                    break
                _note(blockers, subject, f"divisor rule: gcd(q_{i}={q_i}, Div={b}) > 1 for sigma={sigma}")
            if hit is None:
                continue
            _, added = store.add(
                subject,
                CLAIM_IRR,
                "coprime_divisor_step",
                tuple(sorted(set(premise_ids))),
                {
                    "sigma": sigma,
                    "witness_direction": hit[0],
                    "div": hit[1],
                    "order": member[hit[0] - 1],
                    "divs": divs,
                    "guard_point": list(guard),
                },
            )
            changed |= added
    return changed


def _rule_th1(state: _State, store: FactStore, blockers: dict) -> bool:
    changed = False
    d, Q = state.d, state.Q
    for ctx, fw in _family_iter(state):
        if not state.product_capable(ctx):
            continue
        if state.family_base_poly(ctx, fw) is None:
            continue
        top = state.subject(ctx, Q, fw)
        if store.has(top, CLAIM_IRR) or not state.member_exists(ctx, Q):
            continue
        base_fact = store.get(state.subject(ctx, state.base_member(), fw), CLAIM_IRR)
        if base_fact is None:
            continue
        for k in range(1, d):
            premise_ids = [base_fact.id]
            missing = False
            for sigma in itertools.combinations(range(1, d + 1), k):
                member = tuple(Q[i - 1] if i in sigma else 1 for i in range(1, d + 1))
                pf = store.get(state.subject(ctx, member, fw), CLAIM_IRR)
                if pf is None:
                    missing = True
                    break
                premise_ids.append(pf.id)
            if missing:
                continue
            bad = None
            for rho in itertools.combinations(range(1, d + 1), k + 1):
                g = gcd_list([Q[i - 1] for i in rho])
                if g != 1:
                    bad = (rho, g)
                    break
            if bad is not None:
                _note(
                    blockers,
                    top,
                    f"pairwise-coprime rule (k={k}): the orders in directions "
                    f"{list(bad[0])} share the factor {bad[1]}",
                )
                continue
            _, added = store.add(
                top,
                CLAIM_IRR,
                "pairwise_coprime_expansion",
                tuple(sorted(set(premise_ids))),
                {"k": k, "orders": list(Q)},
            )
            changed |= added
            break
    return changed


def _rule_ohr_weakening(state: _State, store: FactStore) -> bool:
    changed = False
    for fact in list(store.facts):
        if fact.claim != CLAIM_IRR:
            continue
        if store.has(fact.subject, CLAIM_OHR):
            continue
        _, added = store.add(
            fact.subject, CLAIM_OHR, "irreducible_weakening", (fact.id,), {}
        )
        changed |= added
    return changed


def _rule_ohr_expansion(state: _State, store: FactStore) -> bool:
    changed = False
    for ctx, fw in _family_iter(state):
        if not state.product_capable(ctx):
            continue
        base_fact = store.get(state.subject(ctx, state.base_member(), fw), CLAIM_OHR)
        if base_fact is None:
            continue
        for member in state.all_members():
            if member == state.base_member() or not state.member_exists(ctx, member):
                continue
            subject = state.subject(ctx, member, fw)
            if store.has(subject, CLAIM_OHR):
                continue
            _, added = store.add(
                subject,
                CLAIM_OHR,
                "expansion_only_homothetic",
                (base_fact.id,),
                {"member": list(member)},
            )
            changed |= added
    return changed


def _rule_facial_transfer(state: _State, store: FactStore) -> bool:
    changed = False
    for fi in state.facets:
        if not fi.potential_safe:
            continue
        pi = store.get(state.subject("given", state.Q, fi.ew), CLAIM_PI)
        if pi is None:
            continue
        for claim in (CLAIM_IRR, CLAIM_OHR):
            src = store.get(state.subject("zero", state.Q, fi.ew), claim)
            if src is None:
                continue
            subject = state.subject("given", state.Q, fi.ew)
            if store.has(subject, claim):
                continue
            _, added = store.add(
                subject,
                claim,
                "facet_potential_transfer",
                (src.id, pi.id),
                {"face": list(fi.ew)},
            )
            changed |= added
    return changed


def _dilated_face(state: _State, fi: FacetInfo) -> Face:
    return state.dilated.face_exposed(exposing_vector_map(fi.ew, state.Q))


def _given_polytope_pinned(state: _State) -> list[str]:
    """Conditions pinning the expanded given-potential polytope to the dilation.

    Containment on every facet confines the support; a potential-safe facet
    through each base vertex supplies the matching vertex of the dilation.
    """
    problems: list[str] = []
    if state.m > MAX_CERT_SIZE:
        return [f"base matrix size {state.m} is above the weight-certificate bound {MAX_CERT_SIZE}"]
    for fi in state.facets:
        if not fi.containment_ok:
            problems.append(
                f"facet {list(fi.ew)}: expansion support not confined "
                f"(assignment min {fi.a_star}, face offset {fi.offset}, potential min {fi.p_star})"
            )
    if problems:
        return problems
    safe = [fi for fi in state.facets if fi.potential_safe]
    uncovered = [
        list(v)
        for v in state.newt.vertices()
        if not any(fi.face.contains_vertex(v) for fi in safe)
    ]
    if uncovered:
        problems.append(
            f"vertices {uncovered} lie on no potential-safe facet, dilation vertices not pinned"
        )
    return problems


def _chain_eligible(state: _State, context: str) -> list[FacetInfo]:
    """Facets whose expanded facial polynomial is pinned for this context.

    With zero potential the expansion is an exact product of base twists, so
    every facet qualifies; with the given potential only potential-safe
    facets have a certified facial identity.
    """
    if context == "zero":
        return list(state.facets)
    return [fi for fi in state.facets if fi.potential_safe]


def _rule_facet_chain(state: _State, store: FactStore, blockers: dict) -> bool:
    changed = False
    for context in ("zero", "given"):
        top = state.subject(context, state.Q, None)
        if store.has(top, CLAIM_OHR):
            continue
        if context == "given":
            problems = _given_polytope_pinned(state)
            if problems:
                for p in problems:
                    _note(blockers, top, f"facet-chain rule: {p}")
                continue
        certified = [
            fi
            for fi in _chain_eligible(state, context)
            if store.has(state.subject(context, state.Q, fi.ew), CLAIM_OHR)
        ]
        uncertified = [fi.ew for fi in state.facets if fi not in certified]
        faces = []
        ew_of_face = {}
        bad = []
        for fi in certified:
            fc = _dilated_face(state, fi)
            if fc.dim != state.dilated.dim - 1:
                bad.append(list(fi.ew))
                continue
            faces.append(fc)
            ew_of_face[fc.vertices] = fi.ew
        if bad:
            _note(blockers, top, f"facet-chain rule: dilated faces {bad} are not facets")
            continue
        chains = []
        failed = None
        verts = state.dilated.vertices()
        if len(verts) < 2:
            _note(blockers, top, "facet-chain rule: the dilated polytope has no vertex pairs")
            continue
        for a, b in itertools.combinations(verts, 2):
            chain = strong_chain_exists(state.dilated, faces, a, b)
            if chain is None:
                failed = (a, b)
                break
            chains.append(
                {
                    "a": list(a),
                    "b": list(b),
                    "faces": [list(ew_of_face[fc.vertices]) for fc in chain],
                }
            )
        if failed is not None:
            _note(
                blockers,
                top,
                "facet-chain rule: no strong chain of classified facets joins "
                f"vertices {list(failed[0])} and {list(failed[1])} "
                f"(unusable facets: {[list(ew) for ew in uncertified]})",
            )
            continue
        premises = []
        for fi in certified:
            if context == "given":
                pi = store.get(state.subject("given", state.Q, fi.ew), CLAIM_PI)
                premises.append(pi.id)
            ohr = store.get(state.subject(context, state.Q, fi.ew), CLAIM_OHR)
            premises.append(ohr.id)
        _, added = store.add(
            top,
            CLAIM_OHR,
            "expansion_facet_chain",
            tuple(sorted(set(premises))),
            {
                "facet_weights": [fi.weight_json() for fi in state.facets],
                "certified_facets": [list(fi.ew) for fi in certified],
                "unused_facets": [list(ew) for ew in uncertified],
                "chains": chains,
            },
        )
        changed |= added
    return changed


def _rule_cor_irred(state: _State, store: FactStore, blockers: dict) -> bool:
    changed = False
    for context in ("zero", "given"):
        fam = state.family_base_poly(context, None)
        if fam is not None and fam.is_monomial():
            continue
        for member in state.all_members():
            if not state.member_exists(context, member):
                continue
            subject = state.subject(context, member, None)
            ohr = store.get(subject, CLAIM_OHR)
            if ohr is None or store.has(subject, CLAIM_IRR):
                continue
            for fi in state.facets:
                irr_face = store.get(state.subject(context, member, fi.ew), CLAIM_IRR)
                if irr_face is None:
                    continue
                if fi.facial.is_monomial():
                    _note(blockers, subject, f"facial-upgrade rule: facial at {list(fi.ew)} is a monomial")
                    continue
                _, added = store.add(
                    subject,
                    CLAIM_IRR,
                    "irreducible_facial_upgrade",
                    (ohr.id, irr_face.id),
                    {"face": list(fi.ew)},
                )
                changed |= added
                break
    return changed


def _note(blockers: dict, subject: Subject, message: str) -> None:
    blockers.setdefault(subject.render(), [])
    if message not in blockers[subject.render()]:
        blockers[subject.render()].append(message)


# -- analysis ----------------------------------------------------------------------


@dataclass
class AnalysisResult:
    """Verdict plus the full machine-checkable certificate.

    blockers explains an Inconclusive verdict; notes keeps every rule
    refusal encountered along the way, whatever the final verdict.
    """

    verdict: str
    certificate: dict
    facts: list[Fact]
    flat_band_list: list[tuple[Fraction, int]]
    blockers: list[str]
    notes: list[str]


def _flat_band_step(
    state: _State, store: FactStore
) -> tuple[list[tuple[Fraction, int]], str]:
    if state.lam0 is not None:
        return [], "not applicable (eigenvalue specialized)"
    if not state.options.flat_band_scan:
        return [], "skipped (disabled)"
    size = state.qe.size()
    if size > state.options.cap:
        return [], f"skipped (expansion size {size} above determinant cap {state.options.cap})"
    d_q = expanded_dispersion(state.qe, cap=state.options.cap)
    if d_q.parameter_symbols():
        return [], "skipped (symbolic coefficients)"
    bands, _ = flat_bands(d_q)
    for r, mult in bands:
        store.add(
            state.subject("given", state.Q, None),
            CLAIM_RED,
            "flat_band_factor",
            (),
            {
                "eigenvalue": serialize.fraction_to_text(r),
                "multiplicity": mult,
            },
        )
    return bands, "completed"


def _run_rules(state: _State, store: FactStore, blockers: dict) -> None:
    for _ in range(64):
        changed = False
        changed |= _rule_lemma_red(state, store)
        changed |= _rule_cor_coprime(state, store, blockers)
        changed |= _rule_lemma_coprime(state, store, blockers)
        changed |= _rule_th1(state, store, blockers)
        changed |= _rule_ohr_weakening(state, store)
        changed |= _rule_ohr_expansion(state, store)
        changed |= _rule_facial_transfer(state, store)
        changed |= _rule_facet_chain(state, store, blockers)
        changed |= _rule_cor_irred(state, store, blockers)
        if not changed:
            return
    raise RuntimeError("rule loop failed to reach a fixpoint")


def _inputs_json(state: _State) -> dict:
    return {
        "graph": serialize.graph_to_json_dict(state.g, state.qe.base_labeling),
        "expanded_potential": serialize.potential_map_to_json(
            {
                name: state.qe.labeling.potential[name]
                for name in state.qe.expanded.vertices
            }
        ),
        "Q": list(state.Q),
        "lambda0": state.lam0_str,
        "axioms": state.axioms,
        "flags": {
            "div_zero_as_q": state.options.div_zero_as_q,
            "cap": state.options.cap,
            "flat_band_scan": state.options.flat_band_scan,
        },
    }


def analyze(qe: QExpansion, options: AnalysisOptions | None = None) -> AnalysisResult:
    """Classify the expanded dispersion polynomial with a replayable certificate."""
    options = options or AnalysisOptions()
    state = _State(qe, options)
    store = FactStore()
    blockers: dict[str, list[str]] = {}

    bands, band_status = _flat_band_step(state, store)
    _seed_shapes(state, store)
    _seed_axioms(state, store)
    _seed_weight_facts(state, store)
    _run_rules(state, store, blockers)

    top = state.subject("given", state.Q, None)
    irr_top = store.get(top, CLAIM_IRR)
    if bands and irr_top is not None:
        raise RuntimeError("soundness breach: flat bands coexist with an irreducibility fact")
    if bands:
        verdict = "ReducibleWithFactors"
    elif irr_top is not None:
        verdict = "Irreducible"
    elif store.has(top, CLAIM_OHR):
        verdict = "OnlyHomotheticallyReducible"
    else:
        verdict = "Inconclusive"

    top_blockers: list[str] = []
    if verdict == "Inconclusive":
        top_blockers = _verdict_blockers(state, store, blockers)

    certificate = {
        "format": "blochcert-certificate/1",
        "verdict": verdict,
        "inputs": _inputs_json(state),
        "facts": [f.to_json_dict() for f in store.facts],
        "axioms": state.axioms,
        "flat_bands": [
            {"eigenvalue": serialize.fraction_to_text(r), "multiplicity": k}
            for r, k in bands
        ],
        "flat_band_scan": band_status,
        "analysis": {
            "expansion_size": state.qe.size(),
            "base_newton_polytope": state.newt.to_json_dict(),
            "dilated_newton_polytope": state.dilated.to_json_dict(),
            "facets": [fi.weight_json() for fi in state.facets],
            "base_potential_periodic": state.base_periodic,
        },
        "blockers": top_blockers,
    }
    all_notes = [f"{k}: {m}" for k, msgs in blockers.items() for m in msgs]
    return AnalysisResult(verdict, certificate, store.facts, bands, top_blockers, all_notes)


def _verdict_blockers(state: _State, store: FactStore, blockers: dict) -> list[str]:
    top = state.subject("given", state.Q, None)
    out: list[str] = []
    top_key = top.render()
    if top_key in blockers:
        out.extend(f"{top_key}: {msg}" for msg in blockers[top_key])
    if not store.has(top, CLAIM_OHR):
        out.append(f"{top_key}: no only-homothetic-reducibility fact was derived")
    if not store.has(top, CLAIM_IRR):
        missing = []
        for fi in state.facets:
            subj = state.subject("given", state.Q, fi.ew)
            if not store.has(subj, CLAIM_IRR):
                missing.append(subj.render())
                for msg in blockers.get(subj.render(), []):
                    out.append(f"{subj.render()}: {msg}")
                zero_subj = state.subject("zero", state.Q, fi.ew)
                for msg in blockers.get(zero_subj.render(), []):
                    out.append(f"{zero_subj.render()}: {msg}")
                zero_base = state.subject("zero", state.base_member(), fi.ew)
                if not store.has(zero_base, CLAIM_IRR):
                    rep = pyramid_irreducible(fi.facial)
                    out.append(
                        f"{zero_base.render()}: no irreducibility fact ({rep.reason}; no axiom covers this face)"
                    )
        if missing:
            out.append(
                f"{top_key}: no facial irreducibility available on any facet ({len(missing)} candidates failed)"
            )
    seen = set()
    deduped = []
    for msg in out:
        if msg not in seen:
            seen.add(msg)
            deduped.append(msg)
    return deduped[:40]


# -- replay -------------------------------------------------------------------------


def rebuild_from_inputs(inputs: Mapping) -> tuple[QExpansion, AnalysisOptions]:
    """Reconstruct the expansion and options a certificate was produced from."""
    g, c = serialize.graph_from_json_dict(inputs["graph"])
    potential_q = serialize.potential_map_from_json(inputs["expanded_potential"])
    qe = q_expand(g, c, tuple(int(q) for q in inputs["Q"]), potential_q)
    flags = inputs.get("flags", {})
    options = AnalysisOptions(
        lambda0=None
        if inputs.get("lambda0") is None
        else serialize.fraction_from_text(inputs["lambda0"]),
        axioms=tuple(inputs.get("axioms", ())),
        div_zero_as_q=bool(flags.get("div_zero_as_q", False)),
        cap=int(flags.get("cap", DEFAULT_CAP)),
        flat_band_scan=bool(flags.get("flat_band_scan", True)),
    )
    return qe, options


def _check_premises(
    fact: Mapping, by_id: dict[int, Mapping], wanted: list[tuple[Subject, str]]
) -> list[str]:
    """Premise ids must exist, precede the fact, and match the wanted claims."""
    problems = []
    ids = list(fact.get("premises", ()))
    have = []
    for pid in ids:
        prem = by_id.get(pid)
        if prem is None:
            problems.append(f"fact {fact['id']}: premise {pid} is missing")
            continue
        if pid >= fact["id"]:
            problems.append(f"fact {fact['id']}: premise {pid} does not precede it")
        have.append((Subject.from_json_dict(prem["subject_data"]), prem["claim"]))
    for want in wanted:
        if want not in have:
            problems.append(
                f"fact {fact['id']}: required premise {want[0].render()}:{want[1]} absent"
            )
    return problems


def replay_certificate(cert: Mapping) -> list[str]:
    """Re-check every fact of a certificate from its stored inputs.

    Returns a list of problems; an empty list means the certificate replays.
    """
    problems: list[str] = []
    try:
        qe, options = rebuild_from_inputs(cert["inputs"])
        state = _State(qe, options)
    except (KeyError, ValueError, TypeError) as exc:
        return [f"inputs do not rebuild: {exc}"]

    facts = list(cert.get("facts", ()))
    by_id: dict[int, Mapping] = {}
    for fact in facts:
        fid = fact.get("id")
        if not isinstance(fid, int) or fid in by_id:
            problems.append(f"fact id {fid!r} is missing or duplicated")
            continue
        by_id[fid] = fact

    facet_by_ew = {fi.ew: fi for fi in state.facets}
    axiom_texts = {(a["grants"], a["text"]) for a in state.axioms}

    for fact in facts:
        try:
            subject = Subject.from_json_dict(fact["subject_data"])
            claim = fact["claim"]
            rule = fact["rule"]
            data = fact.get("data", {})
        except (KeyError, TypeError) as exc:
            problems.append(f"malformed fact: {exc}")
            continue
        if subject.lambda0 != state.lam0_str:
            problems.append(f"fact {fact['id']}: eigenvalue level mismatch")
            continue
        if subject.face_w is not None and subject.face_w not in facet_by_ew:
            problems.append(f"fact {fact['id']}: unknown face {list(subject.face_w)}")
            continue
        if not state.member_exists(subject.context, subject.member):
            problems.append(
                f"fact {fact['id']}: member {list(subject.member)} does not exist for {subject.context} context"
            )
            continue
        problems += _replay_one(state, fact, subject, claim, rule, data, by_id, facet_by_ew, axiom_texts)

    problems += _replay_flat_bands(cert, state, by_id)
    problems += _replay_verdict(cert, state, by_id)
    return problems


def _replay_flat_bands(cert: Mapping, state: _State, by_id: dict[int, Mapping]) -> list[str]:
    """A completed scan must list every eigenvalue-linear factor it found."""
    if cert.get("flat_band_scan") != "completed":
        return []
    if state.lam0 is not None or not state.options.flat_band_scan:
        return ["flat-band scan marked completed but the options preclude it"]
    if state.qe.size() > state.options.cap:
        return ["flat-band scan marked completed above the determinant cap"]
    d_q = expanded_dispersion(state.qe, cap=state.options.cap)
    if d_q.parameter_symbols():
        return ["flat-band scan marked completed on symbolic coefficients"]
    bands, _ = flat_bands(d_q)
    expected = {
        (serialize.fraction_to_text(r), mult) for r, mult in bands
    }
    stored = {
        (b.get("eigenvalue"), int(b.get("multiplicity", 0)))
        for b in cert.get("flat_bands", ())
    }
    if expected != stored:
        return [f"stored flat bands {sorted(stored)} differ from recomputed {sorted(expected)}"]
    recorded = {
        (f["data"].get("eigenvalue"), int(f["data"].get("multiplicity", 0)))
        for f in by_id.values()
        if f.get("rule") == "flat_band_factor"
    }
    if recorded != expected:
        return ["flat-band facts do not match the recomputed factor list"]
    return []


def _replay_one(
    state: _State,
    fact: Mapping,
    subject: Subject,
    claim: str,
    rule: str,
    data: Mapping,
    by_id: dict[int, Mapping],
    facet_by_ew: dict[tuple[int, ...], FacetInfo],
    axiom_texts: set,
) -> list[str]:
    fid = fact["id"]
    problems: list[str] = []

    def fail(msg: str) -> list[str]:
        return [f"fact {fid} ({rule}): {msg}"]

    base = state.base_member()
    if rule == "axiom":
        grants = data.get("grants")
        if (grants, fact.get("rule_statement")) not in axiom_texts:
            return fail("axiom text not among the stored inputs")
        if grants == "base_irreducible":
            if subject != state.subject("zero", base, None) or claim != CLAIM_IRR:
                return fail("subject does not match the axiom grant")
        elif grants == "facial_irreducible":
            if subject.context != "zero" or not subject.is_base() or subject.face_w is None or claim != CLAIM_IRR:
                return fail("subject does not match the axiom grant")
        else:
            return fail(f"unknown grant {grants!r}")
        return []

    if rule == "indecomposable_shape":
        f = state.family_base_poly(subject.context, subject.face_w)
        if f is None or not subject.is_base() or claim != CLAIM_IRR:
            return fail("subject is not a family base member")
        rep = pyramid_irreducible(f)
        if not rep.holds:
            return fail(f"shape test fails on recomputation: {rep.reason}")
        return []

    if rule == "shape_only_homothetic":
        f = state.family_base_poly(subject.context, subject.face_w)
        if f is None or not subject.is_base() or claim != CLAIM_OHR:
            return fail("subject is not a family base member")
        rep = shape_only_homothetic(f)
        if not rep.holds:
            return fail(f"shape test fails on recomputation: {rep.reason}")
        return []

    if rule == "weight_certificate":
        if claim != CLAIM_PI or subject.context != "given" or subject.member != state.Q:
            return fail("potential-independence facts live at the given-context full expansion")
        fi = facet_by_ew.get(subject.face_w)
        if fi is None or not fi.potential_safe:
            return fail("facet is not potential-safe on recomputation")
        if data != fi.weight_json():
            return fail("stored weight data differs from recomputation")
        return []

    if rule == "irreducible_weakening":
        if claim != CLAIM_OHR:
            return fail("weakening only emits only-homothetic facts")
        return _check_premises(fact, by_id, [(subject, CLAIM_IRR)])

    if rule == "restriction_to_divisor":
        a, b = subject.member, tuple(int(x) for x in data.get("from_member", ()))
        if len(b) != state.d or any(x % y for x, y in zip(b, a)):
            return fail("target member does not divide the source member")
        src = Subject(subject.context, b, subject.face_w, subject.lambda0)
        return _check_premises(fact, by_id, [(src, CLAIM_IRR)])

    if rule == "pure_power_coprime":
        if not state.product_capable(subject.context):
            return fail("family lacks the expansion product structure")
        f = state.family_base_poly(subject.context, subject.face_w)
        if f is None:
            return fail("family base polynomial unavailable")
        guard = _guard_point(f, range(1, state.d + 1))
        if guard is None:
            return fail("no eigenvalue-only support point on recomputation")
        pure = _pure_powers(f, state.d)
        for i in range(1, state.d + 1):
            q_i = subject.member[i - 1]
            if q_i == 1:
                continue
            if not any(math.gcd(q_i, a) == 1 for a in pure[i]):
                return fail(f"no coprime pure power in direction {i}")
        src = Subject(subject.context, base, subject.face_w, subject.lambda0)
        return _check_premises(fact, by_id, [(src, CLAIM_IRR)])

    if rule == "coprime_divisor_step":
        if not state.product_capable(subject.context):
            return fail("family lacks the expansion product structure")
        f = state.family_base_poly(subject.context, subject.face_w)
        if f is None:
            return fail("family base polynomial unavailable")
        sigma = [i for i in range(1, state.d + 1) if subject.member[i - 1] != 1]
        if sorted(data.get("sigma", ())) != sigma:
            return fail("stored sigma differs from the member pattern")
        if _guard_point(f, sigma) is None:
            return fail("no support point with zero sigma coordinates")
        i = int(data.get("witness_direction", 0))
        if i not in sigma:
            return fail("witness direction outside sigma")
        b = div_j_sigma(f, i, sigma)
        if b != int(data.get("div", -1)):
            return fail(f"stored divisor {data.get('div')} differs from recomputed {b}")
        q_i = subject.member[i - 1]
        if b == 0:
            if not (state.options.div_zero_as_q and q_i == 1):
                return fail("zero divisor does not satisfy the declared convention")
        elif math.gcd(q_i, b) != 1:
            return fail(f"gcd({q_i},{b}) is not 1")
        wanted = []
        for r in range(len(sigma)):
            for sub in itertools.combinations(sigma, r):
                member = tuple(
                    state.Q[j - 1] if j in sub else 1 for j in range(1, state.d + 1)
                )
                wanted.append(
                    (Subject(subject.context, member, subject.face_w, subject.lambda0), CLAIM_IRR)
                )
        return _check_premises(fact, by_id, wanted)

    if rule == "pairwise_coprime_expansion":
        if not state.product_capable(subject.context):
            return fail("family lacks the expansion product structure")
        if subject.member != state.Q:
            return fail("conclusion must be the full expansion member")
        k = int(data.get("k", 0))
        if not 1 <= k < state.d:
            return fail("invalid subset size")
        for rho in itertools.combinations(range(1, state.d + 1), k + 1):
            if gcd_list([state.Q[i - 1] for i in rho]) != 1:
                return fail(f"orders {list(rho)} share a factor")
        wanted = [(Subject(subject.context, base, subject.face_w, subject.lambda0), CLAIM_IRR)]
        for sigma in itertools.combinations(range(1, state.d + 1), k):
            member = tuple(state.Q[i - 1] if i in sigma else 1 for i in range(1, state.d + 1))
            wanted.append(
                (Subject(subject.context, member, subject.face_w, subject.lambda0), CLAIM_IRR)
            )
        return _check_premises(fact, by_id, wanted)

    if rule == "expansion_only_homothetic":
        if not state.product_capable(subject.context):
            return fail("family lacks the expansion product structure")
        src = Subject(subject.context, base, subject.face_w, subject.lambda0)
        return _check_premises(fact, by_id, [(src, CLAIM_OHR)])

    if rule == "facet_potential_transfer":
        fi = facet_by_ew.get(subject.face_w)
        if fi is None or not fi.potential_safe:
            return fail("facet is not potential-safe on recomputation")
        if subject.context != "given" or subject.member != state.Q:
            return fail("transfer lands at the given-context full expansion")
        src = Subject("zero", state.Q, subject.face_w, subject.lambda0)
        pi = Subject("given", state.Q, subject.face_w, subject.lambda0)
        return _check_premises(fact, by_id, [(src, claim), (pi, CLAIM_PI)])

    if rule == "expansion_facet_chain":
        if claim != CLAIM_OHR or subject.face_w is not None or subject.member != state.Q:
            return fail("chain rule concludes only-homothetic reducibility of the full expansion")
        if subject.context == "given":
            pinned = _given_polytope_pinned(state)
            if pinned:
                return fail("; ".join(pinned))
        certified_ew = [tuple(int(x) for x in e) for e in data.get("certified_facets", ())]
        eligible = {fi.ew for fi in _chain_eligible(state, subject.context)}
        wanted = []
        faces = []
        for ew in certified_ew:
            fi = facet_by_ew.get(ew)
            if fi is None or ew not in eligible:
                return fail(f"facet {list(ew)} lacks the required weight bound")
            fc = _dilated_face(state, fi)
            if fc.dim != state.dilated.dim - 1:
                return fail(f"dilated face {list(ew)} is not a facet")
            faces.append(fc)
            wanted.append((Subject(subject.context, state.Q, ew, subject.lambda0), CLAIM_OHR))
            if subject.context == "given":
                wanted.append((Subject("given", state.Q, ew, subject.lambda0), CLAIM_PI))
        verts = state.dilated.vertices()
        if len(verts) < 2:
            return fail("the dilated polytope has no vertex pairs")
        for a, b in itertools.combinations(verts, 2):
            if strong_chain_exists(state.dilated, faces, a, b) is None:
                return fail(f"no strong chain joins {list(a)} and {list(b)}")
        return _check_premises(fact, by_id, wanted)

    if rule == "irreducible_facial_upgrade":
        if claim != CLAIM_IRR or subject.face_w is not None:
            return fail("upgrade concludes irreducibility of a full family member")
        fam = state.family_base_poly(subject.context, None)
        if fam is not None and fam.is_monomial():
            return fail("family base polynomial is a monomial")
        face = tuple(int(x) for x in data.get("face", ()))
        fi = facet_by_ew.get(face)
        if fi is None:
            return fail("unknown face")
        if fi.facial.is_monomial():
            return fail("facial polynomial is a monomial")
        wanted = [
            (subject, CLAIM_OHR),
            (Subject(subject.context, subject.member, face, subject.lambda0), CLAIM_IRR),
        ]
        return _check_premises(fact, by_id, wanted)

    if rule == "flat_band_factor":
        if claim != CLAIM_RED or subject != state.subject("given", state.Q, None):
            return fail("flat-band facts live at the given-context full expansion")
        size = state.qe.size()
        if size > state.options.cap:
            return fail("expansion above the determinant cap cannot carry flat-band facts")
        d_q = expanded_dispersion(state.qe, cap=state.options.cap)
        if d_q.parameter_symbols():
            return fail("symbolic coefficients cannot carry flat-band facts")
        r = serialize.fraction_from_text(data["eigenvalue"])
        mult = int(data["multiplicity"])
        divisor = LaurentPoly.lam(d_q.nz) - LaurentPoly.const(d_q.nz, r)
        quotient = d_q
        for _ in range(mult):
            nxt = quotient.exact_divide(divisor)
            if nxt is None:
                return fail(f"eigenvalue {data['eigenvalue']} does not divide to multiplicity {mult}")
            quotient = nxt
        return []

    return fail("unknown rule")


def _replay_verdict(cert: Mapping, state: _State, by_id: dict[int, Mapping]) -> list[str]:
    """The stored verdict must be exactly the one the stored facts force."""
    verdict = cert.get("verdict")
    if verdict not in ("Irreducible", "OnlyHomotheticallyReducible", "ReducibleWithFactors", "Inconclusive"):
        return [f"unknown verdict {verdict!r}"]
    top = state.subject("given", state.Q, None).to_json_dict()
    claims_at_top = {
        f["claim"] for f in by_id.values() if f.get("subject_data") == top
    }
    if CLAIM_RED in claims_at_top and CLAIM_IRR in claims_at_top:
        return ["facts assert both a flat-band factor and irreducibility at the top level"]
    if CLAIM_RED in claims_at_top:
        expected = "ReducibleWithFactors"
    elif CLAIM_IRR in claims_at_top:
        expected = "Irreducible"
    elif CLAIM_OHR in claims_at_top:
        expected = "OnlyHomotheticallyReducible"
    else:
        expected = "Inconclusive"
    if verdict != expected:
        return [f"verdict {verdict} does not match the {expected} outcome forced by the facts"]
    return []


# -- named-family helpers -----------------------------------------------------------


def dice_genericity(labeling: Labeling, d: int) -> tuple[bool, list[str]]:
    """Check beta_i*beta_j != -gamma_i*gamma_j for distinct i, j in 0..d.

    Rung labels of the two-ladder family, indexed 0 for the in-cell rung
    and 1..d for the axis rungs.  Needs rational labels.
    """
    failures: list[str] = []
    names: dict[str, Fraction] = {}
    for (u, v, a), p in labeling.edge_labels.items():
        if not p.is_rational():
            raise ValueError("genericity check needs rational edge labels")
        i = next((k + 1 for k in range(d) if a[k] != 0), 0)
        if (u, v) in (("u1", "u2"), ("u2", "u1")):
            names[f"gamma_{i}"] = p.rational_value()
        elif (u, v) in (("u2", "u3"), ("u3", "u2")):
            names[f"beta_{i}"] = p.rational_value()
    for i, j in itertools.combinations(range(d + 1), 2):
        bi, bj = names.get(f"beta_{i}"), names.get(f"beta_{j}")
        gi, gj = names.get(f"gamma_{i}"), names.get(f"gamma_{j}")
        if None in (bi, bj, gi, gj):
            failures.append(f"missing rung labels for pair ({i},{j})")
            continue
        if bi * bj == -gi * gj:
            failures.append(f"rung products clash: beta_{i}*beta_{j} == -gamma_{i}*gamma_{j}")
    return (not failures), failures
