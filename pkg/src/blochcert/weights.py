"""Assignment-weight certificates for facial polynomials of expansions.

Every monomial of the expanded determinant selects one term of a base entry
per position of a permutation pattern; re-routing an edge through a cell
shifts its weight by a telescoping cell term that cancels around every
permutation cycle.  Projecting the pattern to the base index and splitting
the resulting doubly stochastic integer matrix into permutations bounds the
weight of each expanded monomial by the expansion size times the base
assignment minimum.  Potential values sit at weight zero on the diagonal, so
when every assignment using at least one diagonal potential slot costs
strictly more than the minimum, no minimal-weight monomial of any expansion
touches the potential, whatever values it takes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .laurent import LaurentMatrix

MAX_CERT_SIZE = 8


def _weight(exp: Sequence[int], w: Sequence[int]) -> int:
    return sum(e * wi for e, wi in zip(exp, w))


def entry_min_weights(m: LaurentMatrix, w: Sequence[int]) -> list[list[int | None]]:
    """Per-entry minimum of w over term exponents; None for zero entries."""
    n = m.size
    out: list[list[int | None]] = [[None] * n for _ in range(n)]
    for (i, j), p in m.entries.items():
        out[i][j] = min(_weight(e, w) for e in p.terms)
    return out


def assignment_minimum(omega: Sequence[Sequence[int | None]]) -> int | None:
    """Minimum assignment cost over permutations; None entries are forbidden."""
    n = len(omega)
    if n > MAX_CERT_SIZE:
        raise ValueError("certificate matrices are limited to small bases")
    best: int | None = None
    for perm in itertools.permutations(range(n)):
        cost = 0
        feasible = True
        for i in range(n):
            c = omega[i][perm[i]]
            if c is None:
                feasible = False
                break
            cost += c
        if feasible and (best is None or cost < best):
            best = cost
    return best


def potential_insertion_minimum(
    omega: Sequence[Sequence[int | None]],
) -> int | None:
    """Cheapest assignment forced to take a weight-zero diagonal slot.

    Minimizes over permutations and nonempty subsets of their fixed points,
    charging zero on the subset (a potential value) and the entry minimum
    elsewhere.  None when no permutation has a usable fixed point.
    """
    n = len(omega)
    if n > MAX_CERT_SIZE:
        raise ValueError("certificate matrices are limited to small bases")
    best: int | None = None
    for perm in itertools.permutations(range(n)):
        fixed = [i for i in range(n) if perm[i] == i]
        if not fixed:
            continue
        cost = 0
        feasible = True
        for i in range(n):
            if perm[i] == i:
                continue
            c = omega[i][perm[i]]
            if c is None:
                feasible = False
                break
            cost += c
        if not feasible:
            continue
        for size in range(1, len(fixed) + 1):
            for subset in itertools.combinations(fixed, size):
                total = cost
                ok = True
                for i in fixed:
                    if i in subset:
                        continue
                    c = omega[i][i]
                    if c is None:
                        ok = False
                        break
                    total += c
                if ok and (best is None or total < best):
                    best = total
    return best


@dataclass(frozen=True)
class FaceCertificate:
    """Witness that one exposing vector survives expansion potential-free.

    assignment_min equals the face offset of the zero-potential base
    polynomial and every potential-using pattern costs strictly more, so for
    every expansion order and every potential the expanded facial polynomial
    at the rescaled exposing vector is the root-of-unity product of the base
    facial polynomial.
    """

    w: tuple[int, ...]
    assignment_min: int
    face_offset: int
    potential_min: int | None
    margin: int | None

    def to_json_dict(self) -> dict:
        return {
            "w": list(self.w),
            "assignment_min": self.assignment_min,
            "face_offset": self.face_offset,
            "potential_min": self.potential_min,
            "margin": self.margin,
        }

    @staticmethod
    def from_json_dict(data: dict) -> "FaceCertificate":
        return FaceCertificate(
            w=tuple(int(x) for x in data["w"]),
            assignment_min=int(data["assignment_min"]),
            face_offset=int(data["face_offset"]),
            potential_min=None
            if data["potential_min"] is None
            else int(data["potential_min"]),
            margin=None if data["margin"] is None else int(data["margin"]),
        )


def face_expansion_certificate(
    m_zero: LaurentMatrix, w: Sequence[int], face_offset: int
) -> FaceCertificate | str:
    """Certify one face, or explain why the weight argument cannot.

    m_zero is the base Floquet matrix with the potential set to zero; the
    expanded matrix differs from its cell pattern only by diagonal constants,
    which the certificate proves are never weight-minimal.
    """
    omega = entry_min_weights(m_zero, w)
    a_star = assignment_minimum(omega)
    if a_star is None:
        return "no permutation avoids the zero entries"
    if a_star != face_offset:
        return (
            f"assignment minimum {a_star} differs from face offset "
            f"{face_offset}, the weight bound is not tight"
        )
    p_star = potential_insertion_minimum(omega)
    if p_star is not None and p_star <= a_star:
        return (
            f"a pattern using a diagonal potential slot reaches weight "
            f"{p_star}, not above the minimum {a_star}"
        )
    return FaceCertificate(
        w=tuple(int(x) for x in w),
        assignment_min=a_star,
        face_offset=face_offset,
        potential_min=p_star,
        margin=None if p_star is None else p_star - a_star,
    )


def check_face_certificate(
    m_zero: LaurentMatrix, cert: FaceCertificate, face_offset: int
) -> list[str]:
    """Recompute every claim in a stored certificate; empty list means valid."""
    fresh = face_expansion_certificate(m_zero, cert.w, face_offset)
    if isinstance(fresh, str):
        return [f"certificate does not reproduce: {fresh}"]
    if fresh != cert:
        return ["stored certificate differs from recomputation"]
    return []
