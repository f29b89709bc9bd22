"""Floquet matrices, dispersion polynomials, and numeric spectra."""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from typing import Mapping, Sequence

from .graphs import (
    Labeling,
    PeriodicGraph,
    QExpansion,
    cells,
    expanded_name,
    require_valid,
)
from .laurent import LaurentMatrix, LaurentPoly
from .params import ParamPoly

DEFAULT_CAP = 16


def floquet_matrix(g: PeriodicGraph, c: Labeling) -> LaurentMatrix:
    """The matrix L(z, l) = L_c(z) - l*I acting on the vertex orbits."""
    require_valid(g, c)
    d = g.d
    idx = {name: i for i, name in enumerate(g.vertices)}
    m = LaurentMatrix(d, g.vertices)
    for e in g.edges:
        u, v, a = e
        iu, iv = idx[u], idx[v]
        label = LaurentPoly.const(d, c.edge_labels[e])
        m.add_to_entry(iu, iu, label)
        m.add_to_entry(iv, iv, label)
        m.add_to_entry(iu, iv, -label.mul_monomial(a + (0,)))
        m.add_to_entry(iv, iu, -label.mul_monomial(tuple(-x for x in a) + (0,)))
    for name, i in idx.items():
        m.add_to_entry(i, i, LaurentPoly.const(d, c.potential[name]))
        m.add_to_entry(i, i, -LaurentPoly.lam(d))
    return m


def dispersion(g: PeriodicGraph, c: Labeling, cap: int = DEFAULT_CAP) -> LaurentPoly:
    """det(L_c(z) - l*I), exact."""
    return floquet_matrix(g, c).determinant(cap)


def expanded_dispersion(qe: QExpansion, cap: int = DEFAULT_CAP) -> LaurentPoly:
    """The dispersion polynomial of the Q-expanded graph, exact."""
    return floquet_matrix(qe.expanded, qe.labeling).determinant(cap)


def cyclic_power_product(f: LaurentPoly, q: int, axis: int) -> LaurentPoly:
    """Exact product of f over all q-th root-of-unity scalings of one z-variable.

    Computed as a resultant against s^q - z_axis^q, so no root of unity is
    ever represented; every exponent of z_axis in the result is divisible by q.
    """
    if q < 1:
        raise ValueError("q must be positive")
    if q == 1:
        return f
    if f.is_zero():
        return f
    exps = [e[axis] for e in f.terms]
    low, high = min(exps), max(exps)
    if low == high == 0:
        return f ** q
    shift = -low
    degree = high + shift
    coeffs: list[LaurentPoly] = [LaurentPoly.zero(f.nz) for _ in range(degree + 1)]
    for e, coef in f.terms.items():
        stripped = e[:axis] + (0,) + e[axis + 1 :]
        coeffs[e[axis] + shift] = coeffs[e[axis] + shift] + LaurentPoly.term(
            f.nz, stripped, coef
        )
    size = q + degree
    syl = LaurentMatrix(f.nz, [str(i) for i in range(size)])
    minus_zq = -LaurentPoly.z_var(f.nz, axis, q)
    one = LaurentPoly.const(f.nz, 1)
    for r in range(degree):
        syl.add_to_entry(r, r, one)
        syl.add_to_entry(r, r + q, minus_zq)
    for r in range(q):
        for j in range(degree + 1):
            p = coeffs[degree - j]
            if not p.is_zero():
                syl.add_to_entry(degree + r, r + j, p)
    res = syl.determinant(cap=size)
    unshift = [0] * (f.nz + 1)
    unshift[axis] = -q * shift
    out = res.mul_monomial(unshift)
    if shift % 2 == 1 and q % 2 == 0:
        out = -out
    return out


def divide_exponents(f: LaurentPoly, Q: Sequence[int]) -> LaurentPoly:
    """Replace each z_i-exponent a_i by a_i / q_i; all must divide exactly."""
    out: dict[tuple[int, ...], ParamPoly] = {}
    for e, c in f.terms.items():
        z = list(e[:-1])
        for i, qi in enumerate(Q):
            if z[i] % qi != 0:
                raise ValueError("exponent not divisible by Q")
            z[i] //= qi
        out[tuple(z) + (e[-1],)] = c
    return LaurentPoly(f.nz, out)


def periodic_expanded_dispersion(
    g: PeriodicGraph, c: Labeling, Q: Sequence[int], cap: int = DEFAULT_CAP
) -> LaurentPoly:
    """D_Q for the base-periodic potential, via exact root-of-unity products.

    Valid because expanding the period lattice of an unchanged labeling
    multiplies the dispersion over the character group of Z^d / Q*Z^d.
    """
    f = dispersion(g, c, cap)
    for i, qi in enumerate(Q):
        f = cyclic_power_product(f, int(qi), i)
    return divide_exponents(f, Q)


def unit_phases(Q: Sequence[int], k: Sequence[int]) -> tuple[complex, ...]:
    """The character indexed by cell k: component exp(2*pi*i*k_j/q_j)."""
    return tuple(
        cmath.exp(2j * math.pi * kj / qj) for kj, qj in zip(k, Q)
    )


def hat_potential(
    qe: QExpansion, env: Mapping[str, complex] | None = None
) -> tuple[list[tuple[complex, ...]], dict[tuple[int, int], tuple[complex, ...]]]:
    """Character-basis potential table, keyed by (row character, column character).

    Entry (rho, mu) lists, per base vertex v, the averaged coefficient
    (1/|Q|) * sum_w V(w + v) (mu/rho)^w over the cells w of the expansion.
    The table is diagonal exactly when the potential is base-lattice periodic.
    """
    Q = qe.Q
    ks = cells(Q)
    total = len(ks)
    phases = [unit_phases(Q, k) for k in ks]
    values: dict[tuple[tuple[int, ...], str], complex] = {}
    environment = dict(env or {})
    for w in ks:
        for name in qe.base.vertices:
            p = qe.labeling.potential[expanded_name(w, name)]
            values[(w, name)] = p.evaluate_numeric(environment)
    table: dict[tuple[int, int], tuple[complex, ...]] = {}
    for r, rho in enumerate(phases):
        for s, mu in enumerate(phases):
            row: list[complex] = []
            for name in qe.base.vertices:
                acc = 0j
                for w in ks:
                    phase = 1 + 0j
                    for j in range(qe.base.d):
                        phase *= (mu[j] / rho[j]) ** w[j]
                    acc += values[(w, name)] * phase
                row.append(acc / total)
            table[(r, s)] = tuple(row)
    return [tuple(p) for p in phases], table


def hat_block_matrix(
    qe: QExpansion,
    z: Sequence[complex],
    env: Mapping[str, complex] | None = None,
) -> list[list[complex]]:
    """Numeric |Q|m x |Q|m matrix in the character basis, without the l*I part.

    Block (rho, mu) is the potential-free Floquet matrix at mu*z when
    rho == mu, plus the diagonal potential table entry for (rho, mu).
    """
    base = qe.base
    m = len(base.vertices)
    zero_pot = Labeling(
        {name: ParamPoly.zero() for name in base.vertices},
        qe.base_labeling.edge_labels,
    )
    edge_part = floquet_matrix(base, zero_pot)
    phases, table = hat_potential(qe, env)
    total = len(phases)
    n = total * m
    out = [[0j] * n for _ in range(n)]
    for r, rho in enumerate(phases):
        for s, mu in enumerate(phases):
            vhat = table[(r, s)]
            if r == s:
                point = [mu[j] * z[j] for j in range(base.d)]
                block = edge_part.eval_numeric(point, 0j, env)
                for i in range(m):
                    for j in range(m):
                        out[r * m + i][s * m + j] = block[i][j]
            for i in range(m):
                out[r * m + i][s * m + i] += vhat[i]
    return out


def hermitian_defect(
    g: PeriodicGraph,
    c: Labeling,
    z: Sequence[complex],
    env: Mapping[str, complex] | None = None,
) -> float:
    """Largest entrywise deviation of L(z) from its conjugate transpose."""
    m = floquet_matrix(g, c)
    vals = m.eval_numeric(z, 0j, env)
    n = len(vals)
    worst = 0.0
    for i in range(n):
        for j in range(n):
            worst = max(worst, abs(vals[i][j] - vals[j][i].conjugate()))
    return worst


def jacobi_eigenvalues(
    matrix: Sequence[Sequence[complex]],
    tol: float = 1e-12,
    max_sweeps: int = 100,
) -> list[float]:
    """Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations."""
    n = len(matrix)
    a = [[complex(matrix[i][j]) for j in range(n)] for i in range(n)]
    scale = max(1.0, max(abs(a[i][j]) for i in range(n) for j in range(n)))
    threshold = tol * scale
    for _ in range(max_sweeps):
        off = 0.0
        for p in range(n):
            for q in range(p + 1, n):
                off = max(off, abs(a[p][q]))
        if off <= threshold:
            break
        for p in range(n):
            for q in range(p + 1, n):
                beta = a[p][q]
                mag = abs(beta)
                if mag <= threshold * 1e-2:
                    continue
                alpha = a[p][p].real
                gamma = a[q][q].real
                tau = (gamma - alpha) / (2.0 * mag)
                sign = 1.0 if tau >= 0 else -1.0
                t = sign / (abs(tau) + math.hypot(1.0, tau))
                cth = 1.0 / math.sqrt(1.0 + t * t)
                sth = t * cth
                phase = beta / mag
                for k in range(n):
                    akp = a[k][p]
                    akq = a[k][q]
                    a[k][p] = cth * akp - sth * phase.conjugate() * akq
                    a[k][q] = sth * phase * akp + cth * akq
                for k in range(n):
                    apk = a[p][k]
                    aqk = a[q][k]
                    a[p][k] = cth * apk - sth * phase * aqk
                    a[q][k] = sth * phase.conjugate() * apk + cth * aqk
    eigs = [a[i][i] for i in range(n)]
    if any(abs(e.imag) > 1e-9 * scale for e in eigs):
        raise ValueError("eigenvalues failed to converge to real values")
    return sorted(e.real for e in eigs)


def sample_spectrum(
    g: PeriodicGraph,
    c: Labeling,
    grid_n: int,
    env: Mapping[str, complex] | None = None,
) -> list[tuple[tuple[complex, ...], list[float]]]:
    """Sorted Hermitian eigenvalues at a uniform grid on the torus."""
    m = floquet_matrix(g, c)
    symbols = set()
    for p in m.entries.values():
        symbols |= p.parameter_symbols()
    unbound = symbols - set(env or {})
    if unbound:
        raise ValueError(f"unbound parameters: {', '.join(sorted(unbound))}")
    out = []
    for t in cells((grid_n,) * g.d):
        z = tuple(cmath.exp(2j * math.pi * ti / grid_n) for ti in t)
        vals = m.eval_numeric(z, 0j, env)
        out.append((z, jacobi_eigenvalues(vals)))
    return out
