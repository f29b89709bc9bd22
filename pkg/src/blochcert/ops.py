"""Shared operation layer behind the command line and the HTTP service.

Every operation takes a JSON-compatible request dict and returns a
JSON-compatible response dict, so the command line can run them in
process or forward them to the service unchanged.
"""

from __future__ import annotations

import cmath
import csv
import io
import math
import random
import re
from fractions import Fraction
from typing import Mapping

import numpy as np

from . import serialize
from .criteria import AnalysisOptions, analyze, replay_certificate, validate_axioms
from .floquet import (
    DEFAULT_CAP,
    dispersion,
    expanded_dispersion,
    floquet_matrix,
    sample_spectrum,
    unit_phases,
)
from .graphs import (
    BUILDERS,
    Labeling,
    PeriodicGraph,
    build_named,
    cells,
    expanded_name,
    potential_is_periodic_mod,
    q_expand,
    require_valid,
)
from .laurent import CapExceeded
from .params import ParamPoly
from .polytope import contracted_dilation, hull, off_export


class OpError(Exception):
    """Operation failure with a machine-readable kind."""

    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind
        self.message = message


_RANDOM_POTENTIAL = re.compile(r"^random-rational(?:\((\d+)\))?$")


def _parse_fraction(text, where: str) -> Fraction:
    try:
        return serialize.fraction_from_text(str(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise OpError("validation", f"bad rational in {where}: {text!r} ({exc})")


def build_graph(req: Mapping) -> tuple[PeriodicGraph, Labeling]:
    """Resolve the graph field: a family name or an inline JSON document."""
    spec = req.get("graph")
    if isinstance(spec, str):
        d = req.get("d")
        if d is None:
            raise OpError("validation", "named graph families need d")
        try:
            g, c = build_named(spec, int(d))
        except ValueError as exc:
            raise OpError("validation", str(exc))
    elif isinstance(spec, Mapping):
        try:
            g, c = serialize.graph_from_json_dict(spec)
        except (KeyError, ValueError, TypeError) as exc:
            raise OpError("validation", f"bad graph document: {exc}")
    else:
        raise OpError("validation", "graph must be a family name or a JSON document")
    try:
        require_valid(g, c)
    except ValueError as exc:
        raise OpError("validation", str(exc))
    return g, c


def _random_fraction(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-9, 9), rng.randint(1, 9))


def resolve_potential(
    spec,
    g: PeriodicGraph,
    Q: tuple[int, ...],
    seed: int,
) -> tuple[dict[str, ParamPoly], dict]:
    """Expanded-vertex potential from a potential spec.

    Accepts "symbolic", "zero", "random-rational" or "random-rational(seed)",
    or a map from vertex names to rationals; base-vertex keys replicate over
    the expansion cells, expanded-vertex keys are taken as given.
    """
    names = [expanded_name(k, v) for k in cells(Q) for v in g.vertices]
    meta: dict = {"potential": spec if isinstance(spec, str) else "map"}
    if spec is None or spec == "symbolic":
        pot = {n: ParamPoly.symbol("V_" + n) for n in names}
        meta["potential"] = "symbolic"
        return pot, meta
    if spec == "zero":
        return {n: ParamPoly.const(0) for n in names}, meta
    if isinstance(spec, str):
        m = _RANDOM_POTENTIAL.match(spec)
        if m:
            used = int(m.group(1)) if m.group(1) is not None else int(seed)
            rng = random.Random(used)
            pot = {n: ParamPoly.const(_random_fraction(rng)) for n in names}
            meta["potential"] = "random-rational"
            meta["seed"] = used
            return pot, meta
        raise OpError(
            "validation",
            "potential must be symbolic, zero, random-rational(seed), or a map",
        )
    if isinstance(spec, Mapping):
        keys = set(spec)
        if keys == set(g.vertices):
            pot = {}
            for k in cells(Q):
                for v in g.vertices:
                    pot[expanded_name(k, v)] = ParamPoly.const(
                        _parse_fraction(spec[v], "potential map")
                    )
            return pot, meta
        if keys == set(names):
            return {
                n: ParamPoly.const(_parse_fraction(spec[n], "potential map"))
                for n in names
            }, meta
        missing = sorted(set(names) - keys)[:4]
        raise OpError(
            "validation",
            f"potential map must cover the base vertices or every expansion vertex (missing {missing})",
        )
    raise OpError("validation", "unrecognized potential spec")


def _parse_q(req: Mapping, d: int) -> tuple[int, ...]:
    raw = req.get("Q")
    if raw is None:
        return (1,) * d
    if isinstance(raw, str):
        raw = [p for p in re.split(r"[,x\s]+", raw.strip()) if p]
    try:
        Q = tuple(int(x) for x in raw)
    except (TypeError, ValueError):
        raise OpError("validation", f"bad Q: {req.get('Q')!r}")
    if len(Q) != d or any(q < 1 for q in Q):
        raise OpError("validation", "Q must list one positive order per direction")
    return Q


def _parse_options(req: Mapping) -> AnalysisOptions:
    lam0 = req.get("lambda0")
    axioms = req.get("axioms") or ()
    try:
        axioms = tuple(validate_axioms(axioms))
    except (ValueError, TypeError) as exc:
        raise OpError("validation", f"bad axioms: {exc}")
    return AnalysisOptions(
        lambda0=None if lam0 is None else _parse_fraction(lam0, "lambda0"),
        axioms=axioms,
        div_zero_as_q=bool(req.get("div_zero_as_q", False)),
        cap=int(req.get("cap", DEFAULT_CAP)),
        flat_band_scan=bool(req.get("flat_band_scan", True)),
    )


def _build_expansion(req: Mapping):
    g, c = build_graph(req)
    Q = _parse_q(req, g.d)
    seed = int(req.get("seed", 0))
    pot, meta = resolve_potential(req.get("potential"), g, Q, seed)
    try:
        qe = q_expand(g, c, Q, pot)
    except ValueError as exc:
        raise OpError("validation", str(exc))
    return qe, meta


def op_dispersion(req: Mapping) -> dict:
    """Dispersion polynomial of the base graph, exactly."""
    g, c = build_graph(req)
    pot_spec = req.get("potential")
    if pot_spec is not None:
        pot, meta = resolve_potential(pot_spec, g, (1,) * g.d, int(req.get("seed", 0)))
        base_pot = {v: pot[expanded_name((0,) * g.d, v)] for v in g.vertices}
        c = Labeling(base_pot, dict(c.edge_labels))
    else:
        meta = {"potential": "from-graph"}
    cap = int(req.get("cap", DEFAULT_CAP))
    try:
        f = dispersion(g, c, cap=cap)
    except CapExceeded as exc:
        raise OpError("cap", str(exc))
    supp = f.support()
    newt = hull(supp)
    return {
        "d": g.d,
        "vertices": list(g.vertices),
        "dispersion": serialize.poly_to_json_dict(f),
        "text": f.to_text(),
        "term_count": len(supp),
        "newton_polytope": newt.to_json_dict(),
        **meta,
    }


def op_expand(req: Mapping) -> dict:
    """Dispersion polynomial after period-lattice expansion, exactly."""
    qe, meta = _build_expansion(req)
    try:
        f = expanded_dispersion(qe, cap=int(req.get("cap", DEFAULT_CAP)))
    except CapExceeded as exc:
        raise OpError("cap", str(exc))
    return {
        "d": qe.base.d,
        "Q": list(qe.Q),
        "size": qe.size(),
        "base_potential_periodic": potential_is_periodic_mod(qe, (1,) * qe.base.d),
        "dispersion": serialize.poly_to_json_dict(f),
        "text": f.to_text(),
        "term_count": len(f.support()),
        "newton_polytope": hull(f.support()).to_json_dict(),
        **meta,
    }


def op_analyze(req: Mapping) -> dict:
    """Classify the expanded dispersion polynomial; returns the certificate."""
    qe, meta = _build_expansion(req)
    options = _parse_options(req)
    try:
        result = analyze(qe, options)
    except CapExceeded as exc:
        raise OpError("cap", str(exc))
    except ValueError as exc:
        raise OpError("validation", str(exc))
    return {
        "verdict": result.verdict,
        "certificate": result.certificate,
        "blockers": result.blockers,
        **meta,
    }


def _bind_symbols(symbols, rng: random.Random) -> dict[str, complex]:
    env = {}
    for s in sorted(symbols):
        env[s] = complex(_random_fraction(rng) + Fraction(1, rng.randint(2, 11)))
    return env


def _product_identity_check(
    qe, tol: float, samples: int, seed: int
) -> dict:
    """Numeric check of the expansion product identity at seeded torus points.

    Evaluates the expanded characteristic polynomial directly and as the
    product of base polynomials twisted by the expansion's unit phases.
    """
    if not potential_is_periodic_mod(qe, (1,) * qe.base.d):
        return {"status": "n/a (potential not ℤ^d-periodic)"}
    g, Q = qe.base, qe.Q
    zero_cell = (0,) * g.d
    base_pot = {
        v: qe.labeling.potential[expanded_name(zero_cell, v)] for v in g.vertices
    }
    base_c = Labeling(base_pot, dict(qe.base_labeling.edge_labels))
    m_base = floquet_matrix(g, base_c)
    m_big = floquet_matrix(qe.expanded, qe.labeling)
    symbols = set()
    for m in (m_base, m_big):
        for p in m.entries.values():
            symbols |= p.parameter_symbols()
    rng = random.Random(seed)
    env = _bind_symbols(symbols, rng)
    worst = 0.0
    for _ in range(samples):
        w = tuple(
            cmath.exp(2j * math.pi * rng.random()) * (1 + 0.1 * rng.random())
            for _ in range(g.d)
        )
        lam = complex(rng.uniform(-3, 3), rng.uniform(-1, 1))
        z = tuple(wi ** qi for wi, qi in zip(w, Q))
        lhs = complex(np.linalg.det(np.array(m_big.eval_numeric(z, lam, env))))
        rhs = 1 + 0j
        for k in cells(Q):
            mu = unit_phases(Q, k)
            zk = tuple(m * wi for m, wi in zip(mu, w))
            rhs *= complex(np.linalg.det(np.array(m_base.eval_numeric(zk, lam, env))))
        scale = max(1.0, abs(lhs), abs(rhs))
        worst = max(worst, abs(lhs - rhs) / scale)
    status = "ok" if worst <= tol else "failed"
    return {
        "status": status,
        "max_relative_error": worst,
        "tolerance": tol,
        "samples": samples,
        "seed": seed,
        "bound_symbols": sorted(symbols),
    }


def op_verify(req: Mapping) -> dict:
    """Replay a certificate and numerically spot-check the product identity."""
    cert = req.get("certificate")
    if not isinstance(cert, Mapping):
        raise OpError("validation", "verify needs a certificate document")
    if cert.get("format") != "blochcert-certificate/1":
        raise OpError("validation", f"unknown certificate format {cert.get('format')!r}")
    problems = replay_certificate(cert)
    product = {"status": "skipped"}
    try:
        from .criteria import rebuild_from_inputs

        qe, _ = rebuild_from_inputs(cert["inputs"])
        product = _product_identity_check(
            qe,
            tol=float(req.get("tol", 1e-9)),
            samples=int(req.get("samples", 20)),
            seed=int(req.get("seed", 0)),
        )
    except (KeyError, ValueError, TypeError) as exc:
        problems = problems + [f"inputs do not rebuild for the product check: {exc}"]
    ok = not problems and product.get("status") != "failed"
    return {
        "ok": ok,
        "verdict": cert.get("verdict"),
        "problems": problems,
        "product_identity": product,
    }


def op_export(req: Mapping) -> dict:
    """Polytope geometry and a spectrum sample as named file payloads.

    Returns {"files": {name: text}}; the caller decides where they land.
    """
    qe, meta = _build_expansion(req)
    g = qe.base
    cap = int(req.get("cap", DEFAULT_CAP))
    zero_pot = {v: ParamPoly.const(0) for v in g.vertices}
    czero = Labeling(zero_pot, dict(qe.base_labeling.edge_labels))
    try:
        d_zero = dispersion(g, czero, cap=cap)
    except CapExceeded as exc:
        raise OpError("cap", str(exc))
    newt = hull(d_zero.support())
    files: dict[str, str] = {}
    files["newton_base.json"] = serialize.pretty_json(newt.to_json_dict())
    files["newton_base.off"] = off_export(newt)
    if any(q != 1 for q in qe.Q):
        dil = contracted_dilation(newt, qe.Q)
        files["newton_dilated.json"] = serialize.pretty_json(dil.to_json_dict())
        files["newton_dilated.off"] = off_export(dil)

    grid = int(req.get("grid", 8))
    seed = int(req.get("seed", 0))
    rng = random.Random(seed)
    symbols = set()
    for p in qe.labeling.potential.values():
        symbols |= p.symbols()
    for p in qe.labeling.edge_labels.values():
        symbols |= p.symbols()
    env = {s: complex(_random_fraction(rng)) for s in sorted(symbols)}
    spectrum = sample_spectrum(qe.expanded, qe.labeling, grid, env)
    out = io.StringIO()
    writer = csv.writer(out)
    size = qe.size()
    writer.writerow(
        [f"z{i + 1}_angle" for i in range(g.d)] + [f"band_{j + 1}" for j in range(size)]
    )
    for z, eigs in spectrum:
        angles = [f"{cmath.phase(zi):.10f}" for zi in z]
        writer.writerow(angles + [f"{e:.12f}" for e in eigs])
    files["spectrum.csv"] = out.getvalue()
    return {
        "files": files,
        "grid": grid,
        "bound_symbols": {s: str(env[s]) for s in sorted(env)},
        **meta,
    }


OPS = {
    "dispersion": op_dispersion,
    "expand": op_expand,
    "analyze": op_analyze,
    "verify": op_verify,
    "export": op_export,
}


def run_op(name: str, req: Mapping) -> dict:
    if name not in OPS:
        raise OpError("validation", f"unknown operation {name!r}")
    return OPS[name](req)


def graph_family_names() -> list[str]:
    return sorted(BUILDERS)
