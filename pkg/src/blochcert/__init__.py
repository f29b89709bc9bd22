"""Exact dispersion polynomials of periodic graph operators and
machine-checkable (ir)reducibility certificates for their lattice expansions."""

from __future__ import annotations

__version__ = "0.1.0"

from .criteria import (
    AnalysisOptions,
    AnalysisResult,
    analyze,
    div_j_sigma,
    flat_bands,
    replay_certificate,
)
from .floquet import dispersion, expanded_dispersion, periodic_expanded_dispersion
from .graphs import Labeling, PeriodicGraph, build_named, q_expand
from .laurent import CapExceeded, LaurentMatrix, LaurentPoly
from .polytope import IntegralPolytope, hull

__all__ = [
    "AnalysisOptions",
    "AnalysisResult",
    "CapExceeded",
    "IntegralPolytope",
    "Labeling",
    "LaurentMatrix",
    "LaurentPoly",
    "PeriodicGraph",
    "analyze",
    "build_named",
    "dispersion",
    "div_j_sigma",
    "expanded_dispersion",
    "flat_bands",
    "hull",
    "periodic_expanded_dispersion",
    "q_expand",
    "replay_certificate",
    "__version__",
]
