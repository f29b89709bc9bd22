"""HTTP face of the operation layer.

Run with: uvicorn blochcert.service:app
Every endpoint accepts the same request document the command line builds,
so in-process and remote runs produce identical results.
"""

from __future__ import annotations

from typing import Any, Mapping

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, ConfigDict, Field

from . import __version__
from .ops import OpError, graph_family_names, run_op

app = FastAPI(
    title="blochcert",
    version=__version__,
    description=(
        "Exact dispersion polynomials of periodic graph operators and "
        "machine-checkable (ir)reducibility certificates for their "
        "lattice expansions."
    ),
)


class GraphRequest(BaseModel):
    """Common inputs naming a graph, an expansion order, and a potential."""

    model_config = ConfigDict(extra="forbid")

    graph: str | dict[str, Any]
    d: int | None = None
    Q: list[int] | str | None = None
    potential: str | dict[str, Any] | None = None
    seed: int = 0
    cap: int = Field(default=16, ge=1, le=64)


class AnalyzeRequest(GraphRequest):
    lambda0: str | None = None
    axioms: list[dict[str, Any]] = Field(default_factory=list)
    div_zero_as_q: bool = False
    flat_band_scan: bool = True


class VerifyRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    certificate: dict[str, Any]
    tol: float = 1e-9
    samples: int = Field(default=20, ge=1, le=1000)
    seed: int = 0


class ExportRequest(GraphRequest):
    grid: int = Field(default=8, ge=1, le=64)


def _run(name: str, req: Mapping) -> dict:
    try:
        return run_op(name, req)
    except OpError as exc:
        raise HTTPException(
            status_code=400, detail={"kind": exc.kind, "message": exc.message}
        )


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__, "graphs": graph_family_names()}


@app.post("/dispersion")
def dispersion_endpoint(req: GraphRequest) -> dict:
    return _run("dispersion", req.model_dump())


@app.post("/expand")
def expand_endpoint(req: GraphRequest) -> dict:
    return _run("expand", req.model_dump())


@app.post("/analyze")
def analyze_endpoint(req: AnalyzeRequest) -> dict:
    return _run("analyze", req.model_dump())


@app.post("/verify")
def verify_endpoint(req: VerifyRequest) -> dict:
    return _run("verify", req.model_dump())


@app.post("/export")
def export_endpoint(req: ExportRequest) -> dict:
    return _run("export", req.model_dump())
