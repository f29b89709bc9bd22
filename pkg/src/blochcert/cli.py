"""Command line for dispersion polynomials and expansion certificates.

Runs every operation in process by default; --server forwards the same
request document to a running service so results match exactly.

Exit codes: 0 success, 1 failed verification, 2 invalid input,
3 determinant cap exceeded, 10 analysis verdict Inconclusive.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Any, Mapping

from . import __version__
from .ops import OpError, graph_family_names, run_op
from .serialize import pretty_json

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_VALIDATION = 2
EXIT_CAP = 3
EXIT_INCONCLUSIVE = 10


def _load_document(text: str):
    """Load a JSON document from @path, a readable path, or inline JSON."""
    if text.startswith("@"):
        with open(text[1:], "r", encoding="utf-8") as fh:
            return json.load(fh)
    if text.lstrip().startswith(("{", "[")):
        return json.loads(text)
    if os.path.exists(text) and text.endswith(".json"):
        with open(text, "r", encoding="utf-8") as fh:
            return json.load(fh)
    return None


def _graph_arg(text: str):
    doc = _load_document(text)
    return text if doc is None else doc


def _potential_arg(text: str | None):
    if text is None:
        return None
    doc = _load_document(text)
    return text if doc is None else doc


def _common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--graph",
        required=True,
        help=f"graph family ({', '.join(graph_family_names())}) or a JSON document (@path, path.json, or inline)",
    )
    p.add_argument("--d", type=int, default=None, help="number of period directions")
    p.add_argument("--Q", default=None, help="expansion orders, e.g. 2,3")
    p.add_argument(
        "--potential",
        default=None,
        help="symbolic | zero | random-rational(seed) | JSON map (@path or inline)",
    )
    p.add_argument("--seed", type=int, default=0, help="seed for random choices")
    p.add_argument("--cap", type=int, default=16, help="exact determinant size cap")
    p.add_argument("--out", default=None, help="write the result here instead of stdout")
    p.add_argument("--server", default=None, help="forward to a service URL")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blochcert",
        description="Exact dispersion polynomials and expansion (ir)reducibility certificates.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dispersion", help="dispersion polynomial of the base graph")
    _common_flags(p)

    p = sub.add_parser("expand", help="dispersion polynomial after expansion")
    _common_flags(p)

    p = sub.add_parser("analyze", help="classify the expanded polynomial with a certificate")
    _common_flags(p)
    p.add_argument("--lambda0", default=None, help="rational eigenvalue level p/q")
    p.add_argument("--axioms", default=None, help="JSON list of axiom grants (@path or inline)")
    p.add_argument(
        "--div-zero-as-q",
        action="store_true",
        help="treat a zero support-lattice divisor as the expansion order in gcd tests",
    )
    p.add_argument(
        "--no-flat-band-scan",
        action="store_true",
        help="skip the eigenvalue-linear factor scan",
    )

    p = sub.add_parser("verify", help="replay a certificate and spot-check the product identity")
    p.add_argument("certificate", help="certificate JSON (@path or path)")
    p.add_argument("--tol", type=float, default=1e-9, help="numeric tolerance")
    p.add_argument("--samples", type=int, default=20, help="number of sample points")
    p.add_argument("--seed", type=int, default=0, help="sampling seed")
    p.add_argument("--out", default=None)
    p.add_argument("--server", default=None)

    p = sub.add_parser("export", help="write polytope geometry and a spectrum sample")
    _common_flags(p)
    p.add_argument("--grid", type=int, default=8, help="torus grid points per direction")
    return parser


def _request_from_args(args: argparse.Namespace) -> tuple[str, dict]:
    if args.command == "verify":
        path = args.certificate
        doc = _load_document(path if path.startswith("@") else "@" + path)
        if not isinstance(doc, Mapping):
            raise OpError("validation", f"cannot read certificate {path!r}")
        return "verify", {
            "certificate": doc,
            "tol": args.tol,
            "samples": args.samples,
            "seed": args.seed,
        }
    req: dict[str, Any] = {
        "graph": _graph_arg(args.graph),
        "d": args.d,
        "Q": args.Q,
        "potential": _potential_arg(args.potential),
        "seed": args.seed,
        "cap": args.cap,
    }
    if args.command == "analyze":
        axioms = _load_document(args.axioms) if args.axioms else []
        if axioms is None:
            raise OpError("validation", f"cannot read axioms {args.axioms!r}")
        req.update(
            lambda0=args.lambda0,
            axioms=axioms,
            div_zero_as_q=args.div_zero_as_q,
            flat_band_scan=not args.no_flat_band_scan,
        )
    if args.command == "export":
        req["grid"] = args.grid
    return args.command, req


def _run_remote(server: str, name: str, req: Mapping) -> dict:
    import httpx

    url = server.rstrip("/") + "/" + name
    reply = httpx.post(url, json=dict(req), timeout=300.0)
    if reply.status_code == 400:
        detail = reply.json().get("detail", {})
        raise OpError(detail.get("kind", "validation"), detail.get("message", reply.text))
    if reply.status_code != 200:
        raise OpError("validation", f"server returned {reply.status_code}: {reply.text[:500]}")
    return reply.json()


def _emit(result: Mapping, args: argparse.Namespace) -> None:
    if args.command == "export":
        if not args.out:
            raise OpError("validation", "export needs --out DIRECTORY")
        os.makedirs(args.out, exist_ok=True)
        written = []
        for name, text in result["files"].items():
            path = os.path.join(args.out, name)
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
            written.append(path)
        meta = {k: v for k, v in result.items() if k != "files"}
        meta["written"] = sorted(written)
        print(pretty_json(meta), end="")
        return
    text = pretty_json(dict(result))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(args.out)
    else:
        print(text, end="")


def _exit_code(name: str, result: Mapping) -> int:
    if name == "analyze" and result.get("verdict") == "Inconclusive":
        return EXIT_INCONCLUSIVE
    if name == "verify" and not result.get("ok", False):
        return EXIT_FAILED
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        name, req = _request_from_args(args)
        if getattr(args, "server", None):
            result = _run_remote(args.server, name, req)
        else:
            result = run_op(name, req)
        _emit(result, args)
        return _exit_code(name, result)
    except OpError as exc:
        print(f"error ({exc.kind}): {exc.message}", file=sys.stderr)
        return EXIT_CAP if exc.kind == "cap" else EXIT_VALIDATION
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error (io): {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
