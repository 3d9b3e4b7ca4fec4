"""Command-line front end.

Every subcommand reads JSON inputs (inline or ``@path``), validates them
against the bundled schemas and writes JSON (CSV for ``flow``) to stdout or
``--out``. Exit codes: 0 success, 1 usage or schema error, 2 numerical
breakdown with its details as JSON on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from importlib import resources

import jsonschema
import numpy as np
from referencing import Registry, Resource

from . import examples
from .cmv import build_cmv
from .core import HermitianLaurentPolynomial, SchurSequence, ZERO_TAIL, as_complex, complex_pair
from .darboux_forward import forward
from .darboux_inverse import CLASSIFY_RTOL, InverseParameters, classify, inverse, recover_source_schur
from .errors import Breakdown, CMVDarbouxError
from .factorization import qr_shifted
from .higher_degree import forward_d, inverse_d
from .quasi_cmv import QuasiInverseParameters, QuasiSchurSequence, quasi_classify, quasi_forward, quasi_inverse
from .schur_flows import trajectory
from .szego_bridge import verify_theorem_AAA, matrix_szego_projection

SCHEMAS = ("complex", "schur", "laurent", "block", "grid")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---- schemas and input parsing ----

def _load_schema(name: str) -> dict:
    text = resources.files("cmv_darboux").joinpath("schemas", f"{name}.json").read_text()
    return json.loads(text)


def _registry() -> Registry:
    return Registry().with_resources((f"{n}.json", Resource.from_contents(_load_schema(n))) for n in SCHEMAS)


def validate(kind: str, document) -> None:
    if kind not in SCHEMAS:
        raise UsageError(f"unknown schema {kind!r}")
    validator = jsonschema.Draft202012Validator(_load_schema(kind), registry=_registry())
    errors = sorted(validator.iter_errors(document), key=lambda e: list(e.path))
    if errors:
        err = errors[0]
        where = "/".join(str(p) for p in err.path) or "<root>"
        raise UsageError(f"{kind} schema violation at {where}: {err.message}")


def _read_json(text: str):
    if text.startswith("@"):
        with open(text[1:]) as fh:
            text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"invalid JSON: {exc}") from None


def _document(text: str, kind: str):
    doc = _read_json(text)
    validate(kind, doc)
    return doc


def _schur(text: str, quasi: bool = False) -> SchurSequence:
    doc = _document(text, "schur")
    return QuasiSchurSequence.from_json(doc) if quasi or "e0" in doc else SchurSequence.from_json(doc)


def _laurent(text: str) -> HermitianLaurentPolynomial:
    return HermitianLaurentPolynomial.from_json(_document(text, "laurent"))


def _complex(text: str) -> complex:
    """A number, a JSON pair [re, im], or "re,im"."""
    try:
        value = json.loads(text)
    except json.JSONDecodeError:
        parts = text.split(",")
        if len(parts) != 2:
            raise UsageError(f"cannot read complex number {text!r}") from None
        try:
            return complex(float(parts[0]), float(parts[1]))
        except ValueError:
            raise UsageError(f"cannot read complex number {text!r}") from None
    validate("complex", value)
    return as_complex(value)


def _require(args, *names):
    missing = [n for n in names if getattr(args, n.replace("-", "_")) is None]
    if missing:
        raise UsageError(f"{args.command} needs " + ", ".join("--" + n for n in missing))


# ---- output ----

def _plain(obj):
    """Numpy scalars and arrays to builtin types; complex numbers to [re, im]."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return complex_pair(obj)
    return obj


def _number(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    text = format(x, ".17g")
    return text if any(c in text for c in ".en") else text + ".0"


def dumps(obj) -> str:
    """JSON with every float written to 17 significant digits."""
    obj = _plain(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(json.dumps(k) + ": " + dumps(v) for k, v in obj.items()) + "}"
    if isinstance(obj, list):
        return "[" + ", ".join(dumps(v) for v in obj) + "]"
    if isinstance(obj, float):
        return _number(obj)
    return json.dumps(obj)


def _matrix(m: np.ndarray):
    m = np.asarray(m)
    if np.iscomplexobj(m) and np.max(np.abs(m.imag), initial=0.0) > 0:
        return [[complex_pair(z) for z in row] for row in m]
    return [[float(z) for z in row] for row in np.real(m)]


# ---- subcommands ----

def cmd_forward(args):
    _require(args, "schur", "laurent", "n")
    a = _schur(args.schur)
    ell = _laurent(args.laurent)
    if ell.degree == 1:
        res = forward(a, ell, args.n)
        return {"target": res.target.to_json(), "factor": res.factor.to_json(), "radicands": res.radicands}
    res = forward_d(a, ell, args.n)
    return {"target": res.target.to_json(), "factor": res.factor.to_json()}


def _degree_check(args, ell):
    if args.degree is not None and args.degree != ell.degree:
        raise UsageError(f"--degree {args.degree} does not match the Laurent polynomial (degree {ell.degree})")


def cmd_inverse(args):
    _require(args, "schur-b", "laurent", "n")
    b = _schur(args.schur_b)
    ell = _laurent(args.laurent)
    _degree_check(args, ell)
    if ell.degree > 1:
        _require(args, "r0-block")
        block = np.array([[as_complex(x) for x in row] for row in _document(args.r0_block, "block")])
        return {"factor": inverse_d(b, ell, block, args.n).to_json()}
    _require(args, "r0", "s0", "r1")
    params = InverseParameters(args.r0, _complex(args.s0), args.r1)
    A = inverse(b, ell, params, args.n)
    rec = recover_source_schur(b, A, ell)
    return {
        "parameters": params.to_json(),
        "factor": A.to_json(),
        "source": rec.schur.to_json(),
        "consistency_residual": rec.consistency_residual,
        "classification": classify(b, ell, params).to_json(),
    }


def _axis(spec):
    lo, hi, count = spec
    return np.linspace(lo, hi, int(count))


def _classify_point(job):
    b, ell, r0, s0, r1, rtol = job
    try:
        return classify(b, ell, InverseParameters(r0, s0, r1), rtol=rtol).kind
    except Breakdown:
        return "breakdown"
    except ValueError:
        return "invalid"


def _grid_scan(b, ell, grid, jobs, rtol):
    points = list(itertools.product(_axis(grid["r0"]), _axis(grid["s0"]), _axis(grid["r1"])))
    work = [(b, ell, float(r0), float(s0), float(r1), rtol) for r0, s0, r1 in points]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            kinds = list(pool.map(_classify_point, work, chunksize=64))
    else:
        kinds = [_classify_point(w) for w in work]
    counts = {}
    for k in kinds:
        counts[k] = counts.get(k, 0) + 1
    cmv = [[r0, s0, r1] for (r0, s0, r1), k in zip(points, kinds) if k == "cmv"]
    return {"points": len(points), "counts": dict(sorted(counts.items())), "cmv": cmv}


def cmd_classify(args):
    _require(args, "schur-b", "laurent")
    b = _schur(args.schur_b)
    ell = _laurent(args.laurent)
    if args.grid is not None:
        return _grid_scan(b, ell, _document(args.grid, "grid"), args.jobs, args.rtol)
    _require(args, "r0", "s0", "r1")
    return classify(b, ell, InverseParameters(args.r0, _complex(args.s0), args.r1), rtol=args.rtol).to_json()


def cmd_quasi_forward(args):
    _require(args, "schur", "laurent", "n")
    res = quasi_forward(_schur(args.schur, quasi=True), _laurent(args.laurent), args.n)
    return {"target": res.target.to_json(), "factor": res.factor.to_json(), "signs": res.signs.to_json(),
            "pivots": res.residuals}


def _quasi_params(args):
    _require(args, "e0r0sq", "s0", "e1r1sq")
    return QuasiInverseParameters(args.e0r0sq, _complex(args.s0), args.e1r1sq)


def cmd_quasi_inverse(args):
    _require(args, "schur-b", "laurent", "n")
    b = _schur(args.schur_b, quasi=True)
    ell = _laurent(args.laurent)
    params = _quasi_params(args)
    res = quasi_inverse(b, ell, params, args.n)
    return {"parameters": params.to_json(), "factor": res.factor.to_json(), "signs": res.signs.to_json(),
            "classification": quasi_classify(b, ell, params).to_json()}


def cmd_quasi_classify(args):
    _require(args, "schur-b", "laurent")
    b = _schur(args.schur_b, quasi=True)
    return quasi_classify(b, _laurent(args.laurent), _quasi_params(args), rtol=args.rtol).to_json()


def cmd_szego(args):
    _require(args, "schur", "laurent", "n")
    a = _schur(args.schur)
    ell = _laurent(args.laurent)
    n = args.n if args.n % 2 == 1 else args.n + 1
    target = forward(a, ell, n + 3).target
    report = verify_theorem_AAA(a, target, ell, n)
    src = matrix_szego_projection(build_cmv(a, n))
    dst = matrix_szego_projection(build_cmv(target, n))
    return {
        "order": n,
        "target": target.to_json(),
        "source_even": src.even.to_json(),
        "source_odd": src.odd.to_json(),
        "target_even": dst.even.to_json(),
        "target_odd": dst.odd.to_json(),
        "block_factor": _matrix(report.block_factor),
        "residuals": report.to_json(),
    }


def cmd_qr(args):
    _require(args, "schur", "zeta", "n")
    Q, R = qr_shifted(build_cmv(_schur(args.schur), args.n), _complex(args.zeta))
    return {"Q": Q.to_json(), "R": R.to_json()}


def cmd_flow(args):
    _require(args, "t", "dt")
    a0 = _schur(args.schur) if args.schur is not None else SchurSequence((), ZERO_TAIL)
    lam = _complex(args.lam) if args.lam is not None else 1.0 + 0j
    L = 20 if args.n is None else args.n
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t", "n", "re", "im"])
    for state in trajectory(a0, lam, args.t, args.dt, L, args.scheme, args.every):
        for k, z in enumerate(state.a, start=1):
            writer.writerow([format(state.t, ".12g"), k, format(z.real, ".12g"), format(z.imag, ".12g")])
    return buf.getvalue()


def cmd_validate(args):
    validate(args.schema, _read_json(args.document))
    return {"valid": True, "schema": args.schema}


def cmd_examples(args):
    checks = examples.run_all()
    text = "".join(c.line() + "\n" for c in checks)
    return text, 0 if all(c.passed for c in checks) else 1


COMMANDS = {
    "forward": cmd_forward,
    "inverse": cmd_inverse,
    "classify": cmd_classify,
    "quasi-forward": cmd_quasi_forward,
    "quasi-inverse": cmd_quasi_inverse,
    "quasi-classify": cmd_quasi_classify,
    "szego": cmd_szego,
    "flow": cmd_flow,
    "qr": cmd_qr,
    "validate": cmd_validate,
    "examples": cmd_examples,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cmv-darboux", description="Darboux transformations of CMV matrices.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--out", help="write the result here instead of stdout")
        if name == "validate":
            p.add_argument("schema", choices=SCHEMAS)
            p.add_argument("document", help="inline JSON or @path")
            continue
        if name == "examples":
            continue
        p.add_argument("--schur", help="source Schur sequence (JSON or @path)")
        p.add_argument("--schur-b", help="target Schur sequence (JSON or @path)")
        p.add_argument("--laurent", help="Hermitian Laurent polynomial (JSON or @path)")
        p.add_argument("--n", type=int, help="number of steps or matrix order")
        if name in ("inverse", "classify"):
            p.add_argument("--r0", type=float)
            p.add_argument("--s0")
            p.add_argument("--r1", type=float)
        if name == "inverse":
            p.add_argument("--degree", type=int)
            p.add_argument("--r0-block", help="leading 2d x 2d block of the factor (JSON or @path)")
        if name == "classify":
            p.add_argument("--grid", help="scan {r0, s0, r1: [lo, hi, count]} instead of one point")
            p.add_argument("--jobs", type=int, default=1, help="worker processes for grid scans")
        if name in ("classify", "quasi-classify"):
            p.add_argument("--rtol", type=float, default=CLASSIFY_RTOL,
                           help="relative tolerance of the classification tests (raise it for rounded inputs)")
        if name in ("quasi-inverse", "quasi-classify"):
            p.add_argument("--e0r0sq", type=float)
            p.add_argument("--s0")
            p.add_argument("--e1r1sq", type=float)
        if name == "qr":
            p.add_argument("--zeta")
        if name == "flow":
            p.add_argument("--lambda", dest="lam", help="unimodular flow parameter")
            p.add_argument("--t", type=float, help="final time")
            p.add_argument("--dt", type=float, help="step (the Darboux delta for --scheme darboux)")
            p.add_argument("--scheme", choices=("darboux", "rk4"), default="darboux")
            p.add_argument("--every", type=int, default=1, help="emit every k-th step")
    return parser


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(argv) -> int:
    try:
        args = build_parser().parse_args(argv)
        result = COMMANDS[args.command](args)
        code = 0
        if isinstance(result, tuple):
            result, code = result
        text = result if isinstance(result, str) else dumps(result) + "\n"
        _emit(text, args.out)
        return code
    except Breakdown as exc:
        sys.stderr.write(dumps(exc.to_dict()) + "\n")
        return 2
    except (UsageError, CMVDarbouxError, ValueError, OSError) as exc:
        sys.stderr.write(dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 1


def main(argv=None) -> int:
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
