"""Command-line interface.

Subcommands read JSON documents (CMatrix, FiniteBlaschke, AtomicMeasure)
and print a JSON report (or CSV for sampled scalar series).  Exit codes:
0 when the command completed, 2 for input errors, 3 for numerical
failures.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import herglotz, livsic, model_space, orders
from . import partial_isometry as pi
from .exceptions import InputError, NumericalError, PisometryError, SchemaError
from .numerics import Tolerance, cmatrix_to_json, complex_to_json
from .rational import h2_inner

__all__ = ["main", "build_parser", "run"]

EXIT_OK, EXIT_INPUT, EXIT_NUMERICAL = 0, 2, 3


class ParseError(InputError):
    """Input file is not valid JSON."""


def _plain(obj):
    """Convert numpy and complex values into JSON-ready Python objects."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if obj.ndim == 2:
            return cmatrix_to_json(obj)
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (complex, np.complexfloating)):
        return complex_to_json(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def _load(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def _tolerance(args):
    return Tolerance(rank_eps=args.tol_rank, residual_eps=args.tol_res)


def _disk_samples(count, n=1):
    """``default_samples`` when ``count`` is unset, else ``count`` points on a spiral."""
    if count is None:
        return livsic.default_samples(n)
    if count < 1:
        raise InputError("--samples must be positive")
    k = np.arange(count)
    radius = 0.8 * np.sqrt((k + 0.5) / count)
    return radius * np.exp(2j * np.pi * 0.6180339887498949 * k)


def _verdict_dict(v):
    return v.to_json()


def cmd_analyze(args, tol):
    doc = _load(args.input)
    try:
        V = pi.from_json(doc, tol)
    except pi.NotPartialIsometryError as exc:
        return {"valid": False, "reason": str(exc)}
    status = pi.is_completely_non_unitary(V)
    spectrum = sorted(status.eigenvalues, key=lambda v: (abs(v), np.angle(v)))
    out = {
        "valid": True,
        "dim": V.dim,
        "indices": list(V.indices),
        "cnu": status.kind == "cnu",
        "cnu_status": status.kind,
        "spectrum": [complex(np.round(v.real, 12) + 0.0, np.round(v.imag, 12) + 0.0) for v in spectrum],
    }
    if status.kind == "not_cnu":
        out["unitary_part_dim"] = int(status.unitary_part.shape[1])
    return out


def cmd_charfn(args, tol):
    V = pi.from_json(_load(args.input), tol)
    w = livsic.CharFn.from_defect(V) if args.route == "defect" else livsic.CharFn.from_extension(V)
    rows = []
    for z in _disk_samples(args.samples, w.size):
        value = w(z)
        rows.append(
            {
                "z": complex(z),
                "w": value,
                "singular_values": np.linalg.svd(value, compute_uv=False),
            }
        )
    return {"route": args.route, "size": w.size, "samples": rows}


def cmd_compare(args, tol):
    A = pi.from_json(_load(args.a), tol, field="a")
    B = pi.from_json(_load(args.b), tol, field="b")
    out = {}
    out["hm"] = pi.hm_leq(A, B) if A.dim == B.dim else None
    out["leq_q"] = _verdict_dict(orders.leq_q(A, B, seed=args.seed))
    out["leq"] = _verdict_dict(orders.leq(A, B, budget=args.budget, seed=args.seed))
    n = A.indices[0]
    samples = _disk_samples(args.samples, n)
    if samples.size < 2 * n * n:
        raise InputError(f"compare needs at least {2 * n * n} samples")
    result = livsic.coincide(
        livsic.CharFn.from_extension(A), livsic.CharFn.from_extension(B), samples, tol, seed=args.seed
    )
    out["coincide"] = result.to_json()
    if A.indices == (1, 1) and A.dim == B.dim:
        out["sim"] = orders.sim_check(A, B)
    else:
        out["sim"] = None
    out["sim_q"] = _verdict_dict(orders.simq_check(A, B, seed=args.seed)) if A.dim == B.dim else None
    return out


def cmd_blaschke(args, tol):
    B = model_space.FiniteBlaschke.from_json(_load(args.input))
    if B.degree < 1:
        raise InputError("Blaschke product must have at least one zero")
    basis = model_space.tm_basis(B)
    out = {
        "blaschke": B.to_json(),
        "degree": B.degree,
        "gram_residual": float(np.linalg.norm(basis.gram() - np.eye(B.degree))),
    }
    if abs(B(0)) <= tol.residual_eps:
        S = model_space.compressed_shift(B, tol)
        out["compressed_shift"] = S.matrix
    else:
        out["compressed_shift"] = None
    M = model_space.mult_partial_isometry(B, tol)
    out["mult_partial_isometry"] = M.matrix
    w = livsic.CharFn.from_defect(M)
    out["samples"] = [
        {"z": complex(z), "B": complex(B(z)), "w": complex(w(z)[0, 0])}
        for z in _disk_samples(args.samples)
    ]
    if args.crofoot is not None:
        try:
            a = complex(args.crofoot.replace(" ", "").replace("i", "j"))
        except ValueError as exc:
            raise InputError(f"cannot parse Crofoot parameter {args.crofoot!r}") from exc
        Ba, mult = model_space.crofoot(B, a)
        G = np.array([[h2_inner(mult * e, mult * f) for e in basis.functions] for f in basis.functions])
        out["crofoot"] = {
            "a": a,
            "shifted": Ba.to_json(),
            "gram_residual": float(np.linalg.norm(G - np.eye(B.degree))),
        }
    return out


def cmd_clark(args, tol):
    doc = _load(args.input)
    rng = np.random.default_rng(args.seed)
    if isinstance(doc, dict) and "atoms" in doc:
        mu = model_space.AtomicMeasure.from_json(doc)
        Phi = model_space.inner_from_measure(mu)
        back = model_space.clark_measure(Phi)
        B = Phi
        out = {"measure": mu.to_json(), "inner": Phi.to_json(), "round_trip": back.to_json()}
        out["round_trip_error"] = model_space.measure_distance(mu, back)
    else:
        B = model_space.FiniteBlaschke.from_json(doc)
        mu = model_space.clark_measure(B)
        Phi = model_space.inner_from_measure(mu)
        out = {"blaschke": B.to_json(), "measure": mu.to_json(), "inner": Phi.to_json()}
        pts = 0.9 * np.sqrt(rng.random(20)) * np.exp(2j * np.pi * rng.random(20))
        out["round_trip_error"] = float(np.max(np.abs(Phi(pts) - B(pts))))
    count = args.samples or 10
    z = 0.9 * np.sqrt(rng.random(count)) * np.exp(2j * np.pi * rng.random(count))
    lhs = (1 - np.abs(B(z)) ** 2) / np.abs(1 - B(z)) ** 2
    out["poisson_residual"] = float(np.max(np.abs(lhs - model_space.poisson_integral(mu, z))))
    return out


def cmd_kernels(args, tol):
    V = pi.from_json(_load(args.input), tol)
    frame = herglotz.ModelFrame(V)
    rng = np.random.default_rng(args.seed)
    count = args.samples or 15
    kernel_formula_gap = herglotz_gap = 0.0
    pairs = 0
    while pairs < count:
        z, w = (complex(rng.normal(), rng.normal()) * 0.7 for _ in range(2))
        if min(abs(abs(z) - 1), abs(abs(w) - 1)) < 0.05 or abs(1 - z * np.conj(w)) < 0.05:
            continue
        pairs += 1
        k = herglotz.abstract_kernel(frame, z, w)
        kernel_formula_gap = max(kernel_formula_gap, float(np.max(np.abs(k - herglotz.gamma_kernel(frame, z, w)))))
        K = herglotz.herglotz_kernel(frame.G, z, w)
        W = herglotz.canonical_multiplier
        herglotz_gap = max(
            herglotz_gap, float(np.max(np.abs(K - W(frame, z) @ k @ W(frame, w).conj().T)))
        )
    pts = [0.6 * np.exp(2j * np.pi * j / 6) * (0.5 + 0.1 * j) for j in range(6)]

    def margin(kern):
        G = herglotz.kernel_gram(kern, pts)
        return float(np.linalg.eigvalsh((G + G.conj().T) / 2)[0])

    return {
        "pairs": pairs,
        "kernel_formula_gap": kernel_formula_gap,
        "herglotz_identity_residual": herglotz_gap,
        "psd_margin_model_kernel": margin(lambda a, b: herglotz.abstract_kernel(frame, a, b)),
        "psd_margin_herglotz_kernel": margin(lambda a, b: herglotz.herglotz_kernel(frame.G, a, b)),
    }


COMMANDS = {
    "analyze": cmd_analyze,
    "charfn": cmd_charfn,
    "compare": cmd_compare,
    "blaschke": cmd_blaschke,
    "clark": cmd_clark,
    "kernels": cmd_kernels,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-rank", type=float, default=1e-9, help="relative rank threshold")
    common.add_argument("--tol-res", type=float, default=1e-8, help="absolute residual threshold")
    common.add_argument("--samples", type=int, default=None, help="number of sample points")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output", default=None, help="write the report here instead of stdout")

    parser = argparse.ArgumentParser(prog="pisometry", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("analyze", parents=[common], help="validity, indices, CNU status, spectrum")
    p.add_argument("input")
    p = sub.add_parser("charfn", parents=[common], help="sampled characteristic function")
    p.add_argument("input")
    p.add_argument("--route", choices=("extension", "defect"), default="extension")
    p = sub.add_parser("compare", parents=[common], help="order relations and coincidence")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--budget", type=int, default=8)
    p = sub.add_parser("blaschke", parents=[common], help="model space report for a Blaschke product")
    p.add_argument("input")
    p.add_argument("--crofoot", default=None, help="Crofoot parameter, e.g. 0.3+0.1j")
    p = sub.add_parser("clark", parents=[common], help="Clark measure or inner function from a measure")
    p.add_argument("input")
    p = sub.add_parser("kernels", parents=[common], help="kernel identity residuals and PSD margins")
    p.add_argument("input")
    return parser


def _to_csv(command, report):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if command == "charfn":
        n = report["size"]
        writer.writerow(["abs_z"] + [f"sv_{k + 1}" for k in range(n)])
        for row in report["samples"]:
            writer.writerow([repr(abs(row["z"]))] + [repr(float(s)) for s in row["singular_values"]])
    elif command == "blaschke":
        writer.writerow(["abs_z", "abs_B", "abs_w"])
        for row in report["samples"]:
            writer.writerow([repr(abs(row["z"])), repr(abs(row["B"])), repr(abs(row["w"]))])
    else:
        raise InputError(f"CSV output is only available for charfn and blaschke, not {command}")
    return buf.getvalue()


def run(argv=None):
    """Run one command; returns ``(exit_code, text, output_path)``."""
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        tol = _tolerance(args)
        report = COMMANDS[args.command](args, tol)
        if args.format == "csv":
            text = _to_csv(args.command, report)
        else:
            report = dict(report)
            report["command"] = args.command
            report["tolerance"] = tol.to_json()
            report["seed"] = args.seed
            text = json.dumps(_plain(report), sort_keys=True, indent=2) + "\n"
        code = EXIT_OK
    except SchemaError as exc:
        text = json.dumps({"error": "schema", "field": exc.field, "message": str(exc)}, sort_keys=True) + "\n"
        code = EXIT_INPUT
    except InputError as exc:
        text = json.dumps({"error": type(exc).__name__, "message": str(exc)}, sort_keys=True) + "\n"
        code = EXIT_INPUT
    except NumericalError as exc:
        text = json.dumps({"error": type(exc).__name__, "message": str(exc)}, sort_keys=True) + "\n"
        code = EXIT_NUMERICAL
    except PisometryError as exc:
        text = json.dumps({"error": type(exc).__name__, "message": str(exc)}, sort_keys=True) + "\n"
        code = EXIT_NUMERICAL
    return code, text, getattr(args, "output", None)


def main(argv=None):
    code, text, output = run(argv)
    if output and code == EXIT_OK:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        stream = sys.stdout if code == EXIT_OK else sys.stderr
        stream.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
