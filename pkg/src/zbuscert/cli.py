"""Command-line surface: solve, certify, sweep, and example emission.

Exit codes: solve returns 0 when converged and 2 otherwise; certify
returns 0 when feasible and 3 otherwise; sweep and example return 0; any
input problem (bad path, malformed file, bad flag value) returns 1.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import certificate as cert
from . import solver
from .assembly import assemble_system
from .errors import ZBusError
from .feeder import (
    Feeder,
    complex_to_pair,
    dump_json,
    emit_feeder,
    pair_to_complex,
    parse_feeder_dict,
    parse_feeder_text,
)
from .loads import index_loads
from .reference import ThreeNodeParams, TwoNodeParams, three_node, two_node

SCHEMA_VERSION = "1"


class InputError(Exception):
    """User input problem; reported on stderr with exit code 1."""


def _read_feeder(path: str) -> Feeder:
    try:
        if path == "-":
            return parse_feeder_text(sys.stdin.read())
        with open(path, "r", encoding="utf-8") as handle:
            return parse_feeder_text(handle.read())
    except OSError as exc:
        raise InputError(f"cannot read feeder file {path!r}: {exc}") from exc


def _load_complex_vector(path: str, expected: int, what: str) -> np.ndarray:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except OSError as exc:
        raise InputError(f"cannot read {what} file {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{what} file {path!r}: malformed JSON: {exc.msg}") from exc
    if not isinstance(data, list) or len(data) != expected:
        raise InputError(f"{what} file {path!r}: expected {expected} [re, im] pairs")
    return np.array(
        [pair_to_complex(x, f"{what}[{k}]") for k, x in enumerate(data)], dtype=complex
    )


def _scaling_from_flag(flag: str, system) -> solver.LambdaChoice:
    if flag == "identity":
        return solver.LambdaChoice()
    if flag == "diag-w":
        return solver.LambdaChoice(mode="diag_w")
    if flag.startswith("file:"):
        vec = _load_complex_vector(flag[5:], system.size, "scaling")
        return solver.LambdaChoice(mode="custom", custom=vec)
    raise InputError(f"--lambda must be identity, diag-w, or file:<path>, got {flag!r}")


def _init_from_flag(flag: str, system) -> tuple[str, np.ndarray | None]:
    if flag == "no-load":
        return "no_load", None
    if flag == "flat":
        return "flat", None
    if flag.startswith("file:"):
        return "custom", _load_complex_vector(flag[5:], system.size, "initial voltage")
    raise InputError(f"--init must be no-load, flat, or file:<path>, got {flag!r}")


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)


def _solve_report(trace: solver.SolveTrace, config_echo: dict) -> dict:
    rate = None
    if len(trace.iterates) >= 3 and trace.empirical_ratios:
        rate = solver.empirical_rate(trace)
    report = {
        "schema_version": SCHEMA_VERSION,
        "status": trace.status,
        "converged": trace.status == solver.STATUS_CONVERGED,
        "iterations": trace.iterations,
        "residual": trace.residual,
        "non_contracting_tail": trace.non_contracting_tail,
        "empirical_rate": rate,
        "final_voltage": None,
        "config": config_echo,
    }
    if trace.solution is not None:
        report["final_voltage"] = [complex_to_pair(z) for z in trace.solution]
    return report


def _cert_report(result: cert.CertificateResult, config_echo: dict) -> dict:
    coeffs = result.coefficients
    return {
        "schema_version": SCHEMA_VERSION,
        "feasible": result.feasible,
        "r_min": result.r_min,
        "r_max": result.r_max,
        "alpha_at_rmin": result.alpha_at_rmin,
        "coefficients": {
            "a1": coeffs.a1,
            "a2": coeffs.a2,
            "A_Y": coeffs.A_Y,
            "A_D": coeffs.A_D,
            "B_Y": coeffs.B_Y,
            "B_D": coeffs.B_D,
            "C_Y": coeffs.C_Y,
            "C_D": coeffs.C_D,
            "D_Y": coeffs.D_Y,
            "D_D": coeffs.D_D,
        },
        "alpha_curve": [[r, alpha] for r, alpha in result.alpha_curve],
        "intervals": [[lo, hi] for lo, hi in result.intervals],
        "config": config_echo,
    }


def _cmd_example(args) -> int:
    if args.which == "two-node":
        feeder = two_node(TwoNodeParams(s_l=args.s_l))
    else:
        feeder = three_node(ThreeNodeParams(theta=args.theta))
    sys.stdout.write(emit_feeder(feeder))
    return 0


def _cmd_solve(args) -> int:
    feeder = _read_feeder(args.feeder)
    system = assemble_system(feeder.network, feeder.wye, feeder.delta, feeder.v_slack)
    scaling = _scaling_from_flag(args.lam, system)
    init_mode, init_vector = _init_from_flag(args.init, system)
    config = solver.SolveConfig(
        max_iters=args.max_iters,
        tol=args.tol,
        init=init_mode,
        init_vector=init_vector,
        scaling=scaling,
    )
    trace = solver.solve(system, feeder.wye, feeder.delta, config)
    if args.trace is not None:
        with open(args.trace, "w", encoding="utf-8") as handle:
            solver.write_trace_csv(trace, handle)
    echo = {
        "command": "solve",
        "lambda": args.lam,
        "init": args.init,
        "tol": args.tol,
        "max_iters": args.max_iters,
    }
    _write_text(args.out, dump_json(_solve_report(trace, echo)))
    return 0 if trace.status == solver.STATUS_CONVERGED else 2


def _cmd_certify(args) -> int:
    feeder = _read_feeder(args.feeder)
    system = assemble_system(feeder.network, feeder.wye, feeder.delta, feeder.v_slack)
    scaling = _scaling_from_flag(args.lam, system)
    try:
        result = cert.certify_system(
            system,
            index_loads(feeder.network, feeder.wye, feeder.delta),
            scaling,
            curve_samples=args.curve_samples,
        )
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    echo = {
        "command": "certify",
        "lambda": args.lam,
        "curve_samples": args.curve_samples,
    }
    _write_text(args.out, dump_json(_cert_report(result, echo)))
    return 0 if result.feasible else 3


def _parse_scale_range(spec: str) -> list[float]:
    parts = spec.split(":")
    if len(parts) != 3:
        raise InputError(f"--scale must be start:stop:step, got {spec!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError as exc:
        raise InputError(f"--scale must hold three numbers, got {spec!r}") from exc
    if step <= 0:
        raise InputError("--scale step must be positive")
    values = []
    k = 0
    while True:
        value = start + k * step
        if value > stop + 1e-12 * max(1.0, abs(stop)):
            break
        values.append(value)
        k += 1
    if not values:
        values = [start]
    return values


def _cmd_sweep(args) -> int:
    feeder = _read_feeder(args.feeder)
    rows = []
    for scale in _parse_scale_range(args.scale):
        wye = feeder.wye.scaled(scale)
        delta = feeder.delta.scaled(scale)
        system = assemble_system(feeder.network, wye, delta, feeder.v_slack)
        result = cert.certify_system(system, index_loads(feeder.network, wye, delta))
        trace = solver.solve(system, wye, delta)
        rate = ""
        if len(trace.iterates) >= 3 and trace.empirical_ratios:
            rate = repr(solver.empirical_rate(trace))
        rows.append(
            [
                repr(scale),
                "true" if result.feasible else "false",
                repr(result.r_min) if result.feasible else "",
                repr(result.r_max) if result.feasible else "",
                repr(result.alpha_at_rmin) if result.feasible else "",
                trace.status,
                trace.iterations,
                rate,
            ]
        )
    lines = []
    writer_target = _CsvLines(lines)
    writer = csv.writer(writer_target, lineterminator="\n")
    writer.writerow(
        [
            "theta",
            "feasible",
            "r_min",
            "r_max",
            "alpha_at_rmin",
            "solve_status",
            "iters",
            "empirical_rate",
        ]
    )
    for row in rows:
        writer.writerow(row)
    _write_text(args.out, "".join(lines))
    return 0


class _CsvLines:
    def __init__(self, sink: list[str]):
        self._sink = sink

    def write(self, text: str) -> None:
        self._sink.append(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zbuscert",
        description=(
            "Three-phase distribution load flow by the Z-bus fixed-point "
            "iteration, with contraction-ball convergence certificates."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_example = sub.add_parser("example", help="emit a built-in feeder file to stdout")
    p_example.add_argument("which", choices=["two-node", "three-node"])
    p_example.add_argument("--s-l", dest="s_l", type=float, default=-0.5,
                           help="power entry of the two-node ZIP load (default -0.5)")
    p_example.add_argument("--theta", type=float, default=0.5,
                           help="load scale of the three-node network (default 0.5)")
    p_example.set_defaults(func=_cmd_example)

    common = {"feeder": dict(help="feeder file path, or - for stdin")}

    p_solve = sub.add_parser("solve", help="run the fixed-point iteration")
    p_solve.add_argument("feeder", **common["feeder"])
    p_solve.add_argument("--lambda", dest="lam", default="identity",
                         help="identity | diag-w | file:<path>")
    p_solve.add_argument("--init", default="no-load", help="no-load | flat | file:<path>")
    p_solve.add_argument("--tol", type=float, default=1e-10)
    p_solve.add_argument("--max-iters", type=int, default=100)
    p_solve.add_argument("--trace", default=None, help="write per-iteration CSV here")
    p_solve.add_argument("--out", default=None, help="write the JSON report here (default stdout)")
    p_solve.set_defaults(func=_cmd_solve)

    p_cert = sub.add_parser("certify", help="compute the convergence certificate")
    p_cert.add_argument("feeder", **common["feeder"])
    p_cert.add_argument("--lambda", dest="lam", default="identity",
                        help="identity | diag-w | file:<path>")
    p_cert.add_argument("--curve-samples", type=int, default=200)
    p_cert.add_argument("--out", default=None, help="write the JSON report here (default stdout)")
    p_cert.set_defaults(func=_cmd_certify)

    p_sweep = sub.add_parser("sweep", help="scale power/current loads and tabulate results")
    p_sweep.add_argument("feeder", **common["feeder"])
    p_sweep.add_argument("--scale", required=True, help="start:stop:step multiplier range")
    p_sweep.add_argument("--out", default=None, help="write the CSV table here (default stdout)")
    p_sweep.set_defaults(func=_cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ZBusError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
