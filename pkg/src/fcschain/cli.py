"""Command-line frontend.

Exit codes: 0 success, 1 verification failure, 2 usage or input error,
3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import logging
import math
import sys
from dataclasses import asdict

import numpy as np

from . import entanglement as ent
from .errors import AllStartsFailed, SolveFailed
from .io import RunRecord, encode_matrix, load_params, result_to_dict, write_csv, write_trace
from .optimizer import AnnealingConfig, diagnose, multi_start
from .parametrization import ParameterVector, bloch_decompose, build_pair, ellipse_residual
from .fcs import reduced_density, solve_invariant_state
from .reference import C_WOOTTERS
from .verify import run_suite, scale_v2

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

log = logging.getLogger("fcschain")


class UsageError(Exception):
    pass


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.replace(",", " ").split()] if text.strip() else []
    except ValueError as exc:
        raise UsageError(f"not a list of numbers: {text!r}") from exc


def _emit(record: RunRecord, out) -> None:
    if out:
        try:
            record.write(out)
        except OSError as exc:
            raise UsageError(f"cannot write {out}: {exc}") from exc
    else:
        print(record.dumps())


# --- evaluate --------------------------------------------------------------


def evaluation_report(params: ParameterVector) -> dict:
    r = diagnose(params)
    out = result_to_dict(r)
    for k in ("evals", "converged", "line_search_failed", "seed", "trace", "runs"):
        out.pop(k)
    pair = build_pair(params)
    state = solve_invariant_state(pair)
    out["rho12"] = encode_matrix(reduced_density(pair, state, 2).rho)
    if params.b == 2:
        out["ellipse_residual"] = ellipse_residual(bloch_decompose(state.rho, 2))
    return out


def cmd_evaluate(args) -> int:
    if args.params:
        try:
            params = load_params(args.params)
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise UsageError(f"malformed parameter file {args.params}: {exc}") from exc
    else:
        if args.b is None or args.alpha is None or args.phi is None:
            raise UsageError("give --params FILE or all of --b, --alpha, --phi")
        try:
            params = ParameterVector(args.b, _floats(args.alpha), _floats(args.phi))
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    report = evaluation_report(params)
    _emit(RunRecord("evaluate", {"params": params.to_dict()}, report), args.out)
    return EXIT_OK


# --- optimize --------------------------------------------------------------


def _config(args) -> AnnealingConfig:
    try:
        return AnnealingConfig(
            nt=args.nt, ns=args.ns, rt=args.rt, neps=args.neps, eps=args.eps, t0=args.t0,
            max_evals=args.max_evals, seed=args.seed, complex_r=args.complex_R, non_nilpotent=args.non_nilpotent,
            hops=args.hops,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def summary_line(b: int, concurrence: float) -> str:
    gap = 100.0 * (C_WOOTTERS - concurrence) / C_WOOTTERS
    return f"b={b} concurrence={concurrence:.6f} relative_difference_from_C_W={gap:.2f}%"


def cmd_optimize(args) -> int:
    if args.b is None or args.b < 2:
        raise UsageError("--b must be an integer >= 2")
    config = _config(args)
    try:
        result = multi_start(args.b, config, n_starts=args.starts, workers=args.workers)
    except AllStartsFailed as exc:
        print(f"AllStartsFailed: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    inputs = {"b": args.b, "n_starts": args.starts, "config": asdict(config)}
    record = RunRecord("optimize", inputs, result_to_dict(result))
    if args.out:
        _emit(record, args.out)
    if args.trace:
        write_trace(args.trace, result.trace)
    print(summary_line(args.b, result.concurrence))
    return EXIT_OK


# --- scan-b2 ---------------------------------------------------------------


def scan_b2_rows(grid: int):
    alphas = np.linspace(0.0, math.pi, grid)
    phis = np.linspace(-math.pi / 2, math.pi / 2, grid)
    for a in alphas:
        for p in phis:
            yield (a, p, ent.analytic_concurrence_b2(a, p), ent.analytic_assistance_b2(a, p))


def cmd_scan_b2(args) -> int:
    if args.grid < 2:
        raise UsageError("--grid must be >= 2")
    rows = [tuple(repr(float(v)) for v in row) for row in scan_b2_rows(args.grid)]
    header = ["alpha1", "phi1", "concurrence", "assistance"]
    if args.out:
        try:
            write_csv(args.out, header, rows)
        except OSError as exc:
            raise UsageError(f"cannot write {args.out}: {exc}") from exc
    else:
        w = csv.writer(sys.stdout)
        w.writerow(header)
        w.writerows(rows)
    return EXIT_OK


# --- report-cp -------------------------------------------------------------


def reference_curves(samples: int = 200):
    rows = []
    for q in np.linspace(0.0, 1.0, samples):
        pur, con = ent.mems_point(q)
        rows.append(("mems", pur, con, f"q={q!r}"))
    for p in np.linspace(0.0, 1.0, samples):
        pur, con = ent.werner_point(p)
        rows.append(("werner", pur, con, f"p={p!r}"))
    return rows


def cmd_report_cp(args) -> int:
    rows = []
    for path in args.results:
        try:
            rec = RunRecord.read(path)
            out = rec.outputs
            b = out["params"]["b"]
            rows.append(("optima", out["purity12"], out["concurrence"], f"b={b};file={path}"))
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise UsageError(f"malformed result file {path}: {exc}") from exc
    rows.extend(reference_curves())
    rows.append(("reference", "", C_WOOTTERS, "C_W"))
    rows = [(s, repr(float(p)) if p != "" else "", repr(float(c)), lab) for s, p, c, lab in rows]
    header = ["set", "purity", "concurrence", "label"]
    try:
        write_csv(args.out, header, rows)
    except OSError as exc:
        raise UsageError(f"cannot write {args.out}: {exc}") from exc
    return EXIT_OK


# --- verify ----------------------------------------------------------------


def cmd_verify(args) -> int:
    bs = [int(b) for b in _floats(args.b_list)]
    corrupt = scale_v2(1.0 + args.corrupt_v2) if args.corrupt_v2 else None
    report = run_suite(bs, draws=args.draws, seed=args.seed, corrupt=corrupt,
                       max_rejects=args.draws if corrupt else 10_000)
    for line in report.lines():
        print(line)
    print("ALL CHECKS PASSED" if report.passed else "VERIFICATION FAILED")
    return EXIT_OK if report.passed else EXIT_VERIFY


# --- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fcschain", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evaluate", help="properties of the chain at one parameter set")
    p.add_argument("--params", help="parameter JSON {b, alpha, phi} or a run record")
    p.add_argument("--b", type=int)
    p.add_argument("--alpha", help="comma separated radians")
    p.add_argument("--phi", help="comma separated radians")
    p.add_argument("--out")
    p.set_defaults(func=cmd_evaluate)

    d = AnnealingConfig()
    p = sub.add_parser("optimize", help="maximize nearest-neighbour concurrence")
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--seed", type=int, default=d.seed)
    p.add_argument("--starts", type=int, default=8)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--nt", type=int, default=d.nt)
    p.add_argument("--ns", type=int, default=d.ns)
    p.add_argument("--rt", type=float, default=d.rt)
    p.add_argument("--neps", type=int, default=d.neps)
    p.add_argument("--eps", type=float, default=d.eps)
    p.add_argument("--t0", type=float, default=d.t0)
    p.add_argument("--max-evals", type=int, default=d.max_evals)
    p.add_argument("--hops", type=int, default=d.hops, help="perturb-and-refine hops after BFGS (0 disables)")
    p.add_argument("--out")
    p.add_argument("--trace", help="CSV file for the (eval, best value) trace")
    p.add_argument("--complex-R", action="store_true", help="general unitary rotation factor")
    p.add_argument("--non-nilpotent", action="store_true", help="add upper-diagonal weight to v1")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("scan-b2", help="closed-form b=2 landscape on a grid")
    p.add_argument("--grid", type=int, default=129)
    p.add_argument("--out")
    p.set_defaults(func=cmd_scan_b2)

    p = sub.add_parser("report-cp", help="concurrence-vs-purity points with MEMS and Werner curves")
    p.add_argument("results", nargs="+")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report_cp)

    p = sub.add_parser("verify", help="randomized invariant suite")
    p.add_argument("--b-list", default="2,3,4")
    p.add_argument("--draws", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--corrupt-v2", type=float, default=0.0, help="negative control: scale v2 by 1+x")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SolveFailed as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
