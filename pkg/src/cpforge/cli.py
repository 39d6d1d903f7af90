"""Command-line front end.

  cpforge verify-table [--json]
  cpforge scan (--catalog NAME | --file PATH | --single-pulse X|H) [--mode populations|fidelity:G]
               [--eps lo:hi:n] [--deltaT D] [-o out.csv]
  cpforge optimize --problem problem.json [--starts N] [--max-evals N] [--seed S] -o PREFIX
  cpforge catalog export --dir DIR

Exit codes: 0 success, 1 failed check or I/O error, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import catalog as cat
from .metrics import gate_fidelity, single_pulse_reference, standard_gate, transfer_cost
from .model import ContractError
from .optimizer import ProblemFormatError, load_problem, optimize
from .scan import EpsilonGrid, robustness_summary, scan_fidelity, scan_populations
from .sequence import SequenceFormatError, compose, dump_sequence, load_sequence, total_area

AREA_TOL = 0.01  # units of pi
MERIT_FLAG = 0.99

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _seed_default() -> int:
    raw = os.environ.get("CPFORGE_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"CPFORGE_SEED must be an integer, got {raw!r}") from None


def _entry_merit(entry: cat.CatalogEntry) -> float:
    U = compose(entry.sequence, 0.0)
    if entry.is_gate:
        return gate_fidelity(U, entry.gate)
    return 1.0 - transfer_cost(U, entry.target)


def verify_table(entries) -> list[dict]:
    rows = []
    for entry in entries:
        area = float(total_area(entry.sequence) / np.pi)
        merit = float(_entry_merit(entry))
        rows.append({
            "name": entry.name,
            "target": entry.label,
            "published_area_over_pi": entry.published_area,
            "computed_area_over_pi": area,
            "area_ok": bool(abs(area - entry.published_area) <= AREA_TOL),
            "merit_eps0": merit,
            "merit_flag": bool(merit < MERIT_FLAG),
        })
    return rows


def cmd_verify_table(args) -> int:
    rows = verify_table(cat.load_catalog())
    n_ok = sum(r["area_ok"] for r in rows)
    if args.json:
        print(json.dumps({"entries": rows, "passed": n_ok, "total": len(rows)}, indent=2))
    else:
        print(f"{'entry':8s} {'target':8s} {'A_pub/pi':>9s} {'A_calc/pi':>10s} {'area':>5s} {'merit(0)':>10s}")
        for r in rows:
            flag = "  < 0.99" if r["merit_flag"] else ""
            print(f"{r['name']:8s} {r['target']:8s} {r['published_area_over_pi']:9.2f} "
                  f"{r['computed_area_over_pi']:10.4f} {'ok' if r['area_ok'] else 'FAIL':>5s} "
                  f"{r['merit_eps0']:10.6f}{flag}")
        print(f"{n_ok}/{len(rows)} area checks pass")
        for r in rows:
            if not r["area_ok"]:
                print(f"{r['name']}: computed area {r['computed_area_over_pi']:.4f} pi differs from "
                      f"published {r['published_area_over_pi']:.2f} pi by more than {AREA_TOL} pi",
                      file=sys.stderr)
    return EXIT_OK if n_ok == len(rows) else EXIT_FAIL


def _resolve_sequence(args):
    """Return (sequence, default mode, transfer target)."""
    if args.catalog is not None:
        try:
            entry = cat.get_entry(args.catalog)
        except KeyError as exc:
            raise UsageError(exc.args[0]) from None
        seq = entry.sequence
        mode = f"fidelity:{entry.target}" if entry.is_gate else "populations"
        target = (0.0, 1.0) if entry.is_gate else entry.target
    elif args.file is not None:
        path = Path(args.file)
        try:
            seq = load_sequence(path)
        except OSError as exc:
            raise UsageError(f"cannot read sequence file {path}: {exc.strerror or exc}") from None
        except SequenceFormatError as exc:
            raise UsageError(f"malformed sequence file {path}: {exc}") from None
        mode, target = "populations", (0.0, 1.0)
    else:
        delta = args.deltaT if args.deltaT is not None else cat.DELTA_T_SINGLE
        seq = single_pulse_reference(args.single_pulse, delta)
        mode = f"fidelity:{args.single_pulse}"
        target = (0.0, 1.0) if args.single_pulse == "X" else (0.5, 0.5)
    if args.deltaT is not None:
        seq = seq.with_delta(args.deltaT)
    return seq, mode, target


def cmd_scan(args) -> int:
    try:
        grid = EpsilonGrid.parse(args.eps)
    except (ValueError, ContractError) as exc:
        raise UsageError(f"bad --eps value {args.eps!r}: {exc}") from None
    if args.deltaT is not None and not args.deltaT > 0:
        raise UsageError("--deltaT must be positive")
    seq, mode, target = _resolve_sequence(args)
    mode = args.mode or mode
    if args.target is not None:
        target = args.target
    if mode == "populations":
        profile = scan_populations(seq, grid, target)
    elif mode.startswith("fidelity:"):
        try:
            gate = standard_gate(mode.split(":", 1)[1])
        except ContractError as exc:
            raise UsageError(str(exc)) from None
        profile = scan_fidelity(seq, gate, grid)
    else:
        raise UsageError(f"unknown mode {mode!r}; use 'populations' or 'fidelity:<X|H|T>'")

    text = profile.to_csv()
    summary_stream = sys.stdout
    if args.out in (None, "-"):
        sys.stdout.write(text)
        summary_stream = sys.stderr
    else:
        try:
            Path(args.out).write_text(text)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_FAIL
    try:
        s = robustness_summary(profile, args.threshold)
    except ContractError:
        s = None
    label = seq.name or "sequence"
    print(f"{label} ({mode}, delta_T={seq.params.delta:g}, {grid.n_points} points)", file=summary_stream)
    if s is not None:
        print(f"center merit {s['center']:.10f}  worst {s['worst']:.10f}  "
              f"width(>={args.threshold:g}) {s['width']:.6g}", file=summary_stream)
    return EXIT_OK


def cmd_optimize(args) -> int:
    if args.starts < 1 or args.max_evals < 1:
        raise UsageError("budget must be positive (--starts and --max-evals >= 1)")
    try:
        problem = load_problem(args.problem)
    except OSError as exc:
        raise UsageError(f"cannot read problem file {args.problem}: {exc.strerror or exc}") from None
    except ProblemFormatError as exc:
        raise UsageError(f"malformed problem file {args.problem}: {exc}") from None
    seed = args.seed if args.seed is not None else _seed_default()
    result = optimize(problem, starts=args.starts, max_evals=args.max_evals, seed=seed,
                      refine_iter=args.refine_iter, name=args.name)
    prefix = Path(args.out)
    report = result.report()
    report["problem"] = problem.to_dict()
    report["starts"] = args.starts
    report["max_evals"] = args.max_evals
    try:
        if prefix.parent != Path(""):
            prefix.parent.mkdir(parents=True, exist_ok=True)
        dump_sequence(result.sequence, prefix.with_name(prefix.name + ".json"))
        prefix.with_name(prefix.name + ".report.json").write_text(json.dumps(report, indent=2) + "\n")
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    print(f"objective {result.objective:.10g}  worst {result.worst_merit:.6g}  "
          f"area {result.area / np.pi:.4f} pi  converged {result.converged}")
    return EXIT_OK


def cmd_catalog_export(args) -> int:
    try:
        paths = cat.export_catalog(args.dir)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    for p in paths:
        print(p)
    return EXIT_OK


def cmd_catalog_list(args) -> int:
    for entry in cat.load_catalog():
        print(f"{entry.name:8s} {entry.label:8s} {len(entry.sequence)} pulses  A = {entry.published_area:.2f} pi")
    return EXIT_OK


def _targets(text):
    try:
        P0, P1 = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected P0,P1, got {text!r}") from None
    return P0, P1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cpforge", description="Composite pulses for a three-level transmon.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-table", help="check the built-in sequences against their published areas")
    p.add_argument("--json", action="store_true", help="machine-readable report")
    p.set_defaults(func=cmd_verify_table)

    p = sub.add_parser("scan", help="tabulate populations or fidelity against the amplitude error")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--catalog", metavar="NAME")
    src.add_argument("--file", metavar="PATH", help="sequence JSON file")
    src.add_argument("--single-pulse", choices=["X", "H"])
    p.add_argument("--mode", help="populations or fidelity:<X|H|T>")
    p.add_argument("--eps", default="-0.5:0.5:201", help="grid lo:hi:n (default %(default)s)")
    p.add_argument("--deltaT", type=float, help="override the anharmonicity delta*T")
    p.add_argument("--target", type=_targets, help="transfer target P0,P1 for the summary merit")
    p.add_argument("--threshold", type=float, default=0.99)
    p.add_argument("-o", "--out", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("optimize", help="search for a robust sequence")
    p.add_argument("--problem", required=True, metavar="PATH")
    p.add_argument("--starts", type=int, default=16)
    p.add_argument("--max-evals", type=int, default=4000, help="Nelder-Mead evaluations per start")
    p.add_argument("--refine-iter", type=int, default=200, help="SLSQP refinement iterations (0 = off)")
    p.add_argument("--seed", type=int, help="defaults to $CPFORGE_SEED or 0")
    p.add_argument("--name", default="optimized")
    p.add_argument("-o", "--out", required=True, metavar="PREFIX",
                   help="writes PREFIX.json and PREFIX.report.json")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("catalog", help="built-in sequences")
    csub = p.add_subparsers(dest="catalog_command", required=True)
    q = csub.add_parser("export", help="write the built-in sequences as JSON files")
    q.add_argument("--dir", required=True)
    q.set_defaults(func=cmd_catalog_export)
    q = csub.add_parser("list")
    q.set_defaults(func=cmd_catalog_list)
    return ap


def _join_negative_grid(argv):
    # argparse would read "--eps -0.5:0.5:201" as two options
    out = []
    it = iter(argv)
    for a in it:
        if a == "--eps":
            nxt = next(it, None)
            out.append(a if nxt is None else f"--eps={nxt}")
        else:
            out.append(a)
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_join_negative_grid(argv))
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"cpforge: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
