"""Command-line entry points: simulated campaigns, benchmarks, trace analysis,
and the HTTP service.

Exit codes: 0 success, 1 unexpected error, 2 unknown process or bad input
file, 3 numerical failure inside the optimizer.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .bench import benchmark, run_simulated_campaign
from .campaign import export_trace
from .direct import ObjectiveEvaluationError
from .gp import NotPositiveDefiniteError
from .scoring import Targets
from .simulator import BUILTIN_TARGETS, load_process, polynomial_fit_R
from .trace import TraceTable

TRACE_TAIL_COLUMNS = 9  # L, D, f_L, f_D, f_Q, y, BFV, L_pct, D_pct


def _resolve_targets(args: argparse.Namespace) -> Targets:
    if args.target_length is not None and args.target_diameter is not None:
        return Targets(target_length=args.target_length, target_diameter=args.target_diameter)
    builtin = BUILTIN_TARGETS.get(args.process)
    if builtin is None:
        raise SystemExit(
            "custom processes need --target-length and --target-diameter"
        )
    return builtin


def _cmd_simulate(args: argparse.Namespace) -> int:
    process = load_process(args.process)
    targets = _resolve_targets(args)
    state, summary = run_simulated_campaign(
        process,
        targets,
        budget=args.budget,
        seed=args.seed,
        mode=args.mode,
        seed_count=args.seed_count,
    )
    trace_csv = export_trace(state).to_csv()
    Path(args.trace).write_text(trace_csv, encoding="utf-8")
    Path(args.summary).write_text(
        json.dumps(summary.to_dict(), indent=2) + "\n", encoding="utf-8"
    )
    print(
        f"{args.process}: {'converged' if summary.converged else state.status} "
        f"after {summary.iterations} iterations "
        f"(best found {summary.best_found:.4f}, L% {summary.final_l_pct:.1f}, "
        f"D% {summary.final_d_pct:.1f})"
    )
    return 0


def _cmd_benchmark(args: argparse.Namespace) -> int:
    process = load_process(args.process)
    targets = _resolve_targets(args)
    report = benchmark(
        process,
        targets,
        repeats=args.repeats,
        seed=args.seed,
        budget=args.budget,
        mode=args.mode,
    )
    print(f"{'method':<12} {'success_rate':>12} {'median_iterations':>18}")
    for method in (report.optimizer, report.random):
        print(
            f"{method.name:<12} {method.success_rate:>12.2f} "
            f"{method.median_iterations:>18}"
        )
    if args.json:
        Path(args.json).write_text(
            json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8"
        )
    return 0


def _cmd_analyze(args: argparse.Namespace) -> int:
    table = TraceTable.from_csv(Path(args.trace).read_text(encoding="utf-8"))
    if len(table.columns) <= 1 + TRACE_TAIL_COLUMNS:
        raise SystemExit(f"{args.trace} does not look like a campaign trace")
    dim_names = list(table.columns[1 : len(table.columns) - TRACE_TAIL_COLUMNS])
    reports = []
    print(f"{'parameter':<12} {'response':<10} {'R':>8}")
    for name in dim_names:
        values = [float(v) for v in table.column(name)]
        for response_col, response_name in (("L", "length"), ("D", "diameter")):
            responses = [float(v) for v in table.column(response_col)]
            try:
                fit = polynomial_fit_R(
                    list(zip(values, responses)), parameter=name, response=response_name
                )
            except ValueError:
                print(f"{name:<12} {response_name:<10} {'n/a':>8}")
                continue
            reports.append(fit)
            print(f"{name:<12} {response_name:<10} {fit.r:>8.4f}")

    by_parameter: dict[str, list[float]] = {}
    for fit in reports:
        by_parameter.setdefault(fit.parameter, []).append(fit.r)
    ranking = sorted(
        ((sum(rs) / len(rs), name) for name, rs in by_parameter.items()), reverse=True
    )
    print("ranking: " + ", ".join(f"{name} ({mean_r:.3f})" for mean_r, name in ranking))
    if args.json:
        payload = [
            {
                "parameter": f.parameter,
                "response": f.response,
                "r": f.r,
                "coefficients": list(f.coefficients),
            }
            for f in reports
        ]
        Path(args.json).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .server import create_app

    app = create_app(args.state_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="expopt", description="experiment-optimization toolkit"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--process", required=True, help="built-in name or JSON file")
        p.add_argument("--target-length", type=float, default=None)
        p.add_argument("--target-diameter", type=float, default=None)
        p.add_argument("--budget", type=int, default=20)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--seed-count", type=int, default=5)
        p.add_argument("--mode", choices=("exhaustive", "direct"), default="exhaustive")

    sim = sub.add_parser("simulate", help="run one simulated campaign")
    add_common(sim)
    sim.add_argument("--trace", default="trace.csv", help="output CSV path")
    sim.add_argument("--summary", default="summary.json", help="output summary path")
    sim.set_defaults(func=_cmd_simulate)

    bench = sub.add_parser("benchmark", help="optimizer vs random baseline")
    add_common(bench)
    bench.add_argument("--repeats", type=int, default=20)
    bench.add_argument("--json", default=None, help="optional JSON report path")
    bench.set_defaults(func=_cmd_benchmark)

    analyze = sub.add_parser("analyze", help="quadratic-fit sensitivity of a trace")
    analyze.add_argument("--trace", required=True, help="campaign trace CSV")
    analyze.add_argument("--json", default=None, help="optional JSON report path")
    analyze.set_defaults(func=_cmd_analyze)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--state-dir", default=None, help="campaign log directory")
    serve.set_defaults(func=_cmd_serve)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (json.JSONDecodeError, KeyError) as exc:
        print(f"error: unreadable input: {exc}", file=sys.stderr)
        return 2
    except (NotPositiveDefiniteError, ObjectiveEvaluationError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except SystemExit:
        raise
    except Exception as exc:  # pragma: no cover - last-resort diagnostics
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
