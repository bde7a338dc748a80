"""Command-line front end.

Exit codes: 0 success, 1 internal invariant failure, 2 usage error,
3 malformed input, 4 infeasible instance, 5 size cap exceeded,
6 verification failed, 7 benchmark breach.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import ContractViolation, InfeasibleInstanceError, InvalidInstanceError, MalformedSolutionError, SizeCapError
from .facility import FLSolution
from .formats import (
    dumps,
    fl_from_clustering,
    fl_solution_to_doc,
    instance_from_doc,
    load_instance,
    solution_from_doc,
    solution_to_doc,
)
from .ledger import VARIANT_IDS, declared_factor, ledger_rows
from .metric import eval_radius
from .registry import SOLVERS
from .runner import bench, config_from_doc, default_underlying, oracle_value, run_once, verify_solution

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2
EXIT_MALFORMED = 3
EXIT_INFEASIBLE = 4
EXIT_SIZE_CAP = 5
EXIT_VERIFY = 6
EXIT_BREACH = 7

UNDERLYING_CHOICES = sorted(SOLVERS) + ["private-capacitated"]


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _load_json(path: str, what: str):
    try:
        return json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise InvalidInstanceError(f"{what} is not valid JSON: {exc}") from exc


def cmd_solve(args) -> int:
    inst = load_instance(_read(args.input))
    sol, report = run_once(inst, args.variant, args.underlying, with_oracle=args.oracle, seed=args.seed)
    if args.tau_trace:
        _write(args.tau_trace, "".join(json.dumps(r) + "\n" for r in report.trace))
    if args.report:
        _write(args.report, dumps(report.to_doc(timing=args.timing)))
    if sol is None:
        print(f"infeasible: {report.violations[0]}", file=sys.stderr)
        return EXIT_INFEASIBLE
    doc = fl_solution_to_doc(inst, sol) if isinstance(sol, FLSolution) else solution_to_doc(inst, sol)
    _write(args.output, dumps(doc))
    if not report.feasible:
        print(f"solver output failed verification: {report.violations}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


def cmd_verify(args) -> int:
    inst = load_instance(_read(args.input))
    sol, stored = solution_from_doc(inst, _load_json(args.solution, "solution"))
    problems = []
    if args.variant == "private-capacitated-fl":
        fl = fl_from_clustering(inst, sol)
        problems += verify_solution(inst, args.variant, fl)
        for key, value in (("connection", fl.connection), ("opening", fl.opening), ("total", fl.total)):
            if key in stored and stored[key] != value:
                problems.append(f"stored {key} {stored[key]} differs from recomputed {value}")
    else:
        problems += verify_solution(inst, args.variant, sol)
        radius = eval_radius(inst, sol)
        if "radius" not in stored:
            problems.append("solution stores no radius")
        elif stored["radius"] != radius:
            problems.append(f"stored radius {stored['radius']} differs from recomputed {radius}")
    verdict = {"feasible": not problems, "violations": problems}
    _write(args.output, dumps(verdict))
    return EXIT_OK if not problems else EXIT_VERIFY


def cmd_oracle(args) -> int:
    inst = load_instance(_read(args.input))
    value = oracle_value(inst, args.variant)
    if value is None:
        print("infeasible", file=sys.stderr)
        return EXIT_INFEASIBLE
    _write(args.output, dumps({"variant": args.variant, "optimum": str(value)}))
    return EXIT_OK


def cmd_bench(args) -> int:
    config = None
    if args.config:
        config = config_from_doc(_load_json(args.config, "generator configuration"))
    res = bench(
        args.variant,
        args.underlying,
        trials=args.trials,
        seed=args.seed,
        config=config,
        max_n=args.max_n,
        oracle=not args.no_oracle,
    )
    _write(args.output, dumps(res.to_doc()))
    if res.breaches:
        out = Path(args.replay_dir)
        out.mkdir(parents=True, exist_ok=True)
        for b in res.breaches:
            path = out / f"replay-{args.variant}-{args.seed}-{b['trial']}.json"
            path.write_text(dumps(b["instance"]))
            print(f"breach in trial {b['trial']}: {b['reason']} (instance saved to {path})", file=sys.stderr)
        return EXIT_BREACH
    return EXIT_OK


def cmd_factors(args) -> int:
    lines = ledger_rows()
    if args.input:
        inst = instance_from_doc(_load_json(args.input, "instance"))
        lines.append("")
        for variant in sorted(VARIANT_IDS):
            try:
                lines.append(f"this instance, {variant} with {args.underlying or 'default'}: "
                             f"{declared_factor(variant, args.underlying or default_underlying(inst, variant), inst)}")
            except (InvalidInstanceError, ValueError):
                continue
    _write(args.output, "\n".join(lines) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="privclust", description="Lower-bounded k-center clustering with side constraints.")
    sub = p.add_subparsers(dest="command", required=True)
    variants = sorted(VARIANT_IDS)

    s = sub.add_parser("solve", help="solve one instance")
    s.add_argument("--variant", required=True, choices=variants)
    s.add_argument("--underlying", choices=UNDERLYING_CHOICES)
    s.add_argument("--input", required=True, help="instance file ('-' for stdin)")
    s.add_argument("--output", help="solution file (default stdout)")
    s.add_argument("--report", help="write the run report here")
    s.add_argument("--tau-trace", help="write per-threshold iteration records (JSON lines) here")
    s.add_argument("--oracle", action="store_true", help="also compute the exact optimum and the ratio")
    s.add_argument("--seed", type=int, default=0, help="recorded in the report; solvers are deterministic")
    s.add_argument("--timing", action="store_true", help="include wall time in the report")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="check a solution against an instance")
    v.add_argument("--variant", required=True, choices=variants)
    v.add_argument("--input", required=True)
    v.add_argument("--solution", required=True)
    v.add_argument("--output")
    v.set_defaults(func=cmd_verify)

    o = sub.add_parser("oracle", help="exact optimum of a small instance")
    o.add_argument("--variant", required=True, choices=variants)
    o.add_argument("--input", required=True)
    o.add_argument("--output")
    o.set_defaults(func=cmd_oracle)

    b = sub.add_parser("bench", help="random sweep against the oracle and the declared factors")
    b.add_argument("--variant", required=True, choices=variants)
    b.add_argument("--underlying", choices=UNDERLYING_CHOICES)
    b.add_argument("--trials", type=int, default=100)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--max-n", type=int, help="largest number of points drawn")
    b.add_argument("--config", help="JSON file with generator settings")
    b.add_argument("--no-oracle", action="store_true", help="feasibility checks only")
    b.add_argument("--output")
    b.add_argument("--replay-dir", default="bench-replay")
    b.set_defaults(func=cmd_bench)

    f = sub.add_parser("factors", help="print the declared approximation factors")
    f.add_argument("--input", help="also show the factors that apply to this instance")
    f.add_argument("--underlying", choices=UNDERLYING_CHOICES)
    f.add_argument("--output")
    f.set_defaults(func=cmd_factors)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InvalidInstanceError, MalformedSolutionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except InfeasibleInstanceError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except SizeCapError as exc:
        print(f"size cap: {exc}", file=sys.stderr)
        return EXIT_SIZE_CAP
    except ContractViolation as exc:
        print(f"internal invariant failed: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED


if __name__ == "__main__":
    sys.exit(main())
