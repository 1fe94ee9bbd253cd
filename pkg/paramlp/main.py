"""
paramlp command-line interface

Solves standard-form LPs (Bland, Dantzig or the rank-1 parametric path),
analyses single-parameter pairs (Θ, Φ, Ψ and the invariancy sweep),
generates instances and runs benchmark suites. Results are printed as JSON.

Usage:
    python -m paramlp.main solve lp.json --rule bland --arith exact [--trace trace.json]
    python -m paramlp.main sweep pair.json --side primal [--pair block.json]
    python -m paramlp.main phi pair.json --u -1/3
    python -m paramlp.main psi pair.json --v -1
    python -m paramlp.main gen --kind klee-minty --D 3 -o km3.json
    python -m paramlp.main bench --suite suite.json --report report.json

Exit codes: 0 success/optimal, 2 infeasible, 3 unbounded,
4 assumption-violated, 1 usage or internal error (including a float optimum
that fails its KKT check).
"""

import argparse
import logging
import re
import sys
import time

from paramlp.config import settings
from paramlp.errors import AssumptionViolatedError, InfeasibleError, ParamLpError
from paramlp.models import ParametricBlockDocument, SolutionDocument
from paramlp.services import storage
from paramlp.services.arith import Arith, format_scalar
from paramlp.services.bench import run_bench
from paramlp.services.generators import gen_klee_minty, gen_random_bounded, gen_random_pair
from paramlp.services.lp import ParametricPair, build_parametric_pair
from paramlp.services.parametric import PRIMAL, SIDES, phi, psi, sweep
from paramlp.services.pivotpath import parametric_path_solve
from paramlp.services.simplex import BLAND, DANTZIG, INFEASIBLE, OPTIMAL, PARAMETRIC, UNBOUNDED, Basis, solve

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INFEASIBLE = 2
EXIT_UNBOUNDED = 3
EXIT_ASSUMPTION = 4

STATUS_EXIT = {INFEASIBLE: EXIT_INFEASIBLE, UNBOUNDED: EXIT_UNBOUNDED}

PARAMETER_FLAGS = ("--u", "--v")
SIGNED_RATIONAL = re.compile(r"^-\d+(/\d+)?$")


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _join_signed_values(argv: list[str]) -> list[str]:
    """Glue `--u -1/3` into `--u=-1/3`; argparse reads a bare `-1/3` as an option."""
    joined: list[str] = []
    for arg in argv:
        if joined and joined[-1] in PARAMETER_FLAGS and SIGNED_RATIONAL.match(arg):
            joined[-1] = f"{joined[-1]}={arg}"
        else:
            joined.append(arg)
    return joined


def _emit(document) -> None:
    print(document.model_dump_json(indent=2))


def _arith(args) -> Arith:
    return Arith.from_settings(args.arith)


def _load_pair(args) -> ParametricPair:
    arith = _arith(args)
    if args.pair:
        lp = storage.load_lp(args.file, arith)
        block = storage.read_document(args.pair, ParametricBlockDocument)
        return build_parametric_pair(lp, block.d, block.B)
    return storage.load_pair(args.file, arith)


# ── Commands ──


def cmd_solve(args) -> int:
    lp = storage.load_lp(args.file, _arith(args))

    if args.rule == PARAMETRIC:
        solution, report = parametric_path_solve(lp, seed=args.seed)
        _emit(storage.path_report_document(report))
        if args.trace:
            storage.save_trace(solution.trace, args.trace)
        if solution.status != OPTIMAL:
            return STATUS_EXIT[solution.status]
        if not report.optimal_verified:
            return EXIT_ERROR
        return EXIT_OK if report.assumption_clean else EXIT_ASSUMPTION

    start = Basis(tuple(int(j) for j in args.start.split(","))) if args.start else None
    solution = solve(lp, args.rule, start)
    _emit(
        SolutionDocument(
            instance=lp.name,
            rule=args.rule,
            status=solution.status,
            objective=None if solution.objective is None else format_scalar(solution.objective),
            x=[format_scalar(v) for v in solution.x],
            w=[format_scalar(v) for v in solution.w],
            y=[format_scalar(v) for v in solution.y],
            basis=list(solution.basis.basic) if solution.basis else [],
            ray=None if solution.ray is None else [format_scalar(v) for v in solution.ray],
            pivots=solution.trace.pivots,
            phase1_steps=solution.trace.phase1_steps,
            verified=solution.verified,
        )
    )
    if args.trace:
        storage.save_trace(solution.trace, args.trace)
    if solution.status == OPTIMAL and not solution.verified:
        return EXIT_ERROR
    return STATUS_EXIT.get(solution.status, EXIT_OK)


def cmd_sweep(args) -> int:
    pair = _load_pair(args)
    decomposition = sweep(pair, args.side)
    _emit(storage.decomposition_document(decomposition))
    if args.output:
        storage.save_decomposition(decomposition, args.output)
    return EXIT_OK


def cmd_phi(args) -> int:
    pair = _load_pair(args)
    _emit(storage.interval_document(phi(pair, args.u)))
    return EXIT_OK


def cmd_psi(args) -> int:
    pair = _load_pair(args)
    _emit(storage.interval_document(psi(pair, args.v)))
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.kind == "klee-minty":
        if args.D is None:
            raise ParamLpError("--D is required for klee-minty")
        storage.save_lp(gen_klee_minty(args.D), args.output)
    elif args.kind == "random":
        if None in (args.m, args.n, args.seed):
            raise ParamLpError("--m, --n and --seed are required for random")
        storage.save_lp(gen_random_bounded(args.m, args.n, args.seed), args.output)
    else:
        if None in (args.n, args.seed):
            raise ParamLpError("--n and --seed are required for pair")
        storage.save_pair(gen_random_pair(args.n, args.seed), args.output)
    return EXIT_OK


def cmd_bench(args) -> int:
    suite = storage.load_suite(args.suite)
    report = run_bench(suite, args.report, workers=args.workers)
    print(f"{len(report.records)} records, {report.total_pivots} pivots -> {args.report}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="paramlp", description="Parametric LP toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="Solve an LP")
    p.add_argument("file")
    p.add_argument("--rule", choices=[BLAND, DANTZIG, PARAMETRIC], default=BLAND)
    p.add_argument("--arith", choices=["exact", "float"], default=None)
    p.add_argument("--trace", help="Write the pivot trace to this file")
    p.add_argument("--start", help="Comma-separated start basis (Bland/Dantzig only)")
    p.add_argument("--seed", type=int, default=None, help="Fallback direction seed (parametric only)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="Invariancy decomposition of Θ_P or Θ_D")
    p.add_argument("file")
    p.add_argument("--side", choices=list(SIDES), default=PRIMAL)
    p.add_argument("--pair", help="File holding the parametric block (d, B)")
    p.add_argument("--arith", choices=["exact", "float"], default=None)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_sweep)

    for name, value, func in (("phi", "--u", cmd_phi), ("psi", "--v", cmd_psi)):
        p = sub.add_parser(name, help=f"Evaluate {name.upper()} at one parameter value")
        p.add_argument("file")
        p.add_argument(value, required=True, help=f"Parameter value, integer or p/q (negative values: {value} -1/3 or {value}=-1/3)")
        p.add_argument("--pair", help="File holding the parametric block (d, B)")
        p.add_argument("--arith", choices=["exact", "float"], default=None)
        p.set_defaults(func=func)

    p = sub.add_parser("gen", help="Generate an instance")
    p.add_argument("--kind", choices=["klee-minty", "random", "pair"], required=True)
    p.add_argument("--D", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="Run a benchmark suite")
    p.add_argument("--suite", required=True)
    p.add_argument("--report", required=True)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=settings.LOG_LEVEL, format="%(levelname)s %(name)s: %(message)s")
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_join_signed_values(argv))
    start = time.time()
    try:
        code = args.func(args)
    except InfeasibleError as e:
        logger.error(f"Infeasible: {e}")
        return EXIT_INFEASIBLE
    except AssumptionViolatedError as e:
        logger.error(f"Assumption violated: {e}")
        return EXIT_ASSUMPTION
    except ParamLpError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_ERROR
    except Exception:
        import traceback

        logger.error(f"Command failed:\n{traceback.format_exc()}")
        return EXIT_ERROR
    logger.info(f"{args.command} finished in {time.time() - start:.2f}s")
    return code


if __name__ == "__main__":
    sys.exit(main())
