"""Benchmark suites: build every instance, solve it under every rule, verify,
cross-check small instances against brute force, and aggregate pivot counts.

The measured pivot bound is recorded, never asserted.
"""

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from paramlp.config import settings
from paramlp.errors import BenchAbortError, NoParametricDirectionError, VerificationError
from paramlp.models import BenchRecord, BenchReport, InstanceSpec, SuiteSpec
from paramlp.services import storage
from paramlp.services.arith import Arith, format_scalar
from paramlp.services.generators import fixture, gen_klee_minty, gen_random_bounded, klee_minty_start
from paramlp.services.lp import LinearProgram
from paramlp.services.pivotpath import PathReport, bound_report, parametric_path_solve
from paramlp.services.simplex import OPTIMAL, PARAMETRIC, Basis, brute_force_optimum, solve

logger = logging.getLogger(__name__)


def build_instance(spec: InstanceSpec, arith: Arith) -> tuple[LinearProgram, Basis | None]:
    """The LP for a suite entry plus its prescribed start basis (if any)."""
    if spec.kind == "klee_minty":
        return gen_klee_minty(spec.D, arith), klee_minty_start(spec.D)
    if spec.kind == "random_bounded":
        return gen_random_bounded(spec.m, spec.n, spec.seed, arith), None
    return fixture(spec.name, arith).lp, None


def _abort(lp: LinearProgram, rule: str, solution, detail: str, trace_dir: Path) -> None:
    path = trace_dir / f"{lp.name}_{rule}_trace.json"
    storage.save_trace(solution.trace, path)
    logger.error(f"[run_bench] {lp.name} ({rule}): {detail}; trace dumped to {path}")
    raise BenchAbortError(f"{lp.name} ({rule}): {detail}", trace_path=str(path))


def run_record(spec: InstanceSpec, rule: str, mode: str, trace_dir: str) -> tuple[BenchRecord, PathReport | None] | None:
    """Solve one (instance, rule) pair. Returns None when the rule does not apply."""
    arith = Arith.from_settings(mode)
    lp, start = build_instance(spec, arith)
    t0 = time.time()

    report = None
    if rule == PARAMETRIC:
        try:
            solution, report = parametric_path_solve(lp)
        except NoParametricDirectionError:
            logger.warning(f"[run_bench] {lp.name}: n = {lp.n} < m + 2, parametric rule skipped")
            return None
        except VerificationError as e:
            raise BenchAbortError(f"{lp.name} ({rule}): {e}") from e
        pivots, bootstrap = report.pivots_phase2, report.pivots_bootstrap
    else:
        try:
            solution = solve(lp, rule, start)
        except VerificationError as e:
            raise BenchAbortError(f"{lp.name} ({rule}): {e}") from e
        pivots, bootstrap = solution.trace.pivots, 0
    runtime = time.time() - t0

    if solution.status != OPTIMAL or not solution.verified:
        _abort(lp, rule, solution, f"status {solution.status}, verified={solution.verified}", Path(trace_dir))

    agrees = None
    if lp.n <= settings.CROSSCHECK_MAX_N:
        oracle = brute_force_optimum(lp)
        agrees = oracle.status == solution.status and arith.eq(oracle.value, solution.objective)
        if not agrees:
            _abort(lp, rule, solution, f"brute force disagrees ({oracle.status}, {oracle.value})", Path(trace_dir))

    record = BenchRecord(
        instance=spec.label,
        rule=rule,
        n=lp.n,
        m=lp.m,
        status=solution.status,
        pivots=pivots,
        pivots_bootstrap=bootstrap,
        phase1_steps=solution.trace.phase1_steps,
        bound_holds=pivots <= lp.n,
        runtime=round(runtime, 6),
        optimal_value=format_scalar(solution.objective),
        optimal_verified=solution.verified,
        brute_force_agrees=agrees,
    )
    logger.info(f"[run_bench] {spec.label} ({rule}): {pivots} pivots, value {record.optimal_value}, {runtime:.3f}s")
    return record, report


def run_bench(
    suite: SuiteSpec,
    report_path: str | Path | None = None,
    workers: int | None = None,
) -> BenchReport:
    t0 = time.time()
    workers = workers or settings.BENCH_WORKERS
    trace_dir = str(Path(report_path).parent) if report_path else "."
    jobs = [(spec, rule, suite.arith, trace_dir) for spec in suite.instances for rule in suite.rules]
    logger.info(f"[run_bench] {len(suite.instances)} instances × {len(suite.rules)} rules on {workers} worker(s)")

    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_record, *zip(*jobs)))
    else:
        results = [run_record(*job) for job in jobs]

    results = [r for r in results if r is not None]
    records = sorted((record for record, _ in results), key=lambda r: (r.instance, r.rule))
    reports = [report for _, report in results if report is not None]

    pivots_by_rule: dict[str, int] = {}
    for record in records:
        pivots_by_rule[record.rule] = pivots_by_rule.get(record.rule, 0) + record.pivots

    bench = BenchReport(
        records=records,
        total_pivots=sum(record.pivots for record in records),
        pivots_by_rule=pivots_by_rule,
        bound_summary=storage.bound_summary_document(bound_report(reports)) if reports else None,
    )
    if report_path:
        storage.save_bench_report(bench, report_path)
    logger.info(f"[run_bench] {len(records)} records, {bench.total_pivots} pivots in {time.time() - t0:.2f}s")
    return bench
