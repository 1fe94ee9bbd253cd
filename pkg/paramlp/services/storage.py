"""JSON persistence for LPs, pairs, decompositions, traces and reports.

Scalars are written as integers, "p/q" strings (exact mode) or floats (float
mode); interval ends at infinity are written as "-inf" / "+inf".
"""

import logging
from pathlib import Path
from typing import Type, TypeVar

from pydantic import BaseModel, ValidationError

from paramlp.errors import SchemaError
from paramlp.models import (
    BenchReport,
    BoundSummaryDocument,
    DecompositionDocument,
    IntervalDocument,
    LpDocument,
    PathReportDocument,
    SuiteSpec,
    WitnessDocument,
)
from paramlp.services.arith import Arith, format_scalar, parse_endpoint
from paramlp.services.lp import LinearProgram, ParametricPair, build_parametric_pair, validate_standard_form
from paramlp.services.parametric import Interval, InvariancyDecomposition, Witness
from paramlp.services.pivotpath import BoundSummary, PathReport
from paramlp.services.simplex import PivotTrace, trace_document

logger = logging.getLogger(__name__)

Doc = TypeVar("Doc", bound=BaseModel)


# ── Generic document I/O ──


def read_document(path: str | Path, model: Type[Doc]) -> Doc:
    text = Path(path).read_text()
    try:
        return model.model_validate_json(text)
    except ValidationError as e:
        raise SchemaError(f"{path}: {e.error_count()} schema error(s): {e.errors()[0]['msg']}") from e


def write_document(document: BaseModel, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(document.model_dump_json(indent=2) + "\n")
    logger.info(f"[write_document] wrote {type(document).__name__} to {path}")


# ── LPs and pairs ──


def lp_from_document(doc: LpDocument, arith: Arith | None = None) -> LinearProgram:
    arith = arith or Arith.from_settings()
    return validate_standard_form(doc.A, doc.b, doc.c, name=doc.name, arith=arith, meta=doc.meta)


def pair_from_document(doc: LpDocument, arith: Arith | None = None) -> ParametricPair:
    if not doc.has_parametric_block:
        raise SchemaError(f"{doc.name}: document has no parametric block (d and B)")
    lp = lp_from_document(doc, arith)
    return build_parametric_pair(lp, doc.d, doc.B)


def lp_document(lp: LinearProgram) -> LpDocument:
    return LpDocument(
        name=lp.name,
        A=[[format_scalar(a) for a in row] for row in lp.A],
        b=[format_scalar(v) for v in lp.b],
        c=[format_scalar(v) for v in lp.c],
        meta=dict(lp.meta),
    )


def pair_document(pair: ParametricPair) -> LpDocument:
    doc = lp_document(pair.lp)
    doc.d = [format_scalar(v) for v in pair.d]
    doc.B = [[format_scalar(v) for v in row] for row in pair.B]
    return doc


def load_lp(path: str | Path, arith: Arith | None = None) -> LinearProgram:
    return lp_from_document(read_document(path, LpDocument), arith)


def load_pair(path: str | Path, arith: Arith | None = None) -> ParametricPair:
    return pair_from_document(read_document(path, LpDocument), arith)


def save_lp(lp: LinearProgram, path: str | Path) -> None:
    write_document(lp_document(lp), path)


def save_pair(pair: ParametricPair, path: str | Path) -> None:
    write_document(pair_document(pair), path)


# ── Decompositions ──


def interval_document(interval: Interval, image=None) -> IntervalDocument:
    return IntervalDocument(
        lo=format_scalar(interval.lo),
        hi=format_scalar(interval.hi),
        lo_closed=interval.lo_closed,
        hi_closed=interval.hi_closed,
        image=None if image is None else format_scalar(image),
    )


def _interval_from_document(doc: IntervalDocument, arith: Arith) -> Interval:
    return Interval(parse_endpoint(arith, doc.lo), parse_endpoint(arith, doc.hi), doc.lo_closed, doc.hi_closed)


def decomposition_document(decomposition: InvariancyDecomposition) -> DecompositionDocument:
    return DecompositionDocument(
        side=decomposition.side,
        theta=None if decomposition.theta is None else interval_document(decomposition.theta),
        transition_points=[format_scalar(p) for p in decomposition.transition_points],
        intervals=[interval_document(iv, img) for iv, img in zip(decomposition.intervals, decomposition.images)],
        witnesses=[
            WitnessDocument(point=format_scalar(w.point), image=interval_document(w.image), basis=list(w.basis))
            for w in decomposition.witnesses
        ],
        hops=decomposition.hops,
        hop_bound_exceeded=decomposition.hop_bound_exceeded,
    )


def decomposition_from_document(doc: DecompositionDocument, arith: Arith | None = None) -> InvariancyDecomposition:
    arith = arith or Arith.from_settings()
    return InvariancyDecomposition(
        side=doc.side,
        theta=None if doc.theta is None else _interval_from_document(doc.theta, arith),
        transition_points=tuple(arith.parse(p) for p in doc.transition_points),
        intervals=tuple(_interval_from_document(iv, arith) for iv in doc.intervals),
        images=tuple(arith.parse(iv.image) for iv in doc.intervals if iv.image is not None),
        witnesses=tuple(
            Witness(point=arith.parse(w.point), image=_interval_from_document(w.image, arith), basis=tuple(w.basis))
            for w in doc.witnesses
        ),
        hops=doc.hops,
        hop_bound_exceeded=doc.hop_bound_exceeded,
    )


def save_decomposition(decomposition: InvariancyDecomposition, path: str | Path) -> None:
    write_document(decomposition_document(decomposition), path)


def load_decomposition(path: str | Path, arith: Arith | None = None) -> InvariancyDecomposition:
    return decomposition_from_document(read_document(path, DecompositionDocument), arith)


# ── Reports and traces ──


def path_report_document(report: PathReport) -> PathReportDocument:
    return PathReportDocument(
        instance=report.instance,
        n=report.n,
        status=report.status,
        pivots_phase2=report.pivots_phase2,
        pivots_bootstrap=report.pivots_bootstrap,
        pivots_total=report.pivots_total,
        walk_trivial=report.walk_trivial,
        bound_holds=report.bound_holds,
        breakpoints=[format_scalar(t) for t in report.breakpoints],
        optimal_value=None if report.optimal_value is None else format_scalar(report.optimal_value),
        optimal_verified=report.optimal_verified,
        s=[format_scalar(v) for v in report.s],
        seed=report.seed,
        t_max=None if report.t_max is None else format_scalar(report.t_max),
        assumption_clean=report.assumption_clean,
        fallback=report.fallback,
        bootstrap_exceeded=report.bootstrap_exceeded,
        breakpoints_certified=report.breakpoints_certified,
        path_kkt_ok=report.path_kkt_ok,
    )


def bound_summary_document(summary: BoundSummary) -> BoundSummaryDocument:
    return BoundSummaryDocument(
        holds=summary.holds,
        fails=summary.fails,
        trivial_walks=summary.trivial_walks,
        max_ratio=None if summary.max_ratio is None else format_scalar(summary.max_ratio),
        counterexamples=[path_report_document(r) for r in summary.counterexamples],
    )


def save_trace(trace: PivotTrace, path: str | Path) -> None:
    write_document(trace_document(trace), path)


def load_suite(path: str | Path) -> SuiteSpec:
    return read_document(path, SuiteSpec)


def save_bench_report(report: BenchReport, path: str | Path) -> None:
    write_document(report, path)


def load_bench_report(path: str | Path) -> BenchReport:
    return read_document(path, BenchReport)
