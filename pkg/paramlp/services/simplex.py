"""Revised simplex engine: Phase I/II, Bland and Dantzig pricing, pivot traces,
and a brute-force vertex oracle for desk-scale verification."""

import logging
import time
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from paramlp.config import settings
from paramlp.errors import (
    InternalInconsistencyError,
    InvalidBasisError,
    IterationLimitError,
    ParamLpError,
    SingularBasisError,
    SizeGuardError,
    VerificationError,
)
from paramlp.models import TraceDocument, TraceStep
from paramlp.services import linalg
from paramlp.services.arith import Scalar, Vector, format_scalar
from paramlp.services.lp import KktCertificate, LinearProgram, kkt_check

logger = logging.getLogger(__name__)

BLAND = "bland"
DANTZIG = "dantzig"
PARAMETRIC = "parametric"
RULES = (BLAND, DANTZIG)

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


# ── Domain Types ──


@dataclass(frozen=True)
class Basis:
    basic: tuple[int, ...]

    def __post_init__(self):
        if len(set(self.basic)) != len(self.basic):
            raise InvalidBasisError(f"Basis indices are not distinct: {self.basic}")


@dataclass(frozen=True)
class PivotStep:
    enter: int
    leave: int
    objective: Scalar


@dataclass(frozen=True)
class PivotTrace:
    rule: str
    steps: tuple[PivotStep, ...] = ()
    phase1_steps: int = 0

    @property
    def pivots(self) -> int:
        return len(self.steps)


@dataclass(frozen=True)
class SimplexSolution:
    status: str
    x: Vector
    w: Vector
    y: Vector
    objective: Scalar | None
    trace: PivotTrace
    basis: Basis | None = None
    ray: Vector | None = None
    verified: bool = False


@dataclass(frozen=True)
class Phase1Result:
    feasible: bool
    basis: Basis | None
    steps: int
    x: Vector = ()


@dataclass(frozen=True)
class BruteForceResult:
    status: str
    value: Scalar | None = None
    vertices: tuple[Vector, ...] = ()


@dataclass
class _Run:
    status: str
    basic: list[int]
    steps: list[PivotStep]
    ray: Vector | None = None


# ── Engine ──


def iteration_limit(n: int) -> int:
    return 10 * 2 ** min(n, settings.ITERATION_EXPONENT_CAP)


class RevisedSimplex:
    """One solver instance per LP; holds no state beyond the LP and its rule."""

    def __init__(self, lp: LinearProgram, rule: str = BLAND, limit: int | None = None):
        if rule not in RULES:
            raise ParamLpError(f"Unknown pivot rule: {rule!r}")
        self.lp = lp
        self.arith = lp.arith
        self.rule = rule
        self.limit = limit if limit is not None else iteration_limit(lp.n)
        self._columns = [lp.column(j) for j in range(lp.n)]

    def factor(self, basic: Sequence[int]) -> linalg.LUFactor:
        rows = [[self._columns[j][i] for j in basic] for i in range(self.lp.m)]
        return linalg.LUFactor(self.arith, rows)

    def basic_values(self, lu: linalg.LUFactor) -> Vector:
        return lu.solve(self.lp.b)

    def duals(self, lu: linalg.LUFactor, basic: Sequence[int], cost: Sequence[Scalar]) -> tuple[Vector, Vector]:
        """w solving Bᵀw = c_B and reduced costs y = c − Aᵀw (zero on the basis)."""
        w = lu.solve_transpose([cost[j] for j in basic])
        basic_set = set(basic)
        y = tuple(
            self.arith.zero if j in basic_set else cost[j] - linalg.dot(self.arith, self._columns[j], w)
            for j in range(self.lp.n)
        )
        return w, y

    def direction(self, lu: linalg.LUFactor, j: int) -> Vector:
        return lu.solve(self._columns[j])

    def choose_entering(self, y: Vector, basic: Sequence[int]) -> int | None:
        basic_set = set(basic)
        best, best_val = None, None
        for j, yj in enumerate(y):
            if j in basic_set or not self.arith.is_neg(yj, self.arith.eps_piv):
                continue
            if self.rule == BLAND:
                return j
            if best is None or yj < best_val:
                best, best_val = j, yj
        return best

    def ratio_test(self, x_B: Vector, dirn: Vector, basic: Sequence[int]) -> int | None:
        """Row of the leaving variable; ties go to the smallest variable index."""
        arith = self.arith
        best_row, best_ratio = None, None
        for i, d_i in enumerate(dirn):
            if not arith.is_pos(d_i, arith.eps_piv):
                continue
            value = x_B[i] if arith.is_exact else max(x_B[i], 0.0)
            ratio = value / d_i
            if best_row is None:
                best_row, best_ratio = i, ratio
                continue
            if arith.is_exact:
                better = ratio < best_ratio
                tie = ratio == best_ratio
            else:
                tie = abs(ratio - best_ratio) <= arith.eps_piv * max(1.0, abs(best_ratio))
                better = not tie and ratio < best_ratio
            if better or (tie and basic[i] < basic[best_row]):
                best_row, best_ratio = i, ratio
        return best_row

    def run(self, basic: Sequence[int], cost: Sequence[Scalar] | None = None) -> _Run:
        """Phase II from a primal feasible basis."""
        cost = self.lp.c if cost is None else tuple(cost)
        basic = list(basic)
        steps: list[PivotStep] = []
        while True:
            lu = self.factor(basic)
            x_B = self.basic_values(lu)
            _, y = self.duals(lu, basic, cost)
            q = self.choose_entering(y, basic)
            if q is None:
                return _Run(OPTIMAL, basic, steps)

            dirn = self.direction(lu, q)
            row = self.ratio_test(x_B, dirn, basic)
            if row is None:
                ray = [self.arith.zero] * self.lp.n
                ray[q] = self.arith.one
                for i, j in enumerate(basic):
                    ray[j] = -dirn[i]
                return _Run(UNBOUNDED, basic, steps, ray=tuple(ray))

            theta = x_B[row] / dirn[row]
            objective = linalg.dot(self.arith, [cost[j] for j in basic], x_B) + theta * y[q]
            steps.append(PivotStep(enter=q, leave=basic[row], objective=objective))
            logger.debug(f"[{self.rule}] pivot {len(steps)}: enter {q}, leave {basic[row]}, objective {objective}")
            basic[row] = q
            if len(steps) > self.limit:
                raise IterationLimitError(f"{self.lp.name}: more than {self.limit} pivots under {self.rule} (suspected cycling)")

    def point(self, basic: Sequence[int]) -> Vector:
        x_B = self.basic_values(self.factor(basic))
        x = [self.arith.zero] * self.lp.n
        for i, j in enumerate(basic):
            x[j] = x_B[i]
        return tuple(x)


# ── Phase I ──


def phase1(lp: LinearProgram) -> Phase1Result:
    """Find a feasible basis with artificial variables, or report infeasibility."""
    arith = lp.arith
    m, n = lp.m, lp.n
    if m == 0:
        return Phase1Result(feasible=True, basis=Basis(()), steps=0, x=tuple(arith.zero for _ in range(n)))

    signs = [-1 if arith.is_neg(b_i, 0.0) else 1 for b_i in lp.b]
    rows = tuple(
        tuple(sign * a for a in row) + tuple(arith.one if k == i else arith.zero for k in range(m))
        for i, (row, sign) in enumerate(zip(lp.A, signs))
    )
    rhs = tuple(sign * b_i for sign, b_i in zip(signs, lp.b))
    cost = tuple(arith.zero for _ in range(n)) + tuple(arith.one for _ in range(m))
    aux = LinearProgram(A=rows, b=rhs, c=cost, arith=arith, name=f"{lp.name}:phase1")

    engine = RevisedSimplex(aux, BLAND)
    result = engine.run(range(n, n + m))
    basic = result.basic
    steps = len(result.steps)

    lu = engine.factor(basic)
    x_B = engine.basic_values(lu)
    infeasibility = linalg.dot(arith, [cost[j] for j in basic], x_B)
    if arith.is_pos(infeasibility):
        logger.info(f"[phase1] {lp.name}: infeasible (phase I optimum {infeasibility})")
        return Phase1Result(feasible=False, basis=None, steps=steps)

    # Drive remaining artificials out of the basis with degenerate pivots
    for row in range(m):
        if basic[row] < n:
            continue
        lu = engine.factor(basic)
        candidates = []
        for j in range(n):
            if j in basic:
                continue
            entry = engine.direction(lu, j)[row]
            if not arith.is_zero(entry, arith.eps_piv):
                candidates.append((j, entry))
        if not candidates:
            raise InternalInconsistencyError(f"{lp.name}: artificial in row {row} cannot leave; A is not full row rank")
        if arith.is_exact:
            enter = candidates[0][0]
        else:
            enter = max(candidates, key=lambda item: abs(item[1]))[0]
        basic[row] = enter
        steps += 1

    basis = Basis(tuple(basic))
    x = basis_solution(lp, basis)
    logger.info(f"[phase1] {lp.name}: feasible basis {basis.basic} after {steps} pivots")
    return Phase1Result(feasible=True, basis=basis, steps=steps, x=x)


# ── Public operations ──


def basis_solution(lp: LinearProgram, basis: Basis) -> Vector:
    return RevisedSimplex(lp).point(basis.basic)


def reduced_costs(lp: LinearProgram, basis: Basis) -> tuple[Vector, Vector]:
    engine = RevisedSimplex(lp)
    _check_shape(lp, basis)
    lu = engine.factor(basis.basic)
    return engine.duals(lu, basis.basic, lp.c)


def _check_shape(lp: LinearProgram, basis: Basis) -> None:
    if len(basis.basic) != lp.m:
        raise InvalidBasisError(f"basis has {len(basis.basic)} indices, expected m = {lp.m}")
    if any(j < 0 or j >= lp.n for j in basis.basic):
        raise InvalidBasisError(f"basis indices out of range [0, {lp.n}): {basis.basic}")


def solve(lp: LinearProgram, rule: str = BLAND, start: Basis | None = None) -> SimplexSolution:
    """Two-phase revised simplex. Optimal solutions are KKT-verified."""
    t0 = time.time()
    arith = lp.arith
    engine = RevisedSimplex(lp, rule)
    phase1_steps = 0

    if start is None:
        p1 = phase1(lp)
        phase1_steps = p1.steps
        if not p1.feasible:
            trace = PivotTrace(rule=rule, phase1_steps=phase1_steps)
            return SimplexSolution(INFEASIBLE, x=(), w=(), y=(), objective=None, trace=trace)
        start = p1.basis
    else:
        _check_shape(lp, start)
        try:
            x_start = engine.point(start.basic)
        except SingularBasisError:
            raise InvalidBasisError(f"start basis {start.basic} is singular")
        if any(arith.is_neg(v) for v in x_start):
            raise InvalidBasisError(f"start basis {start.basic} is not primal feasible")

    run = engine.run(start.basic)
    trace = PivotTrace(rule=rule, steps=tuple(run.steps), phase1_steps=phase1_steps)
    basis = Basis(tuple(run.basic))
    x = engine.point(run.basic)

    if run.status == UNBOUNDED:
        logger.info(f"[solve] {lp.name}: unbounded after {trace.pivots} pivots ({rule})")
        return SimplexSolution(UNBOUNDED, x=x, w=(), y=(), objective=None, trace=trace, basis=basis, ray=run.ray)

    w, y = engine.duals(engine.factor(run.basic), run.basic, lp.c)
    objective = lp.objective(x)
    verdict = kkt_check(lp, KktCertificate(x=x, w=w, y=y))
    if not verdict.ok:
        if arith.is_exact:
            raise VerificationError(f"{lp.name}: optimal basis {basis.basic} failed KKT verification: {verdict.conditions}")
        logger.warning(f"[solve] {lp.name}: float optimum failed KKT verification: {verdict.conditions}")
    elapsed = time.time() - t0
    logger.info(f"[solve] {lp.name}: optimal {objective} after {trace.pivots} pivots ({rule}) in {elapsed:.3f}s")
    return SimplexSolution(OPTIMAL, x=x, w=w, y=y, objective=objective, trace=trace, basis=basis, verified=verdict.ok)


def check_ray(lp: LinearProgram, ray: Sequence[Scalar]) -> bool:
    """Ar = 0, r ≥ 0 and ⟨c, r⟩ < 0."""
    arith = lp.arith
    if any(not arith.is_zero(v) for v in linalg.matvec(arith, lp.A, ray)):
        return False
    if any(arith.is_neg(v) for v in ray):
        return False
    return arith.is_neg(lp.objective(ray))


def trace_document(trace: PivotTrace) -> TraceDocument:
    return TraceDocument(
        rule=trace.rule,
        phase1_steps=trace.phase1_steps,
        steps=[TraceStep(enter=s.enter, leave=s.leave, objective=format_scalar(s.objective)) for s in trace.steps],
    )


# ── Brute-force oracle ──


def brute_force_optimum(lp: LinearProgram) -> BruteForceResult:
    """Enumerate every basis; detect unboundedness through improving extreme rays."""
    if lp.n > settings.BRUTE_FORCE_MAX_N:
        raise SizeGuardError(f"{lp.name}: n = {lp.n} exceeds the brute-force guard {settings.BRUTE_FORCE_MAX_N}")
    arith = lp.arith
    engine = RevisedSimplex(lp)

    vertices: list[tuple[Vector, Scalar]] = []
    for basic in combinations(range(lp.n), lp.m):
        try:
            lu = engine.factor(basic)
        except SingularBasisError:
            continue
        x_B = engine.basic_values(lu)
        if any(arith.is_neg(v) for v in x_B):
            continue
        x = [arith.zero] * lp.n
        for i, j in enumerate(basic):
            x[j] = x_B[i] if arith.is_exact else max(x_B[i], 0.0)
        x = tuple(x)

        _, y = engine.duals(lu, basic, lp.c)
        for j in range(lp.n):
            if j in basic or not arith.is_neg(y[j], arith.eps_piv):
                continue
            dirn = engine.direction(lu, j)
            if all(not arith.is_pos(d, arith.eps_piv) for d in dirn):
                return BruteForceResult(UNBOUNDED)
        vertices.append((x, lp.objective(x)))

    if not vertices:
        return BruteForceResult(INFEASIBLE)

    best = min(value for _, value in vertices)
    optimal = []
    for x, value in vertices:
        if arith.eq(value, best) and not any(_same_point(arith, x, seen) for seen in optimal):
            optimal.append(x)
    return BruteForceResult(OPTIMAL, value=best, vertices=tuple(sorted(optimal)))


def _same_point(arith, x: Vector, z: Vector) -> bool:
    return all(arith.eq(a, b) for a, b in zip(x, z))
