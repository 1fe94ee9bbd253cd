"""Rank-1 embedding of a plain LP into a parametric pair, and the
parametric-objective path solve along the tilt g = Mᵀs.

The path starts at a vertex optimal for c + t_max·g and lowers t to 0. Each
pivot happens at a breakpoint where a nonbasic reduced cost of c + t·g
reaches zero; the basis left standing at t = 0 is optimal for c.
"""

import logging
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from paramlp.errors import (
    InfeasibleError,
    IterationLimitError,
    NoParametricDirectionError,
    UnverifiedReportError,
    VerificationError,
)
from paramlp.services import linalg
from paramlp.services.arith import Arith, Matrix, Scalar, Vector
from paramlp.services.generators import SplitMix64
from paramlp.services.lp import (
    KktCertificate,
    LinearProgram,
    ParametricCertificate,
    ParametricPair,
    build_parametric_pair,
    kkt_check,
    orthogonal_complement,
    parametric_kkt_check,
    projection_matrix,
)
from paramlp.services.simplex import (
    BLAND,
    OPTIMAL,
    PARAMETRIC,
    UNBOUNDED,
    Basis,
    PivotStep,
    PivotTrace,
    RevisedSimplex,
    SimplexSolution,
    phase1,
)

logger = logging.getLogger(__name__)

DEFAULT_FALLBACK_SEED = 0


# ── Domain Types ──


@dataclass(frozen=True)
class Embedding:
    pair: ParametricPair
    s: Vector
    g: Vector
    c_shift: Vector
    start: Basis
    assumption_clean: bool
    shift_found: bool
    seed: int | None = None
    phase1_steps: int = 0

    @property
    def projection(self) -> Matrix:
        return projection_matrix(self.pair.arith, self.s)


@dataclass(frozen=True)
class PathReport:
    instance: str
    n: int
    pivots_phase2: int
    pivots_bootstrap: int
    bound_holds: bool
    optimal_verified: bool
    status: str = OPTIMAL
    breakpoints: tuple[Scalar, ...] = ()
    optimal_value: Scalar | None = None
    s: Vector = ()
    seed: int | None = None
    t_max: Scalar | None = None
    assumption_clean: bool = True
    fallback: bool = False
    bootstrap_exceeded: bool = False
    breakpoints_certified: bool = True
    path_kkt_ok: bool = True

    @property
    def pivots_total(self) -> int:
        return self.pivots_bootstrap + self.pivots_phase2

    @property
    def walk_trivial(self) -> bool:
        """The t_max bootstrap already reached the optimum and the walk made no pivot."""
        return self.pivots_phase2 == 0 and self.pivots_bootstrap > 0


@dataclass(frozen=True)
class BoundSummary:
    holds: int = 0
    fails: int = 0
    trivial_walks: int = 0
    max_ratio: Fraction | None = None
    counterexamples: tuple[PathReport, ...] = field(default_factory=tuple)


# ── Embedding ──


def _row_space_component(arith: Arith, A: Matrix, v: Vector) -> Vector:
    """Orthogonal projection of v onto row(A)."""
    if not A:
        return tuple(arith.zero for _ in v)
    gram = [[linalg.dot(arith, r1, r2) for r2 in A] for r1 in A]
    coef = linalg.solve_square(arith, gram, linalg.matvec(arith, A, v))
    return linalg.rmatvec(arith, A, coef, len(v))


def cost_shift(lp: LinearProgram) -> tuple[Vector, bool]:
    """w with c + Aᵀw ≥ 0, found by a Phase-I feasibility solve.

    Variables (w⁺, w⁻, s) ≥ 0 with Aᵀw⁺ − Aᵀw⁻ − s = −c.
    """
    arith = lp.arith
    if all(arith.nonneg(v) for v in lp.c):
        return tuple(arith.zero for _ in range(lp.m)), True
    if lp.m == 0:
        return (), False

    m, n = lp.m, lp.n
    rows = []
    for j in range(n):
        col = lp.column(j)
        slack = tuple(-arith.one if k == j else arith.zero for k in range(n))
        rows.append(tuple(col) + tuple(-a for a in col) + slack)
    shift_lp = LinearProgram(
        A=tuple(rows),
        b=tuple(-v for v in lp.c),
        c=tuple(arith.zero for _ in range(2 * m + n)),
        arith=arith,
        name=f"{lp.name}:shift",
    )
    p1 = phase1(shift_lp)
    if not p1.feasible:
        return tuple(arith.zero for _ in range(m)), False
    w = tuple(p1.x[i] - p1.x[m + i] for i in range(m))
    return w, True


def _normalize(arith: Arith, vec: Vector) -> Vector:
    """Primitive integer form (exact) or unit length with positive lead (float)."""
    if arith.is_exact:
        return linalg.primitive(vec)
    norm = sum(a * a for a in vec) ** 0.5
    lead = next((a for a in vec if abs(a) > arith.eps_rank), 1.0)
    sign = 1.0 if lead > 0 else -1.0
    return tuple(sign * a / norm for a in vec)


def _random_direction(arith: Arith, r: int, seed: int) -> Vector:
    rng = SplitMix64(seed)
    while True:
        draw = rng.integers(r, -9, 9)
        if any(draw):
            return _normalize(arith, arith.vector(draw))


def synthesize_embedding(lp: LinearProgram, seed: int | None = None) -> Embedding:
    """Embed lp into a pair with l = 1 and r = n − m − 1, anchored at a Phase-I vertex."""
    arith = lp.arith
    if lp.n < lp.m + 2:
        raise NoParametricDirectionError(f"no parametric direction: n = {lp.n}, m = {lp.m} (need n ≥ m + 2)")

    p1 = phase1(lp)
    if not p1.feasible:
        raise InfeasibleError(f"{lp.name}: Phase I found no feasible point")
    d = p1.x

    w, shift_found = cost_shift(lp)
    c_prime = linalg.add(lp.c, linalg.rmatvec(arith, lp.A, w, lp.n)) if shift_found else lp.c
    if not shift_found:
        logger.warning(f"[synthesize_embedding] {lp.name}: no w with c + Aᵀw ≥ 0; pair will be assumption-violated")

    component = linalg.sub(c_prime, _row_space_component(arith, lp.A, c_prime))
    if any(not arith.is_zero(a, arith.eps_rank) for a in component):
        B_row = _normalize(arith, component)
    else:
        complement, _ = orthogonal_complement(lp.A, arith=arith, n=lp.n)
        B_row = complement[0]

    shifted = lp.with_cost(c_prime, name=lp.name)
    pair = build_parametric_pair(shifted, d, [B_row])

    # Interior normal-cone vector of the Phase-I vertex, projected onto row(M)
    basic = set(p1.basis.basic)
    cone = tuple(arith.zero if j in basic else arith.one for j in range(lp.n))
    coords = tuple(linalg.dot(arith, row, cone) / dk for row, dk in zip(pair.M, pair.D))
    used_seed = None
    if any(not arith.is_zero(a, arith.eps_rank) for a in coords):
        s = _normalize(arith, coords)
    else:
        used_seed = DEFAULT_FALLBACK_SEED if seed is None else seed
        s = _random_direction(arith, pair.r, used_seed)
        logger.info(f"[synthesize_embedding] {lp.name}: normal-cone direction vanished, seeded direction {used_seed}")
    g = linalg.rmatvec(arith, pair.M, s, lp.n)

    logger.info(f"[synthesize_embedding] {lp.name}: m={pair.m}, l={pair.l}, r={pair.r}, s={s}")
    return Embedding(
        pair=pair,
        s=s,
        g=g,
        c_shift=w,
        start=p1.basis,
        assumption_clean=pair.assumption_clean,
        shift_found=shift_found,
        seed=used_seed,
        phase1_steps=p1.steps,
    )


# ── Path solve ──


def _t_max(arith: Arith, c: Vector, g: Vector) -> Scalar:
    nonzero = [abs(gj) for gj in g if not arith.is_zero(gj, arith.eps_piv)]
    if not nonzero:
        return arith.zero
    return arith.one + sum(abs(cj) for cj in c) * max(arith.one / gj for gj in nonzero)


class _PathSolver:
    def __init__(self, lp: LinearProgram, embedding: Embedding):
        self.lp = lp
        self.arith = lp.arith
        self.embedding = embedding
        self.engine = RevisedSimplex(lp, BLAND)
        self.g = embedding.g
        self.s = embedding.s
        self.breakpoints: list[Scalar] = []
        self.steps: list[PivotStep] = []
        self.certified = True
        self.kkt_ok = True

    def reduced(self, lu, basic: Sequence[int]) -> tuple[Vector, Vector]:
        _, y_c = self.engine.duals(lu, basic, self.lp.c)
        _, y_g = self.engine.duals(lu, basic, self.g)
        return y_c, y_g

    def optimal_at(self, y_c: Vector, y_g: Vector, t: Scalar) -> bool:
        return all(self.arith.nonneg(a + t * b, self.arith.eps_piv) for a, b in zip(y_c, y_g))

    def next_breakpoint(self, y_c: Vector, y_g: Vector, basic: Sequence[int]) -> tuple[Scalar | None, int | None]:
        """Largest t' at which a nonbasic reduced cost of c + t·g vanishes; lowest index on ties."""
        arith = self.arith
        basic_set = set(basic)
        best_t, best_j = None, None
        for j in range(self.lp.n):
            if j in basic_set or not arith.is_pos(y_g[j], arith.eps_piv):
                continue
            t_j = -y_c[j] / y_g[j]
            if best_t is None or (t_j > best_t and not arith.eq(t_j, best_t, arith.eps_piv)):
                best_t, best_j = t_j, j
        return best_t, best_j

    def check_path_kkt(self, basic: Sequence[int], y_c: Vector, y_g: Vector, t: Scalar) -> None:
        """Projected parametric KKT at (u, v) = (t·s, D⁻¹M(x − d))."""
        pair = self.embedding.pair
        arith = self.arith
        x = self.engine.point(basic)
        y_bar = tuple(a + t * b for a, b in zip(y_c, y_g))
        u = tuple(t * sk for sk in self.s)
        v = tuple(
            linalg.dot(arith, row, linalg.sub(x, pair.d)) / dk for row, dk in zip(pair.M, pair.D)
        )
        verdict = parametric_kkt_check(pair, ParametricCertificate(x_bar=x, y_bar=y_bar, u=u, v=v))
        if not verdict.ok:
            logger.warning(f"[parametric_path_solve] {self.lp.name}: path KKT failed at t={t}: {verdict.conditions}")
            self.kkt_ok = False

    def walk(self, basic: list[int]) -> tuple[str, list[int], Vector | None]:
        arith = self.arith
        limit = self.engine.limit
        while True:
            lu = self.engine.factor(basic)
            y_c, y_g = self.reduced(lu, basic)
            t_next, q = self.next_breakpoint(y_c, y_g, basic)
            if t_next is None or not arith.is_pos(t_next, arith.eps_piv):
                return OPTIMAL, basic, None

            if not self.optimal_at(y_c, y_g, t_next):
                self.certified = False
            self.check_path_kkt(basic, y_c, y_g, t_next)

            x_B = self.engine.basic_values(lu)
            dirn = self.engine.direction(lu, q)
            row = self.engine.ratio_test(x_B, dirn, basic)
            if row is None:
                ray = [arith.zero] * self.lp.n
                ray[q] = arith.one
                for i, j in enumerate(basic):
                    ray[j] = -dirn[i]
                logger.info(f"[parametric_path_solve] {self.lp.name}: unbounded below breakpoint t={t_next}")
                return UNBOUNDED, basic, tuple(ray)

            step = x_B[row] / dirn[row]
            objective = linalg.dot(arith, [self.lp.c[j] for j in basic], x_B) + step * y_c[q]
            self.steps.append(PivotStep(enter=q, leave=basic[row], objective=objective))
            self.breakpoints.append(t_next)
            logger.debug(f"[parametric_path_solve] breakpoint t={t_next}: enter {q}, leave {basic[row]}")
            basic[row] = q

            lu = self.engine.factor(basic)
            y_c, y_g = self.reduced(lu, basic)
            if not self.optimal_at(y_c, y_g, t_next):
                self.certified = False
            if len(self.steps) > limit:
                raise IterationLimitError(f"{self.lp.name}: parametric path exceeded {limit} pivots")


def parametric_path_solve(
    lp: LinearProgram,
    embedding: Embedding | None = None,
    seed: int | None = None,
) -> tuple[SimplexSolution, PathReport]:
    """Solve lp by lowering t from t_max to 0 on the cost family c + t·g."""
    t0 = time.time()
    arith = lp.arith
    embedding = embedding or synthesize_embedding(lp, seed=seed)
    solver = _PathSolver(lp, embedding)
    engine = solver.engine

    t_max = _t_max(arith, lp.c, embedding.g)
    fallback = False
    start = list(embedding.start.basic)

    bootstrap = engine.run(start, linalg.add(lp.c, linalg.scale(t_max, solver.g)))
    if bootstrap.status == UNBOUNDED:
        logger.info(f"[parametric_path_solve] {lp.name}: bootstrap unbounded, flipping the tilt")
        solver.g = tuple(-a for a in solver.g)
        solver.s = tuple(-a for a in solver.s)
        bootstrap = engine.run(start, linalg.add(lp.c, linalg.scale(t_max, solver.g)))
    pivots_bootstrap = len(bootstrap.steps)
    bootstrap_exceeded = pivots_bootstrap > lp.n**2
    if bootstrap_exceeded:
        logger.warning(f"[parametric_path_solve] {lp.name}: bootstrap took {pivots_bootstrap} pivots (> n² = {lp.n**2})")

    if bootstrap.status == UNBOUNDED:
        logger.warning(f"[parametric_path_solve] {lp.name}: tilted cost unbounded both ways, falling back to Bland")
        fallback = True
        run = engine.run(bootstrap.basic)
        solver.steps = list(run.steps)
        status, basic, ray = run.status, run.basic, run.ray
    else:
        status, basic, ray = solver.walk(list(bootstrap.basic))

    trace = PivotTrace(rule=PARAMETRIC, steps=tuple(solver.steps), phase1_steps=embedding.phase1_steps)
    basis = Basis(tuple(basic))
    x = engine.point(basic)
    pivots = len(solver.steps)

    if status == UNBOUNDED:
        solution = SimplexSolution(UNBOUNDED, x=x, w=(), y=(), objective=None, trace=trace, basis=basis, ray=ray)
        verified = False
        objective = None
    else:
        w, y = engine.duals(engine.factor(basic), basic, lp.c)
        objective = lp.objective(x)
        verdict = kkt_check(lp, KktCertificate(x=x, w=w, y=y))
        verified = verdict.ok
        if not verified:
            if arith.is_exact:
                raise VerificationError(f"{lp.name}: parametric optimum failed KKT verification: {verdict.conditions}")
            logger.warning(f"[parametric_path_solve] {lp.name}: float optimum failed KKT verification: {verdict.conditions}")
        solution = SimplexSolution(OPTIMAL, x=x, w=w, y=y, objective=objective, trace=trace, basis=basis, verified=verified)

    report = PathReport(
        instance=lp.name,
        n=lp.n,
        status=status,
        pivots_phase2=pivots,
        pivots_bootstrap=pivots_bootstrap,
        bound_holds=pivots <= lp.n,
        optimal_verified=verified,
        breakpoints=tuple(solver.breakpoints),
        optimal_value=objective,
        s=solver.s,
        seed=embedding.seed,
        t_max=t_max,
        assumption_clean=embedding.assumption_clean,
        fallback=fallback,
        bootstrap_exceeded=bootstrap_exceeded,
        breakpoints_certified=solver.certified,
        path_kkt_ok=solver.kkt_ok,
    )
    logger.info(
        f"[parametric_path_solve] {lp.name}: {status} after {pivots} parametric + {pivots_bootstrap} bootstrap pivots "
        f"(n={lp.n}) in {time.time() - t0:.3f}s"
    )
    return solution, report


# ── Bound report ──


def bound_report(reports: Sequence[PathReport]) -> BoundSummary:
    """Measured pivots against n; the bound is recorded, never asserted."""
    holds = fails = trivial = 0
    max_ratio = None
    counterexamples = []
    for report in reports:
        if not report.optimal_verified:
            raise UnverifiedReportError(f"{report.instance}: report is not KKT-verified")
        if report.walk_trivial:
            trivial += 1
            logger.info(f"[bound_report] {report.instance}: bootstrap did all {report.pivots_bootstrap} pivots, walk was empty")
        ratio = Fraction(report.pivots_phase2, report.n)
        max_ratio = ratio if max_ratio is None else max(max_ratio, ratio)
        if report.bound_holds:
            holds += 1
        else:
            fails += 1
            counterexamples.append(report)
            logger.warning(f"[bound_report] {report.instance}: {report.pivots_phase2} pivots > n = {report.n}")
    return BoundSummary(
        holds=holds,
        fails=fails,
        trivial_walks=trivial,
        max_ratio=max_ratio,
        counterexamples=tuple(counterexamples),
    )
