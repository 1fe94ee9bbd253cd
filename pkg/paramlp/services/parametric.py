"""Single-parameter (r = 1) analysis of a parametric pair.

Conventions: M keeps unnormalized orthogonal rows, so every projection is
scaled by D = MMᵀ:

    Θ_P = {v : ∃x ≥ 0, Ax = b, Mx = Md + Dv}
    Θ_D = {u : ∃y ≥ 0, By = a, My = Mc + Du}
    Φ(u) = {D⁻¹M(x − d) : x optimal for min ⟨c + Mᵀu, x⟩ over Ax = b, x ≥ 0}
    Ψ(v) = {D⁻¹M(y − c) : y optimal for min ⟨d + Mᵀv, y⟩ over By = a, y ≥ 0}

Both maps are antitone, which drives the endpoint-hopping sweep.
"""

import logging
import math
import time
from dataclasses import dataclass
from typing import Callable, Sequence

from paramlp.config import settings
from paramlp.errors import (
    AssumptionViolatedError,
    InconsistentRowsError,
    InternalInconsistencyError,
    NoParametricDirectionError,
    OutsideProjectionError,
    SweepError,
    UnsupportedDimensionError,
    ZeroRowError,
)
from paramlp.services import linalg
from paramlp.services.arith import INF, Arith, Scalar, Vector, format_scalar
from paramlp.services.lp import (
    LinearProgram,
    ParametricCertificate,
    ParametricPair,
    validate_standard_form,
)
from paramlp.services.simplex import BLAND, OPTIMAL, UNBOUNDED, Basis, phase1, solve

logger = logging.getLogger(__name__)

PRIMAL = "primal"
DUAL = "dual"
SIDES = (PRIMAL, DUAL)


# ── Domain Types ──


@dataclass(frozen=True)
class Interval:
    lo: Scalar
    hi: Scalar
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"Interval lower end {self.lo} exceeds upper end {self.hi}")
        # Infinite ends are always open
        if _is_inf(self.lo) and self.lo_closed:
            object.__setattr__(self, "lo_closed", False)
        if _is_inf(self.hi) and self.hi_closed:
            object.__setattr__(self, "hi_closed", False)

    @classmethod
    def closed(cls, lo: Scalar, hi: Scalar) -> "Interval":
        return cls(lo, hi, True, True)

    @classmethod
    def open(cls, lo: Scalar, hi: Scalar) -> "Interval":
        return cls(lo, hi, False, False)

    @classmethod
    def point(cls, value: Scalar) -> "Interval":
        return cls(value, value, True, True)

    @property
    def lo_finite(self) -> bool:
        return not _is_inf(self.lo)

    @property
    def hi_finite(self) -> bool:
        return not _is_inf(self.hi)

    def is_singleton(self, arith: Arith | None = None) -> bool:
        if arith is None or arith.is_exact:
            return self.lo == self.hi
        return _same(arith, self.lo, self.hi)

    def contains(self, value: Scalar, arith: Arith | None = None) -> bool:
        eps = 0 if arith is None or arith.is_exact else arith.eps_feas * max(1.0, abs(value))
        lo_ok = value >= self.lo - eps if self.lo_closed else value > self.lo
        hi_ok = value <= self.hi + eps if self.hi_closed else value < self.hi
        return lo_ok and hi_ok

    def closure(self) -> "Interval":
        return Interval.closed(self.lo, self.hi)

    def __str__(self) -> str:
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{format_scalar(self.lo)}, {format_scalar(self.hi)}{right}"


@dataclass(frozen=True)
class Witness:
    """Optimal-face description at a transition point: the image segment and
    the optimal basis found when solving there."""

    point: Scalar
    image: Interval
    basis: tuple[int, ...]


@dataclass(frozen=True)
class InvariancyDecomposition:
    side: str
    theta: Interval | None
    transition_points: tuple[Scalar, ...]
    intervals: tuple[Interval, ...]
    images: tuple[Scalar, ...]
    witnesses: tuple[Witness, ...]
    hops: int = 0
    hop_bound_exceeded: bool = False


@dataclass(frozen=True)
class RatioTestResult:
    J: frozenset


@dataclass(frozen=True)
class CountBoundResult:
    n: int
    transition_points: int
    intervals: int
    j_size: int | None
    holds: bool
    j_discrepancy: bool


@dataclass(frozen=True)
class _Image:
    interval: Interval
    basis: tuple[int, ...]
    value: Scalar


# ── Helpers ──


def _is_inf(value: Scalar) -> bool:
    return isinstance(value, float) and math.isinf(value)


def _same(arith: Arith, a: Scalar, b: Scalar) -> bool:
    if _is_inf(a) or _is_inf(b):
        return a == b
    return arith.eq(a, b)


def _require_r1(pair: ParametricPair) -> None:
    if pair.r == 0:
        raise NoParametricDirectionError()
    if pair.r > 1:
        raise UnsupportedDimensionError(f"r = {pair.r}; single-parameter analysis needs r = 1")


def _dual_region(pair: ParametricPair) -> LinearProgram:
    return LinearProgram(A=pair.B, b=pair.a, c=pair.d, arith=pair.arith, name=f"{pair.lp.name}:dual")


def _side_data(pair: ParametricPair, side: str) -> tuple[LinearProgram, Vector, Vector, Scalar]:
    """(feasible region, projection row, anchor, D) for one side."""
    if side == PRIMAL:
        return pair.lp, pair.M[0], pair.d, pair.D[0]
    if side == DUAL:
        return _dual_region(pair), pair.M[0], pair.c, pair.D[0]
    raise ValueError(f"Unknown side: {side!r}")


def _projection_range(
    region: LinearProgram,
    mrow: Vector,
    anchor: Vector,
    dk: Scalar,
    start: Basis | None = None,
) -> Interval | None:
    """[min, max] of D⁻¹⟨m, x − anchor⟩ over the region (None if empty)."""
    arith = region.arith
    if start is None:
        p1 = phase1(region)
        if not p1.feasible:
            return None
        start = p1.basis
    offset = linalg.dot(arith, mrow, anchor)
    low = solve(region.with_cost(mrow), BLAND, start)
    high = solve(region.with_cost(tuple(-a for a in mrow)), BLAND, start)
    lo = (low.objective - offset) / dk if low.status == OPTIMAL else -INF
    hi = (-high.objective - offset) / dk if high.status == OPTIMAL else INF
    return Interval.closed(lo, hi)


def _face_image(region: LinearProgram, cost: Vector, mrow: Vector, anchor: Vector, dk: Scalar, label: str) -> _Image:
    """Solve min ⟨cost, x⟩ over the region, then project its optimal face.

    The face is {x ∈ region : ⟨cost, x⟩ = z*}, a linear restriction that
    replaces the complementarity condition of the parametric KKT system.
    """
    sol = solve(region.with_cost(cost, name=f"{region.name}:{label}"), BLAND)
    if sol.status == UNBOUNDED:
        raise InternalInconsistencyError(f"{label}: parametric problem unbounded inside its projection interval")
    if sol.status != OPTIMAL:
        raise InternalInconsistencyError(f"{label}: parametric problem is {sol.status}")

    try:
        face = validate_standard_form(
            region.A + (cost,),
            region.b + (sol.objective,),
            mrow,
            name=f"{region.name}:{label}:face",
            arith=region.arith,
        )
    except InconsistentRowsError as e:
        raise InternalInconsistencyError(f"{label}: optimal face inconsistent: {e}")
    interval = _projection_range(face, mrow, anchor, dk)
    if interval is None:
        raise InternalInconsistencyError(f"{label}: optimal face is empty")
    return _Image(interval=interval, basis=sol.basis.basic, value=sol.objective)


def _phi(pair: ParametricPair, u: Scalar) -> _Image:
    cost = linalg.add(pair.c, linalg.scale(u, pair.M[0]))
    return _face_image(pair.lp, cost, pair.M[0], pair.d, pair.D[0], f"phi({format_scalar(u)})")


def _psi(pair: ParametricPair, v: Scalar) -> _Image:
    cost = linalg.add(pair.d, linalg.scale(v, pair.M[0]))
    return _face_image(_dual_region(pair), cost, pair.M[0], pair.c, pair.D[0], f"psi({format_scalar(v)})")


# ── Public operations ──


def theta_interval(pair: ParametricPair, side: str) -> Interval | None:
    """Θ_P (side="primal") or Θ_D (side="dual"); None when the region is empty."""
    _require_r1(pair)
    region, mrow, anchor, dk = _side_data(pair, side)
    return _projection_range(region, mrow, anchor, dk)


def phi(pair: ParametricPair, u) -> Interval:
    """Φ(u) for u ∈ Θ_D."""
    _require_r1(pair)
    u = pair.arith.parse(u)
    theta_d = theta_interval(pair, DUAL)
    if theta_d is None or not theta_d.contains(u, pair.arith):
        raise OutsideProjectionError(f"u = {format_scalar(u)} lies outside Θ_D = {theta_d}")
    return _phi(pair, u).interval


def psi(pair: ParametricPair, v) -> Interval:
    """Ψ(v) for v ∈ Θ_P."""
    _require_r1(pair)
    v = pair.arith.parse(v)
    theta_p = theta_interval(pair, PRIMAL)
    if theta_p is None or not theta_p.contains(v, pair.arith):
        raise OutsideProjectionError(f"v = {format_scalar(v)} lies outside Θ_P = {theta_p}")
    return _psi(pair, v).interval


def parametric_certificate(pair: ParametricPair, u, v) -> ParametricCertificate:
    """Construct (x̄, ȳ) satisfying the parametric KKT system at (u, v).

    x̄ is any point of the optimal face of the u-problem lying on the slice
    Mx = Md + Dv; ȳ likewise for the v-problem on My = Mc + Du. Such points
    exist exactly when v ∈ Φ(u) and u ∈ Ψ(v).
    """
    _require_r1(pair)
    arith = pair.arith
    u, v = arith.parse(u), arith.parse(v)
    mrow, dk = pair.M[0], pair.D[0]

    x_bar = _slice_point(
        pair.lp,
        linalg.add(pair.c, linalg.scale(u, mrow)),
        mrow,
        linalg.dot(arith, mrow, pair.d) + dk * v,
        f"x̄ at u={format_scalar(u)}, v={format_scalar(v)}",
    )
    y_bar = _slice_point(
        _dual_region(pair),
        linalg.add(pair.d, linalg.scale(v, mrow)),
        mrow,
        linalg.dot(arith, mrow, pair.c) + dk * u,
        f"ȳ at u={format_scalar(u)}, v={format_scalar(v)}",
    )
    return ParametricCertificate(x_bar=x_bar, y_bar=y_bar, u=(u,), v=(v,))


def _slice_point(region: LinearProgram, cost: Vector, mrow: Vector, target: Scalar, label: str) -> Vector:
    sol = solve(region.with_cost(cost), BLAND)
    if sol.status != OPTIMAL:
        raise OutsideProjectionError(f"{label}: parametric problem is {sol.status}")
    try:
        sliced = validate_standard_form(
            region.A + (cost, mrow),
            region.b + (sol.objective, target),
            cost,
            name=f"{region.name}:slice",
            arith=region.arith,
        )
    except InconsistentRowsError:
        raise OutsideProjectionError(f"{label}: optimal face misses the slice")
    p1 = phase1(sliced)
    if not p1.feasible:
        raise OutsideProjectionError(f"{label}: optimal face misses the slice")
    return p1.x


def ratio_test_single_row(B_row: Sequence, a) -> RatioTestResult:
    """J = {j : b_j ≠ 0, a / b_j > 0}."""
    if all(b == 0 for b in B_row):
        raise ZeroRowError("ratio test needs a nonzero row")
    J = frozenset(j for j, b in enumerate(B_row) if b != 0 and ((a > 0 and b > 0) or (a < 0 and b < 0)))
    return RatioTestResult(J=J)


# ── Sweep ──


class _Sweeper:
    """Endpoint hopping over one projection interval."""

    def __init__(self, pair: ParametricPair, side: str):
        self.pair = pair
        self.arith = pair.arith
        self.side = side
        self.own: Callable[[ParametricPair, Scalar], _Image] = _psi if side == PRIMAL else _phi
        self.cross: Callable[[ParametricPair, Scalar], _Image] = _phi if side == PRIMAL else _psi
        self.points: dict = {}
        self.pieces: list[tuple[Interval, Scalar]] = []
        self.hops = 0
        self._own_cache: dict = {}

    def own_image(self, t: Scalar) -> _Image:
        if t not in self._own_cache:
            self._own_cache[t] = self.own(self.pair, t)
        return self._own_cache[t]

    def add_point(self, t: Scalar) -> None:
        img = self.own_image(t)
        self.points[t] = Witness(point=t, image=img.interval, basis=img.basis)

    def add_piece(self, lo: Scalar, hi: Scalar, image: Scalar) -> None:
        self.pieces.append((Interval.open(lo, hi), image))

    def hop(self, t: Scalar, theta: Interval, direction: int) -> None:
        arith = self.arith
        while True:
            end = theta.hi if direction > 0 else theta.lo
            if _same(arith, t, end):
                return
            self.hops += 1
            if self.hops > settings.SWEEP_HOP_LIMIT:
                raise SweepError(f"sweep exceeded {settings.SWEEP_HOP_LIMIT} hops")

            image = self.own_image(t).interval
            u = image.lo if direction > 0 else image.hi
            if _is_inf(u):
                raise SweepError(f"image of {format_scalar(t)} is unbounded toward the hop direction before Θ ends")
            across = self.cross(self.pair, u).interval
            near, far = (across.lo, across.hi) if direction > 0 else (across.hi, across.lo)
            if not _same(arith, near, t):
                raise SweepError(
                    f"alternation failed at {format_scalar(t)}: image {format_scalar(u)} maps back to {across}"
                )
            if _same(arith, far, t):
                raise SweepError(f"no progress from transition point {format_scalar(t)}")
            logger.debug(f"[sweep:{self.side}] hop {self.hops}: {format_scalar(t)} -> {format_scalar(far)} via {format_scalar(u)}")

            lo, hi = (t, far) if direction > 0 else (far, t)
            self.add_piece(lo, hi, u)
            if _is_inf(far):
                return
            self.add_point(far)
            t = far

    def run(self, theta: Interval) -> None:
        arith = self.arith
        if theta.is_singleton(arith):
            self.add_point(theta.lo)
            return
        if theta.lo_finite:
            self.add_point(theta.lo)
            self.hop(theta.lo, theta, +1)
            return
        if theta.hi_finite:
            self.add_point(theta.hi)
            self.hop(theta.hi, theta, -1)
            return

        seed = arith.zero
        image = self.own_image(seed)
        if not image.interval.is_singleton(arith):
            self.add_point(seed)
            self.hop(seed, theta, +1)
            self.hop(seed, theta, -1)
            return

        u = image.interval.lo
        self.hops += 1
        across = self.cross(self.pair, u).interval
        if across.is_singleton(arith):
            # Singleton images on both sides at the seed contradict the
            # point/interval duality of exact decompositions
            raise InternalInconsistencyError(
                f"seed {format_scalar(seed)} and its image {format_scalar(u)} both map to single points"
            )
        self.add_piece(across.lo, across.hi, u)
        if across.lo_finite:
            self.add_point(across.lo)
            self.hop(across.lo, theta, -1)
        if across.hi_finite:
            self.add_point(across.hi)
            self.hop(across.hi, theta, +1)


def sweep(pair: ParametricPair, side: str) -> InvariancyDecomposition:
    """Decompose Θ_P or Θ_D into transition points and open invariancy intervals."""
    _require_r1(pair)
    if pair.assumption_violated:
        raise AssumptionViolatedError(f"{pair.lp.name}: sweep needs (d, c) ≥ 0")
    t0 = time.time()
    theta = theta_interval(pair, side)
    if theta is None:
        raise SweepError(f"{pair.lp.name}: projection interval of the {side} side is empty")

    sweeper = _Sweeper(pair, side)
    sweeper.run(theta)

    points = sorted(sweeper.points)
    pieces = sorted(sweeper.pieces, key=lambda item: item[0].lo)
    decomposition = InvariancyDecomposition(
        side=side,
        theta=theta,
        transition_points=tuple(points),
        intervals=tuple(piece for piece, _ in pieces),
        images=tuple(image for _, image in pieces),
        witnesses=tuple(sweeper.points[p] for p in points),
        hops=sweeper.hops,
        hop_bound_exceeded=sweeper.hops > pair.n + 1,
    )
    verify_cover(decomposition, pair.arith)
    if decomposition.hop_bound_exceeded:
        logger.warning(f"[sweep] {pair.lp.name}: {sweeper.hops} hops exceed n + 1 = {pair.n + 1}")
    logger.info(
        f"[sweep] {pair.lp.name} ({side}): {len(points)} transition points, "
        f"{len(pieces)} intervals, {sweeper.hops} hops in {time.time() - t0:.2f}s"
    )
    return decomposition


def verify_cover(decomposition: InvariancyDecomposition, arith: Arith) -> None:
    """Intervals and transition points alternate, are disjoint, and tile Θ."""
    theta = decomposition.theta
    points = list(decomposition.transition_points)
    intervals = list(decomposition.intervals)

    for p, q in zip(points, points[1:]):
        if not p < q or arith.eq(p, q):
            raise SweepError(f"transition points not strictly increasing: {p}, {q}")

    # Walk Θ from left to right
    cursor = theta.lo
    i_pt = i_iv = 0
    if theta.lo_finite:
        if not points or not arith.eq(points[0], theta.lo):
            raise SweepError(f"left end {format_scalar(theta.lo)} of Θ is not a transition point")
        i_pt = 1
    while i_iv < len(intervals):
        piece = intervals[i_iv]
        if not _same(arith, piece.lo, cursor):
            raise SweepError(f"gap or overlap before interval {piece}")
        if piece.lo_closed or piece.hi_closed or piece.is_singleton(arith):
            raise SweepError(f"invariancy interval {piece} is not a nonempty open interval")
        cursor = piece.hi
        i_iv += 1
        if _is_inf(cursor):
            break
        if i_pt >= len(points) or not arith.eq(points[i_pt], cursor):
            raise SweepError(f"interval {piece} does not end at a transition point")
        i_pt += 1
    if i_iv != len(intervals) or i_pt != len(points):
        raise SweepError("decomposition has pieces beyond the end of Θ")
    if not intervals and len(points) != 1:
        raise SweepError("degenerate Θ must consist of exactly one transition point")
    if not intervals:
        cursor = points[0]
    if not _same(arith, cursor, theta.hi):
        raise SweepError(f"decomposition stops at {format_scalar(cursor)} before Θ ends at {format_scalar(theta.hi)}")


def count_bound_check(pair: ParametricPair, decomposition: InvariancyDecomposition) -> CountBoundResult:
    """Compare the decomposition size against n (and against |J| when l = 1)."""
    j_size = None
    if pair.l == 1:
        j_size = len(ratio_test_single_row(pair.B[0], pair.a[0]).J)
    n_points = len(decomposition.transition_points)
    n_intervals = len(decomposition.intervals)
    holds = n_points <= pair.n and n_intervals <= pair.n
    discrepancy = j_size is not None and n_points > j_size
    if not holds:
        logger.warning(f"[count_bound_check] {pair.lp.name}: {n_points} points / {n_intervals} intervals exceed n = {pair.n}")
    if discrepancy:
        logger.info(f"[count_bound_check] {pair.lp.name}: |J| = {j_size} < {n_points} transition points")
    return CountBoundResult(
        n=pair.n,
        transition_points=n_points,
        intervals=n_intervals,
        j_size=j_size,
        holds=holds,
        j_discrepancy=discrepancy,
    )
