"""Independent float-mode oracle for primal transition points.

The optimal value of min ⟨c, x⟩ s.t. Ax = b, Mx = Md + Dv, x ≥ 0 is convex and
piecewise linear in v. Its kinks, together with the finite ends of Θ_P, are
the primal transition points. The oracle samples the value on a grid with
scipy's HiGHS solver and bisects every cell where the slope changes.
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from paramlp.config import settings
from paramlp.errors import SweepError, UnsupportedDimensionError
from paramlp.services.lp import ParametricPair
from paramlp.services.parametric import PRIMAL, InvariancyDecomposition

logger = logging.getLogger(__name__)

HIGHS_OPTIONS = {"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10}
KINK_RTOL = 1e-5
VALUE_RTOL = 1e-8


@dataclass(frozen=True)
class OracleResult:
    breakpoints: tuple[float, ...]
    theta: tuple[float, float]
    window: tuple[float, float]
    evaluations: int


class _ValueFunction:
    def __init__(self, pair: ParametricPair):
        if pair.r != 1:
            raise UnsupportedDimensionError(f"grid oracle needs r = 1, got r = {pair.r}")
        self.A = np.array([[float(a) for a in row] for row in pair.A], dtype=float).reshape(pair.m, pair.n)
        self.b = np.array([float(v) for v in pair.b], dtype=float)
        self.c = np.array([float(v) for v in pair.c], dtype=float)
        self.m_row = np.array([float(v) for v in pair.M[0]], dtype=float)
        self.d = np.array([float(v) for v in pair.d], dtype=float)
        self.D = float(pair.D[0])
        self.offset = float(self.m_row @ self.d)
        self.evaluations = 0

    def __call__(self, v: float) -> float:
        self.evaluations += 1
        A_eq = np.vstack([self.A, self.m_row])
        b_eq = np.append(self.b, self.offset + self.D * v)
        res = linprog(self.c, A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs", options=HIGHS_OPTIONS)
        return float(res.fun) if res.status == 0 else float("nan")

    def theta(self) -> tuple[float, float]:
        ends = []
        for sign in (1.0, -1.0):
            A_eq = self.A if self.A.size else None
            b_eq = self.b if self.A.size else None
            res = linprog(sign * self.m_row, A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs", options=HIGHS_OPTIONS)
            if res.status == 3:
                ends.append(-sign * np.inf)
            elif res.status == 0:
                ends.append((sign * res.fun - self.offset) / self.D)
            else:
                raise SweepError(f"grid oracle: projection range solve failed ({res.message})")
        return ends[0], ends[1]


def _default_window(theta: tuple[float, float]) -> tuple[float, float]:
    lo, hi = theta
    finite = [v for v in theta if np.isfinite(v)]
    reach = 10.0 * (1.0 + max((abs(v) for v in finite), default=0.0))
    return (lo if np.isfinite(lo) else -reach, hi if np.isfinite(hi) else reach)


def _bisect(f, p: float, q: float, f_p: float, slope: float, tol: float) -> float:
    """Shrink [p, q] around the point where f leaves the line through (p, f_p)."""
    while q - p > tol:
        mid = 0.5 * (p + q)
        f_mid = f(mid)
        on_line = abs(f_mid - (f_p + slope * (mid - p))) <= VALUE_RTOL * max(1.0, abs(f_mid))
        if on_line:
            p = mid
        else:
            q = mid
    return 0.5 * (p + q)


def grid_oracle(
    pair: ParametricPair,
    points: int | None = None,
    tol: float | None = None,
    window: tuple[float, float] | None = None,
    workers: int | None = None,
) -> OracleResult:
    """Float breakpoints of the primal value function over Θ_P (clipped to a window)."""
    t0 = time.time()
    points = points or settings.GRID_POINTS
    tol = tol or settings.BISECTION_TOL
    workers = workers or settings.ORACLE_WORKERS

    f = _ValueFunction(pair)
    theta = f.theta()
    lo, hi = window or _default_window(theta)
    lo, hi = max(lo, theta[0]), min(hi, theta[1])

    found: list[float] = [v for v in theta if np.isfinite(v)]
    if hi - lo > tol:
        inset = 1e-9 * (hi - lo)
        grid = np.linspace(lo + inset, hi - inset, points)
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                values = np.array(list(pool.map(f, grid)))
        else:
            values = np.array([f(v) for v in grid])
        keep = np.isfinite(values)
        grid, values = grid[keep], values[keep]

        slopes = np.diff(values) / np.diff(grid)
        scale = max(1.0, float(np.max(np.abs(slopes)))) if slopes.size else 1.0
        flagged = [k for k in range(1, slopes.size) if abs(slopes[k] - slopes[k - 1]) > KINK_RTOL * scale]

        # Consecutive flags belong to one kink
        groups: list[list[int]] = []
        for k in flagged:
            if groups and k == groups[-1][-1] + 1:
                groups[-1].append(k)
            else:
                groups.append([k])
        for group in groups:
            first, last = group[0], group[-1]
            p, q = grid[first - 1], grid[last + 1]
            found.append(_bisect(f, p, q, values[first - 1], slopes[first - 1], tol))

    breakpoints = []
    for v in sorted(found):
        if not breakpoints or v - breakpoints[-1] > tol:
            breakpoints.append(float(v))
    logger.info(
        f"[grid_oracle] {pair.lp.name}: {len(breakpoints)} breakpoints on [{lo:.6g}, {hi:.6g}] "
        f"from {f.evaluations} HiGHS solves in {time.time() - t0:.2f}s"
    )
    return OracleResult(breakpoints=tuple(breakpoints), theta=theta, window=(lo, hi), evaluations=f.evaluations)


def oracle_window(decomposition: InvariancyDecomposition, margin: float = 1.0) -> tuple[float, float]:
    """A window that contains every finite transition point with some margin."""
    finite = [float(p) for p in decomposition.transition_points]
    if not finite:
        return (-margin, margin)
    return (min(finite) - margin, max(finite) + margin)


def oracle_agrees(decomposition: InvariancyDecomposition, oracle: OracleResult, tol: float | None = None) -> bool:
    """Exact transition points inside the oracle window match its breakpoints to tol."""
    if decomposition.side != PRIMAL:
        raise ValueError("grid oracle covers the primal side only")
    tol = tol or settings.ORACLE_TOL
    lo, hi = oracle.window
    exact = [float(p) for p in decomposition.transition_points if lo - tol <= float(p) <= hi + tol]
    found = [p for p in oracle.breakpoints if lo - tol <= p <= hi + tol]
    if len(exact) != len(found):
        logger.warning(f"[oracle_agrees] {len(exact)} exact transition points vs {len(found)} oracle breakpoints")
        return False
    worst = max((abs(a - b) for a, b in zip(exact, found)), default=0.0)
    if worst > tol:
        logger.warning(f"[oracle_agrees] largest deviation {worst:.3g} exceeds {tol:g}")
        return False
    return True
