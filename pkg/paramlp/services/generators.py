"""Deterministic instance generators.

Every generator is a pure function of its arguments. Random instances draw
from a SplitMix64 stream so that any implementation seeded with the same
integer reproduces the same integers.
"""

import logging
from fractions import Fraction

from paramlp.errors import DimensionMismatchError, ParamLpError
from paramlp.services import linalg
from paramlp.services.arith import Arith
from paramlp.services.lp import LinearProgram, ParametricPair, build_parametric_pair, validate_standard_form
from paramlp.services.simplex import Basis

logger = logging.getLogger(__name__)

KLEE_MINTY_MAX_D = 12
RANDOM_MAX_N = 30
ENTRY_RANGE = (-9, 9)
POINT_RANGE = (0, 9)


class SplitMix64:
    MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self.state = seed & self.MASK

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & self.MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & self.MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & self.MASK
        return z ^ (z >> 31)

    def integer(self, lo: int, hi: int) -> int:
        """Uniform-ish integer in [lo, hi] (modulo reduction)."""
        return lo + self.next() % (hi - lo + 1)

    def integers(self, count: int, lo: int, hi: int) -> list[int]:
        return [self.integer(lo, hi) for _ in range(count)]


# ── Klee–Minty ──


def gen_klee_minty(D: int, arith: Arith | None = None) -> LinearProgram:
    """max Σ 10^{D−j} x_j  s.t.  2 Σ_{j<i} 10^{i−j} x_j + x_i ≤ 100^{i−1},  x ≥ 0,
    in standard form with D slacks and the objective negated."""
    if not 1 <= D <= KLEE_MINTY_MAX_D:
        raise DimensionMismatchError(f"Klee–Minty dimension D = {D} outside [1, {KLEE_MINTY_MAX_D}]")
    rows = []
    for i in range(1, D + 1):
        row = [0] * (2 * D)
        for j in range(1, i):
            row[j - 1] = 2 * 10 ** (i - j)
        row[i - 1] = 1
        row[D + i - 1] = 1
        rows.append(row)
    b = [100 ** (i - 1) for i in range(1, D + 1)]
    c = [-(10 ** (D - j)) for j in range(1, D + 1)] + [0] * D

    exact = Arith.exact()
    lp = LinearProgram(
        A=exact.matrix(rows),
        b=exact.vector(b),
        c=exact.vector(c),
        arith=exact,
        name=f"klee_minty_D{D}",
        meta={"generator": "klee_minty", "D": D},
    )
    return lp.to_mode(arith) if arith is not None else lp


def klee_minty_start(D: int) -> Basis:
    """The all-slack basis (origin of the cube)."""
    return Basis(tuple(range(D, 2 * D)))


# ── Random bounded LPs ──


def _full_rank_matrix(rng: SplitMix64, m: int, n: int) -> list[list[int]]:
    exact = Arith.exact()
    while True:
        rows = [rng.integers(n, *ENTRY_RANGE) for _ in range(m)]
        if linalg.rank(exact, exact.matrix(rows), n) == m:
            return rows


def gen_random_bounded(m: int, n: int, seed: int, arith: Arith | None = None) -> LinearProgram:
    """Random LP that is feasible and bounded by construction.

    b = A x0 with integer x0 ≥ 0 certifies feasibility; c = Aᵀw + y with
    y ≥ 0 certifies dual feasibility. Both certificates go into ``meta``.
    """
    if not 1 <= m < n <= RANDOM_MAX_N:
        raise DimensionMismatchError(f"random instance needs 1 ≤ m < n ≤ {RANDOM_MAX_N}, got m={m}, n={n}")
    rng = SplitMix64(seed)
    A = _full_rank_matrix(rng, m, n)
    x0 = rng.integers(n, *POINT_RANGE)
    w = rng.integers(m, *ENTRY_RANGE)
    y = rng.integers(n, *POINT_RANGE)
    b = [sum(a * x for a, x in zip(row, x0)) for row in A]
    c = [sum(A[i][j] * w[i] for i in range(m)) + y[j] for j in range(n)]

    exact = Arith.exact()
    lp = LinearProgram(
        A=exact.matrix(A),
        b=exact.vector(b),
        c=exact.vector(c),
        arith=exact,
        name=f"random_m{m}_n{n}_s{seed}",
        meta={"generator": "random_bounded", "m": m, "n": n, "seed": seed, "x0": x0, "w": w, "y": y},
    )
    logger.debug(f"[gen_random_bounded] {lp.name}: b={b}, c={c}")
    return lp.to_mode(arith) if arith is not None else lp


def gen_random_pair(n: int, seed: int, arith: Arith | None = None) -> ParametricPair:
    """Assumption-clean pair with l = r = 1 (m = n − 2), d and c nonnegative integers."""
    if not 3 <= n <= RANDOM_MAX_N:
        raise DimensionMismatchError(f"random pair needs 3 ≤ n ≤ {RANDOM_MAX_N}, got n={n}")
    m = n - 2
    exact = Arith.exact()
    rng = SplitMix64(seed)
    A = _full_rank_matrix(rng, m, n)
    d = rng.integers(n, *POINT_RANGE)
    c = rng.integers(n, *POINT_RANGE)
    b = [sum(a * x for a, x in zip(row, d)) for row in A]

    kernel = linalg.null_space(exact, exact.matrix(A), n)
    B_row = None
    while B_row is None or not any(B_row):
        weights = rng.integers(len(kernel), *ENTRY_RANGE)
        combo = [Fraction(0)] * n
        for k, vec in zip(weights, kernel):
            combo = [acc + k * v for acc, v in zip(combo, vec)]
        B_row = linalg.primitive(combo)

    lp = LinearProgram(
        A=exact.matrix(A),
        b=exact.vector(b),
        c=exact.vector(c),
        arith=exact,
        name=f"pair_n{n}_s{seed}",
        meta={"generator": "random_pair", "n": n, "seed": seed},
    )
    pair = build_parametric_pair(lp, d, [B_row])
    return pair_to_mode(pair, arith) if arith is not None else pair


def pair_to_mode(pair: ParametricPair, arith: Arith) -> ParametricPair:
    """Rebuild a pair in another arithmetic mode (complement recomputed)."""
    if arith == pair.arith:
        return pair
    lp = pair.lp.to_mode(arith)
    return build_parametric_pair(lp, [arith.convert(v) for v in pair.d], [[arith.convert(v) for v in row] for row in pair.B])


# ── Fixtures ──

FIXTURES = {
    "T1": {
        "A": [[1, 1, 1]],
        "b": [3],
        "c": [2, 1, 0],
        "d": [1, 1, 1],
        "B": [[1, -1, 0]],
    },
}


def fixture(name: str, arith: Arith | None = None) -> ParametricPair:
    if name not in FIXTURES:
        raise ParamLpError(f"Unknown fixture: {name!r} (known: {', '.join(sorted(FIXTURES))})")
    data = FIXTURES[name]
    arith = arith or Arith.exact()
    lp = validate_standard_form(data["A"], data["b"], data["c"], name=name, arith=arith)
    return build_parametric_pair(lp, data["d"], data["B"])
