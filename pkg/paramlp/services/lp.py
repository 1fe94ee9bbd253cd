"""LP and parametric-pair data types, validation, orthogonal complements and
KKT certificate checking."""

import logging
from dataclasses import dataclass, field, replace
from typing import Any, Mapping, Sequence

from paramlp.errors import (
    AnchorMismatchError,
    DimensionMismatchError,
    EmptyProblemError,
    InconsistentRowsError,
    InternalInconsistencyError,
    NotOrthogonalError,
    RankDeficientError,
)
from paramlp.services import linalg
from paramlp.services.arith import Arith, Matrix, Scalar, Vector

logger = logging.getLogger(__name__)


# ── Domain Types ──


@dataclass(frozen=True)
class LinearProgram:
    """min ⟨c, x⟩ subject to Ax = b, x ≥ 0 (A has full row rank once validated)."""

    A: Matrix
    b: Vector
    c: Vector
    arith: Arith
    name: str = "lp"
    dropped_rows: tuple[int, ...] = field(default=(), compare=False)
    meta: Mapping[str, Any] = field(default_factory=dict, compare=False)

    @property
    def m(self) -> int:
        return len(self.A)

    @property
    def n(self) -> int:
        return len(self.c)

    def column(self, j: int) -> Vector:
        return linalg.column(self.A, j)

    def objective(self, x: Sequence[Scalar]) -> Scalar:
        return linalg.dot(self.arith, self.c, x)

    def with_cost(self, c: Sequence[Scalar], name: str | None = None) -> "LinearProgram":
        return replace(self, c=tuple(c), name=name or self.name)

    def to_mode(self, arith: Arith) -> "LinearProgram":
        if arith == self.arith:
            return self
        return LinearProgram(
            A=tuple(tuple(arith.convert(a) for a in row) for row in self.A),
            b=tuple(arith.convert(v) for v in self.b),
            c=tuple(arith.convert(v) for v in self.c),
            arith=arith,
            name=self.name,
            dropped_rows=self.dropped_rows,
            meta=self.meta,
        )


@dataclass(frozen=True)
class ParametricPair:
    """The almost primal-dual pair tying the OFD- and RHS-perturbed problems.

    ``D`` holds the diagonal of MMᵀ (rows of M are orthogonal but, in exact
    mode, not normalized).
    """

    lp: LinearProgram
    d: Vector
    B: Matrix
    a: Vector
    M: Matrix
    D: Vector
    assumption_violated: bool = False

    @property
    def arith(self) -> Arith:
        return self.lp.arith

    @property
    def A(self) -> Matrix:
        return self.lp.A

    @property
    def b(self) -> Vector:
        return self.lp.b

    @property
    def c(self) -> Vector:
        return self.lp.c

    @property
    def n(self) -> int:
        return self.lp.n

    @property
    def m(self) -> int:
        return self.lp.m

    @property
    def l(self) -> int:  # noqa: E743
        return len(self.B)

    @property
    def r(self) -> int:
        return len(self.M)

    @property
    def assumption_clean(self) -> bool:
        return not self.assumption_violated


@dataclass(frozen=True)
class KktCertificate:
    x: Vector
    w: Vector
    y: Vector


@dataclass(frozen=True)
class ParametricCertificate:
    x_bar: Vector
    y_bar: Vector
    u: Vector
    v: Vector


@dataclass(frozen=True)
class Violation:
    condition: str
    detail: str


@dataclass(frozen=True)
class KktVerdict:
    ok: bool
    violations: tuple[Violation, ...] = ()

    @property
    def conditions(self) -> tuple[str, ...]:
        return tuple(v.condition for v in self.violations)

    def __bool__(self) -> bool:
        return self.ok


# ── Validation ──


def validate_standard_form(
    A: Sequence[Sequence],
    b: Sequence,
    c: Sequence,
    name: str = "lp",
    arith: Arith | None = None,
    meta: Mapping[str, Any] | None = None,
) -> LinearProgram:
    """Check dimensions and drop redundant rows so that A has full row rank."""
    arith = arith or Arith.from_settings()
    n = len(c)
    if n == 0:
        raise EmptyProblemError(f"[{name}] objective vector is empty (n = 0)")
    if len(b) != len(A):
        raise DimensionMismatchError(f"[{name}] A has {len(A)} rows but b has {len(b)} entries")
    for i, row in enumerate(A):
        if len(row) != n:
            raise DimensionMismatchError(f"[{name}] row {i} of A has {len(row)} entries, expected {n}")

    A_p = arith.matrix(A)
    b_p = arith.vector(b)
    c_p = arith.vector(c)

    kept, dropped, bad = linalg.independent_rows(arith, A_p, b_p, n)
    if bad is not None:
        raise InconsistentRowsError(f"[{name}] row {bad} depends on earlier rows but its right-hand side is incompatible")
    if dropped:
        logger.warning(f"[validate_standard_form] {name}: dropped redundant rows {dropped}")

    return LinearProgram(
        A=tuple(A_p[i] for i in kept),
        b=tuple(b_p[i] for i in kept),
        c=c_p,
        arith=arith,
        name=name,
        dropped_rows=tuple(dropped),
        meta=dict(meta or {}),
    )


# ── Orthogonal complement ──


def orthogonal_complement(
    A: Sequence[Sequence],
    B: Sequence[Sequence] | None = None,
    arith: Arith | None = None,
    n: int | None = None,
) -> tuple[Matrix, Vector]:
    """Rows M spanning the complement of row(A) ⊕ row(B), and D = diag(MMᵀ).

    Exact mode keeps rational rows in primitive integer form; float mode
    returns orthonormal rows so that D = I.
    """
    arith = arith or Arith.from_settings()
    A_p = arith.matrix(A)
    B_p = arith.matrix(B or ())
    if n is None:
        if A_p:
            n = len(A_p[0])
        elif B_p:
            n = len(B_p[0])
        else:
            raise DimensionMismatchError("Cannot infer n from empty A and B")

    for i, b_row in enumerate(B_p):
        if len(b_row) != n:
            raise DimensionMismatchError(f"row {i} of B has {len(b_row)} entries, expected {n}")
        for k, a_row in enumerate(A_p):
            if not arith.is_zero(linalg.dot(arith, a_row, b_row)):
                raise NotOrthogonalError(f"row {i} of B is not orthogonal to row {k} of A")
    if B_p and linalg.rank(arith, B_p, n) < len(B_p):
        raise RankDeficientError(f"B has {len(B_p)} rows but rank {linalg.rank(arith, B_p, n)}")

    basis = linalg.null_space(arith, A_p + B_p, n)
    if arith.is_exact:
        M = tuple(linalg.primitive(row) for row in linalg.gram_schmidt(arith, basis))
        D = tuple(linalg.dot(arith, row, row) for row in M)
    else:
        M = tuple(_leading_positive(row) for row in basis)
        D = tuple(1.0 for _ in M)
    return M, D


def _leading_positive(row: Vector) -> Vector:
    lead = next((a for a in row if abs(a) > 1e-12), 0.0)
    return tuple(-a for a in row) if lead < 0 else tuple(row)


# ── Parametric pair ──


def build_parametric_pair(lp: LinearProgram, d: Sequence, B: Sequence[Sequence]) -> ParametricPair:
    """Build the pair with b = Ad, a = Bc and M, D from the orthogonal complement."""
    arith = lp.arith
    d_p = arith.vector(d)
    if len(d_p) != lp.n:
        raise DimensionMismatchError(f"d has {len(d_p)} entries, expected {lp.n}")
    Ad = linalg.matvec(arith, lp.A, d_p)
    for i, (lhs, rhs) in enumerate(zip(Ad, lp.b)):
        if not arith.eq(lhs, rhs):
            raise AnchorMismatchError(f"Ad ≠ b in row {i}: {lhs} vs {rhs}")

    B_p = arith.matrix(B)
    M, D = orthogonal_complement(lp.A, B_p, arith=arith, n=lp.n)
    a = linalg.matvec(arith, B_p, lp.c)

    violated = any(arith.is_neg(v) for v in d_p) or any(arith.is_neg(v) for v in lp.c)
    pair = ParametricPair(lp=lp, d=d_p, B=B_p, a=a, M=M, D=D, assumption_violated=violated)
    certify_pair(pair)
    if violated:
        logger.warning(f"[build_parametric_pair] {lp.name}: (d, c) ≥ 0 fails, pair flagged assumption-violated")
    return pair


def certify_pair(pair: ParametricPair) -> None:
    """Assert the orthogonality relations and the dimension count m + l + r = n."""
    arith = pair.arith
    blocks = {"A": pair.A, "B": pair.B, "M": pair.M}
    for left, right in (("A", "M"), ("B", "M"), ("A", "B")):
        for i, row_l in enumerate(blocks[left]):
            for k, row_r in enumerate(blocks[right]):
                if not arith.is_zero(linalg.dot(arith, row_l, row_r)):
                    raise InternalInconsistencyError(f"row {i} of {left} is not orthogonal to row {k} of {right}")
    for i, row_i in enumerate(pair.M):
        for k, row_k in enumerate(pair.M):
            value = linalg.dot(arith, row_i, row_k)
            if i == k:
                if not arith.eq(value, pair.D[i]) or not arith.is_pos(pair.D[i]):
                    raise InternalInconsistencyError(f"MMᵀ diagonal entry {i} is {value}, expected positive {pair.D[i]}")
            elif not arith.is_zero(value):
                raise InternalInconsistencyError(f"rows {i} and {k} of M are not orthogonal")
    if pair.m + pair.l + pair.r != pair.n:
        raise InternalInconsistencyError(f"m + l + r = {pair.m + pair.l + pair.r} ≠ n = {pair.n}")


def projection_matrix(arith: Arith, s: Sequence[Scalar]) -> Matrix:
    """S = s sᵀ / ⟨s, s⟩, the rank-1 symmetric projection along s."""
    norm2 = linalg.dot(arith, s, s)
    return tuple(tuple(si * sj / norm2 for sj in s) for si in s)


# ── Certificate checking ──


def kkt_check(lp: LinearProgram, cert: KktCertificate) -> KktVerdict:
    """Ax = b, x ≥ 0, Aᵀw + y = c, y ≥ 0 and ⟨x, y⟩ = 0."""
    arith = lp.arith
    x, w, y = arith.vector(cert.x), arith.vector(cert.w), arith.vector(cert.y)
    if len(x) != lp.n or len(y) != lp.n or len(w) != lp.m:
        raise DimensionMismatchError(f"certificate shapes ({len(x)}, {len(w)}, {len(y)}) do not match n={lp.n}, m={lp.m}")

    violations = []
    _check_equal(arith, "primal_equality", linalg.matvec(arith, lp.A, x), lp.b, violations)
    _check_sign(arith, "primal_sign", x, violations)
    _check_equal(arith, "dual_equality", linalg.add(linalg.rmatvec(arith, lp.A, w, lp.n), y), lp.c, violations)
    _check_sign(arith, "dual_sign", y, violations)
    _check_complementarity(arith, x, y, violations)
    return KktVerdict(ok=not violations, violations=tuple(violations))


def parametric_kkt_check(pair: ParametricPair, cert: ParametricCertificate) -> KktVerdict:
    """The D-scaled parametric KKT system:

        A x̄ = Ad,  M x̄ = Md + Dv,  x̄ ≥ 0,
        B ȳ = Bc,  M ȳ = Mc + Du,  ȳ ≥ 0,
        ⟨x̄, ȳ⟩ = 0.
    """
    arith = pair.arith
    x, y = arith.vector(cert.x_bar), arith.vector(cert.y_bar)
    u, v = arith.vector(_as_vector(cert.u)), arith.vector(_as_vector(cert.v))
    if len(x) != pair.n or len(y) != pair.n or len(u) != pair.r or len(v) != pair.r:
        raise DimensionMismatchError(f"parametric certificate shapes do not match n={pair.n}, r={pair.r}")

    Du = tuple(dk * uk for dk, uk in zip(pair.D, u))
    Dv = tuple(dk * vk for dk, vk in zip(pair.D, v))
    violations = []
    _check_equal(arith, "primal_equality", linalg.matvec(arith, pair.A, x), linalg.matvec(arith, pair.A, pair.d), violations)
    _check_equal(arith, "primal_projection", linalg.matvec(arith, pair.M, x), linalg.add(linalg.matvec(arith, pair.M, pair.d), Dv), violations)
    _check_sign(arith, "primal_sign", x, violations)
    _check_equal(arith, "dual_equality", linalg.matvec(arith, pair.B, y), linalg.matvec(arith, pair.B, pair.c), violations)
    _check_equal(arith, "dual_projection", linalg.matvec(arith, pair.M, y), linalg.add(linalg.matvec(arith, pair.M, pair.c), Du), violations)
    _check_sign(arith, "dual_sign", y, violations)
    _check_complementarity(arith, x, y, violations)
    return KktVerdict(ok=not violations, violations=tuple(violations))


def _as_vector(value) -> Sequence:
    if isinstance(value, (list, tuple)):
        return value
    return (value,)


def _check_equal(arith: Arith, name: str, lhs: Vector, rhs: Vector, violations: list) -> None:
    for i, (a, b) in enumerate(zip(lhs, rhs)):
        if not arith.eq(a, b):
            violations.append(Violation(name, f"component {i}: {a} ≠ {b}"))
            return


def _check_sign(arith: Arith, name: str, vec: Vector, violations: list) -> None:
    for i, a in enumerate(vec):
        if not arith.nonneg(a):
            violations.append(Violation(name, f"component {i} is negative: {a}"))
            return


def _check_complementarity(arith: Arith, x: Vector, y: Vector, violations: list) -> None:
    gap = linalg.dot(arith, x, y)
    if arith.is_exact:
        ok = gap == 0
    else:
        scale = max(1.0, sum(abs(a) for a in x) * max((abs(b) for b in y), default=0.0))
        ok = abs(gap) <= arith.eps_feas * scale
    if not ok:
        violations.append(Violation("complementarity", f"⟨x, y⟩ = {gap} ≠ 0"))
