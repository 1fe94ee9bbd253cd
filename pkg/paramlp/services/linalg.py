"""Dense linear algebra over either arithmetic mode.

Exact mode works on tuples of ``Fraction`` with plain Gaussian elimination.
Float mode hands the heavy lifting to numpy / scipy (rank tests, LU solves and
orthonormal null spaces).
"""

import math
from fractions import Fraction
from typing import Sequence

import numpy as np
import scipy.linalg

from paramlp.errors import SingularBasisError
from paramlp.services.arith import Arith, Matrix, Scalar, Vector


# ── Vector helpers ──


def dot(arith: Arith, u: Sequence[Scalar], v: Sequence[Scalar]) -> Scalar:
    total = arith.zero
    for a, b in zip(u, v):
        if a and b:
            total += a * b
    return total


def matvec(arith: Arith, rows: Matrix, x: Sequence[Scalar]) -> Vector:
    return tuple(dot(arith, row, x) for row in rows)


def rmatvec(arith: Arith, rows: Matrix, y: Sequence[Scalar], n: int) -> Vector:
    """Aᵀy for an m×n matrix given by its rows."""
    out = [arith.zero] * n
    for row, coef in zip(rows, y):
        if not coef:
            continue
        for j, a in enumerate(row):
            if a:
                out[j] += coef * a
    return tuple(out)


def add(u: Sequence[Scalar], v: Sequence[Scalar]) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def sub(u: Sequence[Scalar], v: Sequence[Scalar]) -> Vector:
    return tuple(a - b for a, b in zip(u, v))


def scale(k: Scalar, u: Sequence[Scalar]) -> Vector:
    return tuple(k * a for a in u)


def column(rows: Matrix, j: int) -> Vector:
    return tuple(row[j] for row in rows)


def primitive(vector: Sequence[Fraction]) -> Vector:
    """Scale a rational vector to coprime integers with a positive leading entry."""
    if not any(vector):
        return tuple(Fraction(v) for v in vector)
    lcm = 1
    for v in vector:
        lcm = lcm * v.denominator // math.gcd(lcm, v.denominator)
    ints = [int(v * lcm) for v in vector]
    g = 0
    for k in ints:
        g = math.gcd(g, abs(k))
    lead = next(k for k in ints if k != 0)
    sign = 1 if lead > 0 else -1
    return tuple(Fraction(sign * k // g) for k in ints)


def _to_numpy(rows: Sequence[Sequence[Scalar]], n: int) -> np.ndarray:
    if not rows:
        return np.zeros((0, n), dtype=float)
    return np.array([[float(a) for a in row] for row in rows], dtype=float)


# ── Rank and elimination ──


def _reduce_against(arith: Arith, echelon: list, row: list) -> list:
    """Eliminate the pivots of ``echelon`` (list of (pivot_col, row)) from ``row``."""
    row = list(row)
    for col, piv_row in echelon:
        coef = row[col]
        if arith.is_zero(coef, arith.eps_rank):
            continue
        factor = coef / piv_row[col]
        row = [a - factor * p for a, p in zip(row, piv_row)]
    return row


def rank(arith: Arith, rows: Matrix, n: int) -> int:
    if not rows:
        return 0
    if not arith.is_exact:
        return int(np.linalg.matrix_rank(_to_numpy(rows, n), tol=_rank_tol(arith, rows)))
    echelon = []
    for row in rows:
        reduced = _reduce_against(arith, echelon, row)
        col = next((j for j, a in enumerate(reduced) if a != 0), None)
        if col is not None:
            echelon.append((col, reduced))
    return len(echelon)


def _rank_tol(arith: Arith, rows: Sequence[Sequence[Scalar]]) -> float:
    biggest = max((abs(float(a)) for row in rows for a in row), default=1.0)
    return arith.eps_rank * max(1.0, biggest)


def independent_rows(arith: Arith, rows: Matrix, rhs: Vector, n: int) -> tuple[list[int], list[int], int | None]:
    """Split row indices into (kept, dropped) for a consistent system.

    Rows are scanned in order; a row is dropped when it depends on the rows
    kept before it. Returns the index of the first dependent row whose
    right-hand side contradicts the others as the third element (or None).
    """
    kept: list[int] = []
    dropped: list[int] = []

    if arith.is_exact:
        echelon = []
        for i, (row, b_i) in enumerate(zip(rows, rhs)):
            reduced = _reduce_against(arith, echelon, list(row) + [b_i])
            col = next((j for j in range(n) if reduced[j] != 0), None)
            if col is None:
                if reduced[n] != 0:
                    return kept, dropped, i
                dropped.append(i)
                continue
            echelon.append((col, reduced))
            kept.append(i)
        return kept, dropped, None

    # Float mode: orthogonal (SVD-based) rank tests on the accumulated rows
    tol = _rank_tol(arith, rows)
    for i, (row, b_i) in enumerate(zip(rows, rhs)):
        trial = [rows[k] for k in kept] + [row]
        trial_np = _to_numpy(trial, n)
        if np.linalg.matrix_rank(trial_np, tol=tol) > len(kept):
            kept.append(i)
            continue
        augmented = np.hstack([trial_np, np.array([[float(rhs[k])] for k in kept] + [[float(b_i)]])])
        if np.linalg.matrix_rank(augmented, tol=max(tol, arith.eps_feas)) > len(kept):
            return kept, dropped, i
        dropped.append(i)
    return kept, dropped, None


def null_space(arith: Arith, rows: Matrix, n: int) -> list[Vector]:
    """A basis of {x : rows·x = 0}. Rational (unnormalized) in exact mode,
    orthonormal in float mode."""
    if not arith.is_exact:
        if not rows:
            return [tuple(float(i == j) for j in range(n)) for i in range(n)]
        basis = scipy.linalg.null_space(_to_numpy(rows, n), rcond=arith.eps_rank)
        return [tuple(float(a) for a in basis[:, k]) for k in range(basis.shape[1])]

    # Reduced row echelon form
    work = [list(row) for row in rows]
    pivots: list[int] = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, len(work)) if work[i][col] != 0), None)
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        lead = work[r][col]
        work[r] = [a / lead for a in work[r]]
        for i in range(len(work)):
            if i != r and work[i][col] != 0:
                factor = work[i][col]
                work[i] = [a - factor * p for a, p in zip(work[i], work[r])]
        pivots.append(col)
        r += 1
        if r == len(work):
            break

    free = [j for j in range(n) if j not in pivots]
    basis = []
    for f in free:
        vec = [Fraction(0)] * n
        vec[f] = Fraction(1)
        for i, col in enumerate(pivots):
            vec[col] = -work[i][f]
        basis.append(tuple(vec))
    return basis


def gram_schmidt(arith: Arith, vectors: Sequence[Vector]) -> list[Vector]:
    """Mutually orthogonal (unnormalized) vectors spanning the same space."""
    out: list[Vector] = []
    for v in vectors:
        u = tuple(v)
        for q in out:
            coef = dot(arith, u, q) / dot(arith, q, q)
            if coef:
                u = sub(u, scale(coef, q))
        if any(not arith.is_zero(a, arith.eps_rank) for a in u):
            out.append(u)
    return out


# ── Square solves ──


class LUFactor:
    """LU factorization of a square matrix with solves for M x = r and Mᵀ y = r."""

    def __init__(self, arith: Arith, rows: Sequence[Sequence[Scalar]]):
        self.arith = arith
        self.size = len(rows)
        if self.size == 0:
            return
        if not arith.is_exact:
            mat = _to_numpy(rows, self.size)
            with np.errstate(all="ignore"):
                self._lu, self._piv = scipy.linalg.lu_factor(mat, check_finite=False)
            diag = np.abs(np.diag(self._lu))
            if diag.min() <= arith.eps_rank * max(1.0, float(np.abs(mat).max())):
                raise SingularBasisError("Basis matrix is singular")
            return

        m = self.size
        lu = [list(row) for row in rows]
        perm = list(range(m))
        for k in range(m):
            piv = next((i for i in range(k, m) if lu[i][k] != 0), None)
            if piv is None:
                raise SingularBasisError("Basis matrix is singular")
            if piv != k:
                lu[k], lu[piv] = lu[piv], lu[k]
                perm[k], perm[piv] = perm[piv], perm[k]
            pivot = lu[k][k]
            for i in range(k + 1, m):
                if lu[i][k] == 0:
                    continue
                factor = lu[i][k] / pivot
                lu[i][k] = factor
                row_k = lu[k]
                row_i = lu[i]
                for j in range(k + 1, m):
                    if row_k[j]:
                        row_i[j] -= factor * row_k[j]
        self._lu = lu
        self._perm = perm

    def solve(self, rhs: Sequence[Scalar]) -> Vector:
        if self.size == 0:
            return ()
        if not self.arith.is_exact:
            out = scipy.linalg.lu_solve((self._lu, self._piv), np.array(rhs, dtype=float), check_finite=False)
            return tuple(float(a) for a in out)
        m, lu = self.size, self._lu
        z = [rhs[self._perm[i]] for i in range(m)]
        for i in range(m):
            row = lu[i]
            for j in range(i):
                if row[j]:
                    z[i] -= row[j] * z[j]
        for i in range(m - 1, -1, -1):
            row = lu[i]
            for j in range(i + 1, m):
                if row[j]:
                    z[i] -= row[j] * z[j]
            z[i] = z[i] / row[i]
        return tuple(z)

    def solve_transpose(self, rhs: Sequence[Scalar]) -> Vector:
        if self.size == 0:
            return ()
        if not self.arith.is_exact:
            out = scipy.linalg.lu_solve((self._lu, self._piv), np.array(rhs, dtype=float), trans=1, check_finite=False)
            return tuple(float(a) for a in out)
        m, lu = self.size, self._lu
        # Uᵀ z = rhs
        z = list(rhs)
        for i in range(m):
            for j in range(i):
                if lu[j][i]:
                    z[i] -= lu[j][i] * z[j]
            z[i] = z[i] / lu[i][i]
        # Lᵀ q = z
        for i in range(m - 1, -1, -1):
            for j in range(i + 1, m):
                if lu[j][i]:
                    z[i] -= lu[j][i] * z[j]
        y = [None] * m
        for i in range(m):
            y[self._perm[i]] = z[i]
        return tuple(y)


def solve_square(arith: Arith, rows: Sequence[Sequence[Scalar]], rhs: Sequence[Scalar]) -> Vector:
    return LUFactor(arith, rows).solve(rhs)
