"""Dense Gaussian elimination over a field.

Works for :class:`~fractions.Fraction` (exact) and ``complex`` entries.  For
complex input the pivot is the entry of largest modulus and anything below
``tol`` counts as zero.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

NUMERIC_TOL = 1e-12


def _is_zero(x, tol: float) -> bool:
    if isinstance(x, Fraction) or isinstance(x, int):
        return x == 0
    return abs(x) <= tol


def _pivot_row(M, col: int, start: int, tol: float):
    best, best_abs = None, 0.0
    for r in range(start, len(M)):
        x = M[r][col]
        if _is_zero(x, tol):
            continue
        if isinstance(x, (Fraction, int)):
            return r
        if abs(x) > best_abs:
            best, best_abs = r, abs(x)
    return best


def rref(A: Sequence[Sequence], tol: float = NUMERIC_TOL):
    """Reduced row echelon form; returns ``(R, pivot_columns)``."""
    M = [list(row) for row in A]
    if not M:
        return M, []
    ncols = len(M[0])
    pivots = []
    r = 0
    for c in range(ncols):
        p = _pivot_row(M, c, r, tol)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = 1 / M[r][c] if not isinstance(M[r][c], int) else Fraction(1, M[r][c])
        M[r] = [x * inv for x in M[r]]
        for k in range(len(M)):
            if k != r and not _is_zero(M[k][c], tol):
                f = M[k][c]
                M[k] = [a - f * b for a, b in zip(M[k], M[r])]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return M, pivots


def rank(A, tol: float = NUMERIC_TOL) -> int:
    return len(rref(A, tol)[1])


def det(A, tol: float = NUMERIC_TOL):
    M = [list(row) for row in A]
    n = len(M)
    if any(len(row) != n for row in M):
        raise ValueError("determinant of a non-square matrix")
    result = Fraction(1)
    for c in range(n):
        p = _pivot_row(M, c, c, tol)
        if p is None:
            return Fraction(0) if all(isinstance(x, (Fraction, int)) for row in A for x in row) else 0j
        if p != c:
            M[c], M[p] = M[p], M[c]
            result = -result
        piv = M[c][c]
        result = result * piv
        for k in range(c + 1, n):
            if not _is_zero(M[k][c], tol):
                f = M[k][c] / piv
                M[k] = [a - f * b for a, b in zip(M[k], M[c])]
    return result


def solve(A, b, tol: float = NUMERIC_TOL) -> list:
    """Solve the square system ``A x = b``; raise ``ZeroDivisionError`` if singular."""
    n = len(A)
    aug = [list(row) + [bi] for row, bi in zip(A, b)]
    R, piv = rref(aug, tol)
    if piv[:n] != list(range(n)) or len(piv) > n and piv[n] == n:
        raise ZeroDivisionError("singular system")
    return [R[i][n] for i in range(n)]


def solve_affine(A, b, tol: float = NUMERIC_TOL):
    """General solution of ``A x = b``.

    Returns ``(particular, null_basis)`` or ``None`` when inconsistent.
    """
    if not A:
        return None
    ncols = len(A[0])
    aug = [list(row) + [bi] for row, bi in zip(A, b)]
    R, piv = rref(aug, tol)
    if ncols in piv:
        return None
    x = [Fraction(0)] * ncols
    for r, c in enumerate(piv):
        x[c] = R[r][ncols]
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for r, c in enumerate(piv):
            v[c] = -R[r][f]
        basis.append(v)
    return x, basis


def nullspace(A, tol: float = NUMERIC_TOL) -> list[list]:
    if not A:
        return []
    sol = solve_affine(A, [Fraction(0)] * len(A), tol)
    return sol[1] if sol else []
