"""Gaussian elimination over GF(2^w).

Pivoting is first-nonzero, lowest row index wins, so results are fully
deterministic.
"""

from __future__ import annotations

import numpy as np

from .errors import InconsistentSystem
from .gf import GF


def rref(gf: GF, A) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and the pivot column of each pivot row."""
    R = np.array(A, dtype=np.int64, copy=True)
    if R.ndim != 2:
        raise ValueError("rref expects a matrix")
    rows, cols = R.shape
    pivots: list[int] = []
    r = 0
    for col in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(R[r:, col])
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            R[[r, p]] = R[[p, r]]
        R[r] = gf.vmul(R[r], gf.inv(int(R[r, col])))
        factors = R[:, col].copy()
        factors[r] = 0
        hit = np.flatnonzero(factors)
        if hit.size:
            R[hit] ^= gf.vmul(factors[hit, None], R[r][None, :])
        pivots.append(col)
        r += 1
    return R, pivots


def rank(gf: GF, A) -> int:
    A = np.asarray(A)
    if A.size == 0:
        return 0
    return len(rref(gf, A)[1])


def solve(gf: GF, A, b) -> np.ndarray:
    """Unique solution of ``A x = b``.

    Raises ``InconsistentSystem`` when no solution exists and ``ValueError``
    when the solution is not unique.
    """
    A = np.asarray(A, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    rows, cols = A.shape
    if cols == 0:
        if np.any(b):
            raise InconsistentSystem("nonzero right-hand side with no unknowns")
        return np.zeros(0, dtype=np.int64)
    aug = np.concatenate([A, b[:, None]], axis=1)
    R, pivots = rref(gf, aug)
    if cols in pivots:
        raise InconsistentSystem("linear system has no solution")
    if len(pivots) < cols:
        raise ValueError("linear system is underdetermined")
    x = np.zeros(cols, dtype=np.int64)
    for r, c in enumerate(pivots):
        x[c] = R[r, cols]
    return x


def nullspace(gf: GF, A) -> np.ndarray:
    """Basis (as rows) of ``{x : A x = 0}``, in systematic form on the free columns."""
    A = np.asarray(A, dtype=np.int64)
    rows, cols = A.shape
    R, pivots = rref(gf, A)
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for r, p in enumerate(pivots):
            basis[i, p] = R[r, f]  # char 2: -x == x
    return basis


def inverse(gf: GF, A) -> np.ndarray:
    A = np.asarray(A, dtype=np.int64)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("inverse expects a square matrix")
    R, pivots = rref(gf, np.concatenate([A, np.eye(n, dtype=np.int64)], axis=1))
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise ValueError("matrix is singular")
    return R[:, n:]


def matmul(gf: GF, A, B) -> np.ndarray:
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    return np.bitwise_xor.reduce(gf.vmul(A[:, :, None], B[None, :, :]), axis=1)
