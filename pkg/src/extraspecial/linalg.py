"""Dense exact linear algebra over F_p for small primes.

Matrices are numpy integer arrays with entries in [0, p).  Elimination is
blocked: a narrow column panel is reduced with vectorised row operations and
the trailing columns are updated with a single float32 matrix product per
panel.  For p <= 7 every intermediate value stays far below 2**24, so the
float products are exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PANEL = 128


def _inverses(p: int) -> np.ndarray:
    inv = np.zeros(p, dtype=np.int64)
    for a in range(1, p):
        inv[a] = pow(a, p - 2, p)
    return inv


def _small_inverse(M: np.ndarray, p: int, inv: np.ndarray) -> np.ndarray:
    k = M.shape[0]
    aug = np.concatenate([M % p, np.eye(k, dtype=np.int64)], axis=1)
    for j in range(k):
        i = j + np.flatnonzero(aug[j:, j])[0]
        if i != j:
            aug[[i, j]] = aug[[j, i]]
        aug[j] = (aug[j] * inv[aug[j, j]]) % p
        hit = np.flatnonzero(aug[:, j])
        hit = hit[hit != j]
        if hit.size:
            aug[hit] = (aug[hit] - np.outer(aug[hit, j], aug[j])) % p
    return aug[:, k:]


def _reduce(z: np.ndarray, p: int, offset: float) -> None:
    """In-place z <- (z + offset) mod p for float32 integers with 0 <= z + offset < 2**14."""
    z += offset
    q = z * np.float32(1.0 / p)
    q += np.float32(1e-3)
    np.floor(q, out=q)
    q *= np.float32(p)
    z -= q


def _naive_pivots(work: np.ndarray, p: int, inv: np.ndarray):
    """Greedy Gauss-Jordan pivot search on a narrow integer panel (modified in place)."""
    free = np.ones(work.shape[0], dtype=bool)
    rows, cols = [], []
    for j in range(work.shape[1]):
        cand = np.flatnonzero(free & (work[:, j] != 0))
        if cand.size == 0:
            continue
        i = cand[0]
        free[i] = False
        rows.append(int(i))
        cols.append(j)
        work[i] = (work[i] * inv[work[i, j]]) % p
        hit = np.flatnonzero(work[:, j])
        hit = hit[hit != i]
        if hit.size:
            work[hit] = (work[hit] - np.outer(work[hit, j], work[i])) % p
    return rows, cols


def _eliminate(W: np.ndarray, p: int, panel: int, inv: np.ndarray):
    """In-place Gauss-Jordan elimination of a float32 matrix.

    Returns (order, pivots): the row that received each pivot and its column,
    in increasing column order.
    """
    m, n = W.shape
    offset = float(p * (panel * (p - 1) ** 2 // p + 1))
    done = np.zeros(m, dtype=bool)
    order: list[int] = []
    pivots: list[int] = []
    c0 = 0
    while c0 < n and len(order) < m:
        c1 = min(n, c0 + panel)
        live = np.flatnonzero(~done)
        live = live[np.any(W[live, c0:c1] != 0, axis=1)]
        if live.size:
            if panel > 8:
                prow, pcol = _eliminate(W[live, c0:c1], p, max(8, panel // 8), inv)
            else:
                prow, pcol = _naive_pivots(W[live, c0:c1].astype(np.int64), p, inv)
            src = live[prow]
            jcols = c0 + np.asarray(pcol)
            Minv = _small_inverse(W[np.ix_(src, jcols)].astype(np.int64), p, inv)
            piv = Minv.astype(np.float32) @ W[src, c0:]
            _reduce(piv, p, 0.0)
            coef = W[:, jcols]
            coef[src] = 0
            hit = np.flatnonzero(np.any(coef != 0, axis=1))
            if hit.size == m - len(src):
                tail = W[:, c0:]
                tail -= coef @ piv
                _reduce(tail, p, offset)
            elif hit.size:
                tail = W[hit, c0:]
                tail -= coef[hit] @ piv
                _reduce(tail, p, offset)
                W[hit, c0:] = tail
            W[src, c0:] = piv
            done[src] = True
            order.extend(int(i) for i in src)
            pivots.extend(int(c) for c in jcols)
        c0 = c1
    return order, pivots


def rref(A, p: int, *, panel: int = PANEL):
    """Reduced row-echelon form of A over F_p.

    Returns (R, pivots) where R has the same shape as A (zero rows last) and
    pivots lists the pivot column of each nonzero row of R.
    """
    A = np.asarray(A)
    m, n = A.shape
    if 2 * panel * (p - 1) ** 2 + 2 * p >= 1 << 14 or p > 500:
        raise ValueError("modulus or panel too large for exact float32 updates")
    W = np.mod(A, p).astype(np.float32)
    order, pivots = _eliminate(W, p, panel, _inverses(p))
    R = np.zeros((m, n), dtype=np.int64)
    if order:
        R[:len(order)] = W[order]
    return R, pivots


def rank(A, p: int) -> int:
    A = np.asarray(A)
    if A.size == 0:
        return 0
    return len(rref(A, p)[1])


def nullspace(A, p: int) -> np.ndarray:
    """Basis of {x : A x = 0} as the rows of the returned array."""
    A = np.asarray(A)
    n = A.shape[1]
    if A.shape[0] == 0:
        return np.eye(n, dtype=np.int64)
    R, piv = rref(A, p)
    return _kernel_from_rref(R, piv, n, p)


def _kernel_from_rref(R, piv, n, p):
    free = np.setdiff1d(np.arange(n), piv)
    K = np.zeros((free.size, n), dtype=np.int64)
    if free.size:
        K[np.arange(free.size), free] = 1
        if piv:
            K[:, piv] = np.mod(-R[:len(piv)][:, free].T, p)
    return K


@dataclass
class Solution:
    """A consistent linear system: one particular solution plus the kernel."""

    x: np.ndarray
    kernel: np.ndarray | None = None
    rank: int = 0

    consistent = True


@dataclass
class Unsat:
    """An inconsistent system with a left-null certificate v (v A = 0, v b != 0)."""

    certificate: np.ndarray
    rank: int = 0

    consistent = False


def graded_solve(A, b, p: int, *, kernel: bool = True, certificate: bool = True):
    """Solve A x = b over F_p.

    Free variables are set to zero, so the particular solution is supported on
    the pivot columns; callers control which solution they get by ordering the
    columns.  On inconsistency an Unsat carrying a certificate is returned.
    """
    A = np.mod(np.asarray(A, dtype=np.int64), p)
    b = np.mod(np.asarray(b, dtype=np.int64).reshape(-1), p)
    m, n = A.shape
    if b.shape[0] != m:
        raise ValueError(f"dimension mismatch: A is {m}x{n}, b has {b.shape[0]} rows")
    R, piv = rref(np.concatenate([A, b[:, None]], axis=1), p)
    if piv and piv[-1] == n:
        rk = len(piv) - 1
        cert = np.zeros(m, dtype=np.int64)
        if certificate:
            cert = left_certificate(A, b, p)
        return Unsat(cert, rk)
    x = np.zeros(n, dtype=np.int64)
    if piv:
        x[piv] = R[:len(piv), n]
    K = _kernel_from_rref(R[:, :n], piv, n, p) if kernel else None
    return Solution(x, K, len(piv))


def left_certificate(A, b, p: int) -> np.ndarray:
    """A vector v with v A = 0 and v b = 1, assuming b is not in the column space."""
    A = np.asarray(A, dtype=np.int64)
    m, n = A.shape
    M = np.concatenate([A, np.asarray(b, dtype=np.int64).reshape(-1, 1)], axis=1).T
    rhs = np.zeros(n + 1, dtype=np.int64)
    rhs[n] = 1
    sol = graded_solve(M, rhs, p, kernel=False, certificate=False)
    if not sol.consistent:
        raise ArithmeticError("no certificate: the system is consistent")
    return sol.x


def matmul(A, B, p: int) -> np.ndarray:
    """Exact product mod p, chunking the inner dimension to stay exact in float64."""
    A = np.asarray(A)
    B = np.asarray(B)
    inner = A.shape[-1]
    step = max(1, (1 << 52) // max(1, (p - 1) ** 2) - 1)
    if inner <= step:
        out = A.astype(np.float64) @ B.astype(np.float64)
        return np.mod(out, p).astype(np.int64)
    out = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
    for s in range(0, inner, step):
        part = A[:, s:s + step].astype(np.float64) @ B[s:s + step].astype(np.float64)
        out = (out + np.mod(part, p).astype(np.int64)) % p
    return out
