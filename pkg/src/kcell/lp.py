"""Dense tableau simplex for small linear programs.

Solves ``max c.x  s.t.  A x <= b`` with free ``x`` and ``b >= 0``, so the
origin is feasible and no phase one is needed. Pivoting uses Bland's rule,
which is slow but cannot cycle and is fully deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LP_TOL = 1e-9


class LPError(RuntimeError):
    pass


class Unbounded(LPError):
    pass


@dataclass
class LPResult:
    value: float
    x: np.ndarray
    pivots: int


def maximize(c, A, b, tol: float = LP_TOL, max_pivots: int = 10000) -> LPResult:
    c = np.asarray(c, dtype=float)
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float)
    m, d = A.shape
    if np.any(b < -tol):
        raise LPError("right-hand side must be nonnegative (origin feasible)")
    b = np.maximum(b, 0.0)
    n = 2 * d + m
    # columns: x+ (d), x- (d), slacks (m); last column is the right-hand side
    T = np.zeros((m + 1, n + 1))
    T[:m, :d] = A
    T[:m, d : 2 * d] = -A
    T[:m, 2 * d : n] = np.eye(m)
    T[:m, n] = b
    T[m, :d] = -c
    T[m, d : 2 * d] = c
    basis = np.arange(2 * d, n)
    pivots = 0
    while True:
        cand = np.flatnonzero(T[m, :n] < -tol)
        if len(cand) == 0:
            break
        j = int(cand[0])
        col = T[:m, j]
        pos = col > tol
        if not pos.any():
            raise Unbounded("objective is unbounded")
        ratios = np.full(m, np.inf)
        ratios[pos] = T[:m, n][pos] / col[pos]
        best = ratios.min()
        ties = np.flatnonzero(ratios <= best + tol * max(1.0, abs(best)))
        i = int(ties[np.argmin(basis[ties])])
        T[i] /= T[i, j]
        f = T[:, j].copy()
        f[i] = 0.0
        T -= np.outer(f, T[i])
        basis[i] = j
        pivots += 1
        if pivots > max_pivots:
            raise LPError("pivot limit exceeded")
    z = np.zeros(n)
    z[basis] = T[:m, n]
    x = z[:d] - z[d : 2 * d]
    return LPResult(float(c @ x), x, pivots)
