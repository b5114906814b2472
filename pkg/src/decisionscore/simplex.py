"""Dense two-phase simplex for the tiny LPs that arise in knapsack separation.

Problems have the form

    minimize    c @ x
    subject to  A_ub @ x <= b_ub
                A_lb @ x >= b_lb
                x >= 0

with at most a few dozen rows and columns. Bland's rule guards against cycling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

EPS = 1e-10


@dataclass
class LPResult:
    status: str  # "optimal", "infeasible" or "unbounded"
    x: np.ndarray | None
    objective: float | None


def _pivot(T: np.ndarray, basis: list[int], row: int, col: int) -> None:
    T[row] /= T[row, col]
    for r in range(T.shape[0]):
        if r != row and T[r, col] != 0.0:
            T[r] -= T[r, col] * T[row]
    basis[row] = col


def _run(T: np.ndarray, basis: list[int], allowed: int) -> str:
    """Minimize the objective held in the last row of ``T`` (reduced costs)."""
    m = T.shape[0] - 1
    for _ in range(50_000):
        obj = T[-1, :allowed]
        entering = next((j for j in range(allowed) if obj[j] < -EPS), None)
        if entering is None:
            return "optimal"
        col = T[:m, entering]
        best, leave = None, None
        for r in range(m):
            if col[r] > EPS:
                ratio = T[r, -1] / col[r]
                if best is None or ratio < best - EPS or (
                    abs(ratio - best) <= EPS and basis[r] < basis[leave]
                ):
                    best, leave = ratio, r
        if leave is None:
            return "unbounded"
        _pivot(T, basis, leave, entering)
    raise RuntimeError("simplex iteration limit reached")


def solve_lp(
    c: np.ndarray | None,
    A_ub: np.ndarray | None = None,
    b_ub: np.ndarray | None = None,
    A_lb: np.ndarray | None = None,
    b_lb: np.ndarray | None = None,
    n: int | None = None,
) -> LPResult:
    """Solve the LP above. ``c=None`` asks only for a feasible point."""
    blocks, rhs, senses = [], [], []
    if A_ub is not None and len(A_ub):
        blocks.append(np.atleast_2d(np.asarray(A_ub, float)))
        rhs.append(np.asarray(b_ub, float))
        senses += [1] * len(rhs[-1])
    if A_lb is not None and len(A_lb):
        blocks.append(np.atleast_2d(np.asarray(A_lb, float)))
        rhs.append(np.asarray(b_lb, float))
        senses += [-1] * len(rhs[-1])
    if n is None:
        n = blocks[0].shape[1] if blocks else len(c)
    if not blocks:
        x = np.zeros(n)
        if c is not None and np.any(np.asarray(c) < 0):
            return LPResult("unbounded", None, None)
        return LPResult("optimal", x, 0.0)

    A = np.vstack(blocks)
    b = np.concatenate(rhs)
    m = A.shape[0]
    # Columns: x (n) | slack/surplus (m) | artificial (m) | rhs.
    T = np.zeros((m + 1, n + 2 * m + 1))
    T[:m, :n] = A
    T[:m, n : n + m] = np.diag(senses)
    T[:m, -1] = b
    neg = T[:m, -1] < 0
    T[:m][neg] *= -1
    T[:m, n + m : n + 2 * m] = np.eye(m)
    basis = list(range(n + m, n + 2 * m))

    # Phase 1: minimize the sum of artificials.
    T[-1, :] = -T[:m, :].sum(axis=0)
    T[-1, n + m : n + 2 * m] = 0.0
    _run(T, basis, n + 2 * m)
    if -T[-1, -1] > 1e-9 * max(1.0, np.abs(b).max()):
        return LPResult("infeasible", None, None)

    # Drive remaining artificials out of the basis where possible.
    for r in range(m):
        if basis[r] >= n + m:
            col = next((j for j in range(n + m) if abs(T[r, j]) > EPS), None)
            if col is not None:
                _pivot(T, basis, r, col)

    x = np.zeros(n)
    if c is None:
        for r, j in enumerate(basis):
            if j < n:
                x[j] = T[r, -1]
        return LPResult("optimal", np.maximum(x, 0.0), None)

    # Phase 2 over original and slack columns; artificial columns are frozen out.
    T[-1, :] = 0.0
    T[-1, :n] = np.asarray(c, float)
    for r, j in enumerate(basis):
        if T[-1, j] != 0.0:
            T[-1] -= T[-1, j] * T[r]
    status = _run(T, basis, n + m)
    if status == "unbounded":
        return LPResult("unbounded", None, None)
    for r, j in enumerate(basis):
        if j < n:
            x[j] = T[r, -1]
    x = np.maximum(x, 0.0)
    return LPResult("optimal", x, float(np.dot(c, x)))
