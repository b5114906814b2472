import numpy as np
import pytest
from scipy.optimize import linprog

from decisionscore.simplex import solve_lp


def test_feasible_point_satisfies_constraints():
    A_ub = np.array([[1.0, 1.0, 0.0], [0.0, 1.0, 1.0]])
    A_lb = np.array([[1.0, 0.0, 1.0]])
    res = solve_lp(None, A_ub, np.ones(2), A_lb, np.array([1.5]))
    assert res.status == "optimal"
    x = res.x
    assert np.all(A_ub @ x <= 1 + 1e-9)
    assert A_lb @ x >= 1.5 - 1e-9
    assert np.all(x >= 0)


def test_infeasible_detected():
    # x0 + x1 <= 1, x2 + x3 <= 1, but the four cross pairs must each exceed 1.
    A_ub = np.array([[1, 1, 0, 0], [0, 0, 1, 1]], float)
    A_lb = np.array([[1, 0, 1, 0], [1, 0, 0, 1], [0, 1, 1, 0], [0, 1, 0, 1]], float)
    res = solve_lp(None, A_ub, np.ones(2), A_lb, np.full(4, 1 + 1e-6))
    assert res.status == "infeasible"


@pytest.mark.parametrize("seed", range(40))
def test_matches_scipy_on_random_lps(seed):
    rng = np.random.default_rng(seed)
    n, m_ub, m_lb = rng.integers(2, 6), rng.integers(1, 4), rng.integers(0, 4)
    A_ub = rng.integers(0, 3, size=(m_ub, n)).astype(float)
    b_ub = rng.uniform(0.5, 3, size=m_ub)
    A_lb = rng.integers(0, 3, size=(m_lb, n)).astype(float)
    b_lb = rng.uniform(0.1, 2, size=m_lb)
    c = rng.uniform(-1, 1, size=n)
    ref = linprog(
        c,
        A_ub=np.vstack([A_ub, -A_lb]) if m_lb else A_ub,
        b_ub=np.concatenate([b_ub, -b_lb]) if m_lb else b_ub,
        bounds=[(0, None)] * n,
        method="highs",
    )
    res = solve_lp(c, A_ub, b_ub, A_lb if m_lb else None, b_lb if m_lb else None)
    if ref.status == 2:
        assert res.status == "infeasible"
    elif ref.status == 3:
        assert res.status == "unbounded"
    else:
        assert res.status == "optimal"
        assert res.objective == pytest.approx(ref.fun, abs=1e-8)
