import itertools

import numpy as np
import pytest
from scipy.optimize import linprog

from decompint.classical import _indicator_lp
from decompint.core import StructuralError
from decompint.lpsolve import (
    LinearProgram, Status, bnb_solve, dual_bound, lexmin_solve, simplex_solve, solve,
)

import reference

OFFERS = np.array(reference.OFFERS, dtype=float)
PRICES = np.array(reference.PRICES)


def fastfood(demand, integer=True):
    return LinearProgram(PRICES, OFFERS.T, (">=",) * 3, demand, maximize=False,
                         integer=[integer] * len(PRICES))


def test_trivial_bounded_and_unbounded():
    sol = simplex_solve(LinearProgram([1], [[1]], ["<="], [3]))
    assert sol.optimal and sol.objective == 3
    sol = simplex_solve(LinearProgram([1], np.zeros((0, 1)), [], []))
    assert sol.status is Status.UNBOUNDED
    assert sol.ray is not None and sol.ray[0] > 0


def test_infeasible_detected_in_phase_one():
    lp = LinearProgram([1, 1], [[1, 1], [1, 1]], ["<=", ">="], [1, 2])
    assert simplex_solve(lp).status is Status.INFEASIBLE


def test_dimension_mismatch():
    with pytest.raises(StructuralError):
        LinearProgram([1, 2], [[1, 2, 3]], ["<="], [1])
    with pytest.raises(StructuralError):
        LinearProgram([1], [[1]], ["<"], [1])


def test_concave_lp_for_workers_capacity():
    sol = simplex_solve(_indicator_lp(reference.workers_capacity(), np.ones(4), True))
    assert sol.optimal
    assert sol.objective == pytest.approx(4.6, abs=1e-9)


def test_fastfood_ilp_reference_demand():
    sol = bnb_solve(fastfood([50, 30, 60]))
    assert sol.optimal
    assert sol.objective == pytest.approx(205, abs=1e-9)
    assert np.allclose(sol.x, np.round(sol.x))
    assert np.all(OFFERS.T @ sol.x >= [50, 30, 60])


def test_fastfood_ilp_small_demand():
    # 54.1 is the value found by exhaustive enumeration over all multisets of offers
    sol = bnb_solve(fastfood([19, 10, 10]))
    assert sol.objective == pytest.approx(54.1, abs=1e-9)
    assert bnb_solve(fastfood([0, 0, 0])).objective == 0


def test_dual_bounds():
    assert dual_bound(fastfood([50, 30, 60])) <= 205 + 1e-9
    assert dual_bound(fastfood([19, 10, 10])) == pytest.approx(53.75)
    knap = LinearProgram([3, 4], [[3, 4], [1, 0], [0, 1]], ["<="] * 3, [6, 1, 1],
                         integer=[True, True])
    assert dual_bound(knap) >= bnb_solve(knap).objective == 4
    lp = LinearProgram([1], [[1]], ["<="], [3], integer=[True])
    assert dual_bound(lp) == bnb_solve(lp).objective


def test_budget_exceeded_is_reported():
    lp = fastfood([19, 10, 10])
    sol = bnb_solve(lp, node_budget=2)
    assert sol.status is Status.BUDGET_EXCEEDED


def test_lexmin_picks_smallest_vector():
    lp = LinearProgram([1, 1], [[1, 1]], ["<="], [2])
    sol = lexmin_solve(lp, 2.0)
    assert sol.x.tolist() == [0.0, 2.0]


def _random_lp(rng, k, m):
    A = rng.integers(0, 5, (m, k)).astype(float)
    b = rng.integers(1, 12, m).astype(float)
    c = rng.integers(-3, 6, k).astype(float)
    return c, A, b


@pytest.mark.parametrize("seed", range(30))
def test_simplex_matches_scipy_and_resubstitutes(seed):
    rng = np.random.default_rng(seed)
    k, m = int(rng.integers(1, 6)), int(rng.integers(1, 5))
    c, A, b = _random_lp(rng, k, m)
    A = np.vstack([A, np.eye(k)])
    b = np.concatenate([b, np.full(k, 10.0)])
    sol = simplex_solve(LinearProgram(c, A, ["<="] * len(b), b), trace=True)
    ref = linprog(-c, A_ub=A, b_ub=b, method="highs")
    assert sol.optimal
    assert sol.objective == pytest.approx(-ref.fun, abs=1e-7)
    assert float(c @ sol.x) == pytest.approx(sol.objective, abs=1e-7)
    assert len(sol.bases) == len(set(sol.bases)), "a basis repeated"


@pytest.mark.parametrize("seed", range(30))
def test_bnb_matches_enumeration(seed):
    rng = np.random.default_rng(100 + seed)
    k, m = int(rng.integers(1, 7)), int(rng.integers(1, 4))
    c, A, b = _random_lp(rng, k, m)
    caps = rng.integers(1, 11, k)
    maximize = bool(rng.integers(0, 2))
    senses = ["<="] * m if maximize else [">="] * m
    lp = LinearProgram(c if maximize else np.abs(c), A, senses, b, maximize, [True] * k)
    lp = lp.with_rows([(np.eye(k)[j], "<=", float(caps[j])) for j in range(k)])
    best = None
    for x in itertools.product(*(range(int(t) + 1) for t in caps)):
        if lp.is_feasible(x):
            v = lp.objective(x)
            if best is None or (v > best if maximize else v < best):
                best = v
    sol = solve(lp)
    if best is None:
        assert sol.status is Status.INFEASIBLE
    else:
        assert sol.optimal
        assert sol.objective == pytest.approx(best, abs=1e-7)
        assert lp.is_feasible(sol.x)
