"""Dense two-phase primal simplex (Bland's rule) and depth-first branch and bound.

Variables are implicitly nonnegative.  Problems here are small (tens of
variables), so the tableau is kept dense and rebuilt per branch-and-bound node.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .core import StructuralError

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-7
INT_TOL = 1e-6
DEFAULT_NODE_BUDGET = 10**6
DEFAULT_ITERATION_LIMIT = 50_000

SENSES = ("<=", ">=", "=")


class Status(str, Enum):
    OPTIMAL = "optimal"
    UNBOUNDED = "unbounded"
    INFEASIBLE = "infeasible"
    BUDGET_EXCEEDED = "budget_exceeded"
    ITERATION_LIMIT = "iteration_limit"


@dataclass
class LinearProgram:
    c: np.ndarray
    A: np.ndarray
    senses: tuple[str, ...]
    b: np.ndarray
    maximize: bool = True
    integer: np.ndarray | None = None

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).ravel()
        k = self.c.size
        A = np.asarray(self.A, dtype=float)
        if A.size == 0:
            A = A.reshape(0, k)
        if A.ndim != 2 or A.shape[1] != k:
            raise StructuralError(f"constraint matrix must have {k} columns, got shape {A.shape}")
        self.A = A
        self.b = np.asarray(self.b, dtype=float).ravel()
        if self.b.size != A.shape[0]:
            raise StructuralError("one right-hand side per constraint row is required")
        if not np.all(np.isfinite(self.b)):
            raise StructuralError("right-hand sides must be finite")
        self.senses = tuple(self.senses)
        if len(self.senses) != A.shape[0] or any(s not in SENSES for s in self.senses):
            raise StructuralError(f"one sense from {SENSES} per row is required")
        if self.integer is None:
            self.integer = np.zeros(k, dtype=bool)
        else:
            self.integer = np.asarray(self.integer, dtype=bool).ravel()
            if self.integer.size != k:
                raise StructuralError("integrality flags must match the variable count")

    @property
    def num_vars(self) -> int:
        return self.c.size

    def with_rows(self, rows: Sequence[tuple[np.ndarray, str, float]]) -> "LinearProgram":
        if not rows:
            return self
        A = np.vstack([self.A] + [np.asarray(r, dtype=float)[None, :] for r, _, _ in rows])
        senses = self.senses + tuple(s for _, s, _ in rows)
        b = np.concatenate([self.b, [v for _, _, v in rows]])
        return LinearProgram(self.c, A, senses, b, self.maximize, self.integer)

    def relaxation(self) -> "LinearProgram":
        return LinearProgram(self.c, self.A, self.senses, self.b, self.maximize, None)

    def objective(self, x) -> float:
        return float(self.c @ np.asarray(x, dtype=float))

    def is_feasible(self, x, tol: float = FEAS_TOL) -> bool:
        x = np.asarray(x, dtype=float)
        if np.any(x < -tol):
            return False
        lhs = self.A @ x
        for v, s, rhs in zip(lhs, self.senses, self.b):
            scale = max(1.0, abs(rhs))
            if s == "<=" and v > rhs + tol * scale:
                return False
            if s == ">=" and v < rhs - tol * scale:
                return False
            if s == "=" and abs(v - rhs) > tol * scale:
                return False
        return True


@dataclass
class LPSolution:
    status: Status
    objective: float = math.nan
    x: np.ndarray | None = None
    ray: np.ndarray | None = None
    iterations: int = 0
    nodes: int = 0
    bases: list[tuple[int, ...]] | None = field(default=None, repr=False)

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


class _Tableau:
    def __init__(self, T: np.ndarray, basis: list[int], trace: bool):
        self.T = T
        self.basis = basis
        self.iterations = 0
        self.bases: list[tuple[int, ...]] | None = [] if trace else None

    def pivot(self, row: int, col: int) -> None:
        T = self.T
        T[row] /= T[row, col]
        others = np.abs(T[:, col]) > 0
        others[row] = False
        T[others] -= np.outer(T[others, col], T[row])
        self.basis[row] = col
        self.iterations += 1
        if self.bases is not None:
            self.bases.append(tuple(sorted(self.basis)))

    def optimize(self, cost: np.ndarray, allowed: np.ndarray, limit: int) -> tuple[str, int]:
        """Maximize ``cost . x`` with Bland's rule; returns (outcome, entering column)."""
        T = self.T
        while True:
            if self.iterations >= limit:
                return "limit", -1
            reduced = cost - cost[self.basis] @ T[:, :-1]
            candidates = np.flatnonzero((reduced > PIVOT_TOL) & allowed)
            if candidates.size == 0:
                return "optimal", -1
            col = int(candidates[0])
            column = T[:, col]
            rows = np.flatnonzero(column > PIVOT_TOL)
            if rows.size == 0:
                return "unbounded", col
            ratios = T[rows, -1] / column[rows]
            best = ratios.min()
            ties = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
            row = int(min(ties, key=lambda r: self.basis[r]))
            self.pivot(row, col)


def simplex_solve(lp: LinearProgram, iteration_limit: int = DEFAULT_ITERATION_LIMIT,
                  trace: bool = False) -> LPSolution:
    """Solve the continuous relaxation of ``lp``; integrality flags are ignored.

    Returns an optimal vertex, an unbounded status with an improving ray over
    the original variables, or infeasibility detected by phase 1.
    """
    k = lp.num_vars
    A, b = lp.A.copy(), lp.b.copy()
    senses = list(lp.senses)
    for i in range(len(b)):
        if b[i] < 0:
            A[i], b[i] = -A[i], -b[i]
            senses[i] = {"<=": ">=", ">=": "<=", "=": "="}[senses[i]]
    m = len(b)
    n_slack = sum(s != "=" for s in senses)
    n_art = sum(s != "<=" for s in senses)
    width = k + n_slack + n_art
    T = np.zeros((m, width + 1))
    T[:, :k] = A
    T[:, -1] = b
    basis = [0] * m
    artificial = np.zeros(width, dtype=bool)
    s_col, a_col = k, k + n_slack
    for i, s in enumerate(senses):
        if s == "<=":
            T[i, s_col] = 1.0
            basis[i] = s_col
            s_col += 1
        else:
            if s == ">=":
                T[i, s_col] = -1.0
                s_col += 1
            T[i, a_col] = 1.0
            basis[i] = a_col
            artificial[a_col] = True
            a_col += 1
    tab = _Tableau(T, basis, trace)

    if n_art:
        phase1 = np.where(artificial, -1.0, 0.0)
        outcome, _ = tab.optimize(phase1, np.ones(width, dtype=bool), iteration_limit)
        if outcome == "limit":
            return LPSolution(Status.ITERATION_LIMIT, iterations=tab.iterations, bases=tab.bases)
        infeas = float(-phase1[tab.basis] @ tab.T[:, -1])
        if infeas > FEAS_TOL * max(1.0, float(np.abs(b).max(initial=0.0))):
            return LPSolution(Status.INFEASIBLE, iterations=tab.iterations, bases=tab.bases)
        # drive artificials out of the basis; rows that cannot pivot are redundant
        keep = []
        for i in range(len(tab.basis)):
            if artificial[tab.basis[i]]:
                cand = np.flatnonzero((np.abs(tab.T[i, :-1]) > PIVOT_TOL) & ~artificial)
                if cand.size:
                    tab.pivot(i, int(cand[0]))
                    keep.append(i)
            else:
                keep.append(i)
        if len(keep) < len(tab.basis):
            tab.T = tab.T[keep]
            tab.basis = [tab.basis[i] for i in keep]

    cost = np.zeros(width)
    cost[:k] = lp.c if lp.maximize else -lp.c
    outcome, col = tab.optimize(cost, ~artificial, iteration_limit)
    if outcome == "limit":
        return LPSolution(Status.ITERATION_LIMIT, iterations=tab.iterations, bases=tab.bases)
    x_full = np.zeros(width)
    for i, j in enumerate(tab.basis):
        x_full[j] = tab.T[i, -1]
    x = np.clip(x_full[:k], 0.0, None)
    if outcome == "unbounded":
        d = np.zeros(width)
        d[col] = 1.0
        for i, j in enumerate(tab.basis):
            d[j] = -tab.T[i, col]
        return LPSolution(Status.UNBOUNDED, math.inf if lp.maximize else -math.inf, x,
                          ray=d[:k], iterations=tab.iterations, bases=tab.bases)
    return LPSolution(Status.OPTIMAL, lp.objective(x), x, iterations=tab.iterations,
                      bases=tab.bases)


def _improves(value: float, incumbent: float | None, maximize: bool, tol: float) -> bool:
    if incumbent is None:
        return True
    return value > incumbent + tol if maximize else value < incumbent - tol


def bnb_solve(lp: LinearProgram, node_budget: int = DEFAULT_NODE_BUDGET,
              int_tol: float = INT_TOL,
              iteration_limit: int = DEFAULT_ITERATION_LIMIT) -> LPSolution:
    """Depth-first branch and bound on the most fractional integer variable.

    Exhausting ``node_budget`` yields ``BUDGET_EXCEEDED`` carrying the best
    incumbent found so far, never a claimed optimum.
    """
    if not lp.integer.any():
        return simplex_solve(lp, iteration_limit)
    unit = np.eye(lp.num_vars)
    incumbent: LPSolution | None = None
    stack: list[tuple[tuple[int, str, float], ...]] = [()]
    nodes = 0
    iterations = 0
    while stack:
        bounds = stack.pop()
        nodes += 1
        if nodes > node_budget:
            best = incumbent or LPSolution(Status.BUDGET_EXCEEDED)
            return LPSolution(Status.BUDGET_EXCEEDED, best.objective, best.x,
                              iterations=iterations, nodes=nodes - 1)
        node_lp = lp.with_rows([(unit[j], s, v) for j, s, v in bounds]).relaxation()
        sol = simplex_solve(node_lp, iteration_limit)
        iterations += sol.iterations
        if sol.status is Status.INFEASIBLE:
            continue
        if sol.status is Status.UNBOUNDED:
            return LPSolution(Status.UNBOUNDED, sol.objective, sol.x, ray=sol.ray,
                              iterations=iterations, nodes=nodes)
        if sol.status is not Status.OPTIMAL:
            return LPSolution(sol.status, iterations=iterations, nodes=nodes)
        tol = 1e-9 * max(1.0, abs(sol.objective))
        if incumbent is not None and not _improves(sol.objective, incumbent.objective,
                                                   lp.maximize, tol):
            continue
        x = sol.x
        frac = np.abs(x - np.round(x))
        frac[~lp.integer] = 0.0
        j = int(np.argmax(frac))
        if frac[j] <= int_tol:
            xi = x.copy()
            xi[lp.integer] = np.round(xi[lp.integer])
            incumbent = LPSolution(Status.OPTIMAL, lp.objective(xi), xi)
            continue
        lo, hi = math.floor(x[j]), math.ceil(x[j])
        down = bounds + ((j, "<=", float(lo)),)
        up = bounds + ((j, ">=", float(hi)),)
        # explore the nearer rounding first
        if x[j] - lo < 0.5:
            stack.extend([up, down])
        else:
            stack.extend([down, up])
    if incumbent is None:
        return LPSolution(Status.INFEASIBLE, iterations=iterations, nodes=nodes)
    incumbent.iterations, incumbent.nodes = iterations, nodes
    return incumbent


def solve(lp: LinearProgram, node_budget: int = DEFAULT_NODE_BUDGET) -> LPSolution:
    return bnb_solve(lp, node_budget) if lp.integer.any() else simplex_solve(lp)


def dual_bound(lp: LinearProgram) -> float:
    """Objective of the continuous relaxation.

    It is an upper bound on the integer optimum when maximizing and a lower
    bound when minimizing; an unbounded relaxation gives ``+-inf`` and an
    infeasible one the value of an empty optimization (``-inf`` / ``+inf``).
    """
    sol = simplex_solve(lp.relaxation())
    if sol.status is Status.INFEASIBLE:
        return -math.inf if lp.maximize else math.inf
    if sol.status is not Status.OPTIMAL and sol.status is not Status.UNBOUNDED:
        raise RuntimeError(f"relaxation did not finish: {sol.status.value}")
    return sol.objective


def lexmin_solve(lp: LinearProgram, value: float, node_budget: int = DEFAULT_NODE_BUDGET,
                 tol: float = 1e-9) -> LPSolution:
    """Lexicographically smallest optimal solution, given the optimal ``value``.

    Each variable in turn is minimized over the optimal face (the objective
    row carries a relative slack ``tol``) and then fixed; values within the
    slack of an integer are snapped to it.  The last variable is recovered
    by re-optimizing the objective, so the result is optimal, not merely
    within the slack.
    """
    slack = tol * max(1.0, abs(value))
    rows = [(lp.c, ">=" if lp.maximize else "<=", value - slack if lp.maximize else value + slack)]
    unit = np.eye(lp.num_vars)
    fixed: list[tuple[np.ndarray, str, float]] = []
    for j in range(lp.num_vars - 1):
        sub = LinearProgram(unit[j], lp.A, lp.senses, lp.b, False, lp.integer)
        sol = solve(sub.with_rows(rows + fixed), node_budget)
        if not sol.optimal:
            return solve(lp, node_budget)
        v = float(sol.x[j])
        if lp.integer[j] or abs(v - round(v)) <= 10 * slack:
            v = float(round(v))
        fixed.append((unit[j], "=", v))
    sol = solve(lp.with_rows(fixed), node_budget)
    if not sol.optimal or abs(sol.objective - value) > slack:
        return solve(lp, node_budget)
    return sol
