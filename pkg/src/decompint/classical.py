"""Closed-form and polynomial evaluations of the named capacity integrals."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import EPS, Capacity, StructuralError, as_vector, indicator, validate_capacity
from .lpsolve import LinearProgram, simplex_solve


def _check(m: Capacity, x) -> np.ndarray:
    return as_vector(x, m.n)


def subset_minima(x: np.ndarray) -> np.ndarray:
    """``out[E] = min_{i in E} x_i`` for every mask (``inf`` for the empty set)."""
    n = x.size
    out = np.empty(1 << n)
    out[0] = math.inf
    for i in range(n):
        out[1 << i: 1 << (i + 1)] = np.minimum(out[: 1 << i], x[i])
    return out


def choquet_decomposition(m: Capacity, x) -> list[tuple[int, float]]:
    """Chain decomposition ``x = sum c_i 1_{E_i}`` along the sorted values of x."""
    x = _check(m, x)
    order = np.argsort(x, kind="stable")
    out, prev, level = [], 0.0, m.full
    for i in order:
        gap = float(x[i]) - prev
        if gap > 0:
            out.append((level, gap))
        prev = float(x[i])
        level &= ~(1 << int(i))
    return out


def choquet(m: Capacity, x) -> float:
    return sum(c * m[mask] for mask, c in choquet_decomposition(m, x))


def shilkret(m: Capacity, x) -> float:
    x = _check(m, x)
    mins = subset_minima(x)
    return float(np.max(m.values[1:] * mins[1:]))


def shilkret_set(m: Capacity, x) -> int:
    x = _check(m, x)
    mins = subset_minima(x)
    return int(np.argmax(m.values[1:] * mins[1:])) + 1


def sugeno(m: Capacity, x) -> float:
    """``max_E min(min_E x, m(E))``; no normalization of m is assumed."""
    x = _check(m, x)
    mins = subset_minima(x)
    return float(np.max(np.minimum(mins[1:], m.values[1:])))


def pan_partition(m: Capacity, x) -> tuple[float, list[int]]:
    """Best partition of N by subset DP; returns the value and the blocks (masks)."""
    x = _check(m, x)
    n = m.n
    if n > 16:
        raise StructuralError("PAN subset DP is limited to n <= 16")
    worth = m.values * np.where(np.isinf(subset_minima(x)), 0.0, subset_minima(x))
    f = np.zeros(1 << n)
    choice = np.zeros(1 << n, dtype=np.int64)
    for S in range(1, 1 << n):
        low = S & -S
        rest = S ^ low
        best, best_t = -1.0, low
        T = rest
        while True:
            block = T | low
            val = f[S ^ block] + worth[block]
            if val > best:
                best, best_t = val, block
            if T == 0:
                break
            T = (T - 1) & rest
        f[S] = best
        choice[S] = best_t
    blocks, S = [], m.full
    while S:
        blocks.append(int(choice[S]))
        S ^= int(choice[S])
    return float(f[m.full]), sorted(blocks)


def pan(m: Capacity, x) -> float:
    return pan_partition(m, x)[0]


def _indicator_lp(m: Capacity, x: np.ndarray, maximize: bool) -> LinearProgram:
    masks = range(1, 1 << m.n)
    A = np.array([indicator(E, 1.0, m.n) for E in masks]).T
    c = np.array([m[E] for E in masks])
    return LinearProgram(c, A, ("<=" if maximize else ">=",) * m.n, x, maximize=maximize)


def concave(m: Capacity, x) -> float:
    """``max sum a_E m(E)`` subject to ``sum a_E 1_E <= x``, ``a >= 0``."""
    x = _check(m, x)
    sol = simplex_solve(_indicator_lp(m, x, True))
    if not sol.optimal:
        raise RuntimeError(f"concave LP ended with status {sol.status.value}")
    return sol.objective


def convex(m: Capacity, x) -> float:
    """``min sum a_E m(E)`` subject to ``sum a_E 1_E >= x`` over nonempty E."""
    x = _check(m, x)
    sol = simplex_solve(_indicator_lp(m, x, False))
    if not sol.optimal:
        raise RuntimeError(f"convex LP ended with status {sol.status.value}")
    return sol.objective


@dataclass(frozen=True)
class LevelDependentCapacity:
    """Capacities that change with the level ``t``, piecewise constant.

    ``slices[j]`` applies on ``[breakpoints[j], breakpoints[j+1])``;
    ``tail``, when given, applies from the last breakpoint on.
    """

    breakpoints: tuple[float, ...]
    slices: tuple[Capacity, ...]
    tail: Capacity | None = None

    def __post_init__(self):
        bp = tuple(float(t) for t in self.breakpoints)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "slices", tuple(self.slices))
        if len(bp) < 2 or bp[0] != 0.0:
            raise StructuralError("breakpoints must start at 0 and contain at least two levels")
        if any(b <= a for a, b in zip(bp, bp[1:])):
            raise StructuralError("breakpoints must be strictly increasing")
        if len(self.slices) != len(bp) - 1:
            raise StructuralError("one capacity per interval between breakpoints is required")
        caps = list(self.slices) + ([self.tail] if self.tail is not None else [])
        if len({c.n for c in caps}) != 1:
            raise StructuralError("all slices must share the ground set")
        for c in caps:
            rep = validate_capacity(c)
            if not rep:
                raise StructuralError(f"invalid slice capacity: {rep.violation.detail}")

    @property
    def n(self) -> int:
        return self.slices[0].n

    @property
    def top(self) -> float:
        return math.inf if self.tail is not None else self.breakpoints[-1]

    def at(self, t: float) -> Capacity:
        if t < 0 or t >= self.top:
            raise ValueError(f"level {t} outside [0, {self.top})")
        j = int(np.searchsorted(self.breakpoints, t, side="right")) - 1
        return self.slices[j] if j < len(self.slices) else self.tail


def level_dependent_choquet(nu: LevelDependentCapacity, x) -> float:
    """Exact integral of ``t -> nu_t({i : x_i >= t})`` over ``[0, max x]``.

    Between consecutive points of ``{0} | x | breakpoints`` both the level set
    and the active slice are constant, so the integral is a finite sum.
    """
    x = as_vector(x, nu.n)
    top = float(x.max())
    if top > nu.top + EPS:
        raise ValueError(f"max(x) = {top} exceeds the last breakpoint {nu.top}")
    cuts = sorted({0.0, top, *(float(v) for v in x), *(t for t in nu.breakpoints if t < top)})
    total = 0.0
    for a, b in zip(cuts, cuts[1:]):
        level = 0
        for i, v in enumerate(x):
            if v >= b - EPS:
                level |= 1 << i
        total += (b - a) * nu.at(0.5 * (a + b))[level]
    return total
