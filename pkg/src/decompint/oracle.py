"""Brute-force reference values for small bases.

Everything here enumerates literally: multiplicity vectors in odometer order
(generator by generator, counts ascending), explicit collections one by
one, set partitions by restricted growth strings.  Unconstrained integer
multiplicities on integer data go through a table over all demand states
instead, which covers the same multisets without listing them one by one.
Nothing is shared with the LP machinery in :mod:`decompint.decomp`, which
is the point.
"""
from __future__ import annotations

import math
from typing import Iterator

import numpy as np

from .core import (
    EPS, Base, Capacity, Coefficients, Collections, StructuralError, as_vector, comonotone,
    support_mask,
)

SEARCH_LIMIT = 10**7


class SearchSpaceTooLarge(RuntimeError):
    """The enumeration would visit more than the configured number of nodes."""


def _allowed(base: Base, G: np.ndarray, counts: tuple[int, ...]) -> bool:
    con = base.system.constraint
    unit = base.system.coefficients is Coefficients.UNIT
    used = [j for j, k in enumerate(counts) if k > 0]
    supports = [support_mask(G[j]) for j in used]
    if con.kind == "any":
        return True
    if con.kind == "chain":
        return all(a & b in (a, b) for i, a in enumerate(supports) for b in supports[i + 1:])
    if con.kind == "comonotone":
        return all(comonotone(G[a], G[b], EPS) for i, a in enumerate(used) for b in used[i + 1:])
    disjoint = all(not a & b for i, a in enumerate(supports) for b in supports[i + 1:])
    if con.kind == "partition":
        if not disjoint:
            return False
        if unit:
            full = (1 << base.n) - 1
            return all(counts[j] == 1 for j in used) and sum(supports) == full
        return _extends_to_cover(G, sum(supports), (1 << base.n) - 1)
    if con.kind == "disjoint":
        return disjoint and len(used) <= con.k and (not unit or all(counts[j] == 1 for j in used))
    if con.kind == "max_parts":
        return (sum(counts) if unit else len(used)) <= con.k
    raise StructuralError(f"unknown constraint {con.kind}")


def _extends_to_cover(G: np.ndarray, covered: int, full: int) -> bool:
    if covered == full:
        return True
    supports = [support_mask(g) for g in G]
    low = ~covered & full & -(~covered & full)
    return any(s & low and not s & covered and _extends_to_cover(G, covered | s, full)
               for s in supports)


def _odometer(G: np.ndarray, x: np.ndarray, sub: bool, step: float,
              limit: int) -> Iterator[tuple[int, ...]]:
    """Multiplicity vectors, pruned only by what the inequality itself forces.

    For ``sub`` a generator's count is capped by the remaining room.  For the
    covering side a count is capped by the remaining need: one copy fewer
    would still cover every coordinate the generator touches, so larger
    counts never lower the cost of a minimal cover.
    """
    m = len(G)
    visited = 0

    def cap(g: np.ndarray, rest: np.ndarray) -> int:
        s = g > EPS
        if sub:
            return max(0, math.floor(np.min(rest[s] / (step * g[s])) + 1e-9))
        need = s & (rest > EPS)
        if not need.any():
            return 0
        return math.ceil(np.max(rest[need] / (step * g[need])) - 1e-9)

    def rec(j: int, rest: np.ndarray, prefix: tuple[int, ...]):
        nonlocal visited
        visited += 1
        if visited > limit:
            raise SearchSpaceTooLarge(f"more than {limit} enumeration nodes")
        if j == m:
            yield prefix
            return
        g = G[j]
        for k in range(cap(g, rest) + 1):
            nxt = rest - k * step * g
            if not sub:
                nxt = np.maximum(nxt, 0.0)
            yield from rec(j + 1, nxt, prefix + (k,))

    yield from rec(0, x.astype(float), ())


def _step(base: Base, delta: float | None) -> float:
    coeffs = base.system.coefficients
    if coeffs is Coefficients.REAL:
        if delta is None:
            raise StructuralError("real coefficients need a lattice step delta")
        return float(delta)
    return 1.0


def _value(base: Base, G: np.ndarray, counts: tuple[int, ...], step: float) -> float:
    w = base.weighting
    if base.system.coefficients is Coefficients.UNIT:
        return sum(k * w(G[j]) for j, k in enumerate(counts) if k)
    return sum(w.weight(G[j], k * step) for j, k in enumerate(counts) if k)


def _collections(base: Base, x: np.ndarray, sub: bool) -> list[float]:
    w = base.weighting
    out = []
    for coll in base.system.generators.members:
        vecs = np.array(coll, dtype=float)
        total = vecs.sum(axis=0)
        ok = np.all(total <= x + 1e-9) if sub else np.all(total >= x - 1e-9)
        if ok:
            out.append(sum(w(v) for v in vecs if np.any(v > 0)))
    return out


def _integral_lattice(G: np.ndarray, x: np.ndarray) -> bool:
    return bool(np.all(G == np.round(G)) and np.all(x == np.round(x)))


def _demand_table(base: Base, G: np.ndarray, x: np.ndarray, sub: bool, limit: int) -> float | None:
    """Unconstrained integer multiplicities on an integer lattice, state by state.

    ``f(r)`` is the best value with room ``r`` (sub) or outstanding need ``r``
    (covering side); every state is visited once, in lexicographic order.
    """
    shape = tuple(int(v) + 1 for v in x)
    if math.prod(shape) * len(G) > limit:
        raise SearchSpaceTooLarge(f"more than {limit} table updates")
    w = base.weighting
    costs = [w(g) for g in G]
    gens = [tuple(int(v) for v in g) for g in G]
    f: dict[tuple[int, ...], float | None] = {}
    for r in np.ndindex(*shape):
        if sub:
            best = 0.0
            for g, c in zip(gens, costs):
                if all(a >= b for a, b in zip(r, g)):
                    best = max(best, c + f[tuple(a - b for a, b in zip(r, g))])
        elif not any(r):
            best = 0.0
        else:
            best = None
            for g, c in zip(gens, costs):
                if not any(a > 0 and b > 0 for a, b in zip(r, g)):
                    continue
                rest = f[tuple(max(a - b, 0) for a, b in zip(r, g))]
                if rest is not None and (best is None or c + rest < best):
                    best = c + rest
        f[r] = best
    return f[tuple(int(v) for v in x)]


def _brute(base: Base, x, sub: bool, delta: float | None, limit: int):
    x = as_vector(x, base.n)
    system = base.system
    if not system.finite:
        raise StructuralError("brute force needs a finite generator list")
    if isinstance(system.generators, Collections):
        vals = _collections(base, x, sub)
    elif (system.constraint.kind == "any" and system.coefficients is not Coefficients.REAL
          and (base.weighting.linear or system.coefficients is Coefficients.UNIT)
          and _integral_lattice(system.generator_matrix(), x)):
        return _demand_table(base, system.generator_matrix(), x, sub, limit)
    else:
        G = system.generator_matrix()
        step = _step(base, delta)
        vals = [_value(base, G, c, step) for c in _odometer(G, x, sub, step, limit)
                if _allowed(base, G, c) and (sub or np.all(
                    sum(k * step * G[j] for j, k in enumerate(c)) >= x - 1e-9))]
    if sub:
        return max(vals, default=0.0)
    return min(vals) if vals else None


def brute_sub(base: Base, x, delta: float | None = None, limit: int = SEARCH_LIMIT) -> float:
    """Largest total weight over every admissible multiplicity vector below ``x``.

    Real coefficients are searched on the lattice ``delta * Z``; the result
    is exact only when an optimum lies on that lattice.
    """
    return float(_brute(base, x, True, delta, limit))


def brute_super(base: Base, x, delta: float | None = None,
                limit: int = SEARCH_LIMIT) -> float | None:
    """Smallest total weight of an admissible cover of ``x``; None when nothing covers it."""
    val = _brute(base, x, False, delta, limit)
    return None if val is None else float(val)


def restricted_growth_strings(n: int) -> Iterator[list[int]]:
    a = [0] * n
    if n == 0:
        yield []
        return

    def rec(i: int, top: int):
        if i == n:
            yield list(a)
            return
        for v in range(top + 2):
            a[i] = v
            yield from rec(i + 1, max(top, v))

    a[0] = 0
    yield from rec(1, 0)


def brute_partitions(m: Capacity, x) -> float:
    """Best partition of N: ``max sum_B m(B) * min_{i in B} x_i`` over all set partitions."""
    x = as_vector(x, m.n)
    if m.n > 10:
        raise SearchSpaceTooLarge("partition enumeration is limited to n <= 10")
    best = 0.0
    for rgs in restricted_growth_strings(m.n):
        blocks: dict[int, list[int]] = {}
        for i, b in enumerate(rgs):
            blocks.setdefault(b, []).append(i)
        total = sum(m[sum(1 << i for i in B)] * min(x[i] for i in B) for B in blocks.values())
        best = max(best, total)
    return float(best)
