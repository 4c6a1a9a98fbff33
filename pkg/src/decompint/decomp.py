"""Sub- and super-decomposition integrals over arbitrary bases.

``sub_integral`` maximizes the total weight of an admissible collection whose
sum stays below ``x``; ``super_integral`` minimizes the total weight of an
admissible collection whose sum covers ``x``.  Finite generator lists are
solved exactly by LP/ILP over the candidate families the collection
constraint allows; lattice-based systems and closed-form weightings on the
whole orthant are solved by dynamic programming and reported as approximate.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import networkx as nx
import numpy as np

from . import classical, grid
from .core import (
    ANY, COMONOTONE, EPS, Base, BoxGrid, CapacityWeighting, ClosedForm, Coefficients,
    Collections, Constraint, DecompSystem, Indicators, Orthant, ProbabilisticSum,
    StructuralError, TableWeighting, WeightedSum, Weighting, WeightingError, as_vector,
    comonotone, disjoint_support, indicator, leq, max_parts, popcount, support_mask,
)
from .lpsolve import (
    DEFAULT_NODE_BUDGET, LinearProgram, Status as LPStatus, lexmin_solve, solve,
)

DEFAULT_GRID_STEP = 1 / 64
TRANSFORM_GRID_STEP = 1 / 16
TRANSFORM_PARTS = 256
DIVERGENCE_THRESHOLD = 1e6
VALUE_TOL = 1e-7


class Status(str, Enum):
    EXACT = "exact"
    APPROXIMATE = "approximate"
    UNBOUNDED = "unbounded"
    INFEASIBLE_DOMAIN = "infeasible_domain"


class UnsupportedBase(NotImplementedError):
    """No solver applies to this combination of system and weighting."""


@dataclass(frozen=True)
class Piece:
    """``copies`` identical members, each equal to ``coefficient * generator``."""

    generator: tuple[float, ...]
    coefficient: float = 1.0
    copies: int = 1

    @property
    def vector(self) -> np.ndarray:
        return self.coefficient * np.asarray(self.generator, dtype=float)


@dataclass
class IntegralResult:
    status: Status
    value: float
    witness: tuple[Piece, ...] | None = None
    error_bound: float | None = None
    certificate: tuple[tuple[float, float], ...] | None = None
    note: str = ""

    @property
    def finite(self) -> bool:
        return self.status in (Status.EXACT, Status.APPROXIMATE)


def witness_value(weighting: Weighting, witness: Iterable[Piece]) -> float:
    return float(sum(p.copies * weighting.weight(p.generator, p.coefficient) for p in witness))


def witness_sum(witness: Iterable[Piece], n: int) -> np.ndarray:
    total = np.zeros(n)
    for p in witness:
        total += p.copies * p.vector
    return total


# --------------------------------------------------------------------------
# candidate families for finite generator lists

@dataclass(frozen=True)
class _Family:
    indices: tuple[int, ...]
    repeatable: bool


def _maximal_chains(supports: Sequence[int]) -> list[tuple[int, ...]]:
    distinct = sorted(set(supports), key=lambda s: (popcount(s), s))
    below = {s: [t for t in distinct if t != s and t & s == t] for s in distinct}
    covers = {s: [t for t in distinct if s in below[t]
                  and not any(s in below[u] and u in below[t] for u in distinct)]
              for s in distinct}
    chains: list[tuple[int, ...]] = []

    def walk(path: list[int]) -> None:
        nxt = covers[path[-1]]
        if not nxt:
            chains.append(tuple(path))
            return
        for t in nxt:
            walk(path + [t])

    for s in distinct:
        if not below[s]:
            walk([s])
    return chains


def _exact_covers(supports: Sequence[int], full: int) -> list[tuple[int, ...]]:
    out: list[tuple[int, ...]] = []

    def rec(covered: int, chosen: list[int]) -> None:
        if covered == full:
            out.append(tuple(chosen))
            return
        low = ~covered & full & -(~covered & full)
        for g, s in enumerate(supports):
            if s & low and not s & covered:
                rec(covered | s, chosen + [g])

    rec(0, [])
    return out


def _disjoint_sets(supports: Sequence[int], k: int) -> list[tuple[int, ...]]:
    out: list[tuple[int, ...]] = []

    def rec(start: int, used: int, chosen: list[int]) -> None:
        if chosen:
            out.append(tuple(chosen))
        if len(chosen) == k:
            return
        for g in range(start, len(supports)):
            if supports[g] and not supports[g] & used:
                rec(g + 1, used | supports[g], chosen + [g])

    rec(0, 0, [])
    return out


def _families(system: DecompSystem, G: np.ndarray) -> list[_Family]:
    m = len(G)
    coeffs = system.coefficients
    kind, k = system.constraint.kind, system.constraint.k
    supports = [support_mask(g) for g in G]
    if isinstance(system.generators, Collections):
        if kind != "any":
            raise StructuralError("explicit collections take no extra constraint")
        index = {tuple(g): i for i, g in enumerate(G.tolist())}
        fams = []
        for coll in system.generators.members:
            idx = tuple(index[tuple(float(c) for c in v)] for v in coll if any(c > 0 for c in v))
            fams.append(_Family(idx, False))
        return fams
    if kind == "any":
        return [_Family(tuple(range(m)), True)]
    if kind == "chain":
        return [_Family(tuple(g for g in range(m) if supports[g] in set(ch)), True)
                for ch in _maximal_chains(supports)]
    if kind == "comonotone":
        graph = nx.Graph()
        graph.add_nodes_from(range(m))
        graph.add_edges_from((a, b) for a, b in itertools.combinations(range(m), 2)
                             if comonotone(G[a], G[b], EPS))
        return [_Family(tuple(sorted(c)), True) for c in sorted(map(sorted, nx.find_cliques(graph)))]
    if kind == "partition":
        return [_Family(c, False) for c in _exact_covers(supports, (1 << system.n) - 1)]
    if kind == "disjoint":
        sets = _disjoint_sets(supports, k)
        if coeffs is not Coefficients.UNIT:
            as_sets = [set(s) for s in sets]
            sets = [s for s, ss in zip(sets, as_sets) if not any(ss < o for o in as_sets)]
        return [_Family(s, False) for s in sets]
    if kind == "max_parts":
        if coeffs is Coefficients.UNIT:
            return [_Family(c, False) for size in range(1, k + 1)
                    for c in itertools.combinations_with_replacement(range(m), size)]
        return [_Family(c, False) for c in itertools.combinations(range(m), min(k, m))]
    raise StructuralError(f"unknown constraint {kind}")


# --------------------------------------------------------------------------
# finite generator lists: LP / ILP per family

def _caps(G: np.ndarray, x: np.ndarray, sub: bool) -> np.ndarray:
    caps = np.zeros(len(G))
    for j, g in enumerate(G):
        s = g > EPS
        if sub:
            caps[j] = math.floor(np.min(x[s] / g[s]) + 1e-9)
        else:
            need = s & (x > EPS)
            caps[j] = math.ceil(np.max(x[need] / g[need]) - 1e-9) if need.any() else 0
    return caps


def _family_lp(G, costs, fam: _Family, x, coeffs: Coefficients, sub: bool) -> LinearProgram:
    idx = list(fam.indices)
    A = G[idx].T
    integer = coeffs is not Coefficients.REAL
    lp = LinearProgram(costs[idx], A, ("<=" if sub else ">=",) * len(x), x, maximize=sub,
                       integer=[integer] * len(idx))
    if integer:
        caps = _caps(G[idx], x, sub)
        lp = lp.with_rows([(np.eye(len(idx))[j], "<=", float(caps[j])) for j in range(len(idx))])
    return lp


def _finite_integral(base: Base, x: np.ndarray, sub: bool, node_budget: int,
                     lexicographic: bool) -> IntegralResult:
    system, w = base.system, base.weighting
    coeffs = system.coefficients
    if coeffs is not Coefficients.UNIT and not w.linear:
        raise UnsupportedBase(
            f"{type(w).__name__} is not linear in the coefficient; use unit coefficients "
            "or the max pseudo-addition")
    G = system.generator_matrix()
    costs = np.array([w.weight(g, 1.0) for g in G])
    fams = _families(system, G)
    tol = 1e-9 * max(1.0, float(np.abs(x).max(initial=0.0)))
    results: list[tuple[float, _Family, LinearProgram | None, np.ndarray]] = []
    for fam in fams:
        if coeffs is Coefficients.UNIT and not fam.repeatable:
            total = G[list(fam.indices)].sum(axis=0) if fam.indices else np.zeros(system.n)
            if leq(total, x, tol) if sub else leq(x, total, tol):
                results.append((float(costs[list(fam.indices)].sum()), fam, None,
                                np.ones(len(fam.indices))))
            continue
        if not fam.indices:
            if sub or not np.any(x > EPS):
                results.append((0.0, fam, None, np.zeros(0)))
            continue
        lp = _family_lp(G, costs, fam, x, coeffs, sub)
        sol = solve(lp, node_budget)
        if sol.status is LPStatus.INFEASIBLE:
            continue
        if sol.status is LPStatus.UNBOUNDED:
            return IntegralResult(Status.UNBOUNDED, math.inf, note="LP relaxation unbounded")
        if sol.status is not LPStatus.OPTIMAL:
            raise RuntimeError(f"solver stopped with status {sol.status.value}")
        results.append((sol.objective, fam, lp, sol.x))
    if not results:
        if sub:
            return IntegralResult(Status.EXACT, 0.0, witness=())
        return IntegralResult(Status.INFEASIBLE_DOMAIN, math.inf,
                              note="no admissible collection covers x")
    best = max(r[0] for r in results) if sub else min(r[0] for r in results)
    vtol = 1e-9 * max(1.0, abs(best))
    chosen: tuple | None = None
    for value, fam, lp, coef in results:
        if abs(value - best) > vtol:
            continue
        if lexicographic and lp is not None:
            coef = lexmin_solve(lp, value, node_budget).x
        full = np.zeros(len(G))
        for j, c in zip(fam.indices, coef):
            full[j] += c
        key = tuple(np.round(full, 9))
        if chosen is None or key < chosen[0]:
            chosen = (key, full)
        if not lexicographic:
            break
    full = chosen[1]
    pieces = []
    for j, c in enumerate(full):
        if c <= EPS:
            continue
        g = tuple(float(v) for v in G[j])
        if coeffs is Coefficients.UNIT:
            pieces.append(Piece(g, 1.0, int(round(c))))
        else:
            if coeffs is Coefficients.INT:
                c = float(round(c))
            pieces.append(Piece(g, float(c), 1))
    return IntegralResult(Status.EXACT, float(best), witness=tuple(pieces))


def _capacity_fast_path(base: Base, x: np.ndarray, sub: bool) -> IntegralResult | None:
    w, system = base.weighting, base.system
    if not (isinstance(w, CapacityWeighting) and w.combine == "product"
            and isinstance(system.generators, Indicators)
            and system.coefficients is Coefficients.REAL):
        return None
    m, n = w.capacity, system.n
    con = system.constraint
    if con.kind in ("chain", "comonotone"):
        dec = classical.choquet_decomposition(m, x)
        pieces = tuple(Piece(tuple(indicator(E, 1.0, n)), c) for E, c in dec)
        return IntegralResult(Status.EXACT, sum(c * m[E] for E, c in dec), witness=pieces)
    if not sub:
        return None
    if con.kind == "partition" or (con.kind == "disjoint" and con.k >= n):
        value, blocks = classical.pan_partition(m, x)
        pieces = tuple(Piece(tuple(indicator(E, 1.0, n)), float(min(x[i] for i in range(n)
                                                                      if E >> i & 1)))
                       for E in blocks)
        return IntegralResult(Status.EXACT, value,
                              witness=tuple(p for p in pieces if p.coefficient > 0))
    if con.kind == "max_parts" and con.k == 1:
        E = classical.shilkret_set(m, x)
        c = float(min(x[i] for i in range(n) if E >> i & 1))
        return IntegralResult(Status.EXACT, c * m[E],
                              witness=(Piece(tuple(indicator(E, 1.0, n)), c),) if c > 0 else ())
    return None


# --------------------------------------------------------------------------
# box grids: exact lattice optimum, one table for many queries

def _boxgrid_many(base: Base, X: np.ndarray, sub: bool) -> list[IntegralResult]:
    values = _boxgrid_values(base, X, sub, base.system.generators.step, witness=True)
    coarse = _boxgrid_values(base, X, sub, 2 * base.system.generators.step, witness=False)
    out = []
    for (status, value, pieces), (_, cval, _) in zip(values, coarse):
        if status is not Status.APPROXIMATE:
            out.append(IntegralResult(status, value, note="no grid cover"))
            continue
        eb = abs(value - cval) if math.isfinite(cval) else None
        out.append(IntegralResult(Status.APPROXIMATE, value, witness=pieces, error_bound=eb,
                                  note="lattice optimum; error bound from the doubled step"))
    return out


def _boxgrid_values(base: Base, X: np.ndarray, sub: bool, step: float, witness: bool):
    box: BoxGrid = base.system.generators
    if base.system.constraint != ANY or base.system.coefficients is Coefficients.REAL:
        raise UnsupportedBase("box grids support unit or integer pieces with no constraint")
    A = base.weighting
    n = base.n
    ext = tuple(int(math.floor(u / step + 1e-9)) for u in box.upper)
    pshape = tuple(e + 1 for e in ext)
    pts = grid.lattice_points(pshape, (step,) * n).reshape(-1, n)
    if isinstance(A, ClosedForm):
        pv = A.evaluate(pts)
    else:
        pv = np.array([A(p) if A.in_domain(p) else np.nan for p in pts])
    worst = -math.inf if sub else math.inf
    pv = np.where(np.isnan(pv), worst, pv).reshape(pshape)
    targets = []
    for x in X:
        if sub:
            V = tuple(int(math.floor(xi / step + 1e-9)) if e > 0 else 0 for xi, e in zip(x, ext))
        else:
            V = tuple(int(math.ceil(xi / step - 1e-9)) for xi in x)
            if any(v > 0 and e == 0 for v, e in zip(V, ext)):
                V = None
        targets.append(V)
    live = [V for V in targets if V is not None]
    if not live:
        return [(Status.INFEASIBLE_DOMAIN, math.inf, None)] * len(X)
    shape = tuple(max(V[i] for V in live) + 1 for i in range(n))
    table, arg = grid.lattice_table(pv, maximize=sub, shape=shape)
    out = []
    for V in targets:
        if V is None:
            out.append((Status.INFEASIBLE_DOMAIN, math.inf, None))
            continue
        if sub:
            block = table[tuple(slice(0, v + 1) for v in V)]
            at = np.unravel_index(int(np.argmax(block)), block.shape)
        else:
            at = V
        value = float(table[at])
        if not math.isfinite(value):
            out.append((Status.INFEASIBLE_DOMAIN, math.inf, None))
            continue
        pieces = None
        if witness:
            counts = Counter(grid.reconstruct(arg, pshape, at))
            pieces = tuple(Piece(tuple(step * np.array(w)), 1.0, c) for w, c in sorted(counts.items()))
        out.append((Status.APPROXIMATE, value, pieces))
    return out


# --------------------------------------------------------------------------
# public entry points

def _dispatch(base: Base, X: np.ndarray, sub: bool, opts: dict) -> list[IntegralResult]:
    system = base.system
    gens = system.generators
    if isinstance(gens, BoxGrid):
        return _boxgrid_many(base, X, sub)
    if isinstance(gens, Orthant):
        return [_orthant(base, x, sub, opts) for x in X]
    out = []
    for x in X:
        res = _capacity_fast_path(base, x, sub) if opts.get("fast_path", True) else None
        if res is None:
            res = _finite_integral(base, x, sub, opts.get("node_budget", DEFAULT_NODE_BUDGET),
                                   opts.get("lexicographic", True))
        out.append(res)
    return out


def _as_batch(base: Base, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.size == 0:
        return X.reshape(0, base.n)
    return np.array([as_vector(x, base.n) for x in X])


def integrate_many(base: Base, X, kind: str = "sub", **opts) -> list[IntegralResult]:
    """Evaluate ``sub`` or ``super`` integrals for every row of ``X``.

    Lattice tables are built once per call, which is what makes batches over
    box grids cheap.  Options: ``fast_path``, ``node_budget``,
    ``lexicographic``, ``grid_step``, ``parts``, ``threshold``.
    """
    if kind not in ("sub", "super"):
        raise ValueError(f"kind must be 'sub' or 'super', got {kind!r}")
    X = _as_batch(base, X)
    if len(X) == 0:
        return []
    return _dispatch(base, X, kind == "sub", opts)


def sub_integral(base: Base, x, **opts) -> IntegralResult:
    """Supremum of the total weight of admissible collections summing to at most ``x``."""
    return integrate_many(base, [x], "sub", **opts)[0]


def super_integral(base: Base, x, **opts) -> IntegralResult:
    """Infimum of the total weight of admissible collections summing to at least ``x``."""
    return integrate_many(base, [x], "super", **opts)[0]


# --------------------------------------------------------------------------
# integrability

@dataclass
class Integrability:
    verdict: str              # "yes", "no" or "unknown"
    reason: str
    bound: float | None = None
    witness: tuple[tuple[float, float], ...] = ()

    def __bool__(self) -> bool:
        return self.verdict == "yes"


def _split_sequence(A: ClosedForm, x: np.ndarray, doublings: int = 80):
    """``(m, m * A(x / m))`` for ``m = 2^j``: equal splits of x."""
    out = []
    for j in range(doublings + 1):
        m = 2.0 ** j
        out.append((m, m * A(x / m)))
    return out


def _divergence_witness(A: ClosedForm, x: np.ndarray, threshold: float):
    scale = max(1.0, A(x))
    seq = _split_sequence(A, x)
    for i, (_, v) in enumerate(seq):
        if v > threshold * scale:
            return tuple(seq[: i + 1])
    return None


def _ratio_bounded(A: ClosedForm, face: int, n: int) -> tuple[bool, float]:
    ones = indicator(face, 1.0, n)
    ratios = [A((2.0 ** -j) * ones) / 2.0 ** -j for j in range(61)]
    tail = ratios[-11:]
    bounded = all(math.isfinite(r) for r in ratios) and tail[-1] <= tail[0] * (1 + 1e-6) + 1e-12
    return bounded, max(ratios)


def is_sub_integrable(base: Base, x, threshold: float = DIVERGENCE_THRESHOLD) -> Integrability:
    """Decide whether the sub-decomposition supremum at ``x`` is finite.

    Finite generator sets always give "yes".  On the whole orthant a
    closed-form weighting is "yes" when dominated by a multiple of max, or
    when ``A(k 1_S) / k`` stays bounded as ``k -> 0`` on the support S of x;
    "no" when equal splits ``m * A(x / m)`` exceed ``threshold`` times the
    scale of A; "unknown" otherwise, with the best split value as bound.
    """
    x = as_vector(x, base.n)
    system, A = base.system, base.weighting
    if not isinstance(system.generators, Orthant):
        return Integrability("yes", "finite generator set")
    if not isinstance(A, ClosedForm):
        return Integrability("yes", "weighting defined on finitely many rays")
    c = A.dominating_constant()
    if c is not None:
        return Integrability("yes", f"dominated by {c:g} * max", bound=c * float(x.max()))
    face = support_mask(x)
    if face == 0:
        return Integrability("yes", "zero vector", bound=0.0)
    bounded, ratio = _ratio_bounded(A, face, base.n)
    if bounded:
        return Integrability("yes", "A(k 1_S)/k bounded as k -> 0 on the support of x",
                             bound=ratio * float(x.sum()))
    wit = _divergence_witness(A, x, threshold)
    if wit is not None:
        return Integrability("no", "equal splits diverge", bound=math.inf, witness=wit)
    seq = _split_sequence(A, x)
    return Integrability("unknown", "no sufficient condition and no divergence witness",
                         bound=max(v for _, v in seq), witness=tuple(seq))


# --------------------------------------------------------------------------
# whole-orthant systems: lattice dynamic programming with split groups

def _group_values(A: ClosedForm, pts: np.ndarray, parts: int, maximize: bool):
    worst = -math.inf if maximize else math.inf
    vals = np.full(len(pts), worst)
    best_r = np.ones(len(pts), dtype=np.int64)
    upper = None if A.upper is None else np.asarray(A.upper)
    for r in range(1, parts + 1):
        Y = pts / r
        ok = np.ones(len(pts), dtype=bool) if upper is None else np.all(Y <= upper + EPS, axis=1)
        if not ok.any():
            continue
        v = np.full(len(pts), worst)
        v[ok] = r * A.formula(np.minimum(Y[ok], upper) if upper is not None else Y[ok])
        better = v > vals if maximize else v < vals
        vals[better] = v[better]
        best_r[better] = r
    return vals, best_r


def _in_cone(pts: np.ndarray, order: Sequence[int]) -> np.ndarray:
    ok = np.ones(len(pts), dtype=bool)
    for a, b in zip(order, order[1:]):
        ok &= pts[:, a] <= pts[:, b] + EPS
    return ok


def _lattice_transform(A: ClosedForm, x: np.ndarray, step: float, parts: int, maximize: bool,
                       order: Sequence[int] | None = None, split: bool = True,
                       max_pieces: int | None = None):
    n = x.size
    counts, steps = grid.anchored_resolution(x, step)
    shape = tuple(c + 1 for c in counts)
    pts = grid.lattice_points(shape, steps).reshape(-1, n)
    if split:
        vals, best_r = _group_values(A, pts, parts, maximize)
    else:
        worst = -math.inf if maximize else math.inf
        ok = np.ones(len(pts), dtype=bool) if A.upper is None else \
            np.all(pts <= np.asarray(A.upper) + EPS, axis=1)
        vals = np.full(len(pts), worst)
        vals[ok] = A.formula(pts[ok])
        best_r = np.ones(len(pts), dtype=np.int64)
    if order is not None:
        vals[~_in_cone(pts, order)] = -math.inf if maximize else math.inf
    vals[0] = 0.0
    pieces_tab = vals.reshape(shape)
    if max_pieces is None:
        table, arg = grid.lattice_table(pieces_tab, maximize)
    else:
        table, arg = grid.lattice_table(pieces_tab, maximize, parts=max_pieces)
    value = float(table[counts])
    if not math.isfinite(value):
        return value, None
    wit = []
    for w in grid.reconstruct(arg, shape, counts):
        flat = int(np.ravel_multi_index(w, shape))
        r = int(best_r[flat])
        wit.append(Piece(tuple(float(v) for v in pts[flat] / r), 1.0, r))
    return value, tuple(wit)


def _exact_weighting_base(A: Weighting, n: int, constraint: Constraint) -> Base | None:
    if isinstance(A, CapacityWeighting):
        if not A.linear:
            raise UnsupportedBase("min-combined capacity weightings need a finite generator list")
        return Base(DecompSystem(n, Indicators(), Coefficients.REAL, constraint), A)
    if isinstance(A, TableWeighting):
        return Base(DecompSystem(n, A.vectors(), Coefficients.UNIT, constraint), A)
    return None


def _approx(value, witness, coarse, note) -> IntegralResult:
    eb = abs(value - coarse) if math.isfinite(coarse) else None
    return IntegralResult(Status.APPROXIMATE, value, witness=witness, error_bound=eb, note=note)


def superadditive_transform(A: Weighting, x, parts: int = TRANSFORM_PARTS,
                            grid_step: float = TRANSFORM_GRID_STEP,
                            threshold: float = DIVERGENCE_THRESHOLD) -> IntegralResult:
    """Lower bound of ``A*(x) = sup { sum A(y_j) : sum y_j <= x }`` over the whole orthant.

    Pieces are groups: a lattice vector (lattice anchored at x, spacing at
    most ``grid_step``) split into at most ``parts`` equal copies.  The bound
    is nondecreasing in ``parts`` and under halving of ``grid_step``.
    """
    x = as_vector(x, A.n)
    n = x.size
    exact = _exact_weighting_base(A, n, ANY)
    if exact is not None:
        return sub_integral(exact, x)
    if isinstance(A, WeightedSum):
        return IntegralResult(Status.EXACT, A(x), witness=(Piece(tuple(x)),) if x.any() else ())
    verdict = is_sub_integrable(Base(DecompSystem(n, Orthant()), A), x, threshold)
    if verdict.verdict == "no":
        return IntegralResult(Status.UNBOUNDED, math.inf, certificate=verdict.witness,
                              note=verdict.reason)
    value, wit = _lattice_transform(A, x, grid_step, parts, True)
    if value > threshold * max(1.0, A(x)):
        return IntegralResult(Status.UNBOUNDED, math.inf, note="divergence threshold exceeded")
    coarse, _ = _lattice_transform(A, x, 2 * grid_step, max(1, parts // 2), True)
    return _approx(value, wit, coarse, "lower bound from split lattice groups")


def subadditive_transform(A: Weighting, x, parts: int = TRANSFORM_PARTS,
                          grid_step: float = TRANSFORM_GRID_STEP) -> IntegralResult:
    """Upper bound of ``inf { sum A(y_j) : sum y_j >= x }`` with pieces in A's domain."""
    x = as_vector(x, A.n)
    n = x.size
    exact = _exact_weighting_base(A, n, ANY)
    if exact is not None:
        return super_integral(exact, x)
    if isinstance(A, WeightedSum):
        return IntegralResult(Status.EXACT, A(x), witness=(Piece(tuple(x)),) if x.any() else ())
    value, wit = _lattice_transform(A, x, grid_step, parts, False)
    if not math.isfinite(value):
        return IntegralResult(Status.INFEASIBLE_DOMAIN, math.inf,
                              note="x cannot be covered by pieces of the domain")
    coarse, _ = _lattice_transform(A, x, 2 * grid_step, max(1, parts // 2), False)
    return _approx(value, wit, coarse, "upper bound from split lattice groups")


def _cone_projection(x: np.ndarray, order: Sequence[int]) -> np.ndarray:
    """Largest vector below x that is nondecreasing along ``order``."""
    out = x.copy()
    run = math.inf
    for i in reversed(order):
        run = min(run, x[i])
        out[i] = run
    return out


def comonotone_integral(A: Weighting, x, grid_step: float = TRANSFORM_GRID_STEP,
                        parts: int = TRANSFORM_PARTS,
                        threshold: float = DIVERGENCE_THRESHOLD) -> IntegralResult:
    """Sub-decomposition integral over pairwise comonotone collections.

    Pairwise comonotone pieces share one ordering of the coordinates, so the
    optimum is the best, over orderings, of the split-group lattice program
    restricted to that ordering's cone and to the projection of x onto it.
    """
    x = as_vector(x, A.n)
    n = x.size
    exact = _exact_weighting_base(A, n, COMONOTONE)
    if exact is not None:
        return sub_integral(exact, x)
    best, best_wit, best_coarse = -math.inf, None, -math.inf
    for order in itertools.permutations(range(n)):
        xh = _cone_projection(x, order)
        if np.any(xh > EPS) and _divergence_witness(A, xh, threshold) is not None:
            return IntegralResult(Status.UNBOUNDED, math.inf,
                                  certificate=_divergence_witness(A, xh, threshold),
                                  note="equal comonotone splits diverge")
        value, wit = _lattice_transform(A, xh, grid_step, parts, True, order=order)
        if value > best + 1e-12:
            best, best_wit = value, wit
        coarse, _ = _lattice_transform(A, xh, 2 * grid_step, max(1, parts // 2), True,
                                       order=order)
        best_coarse = max(best_coarse, coarse)
    return _approx(best, best_wit, best_coarse, "lower bound over comonotone cones")


def _set_partitions(items: list[int], k: int):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest, k):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        if len(part) < k:
            yield [[first]] + part


def disjoint_support_integral(A: Weighting, x, k: int) -> IntegralResult:
    """Best collection of at most ``k`` pieces with pairwise disjoint supports."""
    x = as_vector(x, A.n)
    n = x.size
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}]")
    exact = _exact_weighting_base(A, n, disjoint_support(k))
    if exact is not None:
        return sub_integral(exact, x)
    supp = [i for i in range(n) if x[i] > EPS]
    best, best_blocks = 0.0, []
    for blocks in _set_partitions(supp, k):
        pieces = [np.where(np.isin(np.arange(n), b), x, 0.0) for b in blocks]
        value = float(sum(A(p) for p in pieces))
        if value > best + 1e-12:
            best, best_blocks = value, pieces
    return IntegralResult(Status.EXACT, best,
                          witness=tuple(Piece(tuple(p)) for p in best_blocks))


def fixed_length_integral(A: Weighting, x, k: int, grid_step: float = TRANSFORM_GRID_STEP):
    """Best collection of at most ``k`` arbitrary pieces summing to at most x."""
    x = as_vector(x, A.n)
    n = x.size
    if k < 1:
        raise ValueError("k must be at least 1")
    if k == 1:
        return IntegralResult(Status.EXACT, A(x), witness=(Piece(tuple(x)),) if x.any() else ())
    exact = _exact_weighting_base(A, n, max_parts(k))
    if exact is not None:
        return sub_integral(exact, x)
    value, wit = _lattice_transform(A, x, grid_step, 1, True, split=False, max_pieces=k)
    coarse, _ = _lattice_transform(A, x, 2 * grid_step, 1, True, split=False, max_pieces=k)
    return _approx(value, wit, coarse, f"lattice optimum over at most {k} pieces")


def _orthant(base: Base, x: np.ndarray, sub: bool, opts: dict) -> IntegralResult:
    A, con = base.weighting, base.system.constraint
    step = opts.get("grid_step") or TRANSFORM_GRID_STEP
    parts = opts.get("parts") or TRANSFORM_PARTS
    if sub:
        if con.kind == "any":
            return superadditive_transform(A, x, parts, step,
                                           opts.get("threshold", DIVERGENCE_THRESHOLD))
        if con.kind == "comonotone":
            return comonotone_integral(A, x, step, parts)
        if con.kind == "disjoint":
            return disjoint_support_integral(A, x, con.k)
        if con.kind == "max_parts":
            return fixed_length_integral(A, x, con.k, step)
    elif con.kind == "any":
        return subadditive_transform(A, x, parts, step)
    raise UnsupportedBase(f"{'sub' if sub else 'super'} integral over the orthant "
                          f"with constraint {con}")


# --------------------------------------------------------------------------
# max pseudo-addition, knapsack, iteration

def max_pseudo_integral(base: Base, x) -> IntegralResult:
    """Supremum over admissible collections of the largest single piece weight."""
    x = as_vector(x, base.n)
    system, A = base.system, base.weighting
    gens = system.generators
    if isinstance(gens, Orthant):
        return IntegralResult(Status.EXACT, A(x), witness=(Piece(tuple(x)),) if x.any() else ())
    if isinstance(gens, BoxGrid):
        h = gens.step
        top = np.minimum(np.floor(x / h + 1e-9) * h, np.floor(np.asarray(gens.upper) / h + 1e-9) * h)
        return IntegralResult(Status.APPROXIMATE, A(top), witness=(Piece(tuple(top)),),
                              error_bound=abs(A(top) - A(np.minimum(x, gens.upper))))
    G = system.generator_matrix()
    allowed = range(len(G))
    if isinstance(gens, Collections):
        allowed = sorted({j for fam in _families(system, G) for j in fam.indices
                          if system.coefficients is not Coefficients.UNIT
                          or leq(G[list(fam.indices)].sum(axis=0), x, 1e-9)})
    elif system.constraint.kind == "partition":
        allowed = sorted({j for fam in _families(system, G) for j in fam.indices})
    best, piece = 0.0, None
    for j in allowed:
        g = G[j]
        s = g > EPS
        alpha = float(np.min(x[s] / g[s]))
        if system.coefficients is Coefficients.UNIT:
            if alpha < 1 - 1e-9:
                continue
            alpha = 1.0
        elif system.coefficients is Coefficients.INT:
            alpha = float(math.floor(alpha + 1e-9))
        if alpha <= 0:
            continue
        value = A.weight(g, alpha)
        if value > best + 1e-12:
            best, piece = value, Piece(tuple(float(v) for v in g), alpha)
    return IntegralResult(Status.EXACT, best, witness=(piece,) if piece else ())


def knapsack_integral(weights: Sequence[float], cap: float,
                      node_budget: int = DEFAULT_NODE_BUDGET) -> IntegralResult:
    """Largest subset sum not exceeding ``cap`` (each item at most once)."""
    w = np.asarray(weights, dtype=float)
    if np.any(w <= 0):
        raise ValueError("item weights must be positive")
    if cap < 0:
        raise ValueError("capacity must be nonnegative")
    k = w.size
    if k == 0:
        return IntegralResult(Status.EXACT, 0.0, witness=())
    lp = LinearProgram(w, np.vstack([w[None, :], np.eye(k)]), ("<=",) * (k + 1),
                       np.concatenate([[cap], np.ones(k)]), maximize=True, integer=[True] * k)
    sol = solve(lp, node_budget)
    if sol.status is not LPStatus.OPTIMAL:
        raise RuntimeError(f"knapsack solver stopped with status {sol.status.value}")
    chosen = [i for i in range(k) if sol.x[i] > 0.5]
    return IntegralResult(Status.EXACT, float(w[chosen].sum()),
                          witness=tuple(Piece((float(w[i]),)) for i in chosen))


def iterated_sub_integral(base: Base, x, **opts) -> IntegralResult:
    """Integral whose weighting is the base's own integral restricted to its generators."""
    system = base.system
    if not system.finite:
        raise UnsupportedBase("iteration needs a finite generator set")
    G = system.generator_matrix()
    induced = {tuple(g): sub_integral(base, g, **opts).value for g in G}
    if max(induced.values()) <= EPS:
        raise WeightingError("the induced weighting vanishes on every generator")
    return sub_integral(Base(system, TableWeighting(induced)), x, **opts)


# --------------------------------------------------------------------------
# Frank-type residuals

def probabilistic_sum_cover(x: float, y: float) -> float:
    """Closed form of the covering integral of ``x + y - xy`` over unit-box pieces."""
    k = math.floor(min(x, y))
    if max(x, y) <= k + 1:
        return (k + 1) * (x + y - k) - x * y
    return max(x, y)


@dataclass
class FrankReport:
    rows: list[dict] = field(default_factory=list)

    @property
    def max_residual(self) -> float:
        return max((r["residual"] for r in self.rows), default=0.0)


def frank_check(upper_weighting: ClosedForm, lower_weighting: ClosedForm, box: Sequence[float],
                samples, grid_step: float = DEFAULT_GRID_STEP) -> FrankReport:
    """Pointwise ``|cover integral + packing integral - (x + y)|`` over box-grid pieces.

    The covering integral uses ``upper_weighting`` and the packing integral
    ``lower_weighting``; no pass/fail verdict is attached.
    """
    S = np.asarray(samples, dtype=float).reshape(-1, 2)
    system = DecompSystem(2, BoxGrid(tuple(box), grid_step), Coefficients.UNIT)
    sup_res = integrate_many(Base(system, upper_weighting), S, "super")
    sub_res = integrate_many(Base(system, lower_weighting), S, "sub")
    report = FrankReport()
    for (x, y), hi, lo in zip(S, sup_res, sub_res):
        row = {"x": float(x), "y": float(y), "cover": hi.value, "pack": lo.value,
               "residual": abs(hi.value + lo.value - (x + y))}
        if isinstance(upper_weighting, ProbabilisticSum):
            row["cover_reference"] = probabilistic_sum_cover(float(x), float(y))
        report.rows.append(row)
    return report
