"""Seeded property suites over random instances.

Each suite returns a :class:`CheckReport`; the CLI ``check`` subcommand and
the test-suite both drive them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import classical, oracle
from .core import (
    ANY, CHAIN, COMONOTONE, PARTITION, Base, Capacity, CapacityWeighting, Coefficients,
    DecompSystem, Indicators, MaxLog, Product, ProbabilisticSum, TableWeighting, WeightedSum,
    Weighting, disjoint_support, max_parts,
)
from .decomp import (
    Status, comonotone_integral, disjoint_support_integral, frank_check, knapsack_integral,
    max_pseudo_integral, sub_integral, super_integral,
)


@dataclass
class CheckReport:
    suite: str
    passed: int = 0
    total: int = 0
    max_residual: float = 0.0
    counterexample: dict | None = None
    details: list = field(default_factory=list, repr=False)

    @property
    def ok(self) -> bool:
        return self.passed == self.total

    def record(self, good: bool, residual: float = 0.0, **case) -> None:
        self.total += 1
        self.max_residual = max(self.max_residual, float(residual))
        if good:
            self.passed += 1
        elif self.counterexample is None:
            self.counterexample = case

    def summary(self) -> str:
        line = (f"{self.suite}: {self.passed}/{self.total} passed, "
                f"max residual {self.max_residual:.3g}")
        if self.counterexample is not None:
            line += f"; first counterexample {self.counterexample}"
        return line


# --------------------------------------------------------------------------
# random instances

def random_capacity(rng: np.random.Generator, n: int) -> Capacity:
    """Monotone capacity built by accumulating nonnegative increments over subsets."""
    v = np.zeros(1 << n)
    for E in range(1, 1 << n):
        below = max((v[E & ~(1 << i)] for i in range(n) if E >> i & 1), default=0.0)
        v[E] = below + round(float(rng.uniform(0, 1)), 3)
    return Capacity(n, v)


def random_comonotone_pair(rng: np.random.Generator, n: int, high: float = 2.0):
    order = rng.permutation(n)
    out = []
    for _ in range(2):
        vals = np.sort(rng.uniform(0, high, n))
        vec = np.empty(n)
        vec[order] = vals
        out.append(vec)
    return out


RANDOM_CONSTRAINTS = ("any", "chain", "comonotone", "partition", "disjoint", "max_parts")


def random_finite_base(rng: np.random.Generator, max_n: int = 4, max_gens: int = 6,
                       coefficients: Coefficients | None = None, constraint: str | None = None):
    """Small integer base: entries in {0,1,2}, weights on a 0.1 grid."""
    n = int(rng.integers(1, max_n + 1))
    m = int(rng.integers(1, max_gens + 1))
    gens: list[tuple[int, ...]] = []
    while len(gens) < m:
        g = tuple(int(v) for v in rng.integers(0, 3, n))
        if any(g) and g not in gens:
            gens.append(g)
        elif len(gens) >= (3 ** n) - 1:
            break
    table = {g: round(float(rng.uniform(0.1, 5.0)), 1) for g in gens}
    coeffs = coefficients or Coefficients(rng.choice(["int", "unit"]))
    kind = constraint or str(rng.choice(RANDOM_CONSTRAINTS))
    if kind in ("disjoint", "max_parts"):
        con = (disjoint_support if kind == "disjoint" else max_parts)(int(rng.integers(1, 4)))
    else:
        con = {"any": ANY, "chain": CHAIN, "comonotone": COMONOTONE, "partition": PARTITION}[kind]
    return Base(DecompSystem(n, gens, coeffs, con), TableWeighting(table))


def random_query(rng: np.random.Generator, n: int, high: int = 4) -> np.ndarray:
    return rng.integers(0, high + 1, n).astype(float)


# --------------------------------------------------------------------------
# suites

def monotonicity(seed: int = 0, size: int = 200, base: Base | None = None) -> CheckReport:
    """x <= y implies sub(x) <= sub(y), both exact."""
    rng = np.random.default_rng(seed)
    rep = CheckReport("monotonicity")
    for _ in range(size):
        b = base or random_finite_base(rng)
        y = random_query(rng, b.n)
        x = np.floor(rng.uniform(0, 1, b.n) * (y + 1))
        rx, ry = sub_integral(b, x), sub_integral(b, y)
        good = rx.status is Status.EXACT and ry.status is Status.EXACT \
            and rx.value <= ry.value + 1e-9
        rep.record(good, max(0.0, rx.value - ry.value), x=x.tolist(), y=y.tolist())
    return rep


def dominance(seed: int = 0, size: int = 100, tol: float = 1e-9) -> CheckReport:
    """Superadditive A: sub(x) <= A(x) for any system, with equality at generators."""
    rng = np.random.default_rng(seed)
    rep = CheckReport("dominance")
    for i in range(size):
        n = 2 if i % 2 == 0 else int(rng.integers(1, 4))
        A: Weighting = Product(n) if i % 2 == 0 else WeightedSum(rng.uniform(0.1, 2, n).round(2))
        m = int(rng.integers(1, 6))
        gens = [tuple(float(v) for v in rng.integers(1, 4, n)) for _ in range(m)]
        b = Base(DecompSystem(n, gens, Coefficients.UNIT), A)
        x = random_query(rng, n, 6)
        r = sub_integral(b, x)
        rep.record(r.value <= A(x) + tol, max(0.0, r.value - A(x)), x=x.tolist(), gens=gens)
        g = np.asarray(gens[0])
        rg = sub_integral(b, g)
        rep.record(abs(rg.value - A(g)) <= tol, abs(rg.value - A(g)), x=g.tolist(), gens=gens)
    return rep


def choquet_additivity(seed: int = 0, size: int = 100) -> CheckReport:
    """Choquet integral is additive on comonotone pairs."""
    rng = np.random.default_rng(seed)
    rep = CheckReport("choquet-additivity")
    for _ in range(size):
        n = int(rng.integers(1, 6))
        m = random_capacity(rng, n)
        x, z = random_comonotone_pair(rng, n)
        res = abs(classical.choquet(m, x + z) - classical.choquet(m, x) - classical.choquet(m, z))
        rep.record(res <= 1e-9, res, x=x.tolist(), z=z.tolist())
    return rep


def comonotone_superadditivity(seed: int = 0, size: int = 100, tol: float = 1e-3,
                               weighting: Weighting | None = None) -> CheckReport:
    """Comonotone integral dominates A and is superadditive on comonotone pairs."""
    rng = np.random.default_rng(seed)
    A = weighting or MaxLog(2)
    rep = CheckReport("comonotone-superadditivity")
    for _ in range(size):
        x, z = random_comonotone_pair(rng, A.n, 2.0)
        vx, vz = comonotone_integral(A, x).value, comonotone_integral(A, z).value
        vxz = comonotone_integral(A, x + z).value
        gap = vx + vz - vxz
        dom = A(x) - vx
        rep.record(gap <= tol and dom <= tol, max(gap, dom, 0.0), x=x.tolist(), z=z.tolist())
    return rep


def disjoint_superadditivity(seed: int = 0, size: int = 100, tol: float = 1e-9) -> CheckReport:
    """Disjoint-support integral is superadditive when supports do not meet."""
    rng = np.random.default_rng(seed)
    rep = CheckReport("disjoint-superadditivity")
    forms = [lambda n: Product(n), lambda n: MaxLog(n), lambda n: ProbabilisticSum(n)]
    for i in range(size):
        n = int(rng.integers(2, 5))
        A = forms[i % len(forms)](n)
        side = rng.integers(0, 2, n).astype(bool)
        high = 1.0 if isinstance(A, ProbabilisticSum) else 3.0
        x = np.where(side, rng.uniform(0, high, n), 0.0)
        z = np.where(~side, rng.uniform(0, high, n), 0.0)
        k = n
        gap = (disjoint_support_integral(A, x, k).value + disjoint_support_integral(A, z, k).value
               - disjoint_support_integral(A, x + z, k).value)
        rep.record(gap <= tol, max(gap, 0.0), x=x.tolist(), z=z.tolist(), weighting=repr(A))
    return rep


def knapsack_dominance(seed: int = 0, size: int = 100) -> CheckReport:
    """Additive knapsack value is never below the max pseudo-addition value."""
    rng = np.random.default_rng(seed)
    rep = CheckReport("knapsack")
    for _ in range(size):
        w = rng.integers(1, 20, int(rng.integers(1, 8))).astype(float)
        cap = float(rng.integers(0, 40))
        ks = knapsack_integral(w, cap).value
        b = Base(DecompSystem(1, [(v,) for v in sorted(set(w))], Coefficients.UNIT,
                              max_parts(1)), WeightedSum([1.0]))
        mx = max_pseudo_integral(b, [cap]).value
        rep.record(ks >= mx - 1e-9, max(0.0, mx - ks), weights=w.tolist(), cap=cap)
    return rep


def oracle_equivalence(seed: int = 42, size: int = 50, tol: float = 1e-7) -> CheckReport:
    """Generic sub and super solvers against brute-force enumeration."""
    rng = np.random.default_rng(seed)
    rep = CheckReport("oracle-equivalence")
    for _ in range(size):
        b = random_finite_base(rng)
        x = random_query(rng, b.n)
        sub = sub_integral(b, x, fast_path=False).value
        ref_sub = oracle.brute_sub(b, x)
        sup = super_integral(b, x, fast_path=False)
        ref_sup = oracle.brute_super(b, x)
        sup_ok = (ref_sup is None and sup.status is Status.INFEASIBLE_DOMAIN) or \
                 (ref_sup is not None and sup.status is Status.EXACT
                  and abs(sup.value - ref_sup) <= tol)
        res = abs(sub - ref_sub)
        if ref_sup is not None and math.isfinite(sup.value):
            res = max(res, abs(sup.value - ref_sup))
        rep.record(res <= tol and sup_ok, res, system=str(b.system.constraint),
                   coefficients=b.system.coefficients.value, x=x.tolist())
    return rep


def frank(seed: int = 0, size: int = 50, grid_step: float = 1 / 64,
          tol: float = 0.05) -> CheckReport:
    """Residual of cover(ProbabilisticSum) + pack(Product) against x + y on [0,1]^2."""
    rng = np.random.default_rng(seed)
    pts = rng.integers(0, 65, (size, 2)) / 64
    report = frank_check(ProbabilisticSum(2), Product(2), (1.0, 1.0), pts, grid_step)
    rep = CheckReport("frank")
    for row in report.rows:
        rep.record(row["residual"] <= tol, row["residual"], x=row["x"], y=row["y"])
    rep.details = report.rows
    return rep


def classical_reductions(seed: int = 0, size: int = 25, tol: float = 1e-7) -> CheckReport:
    """Generic LP engine on indicator systems against the classical formulas."""
    rng = np.random.default_rng(seed)
    rep = CheckReport("classical-reductions")
    for _ in range(size):
        n = int(rng.integers(1, 5))
        m = random_capacity(rng, n)
        x = rng.uniform(0, 3, n).round(3)
        w = CapacityWeighting(m)

        def generic(con, sub=True):
            b = Base(DecompSystem(n, Indicators(), Coefficients.REAL, con), w)
            f = sub_integral if sub else super_integral
            return f(b, x, fast_path=False).value

        pairs = {
            "chain-sub": (generic(CHAIN), classical.choquet(m, x)),
            "single-set": (generic(max_parts(1)), classical.shilkret(m, x)),
            "partition": (generic(PARTITION), classical.pan(m, x)),
            "partition-oracle": (classical.pan(m, x), oracle.brute_partitions(m, x)),
            "concave": (generic(ANY), classical.concave(m, x)),
            "convex": (generic(ANY, False), classical.convex(m, x)),
            "chain-super": (generic(CHAIN, False), classical.choquet(m, x)),
        }
        for name, (a, b_) in pairs.items():
            rep.record(abs(a - b_) <= tol, abs(a - b_), reduction=name, x=x.tolist())
    return rep


SUITES: dict[str, Callable[..., CheckReport]] = {
    "monotonicity": monotonicity,
    "dominance": dominance,
    "choquet-additivity": choquet_additivity,
    "comonotone-superadditivity": comonotone_superadditivity,
    "disjoint-superadditivity": disjoint_superadditivity,
    "knapsack": knapsack_dominance,
    "oracle-equivalence": oracle_equivalence,
    "frank": frank,
    "classical-reductions": classical_reductions,
}


def run_suite(name: str, seed: int = 0, size: int | None = None, **kw) -> CheckReport:
    try:
        fn = SUITES[name]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; known: {sorted(SUITES)}") from None
    if size is not None:
        kw["size"] = size
    return fn(seed=seed, **kw)
