"""Property-based checks of the structural invariants."""
import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from decompint import classical, oracle
from decompint.checks import random_capacity, random_comonotone_pair, random_finite_base
from decompint.classical import LevelDependentCapacity
from decompint.core import (
    ANY, CHAIN, Base, Coefficients, DecompSystem, MaxLog, Product, ProbabilisticSum,
    TableWeighting, WeightedSum, comonotone, support_mask,
)
from decompint.decomp import (
    Status, comonotone_integral, disjoint_support_integral, sub_integral, super_integral,
    witness_sum, witness_value,
)

seeds = st.integers(0, 2**32 - 1)
fast = settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])


def _base_and_query(seed, **kw):
    rng = np.random.default_rng(seed)
    b = random_finite_base(rng, **kw)
    return b, rng.integers(0, 5, b.n).astype(float), rng


def _respects(constraint, witness, unit):
    vecs = [p.vector for p in witness]
    masks = [support_mask(v) for v in vecs]
    pairs = [(i, j) for i in range(len(vecs)) for j in range(i + 1, len(vecs))]
    if constraint.kind == "chain":
        return all(masks[i] & masks[j] in (masks[i], masks[j]) for i, j in pairs)
    if constraint.kind == "comonotone":
        return all(comonotone(vecs[i], vecs[j], 1e-9) for i, j in pairs)
    if constraint.kind in ("partition", "disjoint"):
        ok = all(not masks[i] & masks[j] for i, j in pairs)
        ok &= all(p.copies == 1 for p in witness)
        return ok and (constraint.kind != "disjoint" or len(vecs) <= constraint.k)
    if constraint.kind == "max_parts":
        parts = sum(p.copies for p in witness) if unit else len(witness)
        return parts <= constraint.k
    return True


@fast
@given(seeds)
def test_monotone_in_x(seed):
    b, y, rng = _base_and_query(seed)
    x = np.floor(rng.uniform(0, 1, b.n) * (y + 1))
    rx, ry = sub_integral(b, x), sub_integral(b, y)
    assert rx.status is Status.EXACT and ry.status is Status.EXACT
    assert rx.value <= ry.value + 1e-9


@fast
@given(seeds, st.booleans())
def test_witness_is_valid(seed, sub):
    b, x, _ = _base_and_query(seed)
    r = (sub_integral if sub else super_integral)(b, x)
    if r.status is Status.INFEASIBLE_DOMAIN:
        return
    assert r.status is Status.EXACT
    total = witness_sum(r.witness, b.n)
    assert np.all(total <= x + 1e-9) if sub else np.all(total >= x - 1e-9)
    assert abs(witness_value(b.weighting, r.witness) - r.value) <= 1e-7
    gens = set(b.system.generators)
    assert all(p.generator in gens for p in r.witness)
    assert _respects(b.system.constraint, r.witness, b.system.coefficients is Coefficients.UNIT)


@fast
@given(seeds)
def test_more_generators_and_weaker_constraint_nest(seed):
    rng = np.random.default_rng(seed)
    big = random_finite_base(rng, max_gens=6, constraint="chain")
    x = rng.integers(0, 5, big.n).astype(float)
    gens = big.system.generators
    keep = gens[: max(1, len(gens) // 2)]
    table = {g: big.weighting(g) for g in keep}
    small = Base(DecompSystem(big.n, keep, big.system.coefficients, CHAIN), TableWeighting(table))
    free = Base(DecompSystem(big.n, gens, big.system.coefficients, ANY), big.weighting)
    s_small, s_big, s_free = (sub_integral(b, x).value for b in (small, big, free))
    assert s_small <= s_big + 1e-9 <= s_free + 2e-9
    p_small, p_big, p_free = (super_integral(b, x) for b in (small, big, free))
    if p_small.finite:
        assert p_big.value <= p_small.value + 1e-9
    if p_big.finite:
        assert p_free.value <= p_big.value + 1e-9


@fast
@given(seeds)
def test_superadditive_weighting_dominates(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    A = Product(n) if n == 2 and rng.integers(0, 2) else WeightedSum(rng.uniform(0.1, 2, n))
    gens = [tuple(float(v) for v in rng.integers(1, 4, n)) for _ in range(int(rng.integers(1, 5)))]
    b = Base(DecompSystem(n, gens, Coefficients.UNIT), A)
    x = rng.integers(0, 7, n).astype(float)
    assert sub_integral(b, x).value <= A(x) + 1e-9
    g = np.asarray(gens[0])
    assert abs(sub_integral(b, g).value - A(g)) <= 1e-9


@fast
@given(seeds)
def test_choquet_comonotone_additive(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 6))
    m = random_capacity(rng, n)
    x, z = random_comonotone_pair(rng, n)
    lhs = classical.choquet(m, x + z)
    assert abs(lhs - classical.choquet(m, x) - classical.choquet(m, z)) <= 1e-9


@fast
@given(seeds)
def test_classical_ordering(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 5))
    m = random_capacity(rng, n)
    x = rng.uniform(0, 3, n)
    sh, pa, cv = classical.shilkret(m, x), classical.pan(m, x), classical.concave(m, x)
    assert sh <= pa + 1e-9 and pa <= cv + 1e-9
    assert classical.convex(m, x) <= classical.choquet(m, x) + 1e-9 <= cv + 2e-9


@fast
@given(seeds)
def test_level_dependent_constant_slices(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 5))
    m = random_capacity(rng, n)
    nu = LevelDependentCapacity((0.0, 1.0, 2.5), (m, m), tail=m)
    x = rng.uniform(0, 4, n)
    assert abs(classical.level_dependent_choquet(nu, x) - classical.choquet(m, x)) <= 1e-9


@fast
@given(seeds)
def test_oracle_invariant_under_relabeling(seed):
    rng = np.random.default_rng(seed)
    b = random_finite_base(rng, max_n=3, max_gens=4)
    x = rng.integers(0, 4, b.n).astype(float)
    perm = rng.permutation(b.n)
    order = rng.permutation(len(b.system.generators))
    gens = [tuple(b.system.generators[j][i] for i in perm) for j in order]
    table = {g: b.weighting(b.system.generators[j]) for g, j in zip(gens, order)}
    moved = Base(DecompSystem(b.n, gens, b.system.coefficients, b.system.constraint),
                 TableWeighting(table))
    assert abs(oracle.brute_sub(b, x) - oracle.brute_sub(moved, x[perm])) <= 1e-9
    a, c = oracle.brute_super(b, x), oracle.brute_super(moved, x[perm])
    assert (a is None) == (c is None)
    assert a is None or abs(a - c) <= 1e-9


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_disjoint_support_superadditive(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 5))
    A = [Product(n), MaxLog(n), ProbabilisticSum(n)][int(rng.integers(0, 3))]
    high = 1.0 if isinstance(A, ProbabilisticSum) else 3.0
    side = rng.integers(0, 2, n).astype(bool)
    x = np.where(side, rng.uniform(0, high, n), 0.0)
    z = np.where(~side, rng.uniform(0, high, n), 0.0)
    f = lambda v: disjoint_support_integral(A, v, n).value  # noqa: E731
    assert f(x) + f(z) <= f(x + z) + 1e-9


@settings(max_examples=8, deadline=None)
@given(seeds)
def test_comonotone_integral_superadditive_and_dominating(seed):
    rng = np.random.default_rng(seed)
    A = MaxLog(2)
    x, z = random_comonotone_pair(rng, 2, 2.0)
    vx, vz, vxz = (comonotone_integral(A, v).value for v in (x, z, x + z))
    assert vx + vz <= vxz + 1e-3
    assert A(x) <= vx + 1e-3
