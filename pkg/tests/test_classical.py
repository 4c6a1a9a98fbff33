import numpy as np
import pytest

from decompint import classical, oracle
from decompint.checks import random_capacity
from decompint.classical import LevelDependentCapacity
from decompint.core import (
    Base, Capacity, CapacityWeighting, Coefficients, DecompSystem, Indicators, StructuralError,
)
from decompint.decomp import max_pseudo_integral

from reference import workers_capacity

METHODS = ["choquet", "shilkret", "sugeno", "pan", "concave", "convex"]


def ones_capacity(n):
    return Capacity(n, [0.0] + [1.0] * ((1 << n) - 1))


def test_additive_capacity_gives_weighted_sum():
    m = Capacity.additive([1.0, 2.0, 0.5])
    x = np.array([2.0, 1.0, 4.0])
    for f in (classical.choquet, classical.pan, classical.concave, classical.convex):
        assert f(m, x) == pytest.approx(6.0)


def test_all_ones_capacity():
    x = [0.3, 2.0, 1.1]
    assert classical.choquet(ones_capacity(3), x) == pytest.approx(2.0)
    assert classical.shilkret(ones_capacity(3), x) == pytest.approx(2.0)


def test_constant_vectors():
    m = random_capacity(np.random.default_rng(0), 3)
    assert classical.shilkret(m, [2, 2, 2]) == pytest.approx(2 * m[7])
    big = Capacity(2, [0, 3, 3, 5])
    assert classical.sugeno(big, [2, 2]) == 2
    top = Capacity(3, [0] * 7 + [0.5])
    assert classical.sugeno(top, [1, 2, 3]) == 0.5


def test_one_element():
    m = Capacity(1, [0, 1.5])
    assert classical.pan(m, [2]) == 3.0
    assert oracle.brute_partitions(m, [2]) == 3.0


def test_workers_concave_value():
    assert classical.concave(workers_capacity(), [1, 1, 1, 1]) == pytest.approx(4.6, abs=1e-9)


@pytest.mark.parametrize("method", METHODS)
def test_zero_vector(method):
    m = random_capacity(np.random.default_rng(1), 3)
    assert getattr(classical, method)(m, [0, 0, 0]) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("seed", range(15))
def test_shilkret_and_sugeno_against_enumeration(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 5))
    m = random_capacity(rng, n)
    x = rng.uniform(0, 3, n)
    sets = range(1, 1 << n)
    mins = {E: min(x[i] for i in range(n) if E >> i & 1) for E in sets}
    assert classical.shilkret(m, x) == pytest.approx(max(m[E] * mins[E] for E in sets))
    assert classical.sugeno(m, x) == pytest.approx(max(min(m[E], mins[E]) for E in sets))
    base = Base(DecompSystem(n, Indicators()), CapacityWeighting(m, "min"))
    assert max_pseudo_integral(base, x).value == pytest.approx(classical.sugeno(m, x))
    base = Base(DecompSystem(n, Indicators()), CapacityWeighting(m))
    assert max_pseudo_integral(base, x).value == pytest.approx(classical.shilkret(m, x))


@pytest.mark.parametrize("seed", range(15))
def test_pan_against_partition_enumeration(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 6))
    m = random_capacity(rng, n)
    x = rng.uniform(0, 3, n)
    value, blocks = classical.pan_partition(m, x)
    assert value == pytest.approx(oracle.brute_partitions(m, x), abs=1e-9)
    assert sum(blocks) == m.full and all(not a & b for i, a in enumerate(blocks)
                                         for b in blocks[i + 1:])


@pytest.mark.parametrize("seed", range(10))
def test_concave_against_lattice_enumeration(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    m = random_capacity(rng, n)
    x = rng.integers(0, 3, n).astype(float)
    base = Base(DecompSystem(n, Indicators(), Coefficients.REAL), CapacityWeighting(m))
    assert classical.concave(m, x) == pytest.approx(oracle.brute_sub(base, x, delta=0.5),
                                                    abs=1e-9)


@pytest.mark.parametrize("seed", range(20))
def test_ordering_between_integrals(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 5))
    m = random_capacity(rng, n)
    x = rng.uniform(0, 3, n)
    sh, pa, ch, cv = (classical.shilkret(m, x), classical.pan(m, x), classical.choquet(m, x),
                      classical.concave(m, x))
    assert sh <= pa + 1e-9 <= cv + 2e-9
    assert ch <= cv + 1e-9
    assert classical.convex(m, x) <= ch + 1e-9


@pytest.mark.parametrize("method", METHODS)
def test_monotone_in_x(method):
    rng = np.random.default_rng(7)
    f = getattr(classical, method)
    for _ in range(20):
        n = int(rng.integers(1, 5))
        m = random_capacity(rng, n)
        x = rng.uniform(0, 2, n)
        y = x + rng.uniform(0, 1, n)
        assert f(m, x) <= f(m, y) + 1e-9


def test_level_dependent_constant_slices_is_choquet():
    rng = np.random.default_rng(2)
    m = random_capacity(rng, 3)
    nu = LevelDependentCapacity((0.0, 10.0), (m,))
    for _ in range(10):
        x = rng.uniform(0, 5, 3)
        assert classical.level_dependent_choquet(nu, x) == classical.choquet(m, x)


def test_level_dependent_interval_decomposition():
    rng = np.random.default_rng(4)
    a, b = random_capacity(rng, 3), random_capacity(rng, 3)
    nu = LevelDependentCapacity((0.0, 2.5), (a,), tail=b)
    x = np.array([3.0, 2.0, 5.0])
    # level sets: {1,2,3} on [0,2), {1,3} on [2,3), {3} on [3,5)
    expected = 2 * a[0b111] + 0.5 * a[0b101] + 0.5 * b[0b101] + 2 * b[0b100]
    assert classical.level_dependent_choquet(nu, x) == pytest.approx(expected)


def test_level_dependent_against_riemann_sum():
    a = Capacity(2, [0, 1, 2, 3])
    b = Capacity(2, [0, 2, 2, 5])
    nu = LevelDependentCapacity((0.0, 1.3, 4.0), (a, b))
    x = np.array([2.2, 3.1])
    h = 1e-4
    ts = np.arange(0, x.max(), h) + h / 2
    riemann = sum(nu.at(t)[sum(1 << i for i in range(2) if x[i] >= t)] for t in ts) * h
    assert classical.level_dependent_choquet(nu, x) == pytest.approx(riemann, abs=1e-3)


def test_level_dependent_validation():
    m = Capacity.additive([1, 1])
    with pytest.raises(StructuralError):
        LevelDependentCapacity((1.0, 2.0), (m,))
    with pytest.raises(StructuralError):
        LevelDependentCapacity((0.0, 1.0), (m, m))
    nu = LevelDependentCapacity((0.0, 1.0), (m,))
    with pytest.raises(ValueError):
        classical.level_dependent_choquet(nu, [2, 0])
