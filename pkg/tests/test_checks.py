import numpy as np
import pytest

from decompint import checks
from decompint.core import Base, comonotone


@pytest.mark.parametrize("name", sorted(set(checks.SUITES) - {"comonotone-superadditivity"}))
def test_small_runs_pass(name):
    rep = checks.run_suite(name, seed=3, size=8)
    assert rep.total >= 8 and rep.ok, rep.summary()


def test_comonotone_small_run():
    rep = checks.run_suite("comonotone-superadditivity", seed=1, size=3)
    assert rep.ok, rep.summary()


def test_unknown_suite():
    with pytest.raises(ValueError):
        checks.run_suite("nope")


def test_report_records_first_counterexample():
    rep = checks.CheckReport("demo")
    rep.record(True, 0.1)
    rep.record(False, 0.5, x=1)
    rep.record(False, 0.2, x=2)
    assert not rep.ok and rep.counterexample == {"x": 1} and rep.max_residual == 0.5
    assert "1/3 passed" in rep.summary()


def test_generators_are_seeded():
    a = checks.random_finite_base(np.random.default_rng(9))
    b = checks.random_finite_base(np.random.default_rng(9))
    assert isinstance(a, Base) and a.system.generators == b.system.generators
    assert a.system.constraint == b.system.constraint
    m = checks.random_capacity(np.random.default_rng(0), 3)
    assert m[0] == 0 and m[7] > 0
    x, z = checks.random_comonotone_pair(np.random.default_rng(0), 3)
    assert comonotone(x, z)
