import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from decompint import classical
from decompint.core import MaxLog, TableWeighting
from decompint.estimators import CapacityIntegral, DecompositionIntegral

from reference import WORKERS, workers_capacity


def test_params_roundtrip_and_clone():
    est = CapacityIntegral(method="pan")
    assert est.get_params() == {"capacity": None, "method": "pan"}
    est.set_params(method="sugeno")
    assert clone(est).method == "sugeno"


def test_not_fitted():
    with pytest.raises(NotFittedError):
        CapacityIntegral(workers_capacity()).transform(np.ones((1, 4)))
    with pytest.raises(NotFittedError):
        DecompositionIntegral(MaxLog()).transform(np.ones((1, 2)))


def test_rejects_negative_and_wrong_width():
    est = CapacityIntegral(workers_capacity(), "concave")
    with pytest.raises(ValueError):
        est.fit(-np.ones((1, 4)))
    est.fit(np.ones((1, 4)))
    with pytest.raises(ValueError):
        est.transform(np.ones((1, 3)))
    with pytest.raises(ValueError):
        CapacityIntegral(workers_capacity(), "bogus").fit(np.ones((1, 4)))


def test_capacity_integral_values():
    X = np.array([[1, 1, 1, 1], [0.5, 2, 0, 1]], dtype=float)
    m = workers_capacity()
    out = CapacityIntegral(m, "concave").fit_transform(X)
    assert out.shape == (2, 1)
    assert out[0, 0] == pytest.approx(4.6)
    assert out[1, 0] == pytest.approx(classical.concave(m, X[1]))


def test_capacity_from_mapping():
    cap = {(): 0, (1,): 1, (2,): 2, (1, 2): 3}
    out = CapacityIntegral(cap, "choquet").fit_transform([[1.0, 1.0]])
    assert out[0, 0] == pytest.approx(3.0)


def test_decomposition_integral_workers():
    est = DecompositionIntegral(TableWeighting(WORKERS), generators=np.array(list(WORKERS)),
                                coefficients="unit")
    out = est.fit_transform([[2.0, 2.0], [0.0, 0.0], [1.0, 0.0]])
    assert out.ravel().tolist() == pytest.approx([4.6, 0.0, 1.0])
    assert est.results([[2, 2]])[0].witness


def test_decomposition_integral_orthant():
    est = DecompositionIntegral(MaxLog(), generators="orthant").fit(np.zeros((1, 2)))
    assert est.transform([[1.0, 2.0]])[0, 0] == pytest.approx(3.0, abs=0.05)
    with pytest.raises(ValueError):
        DecompositionIntegral(MaxLog(), kind="sideways").fit(np.zeros((1, 2)))
