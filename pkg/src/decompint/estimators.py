"""scikit-learn style wrappers: rows of ``X`` are the vectors to integrate."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import classical
from .core import (
    Base, Capacity, CapacityWeighting, Coefficients, Constraint, DecompSystem, Indicators,
    Orthant, validate_capacity,
)
from .decomp import integrate_many

METHODS = ("choquet", "shilkret", "sugeno", "pan", "concave", "convex")


def _check_nonnegative(X, n_features: int | None = None) -> np.ndarray:
    X = check_array(X, dtype=float, ensure_all_finite=True)
    if np.any(X < 0):
        raise ValueError("integrands must be nonnegative")
    if n_features is not None and X.shape[1] != n_features:
        raise ValueError(f"X has {X.shape[1]} features, expected {n_features}")
    return X


def _constraint(c) -> Constraint:
    if isinstance(c, Constraint):
        return c
    if isinstance(c, tuple):
        return Constraint(*c)
    return Constraint(c)


class DecompositionIntegral(TransformerMixin, BaseEstimator):
    """Sub- or super-decomposition integral of each row of ``X``.

    Parameters
    ----------
    weighting : Weighting
    generators : "indicators", "orthant" or array-like of shape (m, n_features)
    coefficients : {"real", "int", "unit"}
    constraint : str, ``(kind, k)`` or Constraint
    kind : {"sub", "super"}
    grid_step, parts : lattice options for whole-orthant systems
    """

    def __init__(self, weighting=None, generators="indicators", coefficients="real",
                 constraint="any", kind="sub", grid_step=None, parts=None):
        self.weighting = weighting
        self.generators = generators
        self.coefficients = coefficients
        self.constraint = constraint
        self.kind = kind
        self.grid_step = grid_step
        self.parts = parts

    def fit(self, X, y=None):
        X = _check_nonnegative(X)
        if self.weighting is None:
            raise ValueError("a weighting is required")
        if self.kind not in ("sub", "super"):
            raise ValueError(f"kind must be 'sub' or 'super', got {self.kind!r}")
        gens = {"indicators": Indicators(), "orthant": Orthant()}.get(self.generators) \
            if isinstance(self.generators, str) else self.generators
        if gens is None:
            raise ValueError(f"unknown generators {self.generators!r}")
        system = DecompSystem(X.shape[1], gens, Coefficients(self.coefficients),
                              _constraint(self.constraint))
        self.base_ = Base(system, self.weighting)
        self.n_features_in_ = X.shape[1]
        return self

    def results(self, X):
        check_is_fitted(self, "base_")
        X = _check_nonnegative(X, self.n_features_in_)
        return integrate_many(self.base_, X, self.kind, grid_step=self.grid_step,
                              parts=self.parts)

    def transform(self, X):
        return np.array([[r.value] for r in self.results(X)])


class CapacityIntegral(TransformerMixin, BaseEstimator):
    """Classical capacity integral of each row of ``X``.

    ``capacity`` is a Capacity or a mapping ``{subset: value}`` over 1-based
    subsets; ``method`` one of choquet, shilkret, sugeno, pan, concave, convex.
    """

    def __init__(self, capacity=None, method="choquet"):
        self.capacity = capacity
        self.method = method

    def fit(self, X, y=None):
        X = _check_nonnegative(X)
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        cap = self.capacity
        if cap is None:
            raise ValueError("a capacity is required")
        if not isinstance(cap, Capacity):
            cap = Capacity.from_mapping(X.shape[1], cap)
        if cap.n != X.shape[1]:
            raise ValueError(f"capacity is on {cap.n} elements, X has {X.shape[1]} features")
        report = validate_capacity(cap)
        if not report:
            raise ValueError(f"invalid capacity: {report.violation.detail}")
        self.capacity_ = cap
        self.weighting_ = CapacityWeighting(cap)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "capacity_")
        X = _check_nonnegative(X, self.n_features_in_)
        fn = getattr(classical, self.method)
        return np.array([[fn(self.capacity_, x)] for x in X])
