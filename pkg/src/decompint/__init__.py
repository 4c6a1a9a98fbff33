"""Decomposition integrals: sub- and super-decomposition integrals of nonnegative vectors."""
from .classical import (
    LevelDependentCapacity, choquet, concave, convex, level_dependent_choquet, pan, shilkret,
    sugeno,
)
from .core import (
    ANY, CHAIN, COMONOTONE, PARTITION, Base, BoxGrid, Capacity, CapacityWeighting, ClosedForm,
    Coefficients, Collections, Constraint, DecompSystem, DomainError, Indicators, MaxCoord,
    MaxLog, Orthant, ProbabilisticSum, Product, StructuralError, TableWeighting, WeightedSum,
    WeightingError, XPlusSqrtY, closed_form, disjoint_support, max_parts, validate_capacity,
    validate_weighting,
)
from .decomp import (
    IntegralResult, Piece, Status, UnsupportedBase, comonotone_integral,
    disjoint_support_integral, fixed_length_integral, frank_check, integrate_many,
    is_sub_integrable, iterated_sub_integral, knapsack_integral, max_pseudo_integral,
    sub_integral, subadditive_transform, super_integral, superadditive_transform,
)
from .estimators import CapacityIntegral, DecompositionIntegral

__version__ = "0.1.0"
