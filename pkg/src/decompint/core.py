"""Domain types and elementary predicates shared by every solver.

Vectors are 1-D float64 numpy arrays.  Subsets of ``N = {1, ..., n}`` are
bitmasks: bit ``i`` stands for element ``i + 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

EPS = 1e-9
MAX_N = 20


class StructuralError(ValueError):
    """Malformed input: missing subset entries, length mismatches, empty samples."""


class DomainError(ValueError):
    """A weighting was evaluated at a vector outside its domain."""


class WeightingError(ValueError):
    """A set of values fails the boundary conditions of a weighting function."""


# --------------------------------------------------------------------------
# vectors and subsets

def as_vector(x, n: int | None = None) -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        raise StructuralError(f"expected a 1-D vector, got shape {v.shape}")
    if v.size == 0:
        raise StructuralError("vector must have at least one entry")
    if n is not None and v.size != n:
        raise StructuralError(f"expected length {n}, got {v.size}")
    if not np.all(np.isfinite(v)):
        raise StructuralError("vector entries must be finite")
    if np.any(v < 0):
        raise StructuralError(f"vector entries must be nonnegative: {v.tolist()}")
    return v


def _same_length(x, y) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise StructuralError(f"length mismatch: {x.shape} vs {y.shape}")
    return x, y


def leq(x, y, tol: float = 0.0) -> bool:
    """Componentwise ``x <= y`` (with optional slack ``tol``)."""
    x, y = _same_length(x, y)
    return bool(np.all(x <= y + tol))


def comonotone(x, y, tol: float = 0.0) -> bool:
    """True iff ``(x_i - x_j)(y_i - y_j) >= 0`` for every pair of coordinates."""
    x, y = _same_length(x, y)
    dx = x[:, None] - x[None, :]
    dy = y[:, None] - y[None, :]
    return bool(np.all(dx * dy >= -tol))


def indicator(mask: int, c: float, n: int) -> np.ndarray:
    if c < 0:
        raise ValueError("indicator height must be nonnegative")
    out = np.zeros(n)
    for i in range(n):
        if mask >> i & 1:
            out[i] = c
    return out


def mask_from_subset(subset: Iterable[int]) -> int:
    """1-based element list -> bitmask."""
    mask = 0
    for i in subset:
        i = int(i)
        if i < 1:
            raise StructuralError(f"subset elements are 1-based, got {i}")
        mask |= 1 << (i - 1)
    return mask


def subset_from_mask(mask: int) -> list[int]:
    out, i = [], 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def support_mask(x, tol: float = EPS) -> int:
    mask = 0
    for i, v in enumerate(np.asarray(x, dtype=float)):
        if v > tol:
            mask |= 1 << i
    return mask


def indicator_shape(y, tol: float = EPS) -> tuple[int, float] | None:
    """Return ``(E, c)`` with ``y = c * 1_E``, or None if y is not of that shape."""
    y = np.asarray(y, dtype=float)
    mask = support_mask(y, tol)
    if mask == 0:
        return 0, 0.0
    vals = y[y > tol]
    c = float(vals.max())
    if c - float(vals.min()) > tol * max(1.0, c):
        return None
    return mask, c


def popcount(mask: int) -> int:
    return bin(mask).count("1")


# --------------------------------------------------------------------------
# validation reports

@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str
    witness: tuple = ()


@dataclass(frozen=True)
class Report:
    ok: bool
    violation: Violation | None = None

    def __bool__(self) -> bool:
        return self.ok


OK = Report(True)


# --------------------------------------------------------------------------
# capacities

class Capacity:
    """Set function on ``2^N`` stored densely, indexed by bitmask.

    Construction only checks structure (size, finiteness); the three capacity
    conditions are checked by :func:`validate_capacity` so that violating maps
    can still be built and reported on.
    """

    def __init__(self, n: int, values: Sequence[float]):
        if not 1 <= n <= MAX_N:
            raise StructuralError(f"ground set size must be in [1, {MAX_N}], got {n}")
        arr = np.array(values, dtype=float)
        if arr.shape != (1 << n,):
            raise StructuralError(f"expected {1 << n} subset values, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise StructuralError("capacity values must be finite")
        arr.setflags(write=False)
        self.n = n
        self.values = arr

    @classmethod
    def from_mapping(cls, n: int, mapping: Mapping) -> "Capacity":
        """Build from ``{subset: value}``; keys are masks or 1-based index iterables.

        Every subset, the empty set included, must be present.
        """
        values = [None] * (1 << n)
        for key, val in mapping.items():
            mask = key if isinstance(key, (int, np.integer)) else mask_from_subset(key)
            if mask >= 1 << n:
                raise StructuralError(f"subset {subset_from_mask(mask)} outside N={{1..{n}}}")
            values[mask] = float(val)
        missing = [m for m, v in enumerate(values) if v is None]
        if missing:
            raise StructuralError(f"missing value for subset {subset_from_mask(missing[0])}")
        return cls(n, values)

    @classmethod
    def from_function(cls, n: int, f: Callable[[int], float]) -> "Capacity":
        return cls(n, [f(mask) for mask in range(1 << n)])

    @classmethod
    def additive(cls, weights: Sequence[float]) -> "Capacity":
        w = [float(v) for v in weights]
        n = len(w)
        return cls(n, [sum(w[i] for i in range(n) if m >> i & 1) for m in range(1 << n)])

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def __getitem__(self, mask: int) -> float:
        return float(self.values[mask])

    def of(self, subset: Iterable[int]) -> float:
        return self[mask_from_subset(subset)]

    def to_mapping(self) -> dict[tuple[int, ...], float]:
        return {tuple(subset_from_mask(m)): float(v) for m, v in enumerate(self.values)}

    def __eq__(self, other) -> bool:
        return isinstance(other, Capacity) and self.n == other.n and np.array_equal(
            self.values, other.values)

    def __hash__(self) -> int:
        return hash((self.n, self.values.tobytes()))

    def __repr__(self) -> str:
        return f"Capacity(n={self.n}, m(N)={self[self.full]:g})"


def validate_capacity(c: Capacity | Mapping, n: int | None = None) -> Report:
    """Check ``m(empty) = 0``, ``m(N) > 0`` and monotonicity along every edge E -> E+{i}.

    A mapping with a missing subset raises :class:`StructuralError`; a
    violated condition is returned as a failed :class:`Report`.
    """
    if not isinstance(c, Capacity):
        if n is None:
            raise StructuralError("ground set size n is required for a mapping")
        c = Capacity.from_mapping(n, c)
    v = c.values
    if abs(v[0]) > EPS:
        return Report(False, Violation("empty-set", f"m(empty) = {v[0]:g}, expected 0", ((),)))
    if v[c.full] <= EPS:
        return Report(False, Violation("full-set", f"m(N) = {v[c.full]:g}, expected > 0",
                                       (tuple(range(1, c.n + 1)),)))
    for mask in range(1 << c.n):
        for i in range(c.n):
            bit = 1 << i
            if mask & bit:
                continue
            if v[mask] > v[mask | bit] + EPS:
                e, f = subset_from_mask(mask), subset_from_mask(mask | bit)
                return Report(False, Violation(
                    "monotonicity", f"m({e}) = {v[mask]:g} > m({f}) = {v[mask | bit]:g}",
                    (tuple(e), tuple(f))))
    return OK


# --------------------------------------------------------------------------
# weightings

class Weighting:
    """Nonnegative monotone valuation of decomposition pieces.

    ``linear`` marks weightings whose value on ``alpha * g`` is
    ``alpha * A(g)``; only those can be optimized by linear programming
    when coefficients are continuous.
    """

    linear = False
    n: int | None = None

    def __call__(self, y) -> float:
        raise NotImplementedError

    def weight(self, g, alpha: float = 1.0) -> float:
        """Value of the piece ``alpha * g`` for a generator ``g``."""
        return self(alpha * np.asarray(g, dtype=float))

    def evaluate(self, Y) -> np.ndarray:
        Y = np.asarray(Y, dtype=float)
        return np.array([self(row) for row in Y.reshape(-1, Y.shape[-1])]).reshape(Y.shape[:-1])

    def in_domain(self, y) -> bool:
        try:
            self(y)
        except DomainError:
            return False
        return True


def _key(y) -> tuple[float, ...]:
    return tuple(round(float(v), 12) + 0.0 for v in y)


class TableWeighting(Weighting):
    """Finite table of values; scaled pieces are valued positively homogeneously."""

    linear = True

    def __init__(self, entries: Mapping | Iterable[tuple[Sequence[float], float]]):
        items = entries.items() if isinstance(entries, Mapping) else entries
        table: dict[tuple[float, ...], float] = {}
        for vec, val in items:
            val = float(val)
            if val < 0 or not math.isfinite(val):
                raise StructuralError(f"table value must be finite and nonnegative, got {val}")
            table[_key(vec)] = val
        if not table:
            raise StructuralError("weighting table is empty")
        lengths = {len(k) for k in table}
        if len(lengths) != 1:
            raise StructuralError("table vectors have different lengths")
        self.n = lengths.pop()
        self.table = table

    def __call__(self, y) -> float:
        k = _key(y)
        if k in self.table:
            return self.table[k]
        if all(v == 0 for v in k):
            return 0.0
        raise DomainError(f"{list(k)} is not in the weighting table")

    def weight(self, g, alpha: float = 1.0) -> float:
        return alpha * self(g)

    def vectors(self) -> list[tuple[float, ...]]:
        return list(self.table)

    def __repr__(self) -> str:
        return f"TableWeighting({len(self.table)} entries)"


class CapacityWeighting(Weighting):
    """``A(c * 1_E) = c * m(E)`` (``combine="product"``) or ``min(c, m(E))``."""

    def __init__(self, capacity: Capacity, combine: str = "product"):
        if combine not in ("product", "min"):
            raise ValueError(f"combine must be 'product' or 'min', got {combine!r}")
        self.capacity = capacity
        self.combine = combine
        self.n = capacity.n
        self.linear = combine == "product"

    def __call__(self, y) -> float:
        shape = indicator_shape(y)
        if shape is None:
            raise DomainError(f"{np.asarray(y).tolist()} is not of the form c * 1_E")
        mask, c = shape
        if mask == 0:
            return 0.0
        m = self.capacity[mask]
        return c * m if self.combine == "product" else min(c, m)

    def __repr__(self) -> str:
        return f"CapacityWeighting({self.capacity!r}, combine={self.combine!r})"


class ClosedForm(Weighting):
    """Named formula weighting, vectorized over the last axis."""

    name = ""
    upper: tuple[float, ...] | None = None

    def params(self) -> dict:
        return {}

    def formula(self, Y: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _check(self, Y: np.ndarray) -> None:
        if self.n is not None and Y.shape[-1] != self.n:
            raise DomainError(f"{self.name} expects vectors of length {self.n}")
        if np.any(Y < -EPS):
            raise DomainError("negative entries")
        if self.upper is not None and np.any(Y > np.asarray(self.upper) + EPS):
            raise DomainError(f"{self.name} is defined on the box [0, {list(self.upper)}]")

    def evaluate(self, Y) -> np.ndarray:
        Y = np.asarray(Y, dtype=float)
        self._check(Y)
        return self.formula(Y)

    def __call__(self, y) -> float:
        return float(self.evaluate(np.asarray(y, dtype=float)))

    def dominating_constant(self) -> float | None:
        """Some ``c`` with ``A(y) <= c * max(y)`` on the domain, if one is known."""
        return None

    def __eq__(self, other) -> bool:
        return type(self) is type(other) and self.params() == other.params()

    def __hash__(self) -> int:
        return hash((self.name, repr(sorted(self.params().items()))))

    def __repr__(self) -> str:
        args = ", ".join(f"{k}={v!r}" for k, v in self.params().items())
        return f"{type(self).__name__}({args})"


class WeightedSum(ClosedForm):
    name = "WeightedSum"
    linear = True

    def __init__(self, w: Sequence[float]):
        self.w = np.asarray(w, dtype=float)
        if self.w.ndim != 1 or np.any(self.w < 0) or not np.any(self.w > 0):
            raise WeightingError("weights must be nonnegative and not all zero")
        self.n = self.w.size

    def params(self) -> dict:
        return {"w": self.w.tolist()}

    def formula(self, Y):
        return Y @ self.w

    def dominating_constant(self):
        return float(self.w.sum())


class MaxCoord(ClosedForm):
    name = "MaxCoord"
    linear = True

    def __init__(self, c: float = 1.0, n: int | None = None):
        if c <= 0:
            raise WeightingError("c must be positive")
        self.c = float(c)
        self.n = n

    def params(self) -> dict:
        return {"c": self.c}

    def formula(self, Y):
        return self.c * Y.max(axis=-1)

    def dominating_constant(self):
        return self.c


class ProbabilisticSum(ClosedForm):
    """``1 - prod(1 - y_i)`` on the unit box (``x + y - xy`` for n = 2)."""

    name = "ProbabilisticSum"

    def __init__(self, n: int = 2):
        self.n = n
        self.upper = (1.0,) * n

    def params(self) -> dict:
        return {"n": self.n}

    def formula(self, Y):
        return 1.0 - np.prod(1.0 - Y, axis=-1)

    def dominating_constant(self):
        return float(self.n)


class Product(ClosedForm):
    name = "Product"

    def __init__(self, n: int = 2):
        self.n = n

    def params(self) -> dict:
        return {"n": self.n}

    def formula(self, Y):
        return np.prod(Y, axis=-1)


class MaxLog(ClosedForm):
    """``max_i ln(1 + y_i)``."""

    name = "MaxLog"

    def __init__(self, n: int = 2):
        self.n = n

    def params(self) -> dict:
        return {"n": self.n}

    def formula(self, Y):
        return np.log1p(Y.max(axis=-1))

    def dominating_constant(self):
        return 1.0


class XPlusSqrtY(ClosedForm):
    """``x + sqrt(y)`` on the plane; subadditive, and unbounded under fine splitting."""

    name = "XPlusSqrtY"
    n = 2

    def formula(self, Y):
        return Y[..., 0] + np.sqrt(Y[..., 1])


CLOSED_FORMS: dict[str, type[ClosedForm]] = {
    cls.name: cls for cls in (WeightedSum, MaxCoord, ProbabilisticSum, Product, MaxLog, XPlusSqrtY)
}


def closed_form(name: str, **params) -> ClosedForm:
    try:
        cls = CLOSED_FORMS[name]
    except KeyError:
        raise StructuralError(f"unknown closed form {name!r}; known: {sorted(CLOSED_FORMS)}")
    return cls(**params)


def validate_weighting(w: Weighting, domain_sample: Sequence) -> Report:
    """Monotonicity on comparable sample pairs plus the boundary conditions."""
    sample = [np.asarray(y, dtype=float) for y in domain_sample]
    if not sample:
        raise StructuralError("domain sample is empty")
    vals = [w(y) for y in sample]
    for y, v in zip(sample, vals):
        if v < -EPS:
            return Report(False, Violation("negative", f"A({y.tolist()}) = {v:g}", (tuple(y),)))
        if not np.any(y > EPS) and abs(v) > EPS:
            return Report(False, Violation("boundary", f"A(0) = {v:g}, expected 0", (tuple(y),)))
    for i, (y, vy) in enumerate(zip(sample, vals)):
        for z, vz in zip(sample[i + 1:], vals[i + 1:]):
            if leq(y, z) and vy > vz + EPS:
                return Report(False, Violation(
                    "monotonicity", f"A({y.tolist()}) = {vy:g} > A({z.tolist()}) = {vz:g}",
                    (tuple(y), tuple(z))))
            if leq(z, y) and vz > vy + EPS:
                return Report(False, Violation(
                    "monotonicity", f"A({z.tolist()}) = {vz:g} > A({y.tolist()}) = {vy:g}",
                    (tuple(z), tuple(y))))
    if max(vals) <= EPS:
        return Report(False, Violation("boundary", "no sampled point has a positive value"))
    return OK


# --------------------------------------------------------------------------
# decomposition systems

class Coefficients(str, Enum):
    REAL = "real"   # pieces alpha * g, alpha >= 0
    INT = "int"     # pieces alpha * g, alpha a nonnegative integer
    UNIT = "unit"   # pieces are generators themselves (repetition allowed)


@dataclass(frozen=True)
class Constraint:
    """Restriction on which collections are allowed.

    kinds: ``any``, ``chain`` (generator supports nested), ``partition``
    (supports partition N), ``comonotone`` (members pairwise comonotone),
    ``disjoint`` (at most k members, pairwise disjoint supports),
    ``max_parts`` (at most k members).
    """

    kind: str = "any"
    k: int | None = None

    KINDS = ("any", "chain", "partition", "comonotone", "disjoint", "max_parts")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise StructuralError(f"unknown constraint {self.kind!r}")
        if self.kind in ("disjoint", "max_parts"):
            if self.k is None or self.k < 1:
                raise StructuralError(f"{self.kind} needs k >= 1")
        elif self.k is not None:
            raise StructuralError(f"{self.kind} takes no k")

    def __str__(self) -> str:
        return self.kind if self.k is None else f"{self.kind}({self.k})"


ANY = Constraint("any")
CHAIN = Constraint("chain")
PARTITION = Constraint("partition")
COMONOTONE = Constraint("comonotone")


def disjoint_support(k: int) -> Constraint:
    return Constraint("disjoint", k)


def max_parts(k: int) -> Constraint:
    return Constraint("max_parts", k)


@dataclass(frozen=True)
class Indicators:
    """All ``1_E`` for nonempty ``E``, in increasing mask order."""


@dataclass(frozen=True)
class Orthant:
    """Every nonnegative vector is an admissible piece."""


@dataclass(frozen=True)
class BoxGrid:
    """Pieces are the nonzero points of ``h * Z^n`` inside ``[0, upper]``."""

    upper: tuple[float, ...]
    step: float = 1 / 64

    def __post_init__(self):
        object.__setattr__(self, "upper", tuple(float(u) for u in self.upper))
        if self.step <= 0:
            raise StructuralError("grid step must be positive")
        if any(u < 0 for u in self.upper) or not any(u >= self.step for u in self.upper):
            raise StructuralError("box must contain a nonzero grid point")


@dataclass(frozen=True)
class Collections:
    """An explicit finite list of allowed collections."""

    members: tuple[tuple[tuple[float, ...], ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(
            tuple(_key(v) for v in coll) for coll in self.members))
        if not self.members or not any(any(any(c > 0 for c in v) for v in coll)
                                       for coll in self.members):
            raise StructuralError("at least one collection must contain a nonzero vector")


@dataclass(frozen=True, eq=False)
class DecompSystem:
    n: int
    generators: object
    coefficients: Coefficients = Coefficients.REAL
    constraint: Constraint = ANY
    _matrix: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "coefficients", Coefficients(self.coefficients))
        gens = self.generators
        if isinstance(gens, (Indicators, Orthant)):
            mat = None
        elif isinstance(gens, BoxGrid):
            if len(gens.upper) != self.n:
                raise StructuralError("box dimension differs from n")
            mat = None
        elif isinstance(gens, Collections):
            seen: dict[tuple, None] = {}
            for coll in gens.members:
                for v in coll:
                    if len(v) != self.n:
                        raise StructuralError("collection vector of wrong length")
                    seen.setdefault(v, None)
            mat = np.array([v for v in seen if any(c > 0 for c in v)], dtype=float)
        else:
            mat = np.array(gens, dtype=float)
            if mat.ndim != 2 or mat.shape[1] != self.n:
                raise StructuralError(f"generators must be an (m, {self.n}) array")
            if np.any(mat < 0):
                raise StructuralError("generators must be nonnegative")
            nonzero = np.any(mat > EPS, axis=1)
            if not np.any(nonzero):
                raise StructuralError("at least one generator must be nonzero")
            mat = mat[nonzero]
            object.__setattr__(self, "generators", tuple(map(tuple, mat.tolist())))
        if mat is not None:
            mat.setflags(write=False)
        object.__setattr__(self, "_matrix", mat)

    @property
    def finite(self) -> bool:
        """True when the generator set is a finite list (possibly scaled by coefficients)."""
        return not isinstance(self.generators, (Orthant, BoxGrid))

    def generator_matrix(self) -> np.ndarray:
        if isinstance(self.generators, Indicators):
            return np.array([indicator(m, 1.0, self.n) for m in range(1, 1 << self.n)])
        if self._matrix is None:
            raise StructuralError(f"{type(self.generators).__name__} has no generator list")
        return self._matrix


@dataclass(frozen=True, eq=False)
class Base:
    """A system of admissible collections together with a weighting of their pieces."""

    system: DecompSystem
    weighting: Weighting

    def __post_init__(self):
        sys_, w = self.system, self.weighting
        if w.n is not None and w.n != sys_.n:
            raise StructuralError(f"weighting dimension {w.n} differs from system dimension {sys_.n}")
        if isinstance(w, ClosedForm) and isinstance(sys_.generators, BoxGrid) and w.upper:
            if any(u > b + EPS for u, b in zip(sys_.generators.upper, w.upper)):
                raise DomainError(f"grid box exceeds the domain of {w.name}")
        if sys_.finite:
            G = sys_.generator_matrix()
            for g in G:
                if isinstance(w, CapacityWeighting) and indicator_shape(g) is None:
                    raise StructuralError(
                        f"capacity weighting needs indicator-shaped generators, got {g.tolist()}")
                w.weight(g)  # raises DomainError for uncovered generators

    @property
    def n(self) -> int:
        return self.system.n
