"""JSON problem files: parsing, validation and canonical serialization.

A problem file is a JSON object::

    {
      "version": 1,
      "n": 2,
      "table": [{"vector": [1, 0], "value": 1.0}, ...],      # or
      "capacity": [{"subset": [1, 2], "value": 2.2}, ...],   # or
      "closed_form": {"name": "MaxLog", "params": {"n": 2}},
      "capacity_combine": "product",                          # capacity only
      "system": {"generators": ..., "coefficients": "unit", "constraint": "any"},
      "queries": [[2, 2]],
      "mode": "sub"
    }

``generators`` is ``"indicators"``, ``"orthant"``, a list of vectors,
``{"box": [...], "step": h}`` or ``{"collections": [[vector, ...], ...]}``;
``constraint`` is a kind name or ``{"kind": "disjoint", "k": 2}``.
Subsets are sorted 1-based index lists.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .core import (
    Base, BoxGrid, Capacity, CapacityWeighting, Coefficients, Collections, Constraint,
    DecompSystem, Indicators, Orthant, StructuralError, TableWeighting, closed_form,
    subset_from_mask,
)

VERSION = 1
MODES = ("sub", "super", "max", "iterated", "oracle", "oracle:sub", "oracle:super")
CLASSICAL = ("choquet", "shilkret", "sugeno", "pan", "concave", "convex")
WEIGHTING_KEYS = ("table", "capacity", "closed_form")


class ProblemError(ValueError):
    """Malformed problem file; ``field`` names the offending entry."""

    def __init__(self, field_: str, message: str):
        super().__init__(f"{field_}: {message}")
        self.field = field_


def _num(v: Any) -> float | int:
    f = float(v)
    return int(f) if f.is_integer() else f


def _vec(v, n: int, where: str) -> list:
    if not isinstance(v, list) or len(v) != n:
        raise ProblemError(where, f"expected a list of {n} numbers")
    try:
        out = [_num(t) for t in v]
    except (TypeError, ValueError):
        raise ProblemError(where, "entries must be numbers") from None
    if any(t < 0 for t in out):
        raise ProblemError(where, "entries must be nonnegative")
    return out


def valid_mode(mode: str) -> bool:
    if mode in MODES:
        return True
    head, _, tail = mode.partition(":")
    if head == "classical":
        return tail in CLASSICAL
    if head == "check":
        from .checks import SUITES
        return tail in SUITES
    return False


@dataclass
class ProblemFile:
    n: int
    system: dict
    queries: list[list]
    mode: str = "sub"
    table: list[dict] | None = None
    capacity: list[dict] | None = None
    closed_form: dict | None = None
    capacity_combine: str = "product"
    version: int = VERSION
    extra: dict = field(default_factory=dict)

    # -- parsing -----------------------------------------------------------

    @classmethod
    def from_dict(cls, doc: dict) -> "ProblemFile":
        if not isinstance(doc, dict):
            raise ProblemError("<root>", "expected a JSON object")
        if doc.get("version", VERSION) != VERSION:
            raise ProblemError("version", f"unsupported version {doc.get('version')!r}")
        n = doc.get("n")
        if not isinstance(n, int) or n < 1:
            raise ProblemError("n", "must be a positive integer")
        sources = [k for k in WEIGHTING_KEYS if doc.get(k) is not None]
        if len(sources) != 1:
            raise ProblemError("weighting", f"exactly one of {WEIGHTING_KEYS} is required, "
                                            f"found {sources or 'none'}")
        mode = doc.get("mode", "sub")
        if not isinstance(mode, str) or not valid_mode(mode):
            raise ProblemError("mode", f"unknown mode {mode!r}")
        queries = doc.get("queries", [])
        if not isinstance(queries, list):
            raise ProblemError("queries", "expected a list of vectors")
        queries = [_vec(q, n, f"queries[{i}]") for i, q in enumerate(queries)]
        table = capacity = cf = None
        if "table" in sources:
            rows = doc["table"]
            if not isinstance(rows, list) or not rows:
                raise ProblemError("table", "expected a nonempty list of {vector, value}")
            table = [{"vector": _vec(r.get("vector"), n, f"table[{i}].vector"),
                      "value": _num(r.get("value"))} for i, r in enumerate(rows)]
        elif "capacity" in sources:
            rows = doc["capacity"]
            if not isinstance(rows, list):
                raise ProblemError("capacity", "expected a list of {subset, value}")
            capacity = []
            for i, r in enumerate(rows):
                sub = r.get("subset")
                if not isinstance(sub, list) or any(not isinstance(t, int) or not 1 <= t <= n
                                                    for t in sub):
                    raise ProblemError(f"capacity[{i}].subset", f"expected indices in 1..{n}")
                capacity.append({"subset": sorted(set(sub)), "value": _num(r.get("value"))})
            if not any(not r["subset"] for r in capacity):
                capacity.insert(0, {"subset": [], "value": 0})
        else:
            raw = doc["closed_form"]
            if not isinstance(raw, dict) or "name" not in raw:
                raise ProblemError("closed_form", "expected {name, params}")
            cf = {"name": raw["name"], "params": dict(raw.get("params", {}))}
        system = doc.get("system")
        if not isinstance(system, dict):
            raise ProblemError("system", "expected an object")
        pf = cls(n=n, system=system, queries=queries, mode=mode, table=table, capacity=capacity,
                 closed_form=cf, capacity_combine=doc.get("capacity_combine", "product"),
                 extra={k: v for k, v in doc.items() if k not in cls._KNOWN})
        pf.base()  # full structural validation
        return pf

    _KNOWN = {"version", "n", "system", "queries", "mode", "table", "capacity", "closed_form",
              "capacity_combine"}

    @classmethod
    def loads(cls, text: str) -> "ProblemFile":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise ProblemError(f"line {e.lineno}", e.msg) from None
        return cls.from_dict(doc)

    @classmethod
    def load(cls, path: str | Path) -> "ProblemFile":
        return cls.loads(Path(path).read_text())

    # -- serialization -------------------------------------------------------

    def to_dict(self) -> dict:
        doc: dict[str, Any] = {"version": self.version, "n": self.n, "system": self.system,
                               "queries": self.queries, "mode": self.mode}
        if self.table is not None:
            doc["table"] = self.table
        if self.capacity is not None:
            doc["capacity"] = self.capacity
            if self.capacity_combine != "product":
                doc["capacity_combine"] = self.capacity_combine
        if self.closed_form is not None:
            doc["closed_form"] = self.closed_form
        doc.update(self.extra)
        return doc

    def dumps(self) -> str:
        return dumps(self.to_dict())

    # -- model objects ---------------------------------------------------------

    def weighting(self):
        if self.table is not None:
            return TableWeighting([(r["vector"], r["value"]) for r in self.table])
        if self.capacity is not None:
            return CapacityWeighting(self.capacity_obj(), self.capacity_combine)
        return closed_form(self.closed_form["name"], **self.closed_form["params"])

    def capacity_obj(self) -> Capacity:
        if self.capacity is None:
            raise ProblemError("capacity", "this problem has no capacity")
        return Capacity.from_mapping(self.n, {tuple(r["subset"]): r["value"]
                                              for r in self.capacity})

    def decomp_system(self) -> DecompSystem:
        s = self.system
        gens = s.get("generators", "indicators")
        if gens == "indicators":
            g = Indicators()
        elif gens == "orthant":
            g = Orthant()
        elif isinstance(gens, dict) and "box" in gens:
            g = BoxGrid(tuple(_vec(gens["box"], self.n, "system.generators.box")),
                        float(gens.get("step", 1 / 64)))
        elif isinstance(gens, dict) and "collections" in gens:
            g = Collections(tuple(tuple(tuple(_vec(v, self.n, "system.generators.collections"))
                                        for v in coll) for coll in gens["collections"]))
        elif isinstance(gens, list):
            g = [_vec(v, self.n, f"system.generators[{i}]") for i, v in enumerate(gens)]
        else:
            raise ProblemError("system.generators", f"unrecognized generators {gens!r}")
        con = s.get("constraint", "any")
        try:
            con = Constraint(con) if isinstance(con, str) else Constraint(con["kind"], con.get("k"))
            coeffs = Coefficients(s.get("coefficients", "real"))
        except (ValueError, KeyError, TypeError) as e:
            raise ProblemError("system", str(e)) from None
        return DecompSystem(self.n, g, coeffs, con)

    def base(self) -> Base:
        try:
            return Base(self.decomp_system(), self.weighting())
        except ProblemError:
            raise
        except (StructuralError, ValueError, TypeError) as e:
            raise ProblemError("weighting/system", str(e)) from None


def _canonical(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (int, float)):
        return _num(obj)
    if isinstance(obj, dict):
        return {k: _canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canonical(v) for v in obj]
    return obj


def dumps(doc: dict) -> str:
    """Canonical text: sorted keys, two-space indent, integral numbers without ``.0``."""
    return json.dumps(_canonical(doc), indent=2, sort_keys=True) + "\n"


def capacity_rows(c: Capacity) -> list[dict]:
    return [{"subset": subset_from_mask(m), "value": _num(v)} for m, v in enumerate(c.values)]
