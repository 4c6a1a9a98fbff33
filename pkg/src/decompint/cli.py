"""Command-line front end.

    decompint run FILE [--mode M] [--grid-step H] [--max-parts K] [--node-budget N]
    decompint check SUITE [--seed S] [--size N] [--tolerance T]
    decompint explain FILE [--query 2,2]
    decompint oracle FILE

FILE may be a path or the name of a bundled example (``workers``,
``fastfood``, ...).  Exit status: 0 when every result is exact or
approximate (or every check passed), 2 when some result is unbounded or
infeasible (or a check failed), 1 on input errors.
"""
from __future__ import annotations

import argparse
import math
import sys
import time
from dataclasses import replace
from importlib import resources
from pathlib import Path

import numpy as np

from . import classical, oracle
from .checks import SUITES, run_suite
from .core import Base, BoxGrid, StructuralError, WeightingError
from .decomp import (
    IntegralResult, Status, UnsupportedBase, integrate_many, iterated_sub_integral,
    max_pseudo_integral, witness_sum,
)
from .lpsolve import DEFAULT_NODE_BUDGET
from .problem import ProblemError, ProblemFile, dumps

EXIT_OK, EXIT_INPUT, EXIT_STATUS = 0, 1, 2


def fixture_dir() -> Path:
    return Path(str(resources.files("decompint") / "fixtures" / "paper"))


def bundled_fixtures() -> list[str]:
    return sorted(p.stem for p in fixture_dir().glob("*.json"))


def resolve(path: str) -> Path:
    p = Path(path)
    if p.exists():
        return p
    for cand in (fixture_dir() / path, fixture_dir() / f"{path}.json"):
        if cand.exists():
            return cand
    raise FileNotFoundError(f"{path}: no such file or bundled example "
                            f"(bundled: {', '.join(bundled_fixtures())})")


def _num(v: float):
    if v is None or not math.isfinite(v):
        return None
    return int(v) if float(v).is_integer() else float(v)


def result_record(query, res: IntegralResult, seconds: float) -> dict:
    rec = {"query": [_num(v) for v in query], "value": _num(res.value),
           "status": res.status.value, "wall_time": round(seconds, 6)}
    if res.witness is not None:
        rec["witness"] = [{"generator": [_num(v) for v in p.generator],
                           "coefficient": _num(p.coefficient), "copies": p.copies}
                          for p in res.witness]
    if res.error_bound is not None:
        rec["error_bound"] = _num(res.error_bound)
    if res.certificate:
        rec["certificate"] = [[_num(a), _num(b)] for a, b in res.certificate]
    if res.note:
        rec["note"] = res.note
    return rec


def _with_grid_step(base: Base, step: float | None) -> Base:
    gens = base.system.generators
    if step is None or not isinstance(gens, BoxGrid):
        return base
    return Base(replace(base.system, generators=BoxGrid(gens.upper, step), _matrix=None),
                base.weighting)


def _solve(pf: ProblemFile, mode: str, args) -> list[tuple[list, IntegralResult, float]]:
    base = _with_grid_step(pf.base(), args.grid_step)
    opts = {"grid_step": args.grid_step, "parts": args.max_parts,
            "node_budget": args.node_budget}
    out = []
    if mode in ("sub", "super"):
        t = time.perf_counter()
        results = integrate_many(base, pf.queries, mode, **opts) if pf.queries else []
        each = (time.perf_counter() - t) / max(1, len(results))
        return [(q, r, each) for q, r in zip(pf.queries, results)]
    for q in pf.queries:
        t = time.perf_counter()
        if mode == "max":
            r = max_pseudo_integral(base, q)
        elif mode == "iterated":
            r = iterated_sub_integral(base, q, **opts)
        elif mode.startswith("classical:"):
            fn = getattr(classical, mode.split(":", 1)[1])
            r = IntegralResult(Status.EXACT, float(fn(pf.capacity_obj(), q)))
        elif mode.startswith("oracle"):
            kind = "super" if mode.endswith("super") else "sub"
            fn = oracle.brute_super if kind == "super" else oracle.brute_sub
            v = fn(base, q)
            r = IntegralResult(Status.EXACT, v, note="brute force") if v is not None else \
                IntegralResult(Status.INFEASIBLE_DOMAIN, math.inf, note="no cover")
        else:
            raise ProblemError("mode", f"mode {mode!r} takes no queries")
        out.append((q, r, time.perf_counter() - t))
    return out


def cmd_run(args) -> int:
    pf = ProblemFile.load(resolve(args.file))
    mode = args.mode or pf.mode
    if mode.startswith("check:"):
        return _report_check(run_suite(mode.split(":", 1)[1], seed=args.seed, **_tol(args)), args)
    rows = _solve(pf, mode, args)
    doc = {"mode": mode, "results": [result_record(q, r, s) for q, r, s in rows]}
    if mode.startswith("oracle"):
        kind = "super" if mode.endswith("super") else "sub"
        engine = integrate_many(pf.base(), pf.queries, kind) if pf.queries else []
        tol = args.tolerance if args.tolerance is not None else 1e-7
        for rec, (_, r, _), e in zip(doc["results"], rows, engine):
            rec["engine_value"] = _num(e.value)
            rec["agree"] = (r.value == e.value) or abs(r.value - e.value) <= tol
    sys.stdout.write(dumps(doc))
    return EXIT_STATUS if any(not r.finite for _, r, _ in rows) else EXIT_OK


def _tol(args) -> dict:
    return {"tol": args.tolerance} if args.tolerance is not None else {}


def _report_check(rep, args) -> int:
    doc = {"suite": rep.suite, "passed": rep.passed, "total": rep.total,
           "max_residual": rep.max_residual, "counterexample": rep.counterexample}
    sys.stdout.write(dumps(doc))
    return EXIT_OK if rep.ok else EXIT_STATUS


def cmd_check(args) -> int:
    kw = _tol(args)
    if args.suite in ("choquet-additivity", "knapsack", "monotonicity"):
        kw = {}
    return _report_check(run_suite(args.suite, seed=args.seed, size=args.size, **kw), args)


def _fmt(v) -> str:
    return f"{_num(v)}" if _num(v) is not None else "inf"


def cmd_explain(args) -> int:
    pf = ProblemFile.load(resolve(args.file))
    mode = args.mode or pf.mode
    if mode not in ("sub", "super"):
        raise ProblemError("mode", "explain works for sub and super problems")
    if args.query:
        pf.queries = [[float(t) for t in args.query.split(",")]]
    sym = pf.extra.get("weighting_symbol", "A")
    w = pf.base().weighting
    code = EXIT_OK
    for q, r, _ in _solve(pf, mode, args):
        print(f"{mode} integral at ({','.join(_fmt(v) for v in q)}): {r.status.value}")
        if r.status is not Status.EXACT:
            bound = f" (error bound {_fmt(r.error_bound)})" if r.error_bound is not None else ""
            print(f"  value {_fmt(r.value)}{bound}")
            if not r.finite:
                code = EXIT_STATUS
            continue
        for p in r.witness or ():
            g = ",".join(_fmt(v) for v in p.generator)
            term = f"{sym}({g})={_fmt(w(p.generator))}"
            mult = p.copies * p.coefficient
            print(f"  {term}" if mult == 1 else f"  {_fmt(mult)} * {term}")
        total = witness_sum(r.witness or (), pf.n)
        slack = (np.asarray(q) - total) if mode == "sub" else (total - np.asarray(q))
        print(f"  total = {_fmt(round(r.value, 12))}")
        print(f"  slack = ({','.join(_fmt(round(v, 12)) for v in slack)})")
    return code


def cmd_oracle(args) -> int:
    args.mode = args.mode or None
    pf = ProblemFile.load(resolve(args.file))
    if args.mode is None:
        args.mode = "oracle:super" if pf.mode == "super" else "oracle:sub"
    return cmd_run(args)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="decompint", description=__doc__.split("\n\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--mode", help="override the file's mode")
        p.add_argument("--grid-step", type=float, help="lattice step for grids and transforms")
        p.add_argument("--max-parts", type=int, help="copies per lattice group in transforms")
        p.add_argument("--node-budget", type=int, default=DEFAULT_NODE_BUDGET)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tolerance", type=float)

    p = sub.add_parser("run", help="solve every query of a problem file")
    p.add_argument("file")
    common(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("check", help="run a property suite")
    p.add_argument("suite", choices=sorted(SUITES))
    p.add_argument("--size", type=int)
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("explain", help="print the optimal collection")
    p.add_argument("file")
    p.add_argument("--query", help="comma-separated vector instead of the file's queries")
    common(p)
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("oracle", help="brute-force values next to the solver's")
    p.add_argument("file")
    common(p)
    p.set_defaults(func=cmd_oracle)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ProblemError, FileNotFoundError, StructuralError, WeightingError,
            UnsupportedBase, oracle.SearchSpaceTooLarge, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
