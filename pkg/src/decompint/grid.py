"""Dynamic programming over integer lattices.

A *piece table* assigns a value to every lattice vector ``w`` (``-inf`` /
``+inf`` marks pieces that may not be used).  The *lattice table* then holds,
for every lattice point ``v``, the best total value of a multiset of nonzero
pieces summing exactly to ``v``.
"""
from __future__ import annotations

import math

import numpy as np


def _blocks(v: tuple[int, ...], extent: tuple[int, ...]):
    ext = tuple(min(vi, ei) for vi, ei in zip(v, extent))
    rest = tuple(slice(vi, vi - e - 1 if vi - e - 1 >= 0 else None, -1) for vi, e in zip(v, ext))
    piece = tuple(slice(0, e + 1) for e in ext)
    return rest, piece


def lattice_table(pieces: np.ndarray, maximize: bool, shape: tuple[int, ...] | None = None,
                  parts: int | None = None):
    """Return ``(table, arg)`` over a lattice box of the given ``shape``.

    ``arg[v]`` is the flat index (into ``pieces``) of the last piece of an
    optimal decomposition of ``v``; -1 marks the origin and unreachable points.
    With ``parts`` set, only multisets of at most that many pieces count.
    """
    shape = tuple(pieces.shape) if shape is None else tuple(shape)
    extent = tuple(s - 1 for s in pieces.shape)
    worst = -math.inf if maximize else math.inf
    P = pieces.astype(float).copy()
    P[(0,) * P.ndim] = worst
    pick = np.argmax if maximize else np.argmin

    def sweep(prev: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        table = np.full(shape, worst)
        arg = np.full(shape, -1, dtype=np.int64)
        table[(0,) * len(shape)] = 0.0
        for flat in range(1, table.size):
            v = np.unravel_index(flat, shape)
            rest, piece = _blocks(v, extent)
            src = prev if prev is not None else table
            cand = src[rest] + P[piece]
            j = int(pick(cand))
            best = cand.flat[j]
            if prev is not None:
                keep = prev[v]
                if (best <= keep) if maximize else (best >= keep):
                    table[v] = keep
                    continue
            if best != worst:
                table[v] = best
                w = np.unravel_index(j, cand.shape)
                arg[v] = np.ravel_multi_index(w, P.shape)
        return table, arg

    if parts is None:
        return sweep(None)
    # layer by number of pieces; arg keeps the piece added in the last improving layer
    table = np.full(shape, worst)
    table[(0,) * len(shape)] = 0.0
    args = []
    for _ in range(parts):
        table, arg = sweep(table)
        args.append(arg)
    return table, args


def reconstruct(arg, pieces_shape: tuple[int, ...], v: tuple[int, ...],
                table_shape: tuple[int, ...] | None = None) -> list[tuple[int, ...]]:
    """Pieces (as lattice vectors) of the optimal decomposition stored in ``arg``."""
    out: list[tuple[int, ...]] = []
    v = tuple(int(t) for t in v)
    if isinstance(arg, list):
        for layer in reversed(arg):
            j = int(layer[v])
            if j < 0:
                continue
            w = np.unravel_index(j, pieces_shape)
            out.append(tuple(int(t) for t in w))
            v = tuple(a - b for a, b in zip(v, w))
        return out
    while any(v):
        j = int(arg[v])
        if j < 0:
            break
        w = tuple(int(t) for t in np.unravel_index(j, pieces_shape))
        out.append(w)
        v = tuple(a - b for a, b in zip(v, w))
    return out


def lattice_points(shape: tuple[int, ...], steps) -> np.ndarray:
    """Real coordinates of every lattice point, shape ``shape + (n,)``."""
    axes = [np.arange(s) * st for s, st in zip(shape, steps)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack(mesh, axis=-1)


def anchored_resolution(x: np.ndarray, step: float) -> tuple[tuple[int, ...], np.ndarray]:
    """Per-coordinate division counts (powers of two) placing ``x`` on the lattice.

    Halving ``step`` doubles every count, so successive lattices are nested.
    """
    counts, steps = [], []
    for xi in x:
        if xi <= 0:
            counts.append(0)
            steps.append(0.0)
            continue
        m = 1 << max(0, math.ceil(math.log2(xi / step) - 1e-12))
        counts.append(m)
        steps.append(xi / m)
    return tuple(counts), np.array(steps)
