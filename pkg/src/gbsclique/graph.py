"""Bipartite Erdos-Renyi graphs with an optional planted biclique.

A graph lives on two sides ``V`` (left, rows) and ``V'`` (right, columns),
each with ``n`` vertices indexed from 0. The biadjacency matrix is stored as
a read-only ``uint8`` array; ``row_bits`` exposes the same rows as Python
integer bitsets.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .rng import stream

LEFT = "left"
RIGHT = "right"


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=np.uint8)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class BipartiteGraph:
    """Immutable ``n x n`` biadjacency matrix plus the edge probability ``p``."""

    n: int
    p: float
    bits: np.ndarray

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        bits = np.asarray(self.bits)
        if bits.shape != (self.n, self.n):
            raise ValueError(f"expected a {self.n}x{self.n} biadjacency, got {bits.shape}")
        if bits.size and not np.isin(bits, (0, 1)).all():
            raise ValueError("biadjacency entries must be 0 or 1")
        object.__setattr__(self, "bits", _frozen(bits))

    @classmethod
    def from_edges(cls, n: int, p: float, edges: Sequence[Sequence[int]]) -> "BipartiteGraph":
        bits = np.zeros((n, n), dtype=np.uint8)
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            bits[u, v] = 1
        return cls(n, float(p), bits)

    def __eq__(self, other):
        if not isinstance(other, BipartiteGraph):
            return NotImplemented
        return self.n == other.n and self.p == other.p and np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash((self.n, self.p, self.bits.tobytes()))

    @property
    def num_edges(self) -> int:
        return int(self.bits.sum())

    def row_bits(self, u: int) -> int:
        """Row ``u`` as an integer bitset (bit ``v`` set iff edge ``(u, v)``)."""
        row = self.bits[u]
        return int.from_bytes(np.packbits(row[::-1]).tobytes(), "big") >> ((-self.n) % 8)

    def edges(self) -> list[tuple[int, int]]:
        us, vs = np.nonzero(self.bits)
        return list(zip(us.tolist(), vs.tolist()))


@dataclass(frozen=True, eq=False)
class PlantedInstance:
    graph: BipartiteGraph
    a0: tuple[int, ...]
    b0: tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.a0)

    def __eq__(self, other):
        if not isinstance(other, PlantedInstance):
            return NotImplemented
        return self.graph == other.graph and self.a0 == other.a0 and self.b0 == other.b0

    def to_json(self) -> str:
        return graph_to_json(self.graph, self.a0, self.b0)


@dataclass(frozen=True)
class SubgraphSample:
    """A balanced vertex pair ``(A, B)`` with ``|A| = |B| = m``."""

    a: tuple[int, ...]
    b: tuple[int, ...]

    def __post_init__(self):
        a, b = tuple(int(x) for x in self.a), tuple(int(x) for x in self.b)
        if len(a) != len(b) or not a:
            raise ValueError("a sample needs two nonempty sides of equal size")
        for side in (a, b):
            if any(x >= y for x, y in zip(side, side[1:])) or side[0] < 0:
                raise ValueError(f"indices must be strictly increasing and >= 0: {side}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def m(self) -> int:
        return len(self.a)


def gen_bipartite_er(n: int, p: float, seed: int) -> BipartiteGraph:
    """Sample ``ER(n, n, p)``; identical arguments give bit-identical graphs."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    rng = stream(seed, "gen_bipartite_er")
    bits = (rng.random((n, n)) < p).astype(np.uint8)
    return BipartiteGraph(n, float(p), bits)


def random_biadjacency(n: int, p: float, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` independent ``n x n`` Bernoulli(p) matrices, shape ``(count, n, n)``."""
    return (rng.random((count, n, n)) < p).astype(np.uint8)


def plant_biclique(g: BipartiteGraph, k: int, seed: int) -> PlantedInstance:
    """Choose uniform ``k``-subsets ``A0``, ``B0`` and force every edge of ``A0 x B0``."""
    if not 0 <= k <= g.n:
        raise ValueError(f"planted size k={k} must satisfy 0 <= k <= n={g.n}")
    rng = stream(seed, "plant_biclique")
    a0 = np.sort(rng.choice(g.n, size=k, replace=False))
    b0 = np.sort(rng.choice(g.n, size=k, replace=False))
    return plant_at(g, a0, b0)


def plant_at(g: BipartiteGraph, a0: Sequence[int], b0: Sequence[int]) -> PlantedInstance:
    """Plant a biclique on the given vertex sets (idempotent)."""
    a0 = tuple(sorted(int(x) for x in a0))
    b0 = tuple(sorted(int(x) for x in b0))
    if len(a0) != len(b0):
        raise ValueError("planted sides must have equal size")
    bits = g.bits.copy()
    if a0:
        bits[np.ix_(a0, b0)] = 1
    return PlantedInstance(BipartiteGraph(g.n, g.p, bits), a0, b0)


def planted_er(n: int, p: float, k: int, seed: int) -> PlantedInstance:
    """Convenience: ``ER(n, n, p, k, k)`` from one seed."""
    return plant_biclique(gen_bipartite_er(n, p, seed), k, seed)


def _check_vertex(g: BipartiteGraph, u: int):
    if not 0 <= u < g.n:
        raise IndexError(f"vertex {u} out of range for n={g.n}")


def degree(g: BipartiteGraph, u: int, side: str = LEFT) -> int:
    _check_vertex(g, u)
    if side == LEFT:
        return int(g.bits[u].sum())
    if side == RIGHT:
        return int(g.bits[:, u].sum())
    raise ValueError(f"side must be {LEFT!r} or {RIGHT!r}")


def degrees(g: BipartiteGraph) -> tuple[np.ndarray, np.ndarray]:
    """Left and right degree vectors."""
    return g.bits.sum(axis=1, dtype=np.int64), g.bits.sum(axis=0, dtype=np.int64)


def biadjacency_submatrix(g: BipartiteGraph, s: SubgraphSample) -> np.ndarray:
    if max(s.a[-1], s.b[-1]) >= g.n:
        raise IndexError("sample indices out of range for this graph")
    return g.bits[np.ix_(s.a, s.b)]


def graph_to_json(g: BipartiteGraph, a0: Sequence[int] = (), b0: Sequence[int] = ()) -> str:
    doc = {
        "n": g.n,
        "p": g.p,
        "k": len(a0),
        "a0": list(a0),
        "b0": list(b0),
        "edges": [list(e) for e in g.edges()],
    }
    return json.dumps(doc, sort_keys=True)


def graph_from_json(text: str) -> PlantedInstance:
    """Inverse of :func:`graph_to_json`; a plain graph comes back with empty planted sets."""
    doc = json.loads(text)
    g = BipartiteGraph.from_edges(int(doc["n"]), float(doc["p"]), doc["edges"])
    a0, b0 = tuple(doc.get("a0", ())), tuple(doc.get("b0", ()))
    if int(doc.get("k", len(a0))) != len(a0):
        raise ValueError("k does not match the planted set size")
    bad = [(u, v) for u in a0 for v in b0 if not g.bits[u, v]]
    if bad:
        raise ValueError(f"planted edges missing from edge list: {bad[:3]}")
    return PlantedInstance(g, a0, b0)
