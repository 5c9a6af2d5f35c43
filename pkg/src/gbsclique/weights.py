"""Node weights: the normalized squared matching count around each vertex.

``W(i)`` averages ``Y(A, B)**2`` over every balanced pair with ``i`` in ``A``,
where ``Y`` is the perfect-matching count of the block divided by its
expectation ``p**m m!``. Three estimators are kept:

* ``exact``: full enumeration (the oracle);
* ``mc_perm``: uniform random pairs, each scored by its exact ``Y**2``;
* ``mc_indicator``: uniform pairs plus two uniform bijections, scored by the
  product of edge indicators. Its variance grows like ``p**(-2m)``, so it is
  only practical for small ``m`` and ``p >= 0.5``.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .gbs import EnumerationTooLarge, subsets_array
from .graph import LEFT, RIGHT, BipartiteGraph
from .matchperm import normalizer
from .rng import stream
from .statkit import random_subsets
from .theory import expected_weight

DEFAULT_PERM_CAP = 10**8
METHODS = ("exact", "mc_perm", "mc_indicator")


@dataclass(frozen=True, eq=False)
class WeightTable:
    side: str
    nodes: np.ndarray
    values: np.ndarray
    stderr: np.ndarray
    method: str
    samples_used: int
    p: float
    m: int

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.method == "exact" and np.any(self.stderr != 0):
            raise ValueError("exact weights carry zero standard error")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["node", "side", "value", "stderr", "method", "samples"])
        for i, v, s in zip(self.nodes.tolist(), self.values.tolist(), self.stderr.tolist()):
            w.writerow([i, self.side, repr(float(v)), repr(float(s)), self.method, self.samples_used])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, p: float, m: int) -> "WeightTable":
        rows = list(csv.DictReader(io.StringIO(text)))
        if not rows:
            raise ValueError("empty weight table")
        return cls(
            side=rows[0]["side"],
            nodes=np.array([int(r["node"]) for r in rows]),
            values=np.array([float(r["value"]) for r in rows]),
            stderr=np.array([float(r["stderr"]) for r in rows]),
            method=rows[0]["method"],
            samples_used=int(rows[0]["samples"]),
            p=p,
            m=m,
        )


@dataclass(frozen=True, eq=False)
class CenteredWeights:
    nodes: np.ndarray
    z: np.ndarray
    centering: str
    scaled: bool
    n: int


def _oriented(g: BipartiteGraph, side: str) -> np.ndarray:
    if side == LEFT:
        return g.bits
    if side == RIGHT:
        return np.ascontiguousarray(g.bits.T)
    raise ValueError(f"side must be {LEFT!r} or {RIGHT!r}")


def _check(g: BipartiteGraph, m: int):
    if not 0.0 < g.p <= 1.0:
        raise ValueError("weights need p in (0, 1]")
    if not 1 <= m <= min(g.n, 32):
        raise ValueError(f"need 1 <= m <= min(n, 32), got m={m}")


def exact_weights(g: BipartiteGraph, nodes: Sequence[int], m: int, side: str = LEFT,
                  cap: int = DEFAULT_PERM_CAP) -> np.ndarray:
    """Exact ``W(i)`` for several nodes, sharing the per-``A`` sums between them."""
    _check(g, m)
    n = g.n
    nodes = np.asarray(nodes, dtype=np.int64)
    xi = _oriented(g, side)
    a_all = subsets_array(n, m)
    touches = np.isin(a_all, nodes).any(axis=1)
    a_sets = a_all[touches]
    b_sets = a_all
    if a_sets.shape[0] * b_sets.shape[0] > cap:
        raise EnumerationTooLarge(
            f"exact weights need {a_sets.shape[0] * b_sets.shape[0]} permanents > cap {cap}"
        )
    q = _kernels.perm_sq_rowsums(xi, a_sets, b_sets)
    norm = math.comb(n - 1, m - 1) * math.comb(n, m) * normalizer(m, g.p) ** 2
    member = a_sets[:, :, None] == nodes[None, None, :]
    return (q[:, None] * member.any(axis=1)).sum(axis=0) / norm


def weight_exact(g: BipartiteGraph, i: int, m: int, side: str = LEFT,
                 cap: int = DEFAULT_PERM_CAP) -> tuple[float, float]:
    """Exact weight of node ``i`` and its (zero) standard error."""
    if not 0 <= i < g.n:
        raise IndexError(f"node {i} out of range")
    return float(exact_weights(g, [i], m, side, cap)[0]), 0.0


def _pairs_containing(rng, n: int, i: int, m: int, r: int) -> tuple[np.ndarray, np.ndarray]:
    others = random_subsets(rng, n - 1, m - 1, r)
    others = others + (others >= i)
    a = np.sort(np.concatenate([np.full((r, 1), i), others], axis=1), axis=1)
    b = random_subsets(rng, n, m, r)
    return a, b


def _mean_se(vals: np.ndarray) -> tuple[float, float]:
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(vals.size))


def weight_mc_perm(g: BipartiteGraph, i: int, m: int, r: int, seed: int,
                   side: str = LEFT) -> tuple[float, float]:
    """Mean of exact ``Y(A, B)**2`` over ``r`` uniform pairs with ``i`` in ``A``."""
    _check(g, m)
    if r < 2:
        raise ValueError("need r >= 2")
    rng = stream(seed, "weight_mc_perm", i)
    a, b = _pairs_containing(rng, g.n, i, m, r)
    perms = _kernels.perm_rows_cols(_oriented(g, side), a, b).astype(np.float64)
    return _mean_se((perms / normalizer(m, g.p)) ** 2)


def weight_mc_indicator(g: BipartiteGraph, i: int, m: int, r: int, seed: int,
                        side: str = LEFT, chunk: int = 200_000) -> tuple[float, float]:
    """Mean of ``prod_u xi[u, sigma(u)] xi[u, tau(u)] / p**2`` over random ``A, B, sigma, tau``."""
    _check(g, m)
    if r < 2:
        raise ValueError("need r >= 2")
    xi = _oriented(g, side)
    rng = stream(seed, "weight_mc_indicator", i)
    vals = np.empty(r)
    scale = g.p ** (-2 * m)
    for lo in range(0, r, chunk):
        rows = min(r, lo + chunk) - lo
        a, b = _pairs_containing(rng, g.n, i, m, rows)
        sig = np.take_along_axis(b, np.argsort(rng.random((rows, m)), axis=1), axis=1)
        tau = np.take_along_axis(b, np.argsort(rng.random((rows, m)), axis=1), axis=1)
        hit = xi[a, sig] & xi[a, tau]
        vals[lo:lo + rows] = hit.all(axis=1) * scale
    return _mean_se(vals)


def weight_table(g: BipartiteGraph, m: int, side: str = LEFT, method: str = "exact",
                 r: int = 10_000, seed: int = 0, nodes: Sequence[int] | None = None,
                 cap: int = DEFAULT_PERM_CAP) -> WeightTable:
    nodes = np.arange(g.n) if nodes is None else np.asarray(nodes, dtype=np.int64)
    if method == "exact":
        vals = exact_weights(g, nodes, m, side, cap)
        return WeightTable(side, nodes, vals, np.zeros_like(vals), method, 0, g.p, m)
    fn = {"mc_perm": weight_mc_perm, "mc_indicator": weight_mc_indicator}.get(method)
    if fn is None:
        raise ValueError(f"unknown method {method!r}")
    est = np.array([fn(g, int(i), m, r, seed, side) for i in nodes])
    return WeightTable(side, nodes, est[:, 0], est[:, 1], method, r, g.p, m)


def expected_weight_structural_mc(n: int, m: int, k: int, p: float, planted: bool, r: int,
                                  seed: int, chunk: int = 100_000) -> tuple[float, float]:
    """Graph-free Monte Carlo of ``E[p**-(S1 + S2)]``.

    Only the overlaps with the planted sets matter, so each trial draws the
    overlap sizes (hypergeometric), labels those positions first, and draws
    two uniform bijections between positions of ``A`` and ``B``.
    ``S1`` counts bijection images landing in the planted block for planted
    rows; ``S2`` counts rows where both bijections agree off the block.
    """
    if not 0 <= k <= n or not 1 <= m <= n:
        raise ValueError("need 0 <= k <= n and 1 <= m <= n")
    if planted and k == 0:
        raise ValueError("a planted node needs k >= 1")
    if not 0.0 < p <= 1.0:
        raise ValueError("p must lie in (0, 1]")
    rng = stream(seed, "expected_weight_structural_mc", int(planted))
    vals = np.empty(r)
    logp = -math.log(p)
    pos = np.arange(m)
    for lo in range(0, r, chunk):
        rows = min(r, lo + chunk) - lo
        # the other m-1 members of A among n-1 vertices, of which k - planted are in A0
        good = k - int(planted)
        extra = rng.hypergeometric(good, n - 1 - good, m - 1, size=rows) if m > 1 else np.zeros(rows, int)
        a0 = extra + int(planted)
        b0 = rng.hypergeometric(k, n - k, m, size=rows) if k else np.zeros(rows, int)
        sig = np.argsort(rng.random((rows, m)), axis=1)
        tau = np.argsort(rng.random((rows, m)), axis=1)
        row_in = pos[None, :] < a0[:, None]
        sig_in = sig < b0[:, None]
        tau_in = tau < b0[:, None]
        s1 = (row_in & sig_in).sum(axis=1) + (row_in & tau_in).sum(axis=1)
        s2 = ((sig == tau) & ~(row_in & sig_in)).sum(axis=1)
        vals[lo:lo + rows] = np.exp((s1 + s2) * logp)
    return _mean_se(vals)


def _hyper_pmf(good: int, bad: int, draws: int) -> dict[int, float]:
    total = math.comb(good + bad, draws)
    return {x: math.comb(good, x) * math.comb(bad, draws - x) / total
            for x in range(max(0, draws - bad), min(good, draws) + 1)}


def expected_weight_enumerated(n: int, m: int, k: int, p: float, planted: bool) -> float:
    """Exact finite-``n`` value of ``E[p**-(S1 + S2)]`` for small ``m`` (``m <= 6``).

    Sums over the hypergeometric overlap sizes and over every pair of
    bijections; the oracle for :func:`expected_weight_structural_mc`.
    """
    if not 1 <= m <= 6:
        raise ValueError("enumeration needs 1 <= m <= 6")
    if planted and k == 0:
        raise ValueError("a planted node needs k >= 1")
    from itertools import permutations

    perms = np.array(list(permutations(range(m))), dtype=np.int64)
    sig = np.repeat(perms, len(perms), axis=0)
    tau = np.tile(perms, (len(perms), 1))
    pos = np.arange(m)
    good = k - int(planted)
    rows = _hyper_pmf(good, n - 1 - good, m - 1)
    cols = _hyper_pmf(k, n - k, m)
    total = 0.0
    for extra, pa in rows.items():
        a0 = extra + int(planted)
        row_in = pos < a0
        for b0, pb in cols.items():
            s_in = sig < b0
            t_in = tau < b0
            s1 = (row_in & s_in).sum(axis=1) + (row_in & t_in).sum(axis=1)
            s2 = ((sig == tau) & ~(row_in & s_in)).sum(axis=1)
            total += pa * pb * float(np.mean(p ** (-(s1 + s2).astype(float))))
    return total


def center_and_rescale(w: WeightTable, mode: str = "theoretical", n: int | None = None,
                       scale: bool = True, normalize: bool = False,
                       expected: float | None = None) -> CenteredWeights:
    """Center a weight table and optionally multiply by ``sqrt(n)``.

    ``mode="theoretical"`` subtracts the limiting ``E[W]`` (or ``expected`` if
    given); ``mode="empirical"`` subtracts the mean over the table's nodes.
    ``normalize`` divides by the root-mean-square of the centered values.
    """
    vals = np.asarray(w.values, dtype=float)
    if vals.size == 0:
        raise ValueError("empty weight table")
    n = n if n is not None else vals.size
    if mode == "theoretical":
        center = expected_weight(w.p) if expected is None else expected
        z = vals - center
    elif mode == "empirical":
        z = vals - vals.mean()
    else:
        raise ValueError("mode must be 'theoretical' or 'empirical'")
    if normalize:
        rms = math.sqrt(float(np.mean(z * z)))
        if rms == 0:
            raise ValueError("degenerate normalization: all centered weights are zero")
        z = z / rms
    if scale:
        z = z * math.sqrt(n)
    return CenteredWeights(np.asarray(w.nodes), z, mode, scale, n)


def joint_moment_empirical(replicates: Sequence[CenteredWeights],
                           indices: Sequence[int]) -> tuple[float, float]:
    """Average of ``prod_j sqrt(n) z[i(j)]`` over independent replicates, with its SE.

    ``indices`` are node ids and may repeat.
    """
    if len(replicates) < 2:
        raise ValueError("need at least two replicates")
    prods = np.empty(len(replicates))
    for t, rep in enumerate(replicates):
        lookup = {int(v): k for k, v in enumerate(rep.nodes.tolist())}
        z = rep.z if rep.scaled else rep.z * math.sqrt(rep.n)
        prods[t] = math.prod(z[lookup[int(i)]] for i in indices)
    return _mean_se(prods)
