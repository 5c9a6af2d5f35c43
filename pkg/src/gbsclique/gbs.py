"""Idealized, post-selected Gaussian boson sampling over balanced subgraphs.

A collision-free output pattern with ``2m`` photons on a bipartite graph is a
pair ``(A, B)`` of ``m``-subsets, drawn with probability proportional to the
squared number of perfect matchings of the induced block. Two samplers are
provided: exact inverse-CDF sampling over the enumerated distribution, and a
swap-one Metropolis chain for graphs too large to enumerate.
"""
from __future__ import annotations

import csv
import io
import logging
import math
import os
import warnings
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable

import numpy as np

from . import _kernels
from .graph import BipartiteGraph, SubgraphSample
from .rng import stream

log = logging.getLogger(__name__)

DEFAULT_ENUM_CAP = 10**7


class EnumerationTooLarge(ValueError):
    pass


class NoPerfectMatching(ValueError):
    pass


class CollisionRegimeWarning(UserWarning):
    """Sample size beyond the regime where collision-free outputs dominate."""


def enum_cap_default() -> int:
    return int(os.environ.get("PGL_CAP_ENUM", DEFAULT_ENUM_CAP))


def subsets_array(n: int, m: int) -> np.ndarray:
    """All ``m``-subsets of ``range(n)`` in lexicographic order, shape ``(C(n, m), m)``."""
    count = math.comb(n, m)
    out = np.fromiter(
        (x for c in combinations(range(n), m) for x in c), dtype=np.int64, count=count * m
    )
    return out.reshape(count, m)


def check_sample_size(n: int, m: int):
    if not 1 <= m <= min(n, 32):
        raise ValueError(f"sample half-size m={m} must satisfy 1 <= m <= min(n, 32) (n={n})")
    if m > math.ceil(math.sqrt(2 * n)) / 2:
        warnings.warn(
            f"m={m} is outside the collision-free regime m <= ceil(sqrt(2n))/2 for n={n}",
            CollisionRegimeWarning,
            stacklevel=3,
        )


@dataclass(frozen=True, eq=False)
class ExactGBSDistribution:
    n: int
    m: int
    a_sets: np.ndarray      # (NA, m); row ia is the ia-th m-subset of V
    b_sets: np.ndarray      # (NB, m)
    weights: np.ndarray     # (NA * NB,) int64, perm**2 in row-major (ia, ib) order
    total_weight: int
    cumulative: np.ndarray = field(repr=False)

    @property
    def probabilities(self) -> np.ndarray:
        return self.weights / self.total_weight

    def entry(self, idx: int) -> SubgraphSample:
        ia, ib = divmod(int(idx), self.b_sets.shape[0])
        return SubgraphSample(tuple(self.a_sets[ia]), tuple(self.b_sets[ib]))

    def entries(self) -> Iterable[tuple[SubgraphSample, int]]:
        for idx, w in enumerate(self.weights.tolist()):
            yield self.entry(idx), w

    def probability(self, s: SubgraphSample) -> float:
        ia = _subset_rank(s.a, self.n)
        ib = _subset_rank(s.b, self.n)
        return float(self.weights[ia * self.b_sets.shape[0] + ib]) / self.total_weight

    def inclusion_marginals(self) -> tuple[np.ndarray, np.ndarray]:
        """``P(i in A)`` for each left node and ``P(j in B)`` for each right node."""
        table = self.weights.reshape(self.a_sets.shape[0], self.b_sets.shape[0]).astype(float)
        per_a = table.sum(axis=1)
        per_b = table.sum(axis=0)
        left = np.zeros(self.n)
        right = np.zeros(self.n)
        np.add.at(left, self.a_sets.ravel(), np.repeat(per_a, self.m))
        np.add.at(right, self.b_sets.ravel(), np.repeat(per_b, self.m))
        return left / self.total_weight, right / self.total_weight


def _subset_rank(sub, n: int) -> int:
    """Lexicographic rank of a sorted subset among all subsets of the same size."""
    m = len(sub)
    rank, prev = 0, -1
    for pos, x in enumerate(sub):
        for y in range(prev + 1, x):
            rank += math.comb(n - 1 - y, m - 1 - pos)
        prev = x
    return rank


def enumerate_distribution(g: BipartiteGraph, m: int, cap: int | None = None) -> ExactGBSDistribution:
    """Weights ``perm(A, B)**2`` for every balanced pair; zero-weight pairs kept."""
    cap = enum_cap_default() if cap is None else cap
    check_sample_size(g.n, m)
    size = math.comb(g.n, m) ** 2
    if size > cap:
        raise EnumerationTooLarge(f"enumeration too large: C({g.n},{m})^2 = {size} > cap {cap}")
    subsets = subsets_array(g.n, m)
    perms = _kernels.perm_pairs(g.bits, subsets, subsets).astype(np.int64).ravel()
    weights = perms * perms
    if math.factorial(m) ** 2 * size < 2**62:
        total = int(weights.sum())
    else:
        total = sum(int(w) for w in weights.tolist())
    if total == 0:
        raise NoPerfectMatching("all weights zero: no balanced pair has a perfect matching")
    cumulative = np.cumsum(weights, dtype=np.float64)
    return ExactGBSDistribution(g.n, m, subsets, subsets, weights, total, cumulative)


@dataclass(frozen=True, eq=False)
class SampleBatch:
    a: np.ndarray   # (t, m) sorted rows
    b: np.ndarray   # (t, m)
    provenance: str
    meta: dict = field(default_factory=dict)

    @property
    def t(self) -> int:
        return self.a.shape[0]

    @property
    def m(self) -> int:
        return self.a.shape[1]

    @property
    def samples(self) -> list[SubgraphSample]:
        return [SubgraphSample(tuple(x), tuple(y)) for x, y in zip(self.a.tolist(), self.b.tolist())]

    def inclusion_counts(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        left = np.bincount(self.a.ravel(), minlength=n)
        right = np.bincount(self.b.ravel(), minlength=n)
        return left, right

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["trial", "a_indices", "b_indices"])
        for t, (x, y) in enumerate(zip(self.a.tolist(), self.b.tolist())):
            w.writerow([t, ";".join(map(str, x)), ";".join(map(str, y))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, provenance: str = "file") -> "SampleBatch":
        rows = list(csv.DictReader(io.StringIO(text)))
        if not rows:
            raise ValueError("no samples in CSV")
        rows.sort(key=lambda r: int(r["trial"]))
        a = np.array([[int(v) for v in r["a_indices"].split(";")] for r in rows], dtype=np.int64)
        b = np.array([[int(v) for v in r["b_indices"].split(";")] for r in rows], dtype=np.int64)
        return cls(a, b, provenance)


def sample_exact(dist: ExactGBSDistribution, t: int, seed: int) -> SampleBatch:
    """``t`` i.i.d. draws by inverse-CDF lookup on the cumulative weight table."""
    if t < 1:
        raise ValueError("t must be >= 1")
    rng = stream(seed, "sample_exact")
    cum = dist.cumulative
    u = rng.random(t) * cum[-1]
    idx = np.searchsorted(cum, u, side="right")
    # guard the float edge: never land on a zero-weight entry
    idx = np.minimum(idx, cum.size - 1)
    zero = dist.weights[idx] == 0
    if zero.any():
        idx[zero] = np.searchsorted(cum, cum[idx[zero]], side="right")
    ia, ib = np.divmod(idx, dist.b_sets.shape[0])
    return SampleBatch(dist.a_sets[ia], dist.b_sets[ib], "exact")


def greedy_start(g: BipartiteGraph, m: int, rng: np.random.Generator, attempts: int = 64):
    """A pair ``(A, B)`` whose block contains a perfect matching.

    Randomized greedy matching first; if that never reaches size ``m`` a
    maximum matching decides whether any positive-weight pair exists.
    """
    n = g.n
    bits = g.bits
    for _ in range(attempts):
        used = np.zeros(n, dtype=bool)
        pairs = []
        for u in rng.permutation(n):
            nbrs = np.nonzero(bits[u] & ~used)[0]
            if nbrs.size:
                v = int(rng.choice(nbrs))
                used[v] = True
                pairs.append((int(u), v))
                if len(pairs) == m:
                    a, b = zip(*pairs)
                    return np.array(a, dtype=np.int64), np.array(b, dtype=np.int64)
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import maximum_bipartite_matching

    match = maximum_bipartite_matching(csr_matrix(bits), perm_type="column")
    rows = np.nonzero(match >= 0)[0]
    if rows.size < m:
        raise NoPerfectMatching(
            f"no balanced pair of size m={m} has a perfect matching (maximum matching {rows.size})"
        )
    rows = rows[:m]
    return rows.astype(np.int64), match[rows].astype(np.int64)


def sample_mcmc(g: BipartiteGraph, m: int, t: int, burnin: int, thin: int, seed: int) -> SampleBatch:
    """Metropolis surrogate for the GBS distribution.

    Each step picks side ``A`` or ``B`` by a fair coin, swaps one uniformly
    chosen member for a uniformly chosen outside vertex, and accepts with
    probability ``min(1, perm_new**2 / perm_old**2)``.
    """
    check_sample_size(g.n, m)
    if t < 1 or thin < 1 or burnin < 0:
        raise ValueError("need t >= 1, thin >= 1, burnin >= 0")
    if m == g.n:
        raise ValueError("m = n leaves no outside vertex to swap in")
    rng = stream(seed, "sample_mcmc")
    a, b = greedy_start(g, m, rng)
    steps = burnin + t * thin
    side = rng.integers(0, 2, size=steps, dtype=np.int64)
    slot = rng.integers(0, m, size=steps, dtype=np.int64)
    outside = rng.integers(0, g.n - m, size=steps, dtype=np.int64)
    unif = rng.random(steps)
    out_a = np.empty((t, m), dtype=np.int64)
    out_b = np.empty((t, m), dtype=np.int64)
    accepted = _kernels.metropolis_chain(
        g.bits, a, b, side, slot, outside, unif, burnin, thin, out_a, out_b
    )
    meta = {"burnin": burnin, "thin": thin, "steps": steps, "acceptance_rate": accepted / steps}
    log.debug("mcmc n=%d m=%d acceptance %.3f", g.n, m, meta["acceptance_rate"])
    return SampleBatch(out_a, out_b, "mcmc", meta)


def photon_number_pmf(a: int, b: float, m: int, form: str = "normalized") -> float:
    """Probability of ``2m`` photons from ``a`` squeezed modes with squeezing ``b``.

    ``form="normalized"`` is the negative-binomial law
    ``C(a/2 + m - 1, m) sech(b)**a tanh(b)**(2m)``, which sums to one over ``m``.
    ``form="literal"`` evaluates ``C(a/2 + 2m - 1, 2m) sech(b)**a sinh(b)**(2m)``
    as commonly quoted; it is not normalized for ``sinh(b) >= 1``.
    """
    if a < 2 or a % 2:
        raise ValueError("a must be a positive even integer")
    if b < 0:
        raise ValueError("squeezing b must be >= 0")
    if m < 0:
        raise ValueError("m must be >= 0")
    if b == 0:
        return 1.0 if m == 0 else 0.0
    half = a // 2
    if form == "normalized":
        logc = math.lgamma(half + m) - math.lgamma(m + 1) - math.lgamma(half)
        return math.exp(logc + a * math.log(1.0 / math.cosh(b)) + 2 * m * math.log(math.tanh(b)))
    if form == "literal":
        logc = math.lgamma(half + 2 * m) - math.lgamma(2 * m + 1) - math.lgamma(half)
        return math.exp(logc + a * math.log(1.0 / math.cosh(b)) + 2 * m * math.log(math.sinh(b)))
    raise ValueError("form must be 'normalized' or 'literal'")


def photon_pmf_cutoff(a: int, b: float, tail: float = 1e-10) -> int:
    """Smallest ``M`` with ``1 - sum_{m <= M} P(2m) < tail`` for the normalized law."""
    total, m = 0.0, 0
    while True:
        total += photon_number_pmf(a, b, m)
        if 1.0 - total < tail:
            return m
        m += 1
