"""Moments with standard errors, goodness-of-fit distances, and the two
random-subset / random-bijection simulation experiments."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .rng import stream
from .theory import intersection_cells, poisson_intersection_mean


@dataclass(frozen=True)
class MomentSummary:
    count: int
    mean: float
    variance: float
    stderr_mean: float
    central: tuple[float, float, float, float]  # orders 1..4, population-normalized


def moments_with_se(data) -> MomentSummary:
    """Single-pass compensated moments (Terriberry's update) with the SE of the mean."""
    x = np.asarray(data, dtype=float).ravel()
    if x.size < 2:
        raise ValueError("need at least two observations")
    count, mean, m2, m3, m4 = 0, 0.0, 0.0, 0.0, 0.0
    for v in x.tolist():
        n1 = count
        count += 1
        delta = v - mean
        dn = delta / count
        dn2 = dn * dn
        term = delta * dn * n1
        mean += dn
        m4 += term * dn2 * (count * count - 3 * count + 3) + 6 * dn2 * m2 - 4 * dn * m3
        m3 += term * dn * (count - 2) - 3 * dn * m2
        m2 += term
    var = max(m2 / (count - 1), 0.0)
    return MomentSummary(
        count=count,
        mean=mean,
        variance=var,
        stderr_mean=math.sqrt(var / count),
        central=(0.0, m2 / count, m3 / count, m4 / count),
    )


def mean_se(data) -> tuple[float, float]:
    """Vectorized mean and standard error, for large Monte Carlo arrays."""
    x = np.asarray(data, dtype=float).ravel()
    if x.size < 2:
        raise ValueError("need at least two observations")
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(x.size))


def ks_statistic(data, cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """Two-sided Kolmogorov-Smirnov distance between the sample and ``cdf``."""
    x = np.sort(np.asarray(data, dtype=float).ravel())
    if x.size == 0:
        raise ValueError("need at least one observation")
    n = x.size
    f = np.asarray(cdf(x), dtype=float)
    upper = np.arange(1, n + 1) / n - f
    lower = f - np.arange(n) / n
    return float(max(upper.max(), lower.max()))


def poisson_pmf(k, mu: float) -> np.ndarray:
    k = np.asarray(k)
    if mu == 0:
        return (k == 0).astype(float)
    from scipy.special import gammaln

    return np.exp(k * math.log(mu) - mu - gammaln(k + 1))


def tv_tail_cutoff(mu: float) -> int:
    return math.ceil(mu + 12.0 * math.sqrt(mu + 1.0))


def poisson_tv(counts, mu: float) -> float:
    """Total variation between an integer histogram and ``Poisson(mu)``.

    ``counts`` is either a dict ``{k: count}`` or an array indexed by ``k``.
    Mass from ``tv_tail_cutoff(mu)`` upward is folded into one bucket on both sides.
    """
    if mu < 0:
        raise ValueError("mu must be >= 0")
    if isinstance(counts, dict):
        hist = np.zeros(max(counts) + 1 if counts else 1)
        for k, c in counts.items():
            hist[int(k)] += c
    else:
        hist = np.asarray(counts, dtype=float)
    total = hist.sum()
    if total <= 0:
        raise ValueError("histogram is empty")
    cut = tv_tail_cutoff(mu)
    emp = np.zeros(cut + 1)
    head = min(cut, hist.size)
    emp[:head] = hist[:head] / total
    emp[cut] = hist[cut:].sum() / total if hist.size > cut else 0.0
    pmf = poisson_pmf(np.arange(cut), mu)
    ref = np.append(pmf, max(1.0 - pmf.sum(), 0.0))
    return 0.5 * float(np.abs(emp - ref).sum())


def histogram(values) -> dict[int, int]:
    vals, cnts = np.unique(np.asarray(values, dtype=np.int64), return_counts=True)
    return {int(v): int(c) for v, c in zip(vals, cnts)}


def random_subsets(rng: np.random.Generator, n: int, k: int, count: int) -> np.ndarray:
    """``count`` independent uniform ``k``-subsets of ``range(n)``, shape ``(count, k)``, sorted rows."""
    if k == 0:
        return np.zeros((count, 0), dtype=np.int64)
    if k * k <= 2 * n:
        # ordered draws with replacement, redrawing rows that repeat a value:
        # conditioned on distinctness the set is uniform
        out = np.sort(rng.integers(0, n, size=(count, k)), axis=1)
        bad = np.nonzero((np.diff(out, axis=1) == 0).any(axis=1))[0]
        while bad.size:
            redo = np.sort(rng.integers(0, n, size=(bad.size, k)), axis=1)
            out[bad] = redo
            bad = bad[(np.diff(redo, axis=1) == 0).any(axis=1)]
        return out
    if n <= 4096:
        keys = rng.random((count, n))
        return np.sort(np.argpartition(keys, k - 1, axis=1)[:, :k], axis=1)
    out = np.empty((count, k), dtype=np.int64)
    for t in range(count):
        out[t] = np.sort(rng.choice(n, size=k, replace=False))
    return out


@dataclass
class IntersectionReport:
    n: int
    sizes: tuple[int, ...]
    trials: int
    cells: list[tuple[int, ...]]
    histograms: dict[tuple[int, ...], dict[int, int]]
    means: dict[tuple[int, ...], float]
    tv: dict[tuple[int, ...], float]
    counts: np.ndarray  # (trials, len(cells))

    def joint_frequency(self, x: Sequence[int]) -> float:
        """Empirical ``P(b_C = x_C for every cell C)``."""
        return float(np.all(self.counts == np.asarray(x), axis=1).mean())

    def product_poisson(self, x: Sequence[int]) -> float:
        return float(np.prod([poisson_pmf(xc, self.means[c]) for c, xc in zip(self.cells, x)]))


def subset_intersection_experiment(n: int, ms: Sequence[int], trials: int, seed: int,
                                   chunk: int = 500) -> IntersectionReport:
    """Count elements lying in exactly the subsets ``C`` (``|C| >= 2``) across random draws."""
    ms = tuple(int(x) for x in ms)
    if len(ms) > 6:
        raise ValueError("at most 6 subsets")
    if any(x > n for x in ms):
        raise ValueError("subset sizes must not exceed n")
    cells = intersection_cells(len(ms))
    codes = np.array([sum(1 << j for j in c) for c in cells], dtype=np.uint8)
    counts = np.zeros((trials, len(cells)), dtype=np.int64)
    rng = stream(seed, "subset_intersection_experiment")
    for lo in range(0, trials, chunk):
        hi = min(trials, lo + chunk)
        rows = hi - lo
        # membership code of every ground element, one row per trial
        member = np.zeros((rows, n), dtype=np.uint8)
        for j, size in enumerate(ms):
            idx = random_subsets(rng, n, size, rows)
            np.bitwise_or.at(member, (np.repeat(np.arange(rows), size), idx.ravel()), 1 << j)
        for ci, code in enumerate(codes):
            counts[lo:hi, ci] = (member == code).sum(axis=1)
    means = {c: poisson_intersection_mean(ms, n, c) for c in cells}
    hists = {c: histogram(counts[:, i]) for i, c in enumerate(cells)}
    tvs = {c: poisson_tv(hists[c], means[c]) for c in cells}
    return IntersectionReport(n, ms, trials, cells, hists, means, tvs, counts)


def zero_agreement_frequency(m: int, overlap_a: int, overlap_b: int, trials: int, seed: int,
                             chunk: int = 5000) -> tuple[float, float]:
    """Fraction of trials where two independent random bijections never agree.

    ``sigma: A -> B`` and ``tau: A' -> B'`` with ``|A| = |A'| = |B| = |B'| = m``,
    ``|A & A'| = overlap_a`` and ``|B & B'| = overlap_b``. Agreement means
    ``sigma(i) == tau(i)`` for some ``i`` in ``A & A'``.
    """
    if not (0 <= overlap_a <= m and 0 <= overlap_b <= m):
        raise ValueError("overlaps must lie in [0, m]")
    # A = B = range(m); A' = B' shifted so they share the first `overlap` labels.
    # Position i of tau is domain label i for i < overlap_a.
    cod2 = np.concatenate([np.arange(overlap_b), np.arange(m, 2 * m - overlap_b)])
    rng = stream(seed, "zero_agreement_frequency")
    zero = np.zeros(trials, dtype=bool)
    for lo in range(0, trials, chunk):
        rows = min(trials, lo + chunk) - lo
        sigma = np.argsort(rng.random((rows, m)), axis=1)           # image of i in range(m)
        tau = cod2[np.argsort(rng.random((rows, m)), axis=1)]      # image of dom2[i]
        # on the common domain range(overlap_a), tau's image sits at the same position
        agree = sigma[:, :overlap_a] == tau[:, :overlap_a]
        zero[lo:lo + rows] = ~agree.any(axis=1)
    freq = float(zero.mean())
    return freq, math.sqrt(max(freq * (1 - freq), 0.0) / trials)
