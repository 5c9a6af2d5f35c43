"""GBS-frequency detection (count, center, normalize, decide), the degree
baseline, and paired null-vs-planted power experiments."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .gbs import enumerate_distribution, sample_exact, sample_mcmc
from .graph import BipartiteGraph, degrees, planted_er
from .rng import child_seed, stream
from .theory import std_normal_cdf


class DegenerateNormalization(ValueError):
    pass


@dataclass(frozen=True)
class SamplerSpec:
    kind: str = "exact"          # exact | mcmc
    m: int = 3
    burnin: int = 10_000
    thin: int = 10
    cap: int | None = None

    def draw(self, g: BipartiteGraph, t: int, seed: int):
        if self.kind == "exact":
            return sample_exact(enumerate_distribution(g, self.m, self.cap), t, seed)
        if self.kind == "mcmc":
            return sample_mcmc(g, self.m, t, self.burnin, self.thin, seed)
        raise ValueError(f"unknown sampler {self.kind!r}")


@dataclass(frozen=True)
class MaxZTest:
    """Decide "planted" when the largest normalized score exceeds ``threshold``."""

    threshold: float = math.inf

    name = "max_z"

    def statistic(self, z: np.ndarray) -> float:
        return float(np.max(z))

    def __call__(self, z: np.ndarray) -> bool:
        return self.statistic(z) > self.threshold


@dataclass(frozen=True)
class TopMeanTest:
    """Mean of the ``q`` fraction of largest scores against ``threshold``."""

    q: float = 0.05
    threshold: float = math.inf

    name = "top_mean"

    def statistic(self, z: np.ndarray) -> float:
        k = max(1, int(math.floor(self.q * z.size)))
        return float(np.sort(z)[-k:].mean())

    def __call__(self, z: np.ndarray) -> bool:
        return self.statistic(z) > self.threshold


@dataclass
class DetectionResult:
    z_scores: np.ndarray          # 2n entries: left nodes then right nodes
    decision: bool
    statistic_name: str
    statistic_value: float
    t_used: int
    counts: np.ndarray            # raw inclusion counts, same layout
    sigma: float
    sigma_left: float
    sigma_right: float
    meta: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.z_scores.size // 2

    @property
    def left(self) -> np.ndarray:
        return self.z_scores[: self.n]

    @property
    def right(self) -> np.ndarray:
        return self.z_scores[self.n:]


def normalize_counts(counts: np.ndarray, t: int, m: int) -> tuple[np.ndarray, float, float, float]:
    """Frequencies minus ``m/n``, divided by their root-mean-square over all ``2n`` nodes."""
    n2 = counts.size
    n = n2 // 2
    z = counts / t - m / n
    sigma = math.sqrt(float(np.mean(z * z)))
    if sigma == 0.0 or np.ptp(counts) == 0:
        raise DegenerateNormalization("degenerate normalization: all node frequencies are equal")
    side_sigma = [math.sqrt(float(np.mean(s * s))) for s in (z[:n], z[n:])]
    return z / sigma, sigma, side_sigma[0], side_sigma[1]


def run_algorithm1(g: BipartiteGraph, sampler: SamplerSpec, t: int,
                   decision: Callable[[np.ndarray], bool] | None = None,
                   seed: int = 0, batch=None) -> DetectionResult:
    """Sample ``t`` subgraphs, count node occurrences, center, normalize, decide.

    ``batch`` may supply pre-drawn samples (used for the degenerate-input tests).
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    decision = MaxZTest() if decision is None else decision
    if batch is None:
        batch = sampler.draw(g, t, seed)
    left, right = batch.inclusion_counts(g.n)
    counts = np.concatenate([left, right])
    assert counts.sum() == 2 * batch.m * batch.t
    z, sigma, s_left, s_right = normalize_counts(counts, batch.t, batch.m)
    stat = getattr(decision, "statistic", None)
    return DetectionResult(
        z_scores=z,
        decision=bool(decision(z)),
        statistic_name=getattr(decision, "name", getattr(decision, "__name__", "custom")),
        statistic_value=float(stat(z)) if stat else float("nan"),
        t_used=batch.t,
        counts=counts,
        sigma=sigma,
        sigma_left=s_left,
        sigma_right=s_right,
        meta=dict(batch.meta, provenance=batch.provenance),
    )


def top_fraction_overlap(z, truth: Sequence[int], c: float) -> tuple[int, bool]:
    """Planted nodes among the ``floor(c n)`` largest scores; ties go to the lower index.

    Returns ``(count, warned)`` where ``warned`` flags an empty truth set.
    """
    if not 0.0 < c < 1.0:
        raise ValueError("c must lie in (0, 1)")
    z = np.asarray(z, dtype=float)
    if len(truth) == 0:
        return 0, True
    top = int(math.floor(c * z.size))
    order = np.lexsort((np.arange(z.size), -z))
    chosen = np.zeros(z.size, dtype=bool)
    chosen[order[:top]] = True
    return int(chosen[np.asarray(truth, dtype=np.int64)].sum()), False


def degree_detector(g: BipartiteGraph) -> tuple[np.ndarray, np.ndarray]:
    """Normalized degrees ``(D - n p) / sqrt(n p (1 - p))`` for both sides."""
    if not 0.0 < g.p < 1.0:
        raise ValueError("degree normalization needs p in (0, 1)")
    scale = math.sqrt(g.n * g.p * (1.0 - g.p))
    dl, dr = degrees(g)
    return (dl - g.n * g.p) / scale, (dr - g.n * g.p) / scale


def auc(null_stats, alt_stats) -> float:
    """Mann-Whitney estimate of ``P(alt > null)``, ties counted one half."""
    x = np.asarray(null_stats, dtype=float)
    y = np.asarray(alt_stats, dtype=float)
    if x.size == 0 or y.size == 0:
        raise ValueError("need nonempty samples")
    greater = (y[:, None] > x[None, :]).sum()
    ties = (y[:, None] == x[None, :]).sum()
    return float((greater + 0.5 * ties) / (x.size * y.size))


def auc_stderr(a: float, n_null: int, n_alt: int) -> float:
    """Hanley-McNeil standard error of an AUC estimate."""
    q1 = a / (2 - a)
    q2 = 2 * a * a / (1 + a)
    var = (a * (1 - a) + (n_alt - 1) * (q1 - a * a) + (n_null - 1) * (q2 - a * a)) / (n_alt * n_null)
    return math.sqrt(max(var, 0.0))


def gaussian_surrogate_overlap(n: int, k: int, eps: float, c: float, trials: int,
                               seed: int) -> np.ndarray:
    """Per-trial count of shifted samples ranked in the top ``floor(c n)``.

    Each trial has ``n - k`` draws from ``N(0, 1)`` and ``k`` from ``N(eps, 1)``.
    Only the ``k`` shifted values are drawn explicitly: the background counts
    falling between consecutive shifted values are multinomial, which gives
    each shifted value's exact rank.
    """
    if not 0 < k <= n:
        raise ValueError("need 0 < k <= n")
    rng = stream(seed, "gaussian_surrogate_overlap")
    top = int(math.floor(c * n))
    out = np.empty(trials, dtype=np.int64)
    cdf = np.vectorize(std_normal_cdf)
    for t in range(trials):
        x = np.sort(rng.normal(eps, 1.0, size=k))[::-1]
        upper = 1.0 - cdf(x)                      # P(background > x_(j)), decreasing order
        probs = np.diff(np.concatenate([[0.0], upper]))
        probs = np.append(probs, max(1.0 - upper[-1], 0.0))
        between = rng.multinomial(n - k, probs / probs.sum())
        above = np.cumsum(between[:k])            # background values above x_(j)
        rank = above + np.arange(1, k + 1)        # 1-based rank among all n values
        out[t] = int((rank <= top).sum())
    return out


@dataclass
class PowerRow:
    trial: int
    n: int
    p: float
    k: int
    m: int
    t: int
    detector: str
    statistic_null: float
    statistic_planted: float
    overlap: int


def _scores(inst_graph: BipartiteGraph, detector: str, sampler: SamplerSpec, t: int,
            seed: int) -> np.ndarray:
    if detector == "weight":
        return run_algorithm1(inst_graph, sampler, t, seed=seed).z_scores
    if detector == "degree":
        dl, dr = degree_detector(inst_graph)
        return np.concatenate([dl, dr])
    raise ValueError(f"unknown detector {detector!r}")


def detection_power_experiment(n: int, p: float, k: int, trials: int, seed: int,
                               detector: str = "weight", sampler: SamplerSpec | None = None,
                               t: int = 2000, c: float = 0.8,
                               statistic: Callable[[np.ndarray], float] | None = None):
    """Paired null (``k = 0``) and planted instances; per-trial rows plus the AUC.

    Returns ``(rows, auc, auc_se)``. The statistic defaults to the max z-score.
    """
    sampler = sampler or SamplerSpec()
    statistic = statistic or MaxZTest().statistic
    rows = []
    for trial in range(trials):
        base = child_seed(seed, "detection_power", trial)
        null = planted_er(n, p, 0, child_seed(base, "null"))
        alt = planted_er(n, p, k, child_seed(base, "planted"))
        z0 = _scores(null.graph, detector, sampler, t, child_seed(base, "sample_null"))
        z1 = _scores(alt.graph, detector, sampler, t, child_seed(base, "sample_planted"))
        overlap, _ = top_fraction_overlap(z1[:n], alt.a0, c)
        rows.append(PowerRow(trial, n, p, k, sampler.m, t, detector,
                             float(statistic(z0)), float(statistic(z1)), overlap))
    a = auc([r.statistic_null for r in rows], [r.statistic_planted for r in rows])
    return rows, a, auc_stderr(a, trials, trials)


def calibrate_max_z(n: int, p: float, sampler: SamplerSpec, t: int, q: float, trials: int,
                    seed: int) -> float:
    """The ``q``-quantile of the max z-score over null instances at ``(n, p, m, t)``."""
    stats = []
    for trial in range(trials):
        base = child_seed(seed, "calibrate", trial)
        g = planted_er(n, p, 0, base).graph
        stats.append(float(np.max(run_algorithm1(g, sampler, t, seed=base).z_scores)))
    return float(np.quantile(stats, q))
