"""Closed-form predictions for node weights, Hafnians and ranking detection.

These are the reference values the experiments are checked against. Each
formula is implemented as stated, with no finite-``n`` corrections.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np


def _check_p(p: float):
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must lie in (0, 1], got {p}")


@dataclass(frozen=True)
class TheoryParams:
    n: int
    m: int
    k: int
    p: float
    c: float = 0.8
    epsilon: float = field(init=False)

    def __post_init__(self):
        _check_p(self.p)
        if not 0 <= self.k <= self.n or not 0 <= self.m <= self.n:
            raise ValueError("need 0 <= k, m <= n")
        if not 0.0 < self.c < 1.0:
            raise ValueError("c must lie in (0, 1)")
        object.__setattr__(self, "epsilon", self.k / math.sqrt(self.n))


def expected_weight(p: float) -> float:
    """Limit of ``E[W(i)]``: ``exp(1/p - 1)``."""
    _check_p(p)
    return math.exp(1.0 / p - 1.0)


def weight_bias(p: float, k: int, n: int) -> float:
    """Leading planted-minus-background weight gap ``e^{1/p-1} (1/p - 1) 2k/n``."""
    _check_p(p)
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    return expected_weight(p) * (1.0 / p - 1.0) * 2.0 * k / n


def covariance_scale(p: float) -> float:
    """``4 (1/p - 1) e^{2(1/p - 1)}``."""
    _check_p(p)
    q = 1.0 / p - 1.0
    return 4.0 * q * math.exp(2.0 * q)


def covariance_entry(p: float, m: int, n: int, same_node: bool) -> float:
    """Limiting covariance of ``sqrt(n) Z(i)`` and ``sqrt(n) Z(j)``."""
    return covariance_scale(p) * (float(same_node) + m * m / n)


def covariance_matrix(p: float, m: int, n: int, indices: Sequence[int]) -> np.ndarray:
    idx = np.asarray(indices)
    same = idx[:, None] == idx[None, :]
    return covariance_scale(p) * (same + m * m / n)


def _pairings(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for j, partner in enumerate(rest):
        for tail in _pairings(rest[:j] + rest[j + 1:]):
            yield [(first, partner)] + tail


def wick_moment(cov) -> float:
    """Isserlis sum over perfect pairings of ``range(len(cov))``; 0 for odd order."""
    cov = np.asarray(cov, dtype=float)
    ell = cov.shape[0]
    if ell < 1:
        raise ValueError("need at least one index")
    if ell % 2:
        return 0.0
    return float(sum(math.prod(cov[i, j] for i, j in mu) for mu in _pairings(list(range(ell)))))


def poisson_intersection_mean(ms: Sequence[int], n: int, c_set: Sequence[int]) -> float:
    """Expected number of ground elements in exactly the subsets ``c_set``.

    >>> poisson_intersection_mean([100, 100], 10_000, [0, 1])
    1.0
    """
    if len(set(c_set)) < 2:
        raise ValueError("need |C| >= 2")
    if any(ms[j] > n for j in c_set):
        raise ValueError("subset sizes must not exceed n")
    return math.prod(ms[j] for j in c_set) / n ** (len(c_set) - 1)


def intersection_cells(ell: int) -> list[tuple[int, ...]]:
    """All index sets ``C`` with ``|C| >= 2`` over ``ell`` subsets, by size then lexicographically."""
    return [c for r in range(2, ell + 1) for c in combinations(range(ell), r)]


def lognormal_params(p: float) -> tuple[float, float]:
    """``(mu, sigma2)`` of the log-normal limit of the normalized Hafnian."""
    _check_p(p)
    return -(1.0 - p) / (2.0 * p), (1.0 - p) / p


def haf_second_moment_exact(n: int, p: float) -> float:
    """``E[Haf**2] = sum_i p**-i / i! * De(n-i)/(n-i)!`` at finite ``n``."""
    _check_p(p)
    if n < 1:
        raise ValueError("need n >= 1")
    # ratio[j] = De(j)/j! from the alternating series
    ratio = np.empty(n + 1)
    acc, term = 0.0, 1.0
    for j in range(n + 1):
        if j:
            term /= -j
        acc += term
        ratio[j] = acc
    total, coef = 0.0, 1.0
    for i in range(n + 1):
        if i:
            coef *= (1.0 / p) / i
        total += coef * ratio[n - i]
    return total


def std_normal_cdf(x: float) -> float:
    """Standard normal CDF via the complementary error function."""
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


# rational initializer coefficients (Acklam)
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425


def _quantile_guess(q: float) -> float:
    if q < _P_LOW:
        r = math.sqrt(-2.0 * math.log(q))
        num = ((((_C[0] * r + _C[1]) * r + _C[2]) * r + _C[3]) * r + _C[4]) * r + _C[5]
        return num / ((((_D[0] * r + _D[1]) * r + _D[2]) * r + _D[3]) * r + 1.0)
    if q > 1.0 - _P_LOW:
        return -_quantile_guess(1.0 - q)
    r = q - 0.5
    s = r * r
    num = (((((_A[0] * s + _A[1]) * s + _A[2]) * s + _A[3]) * s + _A[4]) * s + _A[5]) * r
    return num / (((((_B[0] * s + _B[1]) * s + _B[2]) * s + _B[3]) * s + _B[4]) * s + 1.0)


def std_normal_quantile(q: float) -> float:
    """Inverse standard normal CDF: rational start plus Newton steps."""
    if not 0.0 < q < 1.0:
        raise ValueError(f"quantile needs q in (0, 1), got {q}")
    if q > 0.5:
        # 1 - q is exact here, and the lower tail keeps the residual accurate
        return -std_normal_quantile(1.0 - q)
    x = _quantile_guess(q)
    for _ in range(4):
        pdf = math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
        step = (std_normal_cdf(x) - q) / pdf
        x -= step
        if abs(step) < 1e-15 * max(1.0, abs(x)):
            break
    return x


def detection_proportion(c: float, eps: float) -> float:
    """Expected fraction of planted nodes ranked in the top ``c n`` under the Gaussian model."""
    if not 0.0 < c < 1.0:
        raise ValueError("c must lie in (0, 1)")
    if eps < 0:
        raise ValueError("eps must be >= 0")
    return 1.0 - std_normal_cdf(std_normal_quantile(1.0 - c) - eps)


def degree_mean_shift(p: float, k: int, n: int) -> float:
    """Normalized-degree separation ``k (1-p) / sqrt(n p (1-p))``."""
    if not 0.0 < p < 1.0:
        raise ValueError("degree normalization needs p in (0, 1)")
    return k * (1.0 - p) / math.sqrt(n * p * (1.0 - p))


def predictions(params: TheoryParams) -> dict:
    """Every closed-form prediction for one parameter point."""
    n, m, k, p, c = params.n, params.m, params.k, params.p, params.c
    mu, s2 = lognormal_params(p)
    out = {
        "n": n, "m": m, "k": k, "p": p, "c": c, "epsilon": params.epsilon,
        "expected_weight": expected_weight(p),
        "weight_bias": weight_bias(p, k, n),
        "cov_same": covariance_entry(p, m, n, True),
        "cov_distinct": covariance_entry(p, m, n, False),
        "lognormal_mu": mu,
        "lognormal_sigma2": s2,
        "haf_second_moment": haf_second_moment_exact(n, p),
        "detection_proportion": detection_proportion(c, params.epsilon),
    }
    if p < 1.0:
        out["degree_mean_shift"] = degree_mean_shift(p, k, n)
    return out
