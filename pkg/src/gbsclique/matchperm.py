"""Perfect-matching counts and normalized Hafnian statistics.

Every Hafnian used here belongs to a bipartite graph, where it equals the
permanent of the biadjacency block, so one exact permanent kernel (Ryser
with Gray-code column updates) serves all of them.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .graph import BipartiteGraph, SubgraphSample, biadjacency_submatrix

MAX_EXACT = 32
MAX_BRUTE = 9


@dataclass(frozen=True)
class PermanentValue:
    exact_count: int
    overflowed: bool = False

    def __int__(self):
        return self.exact_count


def _as_square01(mat) -> np.ndarray:
    a = np.asarray(mat)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if a.size and not np.isin(a, (0, 1)).all():
        raise ValueError("matrix entries must be 0 or 1")
    return np.ascontiguousarray(a, dtype=np.uint8)


def _crt(r64: int, ra: int, rb: int) -> int:
    pa, pb = _kernels.PRIME_A, _kernels.PRIME_B
    # combine the two prime residues, then with the 2**64 residue
    x = ra + pa * (((rb - ra) * pow(pa, -1, pb)) % pb)
    mod1 = pa * pb
    mod2 = 1 << 64
    return x + mod1 * (((r64 - x) * pow(mod1, -1, mod2)) % mod2)


def permanent_exact(mat) -> PermanentValue:
    """Exact permanent of a 0/1 matrix with ``1 <= m <= 32``.

    >>> permanent_exact(np.ones((3, 3), dtype=np.uint8)).exact_count
    6
    """
    a = _as_square01(mat)
    m = a.shape[0]
    if not 1 <= m <= MAX_EXACT:
        raise ValueError(f"permanent_exact supports 1 <= m <= {MAX_EXACT}, got m={m}")
    if m <= _kernels.U64_EXACT_MAX:
        return PermanentValue(int(_kernels.ryser_u64(a)))
    r64, ra, rb = _kernels.ryser_residues(a.astype(np.int64))
    value = _crt(int(r64), int(ra), int(rb))
    return PermanentValue(value, overflowed=value > math.factorial(m))


def permanent_bruteforce(mat) -> PermanentValue:
    """Sum over all ``m!`` permutations; the oracle for :func:`permanent_exact`."""
    a = _as_square01(mat)
    m = a.shape[0]
    if m > MAX_BRUTE:
        raise ValueError(f"permanent_bruteforce supports m <= {MAX_BRUTE}, got m={m}")
    rows = range(m)
    total = 0
    for sigma in itertools.permutations(range(m)):
        if all(a[i, sigma[i]] for i in rows):
            total += 1
    return PermanentValue(total)


def permanents(mats) -> np.ndarray:
    """Vectorized exact permanents for a stack of 0/1 matrices, ``m <= 20``."""
    mats = np.ascontiguousarray(mats, dtype=np.uint8)
    if mats.ndim != 3 or mats.shape[1] != mats.shape[2]:
        raise ValueError("expected a (count, m, m) stack")
    if mats.shape[1] > _kernels.U64_EXACT_MAX:
        raise ValueError(f"batched permanents support m <= {_kernels.U64_EXACT_MAX}")
    return _kernels.perm_batch_u64(mats).astype(np.int64)


def _check_p(p: float):
    if not 0.0 < p <= 1.0:
        raise ValueError(f"normalized statistics need p in (0, 1], got {p}")


def normalizer(m: int, p: float) -> float:
    """``p**m * m!``, the expected number of perfect matchings of an ``m x m`` block."""
    return p**m * math.factorial(m)


def normalized_matching_sum(g: BipartiteGraph, s: SubgraphSample) -> float:
    """``Y(A, B)``: perfect matchings of the induced block over their expectation."""
    _check_p(g.p)
    sub = biadjacency_submatrix(g, s)
    return permanent_exact(sub).exact_count / normalizer(s.m, g.p)


def normalized_hafnian_square(xi, p: float) -> float:
    """``perm(xi) / (p**n n!)`` for an ``n x n`` 0/1 matrix."""
    _check_p(p)
    a = _as_square01(xi)
    return permanent_exact(a).exact_count / normalizer(a.shape[0], p)


def normalized_hafnians(mats, p: float) -> np.ndarray:
    """Batched :func:`normalized_hafnian_square`."""
    _check_p(p)
    mats = np.asarray(mats)
    return permanents(mats) / normalizer(mats.shape[1], p)


def hafnian_rowsum_approx(xi, p: float) -> float:
    """Row-sum surrogate ``prod_i rowsum_i / (n p)``."""
    _check_p(p)
    a = np.asarray(xi)
    n = a.shape[0]
    if n < 1:
        raise ValueError("need n >= 1")
    return float(np.prod(a.sum(axis=1) / (n * p)))


def hafnian_rowsum_approxs(mats, p: float) -> np.ndarray:
    _check_p(p)
    mats = np.asarray(mats)
    n = mats.shape[1]
    return np.prod(mats.sum(axis=2) / (n * p), axis=1)


def derangements(j: int) -> int:
    """Number of fixed-point-free permutations of ``j`` elements."""
    if j < 0:
        raise ValueError("j must be >= 0")
    prev, cur = 1, 0  # De(0), De(1)
    if j == 0:
        return 1
    for k in range(2, j + 1):
        prev, cur = cur, (k - 1) * (cur + prev)
    return cur


def derangement_ratio(j: int) -> float:
    """``De(j) / j!`` via the alternating partial sum of ``e**-1``."""
    if j < 0:
        raise ValueError("j must be >= 0")
    total, term = 1.0, 1.0
    for k in range(1, j + 1):
        term /= -k
        total += term
    return total
