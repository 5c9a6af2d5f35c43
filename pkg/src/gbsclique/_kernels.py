"""Compiled inner loops: Ryser permanents, pair enumeration, Metropolis chain.

All permanent arithmetic runs in unsigned 64-bit registers. Ryser's
alternating sum wraps around on overflow, but the true value of a 0/1
permanent is at most ``m!``, which is below ``2**63`` for ``m <= 20``, so the
wrapped result is exact there. Larger matrices additionally carry residues
modulo two 31-bit primes and are lifted back by CRT in the caller.
"""
from __future__ import annotations

import numpy as np
from numba import njit

U64_EXACT_MAX = 20
PRIME_A = 2147483647
PRIME_B = 2147483629


@njit(cache=True)
def _perm_small(a, m):
    # explicit expansions for m <= 3
    if m == 1:
        return np.uint64(a[0, 0])
    x00, x01 = np.int64(a[0, 0]), np.int64(a[0, 1])
    x10, x11 = np.int64(a[1, 0]), np.int64(a[1, 1])
    if m == 2:
        return np.uint64(x00 * x11 + x01 * x10)
    x02, x12 = np.int64(a[0, 2]), np.int64(a[1, 2])
    x20, x21, x22 = np.int64(a[2, 0]), np.int64(a[2, 1]), np.int64(a[2, 2])
    v = (x00 * (x11 * x22 + x12 * x21)
         + x01 * (x10 * x22 + x12 * x20)
         + x02 * (x10 * x21 + x11 * x20))
    return np.uint64(v)


@njit(cache=True)
def ryser_u64(a):
    """Permanent of a square 0/1 ``uint8`` matrix modulo ``2**64``."""
    m = a.shape[0]
    if m == 0:
        return np.uint64(1)
    if m <= 3:
        return _perm_small(a, m)
    # columns as contiguous rows; the loop is branch-free on purpose
    at = np.empty((m, m), dtype=np.uint64)
    for i in range(m):
        for j in range(m):
            at[j, i] = a[i, j]
    rs = np.zeros(m, dtype=np.uint64)
    pos = np.uint64(0)
    neg = np.uint64(0)
    size = 0
    gray = 0
    for k in range(1, 1 << m):
        j = 0
        kk = k
        while not kk & 1:
            kk >>= 1
            j += 1
        gray ^= 1 << j
        col = at[j]
        if (gray >> j) & 1:
            size += 1
            for i in range(m):
                rs[i] += col[i]
        else:
            size -= 1
            for i in range(m):
                rs[i] -= col[i]
        prod = np.uint64(1)
        for i in range(m):
            prod *= rs[i]
        if (m - size) & 1:
            neg += prod
        else:
            pos += prod
    return pos - neg


@njit(cache=True)
def ryser_residues(a):
    """Permanent modulo ``2**64``, ``PRIME_A`` and ``PRIME_B`` in one Gray-code pass."""
    m = a.shape[0]
    rs = np.zeros(m, dtype=np.int64)
    pos = np.uint64(0)
    neg = np.uint64(0)
    ra = 0
    rb = 0
    size = 0
    gray = 0
    for k in range(1, 1 << m):
        j = 0
        while not (k >> j) & 1:
            j += 1
        gray ^= 1 << j
        if (gray >> j) & 1:
            size += 1
            for i in range(m):
                rs[i] += a[i, j]
        else:
            size -= 1
            for i in range(m):
                rs[i] -= a[i, j]
        prod = np.uint64(1)
        pa = 1
        pb = 1
        zero = False
        for i in range(m):
            r = rs[i]
            if r == 0:
                zero = True
                break
            prod *= np.uint64(r)
            pa = (pa * r) % PRIME_A
            pb = (pb * r) % PRIME_B
        # prod itself may wrap to 0 mod 2**64 (e.g. 16**16), so test the flag
        if not zero:
            if (m - size) & 1:
                neg += prod
                ra = (ra - pa) % PRIME_A
                rb = (rb - pb) % PRIME_B
            else:
                pos += prod
                ra = (ra + pa) % PRIME_A
                rb = (rb + pb) % PRIME_B
    return pos - neg, ra, rb


@njit(cache=True)
def perm_batch_u64(mats):
    out = np.empty(mats.shape[0], dtype=np.uint64)
    for t in range(mats.shape[0]):
        out[t] = ryser_u64(mats[t])
    return out


@njit(cache=True)
def _fill(sub, xi, rows, cols, m):
    for r in range(m):
        for c in range(m):
            sub[r, c] = xi[rows[r], cols[c]]


@njit(cache=True)
def perm_pairs(xi, a_sets, b_sets):
    """Permanent for every ``(A, B)`` pair; returns an ``(NA, NB)`` uint64 table."""
    m = a_sets.shape[1]
    out = np.empty((a_sets.shape[0], b_sets.shape[0]), dtype=np.uint64)
    sub = np.empty((m, m), dtype=np.uint8)
    for ia in range(a_sets.shape[0]):
        for ib in range(b_sets.shape[0]):
            _fill(sub, xi, a_sets[ia], b_sets[ib], m)
            out[ia, ib] = ryser_u64(sub)
    return out


@njit(cache=True)
def perm_sq_rowsums(xi, a_sets, b_sets):
    """For each ``A`` in ``a_sets``: ``sum_B perm(xi[A, B])**2`` as float64."""
    m = a_sets.shape[1]
    out = np.zeros(a_sets.shape[0], dtype=np.float64)
    sub = np.empty((m, m), dtype=np.uint8)
    for ia in range(a_sets.shape[0]):
        acc = 0.0
        for ib in range(b_sets.shape[0]):
            _fill(sub, xi, a_sets[ia], b_sets[ib], m)
            v = float(ryser_u64(sub))
            acc += v * v
        out[ia] = acc
    return out


@njit(cache=True)
def perm_rows_cols(xi, rows, cols):
    """Permanents of ``xi[rows[t]][:, cols[t]]`` for a batch of index sets."""
    m = rows.shape[1]
    out = np.empty(rows.shape[0], dtype=np.uint64)
    sub = np.empty((m, m), dtype=np.uint8)
    for t in range(rows.shape[0]):
        _fill(sub, xi, rows[t], cols[t], m)
        out[t] = ryser_u64(sub)
    return out


@njit(cache=True)
def metropolis_chain(xi, a, b, side, slot, outside, unif, burnin, thin, samples_a, samples_b):
    """Swap-one Metropolis chain over balanced pairs with target ``perm**2``.

    ``a``/``b`` hold the start state and are updated in place. The proposal
    streams ``side``, ``slot``, ``outside`` (rank among non-members) and
    ``unif`` are pre-drawn so the chain is a pure function of its inputs.
    Returns the number of accepted moves.
    """
    n = xi.shape[0]
    m = a.shape[0]
    in_a = np.zeros(n, dtype=np.bool_)
    in_b = np.zeros(n, dtype=np.bool_)
    for i in range(m):
        in_a[a[i]] = True
        in_b[b[i]] = True
    sub = np.empty((m, m), dtype=np.uint8)
    _fill(sub, xi, a, b, m)
    cur = float(ryser_u64(sub))
    accepted = 0
    kept = 0
    steps = side.shape[0]
    for s in range(steps):
        if side[s] == 0:
            members, mask = a, in_a
        else:
            members, mask = b, in_b
        # outside[s]-th vertex not in the current set
        r = outside[s]
        v = -1
        for x in range(n):
            if not mask[x]:
                if r == 0:
                    v = x
                    break
                r -= 1
        old = members[slot[s]]
        members[slot[s]] = v
        _fill(sub, xi, a, b, m)
        new = float(ryser_u64(sub))
        if new > 0.0 and unif[s] * cur * cur < new * new:
            mask[old] = False
            mask[v] = True
            cur = new
            accepted += 1
        else:
            members[slot[s]] = old
        if s >= burnin and (s - burnin) % thin == thin - 1:
            if kept < samples_a.shape[0]:
                samples_a[kept, :] = np.sort(a)
                samples_b[kept, :] = np.sort(b)
                kept += 1
    return accepted
