"""Pure-numpy implementations of the hot kernels.

Reference semantics for the compiled backend: same arguments, same return
values, same random-number consumption (one normal row plus one uniform per
chain attempt, success or not).
"""
from __future__ import annotations

import numpy as np

NAME = "fallback"

CHAIN_OK = 0
CHAIN_EXHAUSTED = 1
CHAIN_STUCK = 2
CHAIN_UNBOUNDED = 3

_HUGE = 1e100


def simplex_pivot_loop(T, basis, end_col, tol, max_pivots):
    """Primal simplex pivoting on a dense tableau until optimality.

    ``T`` is (m+1, ncols+1): m constraint rows, an objective row of reduced
    costs and a trailing rhs column.  Entering column: lowest index below
    ``end_col`` with reduced cost > tol (Bland).  Leaving row: minimum ratio,
    ties to the lowest row index.  Returns (status, pivots) with status
    0 = optimal, 1 = unbounded, 2 = pivot cap hit.
    """
    m = T.shape[0] - 1
    pivots = 0
    obj = T[m]
    while pivots < max_pivots:
        candidates = np.nonzero(obj[:end_col] > tol)[0]
        if candidates.size == 0:
            return 0, pivots
        j = int(candidates[0])
        col = T[:m, j]
        rows = np.nonzero(col > tol)[0]
        if rows.size == 0:
            return 1, pivots
        ratios = T[rows, -1] / col[rows]
        r = int(rows[np.argmin(ratios)])  # argmin returns first minimum: lowest row index
        piv_row = T[r] / T[r, j]
        column = T[:, j].copy()
        T -= np.outer(column, piv_row)
        T[r] = piv_row
        basis[r] = j
        pivots += 1
    return 2, pivots


def chain_steps(x, nb, A, b, normals, uniforms, out, start, fails_in, chord_tol=1e-12, max_retries=100):
    """Advance a Hit-and-Run chain through a block of pre-drawn randoms.

    x           (dim,) current point, satisfies A @ x >= b; modified in place
    nb          (dnull, dim) orthonormal rows spanning the feasible directions
    A, b        inequality rows, meaning A @ p >= b
    normals     (navail, dnull) standard normal draws
    uniforms    (navail,) uniform draws on [0, 1)
    out         (want, dim) output buffer for successive points
    start       number of points already written into ``out``
    fails_in    consecutive failed attempts carried over from the last block

    Each attempt consumes exactly one normals row and one uniform.  Returns
    (written, consumed, fails_out, status); status is CHAIN_OK when ``out``
    is full, CHAIN_EXHAUSTED when the random block ran out first,
    CHAIN_STUCK after ``max_retries`` consecutive empty chords and
    CHAIN_UNBOUNDED if a chord has no finite end (the polytope is open).
    """
    want = out.shape[0]
    navail = normals.shape[0]
    written = start
    consumed = 0
    fails = fails_in
    while written < want:
        if consumed >= navail:
            return written, consumed, fails, CHAIN_EXHAUSTED
        z = normals[consumed]
        u = uniforms[consumed]
        consumed += 1
        norm = np.sqrt(z @ z)
        if norm < 1e-14:
            fails += 1
            if fails >= max_retries:
                return written, consumed, fails, CHAIN_STUCK
            continue
        d = (z / norm) @ nb
        s = A @ d
        margin = A @ x - b
        lo, hi = -_HUGE, _HUGE
        for r in range(s.shape[0]):
            sr = s[r]
            if sr > 1e-14:
                bound = -margin[r] / sr
                if bound > lo:
                    lo = bound
            elif sr < -1e-14:
                bound = -margin[r] / sr
                if bound < hi:
                    hi = bound
        if lo <= -_HUGE * 0.5 or hi >= _HUGE * 0.5:
            return written, consumed, fails, CHAIN_UNBOUNDED
        if hi - lo < chord_tol:
            fails += 1
            if fails >= max_retries:
                return written, consumed, fails, CHAIN_STUCK
            continue
        fails = 0
        lam = lo + u * (hi - lo)
        x += lam * d
        out[written] = x
        written += 1
    return written, consumed, fails, CHAIN_OK


def tally_block(values, mobius, rank_counts, strict_counts, indiff_counts, first_sum, first_count, bary_sum):
    """Accumulate Monte Carlo tallies for one block of iterations.

    values       (B, l) aggregation values per iteration and alternative
    mobius       (B, d) sampled Mobius coefficient vectors
    rank_counts  (l, l) int64, [k, r-1] += iterations with rank(k) = r
    strict/indiff_counts (l, l) int64 pairwise comparison tallies (h over k)
    first_sum    (l, d) float64, summed Mobius vectors where k ranked first
    first_count  (l,) int64
    bary_sum     (d,) float64, summed Mobius vectors over the block

    rank(k) = 1 + |{h : value_h > value_k}|; exact float equality counts as
    indifference, so tied alternatives share the best rank.
    """
    B, l = values.shape
    greater = values[:, :, None] > values[:, None, :]  # [t, h, k]
    ranks = 1 + greater.sum(axis=1)  # (B, l)
    for k in range(l):
        np.add.at(rank_counts[k], ranks[:, k] - 1, 1)
    strict_counts += greater.sum(axis=0)
    equal = values[:, :, None] == values[:, None, :]
    eq_sum = equal.sum(axis=0)
    np.fill_diagonal(eq_sum, 0)
    indiff_counts += eq_sum
    first = ranks == 1  # (B, l)
    first_count += first.sum(axis=0)
    first_sum += first.T.astype(float) @ mobius
    bary_sum += mobius.sum(axis=0)
