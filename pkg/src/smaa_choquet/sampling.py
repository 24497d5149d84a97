"""Randomized generators: polytope chains, interval draws, common scales.

The Hit-and-Run sampler walks the polytope of Mobius coefficient vectors
satisfying a compiled constraint system with the shared epsilon frozen to a
small positive value.  Directions are drawn uniformly on the unit sphere of
the null space of all equality rows, intersected with the inequalities via
ratio tests, and the next point is uniform on the feasible chord.

All generators accept a ``numpy.random.Generator``; seeding contracts live
in :mod:`smaa_choquet.smaa`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from ._kernels import active_backend
from .preference import (
    DEFAULT_EPSILON_MIN,
    REL_EQ,
    REL_GE,
    LinearConstraintSystem,
    check_compatibility,
)

#: every chain point must satisfy the system at least this well
CHAIN_FEASIBILITY_TOL = 1e-9
#: default steps discarded before the first stored point
DEFAULT_BURN_IN = 1000
#: cap applied to epsilon when freezing strict rows for sampling
EPSILON_FREEZE_CAP_FACTOR = 10.0

_RANDOM_BLOCK = 4096


class IncompatibleSystemError(RuntimeError):
    """Raised when sampling is requested for a system with no interior."""


class ChainStuckError(RuntimeError):
    """Raised after too many consecutive numerically empty chords."""


def epsilon_freeze_value(epsilon_star: float, epsilon_min: float = DEFAULT_EPSILON_MIN) -> float:
    """Frozen epsilon used while sampling: min(eps*/2, 10 * eps_min).

    Keeps strict statements strictly satisfied while shaving almost nothing
    off the compatible region.
    """
    return min(epsilon_star / 2.0, EPSILON_FREEZE_CAP_FACTOR * epsilon_min)


def seed_point(system: LinearConstraintSystem, epsilon_min: float = DEFAULT_EPSILON_MIN) -> tuple[np.ndarray, float]:
    """Interior starting point: the max-epsilon LP vertex and its optimum.

    The returned Mobius vector satisfies every strict row with margin
    epsilon*, hence strictly more than any frozen epsilon <= eps*/2.
    Raises :class:`IncompatibleSystemError` when no compatible model exists.
    """
    res = check_compatibility(system, epsilon_min=epsilon_min)
    if not res.compatible:
        raise IncompatibleSystemError(
            f"no compatible model: status={res.status}, epsilon*={res.epsilon_star}, "
            f"suspect rows: {', '.join(res.suspect_rows) or 'n/a'}"
        )
    return res.point, res.epsilon_star


def chebyshev_center(
    system: LinearConstraintSystem,
    epsilon: float,
    radius_cap: float = 10.0,
) -> tuple[np.ndarray, float]:
    """Deepest point of the frozen polytope and its inradius.

    Maximizes t subject to ``a @ x >= b + ||a|| t`` for every inequality row
    (epsilon already substituted into strict rows) and the equality rows.
    Hit-and-Run chains start here: the max-epsilon LP optimum is a vertex of
    the polytope, where almost every random chord is empty.
    """
    from .linprog import LpProblem, solve

    E, f, A, b = frozen_polytope(system, epsilon)
    num = system.num_mobius
    norms = np.linalg.norm(A, axis=1)
    rows = np.hstack([A, -norms[:, None]])
    rels = [REL_GE] * A.shape[0]
    if E.shape[0]:
        rows = np.vstack([rows, np.hstack([E, np.zeros((E.shape[0], 1))])])
        rels += [REL_EQ] * E.shape[0]
        rhs = np.concatenate([b, f])
    else:
        rhs = b
    c = np.zeros(num + 1)
    c[-1] = 1.0
    problem = LpProblem(
        c=c, A=rows, relations=rels, b=rhs,
        bounds=[(None, None)] * num + [(0.0, radius_cap)],
    )
    sol = solve(problem)
    if sol.status != "optimal":
        raise IncompatibleSystemError(f"no interior point found: LP status {sol.status}")
    return sol.x[:num].copy(), float(sol.value)


def null_space_basis(equalities: np.ndarray, drop_tol: float = 1e-12) -> np.ndarray:
    """Orthonormal rows spanning the null space of the equality rows.

    Gram-Schmidt (two passes for stability) over the standard basis after
    removing the span of the equality rows; directions whose residual norm
    falls below ``drop_tol`` are dropped.  Deterministic for fixed input.
    """
    equalities = np.atleast_2d(np.asarray(equalities, dtype=float))
    dim = equalities.shape[1]
    span: list[np.ndarray] = []
    for row in equalities:
        v = row.copy()
        for q in span:
            v -= (q @ v) * q
        for q in span:
            v -= (q @ v) * q
        norm = np.linalg.norm(v)
        if norm > drop_tol:
            span.append(v / norm)
    basis: list[np.ndarray] = []
    for i in range(dim):
        v = np.zeros(dim)
        v[i] = 1.0
        for q in span + basis:
            v -= (q @ v) * q
        for q in span + basis:
            v -= (q @ v) * q
        norm = np.linalg.norm(v)
        if norm > drop_tol:
            basis.append(v / norm)
    if not basis:
        return np.zeros((0, dim))
    return np.vstack(basis)


def frozen_polytope(system: LinearConstraintSystem, epsilon: float) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Split a compiled system into (E, f, A, b) over the Mobius variables.

    The epsilon column is dropped; strict rows (epsilon coefficient -1)
    become ``a @ x >= rhs + epsilon``.  Equality rows never carry epsilon.
    """
    num = system.num_mobius
    eq_mask = np.array([rel == REL_EQ for rel in system.relations], dtype=bool)
    ge_mask = ~eq_mask
    eps_col = system.matrix[:, -1]
    if np.any(eps_col[eq_mask] != 0.0):
        raise ValueError("equality rows must not involve epsilon")
    E = system.matrix[eq_mask, :num]
    f = system.rhs[eq_mask]
    A = system.matrix[ge_mask, :num]
    b = system.rhs[ge_mask] - eps_col[ge_mask] * epsilon  # -(-1)*eps = +eps
    return E, f, A, b


@dataclass
class PolytopeSampler:
    """Hit-and-Run chain over a frozen compatible-capacity polytope.

    Built from a compiled system and a frozen epsilon; the current point
    always satisfies the equalities and inequalities within 1e-9.
    """

    system: LinearConstraintSystem
    epsilon: float
    start: np.ndarray
    rng: np.random.Generator
    burn_in: int = DEFAULT_BURN_IN
    thinning: int = 1
    max_retries: int = 100

    def __post_init__(self):
        if self.thinning < 1:
            raise ValueError("thinning must be >= 1")
        E, f, A, b = frozen_polytope(self.system, self.epsilon)
        self._A = np.ascontiguousarray(A)
        self._b = np.ascontiguousarray(b)
        self._nb = np.ascontiguousarray(null_space_basis(E))
        if self._nb.shape[0] == 0:
            raise ValueError("equality rows pin the capacity; nothing to sample")
        self.point = np.ascontiguousarray(np.asarray(self.start, dtype=float).copy())
        if self.point.shape != (self.system.num_mobius,):
            raise ValueError("start point has the wrong dimension")
        bad = self._check_point(E, f)
        if bad:
            raise ValueError(f"start point violates the system: {bad}")
        self._burned = False

    def _check_point(self, E, f) -> str:
        if E.shape[0] and np.max(np.abs(E @ self.point - f)) > CHAIN_FEASIBILITY_TOL:
            return "equality residual too large"
        if self._A.shape[0] and np.min(self._A @ self.point - self._b) < -CHAIN_FEASIBILITY_TOL:
            return "inequality margin below -1e-9"
        return ""

    @property
    def dimension(self) -> int:
        """Dimension of the affine subspace the chain moves in."""
        return self._nb.shape[0]

    def _advance(self, out: np.ndarray):
        """Fill ``out`` with successive chain points, refilling random blocks."""
        kern = active_backend()
        want = out.shape[0]
        written = 0
        fails = 0
        dnull = self._nb.shape[0]
        while written < want:
            block = min(_RANDOM_BLOCK, max(64, want - written + 16))
            normals = self.rng.standard_normal((block, dnull))
            uniforms = self.rng.random(block)
            written, _consumed, fails, status = kern.chain_steps(
                self.point, self._nb, self._A, self._b,
                normals, uniforms, out, written, fails,
                1e-12, self.max_retries,
            )
            if status == kern.CHAIN_STUCK:
                raise ChainStuckError(
                    f"{self.max_retries} consecutive empty chords; the frozen polytope "
                    f"has no interior around {self.point!r}"
                )
            if status == kern.CHAIN_UNBOUNDED:
                raise RuntimeError("unbounded chord: the sampled polytope is not compact")

    def step(self) -> np.ndarray:
        """One Hit-and-Run step; returns a copy of the new point."""
        out = np.empty((1, self.point.shape[0]))
        self._advance(out)
        return out[0].copy()

    def sample(self, count: int) -> np.ndarray:
        """Burn in once, then return ``count`` thinned points as rows."""
        if not self._burned:
            if self.burn_in > 0:
                scratch = np.empty((self.burn_in, self.point.shape[0]))
                self._advance(scratch)
            self._burned = True
        if self.thinning == 1:
            out = np.empty((count, self.point.shape[0]))
            self._advance(out)
            return out
        scratch = np.empty((count * self.thinning, self.point.shape[0]))
        self._advance(scratch)
        return np.ascontiguousarray(scratch[self.thinning - 1 :: self.thinning])


def sampler_for(
    system: LinearConstraintSystem,
    rng: np.random.Generator,
    epsilon_min: float = DEFAULT_EPSILON_MIN,
    epsilon_freeze: Optional[float] = None,
    burn_in: int = DEFAULT_BURN_IN,
    thinning: int = 1,
    start: Optional[np.ndarray] = None,
) -> PolytopeSampler:
    """Convenience constructor: check compatibility, freeze epsilon, start deep.

    The default starting point is the Chebyshev center of the frozen
    polytope, which has strictly positive margin against every inequality
    row (vertices stall the chain).
    """
    _, eps_star = seed_point(system, epsilon_min)
    eps = epsilon_freeze if epsilon_freeze is not None else epsilon_freeze_value(eps_star, epsilon_min)
    if start is None:
        start, _radius = chebyshev_center(system, eps)
    return PolytopeSampler(
        system=system,
        epsilon=eps,
        start=start,
        rng=rng,
        burn_in=burn_in,
        thinning=thinning,
    )


# ---------------------------------------------------------------------------
# evaluation-matrix sampling (interval evaluations)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IntervalEvaluation:
    """Closed interval [lo, hi]; point evaluations are the lo == hi case."""

    lo: float
    hi: float

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"interval bounds out of order: [{self.lo}, {self.hi}]")

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi


def integer_support(lo: float, hi: float) -> tuple[int, int]:
    """Integer endpoints inside [lo, hi]; raises when the range is empty."""
    lo_i = int(np.ceil(lo))
    hi_i = int(np.floor(hi))
    if lo_i > hi_i:
        raise ValueError(f"no integer inside [{lo}, {hi}]")
    return lo_i, hi_i


def sample_eval_matrix(
    lo: np.ndarray,
    hi: np.ndarray,
    mode: str,
    rng: np.random.Generator,
    size: Optional[int] = None,
) -> np.ndarray:
    """Draw evaluation matrices uniformly inside per-cell intervals.

    ``mode="continuous"`` draws uniform on [lo, hi]; ``mode="integer"``
    uniform over the integers of the interval.  With ``size=None`` the
    result is one (l, n) matrix, otherwise (size, l, n).  Degenerate cells
    (lo == hi) always return the point value, consuming a draw regardless so
    the stream layout does not depend on the data.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if lo.shape != hi.shape:
        raise ValueError("interval bound matrices must share a shape")
    shape = (lo.shape if size is None else (size,) + lo.shape)
    u = rng.random(shape)
    if mode == "continuous":
        return lo + u * (hi - lo)
    if mode == "integer":
        # exact (lo == hi) cells pass through; only sampled cells need integers
        point = lo == hi
        lo_i = np.where(point, lo, np.ceil(lo))
        hi_i = np.where(point, hi, np.floor(hi))
        if np.any(lo_i > hi_i):
            k, i = np.argwhere(lo_i > hi_i)[0]
            raise ValueError(f"no integer inside [{lo[k, i]}, {hi[k, i]}] at cell ({k}, {i})")
        counts = hi_i - lo_i + 1.0
        return np.minimum(lo_i + np.floor(u * counts), hi_i)
    raise ValueError(f"unknown sampling mode {mode!r}")


# ---------------------------------------------------------------------------
# common-scale sampling (heterogeneous criteria)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CommonScale:
    """Per-criterion recoding of raw levels into (0, 1), order-preserving.

    ``columns[i]`` maps each distinct raw level of criterion i to its scale
    value; preference order (after the direction flag) is strictly
    increasing in the scale value.
    """

    columns: tuple[Mapping[float, float], ...]

    def apply(self, raw: np.ndarray) -> np.ndarray:
        raw = np.asarray(raw, dtype=float)
        out = np.empty_like(raw)
        for i, column in enumerate(self.columns):
            for k in range(raw.shape[0]):
                out[k, i] = column[raw[k, i]]
        return out


def distinct_levels(column: Sequence[float]) -> np.ndarray:
    """Sorted distinct raw levels of one criterion column."""
    levels = np.unique(np.asarray(column, dtype=float))
    if levels.size == 0:
        raise ValueError("empty evaluation column")
    return levels


def preference_ranks(column: Sequence[float], direction: str = "maximize") -> tuple[np.ndarray, int]:
    """Rank of each alternative's level in preference order (worst = 0).

    For ``maximize`` higher raw levels are better; for ``minimize`` lower
    ones are.  Alternatives sharing a raw level share a rank.
    """
    levels = distinct_levels(column)
    idx = np.searchsorted(levels, np.asarray(column, dtype=float))
    if direction == "maximize":
        return idx, levels.size
    if direction == "minimize":
        return levels.size - 1 - idx, levels.size
    raise ValueError(f"unknown direction {direction!r}")


def sample_scale_values(num_levels: int, rng: np.random.Generator, size: Optional[int] = None) -> np.ndarray:
    """Sorted vectors of distinct uniforms on (0, 1), one per requested row.

    Duplicate or zero draws (probability-zero events) trigger a redraw of
    the affected row so the values are strictly increasing and inside the
    open interval.
    """
    rows = 1 if size is None else size
    draws = rng.random((rows, num_levels))
    draws.sort(axis=1)
    while True:
        bad = (draws[:, 0] <= 0.0)
        if num_levels > 1:
            bad = bad | (np.diff(draws, axis=1) <= 0.0).any(axis=1)
        idx = np.nonzero(bad)[0]
        if idx.size == 0:
            break
        fresh = rng.random((idx.size, num_levels))
        fresh.sort(axis=1)
        draws[idx] = fresh
    return draws[0] if size is None else draws


def sample_common_scale(
    column: Sequence[float],
    rng: np.random.Generator,
    direction: str = "maximize",
) -> dict[float, float]:
    """One sampled scale column: distinct uniforms assigned by preference order.

    The best raw level (after the direction flag) receives the largest
    sampled value; alternatives sharing a raw level share a value.
    """
    levels = distinct_levels(column)
    values = sample_scale_values(levels.size, rng)
    if direction == "minimize":
        values = values[::-1]
    elif direction != "maximize":
        raise ValueError(f"unknown direction {direction!r}")
    return {float(lv): float(values[i]) for i, lv in enumerate(levels)}


def sample_scale_matrix(
    raw: np.ndarray,
    directions: Sequence[str],
    rng: np.random.Generator,
    size: Optional[int] = None,
) -> np.ndarray:
    """Rescaled evaluation matrices under freshly sampled common scales.

    With ``size=None`` one (l, n) matrix; otherwise (size, l, n).  Draws are
    consumed criterion-major (all requested iterations for criterion 0,
    then criterion 1, ...), so a fixed chunking of iterations is part of a
    run's reproducibility contract.
    """
    raw = np.asarray(raw, dtype=float)
    l, n = raw.shape
    if len(directions) != n:
        raise ValueError("one direction per criterion required")
    rows = 1 if size is None else size
    out = np.empty((rows, l, n))
    for i in range(n):
        ranks, num_levels = preference_ranks(raw[:, i], directions[i])
        values = sample_scale_values(num_levels, rng, size=rows)  # (rows, num_levels)
        out[:, :, i] = values[:, ranks]
    return out[0] if size is None else out
