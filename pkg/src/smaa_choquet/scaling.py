"""Most-discriminant common scale search and the fixed-scale rerun.

Heterogeneous criteria are recoded onto a shared (0, 1) scale by sampling
candidate scales; each candidate is scored by the optimum of the shared
epsilon over the constraint system it induces, and the deepest one (the most
discriminant) is kept.  The chosen scale then feeds an ordinary
common-scale Monte Carlo run.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .preference import (
    DEFAULT_EPSILON_MIN,
    PreferenceStatement,
    check_compatibility,
    compile_system,
)
from .problem import SCALE_COMMON, SCALE_HETEROGENEOUS, Problem
from .sampling import CommonScale, distinct_levels, sample_scale_matrix
from .smaa import RunConfig, SmaaResults, run

DEFAULT_NUM_CANDIDATES = 10_000

CHANNEL_SCALE_SEARCH = 4


@dataclass
class ScaleSearchResult:
    """Outcome of scoring sampled candidate scales by their epsilon optimum.

    ``epsilons[i]`` is the LP optimum of candidate i (NaN when infeasible);
    the winner is the feasible candidate with the largest epsilon, ties
    broken by the lowest index.
    """

    epsilons: np.ndarray
    winner_index: Optional[int]
    winner_matrix: Optional[np.ndarray]
    winner_scale: Optional[CommonScale]
    infeasible_count: int

    @property
    def all_infeasible(self) -> bool:
        return self.winner_index is None

    @property
    def winner_epsilon(self) -> float:
        if self.winner_index is None:
            raise ValueError("every candidate scale was infeasible")
        return float(self.epsilons[self.winner_index])


def _scale_from_matrix(raw: np.ndarray, matrix: np.ndarray) -> CommonScale:
    columns = []
    for i in range(raw.shape[1]):
        mapping = {}
        for k in range(raw.shape[0]):
            mapping[float(raw[k, i])] = float(matrix[k, i])
        columns.append(mapping)
    return CommonScale(columns=tuple(columns))


def _score_candidates(args) -> np.ndarray:
    matrices, statements, n, additivity, labels, epsilon_min = args
    out = np.full(matrices.shape[0], np.nan)
    for i in range(matrices.shape[0]):
        system = compile_system(statements, n, evals=matrices[i], additivity=additivity, labels=labels)
        res = check_compatibility(system, epsilon_min)
        if res.compatible:
            out[i] = res.epsilon_star
    return out


def most_discriminant_scale(
    problem: Problem,
    statements: Sequence[PreferenceStatement],
    num_candidates: int = DEFAULT_NUM_CANDIDATES,
    seed: int = 0,
    epsilon_min: float = DEFAULT_EPSILON_MIN,
    workers: int = 1,
    additivity: int = 2,
) -> ScaleSearchResult:
    """Sample candidate common scales and keep the most discriminant one.

    Every candidate induces its own constraint system (alternative
    statements depend on the rescaled evaluations); the score is the
    optimum of the shared epsilon.  Without alternative statements the
    system does not depend on the scale, so every feasible candidate scores
    the same and candidate 0 wins.
    """
    if problem.scale_kind != SCALE_HETEROGENEOUS:
        raise ValueError("scale search needs a heterogeneous problem")
    if num_candidates < 1:
        raise ValueError("need at least one candidate")
    raw = problem.point_matrix()
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, CHANNEL_SCALE_SEARCH])))
    matrices = sample_scale_matrix(raw, problem.directions, rng, size=num_candidates)

    statements = list(statements)
    labels = problem.criterion_labels
    if workers > 1 and num_candidates >= 2 * workers:
        bounds = np.linspace(0, num_candidates, workers + 1).astype(int)
        chunks = [
            (matrices[bounds[w]:bounds[w + 1]], statements, problem.n, additivity, labels, epsilon_min)
            for w in range(workers)
        ]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_score_candidates, chunks))
        epsilons = np.concatenate(parts)
    else:
        epsilons = _score_candidates((matrices, statements, problem.n, additivity, labels, epsilon_min))

    feasible = ~np.isnan(epsilons)
    infeasible_count = int((~feasible).sum())
    if not feasible.any():
        return ScaleSearchResult(
            epsilons=epsilons, winner_index=None, winner_matrix=None,
            winner_scale=None, infeasible_count=infeasible_count,
        )
    # argmax over feasible candidates; ties break to the lowest index
    masked = np.where(feasible, epsilons, -np.inf)
    winner = int(np.argmax(masked))
    return ScaleSearchResult(
        epsilons=epsilons,
        winner_index=winner,
        winner_matrix=matrices[winner].copy(),
        winner_scale=_scale_from_matrix(raw, matrices[winner]),
        infeasible_count=infeasible_count,
    )


def fixed_scale_rerun(
    problem: Problem,
    scale: Union[CommonScale, np.ndarray],
    statements: Sequence[PreferenceStatement],
    config: RunConfig,
) -> SmaaResults:
    """Run the common-scale Monte Carlo analysis on a rescaled matrix.

    ``scale`` is either a :class:`CommonScale` (applied to the problem's raw
    evaluations) or an already rescaled (l, n) matrix.  The scale must be
    compatible (checked before sampling starts).
    """
    if isinstance(scale, CommonScale):
        matrix = scale.apply(problem.point_matrix())
    else:
        matrix = np.asarray(scale, dtype=float)
        if matrix.shape != (problem.l, problem.n):
            raise ValueError(f"rescaled matrix must have shape ({problem.l}, {problem.n})")
    rescaled = problem.replace_evaluations(matrix, scale_kind=SCALE_COMMON)
    cfg_case = RunConfig(**{**config.__dict__, "case": "common-scale"})
    return run(rescaled, statements, cfg_case)


def scale_epsilon(
    problem: Problem,
    matrix: np.ndarray,
    statements: Sequence[PreferenceStatement],
    epsilon_min: float = DEFAULT_EPSILON_MIN,
    additivity: int = 2,
):
    """Compatibility result of one concrete rescaled matrix."""
    system = compile_system(list(statements), problem.n, evals=np.asarray(matrix, dtype=float),
                            additivity=additivity, labels=problem.criterion_labels)
    return check_compatibility(system, epsilon_min)


def level_counts(problem: Problem) -> list[int]:
    """Distinct raw levels per criterion (the sampled values per candidate)."""
    raw = problem.point_matrix()
    return [distinct_levels(raw[:, i]).size for i in range(problem.n)]


def verify_order_preservation(problem: Problem, matrix: np.ndarray, tol: float = 0.0) -> bool:
    """Rescaled values must be strictly increasing in preference order."""
    raw = problem.point_matrix()
    matrix = np.asarray(matrix, dtype=float)
    for i, direction in enumerate(problem.directions):
        sgn = 1.0 if direction == "maximize" else -1.0
        order = np.argsort(sgn * raw[:, i], kind="stable")
        for a, b in zip(order[:-1], order[1:]):
            if raw[a, i] == raw[b, i]:
                if matrix[a, i] != matrix[b, i]:
                    return False
            elif matrix[b, i] - matrix[a, i] <= tol:
                return False
    return True
