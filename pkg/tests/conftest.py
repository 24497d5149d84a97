import numpy as np
import pytest

from smaa_choquet.capacity import Alternative, Criterion, MobiusCapacity, pair_order
from smaa_choquet.problem import Problem

# 18 alternatives scored on four criteria over a shared [0, 20] scale
SCORES18 = np.array([
    [15, 12, 10, 7], [7, 8, 14, 16], [18, 8, 4, 12], [9, 16, 4, 16],
    [12, 5, 14, 14], [8, 3, 7, 20], [14, 20, 5, 10], [8, 13, 15, 6],
    [3, 17, 2, 14], [4, 20, 8, 9], [16, 7, 14, 10], [8, 11, 5, 19],
    [17, 12, 6, 8], [8, 6, 7, 19], [20, 7, 4, 12], [12, 4, 15, 13],
    [14, 11, 12, 9], [9, 13, 12, 6],
], dtype=float)

SCORES18_STATEMENTS = [
    "imp: g1 > g2", "imp: g3 > g4",
    "synergy: g1,g2", "synergy: g2,g3", "redundancy: g2,g4",
]
SCORES18_COMPARISONS = ["alt: a16 > a2", "alt: a3 > a14", "alt: a13 > a8"]

# reference mean capacity reported for the scores18 polytope (rounded source
# values; they sum to 0.935, not 1 -- kept verbatim as published)
SCORES18_REFERENCE_BARYCENTER = np.array(
    [0.26, 0.12, 0.27, 0.22, 0.098, 0.008, -0.001, 0.09, -0.06, -0.07])

CARS_RAW = np.array([
    [17800, 10.9, 185, 3.8], [15750, 13.5, 163, 3.8], [15050, 11.0, 173, 4.0],
    [15260, 14.2, 172, 3.4], [16300, 11.4, 183, 3.8], [16050, 11.3, 176, 4.0],
    [15700, 14.6, 173, 3.4], [17500, 12.9, 174, 3.5], [17800, 11.8, 165, 3.2],
    [17060, 13.9, 173, 3.4],
])
CARS_DIRECTIONS = ["minimize", "maximize", "maximize", "minimize"]
CARS_STATEMENTS = [
    "alt: a5 > a1", "alt: a7 > a6", "alt: a2 > a3",
    "imp: g1 > g2", "imp: g4 > g3", "synergy: g3,g4", "redundancy: g2,g3",
]

# published fixed common scale for the car data and the matching mean capacity
CARS_FIXED_SCALE = np.array([
    [0.0193, 0.1135, 0.6644, 0.5638], [0.7066, 0.2816, 0.0717, 0.5638],
    [0.9955, 0.1187, 0.3358, 0.0878], [0.7377, 0.4395, 0.09, 0.6603],
    [0.4261, 0.2167, 0.6397, 0.5638], [0.4802, 0.2017, 0.6284, 0.0878],
    [0.7105, 0.8193, 0.3358, 0.6603], [0.2811, 0.2606, 0.6164, 0.6138],
    [0.0199, 0.248, 0.0868, 0.9567], [0.3982, 0.2835, 0.3358, 0.6603],
])
CARS_FIXED_BARYCENTER = np.array(
    [0.22, 0.19, 0.16, 0.25, 0.037, 0.003, 0.097, -0.05, -0.008, 0.09])


def make_problem(evals, directions=None, scale_kind="common", hi=None):
    evals = np.asarray(evals, dtype=float)
    l, n = evals.shape
    directions = directions or ["maximize"] * n
    criteria = [Criterion(i, f"g{i + 1}", directions[i]) for i in range(n)]
    alternatives = [Alternative(k, f"a{k + 1}") for k in range(l)]
    return Problem(criteria=criteria, alternatives=alternatives,
                   lo=evals, hi=evals if hi is None else np.asarray(hi, dtype=float),
                   scale_kind=scale_kind)


@pytest.fixture
def scores18_problem():
    return make_problem(SCORES18)


@pytest.fixture
def cars_problem():
    return make_problem(CARS_RAW, directions=CARS_DIRECTIONS, scale_kind="heterogeneous")


def random_valid_capacity(rng: np.random.Generator, n: int, pair_scale: float = None) -> MobiusCapacity:
    """Rejection-sample a valid 2-additive capacity, independent of the package
    samplers: draw raw coefficients, normalize the total to 1, accept when the
    monotonicity family holds.
    """
    pair_scale = pair_scale if pair_scale is not None else 1.0 / (n * n)
    pairs_idx = pair_order(n)
    while True:
        singles = rng.random(n)
        pairs = rng.uniform(-pair_scale, pair_scale, len(pairs_idx))
        total = singles.sum() + pairs.sum()
        if total <= 0.1:
            continue
        singles /= total
        pairs /= total
        if np.any(singles < 0):
            continue
        ok = True
        for i in range(n):
            negs = sum(min(pairs[c], 0.0) for c, (a, b) in enumerate(pairs_idx) if i in (a, b))
            if singles[i] + negs < 0:
                ok = False
                break
        if ok:
            m = {p: float(pairs[c]) for c, p in enumerate(pairs_idx) if pairs[c] != 0.0}
            return MobiusCapacity(n=n, singles=tuple(singles), pairs=m)
