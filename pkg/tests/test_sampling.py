import numpy as np
import pytest

from smaa_choquet.preference import compile_system, parse_statement
from smaa_choquet.sampling import (
    CommonScale,
    IncompatibleSystemError,
    IntervalEvaluation,
    PolytopeSampler,
    chebyshev_center,
    epsilon_freeze_value,
    frozen_polytope,
    integer_support,
    null_space_basis,
    preference_ranks,
    sample_common_scale,
    sample_eval_matrix,
    sample_scale_matrix,
    sample_scale_values,
    sampler_for,
    seed_point,
)
from conftest import SCORES18, SCORES18_STATEMENTS, SCORES18_COMPARISONS

G4 = ["g1", "g2", "g3", "g4"]
A18 = [f"a{k}" for k in range(1, 19)]


def scores18_system(with_comparisons=False):
    texts = SCORES18_STATEMENTS + (SCORES18_COMPARISONS if with_comparisons else [])
    sts = [parse_statement(t, G4, A18) for t in texts]
    return compile_system(sts, 4, evals=SCORES18)


def ks_statistic(samples, cdf):
    xs = np.sort(samples)
    n = xs.size
    theory = cdf(xs)
    empirical_hi = np.arange(1, n + 1) / n
    empirical_lo = np.arange(0, n) / n
    return max(np.max(np.abs(empirical_hi - theory)), np.max(np.abs(theory - empirical_lo)))


# ---------------------------------------------------------------------------
# seeding and geometry
# ---------------------------------------------------------------------------

def test_seed_point_satisfies_every_row():
    system = scores18_system()
    point, eps_star = seed_point(system)
    assert eps_star > 0
    assert system.satisfied_by(point, epsilon=eps_star, tol=1e-7)


def test_seed_point_rejects_incompatible_systems():
    sts = [parse_statement("imp: g1 > g2", G4, A18), parse_statement("imp: g2 > g1", G4, A18)]
    with pytest.raises(IncompatibleSystemError):
        seed_point(compile_system(sts, 4))


def test_chebyshev_center_has_positive_margin_everywhere():
    system = scores18_system(with_comparisons=True)
    eps = epsilon_freeze_value(seed_point(system)[1])
    center, radius = chebyshev_center(system, eps)
    assert radius > 0
    _, _, A, b = frozen_polytope(system, eps)
    assert np.min(A @ center - b) > 0


def test_null_space_basis_is_orthonormal_and_annihilates():
    system = scores18_system()
    E, f, _, _ = frozen_polytope(system, 1e-5)
    nb = null_space_basis(E)
    assert nb.shape == (9, 10)  # one normalization equality on 10 coordinates
    np.testing.assert_allclose(nb @ nb.T, np.eye(9), atol=1e-12)
    np.testing.assert_allclose(E @ nb.T, 0.0, atol=1e-12)


def test_uniform_capacity_is_a_valid_manual_start():
    system = compile_system([], 4)
    rng = np.random.default_rng(0)
    start = np.full(10, 0.0)
    start[:4] = 0.25
    sampler = PolytopeSampler(system=system, epsilon=1e-5, start=start, rng=rng, burn_in=0)
    pt = sampler.step()
    assert pt.shape == (10,)


def test_sampler_rejects_points_outside_the_polytope():
    system = compile_system([], 4)
    bad = np.full(10, 0.0)
    bad[:4] = [0.5, 0.5, 0.5, -0.5]
    with pytest.raises(ValueError):
        PolytopeSampler(system=system, epsilon=1e-5, start=bad, rng=np.random.default_rng(0))


# ---------------------------------------------------------------------------
# chain distribution
# ---------------------------------------------------------------------------

def test_every_chain_point_satisfies_the_system():
    system = scores18_system(with_comparisons=True)
    rng = np.random.default_rng(42)
    sampler = sampler_for(system, rng, burn_in=100)
    pts = sampler.sample(100_000)
    E, f, A, b = frozen_polytope(system, sampler.epsilon)
    ineq_margins = A @ pts.T - b[:, None]
    assert ineq_margins.min() >= -1e-9
    eq_residual = np.abs(E @ pts.T - f[:, None]).max()
    assert eq_residual <= 1e-9


def test_segment_chain_is_uniform():
    # 1-D polytope: 0.3 <= x <= 1.7; closed-form uniform CDF
    from smaa_choquet._kernels import active_backend

    kern = active_backend()
    rng = np.random.default_rng(7)
    A = np.ascontiguousarray([[1.0], [-1.0]])
    b = np.ascontiguousarray([0.3, -1.7])
    nb = np.eye(1)
    x = np.array([1.0])
    out = np.empty((100_000, 1))
    written = 0
    fails = 0
    while written < out.shape[0]:
        normals = rng.standard_normal((65536, 1))
        uniforms = rng.random(65536)
        written, _c, fails, status = kern.chain_steps(x, nb, A, b, normals, uniforms, out, written, fails, 1e-12, 100)
        assert status in (kern.CHAIN_OK, kern.CHAIN_EXHAUSTED)
    ks = ks_statistic(out[:, 0], lambda v: np.clip((v - 0.3) / 1.4, 0, 1))
    assert ks < 0.01


def test_box_marginals_are_uniform():
    from smaa_choquet._kernels import active_backend

    kern = active_backend()
    rng = np.random.default_rng(12)
    dim = 3
    A = np.ascontiguousarray(np.vstack([np.eye(dim), -np.eye(dim)]))
    b = np.ascontiguousarray(np.concatenate([np.zeros(dim), -np.ones(dim)]))
    nb = np.eye(dim)
    x = np.full(dim, 0.5)
    total = 100_000
    out = np.empty((total + 1000, dim))
    written, fails = 0, 0
    while written < out.shape[0]:
        normals = rng.standard_normal((65536, dim))
        uniforms = rng.random(65536)
        written, _c, fails, status = kern.chain_steps(x, nb, A, b, normals, uniforms, out, written, fails, 1e-12, 100)
        assert status in (kern.CHAIN_OK, kern.CHAIN_EXHAUSTED)
    samples = out[1000:]
    for i in range(dim):
        ks = ks_statistic(samples[:, i], lambda v: np.clip(v, 0, 1))
        assert ks < 0.01


def test_two_criteria_simplex_mean_matches_rejection_oracle():
    system = compile_system([], 2)
    rng = np.random.default_rng(3)
    sampler = sampler_for(system, rng, burn_in=500)
    pts = sampler.sample(60_000)
    # the polytope projects to the unit square in (m1, m2); centroid is known
    oracle = np.random.default_rng(99).random((200_000, 2))
    oracle_mean = np.array([
        oracle[:, 0].mean(), oracle[:, 1].mean(), (1 - oracle.sum(axis=1)).mean()])
    np.testing.assert_allclose(pts.mean(axis=0), oracle_mean, atol=0.01)


def test_chain_is_seed_reproducible():
    system = scores18_system()
    a = sampler_for(system, np.random.default_rng(123), burn_in=10).sample(500)
    b = sampler_for(system, np.random.default_rng(123), burn_in=10).sample(500)
    assert a.tobytes() == b.tobytes()


def test_thinning_keeps_every_nth_point():
    system = compile_system([], 4)
    a = sampler_for(system, np.random.default_rng(5), burn_in=0, thinning=3).sample(100)
    b = sampler_for(system, np.random.default_rng(5), burn_in=0, thinning=1).sample(300)
    np.testing.assert_allclose(a, b[2::3], atol=0)


# ---------------------------------------------------------------------------
# interval evaluation sampling
# ---------------------------------------------------------------------------

def test_interval_type_validates_order():
    with pytest.raises(ValueError):
        IntervalEvaluation(lo=2.0, hi=1.0)
    assert IntervalEvaluation(lo=2.0, hi=2.0).is_point


def test_degenerate_interval_always_returns_the_point():
    lo = np.array([[7.0]])
    hi = np.array([[7.0]])
    rng = np.random.default_rng(0)
    draws = sample_eval_matrix(lo, hi, "continuous", rng, size=1000)
    assert np.all(draws == 7.0)
    draws = sample_eval_matrix(lo, hi, "integer", np.random.default_rng(1), size=1000)
    assert np.all(draws == 7.0)


def test_integer_sampling_is_uniform_over_the_support():
    lo = np.array([[14.0]])
    hi = np.array([[16.0]])
    rng = np.random.default_rng(8)
    draws = sample_eval_matrix(lo, hi, "integer", rng, size=100_000)[:, 0, 0]
    values, counts = np.unique(draws, return_counts=True)
    assert values.tolist() == [14.0, 15.0, 16.0]
    freqs = counts / draws.size
    np.testing.assert_allclose(freqs, 1 / 3, atol=0.01)


def test_continuous_sampling_mean():
    lo = np.zeros((1, 1))
    hi = np.ones((1, 1))
    rng = np.random.default_rng(21)
    draws = sample_eval_matrix(lo, hi, "continuous", rng, size=100_000)[:, 0, 0]
    assert abs(draws.mean() - 0.5) < 0.005
    assert draws.min() >= 0.0 and draws.max() <= 1.0


def test_integer_mode_rejects_empty_support():
    with pytest.raises(ValueError):
        integer_support(14.2, 14.8)
    with pytest.raises(ValueError):
        sample_eval_matrix(np.array([[14.2]]), np.array([[14.8]]), "integer", np.random.default_rng(0))


# ---------------------------------------------------------------------------
# common-scale sampling
# ---------------------------------------------------------------------------

class StubRng:
    """Deterministic replacement for a Generator: serves queued .random blocks."""

    def __init__(self, blocks):
        self.blocks = [np.asarray(b, dtype=float) for b in blocks]

    def random(self, shape=None):
        block = self.blocks.pop(0)
        assert block.shape == tuple(shape)
        return block.copy()


ACCEL_RAW = [10.9, 13.5, 11.0, 14.2, 11.4, 11.3, 14.6, 12.9, 11.8, 13.9]
ACCEL_DRAW = [0.81, 0.90, 0.12, 0.91, 0.63, 0.09, 0.27, 0.54, 0.95, 0.96]


def test_worked_scale_example_ascending_assignment():
    # frozen reference: ten distinct levels, the published draw, ascending order
    rng = StubRng([[ACCEL_DRAW]])
    column = sample_common_scale(ACCEL_RAW, rng, direction="maximize")
    assert column[10.9] == pytest.approx(0.09)
    assert column[11.0] == pytest.approx(0.12)
    assert column[13.5] == pytest.approx(0.90)
    assert column[14.6] == pytest.approx(0.96)


def test_minimize_direction_reverses_the_assignment():
    rng = StubRng([[ACCEL_DRAW]])
    column = sample_common_scale(ACCEL_RAW, rng, direction="minimize")
    # best (smallest) raw level takes the largest sampled value
    assert column[10.9] == pytest.approx(0.96)
    assert column[14.6] == pytest.approx(0.09)


def test_single_level_column_shares_one_value():
    rng = StubRng([[[0.42]]])
    column = sample_common_scale([5.0, 5.0, 5.0], rng)
    assert column == {5.0: pytest.approx(0.42)}


def test_duplicate_draws_are_redrawn():
    rng = StubRng([
        [[0.3, 0.3, 0.7]],   # duplicate -> rejected
        [[0.0, 0.5, 0.9]],   # zero -> rejected (values must be inside (0, 1))
        [[0.2, 0.5, 0.9]],
    ])
    values = sample_scale_values(3, rng, size=1)
    np.testing.assert_allclose(values[0], [0.2, 0.5, 0.9])
    assert rng.blocks == []


def test_preference_ranks_respect_direction_and_ties():
    ranks, levels = preference_ranks([3.0, 1.0, 3.0, 2.0], "maximize")
    assert levels == 3
    assert ranks.tolist() == [2, 0, 2, 1]
    ranks, _ = preference_ranks([3.0, 1.0, 3.0, 2.0], "minimize")
    assert ranks.tolist() == [0, 2, 0, 1]


def test_scale_matrix_is_strictly_increasing_in_preference_order():
    rng = np.random.default_rng(4)
    raw = np.array([[10.0, 3.0], [20.0, 3.0], [15.0, 1.0], [12.0, 9.0]])
    mats = sample_scale_matrix(raw, ["maximize", "minimize"], rng, size=200)
    for t in range(200):
        col0 = mats[t, :, 0]
        assert col0[1] > col0[2] > col0[3] > col0[0]  # 20 > 15 > 12 > 10
        col1 = mats[t, :, 1]
        assert col1[2] > col1[0] == col1[1] > col1[3]  # 1 best, 3 shared, 9 worst
        assert mats[t].min() > 0 and mats[t].max() < 1


def test_common_scale_apply_maps_levels():
    scale = CommonScale(columns=({1.0: 0.2, 2.0: 0.8}, {5.0: 0.5},))
    raw = np.array([[1.0, 5.0], [2.0, 5.0]])
    np.testing.assert_allclose(scale.apply(raw), [[0.2, 0.5], [0.8, 0.5]])
