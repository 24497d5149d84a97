"""Monte Carlo engine and acceptability indices.

For every stored compatible capacity (and, depending on the case, sampled
evaluation matrix or common scale) the Choquet values of all alternatives
induce a ranking; accumulated over iterations these give the rank
acceptability matrix, pairwise preference frequencies, central capacities,
the barycenter and the derived approximations (necessary/possible preference,
extreme rank intervals).

Three sampling regimes:

``common-scale``      point evaluations; one constraint system, one chain.
``interval``          evaluations drawn per iteration inside intervals; with
                      alternative statements a feasibility LP runs per
                      iteration and only feasible iterations are counted.
``hetero-scale``      a common scale is drawn per iteration; otherwise the
                      same two sub-regimes as ``interval``.

Seeding contract: worker ``w`` derives all of its streams from
``seed + w`` (chain channel 0, evaluation channel 1); confidence reruns for
alternative ``k`` use ``SeedSequence([seed, 2, k])``.  Generators are numpy
PCG64.  Per-worker tallies are plain sums, so merged results depend only on
the worker count, never on scheduling.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import __version__
from ._kernels import active_backend, backend_name
from .capacity import MobiusCapacity, choquet_features, validate
from .linprog import LpProblem, solve
from .preference import (
    DEFAULT_EPSILON_MIN,
    REL_EQ,
    LinearConstraintSystem,
    PreferenceStatement,
    StatementKind,
    check_compatibility,
    compile_system,
)
from .problem import SCALE_COMMON, SCALE_HETEROGENEOUS, Problem
from .sampling import (
    IncompatibleSystemError,
    PolytopeSampler,
    chebyshev_center,
    epsilon_freeze_value,
    null_space_basis,
    sample_eval_matrix,
    sample_scale_matrix,
    seed_point,
)

CASE_COMMON = "common-scale"
CASE_INTERVAL = "interval"
CASE_HETERO = "hetero-scale"

CHANNEL_CHAIN = 0
CHANNEL_EVAL = 1
CHANNEL_CONFIDENCE = 2

_BLOCK = 2048
_ENV_WORKERS = "SMAA_CHOQUET_WORKERS"


class IncompatibleProblemError(RuntimeError):
    """The fixed constraint system admits no compatible capacity."""


class NoFeasibleIterationError(RuntimeError):
    """Every sampled evaluation matrix / scale made the constraints infeasible."""


@dataclass
class RunConfig:
    """Settings of one Monte Carlo run.

    ``case="auto"`` selects the regime from the problem shape.  The sampling
    distributions over evaluations and capacities are uniform; no other
    choice is supported.  ``epsilon_freeze=None`` freezes strict rows at
    min(epsilon*/2, 10 * epsilon_min) during sampling.
    """

    iterations: int = 100_000
    seed: int = 0
    burn_in: int = 1000
    thinning: int = 1
    workers: int = 0  # 0: use SMAA_CHOQUET_WORKERS or 1
    eval_sampling: str = "continuous"  # or "integer"
    case: str = "auto"
    epsilon_min: float = DEFAULT_EPSILON_MIN
    epsilon_freeze: Optional[float] = None
    per_iteration_chain_steps: int = 80
    confidence_iterations: Optional[int] = None
    additivity: int = 2
    distribution: str = "uniform"

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.eval_sampling not in ("continuous", "integer"):
            raise ValueError("eval_sampling must be 'continuous' or 'integer'")
        if self.case not in ("auto", CASE_COMMON, CASE_INTERVAL, CASE_HETERO):
            raise ValueError(f"unknown case {self.case!r}")
        if self.distribution != "uniform":
            raise ValueError("only uniform sampling distributions are supported")
        if self.additivity not in (1, 2):
            raise ValueError("additivity must be 1 or 2")
        if self.per_iteration_chain_steps < 1:
            raise ValueError("per_iteration_chain_steps must be >= 1")

    def resolved_case(self, problem: Problem) -> str:
        if self.case != "auto":
            case = self.case
        elif problem.scale_kind == SCALE_HETEROGENEOUS:
            case = CASE_HETERO
        elif problem.is_interval:
            case = CASE_INTERVAL
        else:
            case = CASE_COMMON
        if case == CASE_COMMON and problem.is_interval:
            raise ValueError("common-scale runs need point evaluations")
        if case == CASE_HETERO and problem.scale_kind != SCALE_HETEROGENEOUS:
            raise ValueError("hetero-scale runs need a heterogeneous problem")
        if case in (CASE_COMMON, CASE_INTERVAL) and problem.scale_kind != SCALE_COMMON:
            raise ValueError(f"{case} runs need evaluations on a common scale")
        return case

    def resolved_workers(self) -> int:
        w = self.workers
        if w == 0:
            w = int(os.environ.get(_ENV_WORKERS, "1") or "1")
        return max(1, w)


# ---------------------------------------------------------------------------
# tallies
# ---------------------------------------------------------------------------

@dataclass
class _Tallies:
    rank_counts: np.ndarray
    strict_counts: np.ndarray
    indiff_counts: np.ndarray
    first_sum: np.ndarray
    first_count: np.ndarray
    bary_sum: np.ndarray
    total: int = 0
    feasible: int = 0

    @classmethod
    def empty(cls, l: int, dm: int) -> "_Tallies":
        return cls(
            rank_counts=np.zeros((l, l), dtype=np.int64),
            strict_counts=np.zeros((l, l), dtype=np.int64),
            indiff_counts=np.zeros((l, l), dtype=np.int64),
            first_sum=np.zeros((l, dm)),
            first_count=np.zeros(l, dtype=np.int64),
            bary_sum=np.zeros(dm),
        )

    def merge(self, other: "_Tallies"):
        self.rank_counts += other.rank_counts
        self.strict_counts += other.strict_counts
        self.indiff_counts += other.indiff_counts
        self.first_sum += other.first_sum
        self.first_count += other.first_count
        self.bary_sum += other.bary_sum
        self.total += other.total
        self.feasible += other.feasible

    def record_block(self, values: np.ndarray, mobius: np.ndarray):
        """Feed one block into the tally kernel; counters are updated by callers."""
        kern = active_backend()
        kern.tally_block(
            np.ascontiguousarray(values), np.ascontiguousarray(mobius),
            self.rank_counts, self.strict_counts, self.indiff_counts,
            self.first_sum, self.first_count, self.bary_sum,
        )


# ---------------------------------------------------------------------------
# rank helpers and derived relations
# ---------------------------------------------------------------------------

def rank_of(values: Sequence[float], k: int) -> int:
    """1 plus the number of strictly larger values; ties share the best rank."""
    values = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(values)):
        raise ValueError("rank function needs finite values")
    return 1 + int(np.sum(values > values[k]))

def rank_vector(values: Sequence[float]) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(values)):
        raise ValueError("rank function needs finite values")
    return 1 + (values[:, None] > values[None, :]).sum(axis=0)


@dataclass(frozen=True)
class NarorApproximation:
    """SMAA frequency approximation of the necessary/possible relations.

    One-directional only: a 100% preference-or-indifference frequency is
    implied by (but does not imply) necessary preference, and a positive
    strict frequency implies possible preference while a zero frequency does
    not refute it.
    """

    necessary: np.ndarray  # bool (l, l)
    possible: np.ndarray   # bool (l, l)


def naror_approx(pref_strict: np.ndarray, pref_indiff: np.ndarray, tol: float = 1e-9) -> NarorApproximation:
    strict = np.asarray(pref_strict, dtype=float)
    indiff = np.asarray(pref_indiff, dtype=float)
    necessary = (strict + indiff) >= 100.0 - tol
    possible = strict > 0.0
    return NarorApproximation(necessary=necessary, possible=possible)


def extreme_ranks(b: np.ndarray) -> np.ndarray:
    """Approximate [best, worst] attained rank per alternative (1-based).

    Reads the rank acceptability matrix: ranks with positive share.  Like the
    frequency relations this is sample-based, hence an approximation of the
    exact extreme-ranking analysis.
    """
    b = np.asarray(b, dtype=float)
    l = b.shape[0]
    out = np.zeros((l, 2), dtype=int)
    for k in range(l):
        hit = np.nonzero(b[k] > 0.0)[0]
        if hit.size == 0:
            raise ValueError(f"alternative {k} has an all-zero acceptability row")
        out[k] = (hit[0] + 1, hit[-1] + 1)
    return out


# ---------------------------------------------------------------------------
# results
# ---------------------------------------------------------------------------

@dataclass
class SmaaResults:
    """Accumulated Monte Carlo outputs plus reproducibility metadata.

    Percent matrices are exact ratios of integer tallies over the counted
    (feasible) iterations; ``central[k]`` is present iff alternative k ranked
    first at least once.
    """

    alternative_labels: list[str]
    criterion_labels: list[str]
    additivity: int
    rank_counts: np.ndarray
    strict_counts: np.ndarray
    indiff_counts: np.ndarray
    first_sum: np.ndarray
    first_count: np.ndarray
    bary_sum: np.ndarray
    iterations_total: int
    iterations_feasible: int
    confidence: list[Optional[float]] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    @property
    def l(self) -> int:
        return len(self.alternative_labels)

    @property
    def n(self) -> int:
        return len(self.criterion_labels)

    @property
    def b(self) -> np.ndarray:
        """Rank acceptability matrix in percent; rows sum to 100."""
        return self.rank_counts * 100.0 / self.iterations_feasible

    @property
    def pref_strict(self) -> np.ndarray:
        return self.strict_counts * 100.0 / self.iterations_feasible

    @property
    def pref_indiff(self) -> np.ndarray:
        out = self.indiff_counts * 100.0 / self.iterations_feasible
        np.fill_diagonal(out, 100.0)
        return out

    def central(self, k: int) -> Optional[np.ndarray]:
        """Mean sampled capacity over iterations where k ranked first."""
        if self.first_count[k] == 0:
            return None
        return self.first_sum[k] / self.first_count[k]

    def central_capacity(self, k: int) -> Optional[MobiusCapacity]:
        vec = self.central(k)
        if vec is None:
            return None
        return MobiusCapacity.from_coefficients(self.n, vec, self.additivity)

    @property
    def barycenter(self) -> np.ndarray:
        """Componentwise mean of every stored capacity."""
        if self.iterations_feasible < 1:
            raise ValueError("no stored capacities")
        return self.bary_sum / self.iterations_feasible

    def barycenter_capacity(self) -> MobiusCapacity:
        return MobiusCapacity.from_coefficients(self.n, self.barycenter, self.additivity)

    def extreme_ranks(self) -> np.ndarray:
        return extreme_ranks(self.rank_counts.astype(float))

    def naror(self) -> NarorApproximation:
        return naror_approx(self.pref_strict, self.pref_indiff)

    def to_json_dict(self) -> dict:
        ext = self.extreme_ranks()
        nr = self.naror()
        return {
            "alternatives": list(self.alternative_labels),
            "criteria": list(self.criterion_labels),
            "additivity": self.additivity,
            "iterations_total": int(self.iterations_total),
            "iterations_feasible": int(self.iterations_feasible),
            "rank_acceptability": self.b.tolist(),
            "rank_counts": self.rank_counts.tolist(),
            "preference_strict": self.pref_strict.tolist(),
            "preference_indifferent": self.pref_indiff.tolist(),
            "central_capacities": [
                None if self.central(k) is None else self.central(k).tolist()
                for k in range(self.l)
            ],
            "first_rank_counts": self.first_count.tolist(),
            "barycenter": self.barycenter.tolist(),
            "confidence_factor": [None if c is None else float(c) for c in self.confidence],
            "extreme_ranks": ext.tolist(),
            "necessary_approx": nr.necessary.tolist(),
            "possible_approx": nr.possible.tolist(),
            "metadata": self.metadata,
        }


# ---------------------------------------------------------------------------
# worker payload runners
# ---------------------------------------------------------------------------

def _chain_rng(seed: int, worker: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed + worker, CHANNEL_CHAIN])))


def _eval_rng(seed: int, worker: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed + worker, CHANNEL_EVAL])))


def _confidence_rng(seed: int, k: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, CHANNEL_CONFIDENCE, k])))


def _draw_matrices(payload: dict, rng: np.random.Generator, size: int) -> np.ndarray:
    if payload["case"] == CASE_HETERO:
        return sample_scale_matrix(payload["raw"], payload["directions"], rng, size=size)
    return sample_eval_matrix(payload["lo"], payload["hi"], payload["eval_sampling"], rng, size=size)


def _run_chain_worker(payload: dict) -> _Tallies:
    """Single fixed polytope: one Hit-and-Run chain, vectorized evaluation."""
    system: LinearConstraintSystem = payload["system"]
    iterations = payload["iterations"]
    l, dm = payload["l"], system.num_mobius
    tallies = _Tallies.empty(l, dm)
    rng = _chain_rng(payload["seed"], payload["worker"])
    sampler = PolytopeSampler(
        system=system,
        epsilon=payload["epsilon_freeze"],
        start=payload["start"],
        rng=rng,
        burn_in=payload["burn_in"],
        thinning=payload["thinning"],
    )
    fixed_features = payload.get("features")
    eval_rng = None if fixed_features is not None else _eval_rng(payload["seed"], payload["worker"])
    done = 0
    while done < iterations:
        block = min(_BLOCK, iterations - done)
        mob = sampler.sample(block)
        if fixed_features is not None:
            values = mob @ fixed_features.T
        else:
            mats = _draw_matrices(payload, eval_rng, block)
            feats = choquet_features(mats, payload["n"], payload["additivity"])
            values = np.matmul(feats, mob[:, :, None])[:, :, 0]
        tallies.record_block(values, mob)
        tallies.total += block
        tallies.feasible += block
        done += block
    return tallies


def _run_per_iteration_worker(payload: dict) -> _Tallies:
    """Per-iteration matrix/scale draw, feasibility LP and capacity sample."""
    fixed: LinearConstraintSystem = payload["system"]
    alt_statements: list[PreferenceStatement] = payload["alt_statements"]
    iterations = payload["iterations"]
    n, additivity, l = payload["n"], payload["additivity"], payload["l"]
    dm = fixed.num_mobius
    dim = fixed.dim
    epsilon_min = payload["epsilon_min"]
    epsilon_freeze = payload["epsilon_freeze"]
    steps = payload["chain_steps"]
    kern = active_backend()

    tallies = _Tallies.empty(l, dm)
    chain_rng = _chain_rng(payload["seed"], payload["worker"])
    eval_rng = _eval_rng(payload["seed"], payload["worker"])

    n_alt = len(alt_statements)
    matrix = np.vstack([fixed.matrix, np.zeros((n_alt, dim))])
    relations = list(fixed.relations)
    tags = list(fixed.tags)
    rhs = np.concatenate([fixed.rhs, np.zeros(n_alt)])
    terms: list[list[tuple[int, float]]] = []
    for s in alt_statements:
        if s.kind in (StatementKind.ALT_WEAK, StatementKind.ALT_STRICT, StatementKind.ALT_INDIFFERENT):
            a, b = s.alternatives
            terms.append([(a, 1.0), (b, -1.0)])
            relations.append(REL_EQ if s.kind is StatementKind.ALT_INDIFFERENT else ">=")
        else:
            a, b, s2, t2 = s.alternatives
            terms.append([(a, 1.0), (b, -1.0), (s2, -1.0), (t2, 1.0)])
            relations.append(REL_EQ if s.kind is StatementKind.INTENSITY_EQUAL else ">=")
        matrix[fixed.num_rows + len(terms) - 1, -1] = -1.0 if s.is_strict else 0.0
        tags.append(("A:" + s.text))

    eq_mask = np.array([rel == REL_EQ for rel in relations])
    ge_mask = ~eq_mask
    strict_shift = -matrix[:, -1]  # 1.0 on strict rows
    alt_rows_have_eq = any(relations[fixed.num_rows + j] == REL_EQ for j in range(n_alt))
    nb = None
    if not alt_rows_have_eq:
        nb = np.ascontiguousarray(null_space_basis(matrix[eq_mask][:, :dm]))

    objective = np.zeros(dim)
    objective[-1] = 1.0
    bounds: list[tuple[Optional[float], Optional[float]]] = [(None, None)] * dm + [(0.0, 1.0)]
    lp = LpProblem(c=objective, A=matrix, relations=relations, b=rhs, bounds=bounds, row_tags=tags)

    # chain starts need an interior point: Chebyshev-center LP on the frozen rows
    n_ineq = int(ge_mask.sum())
    n_eq = int(eq_mask.sum())
    cheb_A = np.zeros((n_ineq + n_eq, dm + 1))
    cheb_b = np.zeros(n_ineq + n_eq)
    cheb_rels = [">="] * n_ineq + [REL_EQ] * n_eq
    cheb_c = np.zeros(dm + 1)
    cheb_c[-1] = 1.0
    cheb_bounds: list[tuple[Optional[float], Optional[float]]] = [(None, None)] * dm + [(0.0, 10.0)]
    cheb = LpProblem(c=cheb_c, A=cheb_A, relations=cheb_rels, b=cheb_b, bounds=cheb_bounds)

    buf_values = np.empty((1024, l))
    buf_mob = np.empty((1024, dm))
    buffered = 0
    chain_out = np.empty((steps, dm))

    eval_buffer: Optional[np.ndarray] = None
    eval_used = 0

    for _ in range(iterations):
        if eval_buffer is None or eval_used >= eval_buffer.shape[0]:
            eval_buffer = _draw_matrices(payload, eval_rng, 256)
            eval_used = 0
        mats = eval_buffer[eval_used]
        eval_used += 1
        feats = choquet_features(mats, n, additivity)
        for j, t in enumerate(terms):
            row = matrix[fixed.num_rows + j]
            row[:dm] = 0.0
            for alt, sign in t:
                row[:dm] += sign * feats[alt]
        tallies.total += 1
        sol = solve(lp)
        if sol.status != "optimal" or sol.value <= epsilon_min:
            continue
        eps_star = float(sol.value)
        eps_f = epsilon_freeze if epsilon_freeze is not None else epsilon_freeze_value(eps_star, epsilon_min)
        basis = nb if nb is not None else null_space_basis(matrix[eq_mask][:, :dm])
        A_ineq = np.ascontiguousarray(matrix[ge_mask][:, :dm])
        b_ineq = np.ascontiguousarray(rhs[ge_mask] + strict_shift[ge_mask] * eps_f)
        cheb.A[:n_ineq, :dm] = A_ineq
        cheb.A[:n_ineq, dm] = -np.linalg.norm(A_ineq, axis=1)
        cheb.b[:n_ineq] = b_ineq
        if n_eq:
            cheb.A[n_ineq:, :dm] = matrix[eq_mask][:, :dm]
            cheb.b[n_ineq:] = rhs[eq_mask]
        csol = solve(cheb)
        if csol.status != "optimal" or csol.value <= 1e-12:
            # compatible but with an empty interior: nothing to sample
            continue
        point = np.ascontiguousarray(csol.x[:dm])
        written = 0
        fails = 0
        while written < steps:
            need = steps - written + 8
            normals = chain_rng.standard_normal((need, basis.shape[0]))
            uniforms = chain_rng.random(need)
            written, _cons, fails, status = kern.chain_steps(
                point, basis, A_ineq, b_ineq, normals, uniforms, chain_out, written, fails,
                1e-12, 100,
            )
            if status == kern.CHAIN_STUCK:
                raise RuntimeError("per-iteration chain stuck: empty chords at the LP vertex")
            if status == kern.CHAIN_UNBOUNDED:
                raise RuntimeError("per-iteration chain found an unbounded chord")
        mob = chain_out[steps - 1]
        buf_values[buffered] = feats @ mob
        buf_mob[buffered] = mob
        buffered += 1
        tallies.feasible += 1
        if buffered == buf_values.shape[0]:
            tallies.record_block(buf_values, buf_mob)
            buffered = 0
    if buffered:
        tallies.record_block(buf_values[:buffered], buf_mob[:buffered])
    return tallies


def _worker_entry(payload: dict) -> _Tallies:
    if payload["kind"] == "chain":
        return _run_chain_worker(payload)
    return _run_per_iteration_worker(payload)


# ---------------------------------------------------------------------------
# orchestration
# ---------------------------------------------------------------------------

def _split_iterations(total: int, workers: int) -> list[int]:
    base, extra = divmod(total, workers)
    return [base + (1 if w < extra else 0) for w in range(workers)]


def _confidence_case_common(results: SmaaResults, features: np.ndarray) -> list[Optional[float]]:
    out: list[Optional[float]] = []
    for k in range(results.l):
        central = results.central(k)
        if central is None:
            out.append(None)
            continue
        values = features @ central
        out.append(100.0 if rank_of(values, k) == 1 else 0.0)
    return out


def _confidence_uncertain(results, payload_proto: dict, config: RunConfig) -> list[Optional[float]]:
    iterations = config.confidence_iterations or config.iterations
    out: list[Optional[float]] = []
    for k in range(results.l):
        central = results.central(k)
        if central is None:
            out.append(None)
            continue
        rng = _confidence_rng(config.seed, k)
        wins = 0
        done = 0
        while done < iterations:
            block = min(_BLOCK, iterations - done)
            mats = _draw_matrices(payload_proto, rng, block)
            feats = choquet_features(mats, payload_proto["n"], payload_proto["additivity"])
            values = feats @ central
            own = values[:, k][:, None]
            wins += int((values <= own).all(axis=1).sum())
            done += block
        out.append(100.0 * wins / iterations)
    return out


def run(problem: Problem, statements: Sequence[PreferenceStatement], config: RunConfig) -> SmaaResults:
    """Execute the Monte Carlo analysis for a problem and statement list."""
    case = config.resolved_case(problem)
    workers = min(config.resolved_workers(), config.iterations)
    n, l = problem.n, problem.l
    statements = list(statements)
    alt_statements = [s for s in statements if s.references_alternatives]
    criterion_statements = [s for s in statements if not s.references_alternatives]

    per_iteration = bool(alt_statements) and case in (CASE_INTERVAL, CASE_HETERO)

    payload: dict = {
        "case": case,
        "n": n,
        "l": l,
        "additivity": config.additivity,
        "seed": config.seed,
        "burn_in": config.burn_in,
        "thinning": config.thinning,
        "eval_sampling": config.eval_sampling,
        "epsilon_min": config.epsilon_min,
        "chain_steps": config.per_iteration_chain_steps,
    }
    if case == CASE_HETERO:
        payload["raw"] = problem.point_matrix()
        payload["directions"] = problem.directions
    else:
        payload["lo"] = problem.lo
        payload["hi"] = problem.hi
        if config.eval_sampling == "integer" and case == CASE_INTERVAL:
            # fail fast on impossible integer cells
            sample_eval_matrix(problem.lo, problem.hi, "integer", np.random.default_rng(0))

    features = None
    epsilon_star: Optional[float] = None
    if per_iteration:
        fixed = compile_system(criterion_statements, n, additivity=config.additivity,
                               labels=problem.criterion_labels)
        payload.update(kind="per-iteration", system=fixed, alt_statements=alt_statements,
                       epsilon_freeze=config.epsilon_freeze)
        base_check = check_compatibility(fixed, config.epsilon_min)
        if not base_check.compatible:
            raise IncompatibleProblemError(
                f"criterion statements alone are incompatible (epsilon*={base_check.epsilon_star})"
            )
    else:
        if case == CASE_COMMON:
            evals = problem.point_matrix()
            features = choquet_features(evals, n, config.additivity)
            system = compile_system(statements, n, evals=evals, additivity=config.additivity,
                                    labels=problem.criterion_labels)
        else:
            if alt_statements:
                raise ValueError("alternative statements with uncertain evaluations use the per-iteration path")
            system = compile_system(statements, n, additivity=config.additivity,
                                    labels=problem.criterion_labels)
        try:
            _, epsilon_star = seed_point(system, config.epsilon_min)
        except IncompatibleSystemError as exc:
            raise IncompatibleProblemError(str(exc)) from exc
        eps_freeze = (config.epsilon_freeze if config.epsilon_freeze is not None
                      else epsilon_freeze_value(epsilon_star, config.epsilon_min))
        start, _radius = chebyshev_center(system, eps_freeze)
        payload.update(kind="chain", system=system, start=start,
                       epsilon_freeze=eps_freeze, features=features)

    shares = _split_iterations(config.iterations, workers)
    payloads = []
    for w, share in enumerate(shares):
        p = dict(payload)
        p["worker"] = w
        p["iterations"] = share
        payloads.append(p)

    if workers == 1:
        partials = [_worker_entry(payloads[0])]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(_worker_entry, payloads))

    dm = payload["system"].num_mobius
    tallies = _Tallies.empty(l, dm)
    for part in partials:
        tallies.merge(part)

    if tallies.feasible == 0:
        raise NoFeasibleIterationError(
            "no sampled evaluation matrix or scale admitted a compatible capacity"
        )

    metadata = {
        "config": asdict(config),
        "case": case,
        "workers": workers,
        "worker_iterations": shares,
        "rng": "numpy PCG64 via SeedSequence([seed + worker, channel])",
        "kernel_backend": backend_name(),
        "numpy_version": np.__version__,
        "package_version": __version__,
        "epsilon_star": epsilon_star,
        "epsilon_freeze": payload.get("epsilon_freeze"),
        "statements": [s.text for s in statements],
    }
    results = SmaaResults(
        alternative_labels=problem.alternative_labels,
        criterion_labels=problem.criterion_labels,
        additivity=config.additivity,
        rank_counts=tallies.rank_counts,
        strict_counts=tallies.strict_counts,
        indiff_counts=tallies.indiff_counts,
        first_sum=tallies.first_sum,
        first_count=tallies.first_count,
        bary_sum=tallies.bary_sum,
        iterations_total=tallies.total,
        iterations_feasible=tallies.feasible,
        metadata=metadata,
    )

    if case == CASE_COMMON:
        results.confidence = _confidence_case_common(results, features)
    elif not problem.is_interval and case == CASE_INTERVAL:
        # degenerate intervals: evaluation uncertainty collapses to a point
        features_point = choquet_features(problem.point_matrix(), n, config.additivity)
        results.confidence = _confidence_case_common(results, features_point)
    else:
        results.confidence = _confidence_uncertain(results, payload, config)
    return results


def barycenter_ranking(results: SmaaResults, evals: np.ndarray) -> list[int]:
    """Alternative indices ordered by Choquet value under the barycenter."""
    feats = choquet_features(np.asarray(evals, dtype=float), results.n, results.additivity)
    values = feats @ results.barycenter
    return sorted(range(results.l), key=lambda k: (-values[k], k))


def validate_barycenter(results: SmaaResults) -> list:
    """The barycenter of a convex polytope must itself be a valid capacity."""
    return validate(results.barycenter_capacity())
