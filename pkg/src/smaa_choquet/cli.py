"""Command-line interface.

Exit codes: 0 success/compatible, 1 incompatible or no feasible iteration,
2 unreadable problem file or bad arguments.
"""
from __future__ import annotations

import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from .preference import check_compatibility, compile_system
from .problem import ProblemFormatError, ProblemFile, load_problem_file
from .scaling import fixed_scale_rerun, most_discriminant_scale
from .smaa import IncompatibleProblemError, NoFeasibleIterationError, RunConfig, run
from .bundle import write_bundle

_CONFIG_KEYS = {
    "iterations", "seed", "burn_in", "thinning", "workers", "eval_sampling",
    "case", "epsilon_min", "epsilon_freeze", "per_iteration_chain_steps",
    "confidence_iterations", "additivity",
}


def _load(path: str) -> ProblemFile:
    try:
        return load_problem_file(path)
    except FileNotFoundError:
        click.echo(f"error: no such file: {path}", err=True)
        sys.exit(2)
    except ProblemFormatError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)


def _config_from(pf: ProblemFile, **overrides) -> RunConfig:
    merged = {}
    for key, value in pf.config_overrides.items():
        if key not in _CONFIG_KEYS:
            click.echo(f"error: unknown config key {key!r} in problem file", err=True)
            sys.exit(2)
        merged[key] = value
    merged.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return RunConfig(**merged)
    except (TypeError, ValueError) as exc:
        click.echo(f"error: bad configuration: {exc}", err=True)
        sys.exit(2)


@click.group()
@click.version_option(version=__version__, prog_name="smaa-choquet")
def main():
    """Rank alternatives under every capacity compatible with the stated
    preferences, via constraint compilation, polytope sampling and Monte
    Carlo acceptability indices."""


@main.command()
@click.argument("problem_path", metavar="PROBLEM")
@click.option("--epsilon-min", type=float, default=None, help="Compatibility threshold on epsilon*.")
def check(problem_path, epsilon_min):
    """Compile PROBLEM and report whether a compatible model exists."""
    pf = _load(problem_path)
    config = _config_from(pf, epsilon_min=epsilon_min)
    problem = pf.problem
    evals = None if problem.is_interval else problem.point_matrix()
    if problem.scale_kind == "heterogeneous":
        # scale-independent part only: alternative statements depend on the scale
        statements = [s for s in pf.statements if not s.references_alternatives]
        skipped = len(pf.statements) - len(statements)
        if skipped:
            click.echo(f"note: {skipped} alternative statement(s) depend on the sampled scale; "
                       f"checking the scale-independent block")
        evals = None
    elif problem.is_interval:
        statements = [s for s in pf.statements if not s.references_alternatives]
        skipped = len(pf.statements) - len(statements)
        if skipped:
            click.echo(f"note: {skipped} alternative statement(s) depend on sampled evaluations; "
                       f"checking the evaluation-independent block")
    else:
        statements = pf.statements
    system = compile_system(statements, problem.n, evals=evals,
                            additivity=config.additivity, labels=problem.criterion_labels)
    res = check_compatibility(system, config.epsilon_min)
    for s in statements:
        click.echo(f"statement: {s.text}")
    if res.status == "infeasible":
        click.echo("verdict: infeasible")
        if res.suspect_rows:
            click.echo("suspect rows: " + "; ".join(res.suspect_rows))
        sys.exit(1)
    click.echo(f"epsilon* = {res.epsilon_star:.4f}")
    if res.compatible:
        click.echo("verdict: compatible")
    else:
        click.echo("verdict: incompatible")
        sys.exit(1)


def _run_and_write(pf: ProblemFile, config: RunConfig, out: str | None):
    try:
        results = run(pf.problem, pf.statements, config)
    except (IncompatibleProblemError,) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    except NoFeasibleIterationError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    if out:
        write_bundle(out, results, pf)
        click.echo(f"bundle written to {out}")
    return results


@main.command()
@click.argument("problem_path", metavar="PROBLEM")
@click.option("--iterations", type=int, default=None, help="Monte Carlo iterations.")
@click.option("--seed", type=int, default=None, help="Master seed (64-bit).")
@click.option("--burn-in", type=int, default=None, help="Discarded leading chain steps.")
@click.option("--thin", "thinning", type=int, default=None, help="Keep every n-th chain step.")
@click.option("--workers", type=int, default=None, help="Worker count (default: SMAA_CHOQUET_WORKERS or 1).")
@click.option("--eval-sampling", type=click.Choice(["continuous", "integer"]), default=None,
              help="Interval sampling mode.")
@click.option("--scale-mode", type=click.Choice(["given", "search"]), default="given",
              help="Heterogeneous problems: sample scales per iteration (given) or fix the most "
                   "discriminant scale first (search).")
@click.option("--candidates", type=int, default=None, help="Candidate scales for --scale-mode search.")
@click.option("--epsilon-min", type=float, default=None, help="Compatibility threshold on epsilon*.")
@click.option("--out", type=click.Path(), default=None, help="Bundle output directory.")
def rank(problem_path, scale_mode, candidates, out, **overrides):
    """Run the Monte Carlo analysis of PROBLEM and print the key tables."""
    pf = _load(problem_path)
    config = _config_from(pf, **overrides)
    if pf.problem.scale_kind == "heterogeneous" and scale_mode == "search":
        search = most_discriminant_scale(
            pf.problem, pf.statements,
            num_candidates=candidates or 1000,
            seed=config.seed, epsilon_min=config.epsilon_min,
            workers=config.resolved_workers(), additivity=config.additivity,
        )
        if search.all_infeasible:
            click.echo("error: every candidate scale was infeasible", err=True)
            sys.exit(1)
        click.echo(f"most discriminant scale: candidate {search.winner_index} "
                   f"(epsilon* = {search.winner_epsilon:.4f}, "
                   f"{search.infeasible_count} infeasible candidates)")
        try:
            results = fixed_scale_rerun(pf.problem, search.winner_matrix, pf.statements, config)
        except IncompatibleProblemError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)
        if out:
            write_bundle(out, results, pf)
            click.echo(f"bundle written to {out}")
    else:
        results = _run_and_write(pf, config, out)
    _print_summary(results)


def _print_summary(results):
    labels = results.alternative_labels
    b = results.b
    click.echo(f"iterations: {results.iterations_feasible} counted / {results.iterations_total} total")
    click.echo("rank acceptability (percent):")
    header = "alt".ljust(8) + "".join(f"r{r+1}".rjust(8) for r in range(results.l))
    click.echo(header)
    for k, label in enumerate(labels):
        click.echo(label.ljust(8) + "".join(f"{v:8.2f}" for v in b[k]))
    order = np.argsort(-b[:, 0], kind="stable")
    top = ", ".join(f"{labels[k]} ({b[k, 0]:.2f}%)" for k in order[:3])
    click.echo(f"most frequent first ranks: {top}")


@main.command()
@click.argument("problem_path", metavar="PROBLEM")
@click.option("--candidates", "-k", type=int, default=1000, show_default=True,
              help="Number of candidate scales.")
@click.option("--seed", type=int, default=None, help="Master seed.")
@click.option("--workers", type=int, default=None, help="Worker count.")
@click.option("--epsilon-min", type=float, default=None)
@click.option("--out", type=click.Path(), default=None, help="Write the winner scale matrix (JSON).")
@click.option("--rank", "chain_rank", is_flag=True, help="Run the analysis on the winner scale.")
@click.option("--iterations", type=int, default=None, help="Iterations for --rank.")
def scale(problem_path, candidates, out, chain_rank, **overrides):
    """Search the most discriminant common scale for a heterogeneous PROBLEM."""
    pf = _load(problem_path)
    iterations = overrides.pop("iterations", None)
    config = _config_from(pf, iterations=iterations, **overrides)
    if pf.problem.scale_kind != "heterogeneous":
        click.echo("error: scale search needs a heterogeneous problem", err=True)
        sys.exit(2)
    search = most_discriminant_scale(
        pf.problem, pf.statements, num_candidates=candidates,
        seed=config.seed, epsilon_min=config.epsilon_min,
        workers=config.resolved_workers(), additivity=config.additivity,
    )
    if search.all_infeasible:
        click.echo("error: every candidate scale was infeasible", err=True)
        sys.exit(1)
    has_alt = any(s.references_alternatives for s in pf.statements)
    if not has_alt:
        click.echo("note: no alternative statements; epsilon* is scale-independent "
                   "and candidate 0 wins by construction")
    click.echo(f"winner: candidate {search.winner_index} of {candidates}")
    click.echo(f"epsilon* = {search.winner_epsilon:.4f}")
    click.echo(f"infeasible candidates: {search.infeasible_count}")
    if out:
        from .problem import canonical_json
        doc = {
            "criteria": [{"label": c.label, "direction": c.direction} for c in pf.problem.criteria],
            "scales": "common",
            "alternatives": [
                {"label": a.label, "evaluations": [float(v) for v in search.winner_matrix[k]]}
                for k, a in enumerate(pf.problem.alternatives)
            ],
            "preferences": list(pf.statement_texts),
        }
        Path(out).write_text(canonical_json(doc) + "\n", encoding="utf-8")
        click.echo(f"winner scale written to {out}")
    if chain_rank:
        results = fixed_scale_rerun(pf.problem, search.winner_matrix, pf.statements, config)
        _print_summary(results)


@main.command()
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--bind", default="127.0.0.1", show_default=True)
@click.option("--persist", type=click.Path(), default=None, help="Directory for session persistence.")
@click.option("--ui", type=click.Path(), default=None, help="Static directory with the web console build.")
def serve(port, bind, persist, ui):
    """Start the HTTP session service (and optionally serve the web console)."""
    import uvicorn

    from .service import create_app

    app = create_app(persist_dir=persist, ui_dir=ui)
    uvicorn.run(app, host=bind, port=port, log_level="info")


if __name__ == "__main__":
    main()
