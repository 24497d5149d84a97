"""Result bundles: canonical JSON plus CSV tables.

A bundle directory holds ``results.json`` (the full index set, run metadata
and an embedded copy of the problem, so the run can be reproduced from the
bundle alone) and CSV exports shaped like the usual reporting tables:
alternatives as rows, ranks or alternatives as columns, percents with two
decimals and Mobius coefficients with four.
"""
from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Optional

from .problem import ProblemFile, canonical_json
from .smaa import SmaaResults

PERCENT_FMT = "{:.2f}"
MOBIUS_FMT = "{:.4f}"


def results_json_text(results: SmaaResults, problem_file: Optional[ProblemFile] = None) -> str:
    doc = results.to_json_dict()
    if problem_file is not None:
        doc["problem"] = problem_file.to_dict()
    return canonical_json(doc) + "\n"


def _csv_text(header: list[str], rows: list[list[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def rank_acceptability_csv(results: SmaaResults) -> str:
    header = ["alternative"] + [f"rank{r}" for r in range(1, results.l + 1)]
    rows = [
        [label] + [PERCENT_FMT.format(v) for v in results.b[k]]
        for k, label in enumerate(results.alternative_labels)
    ]
    return _csv_text(header, rows)


def preference_csv(results: SmaaResults, which: str = "strict") -> str:
    matrix = results.pref_strict if which == "strict" else results.pref_indiff
    header = ["alternative"] + list(results.alternative_labels)
    rows = [
        [label] + [PERCENT_FMT.format(v) for v in matrix[k]]
        for k, label in enumerate(results.alternative_labels)
    ]
    return _csv_text(header, rows)


def _mobius_header(results: SmaaResults) -> list[str]:
    names = [f"m({c})" for c in results.criterion_labels]
    if results.additivity == 2:
        labels = results.criterion_labels
        names += [
            f"m({labels[i]},{labels[j]})"
            for i in range(results.n)
            for j in range(i + 1, results.n)
        ]
    return names


def central_capacities_csv(results: SmaaResults) -> str:
    header = ["alternative"] + _mobius_header(results)
    rows = []
    for k, label in enumerate(results.alternative_labels):
        vec = results.central(k)
        if vec is None:
            continue
        rows.append([label] + [MOBIUS_FMT.format(v) for v in vec])
    return _csv_text(header, rows)


def barycenter_csv(results: SmaaResults) -> str:
    header = _mobius_header(results)
    return _csv_text(header, [[MOBIUS_FMT.format(v) for v in results.barycenter]])


def write_bundle(directory: str | Path, results: SmaaResults, problem_file: Optional[ProblemFile] = None) -> Path:
    """Write results.json and the CSV tables; returns the directory path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    (directory / "results.json").write_text(results_json_text(results, problem_file), encoding="utf-8")
    (directory / "rank_acceptability.csv").write_text(rank_acceptability_csv(results), encoding="utf-8")
    (directory / "preference_strict.csv").write_text(preference_csv(results, "strict"), encoding="utf-8")
    (directory / "preference_indifferent.csv").write_text(preference_csv(results, "indifferent"), encoding="utf-8")
    (directory / "central_capacities.csv").write_text(central_capacities_csv(results), encoding="utf-8")
    (directory / "barycenter.csv").write_text(barycenter_csv(results), encoding="utf-8")
    return directory
