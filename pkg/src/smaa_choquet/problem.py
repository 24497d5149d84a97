"""Decision problems and their JSON file format.

A problem file is a JSON object::

    {
      "criteria": [{"label": "g1", "direction": "maximize"}, ...],
      "scales": "common",            # or "heterogeneous"
      "alternatives": [
        {"label": "a1", "evaluations": [15, 12, 10, 7]},
        {"label": "a2", "evaluations": [[6, 8], 14, ...]}   # [lo, hi] intervals
      ],
      "preferences": ["imp: g1 > g2", "synergy: g1,g2", ...],
      "config": {"iterations": 100000, "seed": 42}
    }

Parsing is total: every rejected file produces a diagnostic carrying the
line/column (syntax errors) or the JSON path of the offending element.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .capacity import Alternative, Criterion
from .preference import PreferenceStatement, StatementSyntaxError, parse_statement

SCALE_COMMON = "common"
SCALE_HETEROGENEOUS = "heterogeneous"


class ProblemFormatError(ValueError):
    """Invalid problem file; ``location`` is a line/column or a JSON path."""

    def __init__(self, message: str, location: str):
        self.location = location
        super().__init__(f"{message} (at {location})")


@dataclass
class Problem:
    """Criteria, alternatives and their (possibly interval) evaluations."""

    criteria: list[Criterion]
    alternatives: list[Alternative]
    lo: np.ndarray
    hi: np.ndarray
    scale_kind: str = SCALE_COMMON

    def __post_init__(self):
        self.lo = np.asarray(self.lo, dtype=float)
        self.hi = np.asarray(self.hi, dtype=float)
        n, l = len(self.criteria), len(self.alternatives)
        if n < 1 or l < 1:
            raise ValueError("need at least one criterion and one alternative")
        if self.lo.shape != (l, n) or self.hi.shape != (l, n):
            raise ValueError(f"evaluation matrices must have shape ({l}, {n})")
        if np.any(self.lo > self.hi):
            raise ValueError("interval bounds out of order")
        if self.scale_kind not in (SCALE_COMMON, SCALE_HETEROGENEOUS):
            raise ValueError(f"unknown scale kind {self.scale_kind!r}")
        labels = [c.label for c in self.criteria]
        if len(set(labels)) != n:
            raise ValueError("criterion labels must be unique")
        alabels = [a.label for a in self.alternatives]
        if len(set(alabels)) != l:
            raise ValueError("alternative labels must be unique")
        if self.scale_kind == SCALE_COMMON:
            # the aggregation convention anchors at 0: shift scales if needed
            if np.any(self.lo < 0):
                raise ValueError("evaluations must be nonnegative on a common scale")
        else:
            if self.is_interval:
                raise ValueError("heterogeneous-scale problems need point evaluations")

    @property
    def n(self) -> int:
        return len(self.criteria)

    @property
    def l(self) -> int:
        return len(self.alternatives)

    @property
    def is_interval(self) -> bool:
        return bool(np.any(self.lo < self.hi))

    @property
    def criterion_labels(self) -> list[str]:
        return [c.label for c in self.criteria]

    @property
    def alternative_labels(self) -> list[str]:
        return [a.label for a in self.alternatives]

    @property
    def directions(self) -> list[str]:
        return [c.direction for c in self.criteria]

    def point_matrix(self) -> np.ndarray:
        if self.is_interval:
            raise ValueError("problem has interval evaluations; no single point matrix")
        return self.lo.copy()

    def midpoint_matrix(self) -> np.ndarray:
        return (self.lo + self.hi) / 2.0

    def replace_evaluations(self, matrix: np.ndarray, scale_kind: str = SCALE_COMMON) -> "Problem":
        matrix = np.asarray(matrix, dtype=float)
        return Problem(
            criteria=self.criteria,
            alternatives=self.alternatives,
            lo=matrix.copy(),
            hi=matrix.copy(),
            scale_kind=scale_kind,
        )

    def to_dict(self) -> dict:
        alts = []
        for k, a in enumerate(self.alternatives):
            evals: list[Any] = []
            for i in range(self.n):
                if self.lo[k, i] == self.hi[k, i]:
                    evals.append(self.lo[k, i])
                else:
                    evals.append([self.lo[k, i], self.hi[k, i]])
            alts.append({"label": a.label, "evaluations": evals})
        return {
            "criteria": [{"label": c.label, "direction": c.direction} for c in self.criteria],
            "scales": self.scale_kind,
            "alternatives": alts,
        }


@dataclass
class ProblemFile:
    """A parsed problem file: the problem, its statements and config overrides."""

    problem: Problem
    statements: list[PreferenceStatement] = field(default_factory=list)
    statement_texts: list[str] = field(default_factory=list)
    config_overrides: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = self.problem.to_dict()
        out["preferences"] = list(self.statement_texts)
        if self.config_overrides:
            out["config"] = dict(self.config_overrides)
        return out


def _expect(condition: bool, message: str, path: str):
    if not condition:
        raise ProblemFormatError(message, path)


def problem_file_from_dict(data: Any, path: str = "$") -> ProblemFile:
    _expect(isinstance(data, dict), "problem file must be a JSON object", path)
    _expect("criteria" in data, "missing 'criteria'", path)
    _expect("alternatives" in data, "missing 'alternatives'", path)
    known = {"criteria", "alternatives", "preferences", "config", "scales"}
    for key in data:
        _expect(key in known, f"unknown top-level key {key!r}", f"{path}.{key}")

    raw_criteria = data["criteria"]
    _expect(isinstance(raw_criteria, list) and raw_criteria, "'criteria' must be a nonempty array", f"{path}.criteria")
    criteria = []
    for i, c in enumerate(raw_criteria):
        where = f"{path}.criteria[{i}]"
        _expect(isinstance(c, dict), "criterion must be an object", where)
        _expect(isinstance(c.get("label"), str) and c["label"], "criterion needs a 'label' string", where)
        direction = c.get("direction", "maximize")
        _expect(direction in ("maximize", "minimize"), "direction must be 'maximize' or 'minimize'", where)
        criteria.append(Criterion(index=i, label=c["label"], direction=direction))

    scale_kind = data.get("scales", SCALE_COMMON)
    _expect(scale_kind in (SCALE_COMMON, SCALE_HETEROGENEOUS),
            "'scales' must be 'common' or 'heterogeneous'", f"{path}.scales")

    raw_alts = data["alternatives"]
    _expect(isinstance(raw_alts, list) and raw_alts, "'alternatives' must be a nonempty array", f"{path}.alternatives")
    n = len(criteria)
    alternatives, lo_rows, hi_rows = [], [], []
    for k, a in enumerate(raw_alts):
        where = f"{path}.alternatives[{k}]"
        _expect(isinstance(a, dict), "alternative must be an object", where)
        _expect(isinstance(a.get("label"), str) and a["label"], "alternative needs a 'label' string", where)
        evals = a.get("evaluations")
        _expect(isinstance(evals, list), "alternative needs an 'evaluations' array", where)
        _expect(len(evals) == n, f"expected {n} evaluations, got {len(evals)}", f"{where}.evaluations")
        lo_row, hi_row = [], []
        for i, e in enumerate(evals):
            cell = f"{where}.evaluations[{i}]"
            if isinstance(e, (int, float)) and not isinstance(e, bool):
                lo_row.append(float(e))
                hi_row.append(float(e))
            elif isinstance(e, list):
                _expect(len(e) == 2, "interval must be a [lo, hi] pair", cell)
                _expect(all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in e),
                        "interval bounds must be numbers", cell)
                _expect(e[0] <= e[1], "interval bounds out of order", cell)
                lo_row.append(float(e[0]))
                hi_row.append(float(e[1]))
            else:
                raise ProblemFormatError("evaluation must be a number or a [lo, hi] pair", cell)
        alternatives.append(Alternative(index=k, label=a["label"]))
        lo_rows.append(lo_row)
        hi_rows.append(hi_row)

    try:
        problem = Problem(
            criteria=criteria, alternatives=alternatives,
            lo=np.array(lo_rows), hi=np.array(hi_rows), scale_kind=scale_kind,
        )
    except ValueError as exc:
        raise ProblemFormatError(str(exc), path) from exc

    statements, texts = [], []
    raw_prefs = data.get("preferences", [])
    _expect(isinstance(raw_prefs, list), "'preferences' must be an array of strings", f"{path}.preferences")
    for i, text in enumerate(raw_prefs):
        where = f"{path}.preferences[{i}]"
        _expect(isinstance(text, str), "statement must be a string", where)
        try:
            statements.append(parse_statement(text, problem.criterion_labels, problem.alternative_labels))
        except StatementSyntaxError as exc:
            raise ProblemFormatError(f"bad statement: {exc}", f"{where} column {exc.column}") from exc
        texts.append(text)

    config = data.get("config", {})
    _expect(isinstance(config, dict), "'config' must be an object", f"{path}.config")
    return ProblemFile(problem=problem, statements=statements, statement_texts=texts, config_overrides=dict(config))


def load_problem_file(path: str | Path) -> ProblemFile:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemFormatError(exc.msg, f"line {exc.lineno} column {exc.colno}") from exc
    return problem_file_from_dict(data)


def save_problem_file(pf: ProblemFile, path: str | Path):
    Path(path).write_text(canonical_json(pf.to_dict()) + "\n", encoding="utf-8")


def canonical_json(obj: Any) -> str:
    """Deterministic JSON: sorted keys, fixed separators, plain floats."""
    return json.dumps(_plain(obj), sort_keys=True, indent=2, ensure_ascii=False)


def _plain(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, float) and obj == int(obj) and abs(obj) < 1e15:
        return obj
    return obj
