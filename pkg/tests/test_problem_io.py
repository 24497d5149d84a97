import json
from pathlib import Path

import numpy as np
import pytest

from smaa_choquet.problem import (
    Problem,
    ProblemFormatError,
    load_problem_file,
    problem_file_from_dict,
    save_problem_file,
)

REPO_PROBLEMS = Path(__file__).resolve().parent.parent / "problems"


def minimal_doc():
    return {
        "criteria": [{"label": "g1"}, {"label": "g2", "direction": "minimize"}],
        "alternatives": [
            {"label": "a1", "evaluations": [1.0, [2.0, 3.0]]},
            {"label": "a2", "evaluations": [4.0, 5.0]},
        ],
        "preferences": ["imp: g1 >= g2"],
    }


def test_parse_minimal_document():
    pf = problem_file_from_dict(minimal_doc())
    assert pf.problem.n == 2 and pf.problem.l == 2
    assert pf.problem.criteria[1].direction == "minimize"
    assert pf.problem.is_interval
    assert pf.statements[0].text == "imp: g1 >= g2"
    np.testing.assert_allclose(pf.problem.lo, [[1, 2], [4, 5]])
    np.testing.assert_allclose(pf.problem.hi, [[1, 3], [4, 5]])


@pytest.mark.parametrize("mutate,location_hint", [
    (lambda d: d.pop("criteria"), "$"),
    (lambda d: d.__setitem__("criteria", []), "criteria"),
    (lambda d: d["alternatives"][0].__setitem__("evaluations", [1.0]), "evaluations"),
    (lambda d: d["alternatives"][1].__setitem__("evaluations", [4.0, [5.0, 2.0]]), "evaluations[1]"),
    (lambda d: d.__setitem__("preferences", ["imp: g1 >>> g9"]), "preferences[0]"),
    (lambda d: d.__setitem__("scales", "weird"), "scales"),
    (lambda d: d.__setitem__("bogus", 1), "bogus"),
    (lambda d: d["alternatives"].append({"label": "a1", "evaluations": [1, 2]}), "$"),
])
def test_rejections_carry_a_location(mutate, location_hint):
    doc = minimal_doc()
    mutate(doc)
    with pytest.raises(ProblemFormatError) as err:
        problem_file_from_dict(doc)
    assert location_hint in err.value.location or location_hint in str(err.value)


def test_syntax_errors_carry_line_and_column(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "criteria": [,]\n}\n', encoding="utf-8")
    with pytest.raises(ProblemFormatError) as err:
        load_problem_file(bad)
    assert "line 2" in err.value.location


def test_round_trip_through_disk(tmp_path):
    pf = problem_file_from_dict(minimal_doc())
    path = tmp_path / "problem.json"
    save_problem_file(pf, path)
    again = load_problem_file(path)
    assert again.problem.to_dict() == pf.problem.to_dict()
    assert again.statement_texts == pf.statement_texts
    # serialization is canonical: a second round trip is byte-identical
    path2 = tmp_path / "problem2.json"
    save_problem_file(again, path2)
    assert path.read_text() == path2.read_text()


def test_negative_common_scale_rejected():
    doc = minimal_doc()
    doc["alternatives"][0]["evaluations"] = [-1.0, 2.0]
    with pytest.raises(ProblemFormatError):
        problem_file_from_dict(doc)


def test_heterogeneous_requires_point_values():
    doc = minimal_doc()
    doc["scales"] = "heterogeneous"
    with pytest.raises(ProblemFormatError):
        problem_file_from_dict(doc)
    doc["alternatives"][0]["evaluations"] = [1.0, 2.0]
    doc["preferences"] = []
    pf = problem_file_from_dict(doc)
    assert pf.problem.scale_kind == "heterogeneous"
    # heterogeneous raw values may be negative: they are only ever ranked
    doc["alternatives"][0]["evaluations"] = [-5.0, 2.0]
    assert problem_file_from_dict(doc).problem.lo[0, 0] == -5.0


def test_shipped_problem_files_parse():
    for name in ("scores18.json", "scores18_comparisons.json",
                 "scores18_intervals.json", "citycars.json"):
        pf = load_problem_file(REPO_PROBLEMS / name)
        assert pf.problem.l >= 10
    cars = load_problem_file(REPO_PROBLEMS / "citycars.json")
    assert cars.problem.scale_kind == "heterogeneous"
    assert [c.direction for c in cars.problem.criteria] == [
        "minimize", "maximize", "maximize", "minimize"]
    intervals = load_problem_file(REPO_PROBLEMS / "scores18_intervals.json")
    assert intervals.problem.is_interval
    assert intervals.config_overrides == {"eval_sampling": "integer"}
