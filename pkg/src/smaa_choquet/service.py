"""HTTP facade: sessions holding a problem, editable statements and results.

The elicitation console (or any client) uploads a problem once, then adds
and removes preference statements and triggers Monte Carlo reruns.  Runs are
asynchronous: triggering returns immediately and clients poll the results
endpoint.  Every mutation bumps the session revision; results are tagged
with the revision they were computed from and flagged stale once the
session has moved on.

Status codes: 404 unknown session/statement, 409 mutation while a run is in
flight (never silently queued), 422 statements that cannot be parsed or
leave no compatible model (the body carries epsilon* and row provenance).
"""
from __future__ import annotations

import json
import threading
from pathlib import Path
from typing import Any, Optional

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .bundle import results_json_text
from .preference import (
    StatementSyntaxError,
    check_compatibility,
    compile_system,
    parse_statement,
)
from .problem import ProblemFile, ProblemFormatError, problem_file_from_dict
from .smaa import IncompatibleProblemError, NoFeasibleIterationError, RunConfig, run

_CONFIG_KEYS = {
    "iterations", "seed", "burn_in", "thinning", "workers", "eval_sampling",
    "case", "epsilon_min", "epsilon_freeze", "per_iteration_chain_steps",
    "confidence_iterations", "additivity",
}


class _Session:
    def __init__(self, sid: str, problem_file: ProblemFile):
        self.id = sid
        self.problem_file = problem_file
        self.statements: list[dict] = [
            {"id": i + 1, "text": text}
            for i, text in enumerate(problem_file.statement_texts)
        ]
        self.next_statement_id = len(self.statements) + 1
        self.revision = 0
        self.running = False
        self.results_revision: Optional[int] = None
        self.results_doc: Optional[dict] = None
        self.lock = threading.Lock()

    # -- statements ---------------------------------------------------------

    def statement_objects(self, texts: Optional[list[str]] = None):
        problem = self.problem_file.problem
        texts = [s["text"] for s in self.statements] if texts is None else texts
        return [
            parse_statement(t, problem.criterion_labels, problem.alternative_labels)
            for t in texts
        ]

    def compatibility(self, texts: Optional[list[str]] = None, epsilon_min: float = 1e-6):
        problem = self.problem_file.problem
        statements = self.statement_objects(texts)
        if problem.scale_kind == "heterogeneous" or problem.is_interval:
            statements = [s for s in statements if not s.references_alternatives]
        evals = None if problem.is_interval or problem.scale_kind == "heterogeneous" else problem.point_matrix()
        system = compile_system(statements, problem.n, evals=evals,
                                labels=problem.criterion_labels)
        return check_compatibility(system, epsilon_min)

    def view(self) -> dict:
        problem = self.problem_file.problem
        return {
            "id": self.id,
            "revision": self.revision,
            "running": self.running,
            "criteria": [{"label": c.label, "direction": c.direction} for c in problem.criteria],
            "alternatives": problem.alternative_labels,
            "scales": problem.scale_kind,
            "statements": list(self.statements),
            "results_revision": self.results_revision,
            "results_stale": (self.results_revision is not None and self.results_revision != self.revision),
        }

    def snapshot_problem_file(self) -> ProblemFile:
        texts = [s["text"] for s in self.statements]
        return ProblemFile(
            problem=self.problem_file.problem,
            statements=self.statement_objects(),
            statement_texts=texts,
            config_overrides=dict(self.problem_file.config_overrides),
        )


class SessionStore:
    def __init__(self, persist_dir: Optional[str] = None):
        self.sessions: dict[str, _Session] = {}
        self.persist_dir = Path(persist_dir) if persist_dir else None
        self.counter = 0
        self.lock = threading.Lock()
        if self.persist_dir:
            self.persist_dir.mkdir(parents=True, exist_ok=True)
            self._load_existing()

    def _load_existing(self):
        for path in sorted(self.persist_dir.glob("*.json")):
            try:
                doc = json.loads(path.read_text(encoding="utf-8"))
                pf = problem_file_from_dict(doc["problem"])
                session = _Session(doc["id"], pf)
                session.statements = doc["statements"]
                session.next_statement_id = doc["next_statement_id"]
                session.revision = doc["revision"]
                session.results_revision = doc.get("results_revision")
                session.results_doc = doc.get("results")
                self.sessions[session.id] = session
                num = int(session.id.lstrip("s") or "0")
                self.counter = max(self.counter, num)
            except (KeyError, ValueError, ProblemFormatError):
                continue

    def persist(self, session: _Session):
        if not self.persist_dir:
            return
        doc = {
            "id": session.id,
            "problem": session.snapshot_problem_file().to_dict(),
            "statements": session.statements,
            "next_statement_id": session.next_statement_id,
            "revision": session.revision,
            "results_revision": session.results_revision,
            "results": session.results_doc,
        }
        (self.persist_dir / f"{session.id}.json").write_text(
            json.dumps(doc, sort_keys=True), encoding="utf-8"
        )

    def create(self, pf: ProblemFile) -> _Session:
        with self.lock:
            self.counter += 1
            sid = f"s{self.counter}"
            session = _Session(sid, pf)
            self.sessions[sid] = session
        self.persist(session)
        return session

    def get(self, sid: str) -> _Session:
        session = self.sessions.get(sid)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown session {sid!r}")
        return session


class _StatementBody(BaseModel):
    statement: str


class _RunBody(BaseModel):
    config: dict[str, Any] = {}


def _config_for(session: _Session, overrides: dict) -> RunConfig:
    merged = dict(session.problem_file.config_overrides)
    merged.update(overrides)
    unknown = set(merged) - _CONFIG_KEYS
    if unknown:
        raise HTTPException(status_code=422, detail=f"unknown config keys: {sorted(unknown)}")
    try:
        return RunConfig(**merged)
    except (TypeError, ValueError) as exc:
        raise HTTPException(status_code=422, detail=f"bad configuration: {exc}")


def create_app(persist_dir: Optional[str] = None, ui_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="smaa-choquet service", version="0.1.0")
    store = SessionStore(persist_dir)
    app.state.store = store

    @app.post("/sessions", status_code=201)
    def create_session(body: dict):
        try:
            pf = problem_file_from_dict(body.get("problem", body))
        except ProblemFormatError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        session = store.create(pf)
        comp = session.compatibility()
        return {
            "id": session.id,
            "revision": session.revision,
            "epsilon_star": comp.epsilon_star,
            "compatible": comp.compatible,
        }

    @app.get("/sessions")
    def list_sessions():
        return [s.view() for s in store.sessions.values()]

    @app.get("/sessions/{sid}")
    def get_session(sid: str):
        return store.get(sid).view()

    @app.get("/sessions/{sid}/compatibility")
    def get_compatibility(sid: str):
        session = store.get(sid)
        comp = session.compatibility()
        return {
            "revision": session.revision,
            "status": comp.status,
            "compatible": comp.compatible,
            "epsilon_star": comp.epsilon_star,
            "suspect_rows": list(comp.suspect_rows),
        }

    @app.post("/sessions/{sid}/statements")
    def add_statement(sid: str, body: _StatementBody):
        session = store.get(sid)
        with session.lock:
            if session.running:
                raise HTTPException(status_code=409, detail="a run is in flight; try again later")
            problem = session.problem_file.problem
            try:
                parse_statement(body.statement, problem.criterion_labels, problem.alternative_labels)
            except StatementSyntaxError as exc:
                raise HTTPException(status_code=422, detail={"error": str(exc), "column": exc.column})
            texts = [s["text"] for s in session.statements] + [body.statement]
            comp = session.compatibility(texts)
            if not comp.compatible:
                return JSONResponse(
                    status_code=422,
                    content={
                        "error": "statement leaves no compatible model",
                        "statement": body.statement,
                        "status": comp.status,
                        "epsilon_star": comp.epsilon_star,
                        "suspect_rows": list(comp.suspect_rows),
                    },
                )
            entry = {"id": session.next_statement_id, "text": body.statement.strip()}
            session.next_statement_id += 1
            session.statements.append(entry)
            session.revision += 1
            store.persist(session)
            return {"revision": session.revision, "statement": entry, "epsilon_star": comp.epsilon_star}

    @app.delete("/sessions/{sid}/statements/{stmt_id}")
    def remove_statement(sid: str, stmt_id: int):
        session = store.get(sid)
        with session.lock:
            if session.running:
                raise HTTPException(status_code=409, detail="a run is in flight; try again later")
            for i, entry in enumerate(session.statements):
                if entry["id"] == stmt_id:
                    del session.statements[i]
                    session.revision += 1
                    comp = session.compatibility()
                    store.persist(session)
                    return {"revision": session.revision, "epsilon_star": comp.epsilon_star}
            raise HTTPException(status_code=404, detail=f"no statement with id {stmt_id}")

    @app.post("/sessions/{sid}/run", status_code=202)
    def trigger_run(sid: str, body: _RunBody):
        session = store.get(sid)
        with session.lock:
            if session.running:
                raise HTTPException(status_code=409, detail="a run is already in flight")
            config = _config_for(session, body.config)
            snapshot = session.snapshot_problem_file()
            revision = session.revision
            session.running = True

        def work():
            try:
                results = run(snapshot.problem, snapshot.statements, config)
                doc = json.loads(results_json_text(results, snapshot))
                with session.lock:
                    session.results_doc = doc
                    session.results_revision = revision
            except (IncompatibleProblemError, NoFeasibleIterationError) as exc:
                with session.lock:
                    session.results_doc = {"error": str(exc)}
                    session.results_revision = revision
            finally:
                with session.lock:
                    session.running = False
                store.persist(session)

        threading.Thread(target=work, daemon=True).start()
        return {"revision": revision, "status": "running"}

    @app.get("/sessions/{sid}/results")
    def get_results(sid: str):
        session = store.get(sid)
        with session.lock:
            if session.running:
                return {"status": "running", "revision": session.revision}
            if session.results_doc is None:
                return {"status": "none", "revision": session.revision}
            return {
                "status": "ready",
                "revision": session.revision,
                "results_revision": session.results_revision,
                "stale": session.results_revision != session.revision,
                "results": session.results_doc,
            }

    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
