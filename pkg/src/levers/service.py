"""HTTP/JSON API over the analysis engine.

Graphs are server-side resources with optimistic versioning (PUT requires
If-Match); analyses run as cancellable background jobs bound to one graph
version; dynamics runs are synchronous. Everything persists as one JSON
document per resource under a data directory, so a workshop laptop needs no
database and survives restarts with identical state.

Environment: LEVERS_DATA_DIR, LEVERS_TOKEN (shared bearer token, optional),
LEVERS_PORT (default 8080), LEVERS_MAX_JOBS (default: available cores).
"""

from __future__ import annotations

import json
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Mapping, Optional

from fastapi import Body, FastAPI, Request, Response
from fastapi.responses import JSONResponse

from .analysis import (
    analyze,
    compare_perspectives,
    compare_scenarios,
    perspective_diff_document,
    scenario_diff_document,
)
from .controllability import (
    AnalysisCancelledError,
    Budget,
    report_from_document,
    report_to_json,
)
from .dynamics import (
    MappingKind,
    MappingSpec,
    StateVector,
    iterate_to_fixed_point,
    rank_factors,
)
from .model import (
    FcmGraph,
    GraphSchemaError,
    Perspective,
    detect_self_loops,
    graph_to_document,
    parse_document,
)

SCHEMA_VERSION_HEADER = "X-Schema-Version"
MAX_DYNAMICS_ITER = 100_000


class NotFoundError(KeyError):
    pass


class VersionConflictError(Exception):
    def __init__(self, current: int):
        self.current = current
        super().__init__(f"version conflict; current version is {current}")


class JobStateError(Exception):
    """Operation not valid for the job's current state."""


def _utcnow() -> str:
    return datetime.now(timezone.utc).isoformat()


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _dump(document: Mapping[str, Any]) -> str:
    return json.dumps(document, indent=2) + "\n"


@dataclass
class StoredGraph:
    id: str
    version: int
    created_at: str
    updated_at: str
    document: dict[str, Any]

    def meta(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "version": self.version,
            "created_at": self.created_at,
            "updated_at": self.updated_at,
            "title": self.document.get("title", ""),
            "scenario": self.document.get("scenario", ""),
        }


class GraphStore:
    """Versioned JSON-file persistence for graphs and finished analysis jobs."""

    def __init__(self, data_dir: Path):
        self.data_dir = Path(data_dir)
        self.graphs_dir = self.data_dir / "graphs"
        self.jobs_dir = self.data_dir / "jobs"
        self.reports_dir = self.data_dir / "reports"
        for directory in (self.data_dir, self.graphs_dir, self.jobs_dir, self.reports_dir):
            directory.mkdir(parents=True, exist_ok=True)
        self._lock = threading.RLock()
        self._graphs: dict[str, StoredGraph] = {}
        self._graph_seq = 0
        self._job_seq = 0
        self._load()

    def _index_path(self) -> Path:
        return self.data_dir / "index.json"

    def _load(self) -> None:
        index_path = self._index_path()
        if index_path.exists():
            index = json.loads(index_path.read_text(encoding="utf-8"))
            self._graph_seq = int(index.get("graph_seq", 0))
            self._job_seq = int(index.get("job_seq", 0))
        for path in sorted(self.graphs_dir.glob("*.json")):
            raw = json.loads(path.read_text(encoding="utf-8"))
            stored = StoredGraph(
                id=raw["id"],
                version=int(raw["version"]),
                created_at=raw["created_at"],
                updated_at=raw["updated_at"],
                document=raw["graph"],
            )
            self._graphs[stored.id] = stored

    def _save_index(self) -> None:
        _atomic_write(
            self._index_path(),
            _dump({"graph_seq": self._graph_seq, "job_seq": self._job_seq}),
        )

    def _save_graph(self, stored: StoredGraph) -> None:
        _atomic_write(
            self.graphs_dir / f"{stored.id}.json",
            _dump(
                {
                    "id": stored.id,
                    "version": stored.version,
                    "created_at": stored.created_at,
                    "updated_at": stored.updated_at,
                    "graph": stored.document,
                }
            ),
        )

    def next_job_id(self) -> str:
        with self._lock:
            self._job_seq += 1
            self._save_index()
            return f"j{self._job_seq}"

    def create(self, graph: FcmGraph) -> StoredGraph:
        document = graph_to_document(graph)
        with self._lock:
            self._graph_seq += 1
            now = _utcnow()
            stored = StoredGraph(
                id=f"g{self._graph_seq}",
                version=1,
                created_at=now,
                updated_at=now,
                document=document,
            )
            self._graphs[stored.id] = stored
            self._save_graph(stored)
            self._save_index()
            return stored

    def get(self, graph_id: str) -> StoredGraph:
        with self._lock:
            if graph_id not in self._graphs:
                raise NotFoundError(graph_id)
            return self._graphs[graph_id]

    def list(self) -> list[dict[str, Any]]:
        with self._lock:
            return [self._graphs[g].meta() for g in sorted(self._graphs)]

    def update(self, graph_id: str, graph: FcmGraph, expected_version: int) -> StoredGraph:
        document = graph_to_document(graph)
        with self._lock:
            if graph_id not in self._graphs:
                raise NotFoundError(graph_id)
            stored = self._graphs[graph_id]
            if stored.version != expected_version:
                raise VersionConflictError(stored.version)
            stored.version += 1
            stored.updated_at = _utcnow()
            stored.document = document
            self._save_graph(stored)
            return stored

    def delete(self, graph_id: str) -> None:
        with self._lock:
            if graph_id not in self._graphs:
                raise NotFoundError(graph_id)
            del self._graphs[graph_id]
        path = self.graphs_dir / f"{graph_id}.json"
        if path.exists():
            path.unlink()

    def save_job(self, record: Mapping[str, Any], report_text: Optional[str]) -> None:
        _atomic_write(self.jobs_dir / f"{record['id']}.json", _dump(dict(record)))
        if report_text is not None:
            _atomic_write(self.reports_dir / f"{record['id']}.json", report_text)

    def load_jobs(self) -> dict[str, dict[str, Any]]:
        jobs = {}
        for path in sorted(self.jobs_dir.glob("*.json")):
            raw = json.loads(path.read_text(encoding="utf-8"))
            jobs[raw["id"]] = raw
        return jobs

    def load_report_text(self, job_id: str) -> Optional[str]:
        path = self.reports_dir / f"{job_id}.json"
        if not path.exists():
            return None
        return path.read_text(encoding="utf-8")


@dataclass
class AnalysisJob:
    id: str
    graph_id: str
    graph_version: int
    status: str = "queued"  # queued | running | done | failed | cancelled
    budget: Budget = field(default_factory=Budget)
    perspective: Optional[str] = None
    progress: int = 0
    report_text: Optional[str] = None
    error: Optional[str] = None
    cancel_event: threading.Event = field(default_factory=threading.Event)

    def record(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "graph_id": self.graph_id,
            "graph_version": self.graph_version,
            "status": self.status,
            "budget": {
                "max_configs": self.budget.max_configs,
                "max_millis": self.budget.max_millis,
            },
            "perspective": self.perspective,
            "progress": self.progress,
            "error": self.error,
        }


class JobManager:
    """Runs analysis jobs on a bounded worker pool; terminal jobs persist."""

    def __init__(self, store: GraphStore, max_jobs: int):
        self.store = store
        self._lock = threading.RLock()
        self._jobs: dict[str, AnalysisJob] = {}
        self._executor = ThreadPoolExecutor(max_workers=max(1, max_jobs))
        for job_id, raw in store.load_jobs().items():
            job = AnalysisJob(
                id=job_id,
                graph_id=raw["graph_id"],
                graph_version=int(raw["graph_version"]),
                status=raw["status"],
                budget=Budget(
                    max_configs=raw["budget"].get("max_configs"),
                    max_millis=raw["budget"].get("max_millis"),
                ),
                perspective=raw.get("perspective"),
                progress=int(raw.get("progress", 0)),
                error=raw.get("error"),
            )
            job.report_text = store.load_report_text(job_id)
            self._jobs[job_id] = job

    def submit(
        self,
        graph: FcmGraph,
        stored: StoredGraph,
        budget: Budget,
        perspective: Optional[Perspective],
    ) -> AnalysisJob:
        job = AnalysisJob(
            id=self.store.next_job_id(),
            graph_id=stored.id,
            graph_version=stored.version,
            budget=budget,
            perspective=perspective.label if perspective else None,
        )
        with self._lock:
            self._jobs[job.id] = job
        self._executor.submit(self._run, job, graph, perspective)
        return job

    def _run(self, job: AnalysisJob, graph: FcmGraph, perspective: Optional[Perspective]) -> None:
        with self._lock:
            if job.status == "cancelled":
                return
            job.status = "running"

        def on_progress(tested: int) -> None:
            job.progress = tested

        try:
            report = analyze(
                graph,
                budget=job.budget,
                perspective=perspective,
                progress=on_progress,
                should_cancel=job.cancel_event.is_set,
            )
            text = report_to_json(report)
            with self._lock:
                job.report_text = text
                job.status = "done"
        except AnalysisCancelledError:
            with self._lock:
                job.status = "cancelled"
        except Exception as exc:  # pragma: no cover - defensive
            with self._lock:
                job.status = "failed"
                job.error = str(exc)
        self.store.save_job(job.record(), job.report_text if job.status == "done" else None)

    def get(self, job_id: str) -> AnalysisJob:
        with self._lock:
            if job_id not in self._jobs:
                raise NotFoundError(job_id)
            return self._jobs[job_id]

    def cancel(self, job_id: str) -> AnalysisJob:
        with self._lock:
            job = self.get(job_id)
            if job.status in ("done", "failed", "cancelled"):
                raise JobStateError(f"job {job_id} already reached status {job.status}")
            job.cancel_event.set()
            if job.status == "queued":
                job.status = "cancelled"
                self.store.save_job(job.record(), None)
            return job


# --- request plumbing -----------------------------------------------------


def _error(status: int, code: str, message: str, **extra: Any) -> JSONResponse:
    payload = {"code": code, "message": message}
    payload.update(extra)
    return JSONResponse(status_code=status, content=payload)


def _parse_budget(raw: Any) -> Budget:
    if raw is None:
        return Budget()
    if not isinstance(raw, Mapping):
        raise GraphSchemaError("budget", "must be an object")
    def limit(key: str, default: Optional[int]) -> Optional[int]:
        value = raw.get(key, default)
        if value is None:
            return None
        if not isinstance(value, int) or value < 1:
            raise GraphSchemaError(f"budget.{key}", "must be a positive integer or null")
        return value
    return Budget(
        max_configs=limit("max_configs", Budget().max_configs),
        max_millis=limit("max_millis", Budget().max_millis),
    )


def _resolve_perspective(graph: FcmGraph, raw: Any, path: str) -> Optional[Perspective]:
    if raw is None:
        return None
    if isinstance(raw, str):
        try:
            return graph.perspective(raw)
        except KeyError:
            raise GraphSchemaError(path, f"unknown perspective {raw!r}")
    if isinstance(raw, Mapping):
        from .model import Controllability

        overrides = {}
        for fid, level in (raw.get("overrides") or {}).items():
            try:
                overrides[str(fid)] = Controllability(level)
            except ValueError:
                raise GraphSchemaError(
                    f"{path}.overrides.{fid}",
                    f"unknown value {level!r} (expected easy|medium|hard)",
                )
        unknown = set(overrides) - set(graph.factor_ids)
        if unknown:
            raise GraphSchemaError(path, f"overrides for unknown factors {sorted(unknown)}")
        return Perspective(label=str(raw.get("label", "inline")), overrides=overrides)
    raise GraphSchemaError(path, "must be a perspective label or object")


def create_app(
    data_dir: Optional[str] = None,
    token: Optional[str] = None,
    max_jobs: Optional[int] = None,
) -> FastAPI:
    """Build the application; arguments default from the environment."""
    data_dir = data_dir or os.environ.get("LEVERS_DATA_DIR", "levers-data")
    token = token if token is not None else os.environ.get("LEVERS_TOKEN")
    if max_jobs is None:
        max_jobs = int(os.environ.get("LEVERS_MAX_JOBS", os.cpu_count() or 2))

    store = GraphStore(Path(data_dir))
    jobs = JobManager(store, max_jobs)
    app = FastAPI(title="levers", version="0.1.0")
    app.state.store = store
    app.state.jobs = jobs

    @app.middleware("http")
    async def schema_and_auth(request: Request, call_next):
        if token:
            supplied = request.headers.get("authorization", "")
            if supplied != f"Bearer {token}":
                response = _error(401, "UNAUTHORIZED", "missing or invalid bearer token")
                response.headers[SCHEMA_VERSION_HEADER] = "1"
                return response
        response = await call_next(request)
        response.headers[SCHEMA_VERSION_HEADER] = "1"
        return response

    @app.exception_handler(GraphSchemaError)
    async def schema_error(request: Request, exc: GraphSchemaError):
        return _error(422, "SCHEMA", str(exc), path=exc.path)

    @app.exception_handler(NotFoundError)
    async def not_found(request: Request, exc: NotFoundError):
        return _error(404, "NOT_FOUND", f"no such resource: {exc.args[0]}")

    @app.exception_handler(VersionConflictError)
    async def version_conflict(request: Request, exc: VersionConflictError):
        return _error(409, "VERSION_CONFLICT", str(exc), current=exc.current)

    @app.post("/graphs", status_code=201)
    def create_graph(payload: dict = Body(...)):
        graph = parse_document(payload)
        stored = store.create(graph)
        return {"id": stored.id, "version": stored.version}

    @app.get("/graphs")
    def list_graphs():
        return {"graphs": store.list()}

    @app.get("/graphs/{graph_id}")
    def get_graph(graph_id: str):
        stored = store.get(graph_id)
        return {**stored.meta(), "graph": stored.document}

    @app.put("/graphs/{graph_id}")
    def put_graph(graph_id: str, request: Request, payload: dict = Body(...)):
        if_match = request.headers.get("if-match")
        if if_match is None:
            return _error(428, "PRECONDITION_REQUIRED", "If-Match header with the current version is required")
        try:
            expected = int(if_match.strip().strip('"'))
        except ValueError:
            return _error(428, "PRECONDITION_REQUIRED", f"If-Match must be an integer version, got {if_match!r}")
        graph = parse_document(payload)
        stored = store.update(graph_id, graph, expected)
        return {"id": stored.id, "version": stored.version}

    @app.delete("/graphs/{graph_id}", status_code=204)
    def delete_graph(graph_id: str):
        store.delete(graph_id)
        return Response(status_code=204)

    @app.post("/graphs/{graph_id}/analyses", status_code=202)
    def start_analysis(graph_id: str, payload: Optional[dict] = Body(None)):
        stored = store.get(graph_id)
        graph = parse_document(stored.document)
        loops = detect_self_loops(graph)
        if loops:
            return _error(
                422,
                "SELF_LOOPS",
                "controllability analysis requires a graph without self-loops",
                ids=loops,
            )
        payload = payload or {}
        budget = _parse_budget(payload.get("budget"))
        perspective = _resolve_perspective(graph, payload.get("perspective"), "perspective")
        job = jobs.submit(graph, stored, budget, perspective)
        return {"job": job.id, "status": job.status}

    @app.get("/analyses/{job_id}")
    def get_analysis(job_id: str):
        job = jobs.get(job_id)
        result = None
        if job.status == "done" and job.report_text:
            result = json.loads(job.report_text)
        return {
            "job": job.id,
            "graph": {"id": job.graph_id, "version": job.graph_version},
            "status": job.status,
            "progress": {"candidates_tested": job.progress},
            "result": result,
            "error": job.error,
        }

    @app.delete("/analyses/{job_id}", status_code=202)
    def cancel_analysis(job_id: str):
        try:
            job = jobs.cancel(job_id)
        except JobStateError as exc:
            return _error(409, "ALREADY_FINISHED", str(exc))
        return {"job": job.id, "status": job.status}

    @app.post("/graphs/{graph_id}/dynamics")
    def run_dynamics(graph_id: str, payload: dict = Body(...)):
        stored = store.get(graph_id)
        graph = parse_document(stored.document)
        kind_raw = payload.get("mapping")
        if kind_raw not in (MappingKind.LINEAR.value, MappingKind.SIGMOID.value):
            raise GraphSchemaError("mapping", "must be 'linear' or 'sigmoid'")
        lam = payload.get("lambda", 1.0)
        if not isinstance(lam, (int, float)) or lam <= 0:
            raise GraphSchemaError("lambda", "must be a positive number")
        mapping = MappingSpec(kind=MappingKind(kind_raw), lam=float(lam))
        tol = payload.get("tol", 1e-6)
        if not isinstance(tol, (int, float)) or tol <= 0:
            raise GraphSchemaError("tol", "must be a positive number")
        max_iter = payload.get("max_iter", 10_000)
        if not isinstance(max_iter, int) or max_iter < 1:
            raise GraphSchemaError("max_iter", "must be a positive integer")
        max_iter = min(max_iter, MAX_DYNAMICS_ITER)
        x0 = None
        raw_x0 = payload.get("x0")
        if raw_x0 is not None:
            if isinstance(raw_x0, (int, float)):
                x0 = StateVector(values={fid: float(raw_x0) for fid in graph.factor_ids})
            elif isinstance(raw_x0, Mapping):
                unknown = set(raw_x0) - set(graph.factor_ids)
                if unknown:
                    raise GraphSchemaError("x0", f"values for unknown factors {sorted(unknown)}")
                missing = set(graph.factor_ids) - set(raw_x0)
                if missing:
                    raise GraphSchemaError("x0", f"missing values for factors {sorted(missing)}")
                x0 = StateVector(values={fid: float(v) for fid, v in raw_x0.items()})
            else:
                raise GraphSchemaError("x0", "must be a number or an object of factor values")
        trajectory = iterate_to_fixed_point(graph, mapping, x0=x0, tol=float(tol), max_iter=max_iter)
        ids = graph.factor_ids
        final = trajectory.states[-1]
        return {
            "converged": trajectory.converged,
            "steps": len(trajectory.states) - 1,
            "factor_ids": list(ids),
            "trajectory": [
                [state.values[fid] for fid in ids] for state in trajectory.states
            ],
            "fixed_point": dict(trajectory.fixed_point.values) if trajectory.fixed_point else None,
            "ranking": rank_factors(final),
        }

    @app.post("/compare/perspectives")
    def compare_perspectives_endpoint(payload: dict = Body(...)):
        raw_graph = payload.get("graph")
        if isinstance(raw_graph, str):
            stored = store.get(raw_graph)
            graph = parse_document(stored.document)
        elif isinstance(raw_graph, Mapping):
            graph = parse_document(raw_graph)
        else:
            raise GraphSchemaError("graph", "must be a stored graph id or a graph document")
        p1 = _resolve_perspective(graph, payload.get("p1"), "p1")
        p2 = _resolve_perspective(graph, payload.get("p2"), "p2")
        if p1 is None or p2 is None:
            raise GraphSchemaError("p1" if p1 is None else "p2", "perspective is required")
        loops = detect_self_loops(graph)
        if loops:
            return _error(422, "SELF_LOOPS", "comparison requires a graph without self-loops", ids=loops)
        budget = _parse_budget(payload.get("budget"))
        diff = compare_perspectives(graph, p1, p2, budget=budget)
        return perspective_diff_document(diff)

    @app.post("/compare/scenarios")
    def compare_scenarios_endpoint(payload: dict = Body(...)):
        reports = []
        for key in ("analysisA", "analysisB"):
            job_id = payload.get(key)
            if not isinstance(job_id, str):
                raise GraphSchemaError(key, "must be an analysis job id")
            job = jobs.get(job_id)
            if job.status != "done" or not job.report_text:
                raise GraphSchemaError(key, f"analysis {job_id} is not finished (status {job.status})")
            reports.append(report_from_document(json.loads(job.report_text)))
        diff = compare_scenarios(reports[0], reports[1])
        return scenario_diff_document(diff)

    return app


def main() -> None:  # pragma: no cover - thin launcher
    import uvicorn

    port = int(os.environ.get("LEVERS_PORT", "8080"))
    uvicorn.run(create_app(), host="0.0.0.0", port=port)
