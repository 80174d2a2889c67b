"""HTTP facade over the engine for the web UI.

Endpoints (JSON only; field names are documented in docs/api.md):

    POST   /api/jobs                submit an experiment config
    GET    /api/jobs                list jobs, newest first
    GET    /api/jobs/{id}           job state and progress
    GET    /api/jobs/{id}/result    trajectories for a finished job
    GET    /api/jobs/{id}/density   a 1-D/2-D slice of a density snapshot
    DELETE /api/jobs/{id}           cooperative cancel at the next coarse step

Jobs are held in memory; completed artifacts can optionally be persisted
to a directory using the same files the CLI writes.  Job state
transitions are forward-only: queued -> running -> done | failed.
"""

from __future__ import annotations

import os
import threading
import time
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from fastapi import Body, FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .config import ExperimentConfig
from .errors import ConfigError, FilterCancelled, YauYauError
from .harness import ExperimentResult, execute, write_artifacts


@dataclass
class JobRecord:
    id: str
    config: ExperimentConfig
    state: str = "queued"  # queued | running | done | failed
    progress: float = 0.0
    error: Optional[str] = None
    created_at: float = field(default_factory=time.time)
    completed_at: Optional[float] = None
    cancel_requested: bool = False
    result: Optional[ExperimentResult] = None

    def view(self) -> dict:
        summary = None
        if self.result is not None:
            summary = {
                "rmse": self.result.rmse,
                "zero_estimator_rmse": self.result.zero_rmse,
                "timings": dict(self.result.filter_result.timings),
                "ntau": self.result.tg.ntau,
                "grid": {
                    "dim": self.result.grid.dim,
                    "ns": self.result.grid.ns,
                    "ds": self.result.grid.ds,
                },
                "snapshot_count": len(self.result.filter_result.snapshots),
            }
        return {
            "id": self.id,
            "state": self.state,
            "progress": self.progress,
            "error": self.error,
            "created_at": self.created_at,
            "completed_at": self.completed_at,
            "config": self.config.to_dict(),
            "summary": summary,
        }


class JobRegistry:
    """Single ownership point for job records; all access is locked."""

    def __init__(self, max_workers: int, queue_depth: int, persist_dir=None):
        self._lock = threading.Lock()
        self._jobs: dict = {}
        self._order: list = []
        self.queue_depth = queue_depth
        self.persist_dir = persist_dir
        self._pool = ThreadPoolExecutor(max_workers=max_workers)

    def submit(self, cfg: ExperimentConfig) -> JobRecord:
        with self._lock:
            active = sum(1 for j in self._jobs.values() if j.state in ("queued", "running"))
            if active >= self.queue_depth:
                raise QueueFull(f"job queue is full ({self.queue_depth} active jobs)")
            record = JobRecord(id=uuid.uuid4().hex[:12], config=cfg)
            self._jobs[record.id] = record
            self._order.append(record.id)
        self._pool.submit(self._run, record)
        return record

    def get(self, job_id: str) -> JobRecord:
        with self._lock:
            if job_id not in self._jobs:
                raise UnknownJob(f"no job with id {job_id!r}")
            return self._jobs[job_id]

    def list_views(self) -> list:
        with self._lock:
            return [self._jobs[i].view() for i in reversed(self._order)]

    def request_cancel(self, job_id: str) -> JobRecord:
        record = self.get(job_id)
        with self._lock:
            record.cancel_requested = True
        return record

    def shutdown(self):
        self._pool.shutdown(wait=False, cancel_futures=True)

    def _run(self, record: JobRecord) -> None:
        with self._lock:
            if record.cancel_requested:
                record.state = "failed"
                record.error = "cancelled"
                record.completed_at = time.time()
                return
            record.state = "running"

        def progress(fraction: float) -> None:
            with self._lock:
                record.progress = max(record.progress, fraction)

        def should_cancel() -> bool:
            with self._lock:
                return record.cancel_requested

        try:
            result = execute(record.config, progress=progress, should_cancel=should_cancel)
        except FilterCancelled:
            with self._lock:
                record.state = "failed"
                record.error = "cancelled"
                record.completed_at = time.time()
            return
        except Exception as exc:  # job failure must not kill the worker
            with self._lock:
                record.state = "failed"
                record.error = str(exc)
                record.completed_at = time.time()
            return

        if self.persist_dir:
            try:
                write_artifacts(result, os.path.join(self.persist_dir, record.id))
            except OSError as exc:
                record.error = f"persisting artifacts failed: {exc}"
        with self._lock:
            record.result = result
            record.progress = 1.0
            record.state = "done"
            record.completed_at = time.time()


class QueueFull(YauYauError):
    pass


class UnknownJob(YauYauError):
    pass


def _error(status: int, message: str, issues=None) -> JSONResponse:
    payload = {"error": message}
    if issues is not None:
        payload["issues"] = [{"field": f, "message": m} for f, m in issues]
    return JSONResponse(payload, status_code=status)


def create_app(
    *,
    max_workers: int = 2,
    queue_depth: int = 8,
    persist_dir=None,
    static_dir=None,
) -> FastAPI:
    app = FastAPI(title="yauyau", version="0.1.0", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    registry = JobRegistry(max_workers=max_workers, queue_depth=queue_depth, persist_dir=persist_dir)
    app.state.registry = registry

    @app.post("/api/jobs")
    def submit_job(payload: dict = Body(...)):
        try:
            cfg = ExperimentConfig.from_dict(payload)
        except ConfigError as exc:
            return _error(422, "invalid experiment config", exc.issues)
        try:
            record = registry.submit(cfg)
        except QueueFull as exc:
            return _error(429, str(exc))
        return JSONResponse({"id": record.id, "state": record.state}, status_code=201)

    @app.get("/api/jobs")
    def list_jobs():
        return {"jobs": registry.list_views()}

    @app.get("/api/jobs/{job_id}")
    def job_status(job_id: str):
        try:
            return registry.get(job_id).view()
        except UnknownJob as exc:
            return _error(404, str(exc))

    @app.get("/api/jobs/{job_id}/result")
    def fetch_result(job_id: str):
        try:
            record = registry.get(job_id)
        except UnknownJob as exc:
            return _error(404, str(exc))
        if record.state == "failed":
            return _error(409, f"job failed: {record.error}")
        if record.state != "done":
            return _error(409, f"job is {record.state}; result not available yet")
        result = record.result
        fr = result.filter_result
        return {
            "id": record.id,
            "tau": result.tg.coarse_times().tolist(),
            "truth": fr.truth_coarse.tolist() if fr.truth_coarse is not None else None,
            "estimates": fr.estimates.tolist(),
            "error": fr.errors.tolist() if fr.errors is not None else None,
            "rmse": result.rmse,
            "zero_estimator_rmse": result.zero_rmse,
            "dim": result.config.dim,
            "config": result.config.to_dict(),
        }

    @app.get("/api/jobs/{job_id}/density")
    def fetch_density(job_id: str, snapshot: int = 0, axes: str = "", fixed: str = ""):
        try:
            record = registry.get(job_id)
        except UnknownJob as exc:
            return _error(404, str(exc))
        if record.state != "done":
            return _error(409, f"job is {record.state}; density not available")
        result = record.result
        snapshots = result.filter_result.snapshots
        if not snapshots:
            return _error(422, "no density snapshots were retained for this job")
        if not 0 <= snapshot < len(snapshots):
            return _error(422, f"snapshot index must be in [0, {len(snapshots) - 1}]")
        grid = result.grid
        coarse_step, values = snapshots[snapshot]
        try:
            axis_list, fixed_map = _parse_slice_args(grid.dim, axes, fixed)
        except ValueError as exc:
            return _error(422, str(exc))

        for d, i in fixed_map.items():
            if not 0 <= i < grid.ns:
                return _error(
                    422, f"node index {i} for dimension {d} out of range [0, {grid.ns - 1}]"
                )
        cube = values.reshape(grid.shape)
        index = [slice(None)] * grid.dim
        for d, i in fixed_map.items():
            index[d - 1] = i
        sliced = cube[tuple(index)]
        if len(axis_list) == 2 and axis_list[0] > axis_list[1]:
            sliced = sliced.T
        return {
            "id": record.id,
            "snapshot": snapshot,
            "snapshot_count": len(snapshots),
            "coarse_step": coarse_step,
            "tau": coarse_step * result.tg.dtau,
            "axes": axis_list,
            "fixed": {str(d): i for d, i in fixed_map.items()},
            "nodes": grid.nodes.tolist(),
            "ds": grid.ds,
            "dim": grid.dim,
            "values": sliced.tolist(),
            "mass": float(values.sum() * grid.cell_volume),
        }

    @app.delete("/api/jobs/{job_id}")
    def cancel_job(job_id: str):
        try:
            record = registry.request_cancel(job_id)
        except UnknownJob as exc:
            return _error(404, str(exc))
        return record.view()

    if static_dir and os.path.isdir(static_dir):
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app


def _parse_slice_args(dim: int, axes: str, fixed: str):
    """Parse ?axes=1,2&fixed=3:6 style slice selectors (1-based dimensions)."""
    if axes.strip():
        try:
            axis_list = [int(a) for a in axes.split(",") if a.strip()]
        except ValueError:
            raise ValueError(f"invalid axes {axes!r}; expected e.g. axes=1,2")
    else:
        axis_list = [1] if dim == 1 else [1, 2]
    if len(axis_list) not in (1, 2) or len(set(axis_list)) != len(axis_list):
        raise ValueError("axes must name one or two distinct dimensions")
    for a in axis_list:
        if not 1 <= a <= dim:
            raise ValueError(f"axis {a} out of range for dimension {dim}")
    if dim == 1 and axis_list != [1]:
        raise ValueError("a 1-D job has only axis 1")

    fixed_map: dict = {}
    if fixed.strip():
        for part in fixed.split(","):
            if not part.strip():
                continue
            try:
                d_str, i_str = part.split(":")
                d, i = int(d_str), int(i_str)
            except ValueError:
                raise ValueError(f"invalid fixed spec {part!r}; expected dim:index")
            fixed_map[d] = i
    missing = [d for d in range(1, dim + 1) if d not in axis_list and d not in fixed_map]
    if missing:
        raise ValueError(f"missing node indices for dimensions {missing}; pass fixed=d:i")
    for d, i in fixed_map.items():
        if d in axis_list:
            raise ValueError(f"dimension {d} is both an axis and fixed")
        if not 1 <= d <= dim:
            raise ValueError(f"fixed dimension {d} out of range")
    return axis_list, fixed_map
