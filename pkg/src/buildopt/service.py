"""HTTP/JSON service exposing the optimization engine.

Long computations (Pareto sweeps, area sweeps) run as asynchronous jobs:
the POST returns a job id immediately and clients poll ``GET /jobs/{id}``
for progress and the immutable result.  Jobs are identified by a
fingerprint of the canonicalized request, so re-posting an identical
request reuses the existing job and its cached result.

Scenario documents are validated by ``POST /scenario``; an impossible
scenario (say, every roof material excluded) is rejected with a 422 and a
diagnostic naming the emptied class.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Any

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from .materials import CatalogError, default_catalog
from .pareto import (
    epsilon_constraint_front,
    floor_area_front,
    front_to_csv,
    front_to_dict,
    price_shift_payload,
)
from .search import Enumerator, load_scenario
from .serialize import canonical_json, sha_fingerprint
from .pareto import design_to_dict


class ScenarioBody(BaseModel):
    exclude_materials: list[str] = Field(default_factory=list)
    param_overrides: dict[str, float] = Field(default_factory=dict)
    rules: dict[str, Any] = Field(default_factory=dict)
    solver: dict[str, Any] = Field(default_factory=dict)

    def as_doc(self) -> dict:
        return {
            "exclude_materials": self.exclude_materials,
            "param_overrides": self.param_overrides,
            "rules": self.rules,
            "solver": self.solver,
        }


class SolveBody(BaseModel):
    scenario: ScenarioBody = Field(default_factory=ScenarioBody)
    budget: float | None = None


class ParetoBody(BaseModel):
    scenario: ScenarioBody = Field(default_factory=ScenarioBody)
    budget_min: float = 4500.0
    budget_max: float = 9000.0
    steps: int = 150


class AreaSweepBody(BaseModel):
    scenario: ScenarioBody = Field(default_factory=ScenarioBody)
    budget: float = 7000.0
    area_min: float = 10.0
    area_max: float = 14.0
    steps: int = 60


class PriceWhatIfBody(BaseModel):
    front: dict | None = None     # a front payload, or
    job_id: str | None = None     # the id of a completed front job
    material: str
    price: float
    component_class: str | None = None


@dataclass
class Job:
    id: str
    kind: str
    fingerprint: str
    status: str = "queued"  # queued | running | done | infeasible | failed
    progress: dict = dc_field(default_factory=lambda: {"done": 0, "total": 0})
    result: dict | None = None
    error: str | None = None
    created: float = dc_field(default_factory=time.time)
    elapsed: float | None = None

    def public(self) -> dict:
        out = {
            "id": self.id,
            "kind": self.kind,
            "scenario_fingerprint": self.fingerprint,
            "status": self.status,
            "progress": self.progress,
        }
        if self.result is not None:
            out["result"] = self.result
        if self.error is not None:
            out["error"] = self.error
        if self.elapsed is not None:
            out["elapsed_s"] = round(self.elapsed, 3)
        return out


class JobStore:
    """Concurrent job map; results are append-only."""

    def __init__(self) -> None:
        self._jobs: dict[str, Job] = {}
        self._lock = threading.Lock()

    def get_or_create(self, job_id: str, kind: str, fingerprint: str
                      ) -> tuple[Job, bool]:
        with self._lock:
            if job_id in self._jobs:
                return self._jobs[job_id], False
            job = Job(id=job_id, kind=kind, fingerprint=fingerprint)
            self._jobs[job_id] = job
            return job, True

    def get(self, job_id: str) -> Job | None:
        with self._lock:
            return self._jobs.get(job_id)


def _load_scenario_or_422(doc: dict):
    try:
        return load_scenario(doc)
    except (CatalogError, KeyError, ValueError) as exc:
        raise HTTPException(status_code=422, detail=str(exc))


def create_app(state_dir: str | Path | None = None,
               workers: int | None = None) -> FastAPI:
    app = FastAPI(title="buildopt service", version="0.1.0")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
        allow_headers=["*"],
    )
    store = JobStore()
    root = Path(state_dir) if state_dir is not None else None
    if root is not None:
        (root / "scenarios").mkdir(parents=True, exist_ok=True)
        (root / "results").mkdir(parents=True, exist_ok=True)

    def persist(job: Job, front_payload: dict | None, csv_text: str | None,
                meta: dict) -> None:
        if root is None:
            return
        out = root / "results" / job.fingerprint
        out.mkdir(parents=True, exist_ok=True)
        if front_payload is not None:
            (out / "front.json").write_text(canonical_json(front_payload))
        if csv_text is not None:
            (out / "front.csv").write_text(csv_text)
        (out / "meta.json").write_text(canonical_json(meta))

    def launch(kind: str, body_doc: dict, runner) -> dict:
        request_key = canonical_json({"kind": kind, "body": body_doc})
        job_id = sha_fingerprint(request_key)
        scenario = _load_scenario_or_422(body_doc.get("scenario", {}))
        job, fresh = store.get_or_create(job_id, kind, scenario.fingerprint())
        if not fresh:
            return job.public()

        def work():
            t0 = time.time()
            job.status = "running"
            try:
                runner(job, scenario)
            except Exception as exc:  # surfaced through the job record
                job.status = "failed"
                job.error = f"{type(exc).__name__}: {exc}"
            job.elapsed = time.time() - t0

        threading.Thread(target=work, daemon=True).start()
        return job.public()

    @app.get("/materials")
    def materials() -> dict:
        cat = default_catalog()
        return {
            "materials": [
                {
                    "name": m.name,
                    "grade": m.grade,
                    "class": m.component_class.value,
                    "density_kg_m3": m.density,
                    "cost_usd_m3": m.unit_cost,
                    "ee_MJ_kg": m.embodied_energy,
                    "sigma_allw_MPa": m.compressive_strength,
                    "min_thickness_m": m.min_thickness,
                }
                for m in cat.entries
            ]
        }

    @app.post("/scenario")
    def scenario(body: ScenarioBody) -> dict:
        sc = _load_scenario_or_422(body.as_doc())
        fp = sc.fingerprint()
        if root is not None:
            (root / "scenarios" / f"{fp}.json").write_text(
                canonical_json(body.as_doc())
            )
        return {"fingerprint": fp, "materials": list(sc.catalog.names)}

    @app.post("/solve")
    def solve(body: SolveBody) -> dict:
        def runner(job: Job, sc):
            job.progress = {"done": 0, "total": 1}
            engine = Enumerator(sc, workers=workers)
            design = engine.solve_minlp(budget=body.budget)
            job.progress = {"done": 1, "total": 1}
            if design is None:
                job.status = "infeasible"
                job.result = {
                    "status": "infeasible",
                    "diagnostic": _infeasibility_diagnostic(engine, body.budget),
                }
                return
            job.result = {"status": "ok", "design": design_to_dict(design)}
            job.status = "done"
            persist(job, None, None,
                    {"kind": "solve", "budget": body.budget,
                     "fingerprint": job.fingerprint,
                     "seed": design.provenance.seed,
                     "starts": design.provenance.starts,
                     "engine": design.provenance.engine})

        return launch("solve", body.model_dump(), runner)

    @app.post("/pareto")
    def pareto(body: ParetoBody) -> dict:
        def runner(job: Job, sc):
            engine = Enumerator(sc, workers=workers)

            def progress(done: int, total: int) -> None:
                job.progress = {"done": done, "total": total}

            front = epsilon_constraint_front(
                engine, body.budget_min, body.budget_max, body.steps,
                progress=progress,
            )
            payload = front_to_dict(front)
            job.result = {"status": "ok", "front": payload}
            job.status = "done" if front.points else "infeasible"
            persist(job, payload, front_to_csv(front),
                    {"kind": "pareto", "budget_min": body.budget_min,
                     "budget_max": body.budget_max, "steps": body.steps,
                     "fingerprint": job.fingerprint,
                     "solver": {"starts": sc.solver.starts,
                                "seed": sc.solver.seed,
                                "tol": sc.solver.tol}})

        return launch("pareto", body.model_dump(), runner)

    @app.post("/area-sweep")
    def area_sweep(body: AreaSweepBody) -> dict:
        def runner(job: Job, sc):
            engine = Enumerator(sc, workers=workers)

            def progress(done: int, total: int) -> None:
                job.progress = {"done": done, "total": total}

            front = floor_area_front(
                engine, body.budget, body.area_min, body.area_max, body.steps,
                progress=progress,
            )
            payload = front_to_dict(front)
            job.result = {"status": "ok", "front": payload}
            job.status = "done" if front.points else "infeasible"
            persist(job, payload, front_to_csv(front),
                    {"kind": "area_sweep", "budget": body.budget,
                     "area_min": body.area_min, "area_max": body.area_max,
                     "steps": body.steps, "fingerprint": job.fingerprint})

        return launch("area_sweep", body.model_dump(), runner)

    @app.post("/price-what-if")
    def price_what_if(body: PriceWhatIfBody) -> dict:
        if (body.front is None) == (body.job_id is None):
            raise HTTPException(
                status_code=400,
                detail="pass exactly one of front, job_id",
            )
        if body.job_id is not None:
            job = store.get(body.job_id)
            if job is None:
                raise HTTPException(status_code=404, detail="unknown job")
            if job.status != "done" or "front" not in (job.result or {}):
                raise HTTPException(
                    status_code=422, detail="job holds no completed front"
                )
            payload = job.result["front"]
        else:
            payload = body.front
        try:
            shifted = price_shift_payload(
                payload, default_catalog(), body.material, body.price,
                body.component_class,
            )
        except (CatalogError, ValueError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return {"status": "ok", "front": shifted}

    @app.get("/jobs/{job_id}")
    def job_status(job_id: str) -> dict:
        job = store.get(job_id)
        if job is None:
            raise HTTPException(status_code=404, detail="unknown job")
        return job.public()

    return app


def _infeasibility_diagnostic(engine: Enumerator, budget: float | None) -> str:
    if budget is not None and budget <= 0:
        return "budget admits no design (every candidate costs more)"
    if budget is not None:
        unbounded = engine.solve_minlp(budget=None)
        if unbounded is not None:
            return "budget below the minimum attainable cost"
    return "no discrete candidate admits a feasible geometry"


def run(host: str = "127.0.0.1", port: int = 8080,
        state_dir: str | None = None, workers: int | None = None) -> None:
    import uvicorn

    uvicorn.run(create_app(state_dir=state_dir, workers=workers),
                host=host, port=port)
