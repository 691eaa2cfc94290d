"""HTTP API for the explorer frontend and programmatic clients.

/api/simulate is synchronous and stateless (seeded per request); /api/fit
runs as a background job polled via /api/jobs/{id} because fits take
minutes.  Simulation responses are the canonical trace serialization, so
the CLI and the HTTP path emit byte-identical traces for equal inputs.
"""

from __future__ import annotations

import json
import queue
import threading
import uuid
from importlib import resources

from fastapi import FastAPI, HTTPException, Response
from pydantic import BaseModel, Field

from . import bench as bench_mod
from . import optimizer as opt
from .env import EnvConfig, EnvError, RewardParams
from .keyboard import builtin_layout_names, load_builtin_layout
from .mechanisms import ParamError, UserParams
from .metrics import aggregate, report
from .supervisor import PolicyError, PolicyParams, run_episode
from .traces import dumps_trace


class SimulateRequest(BaseModel):
    user_params: dict = Field(default_factory=dict)
    policy_params: dict = Field(default_factory=dict)
    reward_params: dict = Field(default_factory=dict)
    phrase: str
    layout: str = "qwerty_en"
    level: int = 1
    seed: int = 0
    episodes: int = 1


class FitRequest(BaseModel):
    group: str = "young_adults"
    outer: int = 4
    inner: int = 6
    outer_init: int = 4
    inner_init: int = 6
    episodes: int = 40
    seed: int = 0


class JobRunner:
    """One worker thread; fits are sequential by design."""

    def __init__(self):
        self.jobs: dict[str, dict] = {}
        self.queue: queue.Queue = queue.Queue()
        self.thread = threading.Thread(target=self._loop, daemon=True)
        self.thread.start()

    def submit(self, fn) -> str:
        job_id = uuid.uuid4().hex[:12]
        self.jobs[job_id] = {"status": "queued", "result": None, "error": None}
        self.queue.put((job_id, fn))
        return job_id

    def _loop(self):
        while True:
            job_id, fn = self.queue.get()
            job = self.jobs[job_id]
            job["status"] = "running"
            try:
                job["result"] = fn()
                job["status"] = "done"
            except Exception as exc:  # noqa: BLE001 - reported to the poller
                job["error"] = str(exc)
                job["status"] = "failed"


def _field_error(exc: Exception) -> HTTPException:
    field = getattr(exc, "field", None)
    detail = [{"loc": ["body", field] if field else ["body"],
               "msg": str(exc), "type": "value_error"}]
    return HTTPException(status_code=422, detail=detail)


def _build_params(req: SimulateRequest):
    try:
        up = UserParams.from_dict({**UserParams().to_dict(), **req.user_params})
        pp = PolicyParams.from_dict({**PolicyParams().to_dict(),
                                     **req.policy_params})
        rp = RewardParams.from_dict({**RewardParams().to_dict(),
                                     **req.reward_params})
    except (ParamError, PolicyError, EnvError, TypeError) as exc:
        raise _field_error(exc) from None
    return up, pp, rp


def create_app() -> FastAPI:
    app = FastAPI(title="typesim", version="1")
    jobs = JobRunner()

    @app.get("/api/health")
    def health():
        return {"status": "ok"}

    @app.get("/api/layouts")
    def layouts():
        return builtin_layout_names()

    @app.get("/api/layouts/{name}")
    def layout(name: str):
        try:
            return load_builtin_layout(name).to_dict()
        except ValueError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from None

    @app.get("/api/params/defaults")
    def param_defaults():
        bounds = json.loads(resources.files("typesim.data")
                            .joinpath("param_bounds.json")
                            .read_text(encoding="utf-8"))
        return {
            "user_params": {
                name: {"default": UserParams().to_dict()[name],
                       "min": lo, "max": hi}
                for name, (lo, hi) in bounds["user_params"].items()},
            "policy_params": {
                name: {"default": float(PolicyParams().to_dict()[name]),
                       "min": lo, "max": hi}
                for name, (lo, hi) in bounds["policy_params"].items()},
            "reward_params": {
                name: {"default": RewardParams().to_dict()[name],
                       "min": lo, "max": hi}
                for name, (lo, hi) in bounds["reward_params"].items()},
        }

    @app.post("/api/simulate")
    def simulate(req: SimulateRequest):
        up, pp, rp = _build_params(req)
        try:
            layout_obj = load_builtin_layout(req.layout)
            dictionary = (bench_mod.builtin_dictionary()
                          if req.level == 2 else None)
            config = EnvConfig(layout=layout_obj, phrase=req.phrase,
                               level=req.level,
                               autocorrect_dictionary=dictionary)
        except (EnvError, ValueError) as exc:
            raise _field_error(exc) from None
        import numpy as np
        seeds = ([req.seed] if req.episodes <= 1 else
                 [int(s) for s in np.random.default_rng(req.seed)
                  .integers(0, 2 ** 62, req.episodes)])
        try:
            traces = [run_episode(config, up, pp, rp, s) for s in seeds]
        except (PolicyError, EnvError, ValueError) as exc:
            raise _field_error(exc) from None
        if req.episodes <= 1:
            # canonical trace bytes, identical to the CLI's JSONL line
            return Response(content=dumps_trace(traces[0]),
                            media_type="application/json")
        stats = aggregate([report(tr) for tr in traces])
        body = {
            "traces": [json.loads(dumps_trace(tr)) for tr in traces],
            "aggregate": {k: {"mean": v[0], "sd": v[1]}
                          for k, v in stats.items()},
        }
        return body

    @app.post("/api/fit", status_code=202)
    def fit(req: FitRequest):
        targets = {t.group: t for t in bench_mod.load_builtin_targets()}
        if req.group not in targets:
            raise HTTPException(status_code=422,
                                detail=f"unknown group {req.group!r}")
        chosen = targets[req.group]

        def job():
            spec = opt.ObjectiveSpec(
                targets={m: opt.TargetDist(mean=s.mean,
                                           sd=s.effective_sd() or 0.0)
                         for m, s in chosen.metrics.items()},
                n_episodes=max(30, req.episodes))
            sim = opt.SimSetup(
                layout=load_builtin_layout("qwerty_en"),
                phrases=bench_mod.builtin_phrases(),
                level=chosen.level,
                dictionary=(bench_mod.builtin_dictionary()
                            if chosen.level == 2 else None))
            return opt.fit_joint(
                spec, sim, opt.Budget(req.outer_init, req.outer),
                opt.Budget(req.inner_init, req.inner), req.seed)

        job_id = jobs.submit(job)
        return {"job_id": job_id, "poll": f"/api/jobs/{job_id}"}

    @app.get("/api/jobs/{job_id}")
    def job_status(job_id: str):
        job = jobs.jobs.get(job_id)
        if job is None:
            raise HTTPException(status_code=404, detail="unknown job id")
        return job

    return app
