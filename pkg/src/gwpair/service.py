"""HTTP service: assessment sessions, simulation runs, metrics reports.

Simulation runs are asynchronous (202 + polling) and live on the
filesystem under the runs directory; assessment sessions are in-memory and
independent. Everything is exercisable with the scripted provider, so the
whole surface works without network egress.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException, Response
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel

from .assessment import DONE, AssessmentSession, Scenario, load_scenario_pool
from .config import RunConfig
from .errors import ConfigError, GwpairError
from .ingest import infer_profile, parse_csv
from .memory import MemoryStore
from .agent import AgentState
from .simulator import build_context, event_to_json, run_event
from .types import DatingAttributes, PersonalityProfile
from .workspace import write_trace_jsonl


class ChoiceBody(BaseModel):
    option_index: int
    free_text: str | None = None
    event_id: str | None = None


class SimulationBody(BaseModel):
    config: dict = {}
    participants: list[dict] | None = None
    participants_csv: str | None = None


@dataclass
class AssessmentHandle:
    session: AssessmentSession
    current: Scenario | None
    done: bool = False
    events: list[dict] = field(default_factory=list)
    seen_event_ids: dict[str, dict] = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)


@dataclass
class SimulationRun:
    status: str = "queued"  # queued | running | done | failed
    progress: float = 0.0
    error: str = ""
    results_path: str = ""
    traces_path: str = ""


def _scenario_view(scenario: Scenario | None, handle: AssessmentHandle) -> dict | None:
    if scenario is None:
        return None
    return {
        "id": scenario.id,
        "prompt": scenario.prompt,
        "options": list(scenario.options),
        "has_follow_up": bool(scenario.follow_up_template),
        "follow_up_template": scenario.follow_up_template,
        "progress": {
            "scenarios_seen": handle.session.state.scenarios_seen,
            "max_scenarios": handle.session.config.max_scenarios,
        },
    }


def participants_to_agents(entries: list[dict], provider) -> list[AgentState]:
    agents = []
    for entry in entries:
        profile = PersonalityProfile(**entry.get("traits", {}))
        attrs = DatingAttributes(
            self_ratings=dict(entry["self_ratings"]),
            importance=dict(entry["importance"]),
        )
        agents.append(
            AgentState(
                agent_id=str(entry["agent_id"]),
                profile=profile,
                attributes=attrs,
                gender=entry.get("gender", ""),
                memory=MemoryStore(provider=provider),
            )
        )
    return agents


def agents_from_csv(path: str, provider) -> list[AgentState]:
    records, rejections = parse_csv(path)
    if rejections:
        raise ConfigError(
            f"{len(rejections)} invalid rows, first: row {rejections[0].row}: {rejections[0].reason}"
        )
    agents = []
    for record in records:
        agents.append(
            AgentState(
                agent_id=record.participant_id,
                profile=infer_profile(record),
                attributes=DatingAttributes(
                    self_ratings=dict(record.self_ratings),
                    importance=dict(record.importance_t1),
                ),
                gender=record.gender,
                memory=MemoryStore(provider=provider),
            )
        )
    return agents


def create_app(
    provider_factory=None,
    runs_dir: str | None = None,
    scenario_pool_path: str | None = None,
    ui_dir: str | None = None,
) -> FastAPI:
    """Build the service. ``provider_factory()`` must return a provider;
    by default it builds the scripted provider from an empty RunConfig."""
    app = FastAPI(title="gwpair")
    runs_root = Path(runs_dir or "runs")
    assessments: dict[str, AssessmentHandle] = {}
    simulations: dict[str, SimulationRun] = {}

    if provider_factory is None:
        provider_factory = lambda: RunConfig(provider={"kind": "scripted", "seed": 0}).make_provider()

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/assessments", status_code=201)
    def create_assessment():
        try:
            provider = provider_factory()
        except GwpairError as exc:
            raise HTTPException(status_code=503, detail=f"provider unavailable: {exc}")
        session = AssessmentSession(provider, pool=load_scenario_pool(scenario_pool_path))
        handle = AssessmentHandle(session=session, current=None)
        handle.current = session.start()
        session_id = uuid.uuid4().hex
        assessments[session_id] = handle
        return {"session_id": session_id, "scenario": _scenario_view(handle.current, handle)}

    def _handle_or_404(session_id: str) -> AssessmentHandle:
        if session_id not in assessments:
            raise HTTPException(status_code=404, detail="unknown assessment session")
        return assessments[session_id]

    @app.post("/assessments/{session_id}/choice")
    def post_choice(session_id: str, body: ChoiceBody):
        handle = _handle_or_404(session_id)
        with handle.lock:
            if body.event_id and body.event_id in handle.seen_event_ids:
                return handle.seen_event_ids[body.event_id]
            if handle.done:
                raise HTTPException(status_code=409, detail="session is done")
            scenario = handle.current
            if not 0 <= body.option_index < len(scenario.options):
                raise HTTPException(
                    status_code=422,
                    detail=f"option_index {body.option_index} out of range "
                    f"(scenario has {len(scenario.options)} options)",
                )
            advanced = handle.session.submit(body.option_index, body.free_text)
            handle.events.append(
                {
                    "event_id": body.event_id,
                    "scenario_id": scenario.id,
                    "option_index": body.option_index,
                    "free_text": body.free_text,
                }
            )
            if advanced == DONE:
                handle.done = True
                handle.current = None
            else:
                handle.current = advanced
            response = {
                "profile": handle.session.state.display_profile(),
                "done": handle.done,
                "scenario": _scenario_view(handle.current, handle),
            }
            if body.event_id:
                handle.seen_event_ids[body.event_id] = response
            return response

    @app.get("/assessments/{session_id}/profile")
    def get_profile(session_id: str):
        handle = _handle_or_404(session_id)
        profile, display = handle.session.finalize() if handle.done else (None, None)
        return {
            "profile": handle.session.state.display_profile(),
            "done": handle.done,
            "final": display,
            "core": profile.as_dict() if profile else None,
        }

    @app.get("/assessments/{session_id}/events")
    def get_events(session_id: str):
        handle = _handle_or_404(session_id)
        return {"events": handle.events}

    def _run_simulation(run_id: str, config: RunConfig, body: SimulationBody) -> None:
        run = simulations[run_id]
        run.status = "running"
        try:
            provider = config.make_provider()
            if body.participants:
                agents = participants_to_agents(body.participants, provider)
            elif body.participants_csv:
                agents = agents_from_csv(body.participants_csv, provider)
            else:
                raise ConfigError("participants (inline) or participants_csv required")
            ctx = build_context(config.context)

            def progress(fraction: float) -> None:
                run.progress = fraction

            result = run_event(
                agents,
                ctx,
                provider,
                config.cognitive_config(),
                batch_size=config.batch_size,
                threshold=config.threshold,
                workers=config.workers,
                full_final_round=config.full_final_round,
                progress=progress,
            )
            run_dir = runs_root / run_id
            run_dir.mkdir(parents=True, exist_ok=True)
            results_path = run_dir / "results.json"
            with open(results_path, "w", encoding="utf-8") as fh:
                json.dump(event_to_json(result), fh, sort_keys=True, indent=2)
            traces_path = run_dir / "traces.jsonl"
            with open(traces_path, "w", encoding="utf-8") as fh:
                write_trace_jsonl(result.all_traces(), fh)
            run.results_path = str(results_path)
            run.traces_path = str(traces_path)
            run.progress = 1.0
            run.status = "done"
        except Exception as exc:  # failures surface through the status poll
            run.status = "failed"
            run.error = str(exc)

    @app.post("/simulations", status_code=202)
    def post_simulation(body: SimulationBody):
        try:
            config = RunConfig.from_dict(body.config)
        except (ConfigError, TypeError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        if not body.participants and not body.participants_csv:
            raise HTTPException(status_code=422, detail="participants required")
        run_id = uuid.uuid4().hex
        simulations[run_id] = SimulationRun()
        thread = threading.Thread(
            target=_run_simulation, args=(run_id, config, body), daemon=True
        )
        thread.start()
        return {"run_id": run_id}

    def _run_or_404(run_id: str) -> SimulationRun:
        if run_id not in simulations:
            raise HTTPException(status_code=404, detail="unknown run")
        return simulations[run_id]

    @app.get("/simulations/{run_id}")
    def get_simulation(run_id: str):
        run = _run_or_404(run_id)
        return {"status": run.status, "progress": run.progress, "error": run.error}

    @app.get("/simulations/{run_id}/results")
    def get_results(run_id: str):
        run = _run_or_404(run_id)
        if run.status != "done":
            raise HTTPException(status_code=409, detail=f"run is {run.status}")
        with open(run.results_path, "r", encoding="utf-8") as fh:
            return Response(content=fh.read(), media_type="application/json")

    @app.get("/simulations/{run_id}/traces")
    def get_traces(run_id: str):
        run = _run_or_404(run_id)
        if run.status != "done":
            raise HTTPException(status_code=409, detail=f"run is {run.status}")
        with open(run.traces_path, "r", encoding="utf-8") as fh:
            return PlainTextResponse(fh.read(), media_type="application/jsonl")

    if ui_dir and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
