"""JSON-over-HTTP session service for live schedules.

Sessions are event-sourced: a scenario seeds a baseline, each accepted
mutation (commit or undo) appends an event and bumps the revision by one,
and replaying the event list against the scenario reproduces the current
schedule. Previews run the same insertion without touching state.
Optimistic concurrency: a request may carry the revision it was computed
against; a mismatch is rejected as a conflict, never merged.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from fastapi import Body, FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware

from .costing import CostReport, global_cost, money_to_jsonable, report_to_jsonable
from .domain import Schedule, Task, ValidationError, timepoint_to_iso
from .scheduler import InsertionPolicy, InsertionResult, insert_dynamic
from .scenario_io import (
    Scenario,
    dynamic_task_from_jsonable,
    parse_scenario,
    scenario_to_jsonable,
    schedule_scenario,
    schedule_to_jsonable,
    task_to_jsonable,
)


@dataclass
class Session:
    """One live scheduling session."""

    id: str
    scenario: Scenario
    baseline_report: CostReport
    unassigned: tuple[str, ...]
    stack: list[Schedule]
    events: list[dict] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)

    @property
    def revision(self) -> int:
        return len(self.events)

    @property
    def current(self) -> Schedule:
        return self.stack[-1]


class Conflict(Exception):
    pass


class SessionStore:
    """In-memory sessions with an optional append-only JSONL event log."""

    def __init__(self, event_log: str | os.PathLike[str] | None = None):
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()
        self._counter = 0
        self._event_log = Path(event_log) if event_log else None
        self._replaying = False
        if self._event_log and self._event_log.exists():
            self._restore()

    def create(self, scenario: Scenario, *, sid: str | None = None) -> Session:
        schedule, assignment = schedule_scenario(scenario)
        report = global_cost(schedule, scenario.cost_params)
        with self._lock:
            if sid is None:
                self._counter += 1
                sid = f"s{self._counter}"
            elif sid in self._sessions:
                raise ValidationError(f"session id {sid!r} already exists")
            else:
                digits = sid[1:]
                if sid.startswith("s") and digits.isdigit():
                    self._counter = max(self._counter, int(digits))
            session = Session(
                id=sid,
                scenario=scenario,
                baseline_report=report,
                unassigned=assignment.unassigned,
                stack=[schedule],
            )
            self._sessions[sid] = session
        self._log({"event": "create", "session": sid, "scenario": scenario_to_jsonable(scenario)})
        return session

    def get(self, sid: str) -> Session:
        with self._lock:
            session = self._sessions.get(sid)
        if session is None:
            raise KeyError(sid)
        return session

    def insert(
        self,
        session: Session,
        task: Task,
        *,
        mode: str,
        policy: InsertionPolicy | None = None,
        expected_revision: int | None = None,
    ) -> tuple[InsertionResult, CostReport, int]:
        """Run one insertion; commit mode advances the session."""
        chosen = policy or session.scenario.policy
        with session.lock:
            if expected_revision is not None and expected_revision != session.revision:
                raise Conflict(
                    f"revision {expected_revision} is stale; session is at {session.revision}"
                )
            result = insert_dynamic(session.current, task, session.scenario.resources, chosen)
            report = global_cost(result.schedule, session.scenario.cost_params)
            if mode == "preview":
                return result, report, session.revision
            session.stack.append(result.schedule)
            session.events.append(
                {
                    "event": "commit",
                    "session": session.id,
                    "task": task_to_jsonable(session.scenario.epoch, task),
                    "policy": chosen.value,
                }
            )
            revision = session.revision
        self._log(session.events[-1])
        return result, report, revision

    def undo(self, session: Session) -> int:
        with session.lock:
            if len(session.stack) < 2:
                raise Conflict("nothing to undo")
            session.stack.pop()
            session.events.append({"event": "undo", "session": session.id})
            revision = session.revision
        self._log(session.events[-1])
        return revision

    def next_dynamic_id(self, session: Session) -> str:
        used = {t.id for t in session.current.tasks} | {t.id for t in session.scenario.dynamic_tasks}
        n = sum(1 for t in session.current.tasks if t.kind.value == "dynamic") + 1
        while f"TD{n}" in used:
            n += 1
        return f"TD{n}"

    def _log(self, record: Mapping[str, object]) -> None:
        if self._event_log is None or self._replaying:
            return
        with self._event_log.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(record, sort_keys=True, ensure_ascii=False) + "\n")

    def _restore(self) -> None:
        self._replaying = True
        try:
            with self._event_log.open(encoding="utf-8") as fh:
                for lineno, line in enumerate(fh, start=1):
                    if not line.strip():
                        continue
                    try:
                        record = json.loads(line)
                    except json.JSONDecodeError as exc:
                        raise ValidationError(
                            f"bad event log line: {exc}", path=str(self._event_log), line=lineno
                        ) from None
                    self._apply(record)
        finally:
            self._replaying = False

    def _apply(self, record: Mapping[str, object]) -> None:
        kind = record.get("event")
        sid = record.get("session")
        if kind == "create":
            scenario = parse_scenario(
                json.dumps(record["scenario"]), "json", path="event-log"
            )
            self.create(scenario, sid=str(sid))
            return
        session = self.get(str(sid))
        if kind == "commit":
            task = dynamic_task_from_jsonable(
                session.scenario.epoch,
                record["task"],
                session.scenario.horizon[1],
                path="event-log",
            )
            policy = InsertionPolicy(record.get("policy", session.scenario.policy.value))
            self.insert(session, task, mode="commit", policy=policy)
        elif kind == "undo":
            self.undo(session)
        else:
            raise ValidationError(f"unknown event {kind!r} in log")


def _session_summary(session: Session) -> dict:
    report = _current_report(session)
    return {
        "id": session.id,
        "revision": session.revision,
        "totals": _totals(report),
        "gain": money_to_jsonable(_gain(session, report)),
        "unassigned": list(session.unassigned),
        "placement_count": len(session.current.placements),
        "window_count": len([g for g in report.window_rows if g.minutes > 0]),
    }


def _current_report(session: Session) -> CostReport:
    return global_cost(session.current, session.scenario.cost_params)


def _totals(report: CostReport) -> dict:
    return {
        "lost_cost": money_to_jsonable(report.total_window_cost),
        "task_cost": money_to_jsonable(report.total_task_cost),
        "global_cost": money_to_jsonable(report.global_cost),
        "currency_label": report.currency_label,
    }


def _gain(session: Session, report: CostReport):
    return session.baseline_report.total_window_cost - report.total_window_cost


def _assignment_view(schedule: Schedule) -> dict:
    by_task = {p.task_id: p.resource_id for p in schedule.placements if p.resource_id}
    unassigned = [p.task_id for p in schedule.placements if p.resource_id is None]
    return {"by_task": dict(sorted(by_task.items())), "unassigned": unassigned}


def create_app(
    event_log: str | os.PathLike[str] | None = None,
    default_policy: InsertionPolicy = InsertionPolicy.FIRST_FIT,
) -> FastAPI:
    app = FastAPI(title="gapsched service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    store = SessionStore(event_log=event_log)
    app.state.store = store
    app.state.default_policy = default_policy

    def _session_or_404(sid: str) -> Session:
        try:
            return store.get(sid)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown session {sid!r}") from None

    @app.get("/healthz")
    def healthz() -> dict:
        return {"status": "ok"}

    @app.post("/sessions", status_code=201)
    def create_session(payload: dict = Body(...)) -> dict:
        scenario_obj = payload.get("scenario", payload)
        try:
            if isinstance(scenario_obj, str):
                scenario = parse_scenario(scenario_obj, "json", path="body.scenario")
            else:
                scenario = parse_scenario(
                    json.dumps(scenario_obj), "json", path="body.scenario"
                )
            session = store.create(scenario)
        except ValidationError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        return _session_summary(session)

    @app.get("/sessions/{sid}/schedule")
    def get_schedule(sid: str) -> dict:
        session = _session_or_404(sid)
        with session.lock:
            schedule = session.current
            revision = session.revision
        out = schedule_to_jsonable(schedule)
        out["assignment"] = _assignment_view(schedule)
        out["session"] = sid
        out["revision"] = revision
        return out

    @app.get("/sessions/{sid}/windows")
    def get_windows(sid: str) -> dict:
        session = _session_or_404(sid)
        with session.lock:
            schedule = session.current
            revision = session.revision
        snapshot = schedule_to_jsonable(schedule)
        return {
            "session": sid,
            "revision": revision,
            "windows": snapshot["windows"],
            "gap_rows": snapshot["gap_rows"],
        }

    @app.get("/sessions/{sid}/costs")
    def get_costs(sid: str) -> dict:
        session = _session_or_404(sid)
        with session.lock:
            stack = list(session.stack)
            revision = session.revision
        report = global_cost(stack[-1], session.scenario.cost_params)
        trend = [
            money_to_jsonable(
                global_cost(s, session.scenario.cost_params).total_window_cost
            )
            for s in stack
        ]
        return {
            "session": sid,
            "revision": revision,
            "report": report_to_jsonable(report),
            "totals": _totals(report),
            "baseline": _totals(session.baseline_report),
            "gain": money_to_jsonable(_gain(session, report)),
            "trend": trend,
        }

    @app.post("/sessions/{sid}/tasks")
    def post_task(
        sid: str,
        payload: dict = Body(...),
        mode: str = Query("commit"),
    ) -> dict:
        if mode not in ("commit", "preview"):
            raise HTTPException(status_code=422, detail=f"unknown mode {mode!r}")
        session = _session_or_404(sid)
        task_obj = dict(payload.get("task", payload))
        expected_revision = payload.get("revision")
        if expected_revision is not None and not isinstance(expected_revision, int):
            raise HTTPException(status_code=422, detail="revision must be an integer")
        policy = None
        policy_text = payload.get("policy")
        if policy_text is not None:
            try:
                policy = InsertionPolicy(policy_text)
            except ValueError:
                raise HTTPException(
                    status_code=422, detail=f"unknown policy {policy_text!r}"
                ) from None
        task_obj.setdefault("id", store.next_dynamic_id(session))
        try:
            task = dynamic_task_from_jsonable(
                session.scenario.epoch,
                task_obj,
                session.scenario.horizon[1],
                path="body.task",
            )
            result, report, revision = store.insert(
                session,
                task,
                mode=mode,
                policy=policy,
                expected_revision=expected_revision,
            )
        except Conflict as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from None
        except ValidationError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        placement = result.placement
        epoch = session.scenario.epoch
        return {
            "session": sid,
            "mode": mode,
            "revision": revision,
            "task_id": task.id,
            "window_index": result.window_index,
            "appended": result.appended,
            "t1": placement.t1,
            "t2": placement.t2,
            "start_minute": placement.start,
            "end_minute": placement.end,
            "start": timepoint_to_iso(epoch, placement.start),
            "end": timepoint_to_iso(epoch, placement.end),
            "resource": placement.resource_id,
            "totals": _totals(report),
            "gain": money_to_jsonable(
                session.baseline_report.total_window_cost - report.total_window_cost
            ),
            "report": report_to_jsonable(report),
        }

    @app.post("/sessions/{sid}/undo")
    def undo(sid: str) -> dict:
        session = _session_or_404(sid)
        try:
            store.undo(session)
        except Conflict as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from None
        return _session_summary(session)

    return app


app = create_app(event_log=os.environ.get("GAPSCHED_EVENT_LOG"))
