"""Scenario file formats, embedded fixture assembly, and exports.

The canonical scenario format is JSON with ISO-8601 UTC timestamps and
exact rationals as text. CSV is a flat convenience import mirroring the
fixture table columns (N°, Durée, Début, Fin, Coût, Ressource, type),
tab-delimited, with decimal commas accepted. All emitters are
byte-deterministic: sorted keys, fixed formatting, trailing newline.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from datetime import datetime, timezone
from fractions import Fraction
from typing import Sequence

from . import fixtures
from .costing import CostReport, format_money, format_rational, money_to_jsonable
from .domain import (
    CostParams,
    Interval,
    Kind,
    Minutes,
    Money,
    Placement,
    Resource,
    Schedule,
    Task,
    ValidationError,
    iso_to_timepoint,
    overlaps,
    parse_utc,
    timepoint_to_iso,
)
from .fixtures import EXPECTED, FIXTURE_NAMES, FixtureExpected
from .scheduler import Assignment, InsertionPolicy, build_schedule, compute_gap_rows, compute_windows


@dataclass(frozen=True)
class Scenario:
    """A full problem statement: plan, resources, arrivals, pricing."""

    epoch: datetime
    horizon: Interval
    preventive_tasks: tuple[Task, ...]
    dynamic_tasks: tuple[Task, ...]
    resources: tuple[Resource, ...]
    cost_params: CostParams = CostParams()
    policy: InsertionPolicy = InsertionPolicy.FIRST_FIT

    def __post_init__(self) -> None:
        if self.horizon[0] > self.horizon[1]:
            raise ValidationError("horizon start must not exceed horizon end", path="horizon")
        seen: set[str] = set()
        for task in (*self.preventive_tasks, *self.dynamic_tasks):
            if task.id in seen:
                raise ValidationError(f"duplicate task id {task.id!r}", path=f"task[{task.id}]")
            seen.add(task.id)
        rids: set[str] = set()
        for r in self.resources:
            if r.id in rids:
                raise ValidationError(f"duplicate resource id {r.id!r}", path=f"resource[{r.id}]")
            rids.add(r.id)
        for task in self.preventive_tasks:
            if task.kind is not Kind.PREVENTIVE:
                raise ValidationError(
                    f"task {task.id!r} in the preventive list is {task.kind.value}",
                    path=f"task[{task.id}].kind",
                )
            if task.release < self.horizon[0] or task.release + task.duration > self.horizon[1]:
                raise ValidationError(
                    f"task {task.id!r} spans outside the horizon", path=f"task[{task.id}]"
                )
        for task in self.dynamic_tasks:
            if task.kind is not Kind.DYNAMIC:
                raise ValidationError(
                    f"task {task.id!r} in the dynamic list is {task.kind.value}",
                    path=f"task[{task.id}].kind",
                )
        ordered = sorted(self.preventive_tasks, key=lambda t: t.release)
        for a, b in zip(ordered, ordered[1:]):
            if overlaps((a.release, a.release + a.duration), (b.release, b.release + b.duration)):
                raise ValidationError(
                    f"preventive tasks {a.id!r} and {b.id!r} overlap", path=f"task[{b.id}]"
                )


@dataclass(frozen=True)
class FixtureBundle:
    """A fixture scenario plus its published outcome records."""

    name: str
    scenario: Scenario
    expected: FixtureExpected


def parse_scenario(text: str, format: str = "json", *, path: str | None = None) -> Scenario:
    """Parse and fully validate a scenario document."""
    fmt = format.lower()
    if fmt == "json":
        return _scenario_from_json(text, path=path)
    if fmt == "csv":
        return _scenario_from_csv(text, path=path)
    raise ValidationError(f"unknown format {format!r}; expected json or csv")


def serialize_scenario(scenario: Scenario) -> str:
    return json.dumps(scenario_to_jsonable(scenario), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def scenario_to_jsonable(scenario: Scenario) -> dict:
    epoch = scenario.epoch
    return {
        "epoch": timepoint_to_iso(epoch, 0),
        "horizon": _interval_to_jsonable(epoch, scenario.horizon),
        "cost_params": {
            "hourly_rate": scenario.cost_params.hourly_rate,
            "currency_label": scenario.cost_params.currency_label,
        },
        "policy": scenario.policy.value,
        "resources": [
            {
                "id": r.id,
                "competences": [format_rational(c) for c in r.competence_row],
                "busy": [_interval_to_jsonable(epoch, b) for b in r.busy],
            }
            for r in scenario.resources
        ],
        "preventive_tasks": [_task_to_jsonable(epoch, t) for t in scenario.preventive_tasks],
        "dynamic_tasks": [_task_to_jsonable(epoch, t) for t in scenario.dynamic_tasks],
    }


def _task_to_jsonable(epoch: datetime, task: Task) -> dict:
    return {
        "id": task.id,
        "title": task.title,
        "release": timepoint_to_iso(epoch, task.release),
        "due": timepoint_to_iso(epoch, task.due),
        "duration_minutes": task.duration,
        "earliness_penalty": task.earliness_penalty,
        "tardiness_penalty": task.tardiness_penalty,
        "base_cost": task.base_cost,
        "required_type": task.required_type,
    }


def _interval_to_jsonable(epoch: datetime, interval: Interval) -> dict:
    return {
        "start": timepoint_to_iso(epoch, interval[0]),
        "end": timepoint_to_iso(epoch, interval[1]),
    }


def _scenario_from_json(text: str, *, path: str | None = None) -> Scenario:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON: {exc}", path=path, line=exc.lineno) from None
    if not isinstance(obj, dict):
        raise ValidationError("scenario document must be a JSON object", path=path)
    epoch_text = _req(obj, "epoch", str, path, "epoch")
    epoch = parse_utc(epoch_text, path=_join(path, "epoch"))
    horizon_obj = _req(obj, "horizon", dict, path, "horizon")
    horizon = _interval_from_jsonable(epoch, horizon_obj, _join(path, "horizon"))
    params_obj = obj.get("cost_params", {})
    if not isinstance(params_obj, dict):
        raise ValidationError("cost_params must be an object", path=_join(path, "cost_params"))
    cost_params = CostParams(
        hourly_rate=_opt(params_obj, "hourly_rate", int, 100, path, "cost_params.hourly_rate"),
        currency_label=_opt(params_obj, "currency_label", str, "DHS", path, "cost_params.currency_label"),
    )
    policy_text = _opt(obj, "policy", str, InsertionPolicy.FIRST_FIT.value, path, "policy")
    try:
        policy = InsertionPolicy(policy_text)
    except ValueError:
        choices = ", ".join(p.value for p in InsertionPolicy)
        raise ValidationError(
            f"unknown policy {policy_text!r}; expected one of {choices}", path=_join(path, "policy")
        ) from None
    resources = tuple(
        _resource_from_jsonable(epoch, item, _join(path, f"resources[{i}]"))
        for i, item in enumerate(_req(obj, "resources", list, path, "resources"))
    )
    horizon_end = horizon[1]
    preventive = tuple(
        _task_from_jsonable(epoch, item, Kind.PREVENTIVE, horizon_end, _join(path, f"preventive_tasks[{i}]"))
        for i, item in enumerate(_req(obj, "preventive_tasks", list, path, "preventive_tasks"))
    )
    dynamic = tuple(
        _task_from_jsonable(epoch, item, Kind.DYNAMIC, horizon_end, _join(path, f"dynamic_tasks[{i}]"))
        for i, item in enumerate(obj.get("dynamic_tasks", []))
    )
    return Scenario(
        epoch=epoch,
        horizon=horizon,
        preventive_tasks=preventive,
        dynamic_tasks=dynamic,
        resources=resources,
        cost_params=cost_params,
        policy=policy,
    )


def dynamic_task_from_jsonable(
    epoch: datetime, obj: object, horizon_end: Minutes, *, path: str | None = None
) -> Task:
    """Parse a dynamic-task payload (wire shape shared with scenarios)."""
    return _task_from_jsonable(epoch, obj, Kind.DYNAMIC, horizon_end, path)


def task_to_jsonable(epoch: datetime, task: Task) -> dict:
    return _task_to_jsonable(epoch, task)


def _task_from_jsonable(
    epoch: datetime, obj: object, kind: Kind, horizon_end: Minutes, path: str | None
) -> Task:
    if not isinstance(obj, dict):
        raise ValidationError("task must be an object", path=path)
    task_id = _req(obj, "id", str, path, "id")
    release = 0
    if "release" in obj:
        release = iso_to_timepoint(epoch, _req(obj, "release", str, path, "release"), path=_join(path, "release"))
    elif kind is Kind.PREVENTIVE:
        raise ValidationError("preventive task needs a release date", path=_join(path, "release"))
    duration = obj.get("duration_minutes")
    due: Minutes | None = None
    if "due" in obj:
        due = iso_to_timepoint(epoch, _req(obj, "due", str, path, "due"), path=_join(path, "due"))
    if duration is None:
        if due is None:
            raise ValidationError("task needs duration_minutes or a due date", path=path)
        duration = due - release
    if not isinstance(duration, int) or isinstance(duration, bool):
        raise ValidationError("duration_minutes must be an integer", path=_join(path, "duration_minutes"))
    if due is None:
        due = max(horizon_end, release + duration)
    return Task(
        id=task_id,
        title=_opt(obj, "title", str, task_id, path, "title"),
        kind=kind,
        release=release,
        due=due,
        duration=duration,
        earliness_penalty=_opt(obj, "earliness_penalty", int, 0, path, "earliness_penalty"),
        tardiness_penalty=_opt(obj, "tardiness_penalty", int, 0, path, "tardiness_penalty"),
        base_cost=_opt(obj, "base_cost", int, 0, path, "base_cost"),
        required_type=_opt(obj, "required_type", int, 0, path, "required_type"),
    )


def _resource_from_jsonable(epoch: datetime, obj: object, path: str | None) -> Resource:
    if not isinstance(obj, dict):
        raise ValidationError("resource must be an object", path=path)
    rid = _req(obj, "id", str, path, "id")
    row = _req(obj, "competences", list, path, "competences")
    competences = tuple(rational_from_text(c, path=_join(path, f"competences[{i}]")) for i, c in enumerate(row))
    busy = tuple(
        _interval_from_tuple_jsonable(epoch, item, _join(path, f"busy[{i}]"))
        for i, item in enumerate(obj.get("busy", []))
    )
    return Resource(id=rid, competence_row=competences, busy=busy)


def _interval_from_jsonable(epoch: datetime, obj: object, path: str | None) -> Interval:
    if not isinstance(obj, dict):
        raise ValidationError("interval must be an object with start and end", path=path)
    start = iso_to_timepoint(epoch, _req(obj, "start", str, path, "start"), path=_join(path, "start"))
    end = iso_to_timepoint(epoch, _req(obj, "end", str, path, "end"), path=_join(path, "end"))
    return (start, end)


def _interval_from_tuple_jsonable(epoch: datetime, obj: object, path: str | None) -> Interval:
    interval = _interval_from_jsonable(epoch, obj, path)
    if interval[0] >= interval[1]:
        raise ValidationError("interval start must precede end", path=path)
    return interval


def rational_from_text(value: object, *, path: str | None = None) -> Fraction:
    if isinstance(value, bool):
        raise ValidationError(f"not a rational: {value!r}", path=path)
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.replace(",", "."))
        except (ValueError, ZeroDivisionError):
            raise ValidationError(f"not a rational: {value!r}", path=path) from None
    raise ValidationError(f"not a rational: {value!r}", path=path)


def _req(obj: dict, key: str, type_: type, path: str | None, field: str):
    if key not in obj:
        raise ValidationError(f"missing field {field!r}", path=path)
    value = obj[key]
    if not isinstance(value, type_) or (type_ is int and isinstance(value, bool)):
        raise ValidationError(f"field {field!r} must be {type_.__name__}", path=_join(path, field))
    return value


def _opt(obj: dict, key: str, type_: type, default, path: str | None, field: str):
    if key not in obj:
        return default
    return _req(obj, key, type_, path, field)


def _join(path: str | None, field: str) -> str:
    return f"{path}:{field}" if path else field


# CSV columns, in order: N°, Durée (hours), Début, Fin, Coût, Ressource, type.
_CSV_DATE_FORMATS = ("%d/%m/%y %H:%M", "%d/%m/%Y %H:%M")


def _scenario_from_csv(text: str, *, path: str | None = None) -> Scenario:
    rows = list(csv.reader(io.StringIO(text), delimiter="\t"))
    if not rows:
        raise ValidationError("empty CSV document", path=path)
    parsed: list[tuple[int, str, Minutes, datetime, datetime, str, Fraction, Kind]] = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not any(cell.strip() for cell in row):
            continue
        if len(row) < 7:
            raise ValidationError(f"expected 7 columns, got {len(row)}", path=path, line=lineno)
        ident, duree, debut, fin, _cost, ressource, kind_text = (cell.strip() for cell in row[:7])
        duration = _hours_to_minutes(duree, path=path, line=lineno)
        start = _parse_csv_date(debut, path=path, line=lineno)
        end = _parse_csv_date(fin, path=path, line=lineno)
        rid, note = _parse_resource_cell(ressource, path=path, line=lineno)
        kind = _parse_kind(kind_text, path=path, line=lineno)
        parsed.append((lineno, ident, duration, start, end, rid, note, kind))
    if not parsed:
        raise ValidationError("no task rows", path=path)
    epoch = min(item[3] for item in parsed)
    notes: dict[str, Fraction] = {}
    order: list[str] = []
    preventive: list[Task] = []
    dynamic: list[Task] = []
    end_max = 0
    for lineno, ident, duration, start, end, rid, note, kind in parsed:
        if rid in notes and notes[rid] != note:
            raise ValidationError(
                f"resource {rid!r} listed with notes {format_rational(notes[rid])} and {format_rational(note)}",
                path=path,
                line=lineno,
            )
        if rid not in notes:
            notes[rid] = note
            order.append(rid)
        release = _minutes_between(epoch, start, path=path, line=lineno)
        due = _minutes_between(epoch, end, path=path, line=lineno)
        if release >= due:
            raise ValidationError(f"row {ident!r} starts at or after its end", path=path, line=lineno)
        if due - release != duration:
            raise ValidationError(
                f"row {ident!r} spans {due - release} minutes but declares {duration}",
                path=path,
                line=lineno,
            )
        end_max = max(end_max, due)
        task = Task(id=ident, title=ident, kind=kind, release=release, due=due, duration=duration)
        (preventive if kind is Kind.PREVENTIVE else dynamic).append(task)
    resources = tuple(Resource(id=rid, competence_row=(notes[rid],)) for rid in order)
    return Scenario(
        epoch=epoch,
        horizon=(0, end_max),
        preventive_tasks=tuple(preventive),
        dynamic_tasks=tuple(dynamic),
        resources=resources,
    )


def _hours_to_minutes(text: str, *, path: str | None, line: int) -> Minutes:
    try:
        value = Fraction(text.replace(",", ".")) * 60
    except (ValueError, ZeroDivisionError):
        raise ValidationError(f"bad duration {text!r}", path=path, line=line) from None
    if value.denominator != 1 or value <= 0:
        raise ValidationError(f"duration {text!r} is not a positive whole number of minutes", path=path, line=line)
    return int(value)


def _parse_csv_date(text: str, *, path: str | None, line: int) -> datetime:
    for fmt in _CSV_DATE_FORMATS:
        try:
            return datetime.strptime(text, fmt).replace(tzinfo=timezone.utc)
        except ValueError:
            continue
    raise ValidationError(f"bad timestamp {text!r}; expected d/m/yy H:MM", path=path, line=line)


def _minutes_between(epoch: datetime, at: datetime, *, path: str | None, line: int) -> Minutes:
    delta = at - epoch
    seconds = delta.days * 86400 + delta.seconds
    if seconds % 60 != 0:
        raise ValidationError("timestamp is not on the minute grid", path=path, line=line)
    return seconds // 60


def _parse_resource_cell(text: str, *, path: str | None, line: int) -> tuple[str, Fraction]:
    if "=" not in text:
        raise ValidationError(f"bad resource cell {text!r}; expected id=note", path=path, line=line)
    rid, note_text = text.split("=", 1)
    rid = rid.strip()
    if not rid:
        raise ValidationError(f"bad resource cell {text!r}; empty id", path=path, line=line)
    return rid, rational_from_text(note_text.strip(), path=path)


def _parse_kind(text: str, *, path: str | None, line: int) -> Kind:
    lowered = text.lower()
    if lowered == "preventive":
        return Kind.PREVENTIVE
    if lowered in ("dynamique", "dynamic"):
        return Kind.DYNAMIC
    raise ValidationError(f"bad task type {text!r}", path=path, line=line)


def load_fixture(name: str) -> FixtureBundle:
    """Assemble an embedded fixture and its published expectations."""
    if name not in FIXTURE_NAMES:
        raise ValidationError(
            f"unknown fixture {name!r}; expected one of {', '.join(FIXTURE_NAMES)}"
        )
    epoch = parse_utc(fixtures.EPOCH_ISO)
    horizon = fixtures.HORIZON_MINUTES
    preventive = tuple(
        Task(id=tid, title=tid, kind=Kind.PREVENTIVE, release=release, due=due, duration=due - release)
        for tid, release, due in fixtures.PREVENTIVE_ROWS
    )
    dynamic = tuple(
        Task(id=tid, title=tid, kind=Kind.DYNAMIC, release=0, due=horizon[1], duration=duration)
        for tid, duration in fixtures.dynamic_rows(name)
    )
    resources = tuple(
        Resource(id=rid, competence_row=(Fraction(note),)) for rid, note in fixtures.RESOURCE_ROWS
    )
    scenario = Scenario(
        epoch=epoch,
        horizon=horizon,
        preventive_tasks=preventive,
        dynamic_tasks=dynamic,
        resources=resources,
        cost_params=CostParams(hourly_rate=fixtures.HOURLY_RATE, currency_label=fixtures.CURRENCY),
    )
    return FixtureBundle(name=name, scenario=scenario, expected=EXPECTED[name])


def schedule_scenario(scenario: Scenario) -> tuple[Schedule, Assignment]:
    """Build the preventive baseline for a scenario."""
    return build_schedule(
        scenario.preventive_tasks, scenario.resources, scenario.epoch, scenario.horizon
    )


def replay_schedule(bundle: FixtureBundle) -> Schedule:
    """Rebuild a published run verbatim from its recorded placements."""
    tasks = {t.id: t for t in (*bundle.scenario.preventive_tasks, *bundle.scenario.dynamic_tasks)}
    placements = []
    horizon_end = bundle.scenario.horizon[1]
    for row in sorted(bundle.expected.placements, key=lambda r: r.start):
        task = tasks.get(row.task_id)
        if task is None:
            raise ValidationError(f"published row names unknown task {row.task_id!r}")
        if row.end - row.start != task.duration:
            raise ValidationError(
                f"published row for {row.task_id!r} spans {row.end - row.start} minutes,"
                f" task lasts {task.duration}"
            )
        placements.append(
            Placement(task_id=row.task_id, start=row.start, end=row.end, resource_id=row.resource_id)
        )
        horizon_end = max(horizon_end, row.end)
    return Schedule(
        placements=tuple(placements),
        tasks=tuple(tasks.values()),
        epoch=bundle.scenario.epoch,
        horizon=(bundle.scenario.horizon[0], horizon_end),
    )


@dataclass(frozen=True)
class GanttRow:
    """One export row; windows carry a blank resource and kind 'window'."""

    id: str
    start: str
    end: str
    resource: str
    kind: str
    cost: Money

    def as_dict(self) -> dict:
        return {
            "id": self.id,
            "start": self.start,
            "end": self.end,
            "resource": self.resource,
            "kind": self.kind,
            "cost": money_to_jsonable(self.cost),
        }


GANTT_COLUMNS = ("id", "start", "end", "resource", "kind", "cost")


def export_gantt(schedule: Schedule, report: CostReport) -> list[GanttRow]:
    """One row per placement plus one per gap row, sorted by start."""
    if len(report.task_rows) != len(schedule.placements):
        raise ValidationError("report does not describe this schedule")
    epoch = schedule.epoch
    entries: list[tuple[Minutes, int, str, GanttRow]] = []
    for placement, task_row in zip(schedule.placements, report.task_rows):
        if placement.task_id != task_row.task_id:
            raise ValidationError("report does not describe this schedule")
        row = GanttRow(
            id=placement.task_id,
            start=timepoint_to_iso(epoch, placement.start),
            end=timepoint_to_iso(epoch, placement.end),
            resource=placement.resource_id or "",
            kind=schedule.task(placement.task_id).kind.value,
            cost=task_row.cost,
        )
        entries.append((placement.start, 0, placement.task_id, row))
    gaps = {gap.index: gap for gap in compute_gap_rows(schedule)}
    for window_row in report.window_rows:
        gap = gaps.get(window_row.index)
        if gap is None or gap.minutes != window_row.minutes:
            raise ValidationError("report does not describe this schedule")
        row = GanttRow(
            id=f"fenetre-{window_row.index}",
            start=timepoint_to_iso(epoch, gap.start),
            end=timepoint_to_iso(epoch, gap.end),
            resource="",
            kind="window",
            cost=window_row.cost,
        )
        entries.append((gap.start, 1, row.id, row))
    entries.sort(key=lambda e: e[:3])
    return [row for _, _, _, row in entries]


def gantt_to_csv(rows: Sequence[GanttRow]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(GANTT_COLUMNS)
    for row in rows:
        writer.writerow([row.id, row.start, row.end, row.resource, row.kind, format_money(row.cost)])
    return out.getvalue()


def gantt_to_json(rows: Sequence[GanttRow]) -> str:
    return json.dumps([row.as_dict() for row in rows], sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def schedule_to_jsonable(schedule: Schedule, assignment: Assignment | None = None) -> dict:
    """Schedule snapshot for the wire: placements, gap rows, windows."""
    epoch = schedule.epoch
    out = {
        "epoch": timepoint_to_iso(epoch, 0),
        "horizon": _interval_to_jsonable(epoch, schedule.horizon),
        "placements": [
            {
                "task_id": p.task_id,
                "title": schedule.task(p.task_id).title,
                "kind": schedule.task(p.task_id).kind.value,
                "start": timepoint_to_iso(epoch, p.start),
                "end": timepoint_to_iso(epoch, p.end),
                "start_minute": p.start,
                "end_minute": p.end,
                "duration_minutes": p.duration,
                "resource": p.resource_id,
                "t1": p.t1,
                "t2": p.t2,
            }
            for p in schedule.placements
        ],
        "gap_rows": [
            {
                "index": gap.index,
                "start": timepoint_to_iso(epoch, gap.start),
                "end": timepoint_to_iso(epoch, gap.end),
                "start_minute": gap.start,
                "end_minute": gap.end,
                "minutes": gap.minutes,
            }
            for gap in compute_gap_rows(schedule)
        ],
        "windows": [
            {
                "index": w.index,
                "start": timepoint_to_iso(epoch, w.start),
                "end": timepoint_to_iso(epoch, w.end),
                "start_minute": w.start,
                "end_minute": w.end,
                "minutes": w.length(),
            }
            for w in compute_windows(schedule)
        ],
    }
    if assignment is not None:
        out["assignment"] = {
            "by_task": dict(sorted(assignment.by_task.items())),
            "unassigned": list(assignment.unassigned),
        }
    return out
