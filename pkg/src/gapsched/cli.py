"""Batch command line: validate scenarios, run the scheduling pipeline,
replay the embedded fixture runs, export gantt rows, launch the service.

All output is deterministic; validation failures print one JSON error
object to stderr and exit 2, replay mismatches print a diff and exit 1.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Sequence

from .costing import (
    CostParams,
    CostReport,
    format_money,
    format_percent,
    format_rational,
    gain,
    global_cost,
    money_to_jsonable,
    reduction_percent,
    render_totals,
    render_window_block,
    report_to_jsonable,
)
from .domain import Resource, Schedule, ValidationError, hours
from .fixtures import FIXTURE_NAMES
from .scheduler import InsertionPolicy, insert_batch
from .scenario_io import (
    Scenario,
    dynamic_task_from_jsonable,
    export_gantt,
    gantt_to_csv,
    gantt_to_json,
    load_fixture,
    parse_scenario,
    replay_schedule,
    schedule_scenario,
    schedule_to_jsonable,
)

_WDAYS = ("Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun")
_MONTHS = ("Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec")


def _fixture_date(schedule: Schedule, minute: int) -> str:
    """Locale-independent 'Fri Jan 02 08:00:00 GMT 2009' rendering."""
    from datetime import timedelta, timezone

    at = (schedule.epoch + timedelta(minutes=minute)).astimezone(timezone.utc)
    return (
        f"{_WDAYS[at.weekday()]} {_MONTHS[at.month - 1]} {at.day:02d} "
        f"{at.hour:02d}:{at.minute:02d}:{at.second:02d} GMT {at.year}"
    )


def render_task_block(schedule: Schedule, report: CostReport, resources: Sequence[Resource]) -> str:
    """One line per placement in the run-listing style."""
    notes = {r.id: r.note for r in resources}
    lines = []
    for n, (placement, row) in enumerate(zip(schedule.placements, report.task_rows), start=1):
        task = schedule.task(placement.task_id)
        rid = placement.resource_id or "-"
        note = format_rational(notes[rid]) if rid in notes else "-"
        lines.append(
            f"Tache N° :{n} Titre : {task.title}"
            f" r1 = {_fixture_date(schedule, placement.start)}"
            f" d1 = {_fixture_date(schedule, placement.end)}"
            f" T={format_rational(hours(placement.duration))}"
            f" Ressource = {rid} Note : {note}"
            f" Coût : {format_money(row.cost)} {report.currency_label}"
        )
    return "\n".join(lines)


def render_report(schedule: Schedule, report: CostReport, resources: Sequence[Resource]) -> str:
    parts = []
    task_block = render_task_block(schedule, report, resources)
    if task_block:
        parts.append(task_block)
    window_block = render_window_block(report)
    if window_block:
        parts.append(window_block)
    parts.append(render_totals(report))
    return "\n\n".join(parts)


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror or exc}", path=path) from None


def _load_scenario(path: str, fmt: str | None, rate: int | None) -> Scenario:
    declared = fmt or ("csv" if path.lower().endswith((".csv", ".tsv")) else "json")
    scenario = parse_scenario(_read_text(path), declared, path=path)
    if rate is not None:
        from dataclasses import replace

        scenario = replace(scenario, cost_params=CostParams(rate, scenario.cost_params.currency_label))
    return scenario


def _load_dynamics(path: str, scenario: Scenario) -> tuple:
    obj = json.loads(_read_text(path))
    items = obj.get("dynamic_tasks", obj) if isinstance(obj, dict) else obj
    if not isinstance(items, list):
        raise ValidationError("dynamics file must hold a list of tasks", path=path)
    return tuple(
        dynamic_task_from_jsonable(
            scenario.epoch, item, scenario.horizon[1], path=f"{path}:dynamic_tasks[{i}]"
        )
        for i, item in enumerate(items)
    )


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def cmd_validate(args: argparse.Namespace) -> int:
    scenario = _load_scenario(args.scenario, args.format, None)
    print(
        f"OK {args.scenario}: {len(scenario.preventive_tasks)} preventive,"
        f" {len(scenario.dynamic_tasks)} dynamic, {len(scenario.resources)} resources,"
        f" horizon {scenario.horizon[0]}..{scenario.horizon[1]} min"
    )
    return 0


def cmd_schedule(args: argparse.Namespace) -> int:
    scenario = _load_scenario(args.scenario, None, args.rate)
    schedule, assignment = schedule_scenario(scenario)
    report = global_cost(schedule, scenario.cost_params)
    if args.format == "json":
        out = {
            "schedule": schedule_to_jsonable(schedule, assignment),
            "report": report_to_jsonable(report),
        }
        _emit(json.dumps(out, sort_keys=True, indent=2, ensure_ascii=False), args.output)
    else:
        _emit(render_report(schedule, report, scenario.resources), args.output)
    return 0


def _run_insertions(scenario: Scenario, dynamics, policy: InsertionPolicy):
    baseline, assignment = schedule_scenario(scenario)
    before = global_cost(baseline, scenario.cost_params)
    batch = insert_batch(baseline, dynamics, scenario.resources, policy)
    after = global_cost(batch.schedule, scenario.cost_params)
    return baseline, before, batch, after


def cmd_insert(args: argparse.Namespace) -> int:
    scenario = _load_scenario(args.scenario, None, args.rate)
    dynamics = scenario.dynamic_tasks
    if args.dynamics:
        dynamics = dynamics + _load_dynamics(args.dynamics, scenario)
    policy = InsertionPolicy(args.policy)
    _, before, batch, after = _run_insertions(scenario, dynamics, policy)
    if args.format == "json":
        out = {
            "schedule": schedule_to_jsonable(batch.schedule),
            "report": report_to_jsonable(after),
            "baseline_lost_cost": money_to_jsonable(before.total_window_cost),
            "gain": money_to_jsonable(gain(before, after)),
            "appended": list(batch.appended_ids),
        }
        _emit(json.dumps(out, sort_keys=True, indent=2, ensure_ascii=False), args.output)
        return 0
    lines = [render_report(batch.schedule, after, scenario.resources)]
    lines.append("")
    lines.append(f"Gain {format_money(gain(before, after))} {after.currency_label}")
    lines.append(f"Reduction {format_percent(reduction_percent(before, after))}%")
    if batch.appended_ids:
        lines.append("Hors fenetre: " + ", ".join(batch.appended_ids))
    _emit("\n".join(lines), args.output)
    return 0


def cmd_replay(args: argparse.Namespace) -> int:
    bundle = load_fixture(args.fixture)
    schedule = replay_schedule(bundle)
    report = global_cost(schedule, bundle.scenario.cost_params)
    expected = bundle.expected
    lines = [f"replay {bundle.name}"]
    ok = True
    gap_rows = report.window_rows
    if len(gap_rows) != len(expected.gap_hours):
        ok = False
        lines.append(f"gap rows: computed {len(gap_rows)} expected {len(expected.gap_hours)} DIFF")
    for row, want in zip(gap_rows, expected.gap_hours):
        got = format_rational(row.hours)
        if row.hours == want:
            lines.append(f"fenetre N°{row.index} {got} OK")
        else:
            ok = False
            lines.append(f"fenetre N°{row.index} computed {got} expected {want} DIFF")
    window_total = report.total_window_cost
    mark = "OK" if window_total == expected.lost_cost else "DIFF"
    ok = ok and window_total == expected.lost_cost
    lines.append(f"Cout Total fenetre {format_money(window_total)} expected {expected.lost_cost} {mark}")
    printed_tasks = expected.as_printed.get("task_total")
    task_total = report.total_task_cost
    if printed_tasks is not None and printed_tasks != task_total:
        lines.append(
            f"Cout Total Taches printed {printed_tasks} / computed {format_money(task_total)}"
            " (upstream rows do not sum to their printed total)"
        )
    else:
        lines.append(f"Cout Total Taches {format_money(task_total)}")
    lines.append(f"Cout Global {format_money(report.global_cost)}")
    if bundle.name != "tableau1":
        baseline_bundle = load_fixture("tableau1")
        baseline = global_cost(replay_schedule(baseline_bundle), bundle.scenario.cost_params)
        pct = format_percent(reduction_percent(baseline, report))
        printed_pct = expected.as_printed.get("reduction_percent")
        lines.append(f"Reduction vs baseline {pct}% (printed {printed_pct}%)")
    for note in expected.discrepancies:
        lines.append(f"note: {note}")
    lines.append("PASS" if ok else "FAIL")
    _emit("\n".join(lines), None)
    return 0 if ok else 1


def cmd_export(args: argparse.Namespace) -> int:
    if args.fixture:
        bundle = load_fixture(args.fixture)
        scenario = bundle.scenario
        if args.replay:
            schedule = replay_schedule(bundle)
        else:
            dynamics = scenario.dynamic_tasks
            schedule = insert_batch(
                schedule_scenario(scenario)[0], dynamics, scenario.resources, scenario.policy
            ).schedule
    else:
        if not args.scenario:
            raise ValidationError("export needs a scenario path or --fixture")
        if args.replay:
            raise ValidationError("--replay only applies to --fixture")
        scenario = _load_scenario(args.scenario, None, args.rate)
        dynamics = scenario.dynamic_tasks
        if args.dynamics:
            dynamics = dynamics + _load_dynamics(args.dynamics, scenario)
        schedule = insert_batch(
            schedule_scenario(scenario)[0], dynamics, scenario.resources, InsertionPolicy(args.policy)
        ).schedule
    report = global_cost(schedule, scenario.cost_params)
    rows = export_gantt(schedule, report)
    text = gantt_to_json(rows) if args.format == "json" else gantt_to_csv(rows)
    _emit(text, args.output)
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    event_log = args.event_log or os.environ.get("GAPSCHED_EVENT_LOG")
    app = create_app(event_log=event_log, default_policy=InsertionPolicy(args.policy))
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gapsched",
        description="Idle-window maintenance scheduling: plan, insert, replay, serve.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse and validate a scenario file")
    p.add_argument("scenario")
    p.add_argument("--format", choices=["json", "csv"], default=None)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("schedule", help="build the preventive baseline and report costs")
    p.add_argument("scenario")
    p.add_argument("--rate", type=int, default=None, help="hourly rate override")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_schedule)

    for name, help_text in (
        ("insert", "insert dynamic tasks into the baseline windows"),
        ("report", "full pipeline report: baseline plus scenario dynamics"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("scenario")
        p.add_argument("--dynamics", default=None, help="JSON file with extra dynamic tasks")
        p.add_argument("--policy", choices=[x.value for x in InsertionPolicy], default="first-fit")
        p.add_argument("--rate", type=int, default=None)
        p.add_argument("--format", choices=["text", "json"], default="text")
        p.add_argument("--output", default=None)
        p.set_defaults(func=cmd_insert)

    p = sub.add_parser("replay", help="replay a published fixture run and check totals")
    p.add_argument("fixture", choices=list(FIXTURE_NAMES))
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("export", help="export gantt rows (placements and windows)")
    p.add_argument("scenario", nargs="?", default=None)
    p.add_argument("--fixture", choices=list(FIXTURE_NAMES), default=None)
    p.add_argument("--replay", action="store_true", help="use the fixture's published placements")
    p.add_argument("--dynamics", default=None)
    p.add_argument("--policy", choices=[x.value for x in InsertionPolicy], default="first-fit")
    p.add_argument("--rate", type=int, default=None)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("serve", help="run the HTTP session service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--event-log", default=None)
    p.add_argument("--policy", choices=[x.value for x in InsertionPolicy], default="first-fit")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    if hasattr(sys.stdout, "reconfigure"):
        sys.stdout.reconfigure(encoding="utf-8")
        sys.stderr.reconfigure(encoding="utf-8")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        error = {"error": str(exc)}
        if exc.path:
            error["path"] = exc.path
        if exc.line is not None:
            error["line"] = exc.line
        sys.stderr.write(json.dumps(error, sort_keys=True, ensure_ascii=False) + "\n")
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
