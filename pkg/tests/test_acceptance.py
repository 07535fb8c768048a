"""End-to-end acceptance checks, one per shipped guarantee.

Each test prints a single PASS line (visible with ``pytest -s``) and
asserts the same condition, so the suite doubles as a checklist against
the published figures of the upstream dataset.
"""

import json
import math
import random
import subprocess
import sys
import time
from datetime import timedelta
from fractions import Fraction
from pathlib import Path

from gapsched.costing import (
    DeviationPenalties,
    deviation_cost,
    format_percent,
    global_cost,
    reduction_percent,
)
from gapsched.domain import (
    CostParams,
    Kind,
    Placement,
    Resource,
    Task,
    overlaps,
    parse_utc,
)
from gapsched.scheduler import (
    InsertionPolicy,
    assign_resources,
    build_schedule,
    check_schedulability,
    insert_batch,
    rank_resources,
    total_idle_minutes,
    utilization_bound,
)
from gapsched.scenario_io import (
    parse_scenario,
    replay_schedule,
    schedule_scenario,
    serialize_scenario,
    Scenario,
)

ROOT = Path(__file__).resolve().parents[1]
FIXDIR = ROOT / "fixtures"
EPOCH = parse_utc("2009-01-02T08:00:00Z")


def verdict(label: str, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'}: {label} — {detail}"
    print(line)
    assert ok, line


def test_baseline_lost_cost_exact_and_fast(tableau1):
    started = time.perf_counter()
    schedule, _ = schedule_scenario(tableau1.scenario)
    report = global_cost(schedule, tableau1.scenario.cost_params)
    elapsed = time.perf_counter() - started
    ok = report.total_window_cost == 13100 and elapsed < 1.0
    verdict(
        "baseline lost cost",
        ok,
        f"13100 expected, computed {report.total_window_cost} in {elapsed:.3f}s",
    )


def test_three_dynamic_replay_totals_and_reduction(tableau1, run3dyn, baseline):
    _, _, before = baseline
    schedule = replay_schedule(run3dyn)
    report = global_cost(schedule, run3dyn.scenario.cost_params)
    rows = report.window_rows
    pct = reduction_percent(before, report)
    ok = (
        report.total_window_cost == 8300
        and len(rows) == 12
        and sum(r.hours for r in rows) == 83
        and format_percent(pct) == "36.6"
        and abs(pct - 37) <= 1
    )
    verdict(
        "three-dynamic replay",
        ok,
        f"window total {report.total_window_cost}, {len(rows)} gap rows,"
        f" {sum(r.hours for r in rows)} h idle, reduction {format_percent(pct)}%",
    )


def test_nine_dynamic_replay_gap_values_and_reduction(tableau1, run9dyn, baseline):
    _, _, before = baseline
    schedule = replay_schedule(run9dyn)
    report = global_cost(schedule, run9dyn.scenario.cost_params)
    published = [0, 1, 1, 0, 0, 1, 1, 1, 0, 14, 2, 1, 9, 4, 9, 1, 15, 1]
    hours = [r.hours for r in report.window_rows]
    pct = reduction_percent(before, report)
    ok = (
        hours == published
        and report.total_window_cost == 6100
        and format_percent(pct) == "53.4"
        and abs(pct - 54) <= 1
    )
    verdict(
        "nine-dynamic replay",
        ok,
        f"gap hours match all {len(published)} published values,"
        f" window total {report.total_window_cost}, reduction {format_percent(pct)}%",
    )


def test_first_fit_batch_matches_published_total(run3dyn, baseline):
    schedule, _, before = baseline
    idle_before = total_idle_minutes(schedule)
    batch = insert_batch(
        schedule,
        run3dyn.scenario.dynamic_tasks,
        run3dyn.scenario.resources,
        InsertionPolicy.FIRST_FIT,
    )
    report = global_cost(batch.schedule, run3dyn.scenario.cost_params)
    inserted = sum(t.duration for t in run3dyn.scenario.dynamic_tasks)
    conserved = total_idle_minutes(batch.schedule) == idle_before - inserted
    ok = (
        batch.appended_ids == ()
        and report.total_window_cost <= 8300
        and report.total_window_cost == 8300
        and conserved
    )
    verdict(
        "first-fit batch vs published total",
        ok,
        f"all in-window, lost cost {report.total_window_cost} (= 13100 - {inserted // 60}h x 100)",
    )


def _random_instance(rng: random.Random):
    clock = 0
    preventives = []
    for i in range(rng.randint(1, 12)):
        clock += rng.randint(0, 600)
        duration = rng.randint(1, 480)
        preventives.append(
            Task(
                id=f"T{i + 1}",
                title=f"T{i + 1}",
                kind=Kind.PREVENTIVE,
                release=clock,
                due=clock + duration,
                duration=duration,
            )
        )
        clock += duration
    resources = [
        Resource(id=f"R{j + 1}", competence_row=(Fraction(rng.randint(0, 80), 4),))
        for j in range(rng.randint(1, 6))
    ]
    dynamics = [
        Task(
            id=f"TD{j + 1}",
            title=f"TD{j + 1}",
            kind=Kind.DYNAMIC,
            release=0,
            due=10**7,
            duration=rng.randint(1, 800),
        )
        for j in range(rng.randint(0, 6))
    ]
    policy = rng.choice([InsertionPolicy.FIRST_FIT, InsertionPolicy.BEST_FIT])
    return preventives, resources, dynamics, policy


def test_conservation_on_randomized_instances():
    rng = random.Random(20090102)
    runs = 1200
    all_in_window = 0
    for _ in range(runs):
        preventives, resources, dynamics, policy = _random_instance(rng)
        schedule, _ = build_schedule(preventives, resources, EPOCH)
        idle_before = total_idle_minutes(schedule)
        batch = insert_batch(schedule, dynamics, resources, policy)
        placements = batch.schedule.placements
        for a, b in zip(placements, placements[1:]):
            assert not overlaps(a.interval, b.interval)
        by_resource = {}
        for p in placements:
            if p.resource_id is not None:
                by_resource.setdefault(p.resource_id, []).append(p.interval)
        for intervals in by_resource.values():
            intervals.sort()
            for a, b in zip(intervals, intervals[1:]):
                assert not overlaps(a, b)
        if not batch.appended_ids:
            all_in_window += 1
            inserted = sum(t.duration for t in dynamics)
            assert total_idle_minutes(batch.schedule) == idle_before - inserted
    verdict(
        "idle-time conservation",
        all_in_window > 0,
        f"{runs} randomized instances, {all_in_window} fully in-window,"
        " all conserve idle time and stay overlap-free",
    )


def test_utilization_bound_values_and_exactness():
    b1 = utilization_bound(1)
    b2 = utilization_bound(2)
    monotone = True
    prev = b1
    for n in range(2, 10_001):
        cur = utilization_bound(n)
        if not (cur < prev and cur > math.log(2)):
            monotone = False
            break
        prev = cur
    approach = utilization_bound(10_000) - math.log(2)
    exact = check_schedulability([(1, 3), (1, 4)]).utilization == Fraction(7, 12)
    exact = exact and check_schedulability([(2, 5), (1, 7)]).utilization == Fraction(19, 35)
    ok = (
        b1 == 1.0
        and abs(b2 - 0.8284271247461903) <= 1e-9
        and monotone
        and 0 < approach < 1e-4
        and exact
    )
    verdict(
        "utilization bound",
        ok,
        f"bound(1)={b1}, bound(2)={b2:.12f}, strictly decreasing toward"
        f" ln 2 over n<=10^4 (excess {approach:.2e}), utilization exact",
    )


def test_deviation_cost_matches_independent_evaluator():
    rng = random.Random(60)
    checked = 0
    for _ in range(10_000):
        tardiness = rng.randint(0, 500)
        earliness = rng.randint(0, 500)
        base = rng.randint(0, 1000)
        lo_h = rng.randint(0, 160)
        hi_h = rng.randint(lo_h, 200)
        completion_h = rng.randint(1, 220)
        completion = completion_h * 60
        duration = rng.randint(1, completion)
        penalties = DeviationPenalties(
            tardiness_rate=tardiness,
            earliness_rate=earliness,
            base_cost=base,
            earliest_due=lo_h * 60,
            latest_due=hi_h * 60,
        )
        task = Task(
            id="T",
            title="T",
            kind=Kind.DYNAMIC,
            release=0,
            due=completion + 1,
            duration=duration,
        )
        placement = Placement(
            task_id="T", start=completion - duration, end=completion, resource_id=None
        )
        late = max(0, completion - penalties.latest_due)
        early = max(0, penalties.earliest_due - completion)
        expected = tardiness * (late // 60) + earliness * (early // 60) + base
        got = deviation_cost(task, placement, penalties)
        assert isinstance(got, int)
        assert got == expected
        checked += 1
    verdict(
        "deviation cost oracle",
        checked == 10_000,
        f"{checked} random penalty tuples match the explicit max-based formula exactly",
    )


def test_competence_assignment_and_scaling_invariance(tableau1, baseline):
    scenario = tableau1.scenario
    _, assignment, _ = baseline
    notes = {r.id: r.note for r in scenario.resources}
    chosen = assignment.by_task["T3"]
    base_rank = [r.resource.id for r in rank_resources(scenario.resources)]
    pairs = [(t, (t.release, t.release + t.duration)) for t in scenario.preventive_tasks]
    reference = assign_resources(pairs, scenario.resources)
    stable = True
    for factor in (Fraction(1, 2), Fraction(1, 4), Fraction(1, 19), Fraction(20, 19)):
        scaled = [
            Resource(id=r.id, competence_row=tuple(c * factor for c in r.competence_row))
            for r in scenario.resources
        ]
        if [r.resource.id for r in rank_resources(scaled)] != base_rank:
            stable = False
        if assign_resources(pairs, scaled) != reference:
            stable = False
    ok = chosen == "R2" and notes[chosen] == 19 and stable
    verdict(
        "competence-ranked assignment",
        ok,
        f"8 h earliest task binds {chosen} (note {notes[chosen]}),"
        " rank and assignment invariant under positive scaling",
    )


def _run_cli(*args):
    proc = subprocess.run(
        [sys.executable, "-m", "gapsched", *args],
        capture_output=True,
        text=True,
        cwd=ROOT,
    )
    assert proc.returncode == 0, proc.stderr
    return proc.stdout


def _random_scenario(rng: random.Random) -> Scenario:
    epoch = EPOCH + timedelta(minutes=rng.randint(-500_000, 500_000))
    width = rng.randint(1, 3)
    resources = []
    for j in range(rng.randint(1, 5)):
        busy = []
        clock = rng.randint(0, 200)
        for _ in range(rng.randint(0, 2)):
            length = rng.randint(1, 300)
            busy.append((clock, clock + length))
            clock += length + rng.randint(1, 100)
        resources.append(
            Resource(
                id=f"R{j + 1}",
                competence_row=tuple(
                    Fraction(rng.randint(0, 80), 4) for _ in range(width)
                ),
                busy=tuple(busy),
            )
        )
    clock = 0
    preventives = []
    for i in range(rng.randint(0, 8)):
        clock += rng.randint(0, 400)
        duration = rng.randint(1, 300)
        preventives.append(
            Task(
                id=f"T{i + 1}",
                title=rng.choice(["overhaul", "checkup", "swap", "Tâche n°" + str(i)]),
                kind=Kind.PREVENTIVE,
                release=clock,
                due=clock + duration,
                duration=duration,
                earliness_penalty=rng.randint(0, 50),
                tardiness_penalty=rng.randint(0, 50),
                base_cost=rng.randint(0, 500),
                required_type=rng.randrange(width),
            )
        )
        clock += duration
    horizon = (0, clock + rng.randint(0, 500)) if preventives else (0, rng.randint(1, 500))
    dynamics = tuple(
        Task(
            id=f"TD{j + 1}",
            title="fix",
            kind=Kind.DYNAMIC,
            release=0,
            due=max(horizon[1], rng.randint(1, 700) + 1),
            duration=rng.randint(1, 700),
            required_type=rng.randrange(width),
        )
        for j in range(rng.randint(0, 4))
    )
    return Scenario(
        epoch=epoch,
        horizon=horizon,
        preventive_tasks=tuple(preventives),
        dynamic_tasks=dynamics,
        resources=tuple(resources),
        cost_params=CostParams(
            hourly_rate=rng.randint(1, 300),
            currency_label=rng.choice(["DHS", "EUR", "MAD"]),
        ),
        policy=rng.choice(list(InsertionPolicy)),
    )


def test_cli_determinism_and_scenario_round_trip():
    tableau1 = str(FIXDIR / "tableau1.json")
    commands = [
        ("validate", tableau1),
        ("validate", str(FIXDIR / "tableau1.csv")),
        ("schedule", tableau1),
        ("schedule", tableau1, "--format", "json"),
        ("insert", tableau1, "--dynamics", str(FIXDIR / "dyn3.json")),
        ("report", tableau1, "--dynamics", str(FIXDIR / "dyn9.json"), "--format", "json"),
        ("replay", "tableau1"),
        ("replay", "run3dyn"),
        ("replay", "run9dyn"),
        ("export", "--fixture", "run9dyn", "--replay"),
        ("export", tableau1, "--dynamics", str(FIXDIR / "dyn3.json"), "--format", "json"),
    ]
    for command in commands:
        assert _run_cli(*command) == _run_cli(*command), command
    rng = random.Random(7)
    rounds = 250
    for _ in range(rounds):
        scenario = _random_scenario(rng)
        text = serialize_scenario(scenario)
        assert parse_scenario(text) == scenario
        assert serialize_scenario(parse_scenario(text)) == text
    verdict(
        "determinism",
        True,
        f"{len(commands)} CLI commands byte-identical across two runs;"
        f" {rounds} randomized scenarios round-trip exactly",
    )


def test_dynamic_tasks_never_mutate_preventive_placements(run9dyn, baseline):
    schedule, _, _ = baseline
    batch = insert_batch(
        schedule, run9dyn.scenario.dynamic_tasks, run9dyn.scenario.resources
    )
    before = {p.task_id: p.interval for p in schedule.placements}
    after = {p.task_id: p.interval for p in batch.schedule.placements}
    moved = [tid for tid in before if after.get(tid) != before[tid]]
    verdict(
        "preventive placements immutable",
        not moved,
        "inserting nine dynamics leaves every baseline placement untouched",
    )
