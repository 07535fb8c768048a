"""Planning pipeline: task ordering, competence-ranked assignment, window
discovery, and online insertion of dynamic tasks into idle windows.

Everything here is a pure function over immutable values; insertion
returns a new Schedule, so what-if evaluations can run side by side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime
from enum import Enum
from fractions import Fraction
from typing import Mapping, Sequence

from .domain import (
    Interval,
    Kind,
    Minutes,
    Placement,
    Resource,
    Schedule,
    Task,
    ValidationError,
    Window,
    overlaps,
)


class InsertionPolicy(str, Enum):
    """Window selection rule for dynamic tasks.

    FIRST_FIT takes the earliest window long enough; BEST_FIT the tightest
    one (ties earliest); APPEND skips the search and extends the schedule
    past the last placement. FIRST_FIT and BEST_FIT fall back to appending
    when no window fits. Placement is always at the window start, so the
    leading slack t1 is 0 and t2 absorbs the leftover.
    """

    FIRST_FIT = "first-fit"
    BEST_FIT = "best-fit"
    APPEND = "append"


@dataclass(frozen=True)
class Assignment:
    """Resource bindings produced by the competence-ranked rule."""

    by_task: Mapping[str, str]
    unassigned: tuple[str, ...]


@dataclass(frozen=True)
class SchedulabilityReport:
    """Utilization test for periodic workloads: feasible when U <= n(2^(1/n)-1)."""

    n: int
    utilization: Fraction
    bound: float
    feasible: bool


@dataclass(frozen=True)
class RankedResource:
    resource: Resource
    competence: Fraction
    available: bool


@dataclass(frozen=True)
class InsertionResult:
    schedule: Schedule
    placement: Placement
    window_index: int | None
    appended: bool


@dataclass(frozen=True)
class BatchResult:
    schedule: Schedule
    insertions: tuple[InsertionResult, ...]

    @property
    def appended_ids(self) -> tuple[str, ...]:
        return tuple(r.placement.task_id for r in self.insertions if r.appended)


def sort_tasks(tasks: Sequence[Task]) -> list[Task]:
    """Order by release, then duration, then id; duplicate ids rejected."""
    seen: set[str] = set()
    for t in tasks:
        if t.id in seen:
            raise ValidationError(f"duplicate task id {t.id!r}")
        seen.add(t.id)
    return sorted(tasks, key=lambda t: (t.release, t.duration, t.id))


def utilization_bound(n: int) -> float:
    """n * (2^(1/n) - 1), strictly decreasing towards ln 2."""
    if n <= 0:
        raise ValidationError("task count must be positive")
    return n * math.expm1(math.log(2.0) / n)


def check_schedulability(periodic: Sequence[tuple[Minutes, Minutes]]) -> SchedulabilityReport:
    """Sufficient rate-monotonic test: U = sum(C_i / P_i) against the bound.

    Report-only: callers never refuse to schedule on an infeasible verdict.
    U is exact; the bound is a float good to well under 1e-9.
    """
    if not periodic:
        raise ValidationError("need at least one (C, P) pair")
    u = Fraction(0)
    for i, (c, p) in enumerate(periodic):
        if p <= 0:
            raise ValidationError(f"period must be positive, got {p}", path=f"periodic[{i}]")
        if c < 0:
            raise ValidationError(f"execution time must be non-negative, got {c}", path=f"periodic[{i}]")
        u += Fraction(c, p)
    n = len(periodic)
    bound = utilization_bound(n)
    return SchedulabilityReport(n=n, utilization=u, bound=bound, feasible=u <= Fraction(bound))


def resource_busy(resource: Resource, schedule: Schedule) -> list[Interval]:
    """The resource's calendar plus every placement bound to it."""
    taken = list(resource.busy)
    taken.extend(p.interval for p in schedule.placements if p.resource_id == resource.id)
    return taken


def is_available(resource: Resource, schedule: Schedule, interval: Interval) -> bool:
    return not any(overlaps(interval, busy) for busy in resource_busy(resource, schedule))


def rank_resources(
    resources: Sequence[Resource],
    task_type: int = 0,
    *,
    schedule: Schedule | None = None,
    interval: Interval | None = None,
) -> list[RankedResource]:
    """Competence-descending order for a task type, ties by id.

    Unavailable resources stay in the ranking, flagged; availability is
    interval overlap against the calendar (and the schedule's bindings,
    when one is given), never a sticky taken/free bit.
    """
    ranked = sorted(resources, key=lambda r: (-r.competence(task_type), r.id))
    out = []
    for r in ranked:
        if interval is None:
            free = True
        elif schedule is None:
            free = not any(overlaps(interval, b) for b in r.busy)
        else:
            free = is_available(r, schedule, interval)
        out.append(RankedResource(resource=r, competence=r.competence(task_type), available=free))
    return out


def assign_resources(
    tasks: Sequence[tuple[Task, Interval]],
    resources: Sequence[Resource],
) -> Assignment:
    """Give the longest tasks the most competent free resources.

    Tasks are taken by duration descending (ties: earlier release, then
    id); each receives the highest-ranked resource not yet drafted in
    this pass whose calendar leaves its interval free. Once every
    resource is drafted, reuse is allowed wherever intervals stay
    disjoint, so a resource may serve several non-overlapping tasks.
    Tasks with no free resource are reported, not failed.
    """
    order = sorted(tasks, key=lambda ti: (-(ti[1][1] - ti[1][0]), ti[0].release, ti[0].id))
    awarded: dict[str, list[Interval]] = {r.id: list(r.busy) for r in resources}
    drafted: set[str] = set()
    by_task: dict[str, str] = {}
    unassigned: list[str] = []
    for task, interval in order:
        ranked = sorted(resources, key=lambda r: (-r.competence(task.required_type), r.id))
        chosen: Resource | None = None
        for allow_reuse in (False, True):
            for r in ranked:
                if not allow_reuse and r.id in drafted:
                    continue
                if any(overlaps(interval, b) for b in awarded[r.id]):
                    continue
                chosen = r
                break
            if chosen is not None:
                break
        if chosen is None:
            unassigned.append(task.id)
        else:
            by_task[task.id] = chosen.id
            awarded[chosen.id].append(interval)
            drafted.add(chosen.id)
    return Assignment(by_task=by_task, unassigned=tuple(unassigned))


def build_schedule(
    preventive: Sequence[Task],
    resources: Sequence[Resource],
    epoch: datetime,
    horizon: Interval | None = None,
    pinned: Mapping[str, str] | None = None,
) -> tuple[Schedule, Assignment]:
    """Place the preventive plan and bind resources.

    Each task occupies [release, release + duration]; planned dates are
    inputs, so overlapping plans are rejected rather than shifted. Pins
    override the competence rule for the named tasks.
    """
    ordered = sort_tasks(preventive)
    intervals: list[tuple[Task, Interval]] = [
        (t, (t.release, t.release + t.duration)) for t in ordered
    ]
    for (a, ia), (b, ib) in zip(intervals, intervals[1:]):
        if overlaps(ia, ib):
            raise ValidationError(
                f"preventive tasks {a.id!r} and {b.id!r} overlap on the machine",
                path=f"task[{b.id}]",
            )
    pinned = dict(pinned or {})
    known = {r.id: r for r in resources}
    for task_id, rid in pinned.items():
        if rid not in known:
            raise ValidationError(f"unknown resource reference {rid!r}", path=f"task[{task_id}]")
    free = [(t, iv) for t, iv in intervals if t.id not in pinned]
    assignment = assign_resources(free, [r for r in resources])
    by_task = dict(assignment.by_task)
    by_task.update(pinned)
    placements = tuple(
        Placement(task_id=t.id, start=iv[0], end=iv[1], resource_id=by_task.get(t.id))
        for t, iv in intervals
    )
    if horizon is None:
        horizon = (intervals[0][1][0], intervals[-1][1][1]) if intervals else (0, 0)
    else:
        lo = min([horizon[0], *(iv[0] for _, iv in intervals)])
        hi = max([horizon[1], *(iv[1] for _, iv in intervals)])
        horizon = (lo, hi)
    schedule = Schedule(placements=placements, tasks=tuple(ordered), epoch=epoch, horizon=horizon)
    return schedule, Assignment(by_task=by_task, unassigned=assignment.unassigned)


@dataclass(frozen=True)
class GapRow:
    """One consecutive-placement gap, zero-length ones included."""

    index: int
    start: Minutes
    end: Minutes

    @property
    def minutes(self) -> Minutes:
        return self.end - self.start


def compute_gap_rows(schedule: Schedule) -> list[GapRow]:
    """One row per consecutive placement pair, in schedule order."""
    rows = []
    for i, (a, b) in enumerate(zip(schedule.placements, schedule.placements[1:]), start=1):
        rows.append(GapRow(index=i, start=a.end, end=b.start))
    return rows


def compute_windows(schedule: Schedule) -> list[Window]:
    """Positive-length gaps as Windows; indices keep the gap-row numbering."""
    return [
        Window(row.start, row.end, row.index)
        for row in compute_gap_rows(schedule)
        if row.minutes > 0
    ]


def find_window(
    schedule: Schedule, duration: Minutes, policy: InsertionPolicy = InsertionPolicy.FIRST_FIT
) -> Window | None:
    """Pick a window at least ``duration`` long, or None.

    FIRST_FIT: earliest fitting window. BEST_FIT: minimal leftover, ties
    earliest. APPEND never selects a window.
    """
    if duration <= 0:
        raise ValidationError(f"duration must be positive, got {duration}")
    if policy is InsertionPolicy.APPEND:
        return None
    fitting = [w for w in compute_windows(schedule) if w.length() >= duration]
    if not fitting:
        return None
    if policy is InsertionPolicy.FIRST_FIT:
        return fitting[0]
    return min(fitting, key=lambda w: (w.length() - duration, w.start))


def _place_task(
    schedule: Schedule,
    task: Task,
    start: Minutes,
    resources: Sequence[Resource],
    *,
    t1: Minutes,
    t2: Minutes,
) -> tuple[Schedule, Placement]:
    interval = (start, start + task.duration)
    resource_id: str | None = None
    for ranked in rank_resources(
        resources, task.required_type, schedule=schedule, interval=interval
    ):
        if ranked.available:
            resource_id = ranked.resource.id
            break
    placement = Placement(
        task_id=task.id, start=interval[0], end=interval[1], resource_id=resource_id, t1=t1, t2=t2
    )
    placements = tuple(sorted([*schedule.placements, placement], key=lambda p: p.start))
    horizon = (min(schedule.horizon[0], interval[0]), max(schedule.horizon[1], interval[1]))
    new = Schedule(
        placements=placements,
        tasks=(*schedule.tasks, task),
        epoch=schedule.epoch,
        horizon=horizon,
    )
    return new, placement


def insert_dynamic(
    schedule: Schedule,
    task: Task,
    resources: Sequence[Resource],
    policy: InsertionPolicy = InsertionPolicy.FIRST_FIT,
) -> InsertionResult:
    """Insert a dynamic task at the start of the chosen window.

    The placement leaves t1 = 0 and t2 = window length - duration. When
    nothing fits (or the policy is APPEND) the task lands immediately
    after the last placement, extending the horizon. The most competent
    resource free over the placement interval is bound to it.
    """
    if task.kind is not Kind.DYNAMIC:
        raise ValidationError(f"task {task.id!r} is not dynamic", path=f"task[{task.id}]")
    if task.id in schedule.task_map:
        raise ValidationError(f"duplicate task id {task.id!r}")
    window = find_window(schedule, task.duration, policy)
    if window is None:
        start = schedule.placements[-1].end if schedule.placements else schedule.horizon[0]
        new, placement = _place_task(schedule, task, start, resources, t1=0, t2=0)
        return InsertionResult(schedule=new, placement=placement, window_index=None, appended=True)
    t2 = window.length() - task.duration
    new, placement = _place_task(schedule, task, window.start, resources, t1=0, t2=t2)
    return InsertionResult(
        schedule=new, placement=placement, window_index=window.index, appended=False
    )


def insert_batch(
    schedule: Schedule,
    tasks: Sequence[Task],
    resources: Sequence[Resource],
    policy: InsertionPolicy = InsertionPolicy.FIRST_FIT,
) -> BatchResult:
    """Insert dynamic tasks in arrival order.

    Each insertion sees the windows left by the previous ones, residual
    sub-windows included; non-fitting tasks fall back to appending and are
    flagged in the result.
    """
    results: list[InsertionResult] = []
    current = schedule
    for task in tasks:
        result = insert_dynamic(current, task, resources, policy)
        current = result.schedule
        results.append(result)
    return BatchResult(schedule=current, insertions=tuple(results))


def total_idle_minutes(schedule: Schedule) -> Minutes:
    return sum(row.minutes for row in compute_gap_rows(schedule))
