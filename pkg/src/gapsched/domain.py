"""Core value types and exact time/money arithmetic.

All instants are integer minutes since a scenario-declared epoch; all
durations are integer minutes. Money amounts are exact rationals that
normalize to plain ints whenever they are integral, so whole-hour gaps
priced at an integer hourly rate never touch floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence, Union

Minutes = int
Interval = tuple[Minutes, Minutes]
Money = Union[int, Fraction]

MINUTES_PER_HOUR = 60


class ValidationError(ValueError):
    """An input value violates a domain invariant."""

    def __init__(self, message: str, *, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        prefix = ""
        if path:
            prefix = f"{path}: "
        if line is not None:
            prefix = f"line {line}: {prefix}"
        super().__init__(prefix + message)


class Kind(str, Enum):
    PREVENTIVE = "preventive"
    DYNAMIC = "dynamic"


def normalize_rational(x: Fraction) -> Money:
    """Collapse an exact rational to int when it is integral."""
    return int(x) if x.denominator == 1 else x


def hours(minutes: Minutes) -> Money:
    return normalize_rational(Fraction(minutes, MINUTES_PER_HOUR))


def minutes_cost(minutes: Minutes, hourly_rate: int) -> Money:
    """Price a span of minutes at a per-hour rate, exactly."""
    return normalize_rational(Fraction(minutes * hourly_rate, MINUTES_PER_HOUR))


def overlaps(a: Interval, b: Interval) -> bool:
    """Half-open interval overlap: [a0,a1) vs [b0,b1)."""
    return a[0] < b[1] and b[0] < a[1]


def timepoint_to_iso(epoch: datetime, minute: Minutes) -> str:
    at = epoch + timedelta(minutes=minute)
    return at.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def iso_to_timepoint(epoch: datetime, text: str, *, path: str | None = None) -> Minutes:
    at = parse_utc(text, path=path)
    delta = at - epoch
    seconds = delta.days * 86400 + delta.seconds
    if seconds % 60 != 0:
        raise ValidationError(f"timestamp {text!r} is not on the minute grid", path=path)
    return seconds // 60


def parse_utc(text: str, *, path: str | None = None) -> datetime:
    """Parse an ISO-8601 timestamp; naive values are taken as UTC."""
    try:
        at = datetime.fromisoformat(text.replace("Z", "+00:00"))
    except ValueError as exc:
        raise ValidationError(f"malformed timestamp {text!r}: {exc}", path=path) from None
    if at.tzinfo is None:
        at = at.replace(tzinfo=timezone.utc)
    return at.astimezone(timezone.utc)


@dataclass(frozen=True)
class Task:
    """A maintenance job: planned (preventive) or arriving live (dynamic).

    ``release``/``due`` bound the job in scenario time; ``duration`` is the
    operating time. Penalty rates are per hour, ``base_cost`` is a flat
    amount, both used only by the deviation cost model.
    """

    id: str
    title: str
    kind: Kind
    release: Minutes
    due: Minutes
    duration: Minutes
    earliness_penalty: int = 0
    tardiness_penalty: int = 0
    base_cost: int = 0
    required_type: int = 0

    def __post_init__(self) -> None:
        if not self.id:
            raise ValidationError("task id must be non-empty")
        if self.release >= self.due:
            raise ValidationError(
                f"release ({self.release}) must precede due ({self.due})",
                path=f"task[{self.id}].release",
            )
        if self.duration <= 0:
            raise ValidationError(
                f"duration must be positive, got {self.duration}",
                path=f"task[{self.id}].duration",
            )
        if self.earliness_penalty < 0 or self.tardiness_penalty < 0:
            raise ValidationError(
                "penalty rates must be non-negative", path=f"task[{self.id}]"
            )


@dataclass(frozen=True)
class Resource:
    """A human resource with a per-task-type competence row and a calendar.

    ``competence_row[k]`` scores the resource for task type ``k`` (the
    single-type case is a one-element row, exposed as ``note``). ``busy``
    holds externally imposed unavailability, disjoint half-open intervals.
    """

    id: str
    competence_row: tuple[Fraction, ...]
    busy: tuple[Interval, ...] = ()

    def __post_init__(self) -> None:
        if not self.competence_row:
            raise ValidationError("competence row must be non-empty", path=f"resource[{self.id}]")
        for score in self.competence_row:
            if not (0 <= score <= 20):
                raise ValidationError(
                    f"competence {score} outside [0, 20]", path=f"resource[{self.id}]"
                )
        ordered = sorted(self.busy)
        for a, b in zip(ordered, ordered[1:]):
            if overlaps(a, b):
                raise ValidationError(
                    f"busy intervals {a} and {b} overlap", path=f"resource[{self.id}].busy"
                )

    @property
    def note(self) -> Fraction:
        return self.competence_row[0]

    def competence(self, task_type: int) -> Fraction:
        if not (0 <= task_type < len(self.competence_row)):
            raise ValidationError(
                f"no competence for task type {task_type}", path=f"resource[{self.id}]"
            )
        return self.competence_row[task_type]


@dataclass(frozen=True)
class Window:
    """A maximal idle interval between two consecutive busy intervals.

    ``index`` is the 1-based ordinal of the gap position in schedule order.
    Zero-length gaps are not Windows; reports carry them as 0-valued rows.
    """

    start: Minutes
    end: Minutes
    index: int

    def __post_init__(self) -> None:
        if self.start >= self.end:
            raise ValidationError(f"window must have positive length, got [{self.start}, {self.end})")

    def length(self) -> Minutes:
        return self.end - self.start


def window_length(w: Window) -> Minutes:
    return w.length()


@dataclass(frozen=True)
class Placement:
    """A task fixed on the machine timeline.

    ``t1``/``t2`` record leading and trailing slack left inside the host
    window when the placement came from a dynamic insertion.
    """

    task_id: str
    start: Minutes
    end: Minutes
    resource_id: str | None = None
    t1: Minutes = 0
    t2: Minutes = 0

    def __post_init__(self) -> None:
        if self.start >= self.end:
            raise ValidationError(
                f"placement must have positive length, got [{self.start}, {self.end})",
                path=f"placement[{self.task_id}]",
            )
        if self.t1 < 0 or self.t2 < 0:
            raise ValidationError("slack must be non-negative", path=f"placement[{self.task_id}]")

    @property
    def duration(self) -> Minutes:
        return self.end - self.start

    @property
    def interval(self) -> Interval:
        return (self.start, self.end)


@dataclass(frozen=True)
class CostParams:
    hourly_rate: int = 100
    currency_label: str = "DHS"

    def __post_init__(self) -> None:
        if self.hourly_rate <= 0:
            raise ValidationError("hourly_rate must be positive", path="cost_params.hourly_rate")


@dataclass(frozen=True)
class Schedule:
    """Ordered, non-overlapping placements on the single machine.

    ``tasks`` carries every placed task so reports can recover kinds and
    titles; ``horizon`` spans at least first start to last end. Immutable:
    insertions build new Schedules.
    """

    placements: tuple[Placement, ...]
    tasks: tuple[Task, ...]
    epoch: datetime
    horizon: Interval

    def __post_init__(self) -> None:
        known = {t.id for t in self.tasks}
        if len(known) != len(self.tasks):
            raise ValidationError("duplicate task ids in schedule")
        prev: Placement | None = None
        for p in self.placements:
            if p.task_id not in known:
                raise ValidationError(f"placement references unknown task {p.task_id!r}")
            if prev is not None:
                if p.start < prev.start:
                    raise ValidationError("placements must be ordered by start")
                if overlaps(prev.interval, p.interval):
                    raise ValidationError(
                        f"placements {prev.task_id!r} and {p.task_id!r} overlap on the machine"
                    )
            prev = p
        if self.horizon[0] > self.horizon[1]:
            raise ValidationError("horizon start must not exceed horizon end")

    @cached_property
    def task_map(self) -> Mapping[str, Task]:
        return {t.id: t for t in self.tasks}

    def task(self, task_id: str) -> Task:
        return self.task_map[task_id]

    @property
    def span(self) -> Interval:
        """First placement start to last placement end; (0, 0) when empty."""
        if not self.placements:
            return (0, 0)
        return (self.placements[0].start, self.placements[-1].end)


def empty_schedule(epoch: datetime, horizon: Interval = (0, 0)) -> Schedule:
    return Schedule(placements=(), tasks=(), epoch=epoch, horizon=horizon)


def subtract_busy(horizon: Interval, busy: Sequence[Interval]) -> list[Window]:
    """Maximal free intervals of ``horizon`` once ``busy`` is removed.

    Busy intervals must be pairwise disjoint; they are clipped to the
    horizon. The returned windows are indexed 1..n in time order, and
    free + busy partitions the horizon exactly.
    """
    lo, hi = horizon
    if lo > hi:
        raise ValidationError("horizon start must not exceed horizon end")
    ordered = sorted((a, b) for a, b in busy if a < b)
    for a, b in zip(ordered, ordered[1:]):
        if overlaps(a, b):
            raise ValidationError(f"busy intervals {a} and {b} overlap")
    free: list[Window] = []
    cursor = lo
    for a, b in ordered:
        a, b = max(a, lo), min(b, hi)
        if a >= b:
            continue
        if a > cursor:
            free.append(Window(cursor, a, len(free) + 1))
        cursor = max(cursor, b)
    if cursor < hi:
        free.append(Window(cursor, hi, len(free) + 1))
    return free


def merge_intervals(intervals: Iterable[Interval]) -> list[Interval]:
    """Union of half-open intervals as a sorted disjoint list."""
    merged: list[Interval] = []
    for a, b in sorted(intervals):
        if a >= b:
            continue
        if merged and a <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], b))
        else:
            merged.append((a, b))
    return merged
