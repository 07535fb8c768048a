"""Cost evaluation: idle-window lost cost, per-task cost, due-window
deviation penalties, the combined report, and gain against a baseline.

Fixture mode prices a task at duration x hourly rate; the deviation model
(tardiness/earliness rates around a due window plus a flat base cost) is
opt-in per task via DeviationPenalties.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Mapping, Sequence

from .domain import (
    CostParams,
    Kind,
    Minutes,
    Money,
    Placement,
    Schedule,
    Task,
    ValidationError,
    hours,
    minutes_cost,
    normalize_rational,
)
from .scheduler import compute_gap_rows


class Direction(str, Enum):
    AT_MOST = "at-most"
    AT_LEAST = "at-least"


@dataclass(frozen=True)
class DeviationPenalties:
    """Per-task deviation pricing around a due window.

    Completions after ``latest_due`` pay the tardiness rate per hour late;
    completions before ``earliest_due`` pay the earliness rate per hour
    early; inside the window only the flat base cost remains.
    """

    tardiness_rate: int
    earliness_rate: int
    base_cost: int
    earliest_due: Minutes
    latest_due: Minutes

    def __post_init__(self) -> None:
        if self.tardiness_rate < 0 or self.earliness_rate < 0:
            raise ValidationError("penalty rates must be non-negative")
        if self.earliest_due > self.latest_due:
            raise ValidationError("due window must satisfy earliest <= latest")


@dataclass(frozen=True)
class WindowRow:
    index: int
    minutes: Minutes
    cost: Money

    @property
    def hours(self) -> Money:
        return hours(self.minutes)


@dataclass(frozen=True)
class TaskRow:
    task_id: str
    minutes: Minutes
    cost: Money
    resource_id: str | None
    kind: Kind

    @property
    def hours(self) -> Money:
        return hours(self.minutes)


@dataclass(frozen=True)
class CostReport:
    """Window rows, task rows, and their exact totals."""

    window_rows: tuple[WindowRow, ...]
    task_rows: tuple[TaskRow, ...]
    total_window_cost: Money
    total_task_cost: Money
    global_cost: Money
    currency_label: str = "DHS"

    def __post_init__(self) -> None:
        if self.global_cost != self.total_window_cost + self.total_task_cost:
            raise ValidationError("global cost must equal window total plus task total")
        if self.total_window_cost != sum(r.cost for r in self.window_rows):
            raise ValidationError("window total must equal the sum of its rows")
        if self.total_task_cost != sum(r.cost for r in self.task_rows):
            raise ValidationError("task total must equal the sum of its rows")


def lost_cost(schedule: Schedule, params: CostParams) -> Money:
    """Idle time between consecutive placements, priced per hour."""
    idle = sum(row.minutes for row in compute_gap_rows(schedule))
    return minutes_cost(idle, params.hourly_rate)


def task_cost(task: Task, params: CostParams) -> Money:
    return minutes_cost(task.duration, params.hourly_rate)


def deviation_cost(task: Task, placement: Placement, penalties: DeviationPenalties) -> Money:
    """Tardiness/earliness deviation of the completion against the due window.

    theta_plus = max(0, completion - latest_due) and theta_minus =
    max(0, earliest_due - completion); at most one is nonzero. The result
    is tardiness_rate * theta_plus + earliness_rate * theta_minus (rates per
    hour, deviations exact in minutes) plus the flat base cost.
    """
    completion = placement.end
    theta_plus = max(0, completion - penalties.latest_due)
    theta_minus = max(0, penalties.earliest_due - completion)
    value = (
        Fraction(penalties.tardiness_rate * theta_plus, 60)
        + Fraction(penalties.earliness_rate * theta_minus, 60)
        + penalties.base_cost
    )
    return normalize_rational(value)


def global_cost(
    schedule: Schedule,
    params: CostParams,
    penalties: Mapping[str, DeviationPenalties] | None = None,
) -> CostReport:
    """Full report: one row per gap (zero-length included) and per placement.

    Tasks with an entry in ``penalties`` are priced by deviation_cost;
    the rest at duration x rate.
    """
    window_rows = tuple(
        WindowRow(index=row.index, minutes=row.minutes, cost=minutes_cost(row.minutes, params.hourly_rate))
        for row in compute_gap_rows(schedule)
    )
    task_rows = []
    for placement in schedule.placements:
        task = schedule.task(placement.task_id)
        if penalties and task.id in penalties:
            cost = deviation_cost(task, placement, penalties[task.id])
        else:
            cost = task_cost(task, params)
        task_rows.append(
            TaskRow(
                task_id=task.id,
                minutes=placement.duration,
                cost=cost,
                resource_id=placement.resource_id,
                kind=task.kind,
            )
        )
    total_window = normalize_rational(Fraction(sum(r.cost for r in window_rows)))
    total_task = normalize_rational(Fraction(sum(r.cost for r in task_rows)))
    return CostReport(
        window_rows=window_rows,
        task_rows=tuple(task_rows),
        total_window_cost=total_window,
        total_task_cost=total_task,
        global_cost=normalize_rational(Fraction(total_window + total_task)),
        currency_label=params.currency_label,
    )


def gain(before: CostReport, after: CostReport) -> Money:
    """Lost-cost drop between two reports of the same scenario."""
    if before.currency_label != after.currency_label:
        raise ValidationError("reports use different currencies")
    return normalize_rational(Fraction(before.total_window_cost - after.total_window_cost))


def reduction_percent(before: CostReport, after: CostReport) -> Fraction:
    """Lost-cost reduction as an exact percentage of the baseline."""
    if before.total_window_cost == 0:
        return Fraction(0)
    return Fraction(gain(before, after)) / Fraction(before.total_window_cost) * 100


def format_percent(value: Fraction, decimals: int = 1) -> str:
    """Half-up fixed-point rendering, e.g. Fraction(4800,13100)*100 -> '36.6'."""
    scale = 10**decimals
    scaled = (value * scale + Fraction(1, 2)).__floor__()
    whole, frac = divmod(scaled, scale)
    return f"{whole}.{frac:0{decimals}d}" if decimals else str(whole)


def check_performance_objective(
    value: Money,
    objective: Money,
    direction: Direction,
    *,
    value_unit: str | None = None,
    objective_unit: str | None = None,
) -> bool:
    """Compare a measured performance against its imposed objective.

    Duration/cost objectives bound from above (AT_MOST); quality-style
    objectives from below (AT_LEAST). Mismatched units are rejected.
    """
    if value_unit is not None and objective_unit is not None and value_unit != objective_unit:
        raise ValidationError(f"unit mismatch: {value_unit!r} vs {objective_unit!r}")
    if direction is Direction.AT_MOST:
        return value <= objective
    return value >= objective


def format_money(value: Money) -> str:
    if isinstance(value, int):
        return str(value)
    return format_rational(value)


def format_rational(value: Money) -> str:
    """Exact text: ints plainly, terminating decimals trimmed, else num/den."""
    if isinstance(value, int):
        return str(value)
    den = value.denominator
    while den % 2 == 0:
        den //= 2
    while den % 5 == 0:
        den //= 5
    if den == 1:
        digits = 0
        den = value.denominator
        while den % 2 == 0:
            den //= 2
            digits += 1
        twos = digits
        digits = 0
        while den % 5 == 0:
            den //= 5
            digits += 1
        places = max(twos, digits)
        scaled = value * 10**places
        text = f"{int(scaled):0{places + 1}d}"
        return f"{text[:-places]}.{text[-places:]}" if places else text
    return f"{value.numerator}/{value.denominator}"


def render_window_block(report: CostReport) -> str:
    """The aligned gap-hours block, one 'fenetre N°k h' line per gap row."""
    lines = [f"fenetre N°{row.index} {format_rational(row.hours)}" for row in report.window_rows]
    return "\n".join(lines)


def render_totals(report: CostReport) -> str:
    return "\n".join(
        [
            f"Cout Total fenetre {format_money(report.total_window_cost)}",
            f"Cout Total Taches {format_money(report.total_task_cost)}",
            f"Cout Global {format_money(report.global_cost)}",
        ]
    )


def report_to_jsonable(report: CostReport) -> dict:
    """JSON-ready dict with exact numbers (ints, or 'p/q' strings)."""
    return {
        "currency_label": report.currency_label,
        "window_rows": [
            {
                "index": r.index,
                "minutes": r.minutes,
                "hours": money_to_jsonable(r.hours),
                "cost": money_to_jsonable(r.cost),
            }
            for r in report.window_rows
        ],
        "task_rows": [
            {
                "task_id": r.task_id,
                "minutes": r.minutes,
                "hours": money_to_jsonable(r.hours),
                "cost": money_to_jsonable(r.cost),
                "resource": r.resource_id,
                "kind": r.kind.value,
            }
            for r in report.task_rows
        ],
        "total_window_cost": money_to_jsonable(report.total_window_cost),
        "total_task_cost": money_to_jsonable(report.total_task_cost),
        "global_cost": money_to_jsonable(report.global_cost),
    }


def money_to_jsonable(value: Money) -> int | str:
    if isinstance(value, int):
        return value
    return f"{value.numerator}/{value.denominator}"


def report_from_jsonable(obj: dict) -> CostReport:
    """Rebuild a CostReport from its wire form (inverse of report_to_jsonable)."""
    try:
        window_rows = tuple(
            WindowRow(index=r["index"], minutes=r["minutes"], cost=money_from_jsonable(r["cost"]))
            for r in obj["window_rows"]
        )
        task_rows = tuple(
            TaskRow(
                task_id=r["task_id"],
                minutes=r["minutes"],
                cost=money_from_jsonable(r["cost"]),
                resource_id=r["resource"],
                kind=Kind(r["kind"]),
            )
            for r in obj["task_rows"]
        )
        return CostReport(
            window_rows=window_rows,
            task_rows=task_rows,
            total_window_cost=money_from_jsonable(obj["total_window_cost"]),
            total_task_cost=money_from_jsonable(obj["total_task_cost"]),
            global_cost=money_from_jsonable(obj["global_cost"]),
            currency_label=obj["currency_label"],
        )
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"not a cost report document: {exc}") from None


def money_from_jsonable(value: int | str | float) -> Money:
    if isinstance(value, bool):
        raise ValidationError(f"not a money value: {value!r}")
    if isinstance(value, int):
        return value
    if isinstance(value, str) and "/" in value:
        num, den = value.split("/", 1)
        return normalize_rational(Fraction(int(num), int(den)))
    try:
        return normalize_rational(Fraction(str(value)))
    except (ValueError, ZeroDivisionError):
        raise ValidationError(f"not a money value: {value!r}") from None
