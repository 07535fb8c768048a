"""Embedded benchmark dataset: ten preventive tasks on one machine over a
Friday-to-Friday span (epoch 2009-01-02 08:00 UTC), ten resources with a
single competence note each, and two corrective runs (3 and 9 arrivals).

The upstream dataset's published rows are kept verbatim: placements as
minute intervals under each run's ``placements``, printed totals under
``as_printed``. Rows where the printed number contradicts the dataset's
own arithmetic are listed in ``discrepancies`` instead of being corrected,
so tests can assert both fidelity and strict recomputation.
"""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping

from .domain import Minutes, ValidationError

EPOCH_ISO = "2009-01-02T08:00:00Z"
HORIZON_MINUTES: tuple[Minutes, Minutes] = (0, 10620)
HOURLY_RATE = 100
CURRENCY = "DHS"

FIXTURE_NAMES = ("tableau1", "run3dyn", "run9dyn")

# id, release, due (minutes since epoch); duration == due - release
PREVENTIVE_ROWS: tuple[tuple[str, Minutes, Minutes], ...] = (
    ("T1", 0, 120),
    ("T2", 240, 480),
    ("T3", 2880, 3360),
    ("T4", 3480, 3720),
    ("T5", 4320, 4800),
    ("T6", 5760, 6060),
    ("T7", 6180, 6420),
    ("T8", 7980, 8040),
    ("T9", 8580, 9000),
    ("T10", 10440, 10620),
)

# id, competence note (text form keeps 12.5 and 15.75 exact)
RESOURCE_ROWS: tuple[tuple[str, str], ...] = (
    ("R1", "12.5"),
    ("R2", "19"),
    ("R3", "15"),
    ("R4", "14"),
    ("R5", "17"),
    ("R6", "16"),
    ("R7", "8"),
    ("R8", "15.75"),
    ("R9", "18"),
    ("R10", "6"),
)

# id, duration in minutes, arrival order as listed
DYNAMIC_ROWS_3: tuple[tuple[str, Minutes], ...] = (
    ("TD1", 60),
    ("TD2", 2340),
    ("TD3", 480),
)

DYNAMIC_ROWS_9: tuple[tuple[str, Minutes], ...] = (
    ("TD1", 60),
    ("TD2", 2340),
    ("TD3", 480),
    ("TD4", 60),
    ("TD5", 120),
    ("TD6", 180),
    ("TD7", 540),
    ("TD8", 480),
    ("TD9", 120),
)


@dataclass(frozen=True)
class PublishedPlacement:
    """One row of a published run: where the task sat and who served it."""

    task_id: str
    start: Minutes
    end: Minutes
    resource_id: str


@dataclass(frozen=True)
class FixtureExpected:
    """Published outcome of one run plus strictly recomputed companions."""

    name: str
    placements: tuple[PublishedPlacement, ...]
    gap_hours: tuple[int, ...]
    lost_cost: int
    task_total_from_rows: int
    as_printed: Mapping[str, object]
    discrepancies: tuple[str, ...] = ()

    @property
    def global_cost_strict(self) -> int:
        return self.lost_cost + self.task_total_from_rows


# Baseline table: the ten preventives and their printed bindings.
_TABLEAU1_PLACEMENTS = (
    PublishedPlacement("T1", 0, 120, "R8"),
    PublishedPlacement("T2", 240, 480, "R7"),
    PublishedPlacement("T3", 2880, 3360, "R2"),
    PublishedPlacement("T4", 3480, 3720, "R3"),
    PublishedPlacement("T5", 4320, 4800, "R9"),
    PublishedPlacement("T6", 5760, 6060, "R6"),
    PublishedPlacement("T7", 6180, 6420, "R4"),
    PublishedPlacement("T8", 7980, 8040, "R10"),
    PublishedPlacement("T9", 8580, 9000, "R5"),
    PublishedPlacement("T10", 10440, 10620, "R1"),
)

# Run with three corrective arrivals, rows in published start order.
_RUN3_PLACEMENTS = (
    PublishedPlacement("T1", 0, 120, "R7"),
    PublishedPlacement("TD1", 120, 180, "R2"),
    PublishedPlacement("T2", 240, 480, "R4"),
    PublishedPlacement("TD2", 540, 2880, "R9"),
    PublishedPlacement("T3", 2880, 3360, "R2"),
    PublishedPlacement("T4", 3480, 3720, "R3"),
    PublishedPlacement("TD3", 3780, 4260, "R5"),
    PublishedPlacement("T5", 4320, 4800, "R9"),
    PublishedPlacement("T6", 5760, 6060, "R6"),
    PublishedPlacement("T7", 6180, 6420, "R8"),
    PublishedPlacement("T8", 7980, 8040, "R10"),
    PublishedPlacement("T9", 8580, 9000, "R5"),
    PublishedPlacement("T10", 10440, 10620, "R1"),
)

# Run with nine corrective arrivals; TD9 lands past the last preventive.
_RUN9_PLACEMENTS = (
    PublishedPlacement("T1", 0, 120, "R7"),
    PublishedPlacement("TD1", 120, 180, "R1"),
    PublishedPlacement("T2", 240, 480, "R4"),
    PublishedPlacement("TD2", 540, 2880, "R2"),
    PublishedPlacement("T3", 2880, 3360, "R2"),
    PublishedPlacement("TD4", 3360, 3420, "R7"),
    PublishedPlacement("T4", 3480, 3720, "R3"),
    PublishedPlacement("TD3", 3780, 4260, "R5"),
    PublishedPlacement("T5", 4320, 4800, "R9"),
    PublishedPlacement("TD5", 4800, 4920, "R3"),
    PublishedPlacement("T6", 5760, 6060, "R6"),
    PublishedPlacement("T7", 6180, 6420, "R8"),
    PublishedPlacement("TD6", 6480, 6660, "R8"),
    PublishedPlacement("TD7", 7200, 7740, "R9"),
    PublishedPlacement("T8", 7980, 8040, "R10"),
    PublishedPlacement("T9", 8580, 9000, "R5"),
    PublishedPlacement("TD8", 9060, 9540, "R6"),
    PublishedPlacement("T10", 10440, 10620, "R1"),
    PublishedPlacement("TD9", 10680, 10800, "R4"),
)

EXPECTED: Mapping[str, FixtureExpected] = MappingProxyType(
    {
        "tableau1": FixtureExpected(
            name="tableau1",
            placements=_TABLEAU1_PLACEMENTS,
            gap_hours=(2, 40, 2, 10, 16, 2, 26, 9, 24),
            lost_cost=13100,
            task_total_from_rows=4600,
            as_printed=MappingProxyType(
                {
                    "window_costs": (200, 4000, 200, 1100, 1500, 200, 2600, 900, 2400),
                    "lost_cost": 13100,
                    "lost_cost_formula": "131*100=13100",
                    "task_total": 4600,
                }
            ),
            discrepancies=(
                "printed window costs 1100 and 1500 contradict their own gap"
                " hours (10 h and 16 h price to 1000 and 1600); the transposed"
                " pair leaves the 13100 total intact",
            ),
        ),
        "run3dyn": FixtureExpected(
            name="run3dyn",
            placements=_RUN3_PLACEMENTS,
            gap_hours=(0, 1, 1, 0, 2, 1, 1, 16, 2, 26, 9, 24),
            lost_cost=8300,
            task_total_from_rows=9400,
            as_printed=MappingProxyType(
                {
                    "window_total": 8300,
                    "task_total": 9000,
                    "global_cost": 17300,
                    "reduction_percent": 37,
                }
            ),
            discrepancies=(
                "printed task total 9000 does not match the sum of the"
                " printed task rows (9400)",
            ),
        ),
        "run9dyn": FixtureExpected(
            name="run9dyn",
            placements=_RUN9_PLACEMENTS,
            gap_hours=(0, 1, 1, 0, 0, 1, 1, 1, 0, 14, 2, 1, 9, 4, 9, 1, 15, 1),
            lost_cost=6100,
            task_total_from_rows=11900,
            as_printed=MappingProxyType(
                {
                    "window_total": 6100,
                    "task_total": 10000,
                    "global_cost": 16100,
                    "reduction_percent": 54,
                }
            ),
            discrepancies=(
                "printed task total 10000 does not match the sum of the task"
                " rows (11900 after restoring the three misprinted rows)",
                "printed costs for the 1 h, 1 h and 2 h correctives read 300,"
                " 200 and 100; duration times rate gives 100, 100 and 200",
                "the 8 h corrective row is printed without a cost",
            ),
        ),
    }
)


def dynamic_rows(name: str) -> tuple[tuple[str, Minutes], ...]:
    if name == "tableau1":
        return ()
    if name == "run3dyn":
        return DYNAMIC_ROWS_3
    if name == "run9dyn":
        return DYNAMIC_ROWS_9
    raise ValidationError(f"unknown fixture {name!r}; expected one of {', '.join(FIXTURE_NAMES)}")
