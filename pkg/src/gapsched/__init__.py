"""Single-machine maintenance scheduling around idle windows.

Preventive tasks fix the timeline; the gaps between them are priced as
lost time, and corrective tasks arriving live are slotted into those gaps
to claw the cost back. Exact minute/rational arithmetic throughout.
"""

from .costing import (
    CostReport,
    DeviationPenalties,
    Direction,
    check_performance_objective,
    deviation_cost,
    gain,
    global_cost,
    lost_cost,
    reduction_percent,
    task_cost,
)
from .domain import (
    CostParams,
    Kind,
    Placement,
    Resource,
    Schedule,
    Task,
    ValidationError,
    Window,
    subtract_busy,
    window_length,
)
from .scheduler import (
    Assignment,
    InsertionPolicy,
    InsertionResult,
    SchedulabilityReport,
    assign_resources,
    build_schedule,
    check_schedulability,
    compute_windows,
    find_window,
    insert_batch,
    insert_dynamic,
    rank_resources,
    sort_tasks,
)
from .scenario_io import (
    Scenario,
    export_gantt,
    load_fixture,
    parse_scenario,
    replay_schedule,
    schedule_scenario,
    serialize_scenario,
)

__all__ = [
    "Assignment",
    "CostParams",
    "CostReport",
    "DeviationPenalties",
    "Direction",
    "InsertionPolicy",
    "InsertionResult",
    "Kind",
    "Placement",
    "Resource",
    "SchedulabilityReport",
    "Scenario",
    "Schedule",
    "Task",
    "ValidationError",
    "Window",
    "assign_resources",
    "build_schedule",
    "check_performance_objective",
    "check_schedulability",
    "compute_windows",
    "deviation_cost",
    "export_gantt",
    "find_window",
    "gain",
    "global_cost",
    "insert_batch",
    "insert_dynamic",
    "load_fixture",
    "lost_cost",
    "parse_scenario",
    "rank_resources",
    "reduction_percent",
    "replay_schedule",
    "schedule_scenario",
    "serialize_scenario",
    "sort_tasks",
    "subtract_busy",
    "task_cost",
    "window_length",
]

__version__ = "0.1.0"
