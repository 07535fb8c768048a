#!/usr/bin/env python3
"""Study how lost cost falls as dynamic tasks are inserted one by one.

Replays the nine-dynamic fixture workload incrementally under both
window-selection policies and prints the lost-cost trajectory, the gain
per step, and the policy disagreement (if any). The curve should fall
monotonically while insertions keep landing inside windows.

Usage: python3 scripts/insertion_experiment.py [--policy first-fit|best-fit]
"""

import argparse
import sys
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from gapsched.costing import format_money, format_percent, global_cost
from gapsched.scheduler import InsertionPolicy, insert_dynamic
from gapsched.scenario_io import load_fixture, schedule_scenario


def trajectory(policy: InsertionPolicy) -> list[tuple[str, int, object]]:
    bundle = load_fixture("run9dyn")
    params = bundle.scenario.cost_params
    schedule, _ = schedule_scenario(bundle.scenario)
    out = [("baseline", None, global_cost(schedule, params).total_window_cost)]
    for task in bundle.scenario.dynamic_tasks:
        result = insert_dynamic(schedule, task, bundle.scenario.resources, policy)
        schedule = result.schedule
        where = "appended" if result.appended else f"window {result.window_index}"
        out.append((task.id, where, global_cost(schedule, params).total_window_cost))
    return out


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--policy",
        choices=[p.value for p in InsertionPolicy if p is not InsertionPolicy.APPEND],
        default=None,
        help="run a single policy instead of comparing both",
    )
    args = parser.parse_args()
    policies = (
        [InsertionPolicy(args.policy)]
        if args.policy
        else [InsertionPolicy.FIRST_FIT, InsertionPolicy.BEST_FIT]
    )
    runs = {p: trajectory(p) for p in policies}
    baseline = runs[policies[0]][0][2]
    print(f"{'step':<10}" + "".join(f"{p.value:>22}" for p in policies))
    for i in range(len(runs[policies[0]])):
        label = runs[policies[0]][i][0]
        cells = []
        for p in policies:
            task_id, where, lost = runs[p][i]
            cell = format_money(lost) if where is None else f"{format_money(lost)} ({where})"
            cells.append(f"{cell:>22}")
        print(f"{label:<10}" + "".join(cells))
    print()
    for p in policies:
        final = runs[p][-1][2]
        steps = [lost for _, _, lost in runs[p]]
        monotone = all(a >= b for a, b in zip(steps, steps[1:]))
        pct = format_percent(Fraction(baseline - final, baseline) * 100)
        print(
            f"{p.value}: final lost cost {format_money(final)},"
            f" reduction {pct}%, monotone={monotone}"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
