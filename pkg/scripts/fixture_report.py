#!/usr/bin/env python3
"""Print the full cost story for every embedded fixture.

For each fixture this replays the published placements, recomputes all
costs, and sets them side by side with the engine's own first-fit batch
run, so the published totals and the engine's behaviour can be compared
at a glance.

Usage: python3 scripts/fixture_report.py
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from gapsched.costing import format_money, format_percent, global_cost, reduction_percent
from gapsched.fixtures import FIXTURE_NAMES
from gapsched.scheduler import insert_batch, total_idle_minutes
from gapsched.scenario_io import load_fixture, replay_schedule, schedule_scenario


def main() -> int:
    baseline_bundle = load_fixture("tableau1")
    baseline_schedule, _ = schedule_scenario(baseline_bundle.scenario)
    baseline = global_cost(baseline_schedule, baseline_bundle.scenario.cost_params)
    print(f"baseline lost cost {format_money(baseline.total_window_cost)} "
          f"({total_idle_minutes(baseline_schedule) // 60} h idle)")
    print()
    header = (
        f"{'fixture':<10} {'dyn':>3} {'published':>10} {'engine':>10} "
        f"{'published %':>11} {'engine %':>9}"
    )
    print(header)
    print("-" * len(header))
    for name in FIXTURE_NAMES:
        bundle = load_fixture(name)
        params = bundle.scenario.cost_params
        replayed = global_cost(replay_schedule(bundle), params)
        batch = insert_batch(
            baseline_schedule,
            bundle.scenario.dynamic_tasks,
            bundle.scenario.resources,
            bundle.scenario.policy,
        )
        engine = global_cost(batch.schedule, params)
        published_pct = format_percent(reduction_percent(baseline, replayed))
        engine_pct = format_percent(reduction_percent(baseline, engine))
        print(
            f"{name:<10} {len(bundle.scenario.dynamic_tasks):>3} "
            f"{format_money(replayed.total_window_cost):>10} "
            f"{format_money(engine.total_window_cost):>10} "
            f"{published_pct:>10}% {engine_pct:>8}%"
        )
        if batch.appended_ids:
            print(f"{'':<10} engine appended out-of-window: {', '.join(batch.appended_ids)}")
    print()
    print("published = verbatim replay of the upstream run; engine = our first-fit batch")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
