"""Regenerate the committed files under fixtures/ from the embedded data.

Run from the repository root: python scripts/write_fixtures.py
"""

from __future__ import annotations

import json
from pathlib import Path

from gapsched.costing import format_rational
from gapsched.domain import hours, minutes_cost
from gapsched.fixtures import EXPECTED
from gapsched.scenario_io import load_fixture, serialize_scenario

ROOT = Path(__file__).resolve().parent.parent
OUT = ROOT / "fixtures"

CSV_DATE = "%d/%m/%Y %H:%M"


def write_scenario_json() -> None:
    scenario = load_fixture("tableau1").scenario
    (OUT / "tableau1.json").write_text(serialize_scenario(scenario), encoding="utf-8")


def write_dynamics_json(name: str, filename: str) -> None:
    scenario = load_fixture(name).scenario
    rows = [
        {"id": t.id, "title": t.title, "duration_minutes": t.duration}
        for t in scenario.dynamic_tasks
    ]
    text = json.dumps({"dynamic_tasks": rows}, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    (OUT / filename).write_text(text, encoding="utf-8")


def write_tableau1_csv() -> None:
    bundle = load_fixture("tableau1")
    scenario = bundle.scenario
    notes = {r.id: r.note for r in scenario.resources}
    lines = ["N°\tDurée\tDébut\tFin\tCoût\tRessource\ttype"]
    tasks = {t.id: t for t in scenario.preventive_tasks}
    for row in EXPECTED["tableau1"].placements:
        task = tasks[row.task_id]
        start = scenario.epoch.timestamp() + row.start * 60
        from datetime import datetime, timezone

        begin = datetime.fromtimestamp(start, tz=timezone.utc).strftime(CSV_DATE)
        end = datetime.fromtimestamp(start + task.duration * 60, tz=timezone.utc).strftime(CSV_DATE)
        note = format_rational(notes[row.resource_id]).replace(".", ",")
        cost = minutes_cost(task.duration, scenario.cost_params.hourly_rate)
        lines.append(
            f"{task.id}\t{format_rational(hours(task.duration))}\t{begin}\t{end}"
            f"\t{cost}\t{row.resource_id}={note}\tpreventive"
        )
    (OUT / "tableau1.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")


def main() -> None:
    OUT.mkdir(exist_ok=True)
    write_scenario_json()
    write_dynamics_json("run3dyn", "dyn3.json")
    write_dynamics_json("run9dyn", "dyn9.json")
    write_tableau1_csv()
    for path in sorted(OUT.iterdir()):
        print(f"wrote {path.relative_to(ROOT)} ({path.stat().st_size} bytes)")


if __name__ == "__main__":
    main()
