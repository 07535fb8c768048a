from pathlib import Path

import pytest

from gapsched.costing import global_cost
from gapsched.scenario_io import load_fixture, replay_schedule, schedule_scenario

REPO_ROOT = Path(__file__).resolve().parent.parent


@pytest.fixture(scope="session")
def repo_root() -> Path:
    return REPO_ROOT


@pytest.fixture(scope="session")
def tableau1():
    return load_fixture("tableau1")


@pytest.fixture(scope="session")
def run3dyn():
    return load_fixture("run3dyn")


@pytest.fixture(scope="session")
def run9dyn():
    return load_fixture("run9dyn")


@pytest.fixture(scope="session")
def baseline(tableau1):
    schedule, assignment = schedule_scenario(tableau1.scenario)
    return schedule, assignment, global_cost(schedule, tableau1.scenario.cost_params)


@pytest.fixture(scope="session")
def baseline_replay(tableau1):
    schedule = replay_schedule(tableau1)
    return schedule, global_cost(schedule, tableau1.scenario.cost_params)
