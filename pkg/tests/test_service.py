import json

import pytest
from fastapi.testclient import TestClient

from gapsched.scenario_io import scenario_to_jsonable, serialize_scenario
from gapsched.service import SessionStore, create_app


@pytest.fixture()
def client():
    with TestClient(create_app()) as c:
        yield c


def make_session(client, scenario):
    resp = client.post("/sessions", json={"scenario": scenario_to_jsonable(scenario)})
    assert resp.status_code == 201
    return resp.json()


def empty_scenario_doc():
    return {
        "epoch": "2009-01-02T08:00:00Z",
        "horizon": {"start": "2009-01-02T08:00:00Z", "end": "2009-01-02T18:00:00Z"},
        "resources": [{"id": "R1", "competences": ["10"]}],
        "preventive_tasks": [],
        "dynamic_tasks": [],
    }


class TestHealthAndCreate:
    def test_healthz(self, client):
        resp = client.get("/healthz")
        assert resp.status_code == 200
        assert resp.json() == {"status": "ok"}

    def test_create_baseline(self, client, tableau1):
        body = make_session(client, tableau1.scenario)
        assert body["revision"] == 0
        assert body["totals"]["lost_cost"] == 13100
        assert body["totals"]["task_cost"] == 4600
        assert body["totals"]["global_cost"] == 17700
        assert body["gain"] == 0
        assert body["placement_count"] == 10
        assert body["window_count"] == 9
        assert body["unassigned"] == []

    def test_create_accepts_bare_scenario(self, client, tableau1):
        resp = client.post("/sessions", json=scenario_to_jsonable(tableau1.scenario))
        assert resp.status_code == 201
        assert resp.json()["totals"]["lost_cost"] == 13100

    def test_create_accepts_text_scenario(self, client, tableau1):
        resp = client.post(
            "/sessions", json={"scenario": serialize_scenario(tableau1.scenario)}
        )
        assert resp.status_code == 201

    def test_create_rejects_bad_scenario(self, client):
        resp = client.post("/sessions", json={"scenario": {"oops": True}})
        assert resp.status_code == 422

    def test_empty_scenario_zero_baseline(self, client):
        resp = client.post("/sessions", json={"scenario": empty_scenario_doc()})
        assert resp.status_code == 201
        body = resp.json()
        assert body["totals"]["lost_cost"] == 0
        assert body["placement_count"] == 0

    def test_unassignable_task_flagged(self, client):
        doc = empty_scenario_doc()
        doc["resources"] = [
            {
                "id": "R1",
                "competences": ["10"],
                "busy": [
                    {"start": "2009-01-02T08:00:00Z", "end": "2009-01-02T18:00:00Z"}
                ],
            }
        ]
        doc["preventive_tasks"] = [
            {
                "id": "T1",
                "title": "T1",
                "release": "2009-01-02T09:00:00Z",
                "due": "2009-01-02T10:00:00Z",
            }
        ]
        resp = client.post("/sessions", json={"scenario": doc})
        assert resp.status_code == 201
        assert resp.json()["unassigned"] == ["T1"]

    def test_unknown_session_404(self, client):
        for url in (
            "/sessions/nope/schedule",
            "/sessions/nope/windows",
            "/sessions/nope/costs",
        ):
            assert client.get(url).status_code == 404
        assert client.post("/sessions/nope/undo").status_code == 404
        assert (
            client.post("/sessions/nope/tasks", json={"duration_minutes": 60}).status_code
            == 404
        )


class TestReads:
    def test_schedule_snapshot(self, client, tableau1):
        sid = make_session(client, tableau1.scenario)["id"]
        body = client.get(f"/sessions/{sid}/schedule").json()
        assert body["session"] == sid
        assert body["revision"] == 0
        assert len(body["placements"]) == 10
        assert body["assignment"]["by_task"]["T3"] == "R2"
        assert body["placements"][0]["start"] == "2009-01-02T08:00:00Z"

    def test_windows_view(self, client, tableau1):
        sid = make_session(client, tableau1.scenario)["id"]
        body = client.get(f"/sessions/{sid}/windows").json()
        assert [w["minutes"] // 60 for w in body["windows"]] == [2, 40, 2, 10, 16, 2, 26, 9, 24]
        assert len(body["gap_rows"]) == 9

    def test_costs_view(self, client, tableau1):
        sid = make_session(client, tableau1.scenario)["id"]
        body = client.get(f"/sessions/{sid}/costs").json()
        assert body["totals"]["lost_cost"] == 13100
        assert body["baseline"]["lost_cost"] == 13100
        assert body["gain"] == 0
        assert body["trend"] == [13100]
        assert body["report"]["total_window_cost"] == 13100


class TestInsertions:
    def test_preview_documented_example(self, client, tableau1):
        sid = make_session(client, tableau1.scenario)["id"]
        resp = client.post(
            f"/sessions/{sid}/tasks?mode=preview",
            json={"task": {"title": "emergency", "duration_minutes": 2340}},
        )
        assert resp.status_code == 200
        body = resp.json()
        assert body["mode"] == "preview"
        assert body["window_index"] == 2
        assert body["appended"] is False
        assert (body["t1"], body["t2"]) == (0, 60)
        assert body["start_minute"] == 480
        assert body["end_minute"] == 2820
        assert body["gain"] == 3900
        assert body["totals"]["lost_cost"] == 9200
        assert body["revision"] == 0

    def test_preview_is_pure_and_idempotent(self, client, tableau1):
        sid = make_session(client, tableau1.scenario)["id"]
        url = f"/sessions/{sid}/tasks?mode=preview"
        payload = {"task": {"duration_minutes": 2340}}
        first = client.post(url, json=payload).json()
        second = client.post(url, json=payload).json()
        assert first == second
        after = client.get(f"/sessions/{sid}/schedule").json()
        assert after["revision"] == 0
        assert len(after["placements"]) == 10

    def test_three_commits_reach_published_total(self, client, run3dyn):
        sid = make_session(client, run3dyn.scenario)["id"]
        losses = []
        for task in run3dyn.scenario.dynamic_tasks:
            resp = client.post(
                f"/sessions/{sid}/tasks",
                json={
                    "task": {
                        "id": task.id,
                        "title": task.title,
                        "duration_minutes": task.duration,
                    }
                },
            )
            assert resp.status_code == 200
            losses.append(resp.json()["totals"]["lost_cost"])
        assert losses == [13000, 9100, 8300]
        body = client.get(f"/sessions/{sid}/costs").json()
        assert body["gain"] == 4800
        assert body["trend"] == [13100, 13000, 9100, 8300]
        assert body["revision"] == 3

    def test_nine_commits_snapshot_counts(self, client, run9dyn):
        sid = make_session(client, run9dyn.scenario)["id"]
        for task in run9dyn.scenario.dynamic_tasks:
            resp = client.post(
                f"/sessions/{sid}/tasks",
                json={"task": {"id": task.id, "duration_minutes": task.duration}},
            )
            assert resp.status_code == 200
        snap = client.get(f"/sessions/{sid}/schedule").json()
        assert len(snap["placements"]) == 19
        assert len(snap["gap_rows"]) == 18
        costs = client.get(f"/sessions/{sid}/costs").json()
        assert costs["totals"]["lost_cost"] <= 6100

    def test_auto_ids_allocated(self, client, tableau1):
        sid = make_session(client, tableau1.scenario)["id"]
        first = client.post(
            f"/sessions/{sid}/tasks", json={"task": {"duration_minutes": 60}}
        ).json()
        second = client.post(
            f"/sessions/{sid}/tasks", json={"task": {"duration_minutes": 60}}
        ).json()
        assert first["task_id"] == "TD1"
        assert second["task_id"] == "TD2"

    def test_stale_revision_conflict(self, client, tableau1):
        sid = make_session(client, tableau1.scenario)["id"]
        ok = client.post(
            f"/sessions/{sid}/tasks",
            json={"task": {"duration_minutes": 60}, "revision": 0},
        )
        assert ok.status_code == 200
        stale = client.post(
            f"/sessions/{sid}/tasks",
            json={"task": {"duration_minutes": 60}, "revision": 0},
        )
        assert stale.status_code == 409

    def test_policy_override(self, client, tableau1):
        sid = make_session(client, tableau1.scenario)["id"]
        body = client.post(
            f"/sessions/{sid}/tasks?mode=preview",
            json={"task": {"duration_minutes": 480}, "policy": "best-fit"},
        ).json()
        # best fit of 8h picks the 9h window, not the earliest 10h one
        assert body["start_minute"] == 8040

    def test_bad_policy_rejected(self, client, tableau1):
        sid = make_session(client, tableau1.scenario)["id"]
        resp = client.post(
            f"/sessions/{sid}/tasks",
            json={"task": {"duration_minutes": 60}, "policy": "worst-fit"},
        )
        assert resp.status_code == 422

    def test_bad_mode_rejected(self, client, tableau1):
        sid = make_session(client, tableau1.scenario)["id"]
        resp = client.post(
            f"/sessions/{sid}/tasks?mode=dryrun", json={"task": {"duration_minutes": 60}}
        )
        assert resp.status_code == 422

    def test_duplicate_task_id_rejected(self, client, tableau1):
        sid = make_session(client, tableau1.scenario)["id"]
        resp = client.post(
            f"/sessions/{sid}/tasks",
            json={"task": {"id": "T3", "duration_minutes": 60}},
        )
        assert resp.status_code == 422

    def test_append_flag_reported(self, client, tableau1):
        sid = make_session(client, tableau1.scenario)["id"]
        body = client.post(
            f"/sessions/{sid}/tasks", json={"task": {"duration_minutes": 41 * 60}}
        ).json()
        assert body["appended"] is True
        assert body["window_index"] is None
        assert body["start_minute"] == 10620


class TestUndo:
    def test_fresh_session_nothing_to_undo(self, client, tableau1):
        sid = make_session(client, tableau1.scenario)["id"]
        assert client.post(f"/sessions/{sid}/undo").status_code == 409

    def test_commit_then_undo_restores_baseline(self, client, tableau1):
        sid = make_session(client, tableau1.scenario)["id"]
        client.post(f"/sessions/{sid}/tasks", json={"task": {"duration_minutes": 2340}})
        body = client.post(f"/sessions/{sid}/undo")
        assert body.status_code == 200
        out = body.json()
        assert out["revision"] == 2  # undo is itself an event
        assert out["totals"]["lost_cost"] == 13100
        assert out["gain"] == 0

    def test_a_b_undo_leaves_a(self, client, run3dyn):
        sid = make_session(client, run3dyn.scenario)["id"]
        a, b = run3dyn.scenario.dynamic_tasks[:2]
        client.post(
            f"/sessions/{sid}/tasks",
            json={"task": {"id": a.id, "duration_minutes": a.duration}},
        )
        client.post(
            f"/sessions/{sid}/tasks",
            json={"task": {"id": b.id, "duration_minutes": b.duration}},
        )
        client.post(f"/sessions/{sid}/undo")
        costs = client.get(f"/sessions/{sid}/costs").json()
        assert costs["totals"]["lost_cost"] == 13000
        assert costs["trend"] == [13100, 13000]

    def test_undo_slot_reusable(self, client, tableau1):
        sid = make_session(client, tableau1.scenario)["id"]
        first = client.post(
            f"/sessions/{sid}/tasks", json={"task": {"duration_minutes": 2340}}
        ).json()
        client.post(f"/sessions/{sid}/undo")
        second = client.post(
            f"/sessions/{sid}/tasks", json={"task": {"duration_minutes": 2340}}
        ).json()
        assert second["start_minute"] == first["start_minute"]
        assert second["totals"] == first["totals"]


class TestEventLog:
    def test_restore_reproduces_state(self, tmp_path, run3dyn):
        log = tmp_path / "events.jsonl"
        with TestClient(create_app(event_log=log)) as client:
            sid = make_session(client, run3dyn.scenario)["id"]
            for task in run3dyn.scenario.dynamic_tasks:
                client.post(
                    f"/sessions/{sid}/tasks",
                    json={"task": {"id": task.id, "duration_minutes": task.duration}},
                )
            client.post(f"/sessions/{sid}/undo")
            before = client.get(f"/sessions/{sid}/costs").json()
        lines = [json.loads(x) for x in log.read_text().splitlines()]
        assert [x["event"] for x in lines] == ["create", "commit", "commit", "commit", "undo"]
        with TestClient(create_app(event_log=log)) as client:
            after = client.get(f"/sessions/{sid}/costs").json()
            assert after == before
            # the restored store keeps allocating fresh session ids
            new_sid = make_session(client, run3dyn.scenario)["id"]
            assert new_sid != sid

    def test_restore_is_not_relogged(self, tmp_path, tableau1):
        log = tmp_path / "events.jsonl"
        with TestClient(create_app(event_log=log)) as client:
            make_session(client, tableau1.scenario)
        size_once = log.read_text()
        with TestClient(create_app(event_log=log)):
            pass
        assert log.read_text() == size_once

    def test_store_restart_counter(self, tmp_path, tableau1):
        log = tmp_path / "events.jsonl"
        store = SessionStore(event_log=log)
        store.create(tableau1.scenario)
        store.create(tableau1.scenario)
        restored = SessionStore(event_log=log)
        fresh = restored.create(tableau1.scenario)
        assert fresh.id == "s3"


class TestTrend:
    def test_trend_is_monotone_for_in_window_commits(self, client, run9dyn):
        sid = make_session(client, run9dyn.scenario)["id"]
        for task in run9dyn.scenario.dynamic_tasks:
            body = client.post(
                f"/sessions/{sid}/tasks",
                json={"task": {"id": task.id, "duration_minutes": task.duration}},
            ).json()
            assert body["appended"] is False
        trend = client.get(f"/sessions/{sid}/costs").json()["trend"]
        assert all(a > b for a, b in zip(trend, trend[1:]))
