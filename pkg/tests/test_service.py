"""Play service protocol: sessions, commands, rejections, undo, export."""

from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from voxelplan.planio import parse_plan
from voxelplan.service import PlayService, ProtocolError, create_app
from voxelplan.simulator import Simulator
from voxelplan.suite import build_task
from voxelplan.task import serialize_task
from voxelplan.world import build_initial_world


@pytest.fixture(scope="module")
def move_yaml() -> str:
    return serialize_task(build_task("move", "easy").spec)


@pytest.fixture()
def client(move_yaml) -> TestClient:
    return TestClient(create_app(default_task_yaml=move_yaml))


def _start(client: TestClient, **kwargs) -> dict:
    response = client.post("/sessions", json=kwargs or {})
    assert response.status_code == 201, response.text
    return response.json()


class TestSessionLifecycle:
    def test_start_returns_initial_state(self, client):
        state = _start(client)
        assert state["v"] == 1
        assert state["outcome"] is None
        assert state["trace_len"] == 0
        assert not state["goal_satisfied"]
        assert state["world"]["agent"] == {"x": 0, "y": 4, "z": 0, "alive": True}
        assert "move-north" in state["applicable"]
        assert any(b["type"] == "grass_block" for b in state["world"]["blocks"])

    def test_checklist_mirrors_goal(self, client):
        state = _start(client)
        assert state["checklist"] == [
            {"kind": "agent", "target": {"x": 0, "y": 4, "z": -5}, "met": False}
        ]

    def test_invalid_task_rejected_with_report(self, client, move_yaml):
        bad = move_yaml.replace("name: move-easy", "name: broken") + (
            "blocks:\n- position: {x: 99, y: 4, z: 0}\n  type: stone\n"
        )
        response = client.post("/sessions", json={"task_yaml": bad})
        assert response.status_code == 400
        body = response.json()
        assert body["error"] == "invalid-task"
        assert "outside observation range" in body["detail"]

    def test_unparseable_task_rejected(self, client):
        response = client.post("/sessions", json={"task_yaml": "not: [valid"})
        assert response.status_code == 400

    def test_no_task_no_default(self, move_yaml):
        bare = TestClient(create_app())
        response = bare.post("/sessions", json={})
        assert response.status_code == 400
        assert response.json()["error"] == "no-task"
        response = bare.post("/sessions", json={"task_yaml": move_yaml})
        assert response.status_code == 201

    def test_sessions_are_independent(self, client):
        a = _start(client)["session"]
        b = _start(client)["session"]
        assert a != b
        with client.websocket_connect(f"/session/{a}") as socket:
            socket.receive_json()
            socket.send_json({"v": 1, "command": "move-north"})
            assert socket.receive_json()["outcome"] == "ok"
        state_b = client.get(f"/sessions/{b}/state").json()
        assert state_b["trace_len"] == 0
        assert state_b["world"]["agent"]["z"] == 0

    def test_unknown_session_state_and_plan(self, client):
        assert client.get("/sessions/nope/state").status_code == 404
        assert client.get("/sessions/nope/plan").status_code == 404

    def test_root_info(self, client):
        body = client.get("/").json()
        assert body["service"] == "voxelplan-play"
        assert body["default_task"] is True


class TestCommands:
    def test_accepted_move_advances_agent(self, client):
        sid = _start(client)["session"]
        with client.websocket_connect(f"/session/{sid}") as socket:
            socket.receive_json()
            socket.send_json({"v": 1, "seq": 7, "command": "move-north"})
            state = socket.receive_json()
        assert state["outcome"] == "ok"
        assert state["seq"] == 7
        assert state["world"]["agent"]["z"] == -1
        assert state["trace_len"] == 1

    def test_rejection_carries_reason_id_and_keeps_state(self, client):
        sid = _start(client)["session"]
        with client.websocket_connect(f"/session/{sid}") as socket:
            socket.receive_json()
            socket.send_json({"v": 1, "command": "jumpup-north"})
            state = socket.receive_json()
        assert state["outcome"] == "rejected"
        assert state["reason"] == "no-support"
        assert state["trace_len"] == 0
        assert state["world"]["agent"]["z"] == 0

    def test_malformed_commands_are_protocol_errors(self, client):
        sid = _start(client)["session"]
        with client.websocket_connect(f"/session/{sid}") as socket:
            socket.receive_json()
            socket.send_text("{oops")
            assert "not JSON" in socket.receive_json()["error"]
            socket.send_json({"v": 1, "command": "fly-north"})
            assert socket.receive_json()["error"]
            socket.send_json({"v": 2, "command": "move-north"})
            assert "version" in socket.receive_json()["error"]
            socket.send_json({"v": 1, "command": ""})
            assert socket.receive_json()["error"] == "missing command field"
            socket.send_json({"v": 1, "seq": "x", "command": "move-north"})
            assert "seq" in socket.receive_json()["error"]
            # The session survives protocol noise.
            socket.send_json({"v": 1, "command": "move-north"})
            assert socket.receive_json()["outcome"] == "ok"

    def test_unknown_session_socket_closes(self, client):
        with client.websocket_connect("/session/ghost") as socket:
            assert socket.receive_json()["error"] == "unknown-session"

    def test_goal_completion_flips_flag(self, client):
        sid = _start(client)["session"]
        with client.websocket_connect(f"/session/{sid}") as socket:
            socket.receive_json()
            for i in range(5):
                socket.send_json({"v": 1, "command": "move-north"})
                state = socket.receive_json()
                assert state["goal_satisfied"] == (i == 4)
        assert state["checklist"][0]["met"]

    def test_undo_truncates_and_replays(self, client):
        sid = _start(client)["session"]
        with client.websocket_connect(f"/session/{sid}") as socket:
            socket.receive_json()
            for _ in range(3):
                socket.send_json({"v": 1, "command": "move-north"})
                socket.receive_json()
            socket.send_json({"v": 1, "command": "undo"})
            state = socket.receive_json()
        assert state["outcome"] == "ok"
        assert state["trace_len"] == 2
        assert state["world"]["agent"]["z"] == -2

    def test_undo_on_empty_trace_is_noop(self, client):
        sid = _start(client)["session"]
        with client.websocket_connect(f"/session/{sid}") as socket:
            socket.receive_json()
            socket.send_json({"v": 1, "command": "undo"})
            state = socket.receive_json()
        assert state["outcome"] == "ok"
        assert state["trace_len"] == 0


class TestExport:
    def test_export_verifies_from_initial_state(self, client, move_yaml):
        sid = _start(client)["session"]
        with client.websocket_connect(f"/session/{sid}") as socket:
            socket.receive_json()
            for command in ["move-north", "jumpup-north", "move-north", "move-east"]:
                socket.send_json({"v": 1, "command": command})
                socket.receive_json()
        text = client.get(f"/sessions/{sid}/plan").text
        plan = parse_plan(text)
        assert [a.name for a in plan] == ["move-north", "move-north", "move-east"]
        assert "; goal-satisfied: false" in text
        task = build_task("move", "easy").spec
        world = build_initial_world(task)
        result = Simulator(world, task.goal).run_plan(plan)
        assert result.failing_index is None

    def test_completed_session_export_carries_true_trailer(self, client):
        sid = _start(client)["session"]
        with client.websocket_connect(f"/session/{sid}") as socket:
            socket.receive_json()
            for _ in range(5):
                socket.send_json({"v": 1, "command": "move-north"})
                socket.receive_json()
        text = client.get(f"/sessions/{sid}/plan").text
        assert text.endswith("; goal-satisfied: true\n")
        assert len(parse_plan(text)) == 5

    def test_empty_session_exports_empty_plan(self, client):
        sid = _start(client)["session"]
        text = client.get(f"/sessions/{sid}/plan").text
        assert parse_plan(text) == []
        assert "; goal-satisfied: false" in text


class TestServiceInvariants:
    """Direct PlayService checks, no HTTP in the way."""

    def _service_session(self, move_yaml):
        service = PlayService()
        return service, service.start_session(move_yaml)

    def test_trace_replay_equivalence(self, move_yaml):
        service, session = self._service_session(move_yaml)
        for command in ["move-north", "move-east", "undo", "move-west", "move-north"]:
            service.apply_command(session, command)
        replay = session.sim.initial.clone()
        for action in session.trace:
            assert session.sim.step(replay, action).ok
        assert replay.digest() == session.world.digest()

    def test_rejected_commands_stay_out_of_trace(self, move_yaml):
        service, session = self._service_session(move_yaml)
        service.apply_command(session, "move-north")
        message = service.apply_command(session, "jumpup-north")
        assert message["outcome"] == "rejected"
        assert [a.name for a in session.trace] == ["move-north"]

    def test_bad_grammar_raises_protocol_error(self, move_yaml):
        service, session = self._service_session(move_yaml)
        with pytest.raises(ProtocolError):
            service.apply_command(session, "teleport-north")
        with pytest.raises(ProtocolError):
            service.apply_command(session, "break-obsidian-north")
