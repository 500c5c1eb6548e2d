"""Interactive play sessions over HTTP and WebSocket.

The server owns all rule checking: clients send action names, the
simulator accepts or rejects them, and only accepted actions enter the
session trace. The trace is exportable as a plan that verifies from the
task's initial state, which is what makes played sessions usable as
benchmark solutions.
"""

from __future__ import annotations

import asyncio
import json
import time
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from .actions import Action, parse_action_name, validate_against_types
from .errors import BindingError, TaskParseError
from .planio import serialize_plan
from .simulator import Simulator, goal_satisfied
from .task import GoalSpec, TaskSpec, parse_task, validate_task
from .world import WorldState, build_initial_world

PROTOCOL_VERSION = 1
UNDO_COMMAND = "undo"

OUTCOME_OK = "ok"
OUTCOME_REJECTED = "rejected"


class ProtocolError(Exception):
    """Malformed client input, as opposed to a legal-but-rejected action."""


@dataclass
class Session:
    id: str
    spec: TaskSpec
    sim: Simulator
    world: WorldState
    trace: list[Action] = field(default_factory=list)
    created_at: float = field(default_factory=time.time)
    lock: asyncio.Lock = field(default_factory=asyncio.Lock)


def goal_checklist(goal: GoalSpec, world: WorldState) -> list[dict]:
    """One entry per goal conjunct with its current met/unmet status."""
    entries: list[dict] = []
    if goal.agent_at is not None:
        p = goal.agent_at
        entries.append(
            {
                "kind": "agent",
                "target": {"x": p.x, "y": p.y, "z": p.z},
                "met": world.agent == p,
            }
        )
    for block in goal.blocks:
        p = block.position
        entries.append(
            {
                "kind": "block",
                "type": block.type,
                "target": {"x": p.x, "y": p.y, "z": p.z},
                "met": world.block_at(p) == block.type,
            }
        )
    for entry in goal.inventory:
        entries.append(
            {
                "kind": "inventory",
                "type": entry.type,
                "quantity": entry.quantity,
                "met": world.inventory_count(entry.type) >= entry.quantity,
            }
        )
    return entries


class PlayService:
    """Session store plus the protocol-level operations."""

    def __init__(self) -> None:
        self.sessions: dict[str, Session] = {}

    def start_session(self, task_yaml: str) -> Session:
        spec = parse_task(task_yaml)
        report = validate_task(spec)
        if not report.valid:
            raise TaskParseError("invalid task: " + "; ".join(report.violations))
        world = build_initial_world(spec)
        session = Session(
            id=uuid.uuid4().hex[:16],
            spec=spec,
            sim=Simulator(world, spec.goal),
            world=world.clone(),
        )
        self.sessions[session.id] = session
        return session

    def get(self, session_id: str) -> Session | None:
        return self.sessions.get(session_id)

    def state_message(
        self,
        session: Session,
        outcome: str | None = None,
        reason: str | None = None,
        seq: int | None = None,
    ) -> dict:
        world = session.world
        return {
            "v": PROTOCOL_VERSION,
            "session": session.id,
            "seq": seq,
            "outcome": outcome,
            "reason": reason,
            "task": session.spec.name,
            "world": world.to_snapshot(),
            "goal_satisfied": goal_satisfied(world, session.spec.goal),
            "checklist": goal_checklist(session.spec.goal, world),
            "trace_len": len(session.trace),
            "applicable": [a.name for a in session.sim.applicable(world)],
        }

    def apply_command(self, session: Session, command: str, seq: int | None = None) -> dict:
        """Bind, check, and apply one command; rejections leave state alone."""
        if command == UNDO_COMMAND:
            if session.trace:
                session.trace.pop()
                world = session.sim.initial.clone()
                for action in session.trace:
                    outcome = session.sim.step(world, action)
                    assert outcome.ok, "trace replay must never fail"
                session.world = world
            return self.state_message(session, outcome=OUTCOME_OK, seq=seq)
        try:
            action = parse_action_name(command)
            validate_against_types(action, session.world.types)
        except BindingError as exc:
            raise ProtocolError(str(exc)) from None
        outcome = session.sim.step(session.world, action)
        if not outcome.ok:
            return self.state_message(
                session, outcome=OUTCOME_REJECTED, reason=outcome.reason, seq=seq
            )
        session.trace.append(action)
        return self.state_message(session, outcome=OUTCOME_OK, seq=seq)

    def export_trace(self, session: Session) -> str:
        satisfied = goal_satisfied(session.world, session.spec.goal)
        plan_text = serialize_plan(session.trace)
        return plan_text + f"; goal-satisfied: {str(satisfied).lower()}\n"


def _parse_command_message(raw: str) -> tuple[str, int | None]:
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"not JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ProtocolError("command message must be an object")
    if doc.get("v", PROTOCOL_VERSION) != PROTOCOL_VERSION:
        raise ProtocolError(f"unsupported protocol version {doc.get('v')!r}")
    command = doc.get("command")
    if not isinstance(command, str) or not command:
        raise ProtocolError("missing command field")
    seq = doc.get("seq")
    if seq is not None and not isinstance(seq, int):
        raise ProtocolError("seq must be an integer")
    return command, seq


def create_app(default_task_yaml: str | None = None, ui_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="voxelplan play service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    service = PlayService()
    app.state.service = service

    @app.get("/")
    def info() -> dict:
        return {
            "v": PROTOCOL_VERSION,
            "service": "voxelplan-play",
            "sessions": len(service.sessions),
            "default_task": default_task_yaml is not None,
        }

    @app.post("/sessions")
    async def create_session(body: dict | None = None) -> JSONResponse:
        body = body or {}
        task_yaml = body.get("task_yaml") or default_task_yaml
        if task_yaml is None:
            return JSONResponse(
                {"error": "no-task", "detail": "no task uploaded and no default configured"},
                status_code=400,
            )
        try:
            session = service.start_session(task_yaml)
        except TaskParseError as exc:
            return JSONResponse(
                {"error": "invalid-task", "detail": str(exc)}, status_code=400
            )
        return JSONResponse(service.state_message(session), status_code=201)

    @app.get("/sessions/{session_id}/state")
    async def session_state(session_id: str):
        session = service.get(session_id)
        if session is None:
            return JSONResponse({"error": "unknown-session"}, status_code=404)
        async with session.lock:
            return JSONResponse(service.state_message(session))

    @app.get("/sessions/{session_id}/plan")
    async def session_plan(session_id: str):
        session = service.get(session_id)
        if session is None:
            return JSONResponse({"error": "unknown-session"}, status_code=404)
        async with session.lock:
            return PlainTextResponse(service.export_trace(session))

    @app.websocket("/session/{session_id}")
    async def session_socket(socket: WebSocket, session_id: str) -> None:
        await socket.accept()
        session = service.get(session_id)
        if session is None:
            await socket.send_json(
                {"v": PROTOCOL_VERSION, "error": "unknown-session", "seq": None}
            )
            await socket.close(code=4404)
            return
        async with session.lock:
            await socket.send_json(service.state_message(session))
        try:
            while True:
                raw = await socket.receive_text()
                try:
                    command, seq = _parse_command_message(raw)
                    async with session.lock:
                        message = service.apply_command(session, command, seq)
                except ProtocolError as exc:
                    await socket.send_json(
                        {"v": PROTOCOL_VERSION, "error": str(exc), "seq": None}
                    )
                    continue
                await socket.send_json(message)
        except WebSocketDisconnect:
            return

    if ui_dir is not None:
        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
