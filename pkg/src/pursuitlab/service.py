"""Live telemetry and steering over a WebSocket.

One engine session runs on the server's clock; every connected client gets
the same state stream and can steer the leader with throttle/steer messages.
All simulation mutation happens on the single ticker task; message handlers
only set the latest drive command or swap worlds, so there is no shared
mutable state to lock.

Wire protocol (JSON text frames, one message per frame, all carry "v": 1):

  inbound   {"type": "drive", "drive": {"throttle": T, "steer": S}}
                T, S in [-1, 1]; wheels are left = T - S, right = T + S,
                clamped to [-1, 1]; positive steer turns left
            {"type": "set_policy", "policy_name": NAME}
            {"type": "reset"}
            {"type": "select_scenario", "scenario_name": NAME}

  outbound  {"type": "catalog", "scenarios": [...], "policies": [...],
             "active": {...}}            on connect and after world swaps
            {"type": "state", "tick", "t", "vehicles": {"leader", "follower"},
             "sensor", "separation", "events", "paused"}
            {"type": "event", "name": "capture"|"timeout", "tick", "t"}
            {"type": "error", "message", "field"?}   malformed inbound

A drive message older than half a second stops the leader (dead-man); the
latest drive before each tick wins.
"""

from __future__ import annotations

import asyncio
import contextlib
import json
import math
import os
from typing import Any

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .engine import TickRecord, World
from .errors import ScenarioError, SimulationError
from .kinematics import WheelCommand
from .scenario import FOLLOWER_POLICIES, Scenario, load_scenario

DEFAULT_PORT = 7420
PROTOCOL_VERSION = 1
_PAUSED_IDLE_S = 0.05


def mix_drive(throttle: float, steer: float) -> WheelCommand:
    """Throttle/steer to wheel duties; positive steer turns left."""
    left = min(max(throttle - steer, -1.0), 1.0)
    right = min(max(throttle + steer, -1.0), 1.0)
    return WheelCommand(left, right)


def _dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def state_frame(record: TickRecord, paused: bool) -> dict[str, Any]:
    sensor = None
    if record.reading is not None:
        sensor = {
            "fused": record.reading.fused,
            "differentiable": record.reading.differentiable,
        }
    return {
        "type": "state",
        "v": PROTOCOL_VERSION,
        "tick": record.tick,
        "t": record.t,
        "vehicles": {
            "leader": {
                "pose": {
                    "x": record.leader_pose.x,
                    "y": record.leader_pose.y,
                    "heading": record.leader_pose.heading,
                },
                "command": {
                    "left": record.leader_command.left,
                    "right": record.leader_command.right,
                },
                "mode_tag": record.leader_mode,
            },
            "follower": {
                "pose": {
                    "x": record.follower_pose.x,
                    "y": record.follower_pose.y,
                    "heading": record.follower_pose.heading,
                },
                "command": {
                    "left": record.follower_command.left,
                    "right": record.follower_command.right,
                },
                "mode_tag": record.follower_mode,
            },
        },
        "sensor": sensor,
        "separation": record.separation,
        "events": list(record.events),
        "paused": paused,
    }


class SessionHub:
    """Owns the world, the ticker, and the client set."""

    def __init__(self, scenario: Scenario, scenario_name: str | None,
                 scenario_dir: str | None, realtime_factor: float):
        if realtime_factor < 0:
            raise ScenarioError(f"realtime factor must be >= 0, got {realtime_factor}")
        self.scenario = scenario
        self.scenario_name = scenario_name
        self.scenario_dir = scenario_dir
        self.realtime_factor = realtime_factor
        self.world = World(scenario)
        self.clients: set[WebSocket] = set()
        self.paused = self.world.done()
        self.last_record = self.world.initial_record()
        self.ticks_run = 0
        self._task: asyncio.Task | None = None

    # -- catalog ----------------------------------------------------------

    def scenario_names(self) -> list[str]:
        if not self.scenario_dir or not os.path.isdir(self.scenario_dir):
            return []
        names = [
            os.path.splitext(f)[0]
            for f in os.listdir(self.scenario_dir)
            if f.endswith((".yaml", ".yml"))
        ]
        return sorted(names)

    def catalog_frame(self) -> dict[str, Any]:
        return {
            "type": "catalog",
            "v": PROTOCOL_VERSION,
            "scenarios": self.scenario_names(),
            "policies": list(FOLLOWER_POLICIES),
            "active": {
                "scenario": self.scenario_name,
                "dt": self.scenario.dt,
                "realtime_factor": self.realtime_factor,
                "capture_radius": self.world.capture_radius,
            },
        }

    # -- inbound ----------------------------------------------------------

    def handle(self, raw: str) -> list[dict[str, Any]]:
        """Process one inbound frame; returns frames to send back to the sender."""
        try:
            msg = json.loads(raw)
        except json.JSONDecodeError:
            return [self._error("frame is not valid JSON")]
        if not isinstance(msg, dict):
            return [self._error("frame must be a JSON object")]
        kind = msg.get("type")
        if kind == "drive":
            return self._handle_drive(msg)
        if kind == "set_policy":
            return self._handle_set_policy(msg)
        if kind == "reset":
            self._swap_world(World(self.scenario))
            return [self.catalog_frame(), state_frame(self.last_record, self.paused)]
        if kind == "select_scenario":
            return self._handle_select(msg)
        return [self._error(f"unknown message type {kind!r}", field="type")]

    def _handle_drive(self, msg: dict[str, Any]) -> list[dict[str, Any]]:
        drive = msg.get("drive")
        if not isinstance(drive, dict):
            return [self._error("drive payload must be an object", field="drive")]
        values = {}
        for field in ("throttle", "steer"):
            value = drive.get(field)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                return [self._error(f"drive.{field} must be a number", field=f"drive.{field}")]
            value = float(value)
            if not math.isfinite(value) or not -1.0 <= value <= 1.0:
                return [self._error(f"drive.{field} must be in [-1, 1]", field=f"drive.{field}")]
            values[field] = value
        human = self.world.human_drive
        if human is None:
            return [self._error("leader is not human-driven in this scenario")]
        human.set(mix_drive(values["throttle"], values["steer"]))
        return []

    def _handle_set_policy(self, msg: dict[str, Any]) -> list[dict[str, Any]]:
        name = msg.get("policy_name")
        if not isinstance(name, str):
            return [self._error("policy_name must be a string", field="policy_name")]
        try:
            self.world.set_follower_policy(name)
        except SimulationError as exc:
            return [self._error(str(exc), field="policy_name")]
        return [self.catalog_frame()]

    def _handle_select(self, msg: dict[str, Any]) -> list[dict[str, Any]]:
        name = msg.get("scenario_name")
        if not isinstance(name, str):
            return [self._error("scenario_name must be a string", field="scenario_name")]
        if name not in self.scenario_names():
            return [self._error(f"unknown scenario {name!r}", field="scenario_name")]
        path = os.path.join(self.scenario_dir, name + ".yaml")
        if not os.path.exists(path):
            path = os.path.join(self.scenario_dir, name + ".yml")
        try:
            scenario = load_scenario(path)
        except SimulationError as exc:
            return [self._error(str(exc), field="scenario_name")]
        self.scenario = scenario
        self.scenario_name = name
        self._swap_world(World(scenario))
        return [self.catalog_frame(), state_frame(self.last_record, self.paused)]

    def _swap_world(self, world: World) -> None:
        self.world = world
        self.paused = world.done()
        self.last_record = world.initial_record()
        self.ticks_run = 0

    @staticmethod
    def _error(message: str, field: str | None = None) -> dict[str, Any]:
        frame: dict[str, Any] = {"type": "error", "v": PROTOCOL_VERSION, "message": message}
        if field is not None:
            frame["field"] = field
        return frame

    # -- ticker -----------------------------------------------------------

    async def broadcast(self, frame: dict[str, Any]) -> None:
        text = _dumps(frame)
        for client in list(self.clients):
            try:
                await client.send_text(text)
            except Exception:
                self.clients.discard(client)

    async def ticker(self) -> None:
        loop = asyncio.get_running_loop()
        deadline = loop.time()
        while True:
            interval = self.scenario.dt * self.realtime_factor
            if self.paused or self.world.done():
                self.paused = True
                await asyncio.sleep(_PAUSED_IDLE_S)
                deadline = loop.time()
                continue
            record = self.world.step()
            self.last_record = record
            self.ticks_run += 1
            # below wall speed every frame goes out; above it, every 2nd
            if self.realtime_factor >= 1.0 or self.ticks_run % 2 == 0:
                await self.broadcast(state_frame(record, self.paused))
            for name in record.events:
                self.paused = True
                await self.broadcast(
                    {
                        "type": "event",
                        "v": PROTOCOL_VERSION,
                        "name": name,
                        "tick": record.tick,
                        "t": record.t,
                    }
                )
            if interval > 0:
                deadline += interval
                delay = deadline - loop.time()
                if delay > 0:
                    await asyncio.sleep(delay)
                else:
                    deadline = loop.time()
            else:
                await asyncio.sleep(0)


def build_app(scenario: Scenario, scenario_name: str | None = None,
              scenario_dir: str | None = None, realtime_factor: float = 1.0) -> FastAPI:
    """App with one session hub; ticker runs for the app's lifetime."""
    if scenario.leader.policy.get("name") != "human":
        raise ScenarioError("serve needs a scenario whose leader policy is 'human'")
    hub = SessionHub(scenario, scenario_name, scenario_dir, realtime_factor)

    @contextlib.asynccontextmanager
    async def lifespan(app: FastAPI):
        hub._task = asyncio.create_task(hub.ticker())
        try:
            yield
        finally:
            hub._task.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await hub._task

    app = FastAPI(lifespan=lifespan)
    app.state.hub = hub

    @app.websocket("/ws")
    async def ws_endpoint(websocket: WebSocket) -> None:
        await websocket.accept()
        hub.clients.add(websocket)
        try:
            await websocket.send_text(_dumps(hub.catalog_frame()))
            await websocket.send_text(_dumps(state_frame(hub.last_record, hub.paused)))
            while True:
                raw = await websocket.receive_text()
                for frame in hub.handle(raw):
                    await websocket.send_text(_dumps(frame))
        except WebSocketDisconnect:
            pass
        finally:
            hub.clients.discard(websocket)

    return app


def serve(scenario: Scenario, port: int = DEFAULT_PORT, realtime_factor: float = 1.0,
          scenario_name: str | None = None, scenario_dir: str | None = None) -> None:
    """Run the service until interrupted."""
    import uvicorn

    app = build_app(scenario, scenario_name=scenario_name, scenario_dir=scenario_dir,
                    realtime_factor=realtime_factor)
    uvicorn.run(app, host="127.0.0.1", port=port, log_level="warning")
