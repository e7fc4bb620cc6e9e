"""Streaming service: WebSocket sessions on /session, liveness on /healthz.

One persistent connection drives one session: the client opens with a
hello message, the server answers welcome and starts a fixed-cadence tick
loop that ingests queued samples (coalescing bursts to the latest per
tick), gates them by the trigger policy, advances the attention map,
records the log, and pushes one frame per visible tick. Additional
read-only observers can attach to a running session by id and receive the
byte-identical frame stream.

Protocol messages are UTF-8 JSON objects:
  client -> server: hello{mode, config, params, trigger_mode} |
                    hello{observe: session_id} | sample{...} |
                    trigger{pressed} | snapshot_request{}
  server -> client: welcome{session_id, header} | frame{...} |
                    snapshot{...} | error{code, text}
"""

from __future__ import annotations

import asyncio
import json
import logging
import os
import secrets
import time
from http import HTTPStatus
from typing import Optional

from websockets.asyncio.server import serve as ws_serve
from websockets.exceptions import ConnectionClosed

from .grid import GridConfig
from .marks import Camera, SceneObject
from .model import ModelParams
from .session import (
    Mode,
    SessionLog,
    SessionState,
    make_header,
    sample_event,
    trigger_event,
)
from .triggers import TriggerMode

logger = logging.getLogger("aav.server")

DEFAULT_PORT = 8080
#: bound on a slow observer's unsent frames before it is dropped
OBSERVER_QUEUE_LIMIT = 32


class ProtocolError(Exception):
    def __init__(self, code: str, text: str):
        self.code = code
        self.text = text
        super().__init__(f"{code}: {text}")


def error_message(code: str, text: str) -> str:
    return json.dumps({"kind": "error", "code": code, "text": text})


class Session:
    """One live session: state, log, tick task and attached observers."""

    def __init__(self, session_id: str, header: dict, tick_ms: int):
        self.id = session_id
        self.state = SessionState(header)
        self.log = SessionLog(header)
        self.tick_ms = tick_ms
        self.inbox: list[dict] = []
        self.snapshot_waiters: list[asyncio.Future] = []
        self.observers: dict[object, asyncio.Queue] = {}
        self.closed = asyncio.Event()
        self.task: Optional[asyncio.Task] = None

    def attach(self, connection) -> asyncio.Queue:
        queue: asyncio.Queue = asyncio.Queue(maxsize=OBSERVER_QUEUE_LIMIT)
        self.observers[connection] = queue
        return queue

    def detach(self, connection) -> None:
        self.observers.pop(connection, None)

    def broadcast(self, payload: str) -> None:
        """Queue one serialized frame for every observer; observers whose
        queue is full are dropped (bounded backpressure)."""
        for connection, queue in list(self.observers.items()):
            try:
                queue.put_nowait(payload)
            except asyncio.QueueFull:
                logger.warning("dropping slow observer of session %s", self.id)
                self.detach(connection)
                while not queue.empty():  # drain, then signal termination
                    queue.get_nowait()
                queue.put_nowait(None)

    async def run(self) -> None:
        """Fixed-cadence tick loop on the monotonic clock."""
        period = self.tick_ms / 1000.0
        start = time.monotonic()
        next_tick = start + period
        try:
            while not self.closed.is_set():
                delay = next_tick - time.monotonic()
                if delay > 0:
                    try:
                        await asyncio.wait_for(self.closed.wait(), timeout=delay)
                        break
                    except asyncio.TimeoutError:
                        pass
                next_tick += period

                events = self.inbox
                self.inbox = []
                boundary_ms = (self.state.tick + 1) * self.tick_ms
                for ev in events:
                    # client timestamps clamp to the consuming tick boundary
                    ev["t"] = boundary_ms
                    self.log.record(ev)
                self.state.apply_tick(events)

                frame = self.state.build_frame()
                if frame is not None:
                    self.broadcast(json.dumps(frame, sort_keys=True))

                for waiter in self.snapshot_waiters:
                    if not waiter.done():
                        waiter.set_result(self.state.snapshot())
                self.snapshot_waiters = []
        finally:
            self.closed.set()
            for queue in self.observers.values():
                try:
                    queue.put_nowait(None)
                except asyncio.QueueFull:
                    pass


def parse_hello(msg: dict, tick_ms_default: int) -> dict:
    """Build a session header from a hello message."""
    params_dict = msg.get("params") or {}
    params_dict.setdefault("tick_ms", tick_ms_default)
    params = ModelParams.from_dict(params_dict)
    trigger_mode = TriggerMode(msg.get("trigger_mode", "always_on"))
    mode = msg.get("mode", Mode.GRID)
    config = msg.get("config") or {}
    if mode == Mode.GRID:
        grid = GridConfig.from_dict(config.get("grid") or
                                    {"width_px": 640, "height_px": 480})
        return make_header(mode, params, trigger_mode, grid_config=grid)
    if mode == Mode.MARKS:
        if "scene_inline" in config:
            scene = [SceneObject(object_id=o["object_id"],
                                 vertices=o["vertices"], faces=o["faces"])
                     for o in config["scene_inline"]]
            return make_header(mode, params, trigger_mode, scene_inline=scene,
                               camera=Camera.from_dict(config["camera"]))
        return make_header(mode, params, trigger_mode,
                           scene_paths=config.get("scene_paths"),
                           camera=Camera.from_dict(config["camera"]))
    raise ProtocolError("bad-hello", f"unknown mode {mode!r}")


class Server:
    def __init__(self, port: int = DEFAULT_PORT, tick_ms: int = 100,
                 log_dir: Optional[str] = None):
        self.port = port
        self.tick_ms = tick_ms
        self.log_dir = log_dir
        self.sessions: dict[str, Session] = {}
        self._server = None

    # -- http fallbacks -------------------------------------------------

    def process_request(self, connection, request):
        if request.path == "/healthz":
            return connection.respond(HTTPStatus.OK, "ok\n")
        if request.path != "/session":
            return connection.respond(HTTPStatus.NOT_FOUND, "not found\n")
        return None  # continue with the websocket handshake

    # -- connection handling ----------------------------------------------

    async def handle(self, connection) -> None:
        try:
            raw = await connection.recv()
            msg = _parse_message(raw)
            if msg.get("kind") != "hello":
                raise ProtocolError("bad-handshake",
                                    "first message must be hello")
            if "observe" in msg:
                await self._run_observer(connection, msg["observe"])
            else:
                await self._run_session(connection, msg)
        except ProtocolError as exc:
            try:
                await connection.send(error_message(exc.code, exc.text))
                await connection.close(code=1002, reason=exc.code)
            except ConnectionClosed:
                pass
        except ConnectionClosed:
            pass

    async def _run_session(self, connection, hello: dict) -> None:
        try:
            header = parse_hello(hello, self.tick_ms)
        except (ValueError, KeyError, TypeError) as exc:
            raise ProtocolError("bad-hello", str(exc)) from None

        session_id = secrets.token_hex(8)
        session = Session(session_id, header, self.tick_ms)
        self.sessions[session_id] = session
        queue = session.attach(connection)
        session.task = asyncio.create_task(session.run())
        sender = asyncio.create_task(_send_loop(connection, queue))
        await connection.send(json.dumps(
            {"kind": "welcome", "session_id": session_id, "header": header},
            sort_keys=True))
        try:
            async for raw in connection:
                msg = _parse_message(raw)
                kind = msg.get("kind")
                if kind == "sample":
                    session.inbox.append(sample_event(
                        int(msg.get("t", 0)),
                        None if msg.get("x") is None else (msg["x"], msg["y"]),
                        source=msg.get("source", "pointer"),
                        radius_px=msg.get("radius"),
                    ))
                elif kind == "trigger":
                    if session.state.trigger_mode != TriggerMode.EXPLICIT:
                        raise ProtocolError(
                            "bad-trigger",
                            "trigger messages need an explicit-mode session")
                    session.inbox.append(trigger_event(
                        int(msg.get("t", 0)), bool(msg["pressed"])))
                elif kind == "snapshot_request":
                    waiter = asyncio.get_running_loop().create_future()
                    session.snapshot_waiters.append(waiter)
                    snap = await waiter
                    await connection.send(json.dumps(
                        {"kind": "snapshot", "snapshot": snap}, sort_keys=True))
                elif kind == "hello":
                    raise ProtocolError("bad-handshake", "duplicate hello")
                else:
                    raise ProtocolError("bad-message",
                                        f"unknown kind {kind!r}")
        finally:
            session.closed.set()
            session.detach(connection)
            sender.cancel()
            if session.task:
                await session.task
            self.sessions.pop(session_id, None)
            if self.log_dir:
                path = os.path.join(self.log_dir,
                                    f"{session_id}.aav.jsonl")
                session.log.save(path)
                logger.info("session %s log saved to %s", session_id, path)

    async def _run_observer(self, connection, session_id: str) -> None:
        session = self.sessions.get(session_id)
        if session is None:
            raise ProtocolError("unknown-session",
                                f"no live session {session_id!r}")
        queue = session.attach(connection)
        await connection.send(json.dumps(
            {"kind": "welcome", "session_id": session.id,
             "header": session.state.header, "observer": True},
            sort_keys=True))
        try:
            await _send_loop(connection, queue)
        finally:
            session.detach(connection)

    # -- lifecycle -----------------------------------------------------------

    async def start(self) -> None:
        """Bind and start serving; port 0 picks an ephemeral port."""
        self._server = await ws_serve(self.handle, "0.0.0.0", self.port,
                                      process_request=self.process_request)
        self.port = self._server.sockets[0].getsockname()[1]
        logger.info("listening on :%d (tick %d ms)", self.port, self.tick_ms)

    async def stop(self) -> None:
        if self._server is not None:
            self._server.close()
            await self._server.wait_closed()
            self._server = None

    async def serve_forever(self) -> None:
        await self.start()
        try:
            await asyncio.get_running_loop().create_future()
        finally:
            await self.stop()


async def _send_loop(connection, queue: asyncio.Queue) -> None:
    while True:
        payload = await queue.get()
        if payload is None:
            break
        try:
            await connection.send(payload)
        except ConnectionClosed:
            break


def _parse_message(raw) -> dict:
    try:
        msg = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ProtocolError("bad-json", exc.msg) from None
    if not isinstance(msg, dict):
        raise ProtocolError("bad-message", "message must be a JSON object")
    return msg


def run(port: Optional[int] = None, tick_ms: Optional[int] = None,
        log_dir: Optional[str] = None) -> None:
    """Blocking entry point honoring AAV_PORT / AAV_TICK_MS."""
    if port is None:
        port = int(os.environ.get("AAV_PORT", DEFAULT_PORT))
    if tick_ms is None:
        tick_ms = int(os.environ.get("AAV_TICK_MS", 100))
    server = Server(port=port, tick_ms=tick_ms, log_dir=log_dir)
    asyncio.run(server.serve_forever())
