"""Bidirectional streaming service over newline-delimited canonical frames.

A connection opens with a hello frame negotiating its role and session:

    {"type": "hello", "role": "driver", "session_id": "s1", "started_at_ms": 0}
    {"type": "hello", "role": "console", "session_id": "s1", "last_seen_seq": -1}

Drivers create the session and feed transcript.event frames; consoles attach
to an existing session and send agent.action frames. Every connection is a
subscriber: assist messages arrive in seq order, with journal catch-up after
``last_seen_seq`` on attach. Malformed frames and failed actions produce
error frames (seq -1, never journaled) and leave the connection open.

The listen address comes from config, overridable with the
``AGENT_ASSIST_ADDR`` environment variable ("host:port").
"""

from __future__ import annotations

import asyncio
import logging
import os
from typing import Any

from . import canonical
from .config import EngineConfig
from .errors import AgentAssistError, DuplicateSessionError
from .orchestrator import Engine
from .stores import Stores

logger = logging.getLogger(__name__)

ADDR_ENV_VAR = "AGENT_ASSIST_ADDR"


def _error_frame(session_id: str, code: str, detail: str) -> dict:
    return {
        "type": "error",
        "session_id": session_id,
        "seq": -1,
        "t_ms": -1,
        "payload": {"code": code, "detail": detail},
    }


class AssistServer:
    def __init__(self, engine: Engine, host: str, port: int, pace_delivery: bool = False):
        self.engine = engine
        self.host = host
        self.port = port
        self.pace_delivery = pace_delivery
        self._server: asyncio.AbstractServer | None = None
        self._locks: dict[str, asyncio.Lock] = {}

    @property
    def bound_port(self) -> int:
        assert self._server is not None
        return self._server.sockets[0].getsockname()[1]

    async def start(self) -> None:
        self._server = await asyncio.start_server(self._handle, self.host, self.port)
        logger.info("listening on %s:%d", self.host, self.bound_port)

    async def stop(self) -> None:
        if self._server is not None:
            self._server.close()
            await self._server.wait_closed()

    async def serve_forever(self) -> None:
        assert self._server is not None
        async with self._server:
            await self._server.serve_forever()

    def _lock(self, session_id: str) -> asyncio.Lock:
        return self._locks.setdefault(session_id, asyncio.Lock())

    async def _handle(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter) -> None:
        deliver = self._make_deliver(writer)
        subscribed: list[str] = []
        try:
            hello = await self._read_frame(reader)
            if hello is None:
                return
            if not await self._do_hello(hello, writer, deliver, subscribed):
                return
            while True:
                frame = await self._read_frame(reader)
                if frame is None:
                    break
                await self._dispatch(frame, writer, deliver, subscribed)
        except (ConnectionResetError, asyncio.IncompleteReadError):
            pass
        finally:
            for session_id in subscribed:
                runtime = self.engine.get(session_id)
                if runtime is not None:
                    runtime.unsubscribe(deliver)
            writer.close()
            try:
                await writer.wait_closed()
            except (ConnectionResetError, BrokenPipeError):
                pass

    async def _read_frame(self, reader: asyncio.StreamReader) -> dict | None:
        line = await reader.readline()
        if not line:
            return None
        try:
            frame = canonical.loads(line)
        except ValueError:
            return {"type": "__malformed__", "raw": line.decode("utf-8", "replace")}
        if not isinstance(frame, dict):
            return {"type": "__malformed__", "raw": line.decode("utf-8", "replace")}
        return frame

    def _make_deliver(self, writer: asyncio.StreamWriter):
        def deliver(envelope: dict) -> None:
            try:
                writer.write(canonical.dump_line(envelope))
            except (ConnectionResetError, BrokenPipeError):
                pass

        return deliver

    def _send(self, writer: asyncio.StreamWriter, frame: dict) -> None:
        writer.write(canonical.dump_line(frame))

    async def _do_hello(self, frame, writer, deliver, subscribed) -> bool:
        if frame.get("type") != "hello":
            self._send(writer, _error_frame("", "malformed-frame", "expected hello frame"))
            await writer.drain()
            return True
        role = frame.get("role")
        session_id = frame.get("session_id", "")
        last_seen = frame.get("last_seen_seq", -1)
        if role == "driver":
            try:
                runtime = self.engine.create_session(
                    session_id, int(frame.get("started_at_ms", 0))
                )
            except DuplicateSessionError as exc:
                self._send(writer, _error_frame(session_id, exc.code, exc.detail))
                await writer.drain()
                return True
        elif role == "console":
            runtime = self.engine.get(session_id)
            if runtime is None:
                self._send(
                    writer,
                    _error_frame(session_id, "unknown-session", f"unknown session {session_id!r}"),
                )
                await writer.drain()
                return True
        else:
            self._send(writer, _error_frame(session_id, "malformed-frame", f"unknown role {role!r}"))
            await writer.drain()
            return True
        self._send(
            writer,
            {
                "type": "hello.ok",
                "session_id": session_id,
                "seq": -1,
                "t_ms": -1,
                "payload": {"role": role, "last_seq": runtime.state.journal[-1].seq if runtime.state.journal else -1},
            },
        )
        runtime.subscribe(deliver, last_seen_seq=last_seen)
        subscribed.append(session_id)
        await writer.drain()
        return True

    async def _dispatch(self, frame: dict, writer, deliver, subscribed) -> None:
        ftype = frame.get("type")
        session_id = frame.get("session_id", "")
        try:
            if ftype == "transcript.event":
                runtime = self.engine.require(session_id)
                async with self._lock(session_id):
                    runtime.apply_event(frame.get("payload", {}))
            elif ftype == "agent.action":
                runtime = self.engine.require(session_id)
                # journaled verbatim: any mutation here would break cross-mode
                # byte-identity of journals
                payload = frame.get("payload", {})
                async with self._lock(session_id):
                    envelopes = runtime.apply_action(payload)
                if self.pace_delivery:
                    for envelope in envelopes:
                        if envelope["type"] == "answer.delivered":
                            await asyncio.sleep(
                                envelope["payload"]["simulated_latency_ms"] / 1000.0
                            )
            elif ftype == "__malformed__":
                self._send(writer, _error_frame("", "malformed-frame", "frame is not valid JSON"))
            else:
                self._send(
                    writer, _error_frame(session_id, "malformed-frame", f"unknown frame type {ftype!r}")
                )
        except AgentAssistError as exc:
            self._send(writer, _error_frame(session_id, exc.code, exc.detail))
        await writer.drain()


def resolve_listen_addr(config: EngineConfig) -> tuple[str, int]:
    override = os.environ.get(ADDR_ENV_VAR)
    if override:
        host, _, port = override.rpartition(":")
        return host or config.listen_host, int(port)
    return config.listen_host, config.listen_port


async def serve(config: EngineConfig, stores: Stores, journal_root: Any | None = None) -> None:
    """Run the service until cancelled."""
    engine = Engine(config, stores, journal_root=journal_root)
    host, port = resolve_listen_addr(config)
    server = AssistServer(engine, host, port, pace_delivery=config.pace_delivery)
    await server.start()
    print(f"agent-assist service on {host}:{server.bound_port}", flush=True)
    await server.serve_forever()
