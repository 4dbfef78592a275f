"""Deterministic conversation replay, in-process or over the wire.

A script is a newline-delimited file of records: an optional leading meta
record (cohort and CRM-style conversion flags), transcript event records
(exactly the conversation-script fields), and embedded agent action records.
Clicks may reference a suggestion by ``query_text``; the simulator resolves
the deterministic query id at execution time.

Both modes run the same engine and produce the same journal bytes: wire
mode spawns an ephemeral loopback service sharing the stores and journal
root, drives it as a connected peer, and waits for the journaled outputs to
come back in seq order.
"""

from __future__ import annotations

import asyncio
import socket
import threading
import time
from dataclasses import dataclass
from pathlib import Path

from . import canonical
from .config import EngineConfig
from .errors import ParseError, UnknownReferenceError
from .ingest import parse_event_record
from .models import AnswerRecord, CallRecord
from .orchestrator import Engine
from .service import AssistServer
from .stores import Stores


@dataclass
class ScriptMeta:
    cohort: str = "assisted"
    converted_enquiry: bool = False
    converted_booking: bool = False


@dataclass
class Script:
    path: str
    meta: ScriptMeta
    records: list[dict]  # event and action records in order
    session_id: str
    started_at_ms: int


@dataclass
class ReplayResult:
    session_id: str
    journal: list[dict]
    call_record: CallRecord
    answers: list[AnswerRecord]
    out_dir: Path | None = None

    def journal_bytes(self) -> bytes:
        return b"".join(canonical.dump_line(doc) for doc in self.journal)


def parse_script(path: str | Path) -> Script:
    """Parse and validate a script file; failures abort with the line number."""
    path = Path(path)
    meta = ScriptMeta()
    records: list[dict] = []
    session_id: str | None = None
    started_at_ms: int | None = None
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = canonical.loads(line)
        except ValueError as exc:
            raise ParseError(f"{path.name}:{lineno}", f"invalid record: {exc}") from exc
        if not isinstance(record, dict):
            raise ParseError(f"{path.name}:{lineno}", "record must be an object")
        if "meta" in record:
            m = record["meta"]
            meta = ScriptMeta(
                cohort=m.get("cohort", "assisted"),
                converted_enquiry=bool(m.get("converted_enquiry", False)),
                converted_booking=bool(m.get("converted_booking", False)),
            )
            continue
        if "action" in record:
            if record["action"] not in ("click_query", "complete_step", "end_call"):
                raise ParseError(f"{path.name}:{lineno}", f"unknown action {record['action']!r}")
            records.append(record)
            continue
        if "speaker" in record:
            try:
                event = parse_event_record(record)
            except ParseError as exc:
                raise ParseError(f"{path.name}:{lineno}", exc.detail) from exc
            if session_id is None:
                session_id = event.session_id
                started_at_ms = event.t_start_ms
            elif event.session_id != session_id:
                raise ParseError(f"{path.name}:{lineno}", "script mixes session ids")
            records.append(record)
            continue
        raise ParseError(f"{path.name}:{lineno}", "record is neither meta, event, nor action")
    if session_id is None:
        raise ParseError(path.name, "script contains no transcript events")
    return Script(
        path=str(path),
        meta=meta,
        records=records,
        session_id=session_id,
        started_at_ms=started_at_ms or 0,
    )


def _resolve_click(record: dict, suggestions: list[dict]) -> dict:
    """Fill query_id from query_text against suggestions seen so far."""
    action = dict(record)
    if "query_id" in action or action["action"] != "click_query":
        action.pop("query_text", None)
        return action
    text = action.pop("query_text", None)
    if text is None:
        raise UnknownReferenceError("click_query needs query_id or query_text")
    for doc in suggestions:
        if doc["text"] == text:
            action["query_id"] = doc["query_id"]
            return action
    raise UnknownReferenceError(f"no suggestion with text {text!r}")


def call_record_from_journal(
    journal: list[dict], meta: ScriptMeta, config: EngineConfig, session_id: str
) -> tuple[CallRecord, list[AnswerRecord]]:
    """Derive the finished-call record from journal entries alone, so both
    replay modes and post-hoc analysis agree byte for byte."""
    events = [e["payload"] for e in journal if e["kind"] == "input-event"]
    answers: list[AnswerRecord] = []
    outcome = "unresolved"
    for entry in journal:
        if entry["kind"] != "assist-output":
            continue
        envelope = entry["payload"]
        if envelope["type"] == "answer.delivered":
            answers.append(AnswerRecord.from_doc(envelope["payload"]))
        elif envelope["type"] == "call.final_summary":
            outcome = envelope["payload"]["record"]["outcome"]
    if not events:
        raise ParseError("journal", "no input events journaled")
    duration_ms = events[-1]["t_end_ms"] - events[0]["t_start_ms"]
    faq_hits = sum(1 for a in answers if a.route == "faq")
    rag_calls = sum(1 for a in answers if a.route == "rag")
    record = CallRecord(
        session_id=session_id,
        duration_s=duration_ms / 1000.0,
        cohort=meta.cohort,
        faq_hits=faq_hits,
        rag_calls=rag_calls,
        converted_enquiry=meta.converted_enquiry,
        converted_booking=meta.converted_booking,
        outcome=outcome,
        config_version=config.config_version,
    )
    return record, answers


def _write_result(result: ReplayResult, out_dir: Path) -> None:
    session_dir = out_dir / result.session_id
    session_dir.mkdir(parents=True, exist_ok=True)
    (session_dir / "call_record.json").write_bytes(
        canonical.dump_line(result.call_record.to_doc())
    )
    (session_dir / "answers.ndjson").write_bytes(
        b"".join(canonical.dump_line(a.to_doc()) for a in result.answers)
    )


def replay(
    script_path: str | Path,
    config: EngineConfig,
    stores: Stores,
    mode: str = "in-process",
    out_dir: str | Path | None = None,
) -> ReplayResult:
    script = parse_script(script_path)
    out = Path(out_dir) if out_dir is not None else None
    if mode == "in-process":
        result = _replay_in_process(script, config, stores, out)
    elif mode == "wire":
        if out is None:
            raise ParseError("mode", "wire mode requires an output directory")
        result = _replay_wire(script, config, stores, out)
    else:
        raise ParseError("mode", f"unknown replay mode {mode!r}")
    if out is not None:
        _write_result(result, out)
    return result


def _replay_in_process(
    script: Script, config: EngineConfig, stores: Stores, out_dir: Path | None
) -> ReplayResult:
    engine = Engine(config, stores, journal_root=out_dir)
    runtime = engine.create_session(script.session_id, script.started_at_ms)
    for record in script.records:
        if "action" in record:
            suggestions = [q.to_doc() for q in runtime.state.suggestions]
            runtime.apply_action(_resolve_click(record, suggestions))
        else:
            runtime.apply_event(record)
    journal = [entry.to_doc() for entry in runtime.state.journal]
    call_record, answers = call_record_from_journal(journal, script.meta, config, script.session_id)
    return ReplayResult(
        session_id=script.session_id,
        journal=journal,
        call_record=call_record,
        answers=answers,
        out_dir=out_dir,
    )


def replay_journal(
    journal: list[dict], config: EngineConfig, stores: Stores
) -> tuple[Engine, list[str]]:
    """Re-drive a journal's inputs (input-event and agent-action entries)
    through a fresh engine. Returns the engine and the state snapshot taken
    after each replayed input, for step-by-step comparison against the
    original run."""
    from .session import snapshot as state_snapshot

    inputs = [e for e in journal if e["kind"] in ("input-event", "agent-action")]
    if not inputs:
        raise ParseError("journal", "journal has no replayable inputs")
    first_event = next((e for e in journal if e["kind"] == "input-event"), None)
    if first_event is None:
        raise ParseError("journal", "journal has no input events")
    session_id = first_event["payload"]["session_id"]
    engine = Engine(config, stores)
    runtime = engine.create_session(session_id, first_event["payload"]["t_start_ms"])
    snapshots: list[str] = []
    for entry in inputs:
        if entry["kind"] == "input-event":
            runtime.apply_event(entry["payload"])
        else:
            runtime.apply_action(entry["payload"])
        snapshots.append(state_snapshot(runtime.state))
    return engine, snapshots


# ── wire mode ───────────────────────────────────────────────────────────────


class EphemeralService:
    """A loopback service on an OS-assigned port, run on its own loop thread."""

    def __init__(self, config: EngineConfig, stores: Stores, journal_root: Path | None):
        self.engine = Engine(config, stores, journal_root=journal_root)
        self.config = config
        self.port: int | None = None
        self._loop: asyncio.AbstractEventLoop | None = None
        self._thread: threading.Thread | None = None
        self._started = threading.Event()

    def __enter__(self) -> "EphemeralService":
        self._thread = threading.Thread(target=self._run, daemon=True)
        self._thread.start()
        if not self._started.wait(timeout=10.0):
            raise RuntimeError("service failed to start")
        return self

    def _run(self) -> None:
        self._loop = asyncio.new_event_loop()
        asyncio.set_event_loop(self._loop)
        server = AssistServer(
            self.engine, "127.0.0.1", 0, pace_delivery=self.config.pace_delivery
        )
        self._loop.run_until_complete(server.start())
        self.port = server.bound_port
        self._started.set()
        try:
            self._loop.run_forever()
        finally:
            self._loop.run_until_complete(server.stop())
            pending = asyncio.all_tasks(self._loop)
            for task in pending:
                task.cancel()
            if pending:
                self._loop.run_until_complete(asyncio.gather(*pending, return_exceptions=True))
            self._loop.run_until_complete(self._loop.shutdown_asyncgens())
            self._loop.close()

    def __exit__(self, *exc_info) -> None:
        if self._loop is not None:
            self._loop.call_soon_threadsafe(self._loop.stop)
        if self._thread is not None:
            self._thread.join(timeout=10.0)


class WireClient:
    """Blocking newline-delimited frame client with a reader thread."""

    def __init__(self, host: str, port: int, timeout: float = 10.0):
        self.sock = socket.create_connection((host, port), timeout=timeout)
        self.sock.settimeout(None)  # reader blocks; close() wakes it via shutdown
        self.timeout = timeout
        self.received: list[dict] = []
        self._cond = threading.Condition()
        self._closed = False
        self._reader = threading.Thread(target=self._read_loop, daemon=True)
        self._reader.start()

    def _read_loop(self) -> None:
        buffer = b""
        try:
            while True:
                chunk = self.sock.recv(65536)
                if not chunk:
                    break
                buffer += chunk
                while b"\n" in buffer:
                    line, buffer = buffer.split(b"\n", 1)
                    frame = canonical.loads(line)
                    with self._cond:
                        self.received.append(frame)
                        self._cond.notify_all()
        except OSError:
            pass
        finally:
            with self._cond:
                self._closed = True
                self._cond.notify_all()

    def send(self, frame: dict) -> None:
        self.sock.sendall(canonical.dump_line(frame))

    def wait_for(self, predicate, timeout: float | None = None) -> dict:
        """Block until a received frame satisfies ``predicate``."""
        deadline = time.monotonic() + (timeout or self.timeout)
        with self._cond:
            checked = 0
            while True:
                for frame in self.received[checked:]:
                    if predicate(frame):
                        return frame
                checked = len(self.received)
                remaining = deadline - time.monotonic()
                if remaining <= 0 or (self._closed and checked == len(self.received)):
                    raise TimeoutError("no matching frame received")
                self._cond.wait(timeout=min(remaining, 0.5))

    def close(self) -> None:
        try:
            self.sock.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        try:
            self.sock.close()
        except OSError:
            pass
        self._reader.join(timeout=5.0)


def _replay_wire(script: Script, config: EngineConfig, stores: Stores, out_dir: Path) -> ReplayResult:
    with EphemeralService(config, stores, journal_root=out_dir) as service:
        client = WireClient("127.0.0.1", service.port)
        try:
            client.send(
                {
                    "type": "hello",
                    "role": "driver",
                    "session_id": script.session_id,
                    "started_at_ms": script.started_at_ms,
                }
            )
            client.wait_for(lambda f: f["type"] == "hello.ok")
            suggestions: list[dict] = []

            def seen_suggestions() -> list[dict]:
                out = []
                for frame in client.received:
                    if frame.get("type") == "query.suggested":
                        out.extend(frame["payload"]["queries"])
                return out

            for record in script.records:
                if "action" in record:
                    if record["action"] == "click_query" and "query_id" not in record:
                        text = record.get("query_text")
                        client.wait_for(
                            lambda f: f.get("type") == "query.suggested"
                            and any(q["text"] == text for q in f["payload"]["queries"])
                        )
                        action = _resolve_click(record, seen_suggestions())
                    else:
                        action = _resolve_click(record, seen_suggestions())
                    client.send(
                        {
                            "type": "agent.action",
                            "session_id": script.session_id,
                            "t_ms": action.get("t_ms", 0),
                            "payload": action,
                        }
                    )
                else:
                    client.send(
                        {
                            "type": "transcript.event",
                            "session_id": script.session_id,
                            "t_ms": record["t_end_ms"],
                            "payload": record,
                        }
                    )
            client.wait_for(lambda f: f["type"] == "call.final_summary")
        finally:
            client.close()

    journal_path = out_dir / script.session_id / "journal.ndjson"
    journal = [
        canonical.loads(line)
        for line in journal_path.read_text(encoding="utf-8").splitlines()
        if line.strip()
    ]
    call_record, answers = call_record_from_journal(journal, script.meta, config, script.session_id)
    return ReplayResult(
        session_id=script.session_id,
        journal=journal,
        call_record=call_record,
        answers=answers,
        out_dir=out_dir,
    )
