"""The observe-understand-decide-act-assist loop, one event at a time.

Stage order is fixed for every event: normalize, extract entities, update
intents, update sentiment, update profile, trigger workflows, refresh
next-best actions, generate queries, optional auto-route, update the
partial summary. A stage emits its message only when its output changed,
so the relative message order within a turn is deterministic and identical
across replays.

:class:`Engine` owns the live sessions; :class:`SessionRuntime` serializes
one session's mutations, journals every pipeline output before delivering
it to subscribers, and persists journal/snapshot files when given a root
directory. Error frames are connection-scoped: they carry seq -1 and are
never journaled.
"""

from __future__ import annotations

from pathlib import Path
from typing import Callable

from . import canonical
from .config import EngineConfig
from .errors import (
    EventOrderError,
    SessionEndedError,
    StateError,
    UnknownReferenceError,
    UnknownSessionError,
)
from .ingest import TranscriptEvent, normalize_display_text, parse_event_record
from .retrieval import generate_queries, route
from .session import JournalEntry, SessionRegistry, SessionState, append_journal, snapshot
from .stores import Stores
from .summarize import final_summary, update_partial_summary
from .understanding import extract_entities, update_intents, update_profile, update_sentiment
from .workflow import abandon_open_instances, advance, next_best_actions, trigger_workflows

MESSAGE_TYPES = (
    "transcript.event",
    "state.entities",
    "state.intents",
    "sentiment.update",
    "workflow.triggered",
    "workflow.actions",
    "query.suggested",
    "answer.delivered",
    "summary.partial",
    "call.final_summary",
    "error",
)

ACTION_KINDS = ("click_query", "complete_step", "end_call")


def process_event(
    state: SessionState, event: TranscriptEvent, config: EngineConfig, stores: Stores
) -> tuple[TranscriptEvent, list[tuple[str, dict]]]:
    """Run the fixed stage order over one parsed event. Returns the
    normalized event and ordered (type, payload) pairs; mutates state."""
    event, unmatched = normalize_display_text(event, stores.transliteration)
    state.diagnostics["unmatched_tokens"] += unmatched

    messages: list[tuple[str, dict]] = [("transcript.event", event.to_doc())]

    if not event.is_final:
        state.captions[event.speaker] = event.display_text
        return event, messages

    state.captions.pop(event.speaker, None)
    state.turn_count += 1
    state.last_final_turn = event.turn_index

    added = state.add_entities(extract_entities(event, stores.patterns))
    if added:
        messages.append(
            (
                "state.entities",
                {
                    "new": [e.to_doc() for e in added],
                    "entities": [e.to_doc() for e in state.all_entities()],
                },
            )
        )

    newly_triggered: list[str] = []
    if event.speaker == "customer":
        top_before = state.top_intent()
        hits_before = sum(len(ih.cue_hits) for ih in state.intents.values())
        newly_triggered = update_intents(state, event, stores.registry)
        hits_after = sum(len(ih.cue_hits) for ih in state.intents.values())
        if hits_after != hits_before:
            top_after = state.top_intent()
            ranked = sorted(
                state.intents.values(), key=lambda ih: (-ih.confidence, ih.label)
            )
            messages.append(
                (
                    "state.intents",
                    {
                        "intents": [ih.to_doc() for ih in ranked],
                        "top_intent": top_after,
                        "top_changed": top_after != top_before,
                    },
                )
            )

        sample = update_sentiment(
            state,
            event,
            stores.lexicon,
            config.csat_steepness,
            config.nps_detractor_below,
            config.nps_promoter_at,
        )
        polarities = [s.polarity for s in state.sentiment_trajectory]
        payload = sample.to_doc()
        payload["mean_polarity"] = sum(polarities) / len(polarities)
        messages.append(("sentiment.update", payload))

        update_profile(state, event, stores.cue_sets)

    created = trigger_workflows(newly_triggered, stores.registry, stores.catalog, state)
    if created:
        messages.append(
            (
                "workflow.triggered",
                {
                    "instances": [
                        {
                            "workflow_id": w.workflow_id,
                            "title": stores.catalog.get(w.workflow_id).title,
                            "triggered_at_turn": w.triggered_at_turn,
                        }
                        for w in created
                    ]
                },
            )
        )

    messages.extend(_refresh_actions(state, config, stores))

    new_queries: list = []
    if event.speaker == "customer":
        new_queries = generate_queries(state, event, stores.registry, config)
        if new_queries:
            messages.append(
                ("query.suggested", {"queries": [q.to_doc() for q in new_queries]})
            )

    if config.auto_route:
        for query in new_queries:
            record = route(
                query,
                stores.faq_cache,
                stores.kb_index,
                config,
                now_ms=event.t_end_ms,
                turn_index=event.turn_index,
            )
            state.answers.append(record)
            messages.append(("answer.delivered", record.to_doc()))

    previous = state.partial_summary
    updated = update_partial_summary(previous, state, event, config, stores.patterns)
    state.partial_summary = updated
    if updated.bullets != previous.bullets:
        messages.append(("summary.partial", updated.to_doc()))

    return event, messages


def _refresh_actions(
    state: SessionState, config: EngineConfig, stores: Stores
) -> list[tuple[str, dict]]:
    """Emit workflow.actions for every instance whose guidance changed."""
    messages: list[tuple[str, dict]] = []
    for instance in state.workflows:
        actions = next_best_actions(instance, stores.catalog, state, config.lookahead)
        payload = {
            "workflow_id": instance.workflow_id,
            "title": stores.catalog.get(instance.workflow_id).title,
            "status": instance.status,
            "outcome": instance.outcome,
            "actions": actions,
        }
        if state.published_actions.get(instance.workflow_id) != payload:
            state.published_actions[instance.workflow_id] = payload
            messages.append(("workflow.actions", payload))
    return messages


def handle_agent_action(
    state: SessionState, action: dict, config: EngineConfig, stores: Stores
) -> list[tuple[str, dict]]:
    """Dispatch one agent action; raises on stale references, leaving the
    state untouched apart from the already-journaled action entry."""
    kind = action.get("action")
    if kind == "click_query":
        query_id = action.get("query_id")
        query = next((q for q in state.suggestions if q.query_id == query_id), None)
        if query is None:
            raise UnknownReferenceError(f"unknown query_id {query_id!r}")
        if any(a.query_id == query_id for a in state.answers):
            raise StateError(f"query {query_id!r} already answered")
        record = route(
            query,
            stores.faq_cache,
            stores.kb_index,
            config,
            now_ms=action.get("t_ms", 0),
            turn_index=max(0, state.last_final_turn),
        )
        state.answers.append(record)
        return [("answer.delivered", record.to_doc())]

    if kind == "complete_step":
        workflow_id = action.get("workflow_id")
        instance = next(
            (w for w in state.workflows if w.workflow_id == workflow_id and w.status == "active"),
            None,
        )
        if instance is None:
            raise UnknownReferenceError(f"no active workflow {workflow_id!r}")
        advance(
            instance,
            stores.catalog,
            step_id=action.get("step_id", ""),
            turn_index=max(0, state.last_final_turn),
            outcome=action.get("outcome"),
        )
        return _refresh_actions(state, config, stores)

    if kind == "end_call":
        abandon_open_instances(state)
        state.ended = True
        summary = final_summary(state, stores.patterns)
        return [
            ("call.final_summary", {"record": summary.to_doc(), "text": summary.redacted_text})
        ]

    raise UnknownReferenceError(f"unknown action {kind!r}")


class SessionRuntime:
    """One session's serialized mutation lane: journal first, then deliver."""

    def __init__(
        self,
        state: SessionState,
        config: EngineConfig,
        stores: Stores,
        journal_dir: Path | None = None,
    ):
        self.state = state
        self.config = config
        self.stores = stores
        self.subscribers: list[Callable[[dict], None]] = []
        self.final = None  # FinalSummary doc payload once ended
        self._journal_path: Path | None = None
        if journal_dir is not None:
            session_dir = journal_dir / state.session_id
            session_dir.mkdir(parents=True, exist_ok=True)
            self._journal_path = session_dir / "journal.ndjson"
            self._journal_path.write_bytes(b"")

    # ── journaling ──────────────────────────────────────────────────────

    def _next_seq(self) -> int:
        return self.state.journal[-1].seq + 1 if self.state.journal else 0

    def _journal(self, kind: str, t_ms: int, payload: dict) -> JournalEntry:
        entry = JournalEntry(seq=self._next_seq(), kind=kind, t_ms=t_ms, payload=payload)
        append_journal(self.state, entry)
        if self._journal_path is not None:
            with self._journal_path.open("ab") as fh:
                fh.write(canonical.dump_line(entry.to_doc()))
        return entry

    def _emit(self, msg_type: str, t_ms: int, payload: dict) -> dict:
        envelope = {
            "type": msg_type,
            "session_id": self.state.session_id,
            "seq": self._next_seq(),
            "t_ms": t_ms,
            "payload": payload,
        }
        self._journal("assist-output", t_ms, envelope)
        for deliver in list(self.subscribers):
            deliver(envelope)
        return envelope

    def journal_lines(self) -> list[bytes]:
        return [canonical.dump_line(e.to_doc()) for e in self.state.journal]

    def write_snapshot(self) -> None:
        if self._journal_path is not None:
            path = self._journal_path.with_name("snapshot.json")
            path.write_text(snapshot(self.state) + "\n", encoding="utf-8")

    # ── inbound ─────────────────────────────────────────────────────────

    def apply_event(self, record: dict) -> list[dict]:
        """Validate, journal, process one transcript event record."""
        event = parse_event_record(record)
        if event.session_id != self.state.session_id:
            raise EventOrderError(
                f"event session {event.session_id!r} does not match {self.state.session_id!r}"
            )
        if self.state.ended:
            raise SessionEndedError(f"session {self.state.session_id} has ended")
        if event.turn_index <= self.state.last_final_turn:
            raise EventOrderError(
                f"turn_index {event.turn_index} not after {self.state.last_final_turn}"
            )
        self._journal("input-event", event.t_end_ms, record)
        _, messages = process_event(self.state, event, self.config, self.stores)
        return [self._emit(msg_type, event.t_end_ms, payload) for msg_type, payload in messages]

    def apply_action(self, record: dict) -> list[dict]:
        """Journal the agent action, then dispatch it; reference errors
        propagate after the action entry is already in the journal."""
        if self.state.ended:
            raise SessionEndedError(f"session {self.state.session_id} has ended")
        t_ms = record.get("t_ms", 0)
        self._journal("agent-action", t_ms, record)
        messages = handle_agent_action(self.state, record, self.config, self.stores)
        envelopes = [self._emit(msg_type, t_ms, payload) for msg_type, payload in messages]
        if self.state.ended:
            self.final = envelopes[-1]["payload"] if envelopes else None
            self.write_snapshot()
        return envelopes

    # ── subscribers ────────────────────────────────────────────────────

    def subscribe(self, deliver: Callable[[dict], None], last_seen_seq: int = -1) -> int:
        """Replay journaled outputs after ``last_seen_seq``, then attach."""
        replayed = 0
        for entry in self.state.journal:
            if entry.kind == "assist-output" and entry.seq > last_seen_seq:
                deliver(entry.payload)
                replayed += 1
        self.subscribers.append(deliver)
        return replayed

    def unsubscribe(self, deliver: Callable[[dict], None]) -> None:
        if deliver in self.subscribers:
            self.subscribers.remove(deliver)


class Engine:
    """All live sessions behind one config/store bundle."""

    def __init__(self, config: EngineConfig, stores: Stores, journal_root: str | Path | None = None):
        self.config = config
        self.stores = stores
        self.journal_root = Path(journal_root) if journal_root is not None else None
        self.registry = SessionRegistry()
        self.runtimes: dict[str, SessionRuntime] = {}

    def create_session(self, session_id: str, started_at_ms: int) -> SessionRuntime:
        state = self.registry.create(session_id, started_at_ms)
        runtime = SessionRuntime(state, self.config, self.stores, self.journal_root)
        self.runtimes[session_id] = runtime
        return runtime

    def get(self, session_id: str) -> SessionRuntime | None:
        return self.runtimes.get(session_id)

    def require(self, session_id: str) -> SessionRuntime:
        runtime = self.runtimes.get(session_id)
        if runtime is None:
            raise UnknownSessionError(f"unknown session {session_id!r}")
        return runtime
