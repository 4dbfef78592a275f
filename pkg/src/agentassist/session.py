"""Per-call session state and the append-only journal.

A session owns everything the pipeline learns about one call: entities,
intent hypotheses, workflow instances, suggestions, answers, the running
partial summary, the sentiment trajectory, and behavioral profile cues.
All of it is plain data reachable from :class:`SessionState`, so a state can
be deep-copied, serialized, and compared without touching live handles.

The journal is the session's source of truth: a gap-free, strictly
increasing sequence of entries (inbound transcript events, assist outputs,
agent actions). Replaying the journal from an empty state reproduces the
final snapshot byte for byte; :func:`snapshot` renders the canonical form
used for that comparison. Timestamps everywhere are simulated milliseconds
supplied by the driver, never wall-clock reads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import canonical
from .errors import DuplicateSessionError, JournalOrderError, SessionEndedError
from .models import (
    AnswerRecord,
    Entity,
    IntentHypothesis,
    PartialSummary,
    ProfileCues,
    SentimentSample,
    SuggestedQuery,
    WorkflowInstance,
)

JOURNAL_KINDS = ("input-event", "assist-output", "agent-action")


@dataclass(frozen=True)
class JournalEntry:
    # immutable once appended; the payload dict is owned by the journal and
    # never mutated after the entry is built
    seq: int
    kind: str
    t_ms: int
    payload: dict

    def to_doc(self) -> dict:
        return {"seq": self.seq, "kind": self.kind, "t_ms": self.t_ms, "payload": self.payload}

    @classmethod
    def from_doc(cls, doc: dict) -> "JournalEntry":
        return cls(doc["seq"], doc["kind"], doc["t_ms"], doc["payload"])


@dataclass(eq=False)
class SessionState:
    session_id: str
    started_at_ms: int
    entities: dict[str, list[Entity]] = field(default_factory=dict)
    intents: dict[str, IntentHypothesis] = field(default_factory=dict)
    workflows: list[WorkflowInstance] = field(default_factory=list)
    suggestions: list[SuggestedQuery] = field(default_factory=list)
    answers: list[AnswerRecord] = field(default_factory=list)
    partial_summary: PartialSummary = field(default_factory=PartialSummary)
    sentiment_trajectory: list[SentimentSample] = field(default_factory=list)
    profile: ProfileCues = field(default_factory=ProfileCues)
    turn_count: int = 0
    ended: bool = False
    # bookkeeping beyond the core fields, still part of the replayable state
    last_final_turn: int = -1
    captions: dict[str, str] = field(default_factory=dict)
    diagnostics: dict[str, int] = field(default_factory=lambda: {"unmatched_tokens": 0, "templates_skipped": 0})
    published_actions: dict[str, dict] = field(default_factory=dict)
    # journal lives alongside the state but is not part of the snapshot
    journal: list[JournalEntry] = field(default_factory=list, repr=False)

    def entity_kinds_present(self) -> set[str]:
        return {kind for kind, values in self.entities.items() if values}

    def has_entity(self, kind: str) -> bool:
        return bool(self.entities.get(kind))

    def first_entity(self, kind: str) -> Entity | None:
        values = self.entities.get(kind)
        return values[0] if values else None

    def add_entities(self, found: list[Entity]) -> list[Entity]:
        """Deduplicate by (kind, value), keeping the first occurrence."""
        seen = {e.dedup_key() for values in self.entities.values() for e in values}
        added: list[Entity] = []
        for entity in found:
            key = entity.dedup_key()
            if key in seen:
                continue
            seen.add(key)
            self.entities.setdefault(entity.kind, []).append(entity)
            added.append(entity)
        return added

    def all_entities(self) -> list[Entity]:
        out = [e for values in self.entities.values() for e in values]
        out.sort(key=lambda e: (e.turn_index, e.span[0], e.kind))
        return out

    def top_intent(self) -> str | None:
        """Argmax-confidence label; ties break toward the lower label."""
        best: str | None = None
        best_conf = 0.0
        for label in sorted(self.intents):
            conf = self.intents[label].confidence
            if conf > best_conf:
                best, best_conf = label, conf
        return best

    def to_doc(self) -> dict:
        return {
            "session_id": self.session_id,
            "started_at_ms": self.started_at_ms,
            "entities": {k: [e.to_doc() for e in v] for k, v in self.entities.items()},
            "intents": {label: ih.to_doc() for label, ih in self.intents.items()},
            "workflows": [w.to_doc() for w in self.workflows],
            "suggestions": [q.to_doc() for q in self.suggestions],
            "answers": [a.to_doc() for a in self.answers],
            "partial_summary": self.partial_summary.to_doc(),
            "sentiment_trajectory": [s.to_doc() for s in self.sentiment_trajectory],
            "profile": self.profile.to_doc(),
            "turn_count": self.turn_count,
            "ended": self.ended,
            "last_final_turn": self.last_final_turn,
            "captions": dict(self.captions),
            "diagnostics": dict(self.diagnostics),
            "published_actions": dict(self.published_actions),
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "SessionState":
        return cls(
            session_id=doc["session_id"],
            started_at_ms=doc["started_at_ms"],
            entities={k: [Entity.from_doc(e) for e in v] for k, v in doc["entities"].items()},
            intents={label: IntentHypothesis.from_doc(d) for label, d in doc["intents"].items()},
            workflows=[WorkflowInstance.from_doc(d) for d in doc["workflows"]],
            suggestions=[SuggestedQuery.from_doc(d) for d in doc["suggestions"]],
            answers=[AnswerRecord.from_doc(d) for d in doc["answers"]],
            partial_summary=PartialSummary.from_doc(doc["partial_summary"]),
            sentiment_trajectory=[SentimentSample.from_doc(d) for d in doc["sentiment_trajectory"]],
            profile=ProfileCues.from_doc(doc["profile"]),
            turn_count=doc["turn_count"],
            ended=doc["ended"],
            last_final_turn=doc["last_final_turn"],
            captions=dict(doc["captions"]),
            diagnostics=dict(doc["diagnostics"]),
            published_actions=dict(doc["published_actions"]),
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SessionState):
            return NotImplemented
        return self.to_doc() == other.to_doc()


def create_session(session_id: str, started_at_ms: int) -> SessionState:
    """Fresh empty state; uniqueness is enforced by :class:`SessionRegistry`."""
    if not session_id:
        raise DuplicateSessionError("session_id must be non-empty")
    return SessionState(session_id=session_id, started_at_ms=started_at_ms)


def append_journal(state: SessionState, entry: JournalEntry) -> SessionState:
    """Append one entry; seq must be exactly last + 1 (no gaps, no repeats)."""
    if entry.kind not in JOURNAL_KINDS:
        raise JournalOrderError(f"unknown journal kind {entry.kind!r}")
    expected = state.journal[-1].seq + 1 if state.journal else 0
    if entry.seq != expected:
        raise JournalOrderError(f"expected seq {expected}, got {entry.seq}")
    if state.ended and not _is_terminal_entry(entry):
        raise SessionEndedError(f"session {state.session_id} has ended")
    state.journal.append(entry)
    return state


def _is_terminal_entry(entry: JournalEntry) -> bool:
    return entry.kind == "assist-output" and entry.payload.get("type") == "call.final_summary"


def snapshot(state: SessionState) -> str:
    """Canonical single-line serialization of the state (journal excluded)."""
    return canonical.dumps(state.to_doc())


class SessionRegistry:
    """Live sessions by id; creation rejects duplicates with a distinct code."""

    def __init__(self) -> None:
        self._sessions: dict[str, SessionState] = {}

    def create(self, session_id: str, started_at_ms: int) -> SessionState:
        if session_id in self._sessions:
            raise DuplicateSessionError(f"session {session_id!r} already live")
        state = create_session(session_id, started_at_ms)
        self._sessions[session_id] = state
        return state

    def get(self, session_id: str) -> SessionState | None:
        return self._sessions.get(session_id)

    def __contains__(self, session_id: str) -> bool:
        return session_id in self._sessions

    def __len__(self) -> int:
        return len(self._sessions)
