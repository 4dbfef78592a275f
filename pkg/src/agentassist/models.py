"""Domain records.

Plain dataclasses with ``to_doc``/``from_doc`` document round-trips. Docs are
canonical-serializable (str/int/float/bool/list/dict only) so any record can
be journaled, snapshotted, or put on the wire without special cases. No
compiled patterns or open handles live here: state must stay safely
transferable between execution contexts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

ENTITY_KINDS = ("name", "email", "phone", "account_number")
NPS_BANDS = ("detractor", "passive", "promoter")
FAQ_STATUSES = ("candidate", "validated", "expired")
PROVENANCES = ("mined-transcript", "mined-live")
ROUTES = ("faq", "rag")
WORKFLOW_STATUSES = ("active", "completed", "abandoned")


@dataclass
class Entity:
    kind: str
    value: str
    turn_index: int
    span: tuple[int, int]

    def dedup_key(self) -> tuple[str, str]:
        return (self.kind, self.value.lower())

    def to_doc(self) -> dict:
        return {
            "kind": self.kind,
            "value": self.value,
            "turn_index": self.turn_index,
            "span": [self.span[0], self.span[1]],
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "Entity":
        return cls(doc["kind"], doc["value"], doc["turn_index"], (doc["span"][0], doc["span"][1]))


@dataclass
class IntentHypothesis:
    """Accumulated evidence for one intent label.

    ``confidence`` is always the noisy-OR of the cue-hit weights,
    1 - prod(1 - w_i); it is recomputed from the full hit list with weights
    multiplied in sorted order, which makes the float literally invariant to
    the order hits arrived in.
    """

    label: str
    confidence: float = 0.0
    cue_hits: list[tuple[str, int, float]] = field(default_factory=list)
    triggered: bool = False
    triggered_at_turn: int | None = None

    def recompute_confidence(self) -> float:
        residual = 1.0
        for weight in sorted(hit[2] for hit in self.cue_hits):
            residual *= 1.0 - weight
        self.confidence = min(1.0, max(0.0, 1.0 - residual))
        return self.confidence

    def to_doc(self) -> dict:
        return {
            "label": self.label,
            "confidence": self.confidence,
            "cue_hits": [[c, t, w] for c, t, w in self.cue_hits],
            "triggered": self.triggered,
            "triggered_at_turn": self.triggered_at_turn,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "IntentHypothesis":
        return cls(
            label=doc["label"],
            confidence=float(doc["confidence"]),
            cue_hits=[(h[0], h[1], float(h[2])) for h in doc["cue_hits"]],
            triggered=doc["triggered"],
            triggered_at_turn=doc["triggered_at_turn"],
        )


@dataclass
class SentimentSample:
    turn_index: int
    polarity: float
    csat_likelihood: float
    nps_band: str

    def to_doc(self) -> dict:
        return {
            "turn_index": self.turn_index,
            "polarity": self.polarity,
            "csat_likelihood": self.csat_likelihood,
            "nps_band": self.nps_band,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "SentimentSample":
        return cls(doc["turn_index"], float(doc["polarity"]), float(doc["csat_likelihood"]), doc["nps_band"])


@dataclass
class ProfileCues:
    interest_hits: int = 0
    hesitation_hits: int = 0
    goal_phrases: list[str] = field(default_factory=list)

    def to_doc(self) -> dict:
        return {
            "interest_hits": self.interest_hits,
            "hesitation_hits": self.hesitation_hits,
            "goal_phrases": list(self.goal_phrases),
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "ProfileCues":
        return cls(doc["interest_hits"], doc["hesitation_hits"], list(doc["goal_phrases"]))


@dataclass
class WorkflowStep:
    step_id: str
    instruction: str
    requires: list[str] = field(default_factory=list)


@dataclass
class WorkflowDefinition:
    workflow_id: str
    title: str
    steps: list[WorkflowStep]
    terminal_outcomes: list[str]


@dataclass
class WorkflowInstance:
    workflow_id: str
    session_id: str
    triggered_at_turn: int
    cursor: int = 0
    completed_steps: list[tuple[str, int]] = field(default_factory=list)
    status: str = "active"
    outcome: str | None = None

    def to_doc(self) -> dict:
        return {
            "workflow_id": self.workflow_id,
            "session_id": self.session_id,
            "triggered_at_turn": self.triggered_at_turn,
            "cursor": self.cursor,
            "completed_steps": [[s, t] for s, t in self.completed_steps],
            "status": self.status,
            "outcome": self.outcome,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "WorkflowInstance":
        return cls(
            workflow_id=doc["workflow_id"],
            session_id=doc["session_id"],
            triggered_at_turn=doc["triggered_at_turn"],
            cursor=doc["cursor"],
            completed_steps=[(s[0], s[1]) for s in doc["completed_steps"]],
            status=doc["status"],
            outcome=doc["outcome"],
        )


@dataclass
class SuggestedQuery:
    query_id: str
    session_id: str
    source_turn: int
    text: str
    intent_label: str
    kb_domain_tag: str
    created_at_ms: int

    def to_doc(self) -> dict:
        return {
            "query_id": self.query_id,
            "session_id": self.session_id,
            "source_turn": self.source_turn,
            "text": self.text,
            "intent_label": self.intent_label,
            "kb_domain_tag": self.kb_domain_tag,
            "created_at_ms": self.created_at_ms,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "SuggestedQuery":
        return cls(
            doc["query_id"], doc["session_id"], doc["source_turn"], doc["text"],
            doc["intent_label"], doc["kb_domain_tag"], doc["created_at_ms"],
        )


@dataclass
class FaqEntry:
    entry_id: str
    normalized_question: list[str]
    answer: str
    kb_domain_tag: str
    status: str = "candidate"
    provenance: str = "mined-transcript"
    version: int = 1
    hit_count: int = 0
    expires_at_ms: int | None = None

    def to_doc(self) -> dict:
        return {
            "entry_id": self.entry_id,
            "normalized_question": list(self.normalized_question),
            "answer": self.answer,
            "kb_domain_tag": self.kb_domain_tag,
            "status": self.status,
            "provenance": self.provenance,
            "version": self.version,
            "hit_count": self.hit_count,
            "expires_at_ms": self.expires_at_ms,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "FaqEntry":
        return cls(
            entry_id=doc["entry_id"],
            normalized_question=list(doc["normalized_question"]),
            answer=doc["answer"],
            kb_domain_tag=doc["kb_domain_tag"],
            status=doc["status"],
            provenance=doc["provenance"],
            version=doc["version"],
            hit_count=doc["hit_count"],
            expires_at_ms=doc["expires_at_ms"],
        )


@dataclass
class AnswerRecord:
    query_id: str
    session_id: str
    query_text: str
    route: str
    answer_text: str
    matched_entry_id: str | None
    similarity: float | None
    passages: list[tuple[str, float]]
    simulated_latency_ms: int
    llm_calls_avoided: int
    created_at_ms: int
    delivered_at_turn: int

    def to_doc(self) -> dict:
        return {
            "query_id": self.query_id,
            "session_id": self.session_id,
            "query_text": self.query_text,
            "route": self.route,
            "answer_text": self.answer_text,
            "matched_entry_id": self.matched_entry_id,
            "similarity": self.similarity,
            "passages": [[d, s] for d, s in self.passages],
            "simulated_latency_ms": self.simulated_latency_ms,
            "llm_calls_avoided": self.llm_calls_avoided,
            "created_at_ms": self.created_at_ms,
            "delivered_at_turn": self.delivered_at_turn,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "AnswerRecord":
        return cls(
            query_id=doc["query_id"],
            session_id=doc["session_id"],
            query_text=doc["query_text"],
            route=doc["route"],
            answer_text=doc["answer_text"],
            matched_entry_id=doc["matched_entry_id"],
            similarity=None if doc["similarity"] is None else float(doc["similarity"]),
            passages=[(p[0], float(p[1])) for p in doc["passages"]],
            simulated_latency_ms=doc["simulated_latency_ms"],
            llm_calls_avoided=doc["llm_calls_avoided"],
            created_at_ms=doc["created_at_ms"],
            delivered_at_turn=doc["delivered_at_turn"],
        )


@dataclass
class PartialSummary:
    as_of_turn: int = -1
    bullets: list[str] = field(default_factory=list)
    budget: int = 10
    answers_reflected: int = 0

    def to_doc(self) -> dict:
        return {
            "as_of_turn": self.as_of_turn,
            "bullets": list(self.bullets),
            "budget": self.budget,
            "answers_reflected": self.answers_reflected,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "PartialSummary":
        return cls(doc["as_of_turn"], list(doc["bullets"]), doc["budget"], doc["answers_reflected"])


@dataclass
class FinalSummary:
    session_id: str
    primary_intent: str
    resolution_path: list[str]
    agent_actions: list[str]
    sentiment_trajectory: list[tuple[int, float]]
    outcome: str
    redacted_text: str
    redaction_count: int

    def to_doc(self) -> dict:
        return {
            "session_id": self.session_id,
            "primary_intent": self.primary_intent,
            "resolution_path": list(self.resolution_path),
            "agent_actions": list(self.agent_actions),
            "sentiment_trajectory": [[t, p] for t, p in self.sentiment_trajectory],
            "outcome": self.outcome,
            "redacted_text": self.redacted_text,
            "redaction_count": self.redaction_count,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "FinalSummary":
        return cls(
            session_id=doc["session_id"],
            primary_intent=doc["primary_intent"],
            resolution_path=list(doc["resolution_path"]),
            agent_actions=list(doc["agent_actions"]),
            sentiment_trajectory=[(p[0], float(p[1])) for p in doc["sentiment_trajectory"]],
            outcome=doc["outcome"],
            redacted_text=doc["redacted_text"],
            redaction_count=doc["redaction_count"],
        )


@dataclass
class FaqCandidate:
    question_text: str
    answer_text: str
    provenance: str
    support_count: int
    first_seen_ms: int
    last_seen_ms: int

    def to_doc(self) -> dict:
        return {
            "question_text": self.question_text,
            "answer_text": self.answer_text,
            "provenance": self.provenance,
            "support_count": self.support_count,
            "first_seen_ms": self.first_seen_ms,
            "last_seen_ms": self.last_seen_ms,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "FaqCandidate":
        return cls(
            doc["question_text"], doc["answer_text"], doc["provenance"],
            doc["support_count"], doc["first_seen_ms"], doc["last_seen_ms"],
        )


@dataclass
class ValidationReport:
    candidate: FaqCandidate
    verdict: str
    failed_checks: list[str]
    checked_at_ms: int
    kb_domain_tag: str = ""

    def to_doc(self) -> dict:
        return {
            "candidate": self.candidate.to_doc(),
            "verdict": self.verdict,
            "failed_checks": list(self.failed_checks),
            "checked_at_ms": self.checked_at_ms,
            "kb_domain_tag": self.kb_domain_tag,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "ValidationReport":
        return cls(
            candidate=FaqCandidate.from_doc(doc["candidate"]),
            verdict=doc["verdict"],
            failed_checks=list(doc["failed_checks"]),
            checked_at_ms=doc["checked_at_ms"],
            kb_domain_tag=doc["kb_domain_tag"],
        )


@dataclass
class CallRecord:
    session_id: str
    duration_s: float
    cohort: str
    faq_hits: int
    rag_calls: int
    converted_enquiry: bool
    converted_booking: bool
    outcome: str
    config_version: str = ""

    def to_doc(self) -> dict:
        return {
            "session_id": self.session_id,
            "duration_s": self.duration_s,
            "cohort": self.cohort,
            "faq_hits": self.faq_hits,
            "rag_calls": self.rag_calls,
            "converted_enquiry": self.converted_enquiry,
            "converted_booking": self.converted_booking,
            "outcome": self.outcome,
            "config_version": self.config_version,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "CallRecord":
        return cls(
            session_id=doc["session_id"],
            duration_s=float(doc["duration_s"]),
            cohort=doc["cohort"],
            faq_hits=doc["faq_hits"],
            rag_calls=doc["rag_calls"],
            converted_enquiry=doc["converted_enquiry"],
            converted_booking=doc["converted_booking"],
            outcome=doc["outcome"],
            config_version=doc.get("config_version", ""),
        )


def clamp(value: float, low: float, high: float) -> float:
    out = min(high, max(low, value))
    return out + 0.0  # normalize -0.0


def logistic(x: float) -> float:
    # symmetric, overflow-safe
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)
