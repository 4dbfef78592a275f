"""Incremental partial summaries, PII redaction, and the final call summary.

The partial summary is a bounded bullet list that evolves turn by turn: each
final turn contributes at most one bullet, chosen by priority (new entity,
then newly triggered intent, then delivered answer, then a sentiment shift
at or above the configured delta). Bullets are deduplicated and the oldest
is evicted past the budget, so applying the update incrementally equals
recomputing from scratch over the whole history.

Redaction replaces every identifier match with its kind placeholder and is
idempotent: placeholders contain nothing the patterns can re-match.
"""

from __future__ import annotations

import re

from .config import EngineConfig
from .errors import StateError
from .ingest import TranscriptEvent
from .models import FinalSummary, PartialSummary
from .session import SessionState
from .textnorm import EMAIL_RE, PHONE_RE
from .understanding import EntityPatterns

PLACEHOLDERS = {
    "email": "[EMAIL]",
    "phone": "[PHONE]",
    "account_number": "[ACCOUNT]",
    "name": "[NAME]",
}

_KIND_LABELS = {
    "email": "email",
    "phone": "phone",
    "account_number": "account number",
    "name": "name",
}


def redact_pii(text: str, patterns: EntityPatterns) -> tuple[str, int]:
    """Replace every identifier match with its placeholder; count replacements."""
    count = 0

    def _sub(pattern: re.Pattern | None, placeholder: str, value: str) -> str:
        nonlocal count
        if pattern is None:
            return value
        value, n = pattern.subn(placeholder, value)
        count += n
        return value

    text = _sub(EMAIL_RE, PLACEHOLDERS["email"], text)
    text = _sub(PHONE_RE, PLACEHOLDERS["phone"], text)
    text = _sub(patterns.account_re, PLACEHOLDERS["account_number"], text)
    text = _sub(patterns.name_re, PLACEHOLDERS["name"], text)
    return text, count


def update_partial_summary(
    prev: PartialSummary,
    state: SessionState,
    event: TranscriptEvent,
    config: EngineConfig,
    patterns: EntityPatterns,
) -> PartialSummary:
    """Fold one final turn into the summary. Reads only the turn-scoped
    slices of state (never prev's own bullets beyond dedup/eviction), so a
    from-scratch refold over the history gives the identical result."""
    turn = event.turn_index
    bullet: str | None = None

    new_entities = [
        e for values in state.entities.values() for e in values if e.turn_index == turn
    ]
    if new_entities:
        first = min(new_entities, key=lambda e: (e.span[0], e.kind))
        bullet = f"Customer {_KIND_LABELS[first.kind]}: {PLACEHOLDERS[first.kind]}"

    if bullet is None:
        triggered = sorted(
            label
            for label, hypothesis in state.intents.items()
            if hypothesis.triggered_at_turn == turn
        )
        if triggered:
            bullet = f"Intent triggered: {triggered[0]}"

    new_answers = state.answers[prev.answers_reflected :]
    if bullet is None and new_answers:
        answer = new_answers[0]
        bullet = f"Answer delivered ({answer.route.upper()}): {answer.query_text}"

    if bullet is None and event.speaker == "customer":
        trajectory = state.sentiment_trajectory
        if len(trajectory) >= 2 and trajectory[-1].turn_index == turn:
            delta = trajectory[-1].polarity - trajectory[-2].polarity
            if abs(delta) >= config.sentiment_shift_delta:
                direction = "positive" if delta > 0 else "negative"
                bullet = f"Customer sentiment shifted {direction}"

    bullets = list(prev.bullets)
    if bullet is not None:
        bullet, _ = redact_pii(bullet, patterns)
        if bullet not in bullets:
            bullets.append(bullet)
            while len(bullets) > config.bullet_budget:
                bullets.pop(0)

    return PartialSummary(
        as_of_turn=turn,
        bullets=bullets,
        budget=config.bullet_budget,
        answers_reflected=len(state.answers),
    )


def primary_intent(state: SessionState) -> str:
    """Argmax-confidence triggered intent; earliest trigger breaks ties."""
    best: str | None = None
    key: tuple[float, int, str] | None = None
    for label in sorted(state.intents):
        hypothesis = state.intents[label]
        if not hypothesis.triggered:
            continue
        candidate = (-hypothesis.confidence, hypothesis.triggered_at_turn or 0, label)
        if key is None or candidate < key:
            key = candidate
            best = label
    return best or "unknown"


def final_summary(state: SessionState, patterns: EntityPatterns) -> FinalSummary:
    """Terminal summary: primary intent, resolution path, agent actions,
    sentiment trajectory, outcome, and the redacted text block."""
    if not state.ended:
        raise StateError("final summary requires an ended session")

    intent = primary_intent(state)
    steps: list[tuple[int, int, str, str]] = []
    for order, instance in enumerate(state.workflows):
        for step_id, turn_index in instance.completed_steps:
            steps.append((turn_index, order, instance.workflow_id, step_id))
    steps.sort()
    resolution_path = [f"{workflow_id}:{step_id}" for _, _, workflow_id, step_id in steps]
    agent_actions = [step_id for _, _, _, step_id in steps]

    outcome = "unresolved"
    for instance in state.workflows:
        if instance.status == "completed" and instance.outcome:
            outcome = instance.outcome
            break

    trajectory = [(s.turn_index, s.polarity) for s in state.sentiment_trajectory]
    text = _render_text(state, intent, resolution_path, outcome)
    redacted_text, redaction_count = redact_pii(text, patterns)
    return FinalSummary(
        session_id=state.session_id,
        primary_intent=intent,
        resolution_path=resolution_path,
        agent_actions=agent_actions,
        sentiment_trajectory=trajectory,
        outcome=outcome,
        redacted_text=redacted_text,
        redaction_count=redaction_count,
    )


def _render_text(
    state: SessionState, intent: str, resolution_path: list[str], outcome: str
) -> str:
    lines = [
        f"Call summary for session {state.session_id}",
        f"Primary intent: {intent}",
        f"Outcome: {outcome}",
    ]
    if resolution_path:
        lines.append("Resolution path: " + " -> ".join(resolution_path))
    else:
        lines.append("Resolution path: (none)")
    details = [
        f"{_KIND_LABELS[e.kind]} {e.value}" for e in state.all_entities()
    ]
    if details:
        # raw identifier values on purpose: redaction must scrub them
        lines.append("Captured details: " + "; ".join(details))
    if state.sentiment_trajectory:
        last = state.sentiment_trajectory[-1]
        lines.append(
            f"Final sentiment: polarity {last.polarity:+.2f}, "
            f"CSAT likelihood {last.csat_likelihood:.2f}, NPS band {last.nps_band}"
        )
    if state.partial_summary.bullets:
        lines.append("Notes:")
        lines.extend(f"- {b}" for b in state.partial_summary.bullets)
    return "\n".join(lines)
