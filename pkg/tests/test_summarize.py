from __future__ import annotations

import re

import pytest

from agentassist.errors import StateError
from agentassist.models import (
    AnswerRecord,
    Entity,
    IntentHypothesis,
    PartialSummary,
    SentimentSample,
    WorkflowInstance,
)
from agentassist.session import create_session
from agentassist.summarize import final_summary, redact_pii, update_partial_summary
from agentassist.textnorm import EMAIL_RE, PHONE_RE
from agentassist.understanding import EntityPatterns
from support import GAZETTEER, default_config, make_event, plant_pii_corpus


@pytest.fixture()
def patterns():
    return EntityPatterns.build(r"\bAC-\d{6}\b", GAZETTEER)


def _answer(qid: str, text: str, turn: int, route: str = "faq") -> AnswerRecord:
    return AnswerRecord(qid, "s1", text, route, "answer", None, None, [], 300, 1, 0, turn)


class TestRedaction:
    def test_email_replaced(self, patterns):
        text, count = redact_pii("reach me at jane@example.com", patterns)
        assert text == "reach me at [EMAIL]"
        assert count == 1

    def test_idempotent(self, patterns):
        once, count1 = redact_pii("call +91 98765 43210 or mail a@b.co for AC-448812, ask for Jane", patterns)
        twice, count2 = redact_pii(once, patterns)
        assert twice == once
        assert count1 == 4
        assert count2 == 0

    def test_planted_corpus_fully_scrubbed(self, patterns):
        sentences, _ = plant_pii_corpus(200)
        blob = "\n".join(sentences)
        redacted, count = redact_pii(blob, patterns)
        assert count == 200
        assert not EMAIL_RE.search(redacted)
        assert not PHONE_RE.search(redacted)
        assert not patterns.account_re.search(redacted)
        assert not patterns.name_re.search(redacted)


class TestPartialSummary:
    def test_entity_bullet_with_placeholder(self, patterns):
        config = default_config()
        state = create_session("s1", 0)
        state.entities["email"] = [Entity("email", "jane@example.com", 3, (0, 16))]
        summary = update_partial_summary(PartialSummary(), state, make_event(3, "x"), config, patterns)
        assert summary.bullets == ["Customer email: [EMAIL]"]
        assert summary.as_of_turn == 3

    def test_no_salience_leaves_bullets_advancing_turn(self, patterns):
        config = default_config()
        state = create_session("s1", 0)
        prev = PartialSummary(2, ["Intent triggered: travel_plan"], 10, 0)
        summary = update_partial_summary(prev, state, make_event(3, "x"), config, patterns)
        assert summary.bullets == prev.bullets
        assert summary.as_of_turn == 3

    def test_priority_entity_over_intent_over_answer(self, patterns):
        config = default_config()
        state = create_session("s1", 0)
        state.entities["email"] = [Entity("email", "a@b.co", 4, (0, 6))]
        state.intents["travel_plan"] = IntentHypothesis("travel_plan", 0.9, [], True, 4)
        state.answers.append(_answer("q1", "Which travel offers are available?", 4))
        summary = update_partial_summary(PartialSummary(), state, make_event(4, "x"), config, patterns)
        assert summary.bullets == ["Customer email: [EMAIL]"]
        assert summary.answers_reflected == 1

    def test_intent_bullet_when_no_entity(self, patterns):
        config = default_config()
        state = create_session("s1", 0)
        state.intents["travel_plan"] = IntentHypothesis("travel_plan", 0.9, [], True, 4)
        summary = update_partial_summary(PartialSummary(), state, make_event(4, "x"), config, patterns)
        assert summary.bullets == ["Intent triggered: travel_plan"]

    def test_answer_bullet_redacts_slot_values(self, patterns):
        config = default_config()
        state = create_session("s1", 0)
        state.answers.append(_answer("q1", "How to dispute a charge on account AC-448812?", 5))
        summary = update_partial_summary(PartialSummary(), state, make_event(5, "x"), config, patterns)
        assert summary.bullets == ["Answer delivered (FAQ): How to dispute a charge on account [ACCOUNT]?"]

    def test_sentiment_shift_bullet(self, patterns):
        config = default_config()
        state = create_session("s1", 0)
        state.sentiment_trajectory = [
            SentimentSample(3, 0.0, 0.5, "passive"),
            SentimentSample(5, -0.8, 0.3, "detractor"),
        ]
        summary = update_partial_summary(
            PartialSummary(as_of_turn=3), state, make_event(5, "x"), config, patterns
        )
        assert summary.bullets == ["Customer sentiment shifted negative"]

    def test_shift_below_delta_ignored(self, patterns):
        config = default_config()
        state = create_session("s1", 0)
        state.sentiment_trajectory = [
            SentimentSample(3, 0.0, 0.5, "passive"),
            SentimentSample(5, 0.4, 0.6, "passive"),
        ]
        summary = update_partial_summary(
            PartialSummary(as_of_turn=3), state, make_event(5, "x"), config, patterns
        )
        assert summary.bullets == []

    def test_dedup_and_budget_eviction(self, patterns):
        config = default_config(bullet_budget=3)
        state = create_session("s1", 0)
        summary = PartialSummary(budget=3)
        for turn in range(6):
            state.intents[f"intent_{turn}"] = IntentHypothesis(f"intent_{turn}", 0.9, [], True, turn)
            summary = update_partial_summary(summary, state, make_event(turn, "x"), config, patterns)
        assert summary.bullets == [
            "Intent triggered: intent_3",
            "Intent triggered: intent_4",
            "Intent triggered: intent_5",
        ]
        # repeating an already-present bullet never duplicates it
        state2 = create_session("s2", 0)
        state2.entities["email"] = [
            Entity("email", "a@b.co", 1, (0, 6)),
            Entity("email", "c@d.co", 2, (0, 6)),
        ]
        s = update_partial_summary(PartialSummary(), state2, make_event(1, "x"), config, patterns)
        s = update_partial_summary(s, state2, make_event(2, "x"), config, patterns)
        assert s.bullets == ["Customer email: [EMAIL]"]


class TestFinalSummary:
    def _rich_state(self):
        state = create_session("s1", 0)
        state.entities["account_number"] = [Entity("account_number", "AC-448812", 3, (0, 9))]
        state.entities["name"] = [Entity("name", "Jane", 1, (0, 4))]
        state.intents["travel_plan"] = IntentHypothesis("travel_plan", 0.9, [], True, 3)
        state.intents["billing_correction"] = IntentHypothesis("billing_correction", 0.95, [], True, 5)
        instance = WorkflowInstance("activate_travel_plan", "s1", 3)
        instance.completed_steps = [("confirm_identity", 4), ("present_offers", 5)]
        instance.status = "completed"
        instance.outcome = "converted"
        state.workflows.append(instance)
        state.sentiment_trajectory = [SentimentSample(1, 0.0, 0.5, "passive"), SentimentSample(3, 0.6, 0.64, "passive")]
        state.partial_summary = PartialSummary(5, ["Customer name: [NAME]"], 10, 0)
        state.ended = True
        return state

    def test_requires_ended_state(self, patterns):
        state = create_session("s1", 0)
        with pytest.raises(StateError):
            final_summary(state, patterns)

    def test_primary_intent_argmax_confidence(self, patterns):
        summary = final_summary(self._rich_state(), patterns)
        assert summary.primary_intent == "billing_correction"  # higher confidence wins
        assert summary.outcome == "converted"
        assert summary.resolution_path == [
            "activate_travel_plan:confirm_identity",
            "activate_travel_plan:present_offers",
        ]
        assert summary.agent_actions == ["confirm_identity", "present_offers"]
        assert summary.sentiment_trajectory == [(1, 0.0), (3, 0.6)]

    def test_tie_breaks_to_earliest_trigger(self, patterns):
        state = self._rich_state()
        state.intents["billing_correction"].confidence = 0.9  # tie with travel_plan
        summary = final_summary(state, patterns)
        assert summary.primary_intent == "travel_plan"  # triggered at turn 3 < 5

    def test_no_triggered_intent_is_unknown(self, patterns):
        state = create_session("s1", 0)
        state.ended = True
        # one non-final event still counts for the trajectory length contract
        summary = final_summary(state, patterns)
        assert summary.primary_intent == "unknown"
        assert summary.resolution_path == []
        assert summary.outcome == "unresolved"

    def test_rendered_text_is_redacted(self, patterns):
        summary = final_summary(self._rich_state(), patterns)
        assert "AC-448812" not in summary.redacted_text
        assert "[ACCOUNT]" in summary.redacted_text
        assert "Jane" not in summary.redacted_text
        assert "[NAME]" in summary.redacted_text
        assert summary.redaction_count >= 2
        assert not re.search(r"AC-\d{6}", summary.redacted_text)
