from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from agentassist.models import IntentHypothesis, logistic
from agentassist.session import create_session
from agentassist.understanding import (
    EntityPatterns,
    extract_entities,
    update_intents,
    update_profile,
    update_sentiment,
)
from support import GAZETTEER, make_event, plant_pii_corpus, tiny_stores


@pytest.fixture()
def patterns():
    return EntityPatterns.build(r"\bAC-\d{6}\b", GAZETTEER)


class TestEntities:
    def test_email(self, patterns):
        event = make_event(2, "my email is jane.doe@example.com thanks")
        found = extract_entities(event, patterns)
        emails = [e for e in found if e.kind == "email"]
        assert [e.value for e in emails] == ["jane.doe@example.com"]
        start, end = emails[0].span
        assert event.display_text[start:end] == "jane.doe@example.com"

    def test_account_number(self, patterns):
        event = make_event(0, "account number is AC-448812")
        found = extract_entities(event, patterns)
        assert [(e.kind, e.value) for e in found] == [("account_number", "AC-448812")]

    def test_phone(self, patterns):
        event = make_event(0, "call me on +91 98765 43210 later")
        found = extract_entities(event, patterns)
        assert [(e.kind, e.value) for e in found] == [("phone", "+91 98765 43210")]

    def test_name_from_gazetteer(self, patterns):
        event = make_event(0, "hi, this is Jane speaking")
        found = extract_entities(event, patterns)
        assert [(e.kind, e.value) for e in found] == [("name", "Jane")]

    def test_name_inside_email_not_double_counted(self, patterns):
        event = make_event(0, "write to jane@example.com")
        found = extract_entities(event, patterns)
        assert [e.kind for e in found] == ["email"]

    def test_planted_corpus_exactly_recovered(self, patterns):
        sentences, truth = plant_pii_corpus(200)
        found = []
        for i, sentence in enumerate(sentences):
            found.extend(extract_entities(make_event(i, sentence), patterns))
        assert len(found) == 200
        assert [(e.kind, e.value.lower()) for e in found] == [
            (kind, value.lower()) for kind, value in truth
        ]

    def test_dedup_keeps_first_occurrence(self, patterns):
        state = create_session("s1", 0)
        first = extract_entities(make_event(1, "account AC-448812"), patterns)
        second = extract_entities(make_event(2, "yes, AC-448812 is right"), patterns)
        assert state.add_entities(first) == first
        assert state.add_entities(second) == []
        assert state.entities["account_number"][0].turn_index == 1


class TestNoisyOr:
    def test_two_half_weights(self):
        stores = tiny_stores(
            intents={
                "x": {
                    "cues": [["\\balpha\\b", 0.5], ["\\bbeta\\b", 0.5]],
                    "threshold": 0.9,
                    "workflow_id": "wf",
                    "kb_domain_tag": "t",
                }
            }
        )
        state = create_session("s1", 0)
        update_intents(state, make_event(0, "alpha and beta"), stores.registry)
        assert state.intents["x"].confidence == pytest.approx(0.75)

    def test_absorbing_weight_one(self):
        hypothesis = IntentHypothesis("x", cue_hits=[("a", 0, 1.0), ("b", 1, 0.3)])
        assert hypothesis.recompute_confidence() == 1.0

    def test_threshold_crossing_returned_once(self):
        stores = tiny_stores(
            intents={
                "x": {
                    "cues": [["\\balpha\\b", 0.6]],
                    "threshold": 0.8,
                    "workflow_id": "wf",
                    "kb_domain_tag": "t",
                }
            }
        )
        state = create_session("s1", 0)
        assert update_intents(state, make_event(0, "alpha"), stores.registry) == []
        assert update_intents(state, make_event(1, "alpha again"), stores.registry) == ["x"]
        assert update_intents(state, make_event(2, "alpha more"), stores.registry) == []
        assert state.intents["x"].triggered_at_turn == 1
        assert state.intents["x"].triggered is True

    @given(st.permutations(list(range(6))))
    def test_order_invariance(self, order):
        weights = [0.2, 0.35, 0.5, 0.6, 0.45, 0.15]
        hits = [(f"c{i}", i, weights[i]) for i in order]
        hypothesis = IntentHypothesis("x", cue_hits=hits)
        reference = IntentHypothesis("x", cue_hits=[(f"c{i}", i, weights[i]) for i in range(6)])
        assert hypothesis.recompute_confidence() == reference.recompute_confidence()

    @given(st.lists(st.floats(0.01, 1.0), min_size=0, max_size=10))
    def test_bounds_and_monotonicity(self, weights):
        hits: list = []
        last = 0.0
        for i, weight in enumerate(weights):
            hits.append((f"c{i}", i, weight))
            hypothesis = IntentHypothesis("x", cue_hits=list(hits))
            conf = hypothesis.recompute_confidence()
            assert 0.0 <= conf <= 1.0
            assert conf >= last - 1e-12
            last = conf


class TestSentiment:
    def _stores(self):
        return tiny_stores(lexicon_terms={"great": 0.6, "terrible": -0.8, "awful": -0.8})

    def test_no_match_is_zero(self):
        stores = self._stores()
        state = create_session("s1", 0)
        sample = update_sentiment(state, make_event(0, "plain words only"), stores.lexicon, 2.0, 0.4, 0.7)
        assert sample.polarity == 0.0

    def test_zero_mean_gives_half(self):
        stores = self._stores()
        state = create_session("s1", 0)
        sample = update_sentiment(state, make_event(0, "nothing matched"), stores.lexicon, 2.0, 0.4, 0.7)
        assert sample.csat_likelihood == pytest.approx(0.5)
        assert sample.nps_band == "passive"

    def test_polarity_clamped(self):
        stores = tiny_stores(lexicon_terms={"terrible": -0.8, "awful": -0.8})
        state = create_session("s1", 0)
        sample = update_sentiment(
            state, make_event(0, "terrible awful terrible"), stores.lexicon, 2.0, 0.4, 0.7
        )
        assert sample.polarity == -1.0

    def test_band_cutpoints(self):
        assert logistic(2.0 * 1.0) > 0.7  # all-positive trajectory is a promoter
        stores = tiny_stores(lexicon_terms={"great": 1.0, "terrible": -1.0})
        state = create_session("s1", 0)
        promoter = update_sentiment(state, make_event(0, "great"), stores.lexicon, 2.0, 0.4, 0.7)
        assert promoter.nps_band == "promoter"
        state2 = create_session("s2", 0)
        detractor = update_sentiment(state2, make_event(0, "terrible"), stores.lexicon, 2.0, 0.4, 0.7)
        assert detractor.nps_band == "detractor"

    @settings(max_examples=60)
    @given(st.lists(st.integers(-1_000_000, 999_999).map(lambda n: n / 1e6), min_size=1, max_size=12))
    def test_appending_positive_turn_raises_csat(self, polarities):
        # mean < 1 before the +1 turn, so csat must strictly increase
        k = 2.0
        mean_before = sum(polarities) / len(polarities)
        csat_before = logistic(k * mean_before)
        mean_after = (sum(polarities) + 1.0) / (len(polarities) + 1)
        csat_after = logistic(k * mean_after)
        assert mean_before < 1.0
        assert csat_after > csat_before

    def test_csat_strictly_increasing_in_mean(self):
        values = [logistic(2.0 * m / 10) for m in range(-10, 11)]
        assert all(b > a for a, b in zip(values, values[1:]))


class TestProfile:
    def test_interest_hit(self):
        stores = tiny_stores(interest=["sounds great"], hesitation=["not sure"])
        state = create_session("s1", 0)
        update_profile(state, make_event(0, "that sounds great!"), stores.cue_sets)
        assert state.profile.interest_hits == 1
        assert state.profile.hesitation_hits == 0

    def test_hesitation_hit(self):
        stores = tiny_stores(interest=["sounds great"], hesitation=["not sure"])
        state = create_session("s1", 0)
        update_profile(state, make_event(0, "hmm, I'm not sure about that"), stores.cue_sets)
        assert state.profile.hesitation_hits == 1

    def test_goal_phrase_captured_verbatim(self):
        stores = tiny_stores(goal_patterns=[r"\bi want to [a-z ]+"])
        state = create_session("s1", 0)
        update_profile(state, make_event(0, "I want to get a travel plan"), stores.cue_sets)
        assert state.profile.goal_phrases == ["I want to get a travel plan"]

    def test_counts_match_hand_count_over_script(self):
        stores = tiny_stores(interest=["sounds great", "tell me more"], hesitation=["not sure"])
        lines = [
            "that sounds great",
            "tell me more about it",
            "not sure yet, tell me more",
            "plain line",
            "sounds great sounds great",
        ]
        state = create_session("s1", 0)
        for i, line in enumerate(lines):
            update_profile(state, make_event(i, line), stores.cue_sets)
        joined = " ".join(lines)
        assert state.profile.interest_hits == joined.count("sounds great") + joined.count("tell me more")
        assert state.profile.hesitation_hits == joined.count("not sure")

    def test_counters_monotone(self):
        stores = tiny_stores(interest=["sounds great"], hesitation=["not sure"])
        state = create_session("s1", 0)
        rng = random.Random(3)
        last = (0, 0)
        phrases = ["sounds great", "not sure", "nothing here", "sounds great not sure"]
        for i in range(30):
            update_profile(state, make_event(i, rng.choice(phrases)), stores.cue_sets)
            now = (state.profile.interest_hits, state.profile.hesitation_hits)
            assert now >= last
            last = now
