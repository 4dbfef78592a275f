from __future__ import annotations

import json

import pytest

from agentassist.errors import ParseError
from agentassist.ingest import (
    TransliterationTable,
    normalize_display_text,
    parse_event,
    parse_event_record,
)
from support import event_record, make_event


def _line(record: dict) -> str:
    return json.dumps(record)


class TestParseEvent:
    def test_valid_record_maps_fields(self):
        event = parse_event(_line(event_record(0, "hello there", speaker="customer")))
        assert event.speaker == "customer"
        assert event.raw_text == "hello there"
        assert event.display_text == ""  # filled later by normalization

    def test_t_end_before_t_start_names_field(self):
        record = event_record(0, "x")
        record["t_end_ms"] = record["t_start_ms"] - 1
        with pytest.raises(ParseError) as err:
            parse_event(_line(record))
        assert err.value.field == "t_end_ms"

    def test_missing_field_named(self):
        record = event_record(0, "x")
        del record["speaker"]
        with pytest.raises(ParseError) as err:
            parse_event(_line(record))
        assert err.value.field == "speaker"

    def test_unknown_speaker(self):
        record = event_record(0, "x")
        record["speaker"] = "supervisor"
        with pytest.raises(ParseError) as err:
            parse_event(_line(record))
        assert err.value.field == "speaker"

    def test_negative_timestamp(self):
        record = event_record(0, "x")
        record["t_start_ms"] = -5
        with pytest.raises(ParseError) as err:
            parse_event(_line(record))
        assert err.value.field == "t_start_ms"

    def test_unknown_extra_field(self):
        record = event_record(0, "x")
        record["volume"] = 3
        with pytest.raises(ParseError) as err:
            parse_event(_line(record))
        assert err.value.field == "volume"

    def test_thousand_record_fixture_parses_clean(self):
        records = [
            event_record(i, f"turn number {i}", speaker="customer" if i % 2 else "agent")
            for i in range(1000)
        ]
        events = [parse_event_record(r) for r in records]
        assert len(events) == 1000
        assert [e.turn_index for e in events] == list(range(1000))


class TestNormalization:
    def test_english_passthrough_verbatim(self):
        table = TransliterationTable({"mujhe": "I want"}, "1")
        event = make_event(0, "I want to get a travel plan")
        out, unmatched = normalize_display_text(event, table)
        assert out.display_text == "I want to get a travel plan"
        assert unmatched == 0

    def test_mixed_substitution_example(self):
        table = TransliterationTable({"mujhe": "I want", "chahiye": ""}, "1")
        event = make_event(0, "mujhe travel plan chahiye", lang="mixed")
        out, unmatched = normalize_display_text(event, table)
        assert out.display_text == "I want travel plan"
        assert unmatched == 2  # travel, plan pass through

    def test_empty_raw_text(self):
        table = TransliterationTable({}, "1")
        event = make_event(0, "", lang="mixed")
        out, unmatched = normalize_display_text(event, table)
        assert out.display_text == ""
        assert unmatched == 0

    def test_longest_match_first(self):
        table = TransliterationTable({"karna": "do", "karna he": "need to do"}, "1")
        event = make_event(0, "recharge karna he", lang="mixed")
        out, _ = normalize_display_text(event, table)
        assert out.display_text == "recharge need to do"

    def test_punctuation_stripped_for_matching(self):
        table = TransliterationTable({"chahiye": ""}, "1")
        event = make_event(0, "travel plan chahiye.", lang="mixed")
        out, _ = normalize_display_text(event, table)
        assert out.display_text == "travel plan"

    def test_all_tokens_dropped_falls_back_to_raw(self):
        # display_text must stay non-empty whenever raw_text is non-empty
        table = TransliterationTable({"chahiye": ""}, "1")
        event = make_event(0, "chahiye", lang="mixed")
        out, _ = normalize_display_text(event, table)
        assert out.display_text == "chahiye"

    def test_idempotent_on_own_output(self, fixture_stores):
        table = fixture_stores.transliteration
        event = make_event(0, "namaste, mujhe travel plan chahiye", lang="mixed")
        once, _ = normalize_display_text(event, table)
        again, _ = normalize_display_text(
            make_event(1, once.display_text, lang="mixed"), table
        )
        assert again.display_text == once.display_text

    def test_shared_tokenizer_protects_emails(self):
        from agentassist.textnorm import normalize_tokens

        assert normalize_tokens("Mail Jane.Doe@Example.com now!") == [
            "mail", "jane.doe@example.com", "now",
        ]

    def test_unnormalized_table_key_rejected(self):
        from agentassist.errors import ConfigError

        with pytest.raises(ConfigError):
            TransliterationTable({"Mujhe": "I want"}, "1")
