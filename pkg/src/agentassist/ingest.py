"""Transcript event parsing and mixed-language display normalization.

Conversation scripts arrive as newline-delimited records with exactly the
fields {session_id, turn_index, speaker, raw_text, lang, t_start_ms,
t_end_ms, is_final}. English turns pass through verbatim; Hindi and
code-switched turns are rewritten into English display text by longest-match
substitution over a versioned transliteration table, so every downstream
prompt is readable by every agent. Normalization is pure table lookup and
contributes zero simulated latency.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace

from . import canonical
from .errors import ConfigError, ParseError

SPEAKERS = ("customer", "agent")
LANGS = ("en", "hi", "mixed")

EVENT_FIELDS = (
    "session_id",
    "turn_index",
    "speaker",
    "raw_text",
    "lang",
    "t_start_ms",
    "t_end_ms",
    "is_final",
)

_EDGE_PUNCT_RE = re.compile(r"^[^\w]+|[^\w]+$")


@dataclass
class TranscriptEvent:
    session_id: str
    turn_index: int
    speaker: str
    raw_text: str
    lang: str
    t_start_ms: int
    t_end_ms: int
    is_final: bool
    display_text: str = ""

    def to_doc(self) -> dict:
        return {
            "session_id": self.session_id,
            "turn_index": self.turn_index,
            "speaker": self.speaker,
            "raw_text": self.raw_text,
            "lang": self.lang,
            "t_start_ms": self.t_start_ms,
            "t_end_ms": self.t_end_ms,
            "is_final": self.is_final,
            "display_text": self.display_text,
        }


def parse_event_record(record: dict) -> TranscriptEvent:
    """Validate one already-decoded event record; errors name the field."""
    if not isinstance(record, dict):
        raise ParseError("record", "event record must be an object")
    for fieldname in EVENT_FIELDS:
        if fieldname not in record:
            raise ParseError(fieldname, "missing field")
    extra = set(record) - set(EVENT_FIELDS)
    if extra:
        raise ParseError(sorted(extra)[0], "unknown field")

    session_id = record["session_id"]
    if not isinstance(session_id, str) or not session_id:
        raise ParseError("session_id", "must be a non-empty string")
    turn_index = record["turn_index"]
    if not isinstance(turn_index, int) or isinstance(turn_index, bool) or turn_index < 0:
        raise ParseError("turn_index", "must be a non-negative integer")
    speaker = record["speaker"]
    if speaker not in SPEAKERS:
        raise ParseError("speaker", f"unknown speaker {speaker!r}")
    raw_text = record["raw_text"]
    if not isinstance(raw_text, str):
        raise ParseError("raw_text", "must be a string")
    lang = record["lang"]
    if lang not in LANGS:
        raise ParseError("lang", f"unknown lang {lang!r}")
    for ts_field in ("t_start_ms", "t_end_ms"):
        value = record[ts_field]
        if not isinstance(value, int) or isinstance(value, bool) or value < 0:
            raise ParseError(ts_field, "must be a non-negative integer")
    if record["t_end_ms"] < record["t_start_ms"]:
        raise ParseError("t_end_ms", "t_end_ms must be >= t_start_ms")
    is_final = record["is_final"]
    if not isinstance(is_final, bool):
        raise ParseError("is_final", "must be a boolean")

    # display_text stays empty until normalization runs
    return TranscriptEvent(
        session_id=session_id,
        turn_index=turn_index,
        speaker=speaker,
        raw_text=raw_text,
        lang=lang,
        t_start_ms=record["t_start_ms"],
        t_end_ms=record["t_end_ms"],
        is_final=is_final,
    )


def parse_event(line: str) -> TranscriptEvent:
    """Parse one serialized conversation-script record."""
    try:
        record = canonical.loads(line)
    except ValueError as exc:
        raise ParseError("record", f"invalid record: {exc}") from exc
    return parse_event_record(record)


class TransliterationTable:
    """Source-phrase to English-phrase substitutions, longest match first.

    Keys are lowercase and whitespace-normalized; multi-word keys win over
    their single-word prefixes. A value of "" drops the token.
    """

    def __init__(self, entries: dict[str, str], version: str):
        self.version = version
        self.entries: dict[tuple[str, ...], str] = {}
        for key, value in entries.items():
            norm = " ".join(key.split())
            if norm != key or key != key.lower():
                raise ConfigError(f"transliteration key not normalized: {key!r}")
            if not norm:
                raise ConfigError("empty transliteration key")
            self.entries[tuple(norm.split(" "))] = value
        self._max_len = max((len(k) for k in self.entries), default=1)

    @classmethod
    def from_doc(cls, doc: dict) -> "TransliterationTable":
        if "version" not in doc:
            raise ConfigError("transliteration table missing 'version'")
        return cls(doc.get("entries", {}), doc["version"])

    def apply(self, text: str) -> tuple[str, int]:
        """Substitute table phrases; returns (english text, unmatched tokens)."""
        raw_tokens = text.split()
        match_tokens = [_EDGE_PUNCT_RE.sub("", t).lower() for t in raw_tokens]
        out: list[str] = []
        unmatched = 0
        i = 0
        while i < len(raw_tokens):
            matched = False
            for length in range(min(self._max_len, len(raw_tokens) - i), 0, -1):
                key = tuple(match_tokens[i : i + length])
                if all(key) and key in self.entries:
                    replacement = self.entries[key]
                    if replacement:
                        out.append(replacement)
                    i += length
                    matched = True
                    break
            if not matched:
                out.append(raw_tokens[i])
                unmatched += 1
                i += 1
        return " ".join(out), unmatched


def normalize_display_text(
    event: TranscriptEvent, table: TransliterationTable
) -> tuple[TranscriptEvent, int]:
    """Fill display_text with English; returns the event and the count of
    tokens that had no table match (diagnostic only, never an error).

    display_text is non-empty whenever raw_text is: if every token maps to
    an empty replacement, the raw text passes through untranslated rather
    than leaving the agent a blank caption."""
    if not event.raw_text:
        return replace(event, display_text=""), 0
    if event.lang == "en":
        return replace(event, display_text=event.raw_text), 0
    display, unmatched = table.apply(event.raw_text)
    if not display:
        return replace(event, display_text=event.raw_text), unmatched
    return replace(event, display_text=display), unmatched
