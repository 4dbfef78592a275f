"""Shared text normalization.

One tokenizer feeds entity extraction, FAQ matching, sentiment/cue lookup,
and candidate mining, so "normalized text" means the same thing everywhere:
lowercase word tokens, punctuation stripped, except spans matching a
protected pattern which survive as single tokens. Emails are protected by
default; account-id patterns are deployment config and stored normalized
questions must not depend on config, so account ids tokenize as plain words
on both sides of every comparison.
"""

from __future__ import annotations

import re
from typing import Iterable

EMAIL_RE = re.compile(r"[A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,}")

# Digits with optional single space/dash separators, 10-13 digits total.
PHONE_RE = re.compile(r"(?<![\w.+-])\+?\d(?:[ -]?\d){9,12}(?![\w-])")

_WORD_RE = re.compile(r"[A-Za-z0-9]+(?:'[A-Za-z0-9]+)*")

DEFAULT_PROTECTED: tuple[re.Pattern, ...] = (EMAIL_RE,)


def normalize_tokens(text: str, protected: Iterable[re.Pattern] | None = None) -> list[str]:
    """Lowercased word tokens in text order; protected spans stay whole."""
    spans: list[tuple[int, int]] = []
    for pattern in DEFAULT_PROTECTED if protected is None else protected:
        for m in pattern.finditer(text):
            spans.append((m.start(), m.end()))
    spans.sort()
    kept: list[tuple[int, int]] = []
    last_end = 0
    for start, end in spans:
        if start >= last_end:
            kept.append((start, end))
            last_end = end

    tokens: list[str] = []
    pos = 0
    for start, end in kept:
        tokens.extend(m.group(0).lower() for m in _WORD_RE.finditer(text, pos, start))
        tokens.append(text[start:end].lower())
        pos = end
    tokens.extend(m.group(0).lower() for m in _WORD_RE.finditer(text, pos))
    return tokens


def normalized_text(text: str, protected: Iterable[re.Pattern] | None = None) -> str:
    """Stable one-line form used for dedup keys and mining clusters."""
    return " ".join(normalize_tokens(text, protected))


def jaccard(a: Iterable[str], b: Iterable[str]) -> float:
    """Token-set Jaccard similarity; empty-vs-empty is defined as 0."""
    sa, sb = set(a), set(b)
    union = sa | sb
    if not union:
        return 0.0
    return len(sa & sb) / len(union)


def count_phrase(tokens: list[str], phrase_tokens: list[str]) -> int:
    """Non-overlapping occurrences of a token phrase inside a token list."""
    if not phrase_tokens or len(phrase_tokens) > len(tokens):
        return 0
    count = 0
    i = 0
    n, m = len(tokens), len(phrase_tokens)
    while i <= n - m:
        if tokens[i : i + m] == phrase_tokens:
            count += 1
            i += m
        else:
            i += 1
    return count
