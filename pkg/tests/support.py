"""Shared test helpers: event builders, in-memory store bundles, PII corpus."""

from __future__ import annotations

import random

from agentassist.bm25 import KbDocument, KbIndex
from agentassist.config import EngineConfig
from agentassist.ingest import TranscriptEvent, TransliterationTable
from agentassist.models import FaqEntry
from agentassist.stores import Stores
from agentassist.textnorm import normalize_tokens
from agentassist.understanding import EntityPatterns, IntentRegistry, ProfileCueSets, SentimentLexicon
from agentassist.workflow import WorkflowCatalog

GAZETTEER = ["jane", "rahul", "priya", "amit", "sarah", "john", "maria", "vikram"]


def make_event(
    turn: int,
    text: str,
    speaker: str = "customer",
    session_id: str = "s1",
    lang: str = "en",
    t_start: int | None = None,
    t_end: int | None = None,
    is_final: bool = True,
) -> TranscriptEvent:
    t_start = turn * 1000 if t_start is None else t_start
    t_end = t_start + 900 if t_end is None else t_end
    return TranscriptEvent(
        session_id=session_id,
        turn_index=turn,
        speaker=speaker,
        raw_text=text,
        lang=lang,
        t_start_ms=t_start,
        t_end_ms=t_end,
        is_final=is_final,
        display_text=text if lang == "en" else "",
    )


def event_record(turn: int, text: str, speaker: str = "customer", session_id: str = "s1",
                 lang: str = "en", t_start: int | None = None, t_end: int | None = None,
                 is_final: bool = True) -> dict:
    t_start = turn * 1000 if t_start is None else t_start
    t_end = t_start + 900 if t_end is None else t_end
    return {
        "session_id": session_id,
        "turn_index": turn,
        "speaker": speaker,
        "raw_text": text,
        "lang": lang,
        "t_start_ms": t_start,
        "t_end_ms": t_end,
        "is_final": is_final,
    }


def faq_entry(entry_id: str, question: str, answer: str, tag: str, status: str = "validated",
              version: int = 1, expires_at_ms: int | None = None) -> FaqEntry:
    return FaqEntry(
        entry_id=entry_id,
        normalized_question=normalize_tokens(question),
        answer=answer,
        kb_domain_tag=tag,
        status=status,
        provenance="mined-transcript",
        version=version,
        hit_count=0,
        expires_at_ms=expires_at_ms,
    )


def tiny_stores(
    intents: dict | None = None,
    lexicon_terms: dict | None = None,
    interest: list[str] | None = None,
    hesitation: list[str] | None = None,
    goal_patterns: list[str] | None = None,
    gazetteer: list[str] | None = None,
    account_pattern: str = r"\bAC-\d{6}\b",
    faq: list[FaqEntry] | None = None,
    kb_docs: list[tuple[str, str, list[str]]] | None = None,
    transliteration: dict | None = None,
    default_threshold: float = 0.7,
) -> Stores:
    """An in-memory Stores bundle for tests that need no fixture files."""
    intents = intents if intents is not None else {
        "travel_plan": {
            "cues": [["\\btravel plan\\b", 0.85], ["\\btravel(?:ling)?\\b", 0.35]],
            "threshold": 0.7,
            "workflow_id": "activate_travel_plan",
            "kb_domain_tag": "travel",
            "query_templates": ["Which travel offers are available?", "How to activate a travel plan?"],
        }
    }
    registry = IntentRegistry.from_doc({"intents": intents}, default_threshold)
    workflow_ids = sorted({spec.workflow_id for spec in registry.intents.values()})
    catalog = WorkflowCatalog.from_doc(
        {
            "workflows": [
                {
                    "workflow_id": wid,
                    "title": wid.replace("_", " "),
                    "steps": [
                        {"step_id": "confirm_identity", "instruction": "Confirm identity.", "requires": ["account_number"]},
                        {"step_id": "resolve", "instruction": "Resolve the request."},
                    ],
                    "terminal_outcomes": ["resolved", "converted", "escalated"],
                }
                for wid in workflow_ids
            ]
        }
    )
    catalog.validate_registry(registry)
    lexicon = SentimentLexicon(lexicon_terms or {"great": 0.6, "terrible": -0.8, "thanks": 0.4}, "test")
    cue_sets = ProfileCueSets(
        interest if interest is not None else ["sounds great", "tell me more"],
        hesitation if hesitation is not None else ["not sure", "let me think"],
        goal_patterns if goal_patterns is not None else [r"\bi (?:want|need) to [a-z ]+"],
    )
    patterns = EntityPatterns.build(account_pattern, gazetteer if gazetteer is not None else GAZETTEER)
    table = TransliterationTable(transliteration or {"mujhe": "I want", "chahiye": ""}, "test")
    documents = [
        KbDocument(doc_id=doc_id, body=body, tags=list(tags), tokens=normalize_tokens(body))
        for doc_id, body, tags in (kb_docs or [])
    ]
    return Stores(
        registry=registry,
        catalog=catalog,
        lexicon=lexicon,
        cue_sets=cue_sets,
        patterns=patterns,
        transliteration=table,
        faq_cache=list(faq or []),
        kb_index=KbIndex(documents),
    )


def default_config(**overrides) -> EngineConfig:
    config = EngineConfig()
    for key, value in overrides.items():
        setattr(config, key, value)
    config.validate()
    return config


# ── planted-PII corpus ───────────────────────────────────────────────────────

_FILLERS = [
    "please note the reference for this request",
    "the caller repeated the detail twice for the record",
    "our desk logged the following detail during the call",
    "the agent read the detail back to confirm it",
    "this was captured from the live transcript verbatim",
]


def plant_pii_corpus(n: int, seed: int = 7) -> tuple[list[str], list[tuple[str, str]]]:
    """n sentences, each with exactly one planted identifier.

    Returns (sentences, ground truth as (kind, value) per sentence). Filler
    text contains no gazetteer names, digit runs, or address-like tokens.
    """
    rng = random.Random(seed)
    sentences: list[str] = []
    truth: list[tuple[str, str]] = []
    kinds = ("email", "phone", "account_number", "name")
    for i in range(n):
        kind = kinds[i % len(kinds)]
        if kind == "email":
            value = f"user{i:04d}@example.com"
        elif kind == "phone":
            value = f"+91 {70000 + i} {20000 + i}"
        elif kind == "account_number":
            value = f"AC-{100000 + i}"
        else:
            value = rng.choice(GAZETTEER).title()
        filler = rng.choice(_FILLERS)
        sentences.append(f"{filler}: {value}.")
        truth.append((kind, value))
    return sentences, truth
