"""Loaded store bundle: every configuration document the pipeline reads.

Stores are read-mostly and shared across sessions; the FAQ cache is the one
structure mutated at runtime (hit counts) and by governance batch runs.
Cross-references (intent -> workflow) are validated here, at load time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .bm25 import KbIndex
from .config import EngineConfig
from .errors import ConfigError
from .governance import load_faq_store
from .ingest import TransliterationTable
from .models import FaqEntry
from .understanding import EntityPatterns, IntentRegistry, ProfileCueSets, SentimentLexicon
from .workflow import WorkflowCatalog


@dataclass
class Stores:
    registry: IntentRegistry
    catalog: WorkflowCatalog
    lexicon: SentimentLexicon
    cue_sets: ProfileCueSets
    patterns: EntityPatterns
    transliteration: TransliterationTable
    faq_cache: list[FaqEntry]
    kb_index: KbIndex


def _read_json(path: Path) -> dict:
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ConfigError(f"store document not found: {path}") from exc
    except ValueError as exc:
        raise ConfigError(f"store document {path} is not valid JSON: {exc}") from exc


def load_stores(config: EngineConfig) -> Stores:
    registry = IntentRegistry.from_doc(
        _read_json(config.path("intent_registry")), config.intent_default_threshold
    )
    catalog = WorkflowCatalog.from_doc(_read_json(config.path("workflow_catalog")))
    catalog.validate_registry(registry)

    lexicon = SentimentLexicon.from_doc(_read_json(config.path("sentiment_lexicon")))
    cue_sets = ProfileCueSets.from_doc(_read_json(config.path("profile_cues")))

    gazetteer_doc = _read_json(config.path("gazetteer"))
    patterns_doc = _read_json(config.path("entity_patterns"))
    patterns = EntityPatterns.build(
        account_pattern=patterns_doc.get("account_number", r"\bAC-\d{6}\b"),
        gazetteer_names=gazetteer_doc.get("names", []),
    )

    transliteration = TransliterationTable.from_doc(_read_json(config.path("transliteration")))
    faq_cache = load_faq_store(config.path("faq_store"))
    kb_index = KbIndex.build(config.path("kb_dir"))

    return Stores(
        registry=registry,
        catalog=catalog,
        lexicon=lexicon,
        cue_sets=cue_sets,
        patterns=patterns,
        transliteration=transliteration,
        faq_cache=faq_cache,
        kb_index=kb_index,
    )
