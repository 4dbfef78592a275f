"""Engine configuration.

A single JSON document holds every tunable: thresholds, latency budgets,
summary budgets, governance TTLs, store paths, and the service listen
address. Paths are resolved relative to the config file. Budgets are
validated at load so the route-latency invariants (FAQ < 500 ms, RAG within
[5000, 9000] ms) cannot be configured away.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from pathlib import Path

from .errors import ConfigError

FAQ_LATENCY_CEILING_MS = 500
RAG_LATENCY_FLOOR_MS = 5000
RAG_LATENCY_CEILING_MS = 9000


@dataclass
class EngineConfig:
    config_version: str = "defaults"
    # intent scoring
    intent_default_threshold: float = 0.7
    suggestion_floor: float = 0.4
    # sentiment
    csat_steepness: float = 2.0
    nps_detractor_below: float = 0.4
    nps_promoter_at: float = 0.7
    sentiment_shift_delta: float = 0.5
    # summaries
    bullet_budget: int = 10
    # retrieval
    faq_threshold: float = 0.8
    faq_latency_ms: int = 300
    rag_base_ms: int = 5000
    rag_per_passage_ms: int = 500
    rag_latency_min_ms: int = RAG_LATENCY_FLOOR_MS
    rag_latency_max_ms: int = RAG_LATENCY_CEILING_MS
    rag_top_k: int = 3
    rag_answer_sentences: int = 2
    auto_route: bool = False
    seconds_saved_per_hit: float = 6.0
    # workflows
    lookahead: int = 2
    # governance
    ttl_ms: int = 30 * 24 * 3600 * 1000
    min_support: int = 3
    answer_min_tokens: int = 5
    answer_max_tokens: int = 200
    # service
    listen_host: str = "127.0.0.1"
    listen_port: int = 7070
    pace_delivery: bool = False
    # store paths (absolute after load)
    paths: dict[str, str] = field(default_factory=dict)

    def validate(self) -> None:
        if not 0.0 < self.intent_default_threshold <= 1.0:
            raise ConfigError("intent_default_threshold must be in (0, 1]")
        if not 0.0 <= self.suggestion_floor <= 1.0:
            raise ConfigError("suggestion_floor must be in [0, 1]")
        if self.csat_steepness <= 0.0:
            raise ConfigError("csat_steepness must be > 0")
        if not 0.0 < self.faq_threshold <= 1.0:
            raise ConfigError("faq_threshold must be in (0, 1]")
        if not 0 < self.faq_latency_ms < FAQ_LATENCY_CEILING_MS:
            raise ConfigError(f"faq_latency_ms must stay under {FAQ_LATENCY_CEILING_MS}")
        if not (
            RAG_LATENCY_FLOOR_MS
            <= self.rag_latency_min_ms
            <= self.rag_latency_max_ms
            <= RAG_LATENCY_CEILING_MS
        ):
            raise ConfigError(
                f"rag latency window must sit inside [{RAG_LATENCY_FLOOR_MS}, {RAG_LATENCY_CEILING_MS}]"
            )
        if self.rag_top_k < 1:
            raise ConfigError("rag_top_k must be >= 1")
        if self.bullet_budget < 1:
            raise ConfigError("bullet_budget must be >= 1")
        if self.min_support < 1:
            raise ConfigError("min_support must be >= 1")
        if not 0 < self.answer_min_tokens <= self.answer_max_tokens:
            raise ConfigError("answer token bounds must satisfy 0 < min <= max")

    def path(self, key: str) -> Path:
        if key not in self.paths:
            raise ConfigError(f"config has no path for {key!r}")
        return Path(self.paths[key])


_SECTION_FIELDS = {
    "intent": {"default_threshold": "intent_default_threshold", "suggestion_floor": "suggestion_floor"},
    "sentiment": {
        "csat_steepness": "csat_steepness",
        "nps_detractor_below": "nps_detractor_below",
        "nps_promoter_at": "nps_promoter_at",
        "shift_delta": "sentiment_shift_delta",
    },
    "summary": {"bullet_budget": "bullet_budget"},
    "retrieval": {
        "faq_threshold": "faq_threshold",
        "faq_latency_ms": "faq_latency_ms",
        "rag_base_ms": "rag_base_ms",
        "rag_per_passage_ms": "rag_per_passage_ms",
        "rag_latency_min_ms": "rag_latency_min_ms",
        "rag_latency_max_ms": "rag_latency_max_ms",
        "top_k": "rag_top_k",
        "answer_sentences": "rag_answer_sentences",
        "auto_route": "auto_route",
        "seconds_saved_per_hit": "seconds_saved_per_hit",
    },
    "workflow": {"lookahead": "lookahead"},
    "governance": {
        "ttl_ms": "ttl_ms",
        "min_support": "min_support",
        "answer_min_tokens": "answer_min_tokens",
        "answer_max_tokens": "answer_max_tokens",
    },
    "service": {"host": "listen_host", "port": "listen_port", "pace_delivery": "pace_delivery"},
}


def load_config(path: str | Path) -> EngineConfig:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except ValueError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from exc

    config = EngineConfig()
    valid_names = {f.name for f in fields(EngineConfig)}
    config.config_version = str(doc.get("config_version", path.stem))
    for section, mapping in _SECTION_FIELDS.items():
        for key, value in doc.get(section, {}).items():
            if key not in mapping:
                raise ConfigError(f"unknown config key {section}.{key}")
            name = mapping[key]
            assert name in valid_names
            setattr(config, name, value)
    base = path.parent
    for key, rel in doc.get("paths", {}).items():
        config.paths[key] = str((base / rel).resolve())
    config.validate()
    return config
