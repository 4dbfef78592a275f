"""Query reformulation and the tiered FAQ-first, RAG-second answer path.

Customer asks are rewritten into KB-compatible questions by instantiating
per-intent templates with entity slots, surfaced as clickable suggestions.
Routing tries the validated FAQ cache (token-set Jaccard over the shared
normalizer) and falls back to BM25 retrieval with extractive stitching; no
answer is ever synthesized. Latencies are simulated, configuration-driven
constants recorded into each answer record: the FAQ budget stays under
500 ms, the RAG budget inside [5000, 9000] ms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .bm25 import KbIndex
from .config import EngineConfig
from .ingest import TranscriptEvent
from .models import AnswerRecord, FaqEntry, SuggestedQuery
from .session import SessionState
from .textnorm import jaccard, normalize_tokens, normalized_text
from .understanding import IntentRegistry

NO_ANSWER_TEXT = "No answer was found in the knowledge base for this query."

_SLOT_KINDS = ("name", "email", "phone", "account_number")


def generate_queries(
    state: SessionState,
    event: TranscriptEvent,
    registry: IntentRegistry,
    config: EngineConfig,
) -> list[SuggestedQuery]:
    """Instantiate templates for every intent above the suggestion floor,
    deduplicated against prior suggestions by normalized text."""
    seen = {normalized_text(q.text) for q in state.suggestions}
    created: list[SuggestedQuery] = []
    for label in registry.labels():
        hypothesis = state.intents.get(label)
        if hypothesis is None or hypothesis.confidence < config.suggestion_floor:
            continue
        spec = registry.intents[label]
        for template in spec.query_templates:
            text, filled = _fill_slots(template, state)
            if not filled:
                state.diagnostics["templates_skipped"] += 1
                continue
            key = normalized_text(text)
            if key in seen:
                continue
            seen.add(key)
            query = SuggestedQuery(
                query_id=f"q{len(state.suggestions) + 1}",
                session_id=state.session_id,
                source_turn=event.turn_index,
                text=text,
                intent_label=label,
                kb_domain_tag=spec.kb_domain_tag,
                created_at_ms=event.t_end_ms,
            )
            state.suggestions.append(query)
            created.append(query)
    return created


def _fill_slots(template: str, state: SessionState) -> tuple[str, bool]:
    text = template
    for kind in _SLOT_KINDS:
        slot = "{" + kind + "}"
        if slot in text:
            entity = state.first_entity(kind)
            if entity is None:
                return template, False
            text = text.replace(slot, entity.value)
    return text, True


def match_faq(
    query: SuggestedQuery, cache: list[FaqEntry], threshold: float
) -> tuple[FaqEntry, float] | None:
    """Best validated entry by token-set Jaccard within the query's domain;
    ties break toward the lower entry_id; below-threshold is no match."""
    query_tokens = set(normalize_tokens(query.text))
    best: tuple[FaqEntry, float] | None = None
    for entry in cache:
        if entry.status != "validated" or entry.kb_domain_tag != query.kb_domain_tag:
            continue
        similarity = jaccard(query_tokens, entry.normalized_question)
        if similarity < threshold:
            continue
        if (
            best is None
            or similarity > best[1]
            or (similarity == best[1] and entry.entry_id < best[0].entry_id)
        ):
            best = (entry, similarity)
    return best


@dataclass
class RagResult:
    passages: list[tuple[str, float]]
    answer_text: str | None


def retrieve_rag(query: SuggestedQuery, index: KbIndex, k: int, answer_sentences: int = 2) -> RagResult:
    """Top-k BM25 documents in the query's domain stitched extractively;
    a zero-hit query yields an explicit no-answer, never a fabrication."""
    tokens = normalize_tokens(query.text)
    passages = index.search(tokens, query.kb_domain_tag, k)
    if not passages:
        return RagResult(passages=[], answer_text=None)
    sentences = []
    for doc_id, _score in passages[:answer_sentences]:
        sentence = index.best_sentence(doc_id, tokens)
        if sentence:
            sentences.append(sentence)
    return RagResult(passages=passages, answer_text=" ".join(sentences) or None)


def route(
    query: SuggestedQuery,
    cache: list[FaqEntry],
    index: KbIndex,
    config: EngineConfig,
    now_ms: int,
    turn_index: int,
) -> AnswerRecord:
    """FAQ path when the cache matches, else RAG; exactly one route per
    query, with the matched entry's hit count bumped on the FAQ path."""
    matched = match_faq(query, cache, config.faq_threshold)
    if matched is not None:
        entry, similarity = matched
        entry.hit_count += 1
        return AnswerRecord(
            query_id=query.query_id,
            session_id=query.session_id,
            query_text=query.text,
            route="faq",
            answer_text=entry.answer,
            matched_entry_id=entry.entry_id,
            similarity=similarity,
            passages=[],
            simulated_latency_ms=config.faq_latency_ms,
            llm_calls_avoided=1,
            created_at_ms=now_ms,
            delivered_at_turn=turn_index,
        )
    result = retrieve_rag(query, index, config.rag_top_k, config.rag_answer_sentences)
    latency = config.rag_base_ms + config.rag_per_passage_ms * len(result.passages)
    latency = int(min(config.rag_latency_max_ms, max(config.rag_latency_min_ms, latency)))
    return AnswerRecord(
        query_id=query.query_id,
        session_id=query.session_id,
        query_text=query.text,
        route="rag",
        answer_text=result.answer_text if result.answer_text is not None else NO_ANSWER_TEXT,
        matched_entry_id=None,
        similarity=None,
        passages=result.passages,
        simulated_latency_ms=latency,
        llm_calls_avoided=0,
        created_at_ms=now_ms,
        delivered_at_turn=turn_index,
    )


@dataclass
class LatencySavings:
    hits: int
    avoided_calls: int
    latency_saved_hours: float

    def to_doc(self) -> dict:
        return {
            "hits": self.hits,
            "avoided_calls": self.avoided_calls,
            "latency_saved_hours": self.latency_saved_hours,
        }


def account_latency(records: list[AnswerRecord], seconds_saved_per_hit: float) -> LatencySavings:
    """Cache-hit savings: hours = hits * seconds_saved / 3600, one decimal."""
    hits = sum(1 for r in records if r.route == "faq")
    avoided = sum(r.llm_calls_avoided for r in records)
    hours = round(hits * seconds_saved_per_hit / 3600.0, 1)
    if not math.isfinite(hours):
        hours = 0.0
    return LatencySavings(hits=hits, avoided_calls=avoided, latency_saved_hours=hours)
