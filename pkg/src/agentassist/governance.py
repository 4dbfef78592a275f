"""FAQ lifecycle: mine candidates, validate them, manage the cache.

Mining clusters journaled answered queries by normalized text and promotes
clusters with enough support. Validation runs a fixed check sequence:

  H1  question form: ends with "?" and has at least 3 tokens
  H2  answer length inside the configured token bounds
  H3  no unredacted identifiers in question or answer
  O1  question resolves to a known domain tag through the intent registry
  D1  (apply time) duplicate normalized question among validated entries

The cache itself is append/flag-only: entries expire by status flip, never
deletion, and re-accepting an expired question creates the next version.
"""

from __future__ import annotations

from pathlib import Path

from . import canonical
from .config import EngineConfig
from .models import AnswerRecord, CallRecord, FaqCandidate, FaqEntry, ValidationReport
from .retrieval import NO_ANSWER_TEXT
from .summarize import redact_pii
from .textnorm import normalize_tokens, normalized_text
from .understanding import EntityPatterns, IntentRegistry


def mine_candidates(
    call_records: list[CallRecord],
    answer_log: list[AnswerRecord],
    min_support: int,
) -> list[FaqCandidate]:
    """Cluster answered queries by normalized text; one candidate per cluster
    with support >= min_support, keeping the most recent answer text."""
    sessions = {r.session_id for r in call_records}
    clusters: dict[str, list[AnswerRecord]] = {}
    order: list[str] = []
    for record in answer_log:
        if record.session_id not in sessions:
            continue
        if record.answer_text == NO_ANSWER_TEXT:
            continue
        key = normalized_text(record.query_text)
        if not key:
            continue
        if key not in clusters:
            clusters[key] = []
            order.append(key)
        clusters[key].append(record)

    candidates: list[FaqCandidate] = []
    for key in order:
        records = clusters[key]
        if len(records) < min_support:
            continue
        latest = max(records, key=lambda r: r.created_at_ms)
        candidates.append(
            FaqCandidate(
                question_text=latest.query_text,
                answer_text=latest.answer_text,
                provenance="mined-live",
                support_count=len(records),
                first_seen_ms=min(r.created_at_ms for r in records),
                last_seen_ms=max(r.created_at_ms for r in records),
            )
        )
    return candidates


def validate_candidate(
    candidate: FaqCandidate,
    registry: IntentRegistry,
    patterns: EntityPatterns,
    config: EngineConfig,
    checked_at_ms: int,
) -> ValidationReport:
    """Run H1/H2/H3/O1 in order; all failures are reported, none thrown."""
    failed: list[str] = []

    question = candidate.question_text.strip()
    question_tokens = normalize_tokens(question)
    if not question.endswith("?") or len(question_tokens) < 3:
        failed.append("H1")

    answer_tokens = normalize_tokens(candidate.answer_text)
    if not config.answer_min_tokens <= len(answer_tokens) <= config.answer_max_tokens:
        failed.append("H2")

    _, question_pii = redact_pii(candidate.question_text, patterns)
    _, answer_pii = redact_pii(candidate.answer_text, patterns)
    if question_pii or answer_pii:
        failed.append("H3")

    tag = _resolve_domain_tag(question, registry)
    if not tag:
        failed.append("O1")

    return ValidationReport(
        candidate=candidate,
        verdict="accepted" if not failed else "rejected",
        failed_checks=failed,
        checked_at_ms=checked_at_ms,
        kb_domain_tag=tag or "",
    )


def _resolve_domain_tag(question: str, registry: IntentRegistry) -> str | None:
    """Ontology check: the intent whose cues best match the question lends
    its domain tag; no cue hit anywhere means the question is out of domain."""
    best_tag: str | None = None
    best_conf = 0.0
    for label in registry.labels():
        spec = registry.intents[label]
        residual = 1.0
        hit = False
        for _cue_id, pattern, weight in spec.cues:
            if pattern.search(question):
                residual *= 1.0 - weight
                hit = True
        if not hit or not spec.kb_domain_tag:
            continue
        confidence = 1.0 - residual
        if confidence > best_conf:
            best_conf = confidence
            best_tag = spec.kb_domain_tag
    return best_tag


def apply_lifecycle(
    cache: list[FaqEntry],
    reports: list[ValidationReport],
    now_ms: int,
    ttl_ms: int,
) -> tuple[list[FaqEntry], list[dict]]:
    """Expire stale entries, then add accepted candidates. Returns the cache
    (mutated in place) and a change log of add/expire/reject events."""
    changes: list[dict] = []

    for entry in cache:
        if (
            entry.status == "validated"
            and entry.expires_at_ms is not None
            and entry.expires_at_ms < now_ms
        ):
            entry.status = "expired"
            changes.append({"action": "expire", "entry_id": entry.entry_id, "t_ms": now_ms})

    for report in reports:
        if report.verdict != "accepted":
            continue
        tokens = normalize_tokens(report.candidate.question_text)
        key = " ".join(tokens)
        duplicate = any(
            e.status == "validated" and " ".join(e.normalized_question) == key for e in cache
        )
        if duplicate:
            changes.append(
                {
                    "action": "reject",
                    "check": "D1",
                    "question": report.candidate.question_text,
                    "t_ms": now_ms,
                }
            )
            continue
        prior_versions = [
            e.version for e in cache if " ".join(e.normalized_question) == key
        ]
        entry = FaqEntry(
            entry_id=f"faq-{len(cache) + 1:04d}",
            normalized_question=tokens,
            answer=report.candidate.answer_text,
            kb_domain_tag=report.kb_domain_tag,
            status="validated",
            provenance=report.candidate.provenance,
            version=max(prior_versions, default=0) + 1,
            hit_count=0,
            expires_at_ms=now_ms + ttl_ms,
        )
        cache.append(entry)
        changes.append(
            {
                "action": "add",
                "entry_id": entry.entry_id,
                "version": entry.version,
                "question": report.candidate.question_text,
                "t_ms": now_ms,
            }
        )
    return cache, changes


# ── store files ────────────────────────────────────────────────────────────


def load_faq_store(path: str | Path) -> list[FaqEntry]:
    entries = []
    path = Path(path)
    if not path.exists():
        return entries
    for line in path.read_text(encoding="utf-8").splitlines():
        if line.strip():
            entries.append(FaqEntry.from_doc(canonical.loads(line)))
    return entries


def save_faq_store(path: str | Path, cache: list[FaqEntry]) -> None:
    Path(path).write_bytes(b"".join(canonical.dump_line(e.to_doc()) for e in cache))


def append_change_log(store_path: str | Path, changes: list[dict]) -> Path:
    log_path = Path(store_path).with_name("changes.ndjson")
    with log_path.open("ab") as fh:
        for change in changes:
            fh.write(canonical.dump_line(change))
    return log_path
