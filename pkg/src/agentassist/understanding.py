"""Per-turn understanding: entities, intent confidence, sentiment, profile.

Everything here is a pure function over (state, event, static config).
Intent scoring is cue-pattern noisy-OR: each matched cue appends a weighted
hit and confidence is 1 - prod(1 - w_i), which is bounded, monotone in the
number of hits, and independent of hit order. Sentiment is a clamped
lexicon sum; CSAT likelihood is a logistic over the running mean polarity.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import ConfigError
from .ingest import TranscriptEvent
from .models import Entity, IntentHypothesis, ProfileCues, SentimentSample, clamp, logistic
from .session import SessionState
from .textnorm import EMAIL_RE, PHONE_RE, count_phrase, normalize_tokens

# extraction priority; a lower-priority match nested in a higher one is dropped
_KIND_ORDER = ("email", "phone", "account_number", "name")


@dataclass
class EntityPatterns:
    """Compiled extraction patterns. Email/phone are standard syntax; the
    account pattern is client-configured; names come from a gazetteer."""

    account_re: re.Pattern
    name_re: re.Pattern | None
    gazetteer: frozenset[str]

    @classmethod
    def build(cls, account_pattern: str, gazetteer_names: list[str]) -> "EntityPatterns":
        try:
            account_re = re.compile(account_pattern)
        except re.error as exc:
            raise ConfigError(f"bad account_number pattern: {exc}") from exc
        names = frozenset(n.lower() for n in gazetteer_names if n)
        name_re = None
        if names:
            alternation = "|".join(re.escape(n) for n in sorted(names, key=lambda n: (-len(n), n)))
            name_re = re.compile(rf"\b(?:{alternation})\b", re.IGNORECASE)
        return cls(account_re=account_re, name_re=name_re, gazetteer=names)

    def by_kind(self) -> list[tuple[str, re.Pattern | None]]:
        return [
            ("email", EMAIL_RE),
            ("phone", PHONE_RE),
            ("account_number", self.account_re),
            ("name", self.name_re),
        ]


def extract_entities(event: TranscriptEvent, patterns: EntityPatterns) -> list[Entity]:
    """All identifier matches in display_text, outer-match-wins on overlap."""
    text = event.display_text
    found: list[Entity] = []
    claimed: list[tuple[int, int]] = []
    for kind, pattern in patterns.by_kind():
        if pattern is None:
            continue
        for m in pattern.finditer(text):
            span = (m.start(), m.end())
            if any(span[0] < e and s < span[1] for s, e in claimed):
                continue
            claimed.append(span)
            found.append(Entity(kind=kind, value=m.group(0), turn_index=event.turn_index, span=span))
    found.sort(key=lambda e: (e.span[0], _KIND_ORDER.index(e.kind)))
    return found


@dataclass
class IntentSpec:
    label: str
    cues: list[tuple[str, re.Pattern, float]]  # (cue_id, pattern, weight)
    threshold: float
    workflow_id: str
    kb_domain_tag: str
    query_templates: list[str] = field(default_factory=list)


class IntentRegistry:
    """Intent catalog: cues, thresholds, workflow bindings, query templates."""

    def __init__(self, intents: dict[str, IntentSpec]):
        self.intents = intents

    @classmethod
    def from_doc(cls, doc: dict, default_threshold: float) -> "IntentRegistry":
        intents: dict[str, IntentSpec] = {}
        for label, spec in doc.get("intents", {}).items():
            cues = []
            for i, (pattern_text, weight) in enumerate(spec.get("cues", [])):
                if not 0.0 < float(weight) <= 1.0:
                    raise ConfigError(f"intent {label!r} cue weight {weight} not in (0, 1]")
                try:
                    pattern = re.compile(pattern_text, re.IGNORECASE)
                except re.error as exc:
                    raise ConfigError(f"intent {label!r} cue {i}: {exc}") from exc
                cues.append((f"{label}.{i}", pattern, float(weight)))
            threshold = float(spec.get("threshold", default_threshold))
            if not 0.0 < threshold <= 1.0:
                raise ConfigError(f"intent {label!r} threshold {threshold} not in (0, 1]")
            workflow_id = spec.get("workflow_id", "")
            if not workflow_id:
                raise ConfigError(f"intent {label!r} missing workflow_id")
            templates = list(spec.get("query_templates", []))
            for template in templates:
                if not template.strip().endswith("?"):
                    raise ConfigError(f"intent {label!r} template must end with '?': {template!r}")
            intents[label] = IntentSpec(
                label=label,
                cues=cues,
                threshold=threshold,
                workflow_id=workflow_id,
                kb_domain_tag=spec.get("kb_domain_tag", ""),
                query_templates=templates,
            )
        return cls(intents)

    def labels(self) -> list[str]:
        return sorted(self.intents)


def update_intents(
    state: SessionState, event: TranscriptEvent, registry: IntentRegistry
) -> list[str]:
    """Append cue hits for this turn and return labels newly crossing their
    threshold. A triggered flag, once set, never resets."""
    newly_triggered: list[str] = []
    for label in registry.labels():
        spec = registry.intents[label]
        hypothesis = state.intents.get(label)
        hit = False
        for cue_id, pattern, weight in spec.cues:
            if pattern.search(event.display_text):
                if hypothesis is None:
                    hypothesis = IntentHypothesis(label=label)
                    state.intents[label] = hypothesis
                hypothesis.cue_hits.append((cue_id, event.turn_index, weight))
                hit = True
        if hypothesis is None or not hit:
            continue
        hypothesis.recompute_confidence()
        if not hypothesis.triggered and hypothesis.confidence >= spec.threshold:
            hypothesis.triggered = True
            hypothesis.triggered_at_turn = event.turn_index
            newly_triggered.append(label)
    return newly_triggered


class SentimentLexicon:
    """Term/phrase polarity weights over the shared tokenizer."""

    def __init__(self, terms: dict[str, float], version: str):
        self.version = version
        self.phrases: list[tuple[list[str], float]] = []
        for term, weight in terms.items():
            tokens = normalize_tokens(term)
            if not tokens:
                raise ConfigError(f"lexicon term normalizes to nothing: {term!r}")
            self.phrases.append((tokens, float(weight)))
        # longest phrases first so "not working" is not shadowed by "working"
        self.phrases.sort(key=lambda p: (-len(p[0]), p[0]))

    @classmethod
    def from_doc(cls, doc: dict) -> "SentimentLexicon":
        if "version" not in doc:
            raise ConfigError("sentiment lexicon missing 'version'")
        return cls(doc.get("terms", {}), doc["version"])

    def polarity(self, text: str) -> float:
        tokens = normalize_tokens(text)
        total = 0.0
        for phrase, weight in self.phrases:
            total += weight * count_phrase(tokens, phrase)
        return clamp(total, -1.0, 1.0)


def update_sentiment(
    state: SessionState,
    event: TranscriptEvent,
    lexicon: SentimentLexicon,
    csat_steepness: float,
    detractor_below: float,
    promoter_at: float,
) -> SentimentSample:
    """Score this customer turn and append it to the trajectory."""
    polarity = lexicon.polarity(event.display_text)
    polarities = [s.polarity for s in state.sentiment_trajectory] + [polarity]
    mean = sum(polarities) / len(polarities)
    csat = logistic(csat_steepness * mean)
    if csat < detractor_below:
        band = "detractor"
    elif csat < promoter_at:
        band = "passive"
    else:
        band = "promoter"
    sample = SentimentSample(
        turn_index=event.turn_index, polarity=polarity, csat_likelihood=csat, nps_band=band
    )
    state.sentiment_trajectory.append(sample)
    return sample


class ProfileCueSets:
    """Interest/hesitation phrase sets plus goal-language patterns."""

    def __init__(self, interest: list[str], hesitation: list[str], goal_patterns: list[str]):
        self.interest = [normalize_tokens(p) for p in interest]
        self.hesitation = [normalize_tokens(p) for p in hesitation]
        self.goal_res = []
        for pattern_text in goal_patterns:
            try:
                self.goal_res.append(re.compile(pattern_text, re.IGNORECASE))
            except re.error as exc:
                raise ConfigError(f"bad goal pattern {pattern_text!r}: {exc}") from exc

    @classmethod
    def from_doc(cls, doc: dict) -> "ProfileCueSets":
        return cls(doc.get("interest", []), doc.get("hesitation", []), doc.get("goal_patterns", []))


def update_profile(
    state: SessionState, event: TranscriptEvent, cue_sets: ProfileCueSets
) -> ProfileCues:
    """Count interest/hesitation cues and collect goal phrases verbatim."""
    tokens = normalize_tokens(event.display_text)
    for phrase in cue_sets.interest:
        state.profile.interest_hits += count_phrase(tokens, phrase)
    for phrase in cue_sets.hesitation:
        state.profile.hesitation_hits += count_phrase(tokens, phrase)
    for pattern in cue_sets.goal_res:
        for m in pattern.finditer(event.display_text):
            state.profile.goal_phrases.append(m.group(0))
    return state.profile
