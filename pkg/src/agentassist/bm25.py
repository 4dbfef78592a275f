"""Inverted-index BM25 over a directory of plain-text documents.

File name (stem) is the doc id; a first line of the form "tags: a, b"
declares the document's domain tags and is excluded from the body. Search
is restricted to a domain tag: tagged documents match only their tags,
untagged documents match every domain. Rebuilding from the same directory
yields identical statistics.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path

from .textnorm import normalize_tokens

K1 = 1.5
B = 0.75

_SENTENCE_RE = re.compile(r"[^.!?\n]+[.!?]?")


@dataclass
class KbDocument:
    doc_id: str
    body: str
    tags: list[str]
    tokens: list[str] = field(default_factory=list)


class KbIndex:
    def __init__(self, documents: list[KbDocument]):
        self.documents = {d.doc_id: d for d in sorted(documents, key=lambda d: d.doc_id)}
        self.doc_count = len(documents)
        self.doc_len = {d.doc_id: len(d.tokens) for d in documents}
        self.avgdl = (
            sum(self.doc_len.values()) / self.doc_count if self.doc_count else 0.0
        )
        self.postings: dict[str, dict[str, int]] = {}
        for doc in documents:
            counts: dict[str, int] = {}
            for token in doc.tokens:
                counts[token] = counts.get(token, 0) + 1
            for token, tf in counts.items():
                self.postings.setdefault(token, {})[doc.doc_id] = tf

    @classmethod
    def build(cls, kb_dir: str | Path) -> "KbIndex":
        documents = []
        for path in sorted(Path(kb_dir).glob("*.txt")):
            text = path.read_text(encoding="utf-8")
            tags: list[str] = []
            body = text
            first, _, rest = text.partition("\n")
            if first.lower().startswith("tags:"):
                tags = [t.strip() for t in first[5:].split(",") if t.strip()]
                body = rest
            documents.append(
                KbDocument(doc_id=path.stem, body=body.strip(), tags=tags, tokens=normalize_tokens(body))
            )
        return cls(documents)

    def idf(self, term: str) -> float:
        df = len(self.postings.get(term, {}))
        if df == 0:
            return 0.0
        return math.log(1.0 + (self.doc_count - df + 0.5) / (df + 0.5))

    def _in_domain(self, doc_id: str, tag: str) -> bool:
        tags = self.documents[doc_id].tags
        return not tags or tag in tags

    def search(self, query_tokens: list[str], tag: str, k: int) -> list[tuple[str, float]]:
        """Top-k (doc_id, score) in the tag's domain; score-desc, id-asc."""
        scores: dict[str, float] = {}
        # sorted so float accumulation order never depends on set hashing
        for term in sorted(set(query_tokens)):
            idf = self.idf(term)
            if idf == 0.0:
                continue
            for doc_id, tf in self.postings[term].items():
                if not self._in_domain(doc_id, tag):
                    continue
                dl = self.doc_len[doc_id]
                norm = K1 * (1.0 - B + B * dl / self.avgdl) if self.avgdl else K1
                scores[doc_id] = scores.get(doc_id, 0.0) + idf * tf * (K1 + 1.0) / (tf + norm)
        ranked = sorted(scores.items(), key=lambda item: (-item[1], item[0]))
        return [(doc_id, score) for doc_id, score in ranked[:k] if score > 0.0]

    def best_sentence(self, doc_id: str, query_tokens: list[str]) -> str:
        """Sentence with the most query-term hits; earliest wins ties."""
        query = set(query_tokens)
        best = ""
        best_hits = -1
        for m in _SENTENCE_RE.finditer(self.documents[doc_id].body):
            sentence = m.group(0).strip()
            if not sentence:
                continue
            hits = len(query & set(normalize_tokens(sentence)))
            if hits > best_hits:
                best, best_hits = sentence, hits
        return best
