"""Contrast the two answer routes and the latency ledger they produce.

The first suggested query has a validated cache entry and returns in under
half a second; the second misses the cache and pays the full retrieval
price. The accounting at the end scales the per-hit saving to a 10,000-call
deployment log.

Run: python demos/02_faq_vs_rag_routing.py
"""

from pathlib import Path

from agentassist.config import load_config
from agentassist.models import AnswerRecord, SuggestedQuery
from agentassist.retrieval import account_latency, route
from agentassist.stores import load_stores

ROOT = Path(__file__).resolve().parents[1]


def main() -> None:
    config = load_config(ROOT / "fixtures" / "config" / "engine.json")
    stores = load_stores(config)

    for i, text in enumerate(["Which travel offers are available?", "How to activate a travel plan?"]):
        query = SuggestedQuery(f"q{i}", "demo", 0, text, "travel_plan", "travel", 0)
        record = route(query, stores.faq_cache, stores.kb_index, config, now_ms=0, turn_index=0)
        badge = "FAQ " if record.route == "faq" else "RAG "
        print(f"[{badge}{record.simulated_latency_ms:>5}ms] {text}")
        print(f"          {record.answer_text[:110]}")
        if record.passages:
            print(f"          passages: {[p[0] for p in record.passages]}")
        print()

    # the latency ledger at deployment scale: 7,000 of 10,000 queries cached
    log = []
    for i in range(10_000):
        hit = i < 7_000
        log.append(
            AnswerRecord(
                f"q{i}", "scale", "q?", "faq" if hit else "rag", "a",
                "e1" if hit else None, 1.0 if hit else None, [],
                300 if hit else 6000, 1 if hit else 0, i, 0,
            )
        )
    savings = account_latency(log, config.seconds_saved_per_hit)
    print(
        f"deployment log: {savings.hits} cache hits, {savings.avoided_calls} LLM calls avoided, "
        f"{savings.latency_saved_hours} hours of wait time saved"
    )


if __name__ == "__main__":
    main()
