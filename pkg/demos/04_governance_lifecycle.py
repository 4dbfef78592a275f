"""The FAQ cache lifecycle end to end: mine, validate, apply, expire.

Three calls ask the same activation question; it gets answered from the
knowledge base, mined as a candidate, validated against the heuristic and
ontology checks, cached with a TTL, and finally expired.

Run: python demos/04_governance_lifecycle.py
"""

import tempfile
from pathlib import Path

from agentassist import canonical
from agentassist.config import load_config
from agentassist.governance import apply_lifecycle, mine_candidates, validate_candidate
from agentassist.simulator import replay
from agentassist.stores import load_stores

ROOT = Path(__file__).resolve().parents[1]

SCRIPT_LINES = [
    {"meta": {"cohort": "assisted"}},
    {"session_id": "SID", "turn_index": 0, "speaker": "customer",
     "raw_text": "I am travelling next week and need a travel plan, how do I set it up?",
     "lang": "en", "t_start_ms": 0, "t_end_ms": 4000, "is_final": True},
    {"action": "click_query", "query_text": "How to activate a travel plan?", "t_ms": 5000},
    {"action": "end_call", "t_ms": 8000},
]


def main() -> None:
    config = load_config(ROOT / "fixtures" / "config" / "engine.json")
    stores = load_stores(config)

    call_records, answers = [], []
    with tempfile.TemporaryDirectory() as tmp:
        for i in range(3):
            script = Path(tmp) / f"call{i}.ndjson"
            lines = [
                {**line, "session_id": f"call-{i}"} if "session_id" in line else line
                for line in SCRIPT_LINES
            ]
            script.write_bytes(b"".join(canonical.dump_line(l) for l in lines))
            result = replay(script, config, stores)
            call_records.append(result.call_record)
            answers.extend(result.answers)

    print(f"mining over {len(call_records)} calls, {len(answers)} answered queries")
    candidates = mine_candidates(call_records, answers, config.min_support)
    for candidate in candidates:
        print(f"  candidate (support {candidate.support_count}): {candidate.question_text}")

    reports = [
        validate_candidate(c, stores.registry, stores.patterns, config, checked_at_ms=1000)
        for c in candidates
    ]
    for report in reports:
        print(f"  verdict: {report.verdict} {report.failed_checks or ''} tag={report.kb_domain_tag}")

    cache = list(stores.faq_cache)
    cache, changes = apply_lifecycle(cache, reports, now_ms=1000, ttl_ms=config.ttl_ms)
    for change in changes:
        print(f"  change: {change}")

    # a month later the entry expires; it is flagged, never deleted
    cache, changes = apply_lifecycle(cache, [], now_ms=1000 + config.ttl_ms + 1, ttl_ms=config.ttl_ms)
    for change in changes:
        print(f"  change: {change}")
    print(f"cache now holds {len(cache)} entries, "
          f"{sum(1 for e in cache if e.status == 'validated')} validated")


if __name__ == "__main__":
    main()
