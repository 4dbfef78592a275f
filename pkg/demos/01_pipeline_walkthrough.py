"""Walk the travel-plan call through the full pipeline, message by message.

Run: python demos/01_pipeline_walkthrough.py
"""

from pathlib import Path

from agentassist.config import load_config
from agentassist.simulator import replay
from agentassist.stores import load_stores

ROOT = Path(__file__).resolve().parents[1]


def describe(envelope: dict) -> str:
    payload = envelope["payload"]
    t = envelope["type"]
    if t == "transcript.event":
        return f'{payload["speaker"]:>8}: "{payload["display_text"]}"'
    if t == "state.entities":
        new = ", ".join(f'{e["kind"]}={e["value"]}' for e in payload["new"])
        return f"entities: {new}"
    if t == "state.intents":
        top = payload["top_intent"]
        confs = ", ".join(f'{i["label"]} {i["confidence"]:.2f}' for i in payload["intents"])
        return f"intents: {confs} (top: {top})"
    if t == "sentiment.update":
        return (
            f"sentiment: polarity {payload['polarity']:+.2f}, "
            f"CSAT {payload['csat_likelihood']:.2f}, NPS {payload['nps_band']}"
        )
    if t == "workflow.triggered":
        return "workflow triggered: " + ", ".join(i["title"] for i in payload["instances"])
    if t == "workflow.actions":
        steps = ", ".join(
            f'{a["step_id"]}{"" if a["ready"] else " (waiting)"}' for a in payload["actions"]
        )
        return f"next-best actions [{payload['workflow_id']} {payload['status']}]: {steps or payload['outcome']}"
    if t == "query.suggested":
        return "suggested queries: " + " | ".join(q["text"] for q in payload["queries"])
    if t == "answer.delivered":
        return (
            f"answer via {payload['route'].upper()} in {payload['simulated_latency_ms']}ms: "
            f"{payload['answer_text'][:90]}..."
        )
    if t == "summary.partial":
        return "summary so far: " + "; ".join(payload["bullets"])
    if t == "call.final_summary":
        return "FINAL SUMMARY\n" + payload["text"]
    return t


def main() -> None:
    config = load_config(ROOT / "fixtures" / "config" / "engine.json")
    stores = load_stores(config)
    result = replay(ROOT / "fixtures" / "scripts" / "travel_plan.ndjson", config, stores)
    for entry in result.journal:
        if entry["kind"] != "assist-output":
            continue
        envelope = entry["payload"]
        print(f"[seq {envelope['seq']:>2} t={envelope['t_ms']/1000:5.1f}s] {describe(envelope)}")
    record = result.call_record
    print(
        f"\ncall record: duration {record.duration_s:.0f}s, faq_hits {record.faq_hits}, "
        f"rag_calls {record.rag_calls}, outcome {record.outcome}"
    )


if __name__ == "__main__":
    main()
