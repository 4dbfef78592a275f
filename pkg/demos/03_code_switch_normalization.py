"""Mixed Hindi/English speech rendered as English display text.

Every downstream prompt reads the English form; raw speech is preserved on
the event. Run: python demos/03_code_switch_normalization.py
"""

from pathlib import Path

from agentassist.config import load_config
from agentassist.simulator import replay
from agentassist.stores import load_stores

ROOT = Path(__file__).resolve().parents[1]


def main() -> None:
    config = load_config(ROOT / "fixtures" / "config" / "engine.json")
    stores = load_stores(config)
    result = replay(ROOT / "fixtures" / "scripts" / "travel_plan_hinglish.ndjson", config, stores)
    print(f"{'lang':<6} {'raw speech':<42} display text")
    print("-" * 100)
    for entry in result.journal:
        if entry["kind"] != "assist-output" or entry["payload"]["type"] != "transcript.event":
            continue
        event = entry["payload"]["payload"]
        print(f"{event['lang']:<6} {event['raw_text']:<42} {event['display_text']}")
    final = [
        e["payload"]["payload"]
        for e in result.journal
        if e["kind"] == "assist-output" and e["payload"]["type"] == "call.final_summary"
    ][0]
    print("\n" + final["text"])


if __name__ == "__main__":
    main()
