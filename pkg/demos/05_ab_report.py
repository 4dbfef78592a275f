"""A/B cohort report over synthetic assisted/control calls.

Generates two small cohorts with configured ground-truth deltas, replays
every script, and prints the KPI table the `ab` CLI verb would emit.

Run: python demos/05_ab_report.py
"""

import tempfile
from pathlib import Path

from agentassist.cohortgen import CohortPlan, generate_cohorts
from agentassist.config import load_config
from agentassist.metrics import ab_compare
from agentassist.simulator import replay
from agentassist.stores import load_stores

ROOT = Path(__file__).resolve().parents[1]


def main() -> None:
    config = load_config(ROOT / "fixtures" / "config" / "engine.json")
    plan = CohortPlan(calls_per_cohort=10, control_l2e=5, assisted_l2e=7,
                      control_booking=4, assisted_booking=5, assisted_faq_clicks=7)
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        expected = generate_cohorts(tmp / "scripts", plan)
        for cohort in ("assisted", "control"):
            stores = load_stores(config)
            for script in sorted((tmp / "scripts" / cohort).glob("*.ndjson")):
                replay(script, config, stores, out_dir=tmp / "runs" / cohort)
        report, table, _rows = ab_compare(tmp / "runs" / "assisted", tmp / "runs" / "control", config)
    print(table)
    print(f"\nconfigured ground truth: AHT reduction {expected['aht_reduction_pct']:.1f}%, "
          f"L2E uplift {expected['l2e_uplift_pct']:.1f}%, booking uplift {expected['booking_uplift_pct']:.1f}%")


if __name__ == "__main__":
    main()
