"""Synthetic A/B cohort generator.

Writes two cohorts of call scripts whose ground-truth KPIs are configured
up front and recomputed here with plain spreadsheet arithmetic, independent
of the pipeline: exact cohort-mean durations, per-cohort conversion counts,
and the expected FAQ hit rate from the planned click mix. The expected
values land in ``expected_kpis.json`` next to the scripts so an A/B report
can be checked against known deltas.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

from . import canonical

CACHED_QUERY = "Which travel offers are available?"
UNCACHED_QUERY = "How to activate a travel plan?"


@dataclass
class CohortPlan:
    calls_per_cohort: int = 50
    control_aht_s: float = 283.0  # 4m43s
    assisted_aht_s: float = 175.0  # 2m55s
    control_l2e: int = 27
    assisted_l2e: int = 36
    control_booking: int = 21
    assisted_booking: int = 22
    assisted_faq_clicks: int = 35  # remainder clicks the uncached query

    def expected(self) -> dict:
        n = self.calls_per_cohort
        routed = n  # one click per assisted call
        hits = self.assisted_faq_clicks
        l2e_control = self.control_l2e / n
        l2e_assisted = self.assisted_l2e / n
        booking_control = self.control_booking / n
        booking_assisted = self.assisted_booking / n
        return {
            "cohort_sizes": {"assisted": n, "control": n},
            "aht_s": {"assisted": self.assisted_aht_s, "control": self.control_aht_s},
            "aht_reduction_pct": 100.0
            * (self.control_aht_s - self.assisted_aht_s)
            / self.control_aht_s,
            "faq_hit_rate": hits / routed,
            "latency_saved_hours": round(hits * 6.0 / 3600.0, 1),
            "l2e_rate": {"assisted": l2e_assisted, "control": l2e_control},
            "booking_rate": {"assisted": booking_assisted, "control": booking_control},
            "l2e_uplift_pct": 100.0 * (l2e_assisted - l2e_control) / l2e_control,
            "booking_uplift_pct": 100.0 * (booking_assisted - booking_control) / booking_control,
        }


def _offsets(n: int) -> list[float]:
    """Symmetric +-(n-1)/2 second offsets summing to exactly zero."""
    return [i - (n - 1) / 2.0 for i in range(n)]


def _script_lines(
    session_id: str,
    cohort: str,
    duration_ms: int,
    converted_enquiry: bool,
    converted_booking: bool,
    click: str | None,
) -> list[dict]:
    """A short travel-plan exchange stretched to the target duration."""
    end = duration_ms
    lines: list[dict] = [
        {
            "meta": {
                "cohort": cohort,
                "converted_enquiry": converted_enquiry,
                "converted_booking": converted_booking,
            }
        }
    ]

    def event(turn, speaker, text, t0, t1):
        return {
            "session_id": session_id,
            "turn_index": turn,
            "speaker": speaker,
            "raw_text": text,
            "lang": "en",
            "t_start_ms": t0,
            "t_end_ms": t1,
            "is_final": True,
        }

    lines.append(event(0, "agent", "Thank you for calling, how can I help you today?", 0, 4000))
    lines.append(
        event(1, "customer", "Hi, I am travelling abroad next month and I want to get a travel plan.", 5000, 11000)
    )
    lines.append(event(2, "agent", "Happy to help with a travel plan.", 12000, 15000))
    if click is not None:
        lines.append({"action": "click_query", "query_text": click, "t_ms": 16000})
    lines.append(
        event(3, "customer", "Great, that sounds good, thanks.", 17000, min(21000, end - 1000))
    )
    lines.append(event(4, "agent", "Anything else I can do for you?", end - 1000, end))
    lines.append({"action": "end_call", "t_ms": end})
    return lines


def generate_cohorts(root: str | Path, plan: CohortPlan | None = None) -> dict:
    """Write assisted/ and control/ script directories plus expected_kpis.json.
    Returns the expected-KPI document."""
    plan = plan or CohortPlan()
    root = Path(root)
    offsets = _offsets(plan.calls_per_cohort)
    for cohort, aht in (("assisted", plan.assisted_aht_s), ("control", plan.control_aht_s)):
        directory = root / cohort
        directory.mkdir(parents=True, exist_ok=True)
        for i in range(plan.calls_per_cohort):
            duration_ms = int(round((aht + offsets[i]) * 1000))
            if cohort == "assisted":
                click = CACHED_QUERY if i < plan.assisted_faq_clicks else UNCACHED_QUERY
                enquiry = i < plan.assisted_l2e
                booking = i < plan.assisted_booking
            else:
                click = None
                enquiry = i < plan.control_l2e
                booking = i < plan.control_booking
            session_id = f"{cohort}-{i:03d}"
            lines = _script_lines(session_id, cohort, duration_ms, enquiry, booking, click)
            path = directory / f"{session_id}.ndjson"
            path.write_bytes(b"".join(canonical.dump_line(doc) for doc in lines))

    expected = plan.expected()
    # sanity: offsets must not perturb the configured means
    assert math.fsum(offsets) == 0.0
    (root / "expected_kpis.json").write_text(
        json.dumps(expected, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return expected
