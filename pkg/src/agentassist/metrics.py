"""KPI computation and A/B cohort comparison over finished-call logs.

All aggregation uses math.fsum, so reports are permutation-invariant over
their input records. Uplift conventions: percentages are relative to the
control cohort; a zero control rate yields an uplift of 0.0 plus a warning
rather than a division error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

from . import canonical
from .config import EngineConfig
from .errors import MissingCohortError
from .models import AnswerRecord, CallRecord
from .retrieval import account_latency

COHORTS = ("assisted", "control")


@dataclass
class MetricsReport:
    cohort_sizes: dict[str, int]
    aht_s: dict[str, float]
    aht_reduction_pct: float | None
    faq_hit_rate: float
    latency_saved_hours: float
    l2e_rate: dict[str, float]
    booking_rate: dict[str, float]
    l2e_uplift_pct: float | None
    booking_uplift_pct: float | None
    warnings: list[str] = field(default_factory=list)

    def to_doc(self) -> dict:
        return {
            "cohort_sizes": dict(self.cohort_sizes),
            "aht_s": dict(self.aht_s),
            "aht_reduction_pct": self.aht_reduction_pct,
            "faq_hit_rate": self.faq_hit_rate,
            "latency_saved_hours": self.latency_saved_hours,
            "l2e_rate": dict(self.l2e_rate),
            "booking_rate": dict(self.booking_rate),
            "l2e_uplift_pct": self.l2e_uplift_pct,
            "booking_uplift_pct": self.booking_uplift_pct,
            "warnings": list(self.warnings),
        }


def _mean(values: list[float]) -> float:
    return math.fsum(values) / len(values)


def _rate(flags: list[bool]) -> float:
    return math.fsum(1.0 for f in flags if f) / len(flags)


def _uplift_pct(assisted: float, control: float, label: str, warnings: list[str]) -> float:
    if control == 0.0:
        if assisted != 0.0:
            warnings.append(f"{label}: control rate is 0, uplift reported as 0.0")
        return 0.0
    return 100.0 * (assisted - control) / control


def compute_kpis(
    records: list[CallRecord],
    answer_logs: list[AnswerRecord],
    config: EngineConfig,
) -> MetricsReport:
    """Aggregate KPIs; comparison fields are None unless both cohorts exist."""
    if not records:
        raise MissingCohortError("no call records supplied")
    warnings: list[str] = []
    by_cohort: dict[str, list[CallRecord]] = {}
    for record in records:
        by_cohort.setdefault(record.cohort, []).append(record)

    cohort_sizes = {c: len(v) for c, v in sorted(by_cohort.items())}
    aht_s = {c: _mean([r.duration_s for r in v]) for c, v in sorted(by_cohort.items())}
    l2e_rate = {c: _rate([r.converted_enquiry for r in v]) for c, v in sorted(by_cohort.items())}
    booking_rate = {c: _rate([r.converted_booking for r in v]) for c, v in sorted(by_cohort.items())}

    routed = math.fsum(r.faq_hits + r.rag_calls for r in records)
    hits = math.fsum(r.faq_hits for r in records)
    faq_hit_rate = hits / routed if routed else 0.0

    savings = account_latency(answer_logs, config.seconds_saved_per_hit)

    aht_reduction_pct = None
    l2e_uplift_pct = None
    booking_uplift_pct = None
    if "assisted" in by_cohort and "control" in by_cohort:
        control_aht = aht_s["control"]
        aht_reduction_pct = 100.0 * (control_aht - aht_s["assisted"]) / control_aht
        l2e_uplift_pct = _uplift_pct(l2e_rate["assisted"], l2e_rate["control"], "l2e", warnings)
        booking_uplift_pct = _uplift_pct(
            booking_rate["assisted"], booking_rate["control"], "booking", warnings
        )

    versions = sorted({r.config_version for r in records if r.config_version})
    if len(versions) > 1:
        warnings.append(f"mixed config versions across records: {', '.join(versions)}")

    return MetricsReport(
        cohort_sizes=cohort_sizes,
        aht_s=aht_s,
        aht_reduction_pct=aht_reduction_pct,
        faq_hit_rate=faq_hit_rate,
        latency_saved_hours=savings.latency_saved_hours,
        l2e_rate=l2e_rate,
        booking_rate=booking_rate,
        l2e_uplift_pct=l2e_uplift_pct,
        booking_uplift_pct=booking_uplift_pct,
        warnings=warnings,
    )


# ── record loading ───────────────────────────────────────────────────────────


def load_call_records(root: str | Path) -> list[CallRecord]:
    records = []
    for path in sorted(Path(root).glob("*/call_record.json")):
        records.append(CallRecord.from_doc(canonical.loads(path.read_text(encoding="utf-8"))))
    return records


def load_answer_logs(root: str | Path) -> list[AnswerRecord]:
    answers = []
    for path in sorted(Path(root).glob("*/answers.ndjson")):
        for line in path.read_text(encoding="utf-8").splitlines():
            if line.strip():
                answers.append(AnswerRecord.from_doc(canonical.loads(line)))
    return answers


def ab_compare(
    cohort_a_dir: str | Path,
    cohort_b_dir: str | Path,
    config: EngineConfig,
) -> tuple[MetricsReport, str, list[tuple[str, str, float]]]:
    """Cohort A is the assisted arm, cohort B the control arm, by position.
    Returns (report, rendered table, plot rows as (metric, cohort, value))."""
    warnings: list[str] = []
    records: list[CallRecord] = []
    for directory, cohort in ((cohort_a_dir, "assisted"), (cohort_b_dir, "control")):
        loaded = load_call_records(directory)
        if not loaded:
            raise MissingCohortError(f"cohort {cohort!r} has no call records in {directory}")
        for record in loaded:
            if record.cohort != cohort:
                warnings.append(
                    f"record {record.session_id} labeled {record.cohort!r}, treated as {cohort!r}"
                )
            record.cohort = cohort
        records.extend(loaded)

    answers = load_answer_logs(cohort_a_dir) + load_answer_logs(cohort_b_dir)
    report = compute_kpis(records, answers, config)
    report.warnings = warnings + report.warnings
    return report, render_table(report), plot_rows(report)


def render_table(report: MetricsReport) -> str:
    def fmt(value: float | None, suffix: str = "") -> str:
        return "n/a" if value is None else f"{value:.2f}{suffix}"

    lines = [
        f"{'metric':<24}{'assisted':>12}{'control':>12}{'delta':>14}",
        "-" * 62,
    ]
    rows = [
        ("calls", "cohort_sizes", None, "d"),
        ("aht_s", "aht_s", report.aht_reduction_pct, "f"),
        ("l2e_rate", "l2e_rate", report.l2e_uplift_pct, "f"),
        ("booking_rate", "booking_rate", report.booking_uplift_pct, "f"),
    ]
    for name, attr, delta, kind in rows:
        values = getattr(report, attr)
        a = values.get("assisted")
        c = values.get("control")
        if kind == "d":
            a_text = "n/a" if a is None else str(a)
            c_text = "n/a" if c is None else str(c)
        else:
            a_text = "n/a" if a is None else f"{a:.3f}"
            c_text = "n/a" if c is None else f"{c:.3f}"
        delta_text = "" if delta is None else f"{delta:+.1f}%"
        lines.append(f"{name:<24}{a_text:>12}{c_text:>12}{delta_text:>14}")
    lines.append(f"{'faq_hit_rate':<24}{report.faq_hit_rate:>12.3f}")
    lines.append(f"{'latency_saved_hours':<24}{report.latency_saved_hours:>12.1f}")
    for warning in report.warnings:
        lines.append(f"warning: {warning}")
    return "\n".join(lines)


def plot_rows(report: MetricsReport) -> list[tuple[str, str, float]]:
    rows: list[tuple[str, str, float]] = []
    for metric, values in (
        ("aht_s", report.aht_s),
        ("l2e_rate", report.l2e_rate),
        ("booking_rate", report.booking_rate),
    ):
        for cohort, value in sorted(values.items()):
            rows.append((metric, cohort, value))
    rows.append(("faq_hit_rate", "all", report.faq_hit_rate))
    rows.append(("latency_saved_hours", "all", report.latency_saved_hours))
    return rows


def write_plot_data(rows: list[tuple[str, str, float]], path: str | Path) -> None:
    lines = ["metric,cohort,value"]
    lines.extend(f"{metric},{cohort},{value:.6f}" for metric, cohort, value in rows)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
