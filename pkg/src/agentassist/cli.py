"""Command-line entry points.

Verbs: replay, kpis, ab, mine, validate, apply, list, serve. Exit codes:
0 ok, 1 usage, 2 data error, 3 invariant violation.
"""

from __future__ import annotations

import argparse
import asyncio
import sys
from pathlib import Path

from . import canonical
from .config import load_config
from .errors import AgentAssistError, InvariantViolation
from .governance import (
    append_change_log,
    apply_lifecycle,
    load_faq_store,
    mine_candidates,
    save_faq_store,
    validate_candidate,
)
from .metrics import (
    ab_compare,
    compute_kpis,
    load_answer_logs,
    load_call_records,
    render_table,
    write_plot_data,
)
from .models import FaqCandidate, ValidationReport
from .service import serve
from .simulator import replay
from .stores import load_stores

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INVARIANT = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # map argparse's exit(2) onto exit code 1
        raise UsageError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="agentassist", description=__doc__)
    sub = parser.add_subparsers(dest="verb", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="engine config file")
        return p

    p = add("replay", "replay one conversation script through the pipeline")
    p.add_argument("--script", required=True)
    p.add_argument("--mode", choices=["in-process", "wire"], default="in-process")
    p.add_argument("--out", required=True, help="output root for journal/call record")

    p = add("kpis", "compute KPIs over a directory of replay outputs")
    p.add_argument("--records", required=True, help="replay output root")
    p.add_argument("--out", help="optional path for the report document")

    p = add("ab", "compare two cohorts of replay outputs")
    p.add_argument("--cohort-a", required=True, help="assisted-arm replay root")
    p.add_argument("--cohort-b", required=True, help="control-arm replay root")
    p.add_argument("--out", help="optional output directory for report + plot data")

    p = add("mine", "mine FAQ candidates from replay outputs")
    p.add_argument("--records", required=True, help="replay output root")
    p.add_argument("--min-support", type=int, default=None)
    p.add_argument("--out", required=True, help="candidates ndjson path")

    p = add("validate", "validate mined candidates")
    p.add_argument("--candidates", required=True)
    p.add_argument("--now-ms", type=int, default=0)
    p.add_argument("--out", required=True, help="validation reports ndjson path")

    p = add("apply", "apply validation reports to the FAQ store")
    p.add_argument("--reports", required=True)
    p.add_argument("--now-ms", type=int, default=0)

    p = add("list", "list FAQ store entries")
    p.add_argument("--status", choices=["candidate", "validated", "expired"])

    add("serve", "run the streaming assist service")
    return parser


def _load_ndjson(path: str, from_doc):
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            out.append(from_doc(canonical.loads(line)))
    return out


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        return _run(args)
    except InvariantViolation as exc:
        print(f"invariant violation: {exc.detail}", file=sys.stderr)
        return EXIT_INVARIANT
    except AgentAssistError as exc:
        print(f"error [{exc.code}]: {exc.detail}", file=sys.stderr)
        return EXIT_DATA
    except FileNotFoundError as exc:
        print(f"error [missing-file]: {exc}", file=sys.stderr)
        return EXIT_DATA


def _run(args: argparse.Namespace) -> int:
    config = load_config(args.config)

    if args.verb == "replay":
        stores = load_stores(config)
        result = replay(args.script, config, stores, mode=args.mode, out_dir=args.out)
        record = result.call_record
        print(
            f"replayed {result.session_id}: {len(result.journal)} journal entries, "
            f"duration {record.duration_s:.1f}s, faq_hits {record.faq_hits}, "
            f"rag_calls {record.rag_calls}, outcome {record.outcome}"
        )
        return EXIT_OK

    if args.verb == "kpis":
        records = load_call_records(args.records)
        answers = load_answer_logs(args.records)
        report = compute_kpis(records, answers, config)
        print(render_table(report))
        if args.out:
            Path(args.out).write_bytes(canonical.dump_line(report.to_doc()))
        return EXIT_OK

    if args.verb == "ab":
        report, table, rows = ab_compare(args.cohort_a, args.cohort_b, config)
        print(table)
        if args.out:
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            (out / "report.json").write_bytes(canonical.dump_line(report.to_doc()))
            (out / "report.txt").write_text(table + "\n", encoding="utf-8")
            write_plot_data(rows, out / "plot_data.csv")
        return EXIT_OK

    if args.verb == "mine":
        records = load_call_records(args.records)
        answers = load_answer_logs(args.records)
        min_support = args.min_support if args.min_support is not None else config.min_support
        candidates = mine_candidates(records, answers, min_support)
        Path(args.out).write_bytes(
            b"".join(canonical.dump_line(c.to_doc()) for c in candidates)
        )
        print(f"mined {len(candidates)} candidates (min_support={min_support})")
        return EXIT_OK

    if args.verb == "validate":
        stores = load_stores(config)
        candidates = _load_ndjson(args.candidates, FaqCandidate.from_doc)
        reports = [
            validate_candidate(c, stores.registry, stores.patterns, config, args.now_ms)
            for c in candidates
        ]
        Path(args.out).write_bytes(
            b"".join(canonical.dump_line(r.to_doc()) for r in reports)
        )
        accepted = sum(1 for r in reports if r.verdict == "accepted")
        print(f"validated {len(reports)} candidates: {accepted} accepted")
        return EXIT_OK

    if args.verb == "apply":
        reports = _load_ndjson(args.reports, ValidationReport.from_doc)
        store_path = config.path("faq_store")
        cache = load_faq_store(store_path)
        cache, changes = apply_lifecycle(cache, reports, args.now_ms, config.ttl_ms)
        save_faq_store(store_path, cache)
        append_change_log(store_path, changes)
        print(f"applied {len(changes)} changes to {store_path}")
        return EXIT_OK

    if args.verb == "list":
        cache = load_faq_store(config.path("faq_store"))
        for entry in cache:
            if args.status and entry.status != args.status:
                continue
            question = " ".join(entry.normalized_question)
            print(
                f"{entry.entry_id} v{entry.version} [{entry.status}] "
                f"({entry.kb_domain_tag}) hits={entry.hit_count} :: {question}"
            )
        return EXIT_OK

    if args.verb == "serve":
        stores = load_stores(config)
        journal_root = config.paths.get("journal_root")
        try:
            asyncio.run(serve(config, stores, journal_root))
        except KeyboardInterrupt:
            pass
        return EXIT_OK

    raise UsageError(f"unknown verb {args.verb!r}")


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
