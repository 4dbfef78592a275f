/**
 * Panel rendering: view state to terminal text.
 *
 * Pure string building from the view state; ANSI colors optional so tests
 * can assert on plain text. Route badges follow the desk convention:
 * FAQ answers green with sub-second latency, RAG answers amber.
 */

import type { ConsoleViewState } from "./viewState.js";

const GREEN = "\x1b[32m";
const AMBER = "\x1b[33m";
const RED = "\x1b[31m";
const DIM = "\x1b[2m";
const RESET = "\x1b[0m";

export interface RenderOptions {
  color?: boolean;
  width?: number;
}

function paint(text: string, code: string, color: boolean): string {
  return color ? `${code}${text}${RESET}` : text;
}

export function routeBadge(route: "faq" | "rag", latencyMs: number, color = false): string {
  const seconds = (latencyMs / 1000).toFixed(1);
  const label = `${route.toUpperCase()} · ${seconds}s`;
  return paint(label, route === "faq" ? GREEN : AMBER, color);
}

export function sparkline(values: number[]): string {
  // polarity in [-1, 1] mapped onto eight block heights
  const blocks = "▁▂▃▄▅▆▇█";
  return values
    .map((v) => blocks[Math.min(7, Math.max(0, Math.round(((v + 1) / 2) * 7)))])
    .join("");
}

export function csatDial(likelihood: number): string {
  const filled = Math.round(likelihood * 10);
  return `[${"#".repeat(filled)}${".".repeat(10 - filled)}] ${(likelihood * 100).toFixed(0)}%`;
}

export function npsChip(band: string, color = false): string {
  const code = band === "promoter" ? GREEN : band === "detractor" ? RED : AMBER;
  return paint(` ${band.toUpperCase()} `, code, color);
}

function header(title: string, width: number): string {
  return `── ${title} ${"─".repeat(Math.max(0, width - title.length - 4))}`;
}

export function renderTranscript(state: ConsoleViewState, opts: RenderOptions = {}): string {
  const lines = state.transcript.map(
    (t) => `${String(t.turn_index).padStart(3)} ${t.speaker === "customer" ? "CUST" : "AGNT"} ${t.display_text}`
  );
  for (const [speaker, caption] of Object.entries(state.captions)) {
    lines.push(paint(`    ${speaker} … ${caption}`, DIM, opts.color ?? false));
  }
  return lines.join("\n");
}

export function renderEntities(state: ConsoleViewState): string {
  if (state.entities.length === 0) return "(none)";
  return state.entities.map((e) => `${e.kind}: ${e.value} (turn ${e.turn_index})`).join("\n");
}

export function renderIntents(state: ConsoleViewState): string {
  if (state.intents.length === 0) return "(none)";
  return state.intents
    .map((i) => {
      const bar = "#".repeat(Math.round(i.confidence * 20)).padEnd(20, ".");
      const flag = i.triggered ? ` triggered@${i.triggered_at_turn}` : "";
      const top = i.label === state.topIntent ? " *" : "";
      return `${i.label.padEnd(20)} ${bar} ${i.confidence.toFixed(2)}${flag}${top}`;
    })
    .join("\n");
}

export function renderWorkflows(state: ConsoleViewState): string {
  if (state.workflowOrder.length === 0) return "(none)";
  const parts: string[] = [];
  for (const id of state.workflowOrder) {
    const wf = state.workflows[id];
    if (!wf) continue;
    parts.push(`${wf.title} [${wf.status}${wf.outcome ? `: ${wf.outcome}` : ""}]`);
    wf.actions.forEach((a, i) => {
      const marker = i === 0 ? "→" : " ";
      const ready = a.ready ? "" : " (waiting on details)";
      parts.push(`  ${marker} ${a.step_id}: ${a.instruction}${ready}`);
    });
  }
  return parts.join("\n");
}

export function renderSuggestions(state: ConsoleViewState, opts: RenderOptions = {}): string {
  if (state.suggestions.length === 0) return "(none yet)";
  return state.suggestions
    .map((q, i) => {
      const answer = state.answers[q.query_id];
      const badge = answer ? `  ${routeBadge(answer.route, answer.simulated_latency_ms, opts.color)}` : "";
      return `[${i + 1}] ${q.text}${badge}`;
    })
    .join("\n");
}

export function renderAnswerPanel(state: ConsoleViewState, opts: RenderOptions = {}): string {
  if (state.answerOrder.length === 0) return "(no answers delivered)";
  return state.answerOrder
    .map((qid) => {
      const a = state.answers[qid];
      const badge = routeBadge(a.route, a.simulated_latency_ms, opts.color);
      const source =
        a.route === "faq"
          ? `cache entry ${a.matched_entry_id}`
          : a.passages.length
            ? `passages: ${a.passages.map((p) => p[0]).join(", ")}`
            : "no passages";
      return `${badge}  ${a.query_text}\n  ${a.answer_text}\n  ${source}`;
    })
    .join("\n\n");
}

export function renderSummary(state: ConsoleViewState): string {
  if (state.summaryBullets.length === 0) return "(empty)";
  const bullets = state.summaryBullets.map((b) => `• ${b}`).join("\n");
  return `${bullets}\n(as of turn ${state.summaryAsOfTurn})`;
}

export function renderSentiment(state: ConsoleViewState, opts: RenderOptions = {}): string {
  if (state.sentiment.length === 0) return "(no samples)";
  const last = state.sentiment[state.sentiment.length - 1];
  const spark = sparkline(state.sentiment.map((s) => s.polarity));
  return [
    `polarity  ${spark}  last ${last.polarity >= 0 ? "+" : ""}${last.polarity.toFixed(2)}`,
    `CSAT      ${csatDial(last.csat_likelihood)}`,
    `NPS       ${npsChip(last.nps_band, opts.color)}`,
  ].join("\n");
}

export function renderFinalSummary(state: ConsoleViewState): string {
  if (!state.finalSummary) return "";
  const record = state.finalSummary.record;
  const spark = sparkline(record.sentiment_trajectory.map(([, p]) => p));
  return [
    "════ CALL COMPLETE ════",
    state.finalSummary.text,
    `Sentiment trajectory: ${spark}`,
    `Redactions applied: ${record.redaction_count}`,
  ].join("\n");
}

export function renderDashboard(state: ConsoleViewState, opts: RenderOptions = {}): string {
  const width = opts.width ?? 78;
  const status = state.connection === "connected" ? "●" : "○";
  const parts = [
    `${status} session ${state.sessionId ?? "-"} · seq ${state.lastSeenSeq}`,
    header("TRANSCRIPT", width),
    renderTranscript(state, opts),
    header("ENTITIES", width),
    renderEntities(state),
    header("INTENTS", width),
    renderIntents(state),
    header("WORKFLOW · NEXT-BEST ACTIONS", width),
    renderWorkflows(state),
    header("SUGGESTED QUERIES (click by number)", width),
    renderSuggestions(state, opts),
    header("ANSWERS", width),
    renderAnswerPanel(state, opts),
    header("PARTIAL SUMMARY", width),
    renderSummary(state),
    header("SENTIMENT / CSAT / NPS", width),
    renderSentiment(state, opts),
  ];
  if (state.errors.length > 0) {
    parts.push(header("ERRORS", width));
    parts.push(state.errors.map((e) => `! ${e.code}: ${e.detail}`).join("\n"));
  }
  if (state.finalSummary) {
    parts.push(renderFinalSummary(state));
  }
  return parts.join("\n");
}
