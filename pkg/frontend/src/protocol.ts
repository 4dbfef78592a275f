/**
 * Wire protocol types and newline-delimited framing.
 *
 * Every frame is one JSON object per line. Outbound assist messages carry an
 * envelope {type, session_id, seq, t_ms, payload}; error frames use seq -1.
 * The console sends a hello frame to subscribe and agent.action frames to
 * act. All displayed values originate verbatim from these payloads: the
 * console computes no domain logic of its own.
 */

export interface Envelope {
  type: string;
  session_id: string;
  seq: number;
  t_ms: number;
  payload: any;
}

export interface TranscriptPayload {
  session_id: string;
  turn_index: number;
  speaker: "customer" | "agent";
  raw_text: string;
  lang: string;
  t_start_ms: number;
  t_end_ms: number;
  is_final: boolean;
  display_text: string;
}

export interface EntityDoc {
  kind: string;
  value: string;
  turn_index: number;
  span: [number, number];
}

export interface IntentDoc {
  label: string;
  confidence: number;
  triggered: boolean;
  triggered_at_turn: number | null;
}

export interface SentimentPayload {
  turn_index: number;
  polarity: number;
  csat_likelihood: number;
  nps_band: "detractor" | "passive" | "promoter";
  mean_polarity: number;
}

export interface WorkflowActionsPayload {
  workflow_id: string;
  title: string;
  status: string;
  outcome: string | null;
  actions: { step_id: string; instruction: string; ready: boolean }[];
}

export interface QueryDoc {
  query_id: string;
  text: string;
  intent_label: string;
  kb_domain_tag: string;
  source_turn: number;
}

export interface AnswerPayload {
  query_id: string;
  query_text: string;
  route: "faq" | "rag";
  answer_text: string;
  matched_entry_id: string | null;
  similarity: number | null;
  passages: [string, number][];
  simulated_latency_ms: number;
  llm_calls_avoided: number;
}

export interface SummaryPayload {
  as_of_turn: number;
  bullets: string[];
}

export interface FinalSummaryPayload {
  record: {
    session_id: string;
    primary_intent: string;
    resolution_path: string[];
    agent_actions: string[];
    sentiment_trajectory: [number, number][];
    outcome: string;
    redacted_text: string;
    redaction_count: number;
  };
  text: string;
}

export type AgentAction =
  | { action: "click_query"; query_id: string; t_ms: number }
  | { action: "complete_step"; workflow_id: string; step_id: string; outcome?: string; t_ms: number }
  | { action: "end_call"; t_ms: number };

export function encodeFrame(frame: object): string {
  return JSON.stringify(frame) + "\n";
}

/** Incremental newline framing: feed chunks, get complete frames. */
export class FrameDecoder {
  private buffer = "";

  push(chunk: string | Buffer): Envelope[] {
    this.buffer += chunk.toString("utf-8");
    const frames: Envelope[] = [];
    let idx: number;
    while ((idx = this.buffer.indexOf("\n")) >= 0) {
      const line = this.buffer.slice(0, idx);
      this.buffer = this.buffer.slice(idx + 1);
      if (line.trim().length === 0) continue;
      frames.push(JSON.parse(line) as Envelope);
    }
    return frames;
  }
}
