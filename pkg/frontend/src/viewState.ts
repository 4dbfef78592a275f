/**
 * Console view state: a pure fold over assist messages in seq order.
 *
 * reduce(state, envelope) returns a new state and never mutates its input,
 * so replaying the same message sequence always reproduces the identical
 * view, and a reconnect that catches up from last_seen_seq lands in the same
 * state as a connection that never dropped.
 */

import type {
  AnswerPayload,
  EntityDoc,
  Envelope,
  FinalSummaryPayload,
  IntentDoc,
  QueryDoc,
  SentimentPayload,
  SummaryPayload,
  TranscriptPayload,
  WorkflowActionsPayload,
} from "./protocol.js";

export interface TranscriptLine {
  turn_index: number;
  speaker: string;
  display_text: string;
  is_final: boolean;
}

export interface ConsoleViewState {
  sessionId: string | null;
  lastSeenSeq: number;
  connection: "connected" | "disconnected";
  transcript: TranscriptLine[];
  captions: Record<string, string>;
  entities: EntityDoc[];
  intents: IntentDoc[];
  topIntent: string | null;
  workflows: Record<string, WorkflowActionsPayload>;
  workflowOrder: string[];
  suggestions: QueryDoc[];
  answers: Record<string, AnswerPayload>;
  answerOrder: string[];
  summaryBullets: string[];
  summaryAsOfTurn: number;
  sentiment: SentimentPayload[];
  finalSummary: FinalSummaryPayload | null;
  errors: { code: string; detail: string }[];
}

export function initialViewState(): ConsoleViewState {
  return {
    sessionId: null,
    lastSeenSeq: -1,
    connection: "disconnected",
    transcript: [],
    captions: {},
    entities: [],
    intents: [],
    topIntent: null,
    workflows: {},
    workflowOrder: [],
    suggestions: [],
    answers: {},
    answerOrder: [],
    summaryBullets: [],
    summaryAsOfTurn: -1,
    sentiment: [],
    finalSummary: null,
    errors: [],
  };
}

export function reduce(state: ConsoleViewState, envelope: Envelope): ConsoleViewState {
  // error frames are connection-scoped (seq -1) and do not advance the cursor
  if (envelope.type === "error") {
    return { ...state, errors: [...state.errors, envelope.payload] };
  }
  if (envelope.seq <= state.lastSeenSeq) {
    return state; // duplicate delivery during a reconnect overlap
  }
  const next: ConsoleViewState = {
    ...state,
    lastSeenSeq: envelope.seq,
    sessionId: state.sessionId ?? envelope.session_id,
  };
  switch (envelope.type) {
    case "transcript.event": {
      const p = envelope.payload as TranscriptPayload;
      if (p.is_final) {
        next.transcript = [
          ...state.transcript,
          {
            turn_index: p.turn_index,
            speaker: p.speaker,
            display_text: p.display_text,
            is_final: true,
          },
        ];
        next.captions = { ...state.captions };
        delete next.captions[p.speaker];
      } else {
        next.captions = { ...state.captions, [p.speaker]: p.display_text };
      }
      break;
    }
    case "state.entities":
      next.entities = envelope.payload.entities as EntityDoc[];
      break;
    case "state.intents":
      next.intents = envelope.payload.intents as IntentDoc[];
      next.topIntent = envelope.payload.top_intent as string | null;
      break;
    case "sentiment.update":
      next.sentiment = [...state.sentiment, envelope.payload as SentimentPayload];
      break;
    case "workflow.triggered":
      next.workflowOrder = [
        ...state.workflowOrder,
        ...envelope.payload.instances
          .map((i: { workflow_id: string }) => i.workflow_id)
          .filter((id: string) => !state.workflowOrder.includes(id)),
      ];
      break;
    case "workflow.actions": {
      const p = envelope.payload as WorkflowActionsPayload;
      next.workflows = { ...state.workflows, [p.workflow_id]: p };
      if (!next.workflowOrder.includes(p.workflow_id)) {
        next.workflowOrder = [...next.workflowOrder, p.workflow_id];
      }
      break;
    }
    case "query.suggested":
      next.suggestions = [...state.suggestions, ...(envelope.payload.queries as QueryDoc[])];
      break;
    case "answer.delivered": {
      const p = envelope.payload as AnswerPayload;
      next.answers = { ...state.answers, [p.query_id]: p };
      next.answerOrder = state.answerOrder.includes(p.query_id)
        ? state.answerOrder
        : [...state.answerOrder, p.query_id];
      break;
    }
    case "summary.partial": {
      const p = envelope.payload as SummaryPayload;
      next.summaryBullets = p.bullets;
      next.summaryAsOfTurn = p.as_of_turn;
      break;
    }
    case "call.final_summary":
      next.finalSummary = envelope.payload as FinalSummaryPayload;
      break;
    default:
      break; // unknown message types are ignored, never fatal
  }
  return next;
}

export function reduceAll(state: ConsoleViewState, envelopes: Envelope[]): ConsoleViewState {
  return envelopes.reduce(reduce, state);
}
