/**
 * End-to-end round trip against the real engine service.
 *
 * Spawns the Python service on a loopback port, drives the travel-plan
 * fixture as the event source, and checks that what the console renders is
 * exactly what the journal says was delivered.
 */

import { spawn, type ChildProcess } from "node:child_process";
import fs from "node:fs";
import os from "node:os";
import path from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ConsoleClient } from "../src/client.js";
import type { AnswerPayload, Envelope } from "../src/protocol.js";
import { renderAnswerPanel, renderDashboard, renderFinalSummary, routeBadge } from "../src/render.js";
import { initialViewState, reduce, type ConsoleViewState } from "../src/viewState.js";

const HERE = path.dirname(fileURLToPath(import.meta.url));
const REPO = path.resolve(HERE, "..", "..");
const FIXTURES = path.join(REPO, "fixtures");
const SESSION = "travel-demo";

let service: ChildProcess;
let port: number;
let tmpDir: string;
let journalRoot: string;

function writeTempConfig(dir: string): string {
  const base = JSON.parse(fs.readFileSync(path.join(FIXTURES, "config", "engine.json"), "utf-8"));
  for (const [key, rel] of Object.entries(base.paths as Record<string, string>)) {
    base.paths[key] = path.resolve(FIXTURES, "config", rel);
  }
  base.paths.journal_root = path.join(dir, "journals");
  const configPath = path.join(dir, "engine.json");
  fs.writeFileSync(configPath, JSON.stringify(base));
  return configPath;
}

function scriptEvents(): Record<string, unknown>[] {
  const lines = fs.readFileSync(path.join(FIXTURES, "scripts", "travel_plan.ndjson"), "utf-8");
  return lines
    .split("\n")
    .filter((l) => l.trim())
    .map((l) => JSON.parse(l))
    .filter((r) => "speaker" in r);
}

function readJournal(): Envelope[] {
  const journalPath = path.join(journalRoot, SESSION, "journal.ndjson");
  return fs
    .readFileSync(journalPath, "utf-8")
    .split("\n")
    .filter((l) => l.trim())
    .map((l) => JSON.parse(l));
}

beforeAll(async () => {
  tmpDir = fs.mkdtempSync(path.join(os.tmpdir(), "console-e2e-"));
  journalRoot = path.join(tmpDir, "journals");
  const configPath = writeTempConfig(tmpDir);
  service = spawn("python3", ["-m", "agentassist.cli", "serve", "--config", configPath], {
    cwd: REPO,
    env: { ...process.env, AGENT_ASSIST_ADDR: "127.0.0.1:0", PYTHONPATH: path.join(REPO, "src") },
  });
  port = await new Promise<number>((resolve, reject) => {
    const timer = setTimeout(() => reject(new Error("service did not start")), 20_000);
    let buffer = "";
    service.stdout!.on("data", (chunk) => {
      buffer += chunk.toString();
      const match = buffer.match(/agent-assist service on [\d.]+:(\d+)/);
      if (match) {
        clearTimeout(timer);
        resolve(Number(match[1]));
      }
    });
    service.stderr!.on("data", (chunk) => process.stderr.write(chunk));
    service.on("exit", (code) => reject(new Error(`service exited early (${code})`)));
  });
});

afterAll(() => {
  service?.kill();
  fs.rmSync(tmpDir, { recursive: true, force: true });
});

describe("console round trip", () => {
  it("renders clicked answers and the final summary straight from the journal", async () => {
    const driver = new ConsoleClient({
      host: "127.0.0.1", port, sessionId: SESSION, role: "driver", startedAtMs: 0,
    });
    await driver.connect();

    const console_ = new ConsoleClient({ host: "127.0.0.1", port, sessionId: SESSION });
    let view: ConsoleViewState = { ...initialViewState(), connection: "connected" };
    console_.on("frame", (frame) => {
      view = reduce(view, frame);
    });
    await console_.connect();

    const events = scriptEvents();
    for (const record of events.slice(0, 4)) driver.sendEvent(record); // through the trigger turn
    const suggested = await console_.waitFor((f) => f.type === "query.suggested");
    const query = (suggested.payload.queries as { query_id: string; text: string }[]).find(
      (q) => q.text === "Which travel offers are available?"
    );
    expect(query).toBeDefined();

    // exactly one action frame per suggestion, even on a double click
    expect(console_.sendAction({ action: "click_query", query_id: query!.query_id, t_ms: 26_000 })).toBe(true);
    expect(console_.sendAction({ action: "click_query", query_id: query!.query_id, t_ms: 26_001 })).toBe(false);

    const delivered = await console_.waitFor((f) => f.type === "answer.delivered");
    const payload = delivered.payload as AnswerPayload;

    for (const record of events.slice(4)) driver.sendEvent(record);
    for (const stepId of ["confirm_identity", "present_offers"]) {
      console_.sendAction({ action: "complete_step", workflow_id: "activate_travel_plan", step_id: stepId, t_ms: 40_000 });
      await console_.waitFor(
        (f) => f.type === "workflow.actions" && f.payload.actions[0]?.step_id !== stepId
      );
    }
    console_.sendAction({
      action: "complete_step", workflow_id: "activate_travel_plan",
      step_id: "activate_plan", outcome: "converted", t_ms: 50_000,
    });
    console_.sendAction({ action: "end_call", t_ms: 52_000 });
    await console_.waitFor((f) => f.type === "call.final_summary");

    // the answer panel shows the journaled payload verbatim
    const journal = readJournal();
    const journaledAnswer = journal.find(
      (e: any) => e.kind === "assist-output" && e.payload.type === "answer.delivered"
    ) as any;
    expect(journaledAnswer).toBeDefined();
    const journaledPayload = journaledAnswer.payload.payload as AnswerPayload;
    expect(payload).toEqual(journaledPayload);
    expect(view.answers[query!.query_id]).toEqual(journaledPayload);

    const panel = renderAnswerPanel(view);
    expect(panel).toContain(journaledPayload.answer_text);
    expect(panel).toContain(routeBadge(journaledPayload.route, journaledPayload.simulated_latency_ms));
    expect(journaledPayload.route).toBe("faq");
    expect(journaledPayload.simulated_latency_ms).toBeLessThan(500);

    // final summary renders with placeholders and zero raw identifiers
    const journaledFinal = journal.find(
      (e: any) => e.kind === "assist-output" && e.payload.type === "call.final_summary"
    ) as any;
    const finalView = renderFinalSummary(view);
    expect(view.finalSummary?.text).toBe(journaledFinal.payload.payload.text);
    expect(finalView).toContain("[ACCOUNT]");
    expect(finalView).toContain("[NAME]");
    expect(finalView).not.toContain("AC-448812");
    expect(finalView).not.toContain("Jane");

    // a fresh console catching up from seq -1 renders the identical dashboard
    const late = new ConsoleClient({ host: "127.0.0.1", port, sessionId: SESSION });
    let lateView: ConsoleViewState = { ...initialViewState(), connection: "connected" };
    late.on("frame", (frame) => {
      lateView = reduce(lateView, frame);
    });
    await late.connect();
    await late.waitFor((f) => f.type === "call.final_summary");
    expect(renderDashboard(lateView)).toBe(renderDashboard(view));

    late.close();
    console_.close();
    driver.close();
  });

  it("surfaces service error frames for unknown sessions", async () => {
    const ghost = new ConsoleClient({ host: "127.0.0.1", port, sessionId: "ghost" });
    let view = initialViewState();
    ghost.on("frame", (frame) => {
      view = reduce(view, frame);
    });
    await ghost.connect();
    await ghost.waitFor((f) => f.type === "error");
    expect(view.errors[0].code).toBe("unknown-session");
    ghost.close();
  });

  it("reports blocked actions instead of dropping them silently", async () => {
    const offline = new ConsoleClient({ host: "127.0.0.1", port: port, sessionId: SESSION });
    // never connected: the action must be refused loudly, not swallowed
    let blocked = 0;
    offline.on("blocked", () => blocked++);
    const sent = offline.sendAction({ action: "end_call", t_ms: 0 });
    expect(sent).toBe(false);
    expect(blocked).toBe(1);
  });
});
