/**
 * Interactive terminal console.
 *
 * Usage: node dist/main.js --addr 127.0.0.1:7070 --session <session_id>
 *
 * Commands while running:
 *   click <n>               click suggested query number n
 *   step                    complete the current step of the first workflow
 *   step <wf> <step_id>     complete a specific step
 *   end                     end the call
 *   quit                    leave (the call keeps running)
 */

import readline from "node:readline";

import { ConsoleClient } from "./client.js";
import { renderDashboard } from "./render.js";
import { initialViewState, reduce, type ConsoleViewState } from "./viewState.js";

function parseArgs(argv: string[]): { host: string; port: number; session: string } {
  let addr = "127.0.0.1:7070";
  let session = "";
  for (let i = 0; i < argv.length; i++) {
    if (argv[i] === "--addr") addr = argv[++i];
    else if (argv[i] === "--session") session = argv[++i];
  }
  if (!session) {
    console.error("usage: main.js --addr host:port --session <session_id>");
    process.exit(1);
  }
  const [host, port] = addr.split(":");
  return { host: host || "127.0.0.1", port: Number(port), session };
}

async function main(): Promise<void> {
  const { host, port, session } = parseArgs(process.argv.slice(2));
  let state: ConsoleViewState = { ...initialViewState(), connection: "connected" };
  const client = new ConsoleClient({ host, port, sessionId: session });

  const repaint = () => {
    process.stdout.write("\x1b[2J\x1b[H"); // clear + home
    process.stdout.write(renderDashboard(state, { color: true }) + "\n> ");
  };

  client.on("frame", (frame) => {
    state = reduce(state, frame);
    repaint();
  });
  client.on("disconnect", () => {
    state = { ...state, connection: "disconnected" };
    repaint();
  });
  client.on("blocked", () => {
    process.stdout.write("\n(disconnected: action not sent)\n> ");
  });

  await client.connect();
  repaint();

  const rl = readline.createInterface({ input: process.stdin });
  const now = () => Date.now();
  rl.on("line", (line) => {
    const [cmd, ...rest] = line.trim().split(/\s+/);
    if (cmd === "click") {
      const idx = Number(rest[0]) - 1;
      const query = state.suggestions[idx];
      if (query) client.sendAction({ action: "click_query", query_id: query.query_id, t_ms: now() });
    } else if (cmd === "step") {
      let workflowId = rest[0];
      let stepId = rest[1];
      if (!workflowId) {
        const first = state.workflowOrder
          .map((id) => state.workflows[id])
          .find((wf) => wf && wf.status === "active" && wf.actions.length > 0);
        if (!first) return;
        workflowId = first.workflow_id;
        stepId = first.actions[0].step_id;
      }
      client.sendAction({ action: "complete_step", workflow_id: workflowId, step_id: stepId, t_ms: now() });
    } else if (cmd === "end") {
      client.sendAction({ action: "end_call", t_ms: now() });
    } else if (cmd === "quit") {
      client.close();
      rl.close();
      process.exit(0);
    }
  });
}

main().catch((err) => {
  console.error(err instanceof Error ? err.message : err);
  process.exit(1);
});
