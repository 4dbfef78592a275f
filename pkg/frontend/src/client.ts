/**
 * Connection handling: persistent TCP stream of newline-delimited frames.
 *
 * A console client subscribes with role=console and last_seen_seq; the
 * service replays missed messages from the journal before live delivery, so
 * a reconnect reproduces the identical view. Clicks are debounced per
 * query_id, and actions attempted while disconnected are reported instead
 * of silently dropped.
 */

import net from "node:net";
import { EventEmitter } from "node:events";

import { encodeFrame, FrameDecoder, type AgentAction, type Envelope } from "./protocol.js";

export interface ConsoleClientOptions {
  host: string;
  port: number;
  sessionId: string;
  role?: "console" | "driver";
  lastSeenSeq?: number;
  startedAtMs?: number;
}

export class ConsoleClient extends EventEmitter {
  private socket: net.Socket | null = null;
  private decoder = new FrameDecoder();
  private clicked = new Set<string>();
  readonly options: ConsoleClientOptions;
  connected = false;

  constructor(options: ConsoleClientOptions) {
    super();
    this.options = { role: "console", lastSeenSeq: -1, ...options };
  }

  connect(): Promise<void> {
    return new Promise((resolve, reject) => {
      const socket = net.createConnection(
        { host: this.options.host, port: this.options.port },
        () => {
          this.connected = true;
          const hello: Record<string, unknown> = {
            type: "hello",
            role: this.options.role,
            session_id: this.options.sessionId,
            last_seen_seq: this.options.lastSeenSeq,
          };
          if (this.options.role === "driver") {
            hello.started_at_ms = this.options.startedAtMs ?? 0;
          }
          socket.write(encodeFrame(hello));
          resolve();
        }
      );
      socket.on("data", (chunk) => {
        for (const frame of this.decoder.push(chunk)) {
          this.emit("frame", frame);
        }
      });
      socket.on("error", (err) => {
        if (!this.connected) reject(err);
        this.emit("disconnect", err);
      });
      socket.on("close", () => {
        this.connected = false;
        this.emit("disconnect");
      });
      this.socket = socket;
    });
  }

  /** Send one agent action; returns false (and emits "blocked") when the
   * connection is down or the query was already clicked. */
  sendAction(action: AgentAction): boolean {
    if (action.action === "click_query") {
      if (this.clicked.has(action.query_id)) {
        return false; // debounce: one frame per suggestion
      }
      this.clicked.add(action.query_id);
    }
    if (!this.connected || !this.socket) {
      this.emit("blocked", action);
      if (action.action === "click_query") this.clicked.delete(action.query_id);
      return false;
    }
    this.socket.write(
      encodeFrame({
        type: "agent.action",
        session_id: this.options.sessionId,
        t_ms: action.t_ms,
        payload: action,
      })
    );
    return true;
  }

  /** Driver-role helper: feed one transcript event record. */
  sendEvent(record: Record<string, unknown>): boolean {
    if (!this.connected || !this.socket) return false;
    this.socket.write(
      encodeFrame({
        type: "transcript.event",
        session_id: this.options.sessionId,
        t_ms: record.t_end_ms,
        payload: record,
      })
    );
    return true;
  }

  waitFor(predicate: (frame: Envelope) => boolean, timeoutMs = 10_000): Promise<Envelope> {
    return new Promise((resolve, reject) => {
      const timer = setTimeout(() => {
        this.off("frame", onFrame);
        reject(new Error("timed out waiting for frame"));
      }, timeoutMs);
      const onFrame = (frame: Envelope) => {
        if (predicate(frame)) {
          clearTimeout(timer);
          this.off("frame", onFrame);
          resolve(frame);
        }
      };
      this.on("frame", onFrame);
    });
  }

  close(): void {
    this.socket?.end();
    this.socket?.destroy();
    this.connected = false;
  }
}
