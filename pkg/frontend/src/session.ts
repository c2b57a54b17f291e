import { encodePublish, parseWire } from "./protocol.js";
import type { Incoming } from "./types.js";

// Minimal browser-WebSocket-shaped surface so tests (and the node e2e
// runner) can inject their own socket implementation.
export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: (() => void) | null;
  onclose: (() => void) | null;
  onerror: (() => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export interface SessionHandlers {
  onMessage(msg: Incoming): void;
  onStatus(status: "connecting" | "connected" | "disconnected", detail?: string): void;
}

const BACKOFF_MS = [500, 1000, 2000, 4000, 5000];

/** Gateway connection with visible status and capped-backoff reconnect.
 * The server owns all state; on reconnect the gateway resends the /map and
 * /pose snapshots, which is what rebuilds the console. */
export class GatewaySession {
  private socket: SocketLike | null = null;
  private attempts = 0;
  private stopped = false;
  private timer: ReturnType<typeof setTimeout> | null = null;
  connected = false;

  constructor(
    private readonly url: string,
    private readonly handlers: SessionHandlers,
    private readonly factory: SocketFactory = (u) => new WebSocket(u) as unknown as SocketLike,
  ) {}

  start(): void {
    this.stopped = false;
    this.open();
  }

  stop(): void {
    this.stopped = true;
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    this.socket?.close();
    this.socket = null;
    this.connected = false;
  }

  /** Publish a payload on a topic; false when not connected. */
  publish(topic: string, payload: unknown): boolean {
    if (!this.connected || this.socket === null) {
      return false;
    }
    this.socket.send(encodePublish(topic, payload));
    return true;
  }

  private open(): void {
    this.handlers.onStatus("connecting");
    let socket: SocketLike;
    try {
      socket = this.factory(this.url);
    } catch {
      this.scheduleReconnect();
      return;
    }
    this.socket = socket;
    socket.onopen = () => {
      this.connected = true;
      this.attempts = 0;
      this.handlers.onStatus("connected");
    };
    socket.onmessage = (ev) => {
      const msg = parseWire(String(ev.data));
      if (msg !== null) {
        this.handlers.onMessage(msg);
      }
    };
    socket.onerror = () => {
      // onclose follows; status change happens there.
    };
    socket.onclose = () => {
      this.connected = false;
      if (!this.stopped) {
        this.scheduleReconnect();
      }
    };
  }

  private scheduleReconnect(): void {
    const wait = BACKOFF_MS[Math.min(this.attempts, BACKOFF_MS.length - 1)]!;
    this.attempts += 1;
    this.handlers.onStatus("disconnected", `retrying in ${wait / 1000}s`);
    this.timer = setTimeout(() => {
      this.timer = null;
      if (!this.stopped) {
        this.open();
      }
    }, wait);
  }
}
