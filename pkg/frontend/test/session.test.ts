import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { GatewaySession, type SocketLike } from "../src/session.js";
import type { Incoming } from "../src/types.js";

class FakeSocket implements SocketLike {
  sent: string[] = [];
  closed = false;
  onopen: (() => void) | null = null;
  onclose: (() => void) | null = null;
  onerror: (() => void) | null = null;
  onmessage: ((ev: { data: unknown }) => void) | null = null;

  send(data: string): void {
    this.sent.push(data);
  }

  close(): void {
    this.closed = true;
    this.onclose?.();
  }
}

describe("GatewaySession", () => {
  let sockets: FakeSocket[];
  let messages: Incoming[];
  let statuses: string[];
  let session: GatewaySession;

  beforeEach(() => {
    vi.useFakeTimers();
    sockets = [];
    messages = [];
    statuses = [];
    session = new GatewaySession(
      "ws://test",
      {
        onMessage: (m) => messages.push(m),
        onStatus: (s) => statuses.push(s),
      },
      () => {
        const s = new FakeSocket();
        sockets.push(s);
        return s;
      },
    );
  });

  afterEach(() => {
    vi.useRealTimers();
  });

  it("reports connected after the socket opens", () => {
    session.start();
    expect(statuses).toEqual(["connecting"]);
    sockets[0]!.onopen!();
    expect(statuses).toEqual(["connecting", "connected"]);
    expect(session.connected).toBe(true);
  });

  it("delivers parsed frames and drops junk silently", () => {
    session.start();
    sockets[0]!.onopen!();
    sockets[0]!.onmessage!({ data: '{"topic":"/pose","seq":1,"payload":{}}' });
    sockets[0]!.onmessage!({ data: "not json" });
    expect(messages).toHaveLength(1);
  });

  it("publish fails while disconnected and works when connected", () => {
    session.start();
    expect(session.publish("/plan/run", {})).toBe(false);
    sockets[0]!.onopen!();
    expect(session.publish("/plan/run", {})).toBe(true);
    expect(JSON.parse(sockets[0]!.sent[0]!)).toEqual({ topic: "/plan/run", payload: {} });
  });

  it("reconnects with growing backoff after drops", () => {
    session.start();
    sockets[0]!.onopen!();
    sockets[0]!.onclose!(); // dropped
    expect(statuses.at(-1)).toBe("disconnected");
    expect(sockets).toHaveLength(1);
    vi.advanceTimersByTime(500); // first backoff step
    expect(sockets).toHaveLength(2);
    sockets[1]!.onclose!(); // fails again
    vi.advanceTimersByTime(500);
    expect(sockets).toHaveLength(2); // second step is 1000 ms, not 500
    vi.advanceTimersByTime(500);
    expect(sockets).toHaveLength(3);
    sockets[2]!.onopen!();
    expect(statuses.at(-1)).toBe("connected");
  });

  it("stop() prevents further reconnects", () => {
    session.start();
    sockets[0]!.onopen!();
    session.stop();
    vi.advanceTimersByTime(10_000);
    expect(sockets).toHaveLength(1);
  });
});
