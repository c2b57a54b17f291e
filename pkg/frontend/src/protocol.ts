import type { ActionName, CommandPayload, Incoming, MapPayload, WireMessage } from "./types.js";

/** Parse one gateway text frame; null when it is not valid schema. */
export function parseWire(data: string): Incoming | null {
  let obj: unknown;
  try {
    obj = JSON.parse(data);
  } catch {
    return null;
  }
  if (typeof obj !== "object" || obj === null) {
    return null;
  }
  const rec = obj as Record<string, unknown>;
  if (typeof rec.error === "string") {
    return { error: rec.error };
  }
  if (
    typeof rec.topic === "string" &&
    typeof rec.seq === "number" &&
    typeof rec.payload === "object" &&
    rec.payload !== null
  ) {
    return { topic: rec.topic, seq: rec.seq, payload: rec.payload as Record<string, unknown> };
  }
  return null;
}

export function isError(msg: Incoming): msg is { error: string } {
  return "error" in msg;
}

export function encodePublish(topic: string, payload: unknown): string {
  return JSON.stringify({ topic, payload });
}

export function commandPayload(action: ActionName, steps = 1): CommandPayload {
  return { action, steps: action === "STOP" ? 0 : steps };
}

export function encodeCommand(action: ActionName, steps = 1): string {
  return encodePublish("/drive/cmd", commandPayload(action, steps));
}

export function encodeMapUpload(map: MapPayload): string {
  return encodePublish("/map", map);
}

export function encodePlanRun(): string {
  return encodePublish("/plan/run", {});
}

export function topicIs(msg: Incoming, topic: string): msg is WireMessage {
  return !isError(msg) && msg.topic === topic;
}
