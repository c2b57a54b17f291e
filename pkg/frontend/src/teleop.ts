import type { ActionName, CommandPayload } from "./types.js";
import { commandPayload } from "./protocol.js";

export const KEY_ACTIONS: Record<string, ActionName> = {
  ArrowUp: "FORWARD",
  ArrowDown: "BACK",
  ArrowLeft: "LEFT",
  ArrowRight: "RIGHT",
  " ": "STOP",
};

export type GateResult =
  | { kind: "send"; payload: CommandPayload }
  | { kind: "blocked" } // command pending, input locked
  | { kind: "ignored" }; // key not mapped

/** Ack-gating for human input: at most one unacked command outstanding.
 * STOP is the one bypass and is always dispatched immediately. */
export class TeleopGate {
  pending = false;

  onKey(key: string): GateResult {
    const action = KEY_ACTIONS[key];
    if (action === undefined) {
      return { kind: "ignored" };
    }
    if (action === "STOP") {
      this.pending = true;
      return { kind: "send", payload: commandPayload("STOP") };
    }
    if (this.pending) {
      return { kind: "blocked" };
    }
    this.pending = true;
    return { kind: "send", payload: commandPayload(action) };
  }

  onAck(): void {
    this.pending = false;
  }

  reset(): void {
    this.pending = false;
  }
}
