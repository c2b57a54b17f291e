import { isError } from "./protocol.js";
import type {
  AckPayload,
  Incoming,
  MapPayload,
  PlanResultPayload,
  PosePayload,
} from "./types.js";
import { STEP_LEN_IN } from "./types.js";

export type Mode = "TELEOP" | "EDIT" | "AUTOPLAN";
export type Connection = "connecting" | "connected" | "disconnected";

export interface ConsoleState {
  connection: Connection;
  mode: Mode;
  map: MapPayload | null;
  pose: PosePayload | null;
  lastAck: AckPayload | null;
  plan: PlanResultPayload | null;
  running: boolean; // an autoplan episode is executing
  pending: boolean; // one unacked teleop command outstanding
  notice: string | null;
}

export function initialState(): ConsoleState {
  return {
    connection: "connecting",
    mode: "TELEOP",
    map: null,
    pose: null,
    lastAck: null,
    plan: null,
    running: false,
    pending: false,
    notice: null,
  };
}

/** Nearest cell center for a pose (inverse of the cell-to-world transform). */
export function cellFromPose(pose: PosePayload, stepLen: number = STEP_LEN_IN): [number, number] {
  return [Math.round(pose.y_in / stepLen), Math.round(pose.x_in / stepLen)];
}

/** Every rendered value originates from a received message: this reducer is
 * the only way server state enters the console. */
export function applyMessage(state: ConsoleState, msg: Incoming): ConsoleState {
  if (isError(msg)) {
    return { ...state, notice: msg.error };
  }
  switch (msg.topic) {
    case "/map": {
      const map = msg.payload as unknown as MapPayload;
      // A new map invalidates any previous plan overlay.
      return { ...state, map, plan: null };
    }
    case "/pose":
      return { ...state, pose: msg.payload as unknown as PosePayload };
    case "/drive/ack": {
      const ack = msg.payload as unknown as AckPayload;
      return { ...state, lastAck: ack, pending: false };
    }
    case "/plan/result": {
      const plan = msg.payload as unknown as PlanResultPayload;
      if (!plan.found) {
        return { ...state, plan, running: false, notice: "no path", mode: "EDIT" };
      }
      return { ...state, plan, running: true, mode: "AUTOPLAN", notice: null };
    }
    default:
      return state;
  }
}

/** True when the live pose sits on the goal cell of the current map. */
export function atGoal(state: ConsoleState): boolean {
  if (!state.map || !state.pose) {
    return false;
  }
  const [r, c] = cellFromPose(state.pose);
  return r === state.map.goal[0] && c === state.map.goal[1];
}
