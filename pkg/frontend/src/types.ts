// Payload shapes of the gateway JSON schema (one message per text frame,
// same bodies as the serial frames minus the CRC).

export type ActionName = "FORWARD" | "BACK" | "LEFT" | "RIGHT" | "STOP";

export interface MapPayload {
  grid: string[]; // rows of '.' and '#'
  start: [number, number]; // [row, col]
  goal: [number, number];
}

export interface PosePayload {
  x_in: number;
  y_in: number;
  theta_rad: number;
  cell: [number, number];
}

export interface AckPayload {
  pulse_error_l: number;
  pulse_error_r: number;
  ticks: number;
  ok: boolean;
}

export interface CommandPayload {
  action: ActionName;
  steps: number;
}

export interface PlanResultPayload {
  found: boolean;
  cost: number;
  path: [number, number][];
}

export interface WireMessage {
  topic: string;
  seq: number;
  payload: Record<string, unknown>;
}

export interface ErrorReply {
  error: string;
}

export type Incoming = WireMessage | ErrorReply;

// One wheel revolution moves one grid step of 8 inches.
export const STEP_LEN_IN = 8.0;
