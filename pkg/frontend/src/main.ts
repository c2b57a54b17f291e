import { moveGoal, moveStart, toggleObstacle } from "./editor.js";
import { applyMessage, atGoal, initialState, type ConsoleState, type Mode } from "./model.js";
import { isError } from "./protocol.js";
import { cellAt, render } from "./render.js";
import { GatewaySession } from "./session.js";
import { TeleopGate } from "./teleop.js";
import type { MapPayload } from "./types.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

const canvas = el<HTMLCanvasElement>("grid");
const statusEl = el<HTMLSpanElement>("status");
const ackEl = el<HTMLSpanElement>("ack");
const noticeEl = el<HTMLSpanElement>("notice");
const latencyEl = el<HTMLSpanElement>("latency");
const btnTeleop = el<HTMLButtonElement>("mode-teleop");
const btnEdit = el<HTMLButtonElement>("mode-edit");
const btnPlan = el<HTMLButtonElement>("plan-run");

let state: ConsoleState = initialState();
const gate = new TeleopGate();
let cmdSentAt = 0;
let dragging: "start" | "goal" | "paint" | null = null;

const gatewayUrl =
  new URLSearchParams(location.search).get("gateway") ?? `ws://${location.hostname}:8400`;

const session = new GatewaySession(gatewayUrl, {
  onMessage(msg) {
    state = applyMessage(state, msg);
    if (!isError(msg) && msg.topic === "/drive/ack") {
      gate.onAck();
      latencyEl.textContent = cmdSentAt > 0 ? `${(performance.now() - cmdSentAt).toFixed(0)} ms` : "";
    }
    if (!isError(msg) && msg.topic === "/drive/ack" && state.running && atGoal(state)) {
      state = { ...state, running: false, notice: "episode complete" };
    }
    refresh();
  },
  onStatus(status, detail) {
    state = { ...state, connection: status };
    statusEl.textContent = detail ? `${status} (${detail})` : status;
    statusEl.className = status;
    if (status !== "connected") {
      gate.reset();
      state = { ...state, pending: false };
    }
    refresh();
  },
});

function refresh(): void {
  render(state, canvas);
  ackEl.textContent = state.lastAck
    ? `dL ${state.lastAck.pulse_error_l}  dR ${state.lastAck.pulse_error_r}  ticks ${state.lastAck.ticks}`
    : "";
  noticeEl.textContent = state.notice ?? "";
  btnTeleop.disabled = state.mode === "TELEOP";
  btnEdit.disabled = state.mode === "EDIT" || state.running;
  btnPlan.disabled = state.map === null || state.running;
  document.body.dataset.mode = state.mode;
}

function setMode(mode: Mode): void {
  state = { ...state, mode, notice: null };
  refresh();
}

btnTeleop.onclick = () => setMode("TELEOP");
btnEdit.onclick = () => {
  if (!state.running) {
    setMode("EDIT");
  }
};
btnPlan.onclick = () => {
  if (state.map !== null && !state.running) {
    session.publish("/plan/run", {});
  }
};

window.addEventListener("keydown", (ev) => {
  if (state.mode !== "TELEOP" || state.connection !== "connected") {
    return;
  }
  const result = gate.onKey(ev.key);
  if (result.kind === "ignored") {
    return;
  }
  ev.preventDefault();
  if (result.kind === "blocked") {
    state = { ...state, notice: "waiting for ack" };
    refresh();
    return;
  }
  cmdSentAt = performance.now();
  state = { ...state, pending: true, notice: null };
  session.publish("/drive/cmd", result.payload);
  refresh();
});

function applyEdit(map: MapPayload, r: number, c: number): void {
  let result;
  if (dragging === "start") {
    result = moveStart(map, r, c);
  } else if (dragging === "goal") {
    result = moveGoal(map, r, c);
  } else {
    result = toggleObstacle(map, r, c);
  }
  if ("error" in result) {
    state = { ...state, notice: result.error };
  } else {
    state = { ...state, map: result.ok, notice: null };
    session.publish("/map", result.ok);
  }
  refresh();
}

canvas.addEventListener("mousedown", (ev) => {
  if (state.mode !== "EDIT" || state.map === null || state.running) {
    return;
  }
  const rect = canvas.getBoundingClientRect();
  const hit = cellAt(state, canvas, ev.clientX - rect.left, ev.clientY - rect.top);
  if (hit === null) {
    return;
  }
  const [r, c] = hit;
  const [sr, sc] = state.map.start;
  const [gr, gc] = state.map.goal;
  if (r === sr && c === sc) {
    dragging = "start";
  } else if (r === gr && c === gc) {
    dragging = "goal";
  } else {
    dragging = "paint";
    applyEdit(state.map, r, c);
  }
});

canvas.addEventListener("mousemove", (ev) => {
  if (dragging === null || dragging === "paint" || state.map === null) {
    return;
  }
  const rect = canvas.getBoundingClientRect();
  const hit = cellAt(state, canvas, ev.clientX - rect.left, ev.clientY - rect.top);
  if (hit !== null) {
    applyEdit(state.map, hit[0], hit[1]);
  }
});

window.addEventListener("mouseup", () => {
  dragging = null;
});

session.start();
refresh();
