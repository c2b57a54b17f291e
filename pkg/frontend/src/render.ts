import type { ConsoleState } from "./model.js";
import { STEP_LEN_IN } from "./types.js";

const COLORS = {
  free: "#ffffff",
  obstacle: "#343434",
  gridline: "#d0d0d0",
  start: "#3fa34d",
  goal: "#d7263d",
  path: "#3c6fd1",
  robot: "#7b2fbe",
};

/** Plain 2D-canvas grid with the robot drawn as an oriented triangle.
 * Positive theta turns from +x (East) toward +y (South, larger rows). */
export function render(state: ConsoleState, canvas: HTMLCanvasElement): void {
  const ctx = canvas.getContext("2d");
  if (ctx === null || state.map === null) {
    return;
  }
  const rows = state.map.grid.length;
  const cols = state.map.grid[0]?.length ?? 0;
  const cell = Math.floor(Math.min(canvas.width / cols, canvas.height / rows));

  ctx.clearRect(0, 0, canvas.width, canvas.height);
  for (let r = 0; r < rows; r++) {
    for (let c = 0; c < cols; c++) {
      ctx.fillStyle = state.map.grid[r]![c] === "#" ? COLORS.obstacle : COLORS.free;
      ctx.fillRect(c * cell, r * cell, cell, cell);
      ctx.strokeStyle = COLORS.gridline;
      ctx.strokeRect(c * cell + 0.5, r * cell + 0.5, cell - 1, cell - 1);
    }
  }

  if (state.plan !== null && state.plan.found) {
    ctx.strokeStyle = COLORS.path;
    ctx.lineWidth = Math.max(2, cell / 8);
    ctx.beginPath();
    state.plan.path.forEach(([r, c], i) => {
      const x = (c + 0.5) * cell;
      const y = (r + 0.5) * cell;
      if (i === 0) {
        ctx.moveTo(x, y);
      } else {
        ctx.lineTo(x, y);
      }
    });
    ctx.stroke();
    ctx.lineWidth = 1;
  }

  const [sr, sc] = state.map.start;
  const [gr, gc] = state.map.goal;
  ctx.fillStyle = COLORS.start;
  ctx.fillRect(sc * cell + cell * 0.25, sr * cell + cell * 0.25, cell * 0.5, cell * 0.5);
  ctx.fillStyle = COLORS.goal;
  ctx.beginPath();
  ctx.arc((gc + 0.5) * cell, (gr + 0.5) * cell, cell * 0.3, 0, 2 * Math.PI);
  ctx.fill();

  if (state.pose !== null) {
    const px = (state.pose.x_in / STEP_LEN_IN + 0.5) * cell;
    const py = (state.pose.y_in / STEP_LEN_IN + 0.5) * cell;
    const theta = state.pose.theta_rad;
    const size = cell * 0.38;
    ctx.fillStyle = COLORS.robot;
    ctx.beginPath();
    ctx.moveTo(px + size * Math.cos(theta), py + size * Math.sin(theta));
    ctx.lineTo(
      px + size * 0.7 * Math.cos(theta + (2.5 * Math.PI) / 3),
      py + size * 0.7 * Math.sin(theta + (2.5 * Math.PI) / 3),
    );
    ctx.lineTo(
      px + size * 0.7 * Math.cos(theta - (2.5 * Math.PI) / 3),
      py + size * 0.7 * Math.sin(theta - (2.5 * Math.PI) / 3),
    );
    ctx.closePath();
    ctx.fill();
  }
}

/** Canvas pixel coordinates to a grid cell, for edit-mode clicks. */
export function cellAt(
  state: ConsoleState,
  canvas: HTMLCanvasElement,
  px: number,
  py: number,
): [number, number] | null {
  if (state.map === null) {
    return null;
  }
  const rows = state.map.grid.length;
  const cols = state.map.grid[0]?.length ?? 0;
  const cell = Math.floor(Math.min(canvas.width / cols, canvas.height / rows));
  const c = Math.floor(px / cell);
  const r = Math.floor(py / cell);
  if (r < 0 || r >= rows || c < 0 || c >= cols) {
    return null;
  }
  return [r, c];
}
