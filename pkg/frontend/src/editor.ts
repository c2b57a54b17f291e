import type { MapPayload } from "./types.js";

export type EditResult = { ok: MapPayload } | { error: string };

function cloneWith(map: MapPayload, rows: string[], start = map.start, goal = map.goal): MapPayload {
  return { grid: rows, start: [start[0], start[1]], goal: [goal[0], goal[1]] };
}

function setGlyph(rows: string[], r: number, c: number, glyph: string): string[] {
  const out = rows.slice();
  const row = out[r]!;
  out[r] = row.slice(0, c) + glyph + row.slice(c + 1);
  return out;
}

export function inBounds(map: MapPayload, r: number, c: number): boolean {
  return r >= 0 && r < map.grid.length && c >= 0 && c < (map.grid[0]?.length ?? 0);
}

function isEndpoint(map: MapPayload, r: number, c: number): boolean {
  return (
    (map.start[0] === r && map.start[1] === c) || (map.goal[0] === r && map.goal[1] === c)
  );
}

/** Paint or clear an obstacle; start/goal cells cannot be painted over. */
export function toggleObstacle(map: MapPayload, r: number, c: number): EditResult {
  if (!inBounds(map, r, c)) {
    return { error: "outside the grid" };
  }
  if (isEndpoint(map, r, c)) {
    return { error: "cannot paint over start or goal" };
  }
  const glyph = map.grid[r]![c] === "#" ? "." : "#";
  return { ok: cloneWith(map, setGlyph(map.grid, r, c, glyph)) };
}

export function moveStart(map: MapPayload, r: number, c: number): EditResult {
  if (!inBounds(map, r, c)) {
    return { error: "outside the grid" };
  }
  if (map.grid[r]![c] === "#") {
    return { error: "start cannot sit on an obstacle" };
  }
  if (map.goal[0] === r && map.goal[1] === c) {
    return { error: "start cannot sit on the goal" };
  }
  return { ok: cloneWith(map, map.grid, [r, c], map.goal) };
}

export function moveGoal(map: MapPayload, r: number, c: number): EditResult {
  if (!inBounds(map, r, c)) {
    return { error: "outside the grid" };
  }
  if (map.grid[r]![c] === "#") {
    return { error: "goal cannot sit on an obstacle" };
  }
  if (map.start[0] === r && map.start[1] === c) {
    return { error: "goal cannot sit on the start" };
  }
  return { ok: cloneWith(map, map.grid, map.start, [r, c]) };
}
