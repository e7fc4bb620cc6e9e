// Parity-critical geometry: the numbers produced here must match the
// engine's static SVG renderer for the same frame payload (within 0.5 px
// after scaling), so keep formulas aligned with the server side.

import type { ContourPayload, FrameMessage, GridConfig } from "./protocol.js";

export interface CellRect {
  row: number;
  col: number;
  x: number;
  y: number;
  width: number;
  height: number;
}

export interface BarRect {
  index: number;
  x: number;
  y: number;
  width: number;
  height: number;
}

/** Cell rectangle in mount coordinates; edge cells clip to the mount. */
export function cellRect(config: GridConfig, row: number, col: number): CellRect {
  const x0 = col * config.cell_px;
  const y0 = row * config.cell_px;
  const x1 = Math.min(x0 + config.cell_px, config.width_px);
  const y1 = Math.min(y0 + config.cell_px, config.height_px);
  return { row, col, x: x0, y: y0, width: x1 - x0, height: y1 - y0 };
}

export function gridRects(config: GridConfig & { rows: number; cols: number }): CellRect[] {
  const rects: CellRect[] = [];
  for (let row = 0; row < config.rows; row++) {
    for (let col = 0; col < config.cols; col++) {
      rects.push(cellRect(config, row, col));
    }
  }
  return rects;
}

/** Closed SVG path data for one contour ring. */
export function ringPathD(points: [number, number][]): string {
  if (points.length === 0) return "";
  const cmds = [`M ${fmt(points[0][0])} ${fmt(points[0][1])}`];
  for (let i = 1; i < points.length; i++) {
    cmds.push(`L ${fmt(points[i][0])} ${fmt(points[i][1])}`);
  }
  cmds.push("Z");
  return cmds.join(" ");
}

export function contourPaths(contours: ContourPayload[]): { level: number; d: string }[] {
  return contours.map((ring) => ({ level: ring.level, d: ringPathD(ring.points) }));
}

/**
 * Border bar geometry for one axis strip rendered standalone:
 * x strips are length x thickness, y strips thickness x length.
 */
export function borderBars(
  values: number[],
  axis: "x" | "y",
  config: GridConfig,
  thickness: number,
): BarRect[] {
  const cell = config.cell_px;
  const length = axis === "x" ? config.width_px : config.height_px;
  return values.map((v, i) => {
    const lo = i * cell;
    const size = Math.min(cell, length - lo);
    const extent = v * thickness;
    if (axis === "x") {
      return { index: i, x: lo, y: thickness - extent, width: size, height: extent };
    }
    return { index: i, x: 0, y: lo, width: extent, height: size };
  });
}

const VIRIDIS_STOPS: [number, [number, number, number]][] = [
  [0.0, [68, 1, 84]],
  [0.25, [59, 82, 139]],
  [0.5, [33, 145, 140]],
  [0.75, [94, 201, 98]],
  [1.0, [253, 231, 37]],
];

/** Round half to even, matching the engine's colormap quantization. */
export function rint(v: number): number {
  const floor = Math.floor(v);
  const diff = v - floor;
  if (diff > 0.5) return floor + 1;
  if (diff < 0.5) return floor;
  return floor % 2 === 0 ? floor : floor + 1;
}

export function colormap(value: number): [number, number, number] {
  const v = Math.min(1, Math.max(0, value));
  let hi = 1;
  while (hi < VIRIDIS_STOPS.length - 1 && VIRIDIS_STOPS[hi][0] < v) hi++;
  const [p0, c0] = VIRIDIS_STOPS[hi - 1];
  const [p1, c1] = VIRIDIS_STOPS[hi];
  const t = p1 === p0 ? 0 : (v - p0) / (p1 - p0);
  return [
    rint(c0[0] + (c1[0] - c0[0]) * t),
    rint(c0[1] + (c1[1] - c0[1]) * t),
    rint(c0[2] + (c1[2] - c0[2]) * t),
  ];
}

export function heatFill(value: number): string {
  const [r, g, b] = colormap(value);
  return `rgb(${r},${g},${b})`;
}

/** Max-normalize, mirroring the engine: all-zero stays zero. */
export function normalize(values: number[]): number[] {
  let peak = 0;
  for (const v of values) peak = Math.max(peak, v);
  if (peak <= 0) return values.map(() => 0);
  return values.map((v) => v / peak);
}

export function frameGrid(frame: FrameMessage): GridConfig & { rows: number; cols: number } {
  if (!frame.grid) throw new Error("frame has no grid payload");
  return frame.grid;
}

function fmt(v: number): string {
  let s = v.toFixed(2);
  if (s.includes(".")) s = s.replace(/0+$/, "").replace(/\.$/, "");
  return s;
}
