// Offline fallback: when the server is unreachable the mount keeps
// accumulating attention locally with the same integrator (linear gain
// clamped at a cap while attended, exponential half-life decay otherwise)
// and feeds the decorations from locally built frames. Contours need the
// server and are skipped in this mode.

import { normalize } from "./geometry.js";
import type { FrameMessage, GridConfig } from "./protocol.js";

export interface LocalParams {
  gain_per_s: number;
  half_life_s: number;
  cap: number;
  default_radius_px: number;
  tick_ms: number;
}

export const DEFAULT_PARAMS: LocalParams = {
  gain_per_s: 1.0,
  half_life_s: 10.0,
  cap: 1.0,
  default_radius_px: 48.0,
  tick_ms: 100,
};

export function cellsIntersectingCircle(
  config: GridConfig,
  cx: number,
  cy: number,
  radius: number,
): number[] {
  const cols = Math.ceil(config.width_px / config.cell_px);
  const rows = Math.ceil(config.height_px / config.cell_px);
  const cell = config.cell_px;
  const out: number[] = [];
  const colLo = Math.max(0, Math.floor((cx - radius) / cell) - 1);
  const colHi = Math.min(cols - 1, Math.floor((cx + radius) / cell) + 1);
  const rowLo = Math.max(0, Math.floor((cy - radius) / cell) - 1);
  const rowHi = Math.min(rows - 1, Math.floor((cy + radius) / cell) + 1);
  for (let row = rowLo; row <= rowHi; row++) {
    for (let col = colLo; col <= colHi; col++) {
      const x0 = col * cell;
      const y0 = row * cell;
      const x1 = Math.min(x0 + cell, config.width_px);
      const y1 = Math.min(y0 + cell, config.height_px);
      const dx = cx - Math.min(Math.max(cx, x0), x1);
      const dy = cy - Math.min(Math.max(cy, y0), y1);
      if (dx * dx + dy * dy <= radius * radius) out.push(row * cols + col);
    }
  }
  return out;
}

export class LocalAccumulator {
  readonly rows: number;
  readonly cols: number;
  readonly cumulative: Float64Array;
  readonly shortTerm: Float64Array;
  tick = 0;

  constructor(readonly config: GridConfig,
              readonly params: LocalParams = DEFAULT_PARAMS) {
    this.cols = Math.ceil(config.width_px / config.cell_px);
    this.rows = Math.ceil(config.height_px / config.cell_px);
    this.cumulative = new Float64Array(this.rows * this.cols);
    this.shortTerm = new Float64Array(this.rows * this.cols);
  }

  /** One tick: the sample position (if any) feeds its attention circle. */
  step(sample: { x: number; y: number; radius?: number } | null): void {
    this.tick += 1;
    const dt = this.params.tick_ms / 1000;
    const factor = Math.pow(2, -dt / this.params.half_life_s);
    const hits = new Set(
      sample
        ? cellsIntersectingCircle(this.config, sample.x, sample.y,
                                  sample.radius ?? this.params.default_radius_px)
        : [],
    );
    for (let i = 0; i < this.shortTerm.length; i++) {
      if (hits.has(i)) {
        this.cumulative[i] += dt;
        this.shortTerm[i] = Math.min(
          this.params.cap, this.shortTerm[i] + this.params.gain_per_s * dt);
      } else {
        this.shortTerm[i] *= factor;
      }
    }
  }

  coverage(): number {
    let seen = 0;
    for (const v of this.cumulative) if (v > 0) seen++;
    return seen / this.cumulative.length;
  }

  buildFrame(): FrameMessage {
    const heat = normalize(Array.from(this.cumulative));
    const st = Array.from(this.shortTerm, (v) => v / this.params.cap);
    return {
      kind: "frame",
      tick: this.tick,
      t_ms: this.tick * this.params.tick_ms,
      mode: "grid",
      trigger_mode: "always_on",
      grid: { ...this.config, rows: this.rows, cols: this.cols },
      heat_cumulative: heat,
      heat_short_term: st,
      contours: [],
      marginal_x: marginal(heat, this.rows, this.cols, "x"),
      marginal_y: marginal(heat, this.rows, this.cols, "y"),
      coverage: this.coverage(),
    };
  }
}

function marginal(values: number[], rows: number, cols: number,
                  axis: "x" | "y"): number[] {
  const out = new Array(axis === "x" ? cols : rows).fill(0);
  for (let r = 0; r < rows; r++) {
    for (let c = 0; c < cols; c++) {
      out[axis === "x" ? c : r] += values[r * cols + c];
    }
  }
  return normalize(out);
}
