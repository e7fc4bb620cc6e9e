// Local fallback accumulator: same integrator semantics as the engine.

import { describe, expect, it } from "vitest";

import { cellsIntersectingCircle, LocalAccumulator } from "../src/local.js";

const CONFIG = { width_px: 100, height_px: 100, cell_px: 10 };

describe("cellsIntersectingCircle", () => {
  it("zero radius hits exactly one cell", () => {
    expect(cellsIntersectingCircle(CONFIG, 55, 55, 0)).toEqual([5 * 10 + 5]);
  });

  it("corner radius hits the four adjacent cells", () => {
    const hits = cellsIntersectingCircle(CONFIG, 20, 20, 3);
    expect(hits.sort((a, b) => a - b)).toEqual([11, 12, 21, 22]);
  });

  it("off-grid disk is ignored", () => {
    expect(cellsIntersectingCircle(CONFIG, -50, -50, 10)).toEqual([]);
  });
});

describe("LocalAccumulator", () => {
  it("accumulates dwell and decays after the pointer moves on", () => {
    const acc = new LocalAccumulator(CONFIG);
    for (let i = 0; i < 5; i++) acc.step({ x: 15, y: 15, radius: 0 });
    const idx = 1 * 10 + 1;
    expect(acc.cumulative[idx]).toBeCloseTo(0.5, 12);
    expect(acc.shortTerm[idx]).toBeCloseTo(0.5, 12);

    const before = acc.shortTerm[idx];
    for (let i = 0; i < 10; i++) acc.step(null);
    expect(acc.cumulative[idx]).toBeCloseTo(0.5, 12);  // never decays
    expect(acc.shortTerm[idx]).toBeCloseTo(
      before * Math.pow(2, -1.0 / 10.0), 12);
  });

  it("caps short-term attention", () => {
    const acc = new LocalAccumulator(CONFIG);
    for (let i = 0; i < 25; i++) acc.step({ x: 15, y: 15, radius: 0 });
    expect(acc.shortTerm[11]).toBe(1.0);
    expect(acc.cumulative[11]).toBeCloseTo(2.5, 12);
  });

  it("builds normalized frames with marginals and coverage", () => {
    const acc = new LocalAccumulator(CONFIG);
    acc.step({ x: 15, y: 15, radius: 0 });
    const frame = acc.buildFrame();
    expect(Math.max(...frame.heat_cumulative!)).toBe(1);
    expect(frame.marginal_x![1]).toBe(1);
    expect(frame.marginal_y![1]).toBe(1);
    expect(frame.coverage).toBeCloseTo(0.01, 12);
    expect(frame.grid).toEqual({ ...CONFIG, rows: 10, cols: 10 });
  });
});
