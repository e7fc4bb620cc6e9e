// Glaze: the overlay drawn on top of the mounted element (and reused at
// miniature scale by the minimap). Renders one of heatmap / contour / mesh
// from a frame payload into an SVG sized by CSS but addressed in mount
// coordinates, so geometry matches the engine's static renderer exactly.

import {
  borderBars,
  contourPaths,
  frameGrid,
  gridRects,
  heatFill,
} from "./geometry.js";
import type { FrameMessage } from "./protocol.js";

export type GlazeStyle = "heatmap" | "contour" | "mesh";
export type HeatStat = "cumulative" | "short_term";

const SVG_NS = "http://www.w3.org/2000/svg";
export const CONTOUR_STROKE = "#ff5533";

export class Glaze {
  readonly root: SVGSVGElement;
  style: GlazeStyle = "heatmap";
  stat: HeatStat = "cumulative";
  opacity = 0.45;

  constructor(doc: Document) {
    this.root = doc.createElementNS(SVG_NS, "svg") as SVGSVGElement;
    this.root.setAttribute("class", "aav-glaze");
    this.root.setAttribute("preserveAspectRatio", "none");
    Object.assign(this.root.style, {
      position: "absolute",
      inset: "0",
      width: "100%",
      height: "100%",
      pointerEvents: "none",
    });
  }

  clear(): void {
    while (this.root.firstChild) this.root.removeChild(this.root.firstChild);
  }

  render(frame: FrameMessage): void {
    const grid = frameGrid(frame);
    this.root.setAttribute(
      "viewBox",
      `0 0 ${grid.width_px} ${grid.height_px}`,
    );
    this.clear();
    if (this.style === "heatmap") this.renderHeatmap(frame);
    else if (this.style === "contour") this.renderContours(frame);
    else this.renderMesh(frame);
  }

  private heatValues(frame: FrameMessage): number[] {
    return (this.stat === "cumulative"
      ? frame.heat_cumulative
      : frame.heat_short_term) ?? [];
  }

  private renderHeatmap(frame: FrameMessage): void {
    const grid = frameGrid(frame);
    const values = this.heatValues(frame);
    const doc = this.root.ownerDocument;
    for (const rect of gridRects(grid)) {
      const v = values[rect.row * grid.cols + rect.col] ?? 0;
      const el = doc.createElementNS(SVG_NS, "rect");
      el.setAttribute("x", String(rect.x));
      el.setAttribute("y", String(rect.y));
      el.setAttribute("width", String(rect.width));
      el.setAttribute("height", String(rect.height));
      el.setAttribute("fill", heatFill(v));
      el.setAttribute("fill-opacity", String(this.opacity));
      this.root.appendChild(el);
    }
  }

  private renderContours(frame: FrameMessage): void {
    const doc = this.root.ownerDocument;
    for (const { level, d } of contourPaths(frame.contours ?? [])) {
      const el = doc.createElementNS(SVG_NS, "path");
      el.setAttribute("d", d);
      el.setAttribute("fill", "none");
      el.setAttribute("stroke", CONTOUR_STROKE);
      el.setAttribute("stroke-width", "1.5");
      el.setAttribute("data-level", String(level));
      this.root.appendChild(el);
    }
  }

  private renderMesh(frame: FrameMessage): void {
    // de-emphasize seen cells: a translucent darkening veil per cell whose
    // strength follows the engine-provided filter parameters
    const grid = frameGrid(frame);
    const mesh = frame.mesh ?? [];
    const doc = this.root.ownerDocument;
    for (const rect of gridRects(grid)) {
      const f = mesh[rect.row * grid.cols + rect.col];
      if (!f) continue;
      const el = doc.createElementNS(SVG_NS, "rect");
      el.setAttribute("x", String(rect.x));
      el.setAttribute("y", String(rect.y));
      el.setAttribute("width", String(rect.width));
      el.setAttribute("height", String(rect.height));
      el.setAttribute("fill", "#000");
      el.setAttribute("fill-opacity", String(f.darken));
      el.setAttribute("data-saturation", String(f.saturation));
      el.setAttribute("data-blur-px", String(f.blur_px));
      this.root.appendChild(el);
    }
  }
}

export { borderBars };
