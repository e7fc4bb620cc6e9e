// Decorative frame strips showing attention marginals: bars, area fill, or
// a linear heatmap along each axis.

import { borderBars, heatFill, ringPathD } from "./geometry.js";
import type { FrameMessage } from "./protocol.js";

export type BorderStyle = "bar" | "area" | "linear_heatmap";

const SVG_NS = "http://www.w3.org/2000/svg";
export const BAR_FILL = "#4477aa";

export class BorderStrip {
  readonly root: SVGSVGElement;
  style: BorderStyle = "bar";

  constructor(doc: Document, readonly axis: "x" | "y",
              readonly thickness: number) {
    this.root = doc.createElementNS(SVG_NS, "svg") as SVGSVGElement;
    this.root.setAttribute("class", `aav-border aav-border-${axis}`);
    this.root.setAttribute("preserveAspectRatio", "none");
    this.root.style.display = "block";
    this.root.style.pointerEvents = "none";
  }

  render(frame: FrameMessage): void {
    const grid = frame.grid;
    if (!grid) return;
    const values = (this.axis === "x" ? frame.marginal_x : frame.marginal_y) ?? [];
    const length = this.axis === "x" ? grid.width_px : grid.height_px;
    const [w, h] = this.axis === "x"
      ? [length, this.thickness] : [this.thickness, length];
    this.root.setAttribute("viewBox", `0 0 ${w} ${h}`);
    while (this.root.firstChild) this.root.removeChild(this.root.firstChild);

    const doc = this.root.ownerDocument;
    if (this.style === "area") {
      const pts: [number, number][] = values.map((v, i) => {
        const mid = Math.min((i + 0.5) * grid.cell_px, length);
        const extent = v * this.thickness;
        return this.axis === "x"
          ? [mid, this.thickness - extent] : [extent, mid];
      });
      const first: [number, number] =
        this.axis === "x" ? [0, this.thickness] : [0, 0];
      const last: [number, number] =
        this.axis === "x" ? [length, this.thickness] : [0, length];
      const el = doc.createElementNS(SVG_NS, "path");
      el.setAttribute("d", ringPathD([first, ...pts, last]));
      el.setAttribute("fill", BAR_FILL);
      this.root.appendChild(el);
      return;
    }

    const bars = borderBars(values, this.axis, grid, this.thickness);
    for (const bar of bars) {
      const el = doc.createElementNS(SVG_NS, "rect");
      if (this.style === "linear_heatmap") {
        const lo = bar.index * grid.cell_px;
        const size = Math.min(grid.cell_px, length - lo);
        if (this.axis === "x") {
          el.setAttribute("x", String(lo));
          el.setAttribute("y", "0");
          el.setAttribute("width", String(size));
          el.setAttribute("height", String(this.thickness));
        } else {
          el.setAttribute("x", "0");
          el.setAttribute("y", String(lo));
          el.setAttribute("width", String(this.thickness));
          el.setAttribute("height", String(size));
        }
        el.setAttribute("fill", heatFill(values[bar.index] ?? 0));
      } else {
        el.setAttribute("x", String(bar.x));
        el.setAttribute("y", String(bar.y));
        el.setAttribute("width", String(bar.width));
        el.setAttribute("height", String(bar.height));
        el.setAttribute("fill", BAR_FILL);
      }
      el.setAttribute("data-index", String(bar.index));
      this.root.appendChild(el);
    }
  }
}
