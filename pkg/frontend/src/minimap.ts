// Minimap: a miniature copy of the mount with its own glaze, docked on the
// frame.

import { Glaze } from "./overlay.js";
import type { FrameMessage } from "./protocol.js";

export class Minimap {
  readonly root: HTMLElement;
  readonly glaze: Glaze;

  constructor(doc: Document, widthPx: number) {
    this.root = doc.createElement("div");
    this.root.className = "aav-minimap";
    Object.assign(this.root.style, {
      position: "absolute",
      right: "4px",
      top: "4px",
      width: `${widthPx}px`,
      border: "1px solid #999",
      background: "#fff",
      pointerEvents: "none",
      overflow: "hidden",
    });
    this.glaze = new Glaze(doc);
    this.glaze.root.style.position = "static";
    this.glaze.opacity = 0.9;
    this.root.appendChild(this.glaze.root);
  }

  render(frame: FrameMessage): void {
    if (!frame.grid) return;
    const aspect = frame.grid.height_px / frame.grid.width_px;
    const width = this.root.clientWidth || parseFloat(this.root.style.width);
    this.glaze.root.style.width = "100%";
    this.glaze.root.style.height = `${width * aspect}px`;
    this.glaze.render(frame);
  }
}
