// Options panel: a small form toggled from the frame that exposes the
// user-level knobs (decorations, styles, trigger mode, cell size).

import type { BorderStyle } from "./border.js";
import type { GlazeStyle } from "./overlay.js";
import type { TriggerMode } from "./protocol.js";

export interface PanelOptions {
  glazeStyle: GlazeStyle;
  borderStyle: BorderStyle;
  triggerMode: TriggerMode;
  cellPx: number;
  showGlaze: boolean;
  showBorder: boolean;
  showMinimap: boolean;
}

export class OptionsPanel {
  readonly root: HTMLElement;
  readonly toggle: HTMLButtonElement;
  private body: HTMLElement;

  constructor(doc: Document, private options: PanelOptions,
              private onChange: (options: PanelOptions) => void) {
    this.root = doc.createElement("div");
    this.root.className = "aav-panel";
    Object.assign(this.root.style, {
      position: "absolute",
      left: "4px",
      top: "4px",
      font: "12px sans-serif",
    });

    this.toggle = doc.createElement("button");
    this.toggle.type = "button";
    this.toggle.textContent = "aav";
    this.toggle.className = "aav-panel-toggle";
    this.root.appendChild(this.toggle);

    this.body = doc.createElement("div");
    this.body.className = "aav-panel-body";
    this.body.style.display = "none";
    this.body.style.background = "rgba(255,255,255,0.95)";
    this.body.style.padding = "6px";
    this.root.appendChild(this.body);

    this.toggle.addEventListener("click", () => {
      this.body.style.display =
        this.body.style.display === "none" ? "block" : "none";
    });
    this.buildBody(doc);
  }

  private buildBody(doc: Document): void {
    const select = (
      label: string,
      choices: string[],
      value: string,
      apply: (v: string) => void,
    ) => {
      const row = doc.createElement("label");
      row.style.display = "block";
      row.textContent = `${label} `;
      const sel = doc.createElement("select");
      for (const choice of choices) {
        const opt = doc.createElement("option");
        opt.value = choice;
        opt.textContent = choice;
        if (choice === value) opt.selected = true;
        sel.appendChild(opt);
      }
      sel.addEventListener("change", () => {
        apply(sel.value);
        this.onChange(this.options);
      });
      row.appendChild(sel);
      this.body.appendChild(row);
    };
    const checkbox = (label: string, value: boolean,
                      apply: (v: boolean) => void) => {
      const row = doc.createElement("label");
      row.style.display = "block";
      const box = doc.createElement("input");
      box.type = "checkbox";
      box.checked = value;
      box.addEventListener("change", () => {
        apply(box.checked);
        this.onChange(this.options);
      });
      row.appendChild(box);
      row.appendChild(doc.createTextNode(` ${label}`));
      this.body.appendChild(row);
    };

    select("glaze", ["heatmap", "contour", "mesh"], this.options.glazeStyle,
           (v) => (this.options.glazeStyle = v as GlazeStyle));
    select("border", ["bar", "area", "linear_heatmap"],
           this.options.borderStyle,
           (v) => (this.options.borderStyle = v as BorderStyle));
    select("trigger", ["always_on", "explicit", "implicit"],
           this.options.triggerMode,
           (v) => (this.options.triggerMode = v as TriggerMode));
    select("cell px", ["16", "32", "64"], String(this.options.cellPx),
           (v) => (this.options.cellPx = Number(v)));
    checkbox("glaze overlay", this.options.showGlaze,
             (v) => (this.options.showGlaze = v));
    checkbox("border", this.options.showBorder,
             (v) => (this.options.showBorder = v));
    checkbox("minimap", this.options.showMinimap,
             (v) => (this.options.showMinimap = v));
  }
}
