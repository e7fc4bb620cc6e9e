// Mounting: decorate an element with attention capture and revisualization.
//
// The element is wrapped in a picture frame; pointer movement over the
// mounted area streams gaze-proxy samples to the server (or into a local
// accumulator when offline), and incoming frames drive the glaze overlay,
// the border marginals and the minimap. The overlay never intercepts
// input: every decoration is pointer-events:none and capture listeners
// only observe, so the underlying element keeps receiving its events.

import { BorderStrip, BorderStyle } from "./border.js";
import { Glaze, GlazeStyle } from "./overlay.js";
import { LocalAccumulator, DEFAULT_PARAMS } from "./local.js";
import { Minimap } from "./minimap.js";
import { OptionsPanel, PanelOptions } from "./panel.js";
import type {
  FrameMessage,
  GridConfig,
  ServerMessage,
  Source,
  TriggerMode,
} from "./protocol.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: (() => void) | null;
  onmessage: ((ev: { data: string }) => void) | null;
  onerror: (() => void) | null;
  onclose: (() => void) | null;
}

export interface MountOptions {
  serverUrl?: string;
  cellPx?: number;
  frameThicknessPx?: number;
  minimapWidthPx?: number;
  hotkey?: string;
  triggerMode?: TriggerMode;
  glazeStyle?: GlazeStyle;
  borderStyle?: BorderStyle;
  decorations?: Partial<{
    glaze: boolean;
    border: boolean;
    minimap: boolean;
    options_panel: boolean;
  }>;
  source?: Source;
  sampleRadiusPx?: number;
  tickMs?: number;
  socketFactory?: (url: string) => SocketLike;
}

const DEFAULTS = {
  serverUrl: "ws://localhost:8080/session",
  cellPx: 32,
  frameThicknessPx: 40,
  minimapWidthPx: 120,
  hotkey: "Shift",
  triggerMode: "always_on" as TriggerMode,
  glazeStyle: "heatmap" as GlazeStyle,
  borderStyle: "bar" as BorderStyle,
  source: "pointer" as Source,
  tickMs: DEFAULT_PARAMS.tick_ms,
};

export class MountHandle {
  readonly wrapper: HTMLElement;
  readonly content: HTMLElement;
  readonly glaze: Glaze;
  readonly borderX: BorderStrip;
  readonly borderY: BorderStrip;
  readonly minimap: Minimap;
  readonly panel: OptionsPanel;
  readonly badge: HTMLElement;
  readonly config: GridConfig;

  connected = false;
  degraded = false;
  pressed = false;
  lastFrame: FrameMessage | null = null;

  private socket: SocketLike | null = null;
  private local: LocalAccumulator;
  private pointer: { x: number; y: number } | null = null;
  private timer: ReturnType<typeof setInterval> | null = null;
  private disposed = false;
  private epoch = Date.now();
  private opts: Required<Omit<MountOptions, "decorations" | "socketFactory">>
    & { decorations: Required<NonNullable<MountOptions["decorations"]>> };
  private socketFactory: (url: string) => SocketLike;
  private keydown: (ev: KeyboardEvent) => void;
  private keyup: (ev: KeyboardEvent) => void;

  constructor(readonly target: HTMLElement, options: MountOptions = {}) {
    const rect = target.getBoundingClientRect();
    if (!(rect.width > 0 && rect.height > 0)) {
      throw new Error("mount target must have a nonzero size");
    }
    this.opts = {
      ...DEFAULTS,
      ...options,
      decorations: {
        glaze: true,
        border: true,
        minimap: true,
        options_panel: true,
        ...(options.decorations ?? {}),
      },
      sampleRadiusPx: options.sampleRadiusPx ?? DEFAULT_PARAMS.default_radius_px,
    };
    if (!Object.values(this.opts.decorations).some(Boolean)) {
      throw new Error("at least one decoration must be enabled");
    }
    this.socketFactory =
      options.socketFactory
      ?? ((url: string) => new WebSocket(url) as unknown as SocketLike);
    this.config = {
      width_px: rect.width,
      height_px: rect.height,
      cell_px: this.opts.cellPx,
    };
    const doc = target.ownerDocument;

    // picture-frame wrapper; the target moves inside the content area
    this.wrapper = doc.createElement("div");
    this.wrapper.className = "aav-mount";
    Object.assign(this.wrapper.style, {
      position: "relative",
      display: "inline-block",
      padding: `${this.opts.frameThicknessPx}px`,
      background: "#2b2b2b",
      boxSizing: "content-box",
    });
    this.content = doc.createElement("div");
    this.content.className = "aav-content";
    Object.assign(this.content.style, {
      position: "relative",
      width: `${rect.width}px`,
      height: `${rect.height}px`,
    });
    target.parentNode?.insertBefore(this.wrapper, target);
    this.wrapper.appendChild(this.content);
    this.content.appendChild(target);

    this.glaze = new Glaze(doc);
    this.glaze.style = this.opts.glazeStyle;
    this.content.appendChild(this.glaze.root);

    this.borderX = new BorderStrip(doc, "x", this.opts.frameThicknessPx);
    this.borderX.style = this.opts.borderStyle;
    Object.assign(this.borderX.root.style, {
      position: "absolute",
      left: `${this.opts.frameThicknessPx}px`,
      bottom: "0",
      width: `${rect.width}px`,
      height: `${this.opts.frameThicknessPx}px`,
    });
    this.wrapper.appendChild(this.borderX.root);

    this.borderY = new BorderStrip(doc, "y", this.opts.frameThicknessPx);
    this.borderY.style = this.opts.borderStyle;
    Object.assign(this.borderY.root.style, {
      position: "absolute",
      left: "0",
      top: `${this.opts.frameThicknessPx}px`,
      width: `${this.opts.frameThicknessPx}px`,
      height: `${rect.height}px`,
    });
    this.wrapper.appendChild(this.borderY.root);

    this.minimap = new Minimap(doc, this.opts.minimapWidthPx);
    this.content.appendChild(this.minimap.root);

    this.badge = doc.createElement("div");
    this.badge.className = "aav-badge";
    this.badge.textContent = "offline";
    Object.assign(this.badge.style, {
      position: "absolute",
      right: "4px",
      bottom: "4px",
      padding: "2px 6px",
      background: "#b33",
      color: "#fff",
      font: "11px sans-serif",
      display: "none",
      pointerEvents: "none",
    });
    this.content.appendChild(this.badge);

    this.panel = new OptionsPanel(doc, this.panelOptions(),
                                  (o) => this.applyPanel(o));
    this.wrapper.appendChild(this.panel.root);

    this.applyDecorationVisibility();
    this.updateOverlayVisibility();

    // capture: observe only, never stop propagation
    this.content.addEventListener("pointermove", this.onPointerMove);
    this.content.addEventListener("pointerdown", this.onPointerDown);
    this.content.addEventListener("pointerleave", this.onPointerLeave);
    this.keydown = (ev: KeyboardEvent) => {
      if (ev.key === this.opts.hotkey && !ev.repeat) this.setPressed(true);
    };
    this.keyup = (ev: KeyboardEvent) => {
      if (ev.key === this.opts.hotkey) this.setPressed(false);
    };
    doc.addEventListener("keydown", this.keydown);
    doc.addEventListener("keyup", this.keyup);

    this.local = new LocalAccumulator(this.config, {
      ...DEFAULT_PARAMS,
      tick_ms: this.opts.tickMs,
      default_radius_px: this.opts.sampleRadiusPx,
    });
    this.connect();
    this.timer = setInterval(() => this.onTick(), this.opts.tickMs);
  }

  // -- capture -----------------------------------------------------------

  private onPointerMove = (ev: PointerEvent): void => {
    const rect = this.content.getBoundingClientRect();
    const x = ev.clientX - rect.left;
    const y = ev.clientY - rect.top;
    if (x < 0 || y < 0 || x > this.config.width_px || y > this.config.height_px) {
      this.pointer = null;  // frame/minimap area: out of region
      return;
    }
    this.pointer = { x, y };
    this.emitSample();
  };

  private onPointerDown = (ev: PointerEvent): void => {
    // taps signify interest too; observe and pass through
    this.onPointerMove(ev);
  };

  private onPointerLeave = (): void => {
    this.pointer = null;
  };

  /** External gaze bridge: feed eyetracker samples without UI changes. */
  injectGaze(x: number, y: number, radiusPx?: number): void {
    this.pointer = { x, y };
    this.emitSample("gaze", radiusPx);
  }

  private emitSample(source?: Source, radiusPx?: number): void {
    if (!this.pointer || this.disposed) return;
    if (this.captureGated()) return;
    if (this.connected && this.socket) {
      this.socket.send(JSON.stringify({
        kind: "sample",
        t: Date.now() - this.epoch,
        x: this.pointer.x,
        y: this.pointer.y,
        source: source ?? this.opts.source,
        radius: radiusPx ?? this.opts.sampleRadiusPx,
      }));
    }
  }

  private captureGated(): boolean {
    return this.opts.triggerMode === "explicit" && this.pressed;
  }

  private onTick(): void {
    if (this.disposed) return;
    if (this.connected) {
      // heartbeat: a resting pointer keeps dwelling
      this.emitSample();
    } else {
      const gated = this.captureGated();
      this.local.step(gated ? null : this.pointer && {
        ...this.pointer, radius: this.opts.sampleRadiusPx,
      });
      this.renderFrame(this.local.buildFrame());
    }
  }

  // -- trigger -------------------------------------------------------------

  setPressed(pressed: boolean): void {
    if (this.opts.triggerMode !== "explicit" || pressed === this.pressed) {
      return;
    }
    this.pressed = pressed;
    if (this.connected && this.socket) {
      this.socket.send(JSON.stringify({
        kind: "trigger", t: Date.now() - this.epoch, pressed,
      }));
    }
    this.updateOverlayVisibility();
  }

  overlayVisible(): boolean {
    return this.opts.triggerMode !== "explicit" || this.pressed;
  }

  private updateOverlayVisibility(): void {
    const visible = this.overlayVisible();
    this.glaze.root.style.display =
      visible && this.opts.decorations.glaze ? "block" : "none";
    this.minimap.root.style.display =
      visible && this.opts.decorations.minimap ? "block" : "none";
  }

  // -- networking ------------------------------------------------------------

  private connect(): void {
    let socket: SocketLike;
    try {
      socket = this.socketFactory(this.opts.serverUrl);
    } catch {
      this.setDegraded(true);
      return;
    }
    this.socket = socket;
    socket.onopen = () => {
      socket.send(JSON.stringify({
        kind: "hello",
        mode: "grid",
        trigger_mode: this.opts.triggerMode,
        config: { grid: this.config },
      }));
    };
    socket.onmessage = (ev) => this.onMessage(JSON.parse(ev.data));
    socket.onerror = () => this.setDegraded(true);
    socket.onclose = () => {
      if (!this.disposed) this.setDegraded(true);
    };
  }

  private onMessage(msg: ServerMessage): void {
    if (msg.kind === "welcome") {
      this.connected = true;
      this.setDegraded(false);
      return;
    }
    if (msg.kind === "frame") {
      this.renderFrame(msg);
      return;
    }
    if (msg.kind === "error") {
      console.warn(`aav server error ${msg.code}: ${msg.text}`);
    }
  }

  private setDegraded(degraded: boolean): void {
    this.degraded = degraded;
    if (degraded) this.connected = false;
    this.badge.style.display = degraded ? "block" : "none";
  }

  // -- rendering ----------------------------------------------------------------

  renderFrame(frame: FrameMessage): void {
    if (frame.mode !== "grid" || !frame.grid
        || frame.grid.width_px !== this.config.width_px
        || frame.grid.height_px !== this.config.height_px
        || frame.grid.cell_px !== this.config.cell_px
        || frame.grid.cols * frame.grid.rows
           !== (frame.heat_cumulative?.length ?? 0)) {
      console.warn("aav: frame does not match mount config; ignored");
      return;
    }
    this.lastFrame = frame;
    if (this.opts.decorations.glaze) this.glaze.render(frame);
    if (this.opts.decorations.border) {
      this.borderX.render(frame);
      this.borderY.render(frame);
    }
    if (this.opts.decorations.minimap) this.minimap.render(frame);
  }

  // -- options ----------------------------------------------------------------------

  private panelOptions(): PanelOptions {
    return {
      glazeStyle: this.opts.glazeStyle,
      borderStyle: this.opts.borderStyle,
      triggerMode: this.opts.triggerMode,
      cellPx: this.opts.cellPx,
      showGlaze: this.opts.decorations.glaze,
      showBorder: this.opts.decorations.border,
      showMinimap: this.opts.decorations.minimap,
    };
  }

  private applyPanel(o: PanelOptions): void {
    this.opts.glazeStyle = o.glazeStyle;
    this.opts.borderStyle = o.borderStyle;
    this.opts.decorations.glaze = o.showGlaze;
    this.opts.decorations.border = o.showBorder;
    this.opts.decorations.minimap = o.showMinimap;
    this.glaze.style = o.glazeStyle;
    this.minimap.glaze.style = o.glazeStyle;
    this.borderX.style = o.borderStyle;
    this.borderY.style = o.borderStyle;
    if (o.cellPx !== this.opts.cellPx) {
      // a new lattice needs a new session and a fresh local map
      this.opts.cellPx = o.cellPx;
      this.config.cell_px = o.cellPx;
      this.lastFrame = null;
      this.local = new LocalAccumulator(this.config, {
        ...DEFAULT_PARAMS,
        tick_ms: this.opts.tickMs,
        default_radius_px: this.opts.sampleRadiusPx,
      });
      this.connected = false;
      this.socket?.close();
      this.connect();
    }
    this.applyDecorationVisibility();
    this.updateOverlayVisibility();
    if (this.lastFrame) this.renderFrame(this.lastFrame);
  }

  private applyDecorationVisibility(): void {
    this.borderX.root.style.display =
      this.opts.decorations.border ? "block" : "none";
    this.borderY.root.style.display =
      this.opts.decorations.border ? "block" : "none";
    this.panel.root.style.display =
      this.opts.decorations.options_panel ? "block" : "none";
  }

  // -- lifecycle ---------------------------------------------------------------------

  dispose(): void {
    if (this.disposed) return;
    this.disposed = true;
    if (this.timer !== null) clearInterval(this.timer);
    const doc = this.target.ownerDocument;
    doc.removeEventListener("keydown", this.keydown);
    doc.removeEventListener("keyup", this.keyup);
    this.content.removeEventListener("pointermove", this.onPointerMove);
    this.content.removeEventListener("pointerdown", this.onPointerDown);
    this.content.removeEventListener("pointerleave", this.onPointerLeave);
    this.socket?.close();
    this.wrapper.parentNode?.insertBefore(this.target, this.wrapper);
    this.wrapper.remove();
  }
}

/** Decorate an element with attention capture and live revisualization. */
export function mount(target: HTMLElement,
                      options: MountOptions = {}): MountHandle {
  return new MountHandle(target, options);
}
