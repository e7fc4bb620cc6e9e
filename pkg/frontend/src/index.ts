export { mount, MountHandle } from "./mount.js";
export type { MountOptions, SocketLike } from "./mount.js";
export { Glaze } from "./overlay.js";
export type { GlazeStyle } from "./overlay.js";
export { BorderStrip } from "./border.js";
export type { BorderStyle } from "./border.js";
export { Minimap } from "./minimap.js";
export { LocalAccumulator, cellsIntersectingCircle } from "./local.js";
export {
  borderBars,
  cellRect,
  colormap,
  contourPaths,
  gridRects,
  heatFill,
  normalize,
  ringPathD,
} from "./geometry.js";
export type {
  ClientMessage,
  FrameMessage,
  GridConfig,
  ServerMessage,
  TriggerMode,
} from "./protocol.js";
