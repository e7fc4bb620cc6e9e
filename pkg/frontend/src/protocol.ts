// Wire types for the /session stream. Messages are JSON text, one object
// per websocket message; the first client message must be hello, the first
// server message is welcome.

export type Source = "gaze" | "pointer" | "touch" | "head";
export type TriggerMode = "always_on" | "explicit" | "implicit";

export interface GridConfig {
  width_px: number;
  height_px: number;
  cell_px: number;
}

export interface HelloMessage {
  kind: "hello";
  mode: "grid";
  trigger_mode: TriggerMode;
  config: { grid: GridConfig };
  params?: Record<string, number>;
}

export interface SampleMessage {
  kind: "sample";
  t: number;
  x: number | null;
  y: number | null;
  source: Source;
  radius?: number | null;
}

export interface TriggerMessage {
  kind: "trigger";
  t: number;
  pressed: boolean;
}

export interface WelcomeMessage {
  kind: "welcome";
  session_id: string;
  header: Record<string, unknown> & { grid?: GridConfig };
  observer?: boolean;
}

export interface ContourPayload {
  level: number;
  points: [number, number][];
}

export interface MeshFilterPayload {
  saturation: number;
  blur_px: number;
  darken: number;
}

export interface FrameMessage {
  kind: "frame";
  tick: number;
  t_ms: number;
  mode: "grid" | "marks";
  trigger_mode: TriggerMode;
  grid?: GridConfig & { rows: number; cols: number };
  heat_cumulative?: number[];
  heat_short_term?: number[];
  contours?: ContourPayload[];
  marginal_x?: number[];
  marginal_y?: number[];
  mesh?: MeshFilterPayload[];
  flags?: number[];
  coverage?: number;
}

export interface ErrorMessage {
  kind: "error";
  code: string;
  text: string;
}

export type ServerMessage = WelcomeMessage | FrameMessage | ErrorMessage;
export type ClientMessage = HelloMessage | SampleMessage | TriggerMessage;
