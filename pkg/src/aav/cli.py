"""Operator CLI: serve the streaming service, replay logs, render static
SVGs, generate synthetic scanpaths, and report session statistics.

Exit codes: 0 success, 1 data error (missing/corrupt inputs), 2 usage.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import server as server_mod
from .grid import GridConfig, coverage
from .model import normalize
from .revis import Axis, MarginalStyle, Stat, border_marginals, contours
from .session import (
    LogError,
    Mode,
    SessionLog,
    SessionState,
    load_snapshot,
    replay,
    save_snapshot,
)
from .simulate import Hotspot, ScanpathSpec, generate_scanpath
from .svg import svg_border, svg_contours, svg_heatmap
from .triggers import TriggerMode


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except LogError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aav",
        description="attention-aware visualization engine")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="run the streaming service")
    p.add_argument("--port", type=int, default=None,
                   help="listen port (default: AAV_PORT or 8080)")
    p.add_argument("--tick-ms", type=int, default=None,
                   help="integration tick (default: AAV_TICK_MS or 100)")
    p.add_argument("--log-dir", default=None,
                   help="directory for session logs on disconnect")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("replay", help="rebuild a session from its log")
    p.add_argument("log", help="session log (.aav.jsonl)")
    p.add_argument("--until", type=int, default=None, metavar="MS",
                   help="replay only through this timestamp")
    p.add_argument("--out", default=None, help="write snapshot (.aav.snap)")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("render", help="render a snapshot to SVG")
    p.add_argument("snapshot", help="snapshot file (.aav.snap)")
    p.add_argument("--style", choices=["heatmap", "contour", "border"],
                   default="heatmap")
    p.add_argument("--stat", choices=[s.value for s in Stat],
                   default=Stat.CUMULATIVE.value)
    p.add_argument("--levels", default="0.25,0.5,0.75",
                   help="comma-separated contour levels in (0,1)")
    p.add_argument("--axis", choices=["x", "y"], default="x")
    p.add_argument("--border-style",
                   choices=[s.value for s in MarginalStyle],
                   default=MarginalStyle.BAR.value)
    p.add_argument("--format", choices=["svg", "json"], default="svg",
                   help="svg markup or the raw frame payload")
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("simulate", help="generate a synthetic scanpath log")
    p.add_argument("--width", type=float, default=640.0)
    p.add_argument("--height", type=float, default=480.0)
    p.add_argument("--cell", type=float, default=32.0)
    p.add_argument("--fixations", type=int, default=50)
    p.add_argument("--duration-mean", type=float, default=400.0, metavar="MS")
    p.add_argument("--duration-sd", type=float, default=120.0, metavar="MS")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--hotspot", action="append", default=[],
                   metavar="X,Y,R[,W]",
                   help="weighted hotspot disk; repeatable (default: uniform)")
    p.add_argument("--trigger-mode",
                   choices=[m.value for m in TriggerMode],
                   default=TriggerMode.ALWAYS_ON.value)
    p.add_argument("--out", required=True, help="log file to write")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("stats", help="coverage and dwell report for a log")
    p.add_argument("log", help="session log (.aav.jsonl)")
    p.add_argument("--top", type=int, default=10,
                   help="number of top dwell targets to list")
    p.set_defaults(func=cmd_stats)

    return parser


def cmd_serve(args) -> int:
    try:
        server_mod.run(port=args.port, tick_ms=args.tick_ms,
                       log_dir=args.log_dir)
    except OSError as exc:  # port busy etc.
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        pass
    return 0


def cmd_replay(args) -> int:
    log = SessionLog.load(args.log)
    state, _ = replay(log, until_ms=args.until)
    snap = state.snapshot()
    if args.out:
        save_snapshot(snap, args.out)
    total = float(state.map.fused_cumulative().sum())
    print(f"ticks: {state.tick}")
    print(f"events: {len(log.events)}")
    print(f"total attention: {total:.3f} s")
    if state.mode == Mode.GRID:
        print(f"coverage: {coverage(state.map) * 100:.1f}%")
    if args.out:
        print(f"snapshot written to {args.out}")
    return 0


def _grid_state_from_snapshot(path):
    snap = load_snapshot(path)
    state = SessionState.from_snapshot(snap)
    if state.mode != Mode.GRID:
        print("error: render supports grid-mode snapshots "
              "(marks sessions are rendered live by clients)", file=sys.stderr)
        return None
    return state


def cmd_render(args) -> int:
    state = _grid_state_from_snapshot(args.snapshot)
    if state is None:
        return 2
    cfg: GridConfig = state.grid_config
    grid = (state.map.cumulative_grid() if args.stat == Stat.CUMULATIVE.value
            else state.map.short_term_grid())

    if args.format == "json":
        payload = state.build_frame(force=True)
        out = json.dumps(payload, sort_keys=True) + "\n"
    elif args.style == "heatmap":
        out = svg_heatmap(grid, cfg)
    elif args.style == "contour":
        levels = [float(v) for v in args.levels.split(",") if v]
        if any(not 0 < lv < 1 for lv in levels):
            print("error: contour levels must lie in (0,1)", file=sys.stderr)
            return 2
        norm = np.asarray(normalize(grid.ravel())).reshape(grid.shape)
        rings = contours(norm, levels, cfg.cell_px)
        out = svg_contours(rings, cfg)
    else:  # border
        marginal = border_marginals(grid, Axis(args.axis),
                                    MarginalStyle(args.border_style))
        out = svg_border(marginal, cfg)

    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return 0


def parse_hotspot(text: str) -> Hotspot:
    parts = [float(v) for v in text.split(",")]
    if len(parts) == 3:
        return Hotspot(parts[0], parts[1], parts[2])
    if len(parts) == 4:
        return Hotspot(parts[0], parts[1], parts[2], parts[3])
    raise ValueError(f"hotspot must be X,Y,R[,W], got {text!r}")


def cmd_simulate(args) -> int:
    try:
        hotspots = [parse_hotspot(h) for h in args.hotspot]
        spec = ScanpathSpec(seed=args.seed, fixation_count=args.fixations,
                            duration_mean_ms=args.duration_mean,
                            duration_sd_ms=args.duration_sd,
                            hotspots=hotspots)
        config = GridConfig(width_px=args.width, height_px=args.height,
                            cell_px=args.cell)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    log = generate_scanpath(spec, config,
                            trigger_mode=TriggerMode(args.trigger_mode))
    log.save(args.out)
    print(f"{len(log.events)} samples over {log.last_timestamp_ms} ms "
          f"written to {args.out}")
    return 0


def cmd_stats(args) -> int:
    log = SessionLog.load(args.log)
    state, _ = replay(log)
    cum = state.map.fused_cumulative()
    total = float(cum.sum())
    print(f"mode: {state.mode}")
    print(f"ticks: {state.tick}  events: {len(log.events)}")
    print(f"total attention: {total:.3f} s")
    if state.mode == Mode.GRID:
        print(f"coverage: {coverage(state.map) * 100:.1f}%")
    print(f"top {args.top} dwell targets:")
    order = np.argsort(cum)[::-1][:args.top]
    for rank, idx in enumerate(order, 1):
        if cum[idx] <= 0:
            break
        target = state.map.target_at(int(idx))
        print(f"  {rank:2d}. {target}  {cum[idx]:.3f} s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
