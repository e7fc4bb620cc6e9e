"""Acceptance gate: every release criterion exercised at its stated
tolerance, one printed PASS/FAIL line each. Run with `pytest -s
tests/test_acceptance.py` to see the report."""

import asyncio
import json
import math
import time

import numpy as np
from websockets.asyncio.client import connect
from websockets.exceptions import ConnectionClosed

from aav.grid import GridConfig, cells_intersecting_circle
from aav.marks import MarkAttentionMap, apply_sample_3d, decode_id, encode_id, rasterize
from aav.model import AttentionSample, AttentionState, ModelParams, Source, tick
from aav.revis import Axis, contours, marginal_sums
from aav.server import Server
from aav.session import (
    SessionLog,
    SessionState,
    replay,
    sample_event,
    serialize_snapshot,
    tick_of,
    trigger_event,
)
from aav.triggers import Flag, ImplicitParams, TriggerMode, evaluate_implicit

from oracles import (
    disk_rect_cells,
    level_separation,
    projected_edge_mask,
    random_scene,
    raycast_pick,
    rings_parity_mask,
    smooth_random_field,
    threshold_ring_count,
    front_camera,
)
from test_session import grid_header, random_grid_log


def report(name: str, ok: bool, detail: str = ""):
    status = "PASS" if ok else "FAIL"
    suffix = f"  ({detail})" if detail else ""
    print(f"[{status}] {name}{suffix}")
    assert ok, f"{name}{suffix}"


# -- 1. attention model -------------------------------------------------------

def test_attention_model_suite():
    rng = np.random.default_rng(1001)
    t0 = time.perf_counter()
    decay_ok = True
    for _ in range(1000):
        params = ModelParams(
            gain_per_s=float(rng.uniform(0.2, 4.0)),
            half_life_s=float(rng.uniform(0.5, 30.0)),
            cap=float(rng.uniform(0.5, 3.0)),
        )
        state = AttentionState()
        prev_cum = 0.0
        n_events = int(rng.integers(5, 60))
        for _ in range(n_events):
            attended = bool(rng.random() < 0.5)
            dt = float(rng.uniform(1e-3, 2.0))
            state = tick(state, attended, dt, params)
            assert state.cumulative >= prev_cum, "cumulative must not decrease"
            assert 0.0 <= state.short_term <= params.cap, "short-term bounds"
            prev_cum = state.cumulative
        # decay law: n unattended ticks from a known value
        v0 = state.short_term if state.short_term > 0 else 0.7
        state = AttentionState(state.cumulative, v0)
        n, dt = int(rng.integers(1, 30)), float(rng.uniform(0.05, 1.0))
        for _ in range(n):
            state = tick(state, False, dt, params)
        expected = v0 * 2.0 ** (-n * dt / params.half_life_s)
        if not math.isclose(state.short_term, expected, rel_tol=1e-9):
            decay_ok = False
    elapsed = time.perf_counter() - t0
    report("attention-model: monotone cumulative, short-term bounds, "
           "cap clamp over 1000 random sequences", True)
    report("attention-model: exponential decay within 1e-9 relative",
           decay_ok)
    report("attention-model: suite runtime < 5 s", elapsed < 5.0,
           f"{elapsed:.2f} s")


# -- 2. geometry oracles ---------------------------------------------------------

def test_geometry_circle_cell_oracle():
    rng = np.random.default_rng(1002)
    cfg = GridConfig(width_px=100, height_px=100, cell_px=10)
    mismatches = 0
    for _ in range(1000):
        center = (float(rng.uniform(-40, 140)), float(rng.uniform(-40, 140)))
        radius = float(rng.uniform(0, 50))
        if cells_intersecting_circle(cfg, center, radius) != \
                disk_rect_cells(cfg, center, radius):
            mismatches += 1
    report("geometry: circle-cell intersection equals exhaustive "
           "disk-rectangle oracle on 1000 random cases", mismatches == 0,
           f"{mismatches} mismatches")


def test_geometry_contour_oracle():
    rng = np.random.default_rng(1003)
    closed_ok = True
    count_ok = True
    checked = 0
    while checked < 20:
        field = smooth_random_field(rng, shape=(16, 16))
        level = float(rng.uniform(0.25, 0.75))
        if level_separation(field, level) <= 0.03:
            continue  # pixel oracles cannot resolve near-critical pinches
        checked += 1
        rings = contours(field, [level])
        for ring in rings:
            if not ring.closed or len(ring.points) < 3:
                closed_ok = False
        if len(rings) != threshold_ring_count(field, level, upsample=32):
            count_ok = False
        # membership parity at every node
        pts = np.array([[(c + 0.5), (r + 0.5)]
                        for r in range(16) for c in range(16)])
        inside = rings_parity_mask(rings, pts)
        want = (field > level).ravel()
        if not np.array_equal(inside, want):
            count_ok = False
    report("geometry: marching-squares rings closed on 20 random 16x16 "
           "grids", closed_ok)
    report("geometry: ring count and membership parity match the "
           "pixel-threshold oracle", count_ok)


# -- 3. 3D picking -----------------------------------------------------------------

def test_picking_encode_decode_bijection():
    ok = True
    for obj in (1, 2, 127, 128, 254, 255):
        for face in (0, 1, 255, 256, 257, 32767, 32768, 65534, 65535):
            ok &= decode_id(encode_id(obj, face)) == (obj, face)
    rng = np.random.default_rng(1004)
    for _ in range(2000):
        obj = int(rng.integers(1, 256))
        face = int(rng.integers(0, 65536))
        ok &= decode_id(encode_id(obj, face)) == (obj, face)
    report("3D picking: encode/decode bijection at boundary and random ids", ok)


def test_picking_rasterizer_vs_raycast():
    rng = np.random.default_rng(1005)
    cam = front_camera(64)
    worst = 1.0
    for _ in range(50):
        scene = random_scene(rng, n_triangles=20)
        buf = rasterize(scene, cam)
        obj_ref, face_ref = raycast_pick(scene, cam)
        non_edge = ~projected_edge_mask(scene, cam, dist_px=1.0)
        ok = (buf.object_ids == obj_ref) & (buf.face_ids == face_ref)
        agreement = ok[non_edge].mean() if non_edge.any() else 1.0
        worst = min(worst, float(agreement))
    report("3D picking: rasterizer agrees with ray-cast oracle on >= 99% "
           "of non-edge pixels (50 scenes, 20 triangles, 64x64)",
           worst >= 0.99, f"worst {worst * 100:.2f}%")


def test_picking_occluded_faces_accumulate_zero():
    import test_marks

    front = test_marks.quad(z=3.0, size=2.5, object_id=1)
    hidden = test_marks.quad(z=9.0, size=0.8, object_id=2)
    scene = [front, hidden]
    amap = MarkAttentionMap(scene)
    cam = front_camera(64)
    params = ModelParams()
    rng = np.random.default_rng(1006)
    for k in range(100):
        pos = None if k % 3 == 0 else (float(rng.uniform(0, 64)),
                                       float(rng.uniform(0, 64)))
        sample = AttentionSample(k * 100, pos, source=Source.GAZE,
                                 radius_px=float(rng.uniform(0, 12)))
        apply_sample_3d(amap, scene, cam, sample, 0.1, params)
    hidden_total = sum(amap.state_of((2, f)).cumulative for f in range(2))
    front_total = sum(amap.state_of((1, f)).cumulative for f in range(2))
    report("3D picking: fully occluded faces accumulate exactly 0 over a "
           "full session", hidden_total == 0.0 and front_total > 0,
           f"hidden={hidden_total}, front={front_total:.1f}")


# -- 4. triggers -----------------------------------------------------------------

def test_trigger_explicit_drops_exactly_pressed_samples():
    rng = np.random.default_rng(1007)
    params = ModelParams()
    gated = SessionLog(grid_header(trigger=TriggerMode.EXPLICIT))
    filtered = SessionLog(grid_header(trigger=TriggerMode.ALWAYS_ON))
    t, pressed = 0, False
    for _ in range(600):
        t += int(rng.integers(20, 140))
        if rng.random() < 0.12:
            pressed = not pressed
            gated.record(trigger_event(t, pressed))
        else:
            pos = (float(rng.uniform(0, 100)), float(rng.uniform(0, 100)))
            gated.record(sample_event(t, pos,
                                      radius_px=float(rng.uniform(0, 15))))
    trigger_by_tick = {}
    for ev in gated.events:
        if ev["kind"] == "trigger":
            trigger_by_tick[tick_of(ev["t"], params.tick_ms)] = ev["pressed"]
    pressed_now = False
    gate = {}
    for k in range(1, tick_of(gated.last_timestamp_ms, params.tick_ms) + 1):
        pressed_now = trigger_by_tick.get(k, pressed_now)
        gate[k] = pressed_now
    for ev in gated.events:
        if ev["kind"] == "sample" and not gate[tick_of(ev["t"], params.tick_ms)]:
            filtered.record(ev)

    until = gated.last_timestamp_ms
    state_a, _ = replay(gated, until_ms=until)
    state_b, _ = replay(filtered, until_ms=until)
    equal = np.array_equal(state_a.map.fused_cumulative(),
                           state_b.map.fused_cumulative())
    report("triggers: explicit mode drops exactly the pressed-interval "
           "samples (cumulative equality vs filtered stream)", equal)


def test_trigger_implicit_thresholds_and_hysteresis():
    params = ImplicitParams(theta_lo=0.1, theta_hi=0.9, hysteresis=0.05)
    ok = evaluate_implicit(0.0999, Flag.NONE, params) == Flag.EMPHASIZE
    ok &= evaluate_implicit(0.1001, Flag.NONE, params) == Flag.NONE
    ok &= evaluate_implicit(0.9001, Flag.NONE, params) == Flag.DE_EMPHASIZE
    ok &= evaluate_implicit(0.8999, Flag.NONE, params) == Flag.NONE
    ok &= evaluate_implicit(0.1499, Flag.EMPHASIZE, params) == Flag.EMPHASIZE
    ok &= evaluate_implicit(0.1501, Flag.EMPHASIZE, params) == Flag.NONE
    ok &= evaluate_implicit(0.8501, Flag.DE_EMPHASIZE, params) == Flag.DE_EMPHASIZE
    ok &= evaluate_implicit(0.8499, Flag.DE_EMPHASIZE, params) == Flag.NONE
    report("triggers: implicit flags transition at theta_lo=0.1 / "
           "theta_hi=0.9 with hysteresis 0.05", ok)

    rng = np.random.default_rng(1008)
    chatter_ok = True
    for _ in range(50):
        flag = Flag.EMPHASIZE
        toggles = 0
        prev = flag
        for _ in range(200):
            v = float(rng.uniform(0.1001, 0.1499))  # inside the dead band
            flag = evaluate_implicit(v, flag, params)
            toggles += flag != prev
            prev = flag
        if toggles > 1:
            chatter_ok = False
    report("triggers: no chatter inside the hysteresis band", chatter_ok)


# -- 5. replay determinism -----------------------------------------------------------

def test_replay_live_equals_replay_bit_for_bit():
    params = ModelParams()
    log = random_grid_log(seed=1009, n_events=400)
    live = SessionState(log.header)
    by_tick = {}
    for ev in log.events:
        by_tick.setdefault(tick_of(ev["t"], params.tick_ms), []).append(ev)
    for k in range(1, max(by_tick) + 1):
        live.apply_tick(by_tick.get(k, []))
    replayed, _ = replay(log, until_ms=live.t_ms)
    equal = serialize_snapshot(replayed.snapshot()) == \
        serialize_snapshot(live.snapshot())
    report("replay: live-recorded session snapshot equals replay snapshot "
           "bit for bit", equal)


def test_replay_prefix_property_100_cuts():
    log = random_grid_log(seed=1010, n_events=300)
    full, _ = replay(log)
    full_bytes = serialize_snapshot(full.snapshot())
    rng = np.random.default_rng(1011)
    ok = True
    for _ in range(100):
        cut = int(rng.integers(0, log.last_timestamp_ms))
        partial, _ = replay(log, until_ms=cut)
        resumed, _ = replay(log, state=partial)
        if serialize_snapshot(resumed.snapshot()) != full_bytes:
            ok = False
    report("replay: prefix property holds over 100 random cut points", ok)


# -- 6. marginal conservation ----------------------------------------------------------

def test_marginal_conservation():
    rng = np.random.default_rng(1012)
    ok = True
    for _ in range(50):
        grid = rng.uniform(0, 10, (int(rng.integers(2, 30)),
                                   int(rng.integers(2, 30))))
        total = grid.sum()
        x = marginal_sums(grid, Axis.X).sum()
        y = marginal_sums(grid, Axis.Y).sum()
        if abs(x - total) > 1e-9 or abs(y - total) > 1e-9:
            ok = False
    report("marginals: x- and y-marginal pre-normalization sums equal total "
           "grid attention within 1e-9", ok)


# -- 7. server protocol ------------------------------------------------------------------

def test_server_protocol_suite():
    async def scenario():
        server = Server(port=0, tick_ms=100)
        await server.start()
        try:
            # handshake-order violation rejected without session state
            async with connect(f"ws://localhost:{server.port}/session") as ws:
                await ws.send(json.dumps({"kind": "sample", "t": 0,
                                          "x": 1.0, "y": 1.0}))
                reply = json.loads(await asyncio.wait_for(ws.recv(), 3.0))
                rejected = reply["kind"] == "error"
                try:
                    await asyncio.wait_for(ws.recv(), 3.0)
                    closed = False
                except (ConnectionClosed, asyncio.TimeoutError):
                    closed = True
            rejected &= closed and not server.sessions
            report("server: handshake-order violations rejected without "
                   "mutating session state", rejected)

            # >= 9 ticks per silent second; byte-identical observer streams
            async with connect(f"ws://localhost:{server.port}/session") as ws:
                await ws.send(json.dumps({
                    "kind": "hello", "mode": "grid",
                    "trigger_mode": "always_on",
                    "config": {"grid": {"width_px": 100.0, "height_px": 100.0,
                                        "cell_px": 10.0}}}))
                welcome = json.loads(await ws.recv())
                sid = welcome["session_id"]

                deadline = asyncio.get_running_loop().time() + 1.05
                frames = []
                while asyncio.get_running_loop().time() < deadline:
                    try:
                        left = deadline - asyncio.get_running_loop().time()
                        frames.append(json.loads(
                            await asyncio.wait_for(ws.recv(), max(left, 0.01))))
                    except asyncio.TimeoutError:
                        break
                ticks = [f["tick"] for f in frames]
                report("server: >= 9 decay-only ticks per silent second",
                       len(frames) >= 9, f"{len(frames)} frames")
                report("server: frame tick numbers strictly increase",
                       ticks == sorted(set(ticks)))

                async def observe(n):
                    out = []
                    async with connect(
                            f"ws://localhost:{server.port}/session") as obs:
                        await obs.send(json.dumps({"kind": "hello",
                                                   "observe": sid}))
                        await obs.recv()
                        while len(out) < n:
                            out.append(await asyncio.wait_for(obs.recv(), 3.0))
                    return out

                a, b = await asyncio.gather(observe(6), observe(6))
                a_by_tick = {json.loads(f)["tick"]: f for f in a}
                b_by_tick = {json.loads(f)["tick"]: f for f in b}
                common = set(a_by_tick) & set(b_by_tick)
                identical = bool(common) and all(
                    a_by_tick[k] == b_by_tick[k] for k in common)
                report("server: two observers receive byte-identical frames",
                       identical, f"{len(common)} common ticks")
        finally:
            await server.stop()

    asyncio.run(scenario())
