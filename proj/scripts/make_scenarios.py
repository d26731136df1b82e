#!/usr/bin/env python3
# Copyright 2026 The duoplan Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Generates the bundled scenario suites under scenarios/{routine,adversarial}."""

import argparse
import json
import math
from pathlib import Path

LANE = 3.5
ROAD_END = 220.0


def lane(lane_id, y, x0=-50.0, x1=ROAD_END + 50.0):
    return {"id": lane_id, "kind": "lane_centerline", "geometry": [[x0, y], [x1, y]]}


def straight_map(left_lane=False, right_lane=False):
    m = [lane("lane_ego", 0.0)]
    if left_lane:
        m.append(lane("lane_left", LANE))
    if right_lane:
        m.append(lane("lane_right", -LANE))
    return m


def stop_bar(elem_id, kind, x, state=None, half=3.0 * LANE):
    e = {"id": elem_id, "kind": kind, "geometry": [[x, -half], [x, half]]}
    if state is not None:
        e["state"] = state
    return e


def car(agent_id, x, y, speed, heading=0.0, kind="car"):
    return {"id": agent_id, "kind": kind, "x": x, "y": y, "heading": heading, "speed": speed}


def ped(agent_id, x, y, speed=0.0, heading=math.pi / 2):
    return {"id": agent_id, "kind": "pedestrian", "x": x, "y": y, "heading": heading, "speed": speed}


def behavior(kind, value, **controls):
    b = {"trigger": {"kind": kind, "value": value}}
    b.update(controls)
    return b


def route_points(length, curve=None):
    """Straight route, or straight followed by a constant-radius arc."""
    if curve is None:
        return [[0.0, 0.0], [length, 0.0]]
    start, radius, sign = curve
    pts = [[0.0, 0.0], [start, 0.0]]
    arc = length - start
    n = max(2, int(arc / 4.0))
    for i in range(1, n + 1):
        th = (arc * i / n) / radius
        pts.append([start + radius * math.sin(th), sign * radius * (1.0 - math.cos(th))])
    return pts


def expert_along(route, speed, duration, dt=0.5):
    """Constant-speed expert along the route polyline."""
    seg = []
    for a, b in zip(route, route[1:]):
        seg.append((a, b, math.dist(a, b)))
    out = []
    for i in range(1, int(round(duration / dt)) + 1):
        s = speed * dt * i
        for a, b, ln in seg:
            if s <= ln or (a, b, ln) == seg[-1]:
                f = s / ln if ln > 0 else 0.0
                out.append([round(a[0] + f * (b[0] - a[0]), 6), round(a[1] + f * (b[1] - a[1]), 6)])
                break
            s -= ln
    return {"dt": dt, "points": out}


def expert_profile(route_len, v0, accel, v_min, duration, dt=0.5):
    """Straight-line expert that changes speed at `accel` down/up to `v_min`."""
    out, x, v = [], 0.0, v0
    steps = int(round(duration / dt))
    for _ in range(steps):
        v1 = max(v_min, v + accel * dt) if accel < 0 else min(v_min, v + accel * dt)
        x += 0.5 * (v + v1) * dt
        v = v1
        out.append([round(min(x, route_len + 50.0), 6), 0.0])
    return {"dt": dt, "points": out}


def scenario(name, suite, description, ego_speed, agents, map_elems, route, *, scripts=(), lights=(),
             commands=(), expert=None, max_time=20.0, command="keep_forward"):
    sc = {
        "schema_version": 1,
        "name": name,
        "suite": suite,
        "description": description,
        "scene": {
            "id": name,
            "timestamp": 0.0,
            "ego": {"x": 0.0, "y": 0.0, "heading": 0.0, "speed": ego_speed, "accel": 0.0},
            "agents": list(agents),
            "map": list(map_elems),
            "command": command,
            "route": route,
        },
        "scripts": list(scripts),
        "lights": list(lights),
        "commands": list(commands),
        "termination": {"max_time": max_time, "goal_tolerance": 2.0},
    }
    sc["expert"] = expert if expert is not None else expert_along(route, ego_speed, min(max_time, 12.0))
    return sc


def routine():
    out = []
    L = 160.0
    r = route_points(L)
    for i, v in enumerate([8.0, 10.0, 12.0, 13.0]):
        out.append(scenario(f"routine_{i + 1:02d}_open_road_{int(v)}", "routine",
                            "Empty straight road at constant cruise speed.", v, [], straight_map(), r))
    for i, (gap, v) in enumerate([(35.0, 10.0), (40.0, 11.0), (45.0, 12.0), (38.0, 12.5)]):
        out.append(scenario(f"routine_{i + 5:02d}_steady_lead", "routine",
                            "Lead vehicle holding the ego's speed well ahead.", v,
                            [car("lead", gap + 4.5, 0.0, v)], straight_map(), r))
    for i, v in enumerate([10.0, 12.0]):
        out.append(scenario(f"routine_{i + 9:02d}_oncoming_median", "routine",
                            "Oncoming traffic on the far side of a median.", v,
                            [car("onc1", 80.0, -7.5, 10.0, math.pi), car("onc2", 140.0, -7.5, 11.0, math.pi)],
                            straight_map(), r))
    for i, v in enumerate([10.0, 12.0]):
        m = straight_map() + [stop_bar("tl1", "traffic_light", 70.0, "green")]
        out.append(scenario(f"routine_{i + 11:02d}_green_light", "routine",
                            "Signalized intersection that stays green.", v, [], m, r))
    for i, sign in enumerate([1.0, -1.0]):
        rc = route_points(L, (60.0, 120.0, sign))
        cmd = "turn_left" if sign > 0 else "turn_right"
        out.append(scenario(f"routine_{i + 13:02d}_gentle_curve_{cmd}", "routine",
                            "Gentle curve after a straight section.", 10.0, [], straight_map(), rc,
                            commands=[{"s": 45.0, "command": cmd}], expert=expert_along(rc, 10.0, 12.0)))
    for i, x in enumerate([50.0, 90.0]):
        out.append(scenario(f"routine_{i + 15:02d}_parked_shoulder", "routine",
                            "Car parked well off the travelled lane.", 11.0,
                            [car("parked", x, 6.5, 0.0, kind="static")], straight_map(), r))
    for i, v in enumerate([9.0, 11.0]):
        out.append(scenario(f"routine_{i + 17:02d}_sidewalk_pedestrian", "routine",
                            "Pedestrian walking along the far sidewalk.", v,
                            [ped("walker", 40.0, 8.0, 1.3, 0.0)], straight_map(), r))
    for i, (gap, lv) in enumerate([(25.0, 13.0), (30.0, 13.5)]):
        out.append(scenario(f"routine_{i + 19:02d}_lead_pulling_away", "routine",
                            "Faster lead vehicle pulling away.", 10.0,
                            [car("lead", gap + 4.5, 0.0, lv)], straight_map(), r))
    return out


def adversarial():
    out = []
    L = 160.0
    r = route_points(L)

    # Pedestrian starts crossing, then hesitates in the lane.
    for i, (px, t_stop, v) in enumerate([(40.0, 2.0, 10.0), (45.0, 2.2, 11.0), (38.0, 1.8, 10.0),
                                         (50.0, 2.6, 12.0)]):
        out.append(scenario(
            f"adversarial_{i + 1:02d}_hesitating_pedestrian", "adversarial",
            "Pedestrian crosses ahead and stops in the ego lane.", v,
            [ped("ped", px, -3.0, 1.4)], straight_map(), r,
            scripts=[{"agent": "ped", "behaviors": [behavior("time", t_stop, target_speed=0.0, accel=-4.0)]}],
            expert=expert_profile(L, v, -2.0, 0.0, 12.0)))

    # Lead vehicle brakes hard.
    for i, (gap, v, t_brake, decel) in enumerate([(12.0, 13.0, 3.0, 8.0), (11.0, 12.5, 2.0, 7.0),
                                                  (13.0, 13.5, 4.0, 9.0), (18.0, 12.0, 2.5, 6.0)]):
        out.append(scenario(
            f"adversarial_{i + 5:02d}_lead_hard_brake", "adversarial",
            "Lead vehicle brakes hard to a standstill.", v,
            [car("lead", gap + 4.5, 0.0, v)], straight_map(), r,
            scripts=[{"agent": "lead", "behaviors": [behavior("time", t_brake, target_speed=0.0, accel=-decel)]}],
            expert=expert_profile(L, v, -2.0, 0.0, 12.0)))

    # Red light with crossing traffic released on the cross street.
    for i, (xl, v, t_green) in enumerate([(55.0, 12.0, 12.0), (60.0, 13.0, 11.0), (50.0, 11.0, 12.0),
                                          (65.0, 13.5, 12.0)]):
        m = straight_map() + [stop_bar("tl1", "traffic_light", xl, "red")]
        cross_x = xl + 6.0
        agents = [car("cross1", cross_x, -40.0, 0.0, math.pi / 2), car("cross2", cross_x + 4.0, 45.0, 0.0, -math.pi / 2)]
        scripts = [
            {"agent": "cross1", "behaviors": [behavior("time", 1.5, target_speed=10.0, accel=3.0)]},
            {"agent": "cross2", "behaviors": [behavior("time", 2.0, target_speed=10.0, accel=3.0)]},
        ]
        out.append(scenario(
            f"adversarial_{i + 9:02d}_red_light_cross_traffic", "adversarial",
            "Red light while cross traffic starts through the junction.", v, agents, m, r,
            scripts=scripts, lights=[{"light": "tl1", "time": t_green, "state": "green"}],
            expert=expert_profile(L, v, -2.5, 0.0, 12.0)))

    # Slow car cut-in from the left lane.
    for i, (dx, v, lv, t_cut) in enumerate([(10.0, 12.0, 6.0, 1.5), (14.0, 12.0, 5.0, 2.0), (8.0, 11.0, 6.0, 1.0),
                                            (18.0, 13.0, 5.0, 2.5)]):
        agents = [car("cutter", dx + 4.5, LANE, lv)]
        scripts = [{"agent": "cutter", "behaviors": [behavior("time", t_cut, curvature=-0.06),
                                                     behavior("time", t_cut + 1.2, curvature=0.06),
                                                     behavior("time", t_cut + 2.4, curvature=0.0)]}]
        out.append(scenario(
            f"adversarial_{i + 13:02d}_slow_cut_in", "adversarial",
            "Slow car merges into the ego lane from the left.", v, agents, straight_map(left_lane=True), r,
            scripts=scripts, expert=expert_profile(L, v, -2.0, lv, 12.0)))

    # Stop line with a pedestrian stepping out past it.
    for i, (xs, v) in enumerate([(45.0, 11.0), (55.0, 12.0), (50.0, 13.0), (60.0, 12.0)]):
        m = straight_map() + [stop_bar("stop1", "stop_line", xs)]
        m.append({"id": "cw1", "kind": "crosswalk", "geometry": [[xs + 3.0, -4.0], [xs + 3.0, 4.0]]})
        agents = [ped("ped", xs + 5.0, -3.5, 0.0)]
        scripts = [{"agent": "ped", "behaviors": [behavior("ego_within", 30.0, target_speed=1.2, accel=2.0)]}]
        out.append(scenario(
            f"adversarial_{i + 17:02d}_stop_line_crosswalk", "adversarial",
            "Stop line before a crosswalk a pedestrian steps onto.", v, agents, m, r,
            scripts=scripts, expert=expert_profile(L, v, -2.5, 0.0, 12.0)))
    return out


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "scenarios"))
    args = parser.parse_args()
    root = Path(args.out)
    for suite, items in (("routine", routine()), ("adversarial", adversarial())):
        d = root / suite
        d.mkdir(parents=True, exist_ok=True)
        for old in d.glob("*.json"):
            old.unlink()
        for sc in items:
            (d / f"{sc['name']}.json").write_text(json.dumps(sc, indent=2) + "\n")
        print(f"{suite}: {len(items)} scenarios -> {d}")


if __name__ == "__main__":
    main()
