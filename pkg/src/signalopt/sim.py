"""Tick-based microscopic simulation and fitness aggregation.

Each tick runs the four phases in fixed order: recompute light states,
rebuild driver perceptions, move vehicles (lanes in id order, front to
back), then despawn finished vehicles and spawn new ones.  All randomness
flows through one seeded generator, so a (network, programme, config)
triple fully determines the run.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from random import Random

from .lights import LightColor, LightsProgramme, light_state_at, validate_programme
from .netmodel import RoadNetwork, reachable_exits, shortest_route


class InfeasibleProgramme(Exception):
    pass


@dataclass
class SimConfig:
    tick_ms: int = 200
    total_ticks: int = 1000
    v_max: float = 10.0
    a_max: float = 2.0
    b_max: float = 4.0
    s_min: float = 2.0
    stop_speed_eps: float = 0.1
    seed: int = 0
    record_traces: bool = True

    def __post_init__(self):
        if min(self.tick_ms, self.v_max, self.a_max, self.b_max, self.s_min) <= 0:
            raise ValueError("physical parameters must be > 0")
        if not 0 < self.stop_speed_eps < self.v_max:
            raise ValueError("stop_speed_eps must lie in (0, v_max)")

    @property
    def dt(self) -> float:
        return self.tick_ms / 1000.0


@dataclass(frozen=True)
class Perception:
    """What one driver sees: its own lane ahead plus its track's light."""
    gap_ahead: float
    predecessor_speed: float | None
    distance_to_junction: float
    light: LightColor | None


@dataclass(frozen=True)
class StopEvent:
    lane: str
    position: float
    start_tick: int
    duration_ticks: int


@dataclass(slots=True)
class Vehicle:
    id: int
    lane: str
    position: float
    speed: float
    route: tuple[int, ...]
    route_index: int
    spawn_tick: int
    stops: list = field(default_factory=list)
    trace: list = field(default_factory=list)
    speed_sum: float = 0.0
    tick_count: int = 0
    stop_open: tuple | None = None  # (start_tick, lane, position)


@dataclass(frozen=True)
class VehicleRecord:
    vehicle: int
    spawn_tick: int
    travel_ticks: int | None  # None while still live at the end of the run
    stops: int
    mean_speed: float
    trace: tuple = ()


@dataclass(frozen=True)
class SimulationStats:
    spawned: int
    completed: int
    mean_travel_ticks: float
    mean_speed: float
    total_stops: int
    v_max: float
    per_vehicle: tuple[VehicleRecord, ...] = ()


class WorldState:
    """Mutable simulation state; confined to a single execution context."""

    def __init__(self, net: RoadNetwork, programme: LightsProgramme, config: SimConfig):
        self.net = net
        self.programme = programme
        self.config = config
        self.tick = 0
        self.rng = Random(config.seed)
        self.spawned = 0
        self.completed = 0
        self.total_stops = 0
        self.speed_sum = 0.0
        self.vehicle_ticks = 0
        self.records: list[VehicleRecord] = []
        self.queues: dict[str, list[Vehicle]] = {l.id: [] for l in net.lanes}
        self._lane_order = sorted(self.queues)
        self._lane_length = {l.id: net.road_of_lane(l.id).length for l in net.lanes}
        self._next_id = 1
        # static routing: reachable exits and one fixed route per (entry, exit)
        self._exits = {e: reachable_exits(net, e) for e in net.entry_roads}
        self._routes = {(e, x): shortest_route(net, e, x)
                        for e in net.entry_roads for x in self._exits[e]}
        self._spawn_roads = [(rid, net.road_by_id[rid].spawn_rate) for rid in net.entry_roads]
        # light colors repeat with the cycle; precompute the full table
        cycle = programme.params.cycle_ticks
        self._colors = [
            {t.index: light_state_at(programme, t.index, c) for t in net.tracks}
            for c in range(cycle)
        ]
        self._cycle = cycle

    def live_count(self) -> int:
        return sum(len(q) for q in self.queues.values())


def init_world(net: RoadNetwork, programme: LightsProgramme, config: SimConfig) -> WorldState:
    violations = validate_programme(programme, net)
    if violations:
        raise InfeasibleProgramme("; ".join(v.message for v in violations))
    return WorldState(net, programme, config)


def drive_decision(p: Perception, v: float, cfg: SimConfig) -> float:
    """One bounded-acceleration speed update from a driver's perception.

    Target speed is the most restrictive of free flow, keeping s_min behind
    the predecessor, and stopping for a non-green light once inside braking
    distance; a vehicle already within one tick of the junction on yellow
    keeps going.  The result is clamped to the acceleration and braking
    bounds and to [0, v_max].
    """
    dt = cfg.dt
    target = cfg.v_max
    if p.gap_ahead != math.inf:
        target = min(target, max(0.0, (p.gap_ahead - cfg.s_min) / dt))
    light = p.light
    if light is not None and light is not LightColor.GREEN:
        if p.distance_to_junction <= v * v / (2.0 * cfg.b_max) + v * dt:
            if not (light is LightColor.YELLOW and v > 0.0 and p.distance_to_junction <= v * dt):
                target = 0.0
    new_speed = max(v - cfg.b_max * dt, min(v + cfg.a_max * dt, target))
    return max(0.0, min(cfg.v_max, new_speed))


def spawn_vehicle(world: WorldState, entry: str, exit: str) -> Vehicle:
    """Place one vehicle at the start of an entry road (test/demo hook)."""
    route = world._routes.get((entry, exit))
    if route is None:
        route = shortest_route(world.net, entry, exit)
    if route is None:
        raise ValueError(f"no route from {entry!r} to {exit!r}")
    lane = world.net.track_by_index[route[0]].in_lane
    v = Vehicle(world._next_id, lane, 0.0, 0.0, route, 0, world.tick)
    world._next_id += 1
    world.queues[lane].append(v)
    world.spawned += 1
    return v


def _finish_vehicle(world: WorldState, v: Vehicle) -> None:
    if v.stop_open is not None:
        start, lane, pos = v.stop_open
        v.stops.append(StopEvent(lane, pos, start, world.tick - start))
        v.stop_open = None
    world.completed += 1
    mean = v.speed_sum / v.tick_count if v.tick_count else 0.0
    # travel time = ticks the vehicle actually moved, which also covers
    # vehicles placed directly (not spawned at the end of a tick)
    world.records.append(VehicleRecord(v.id, v.spawn_tick, v.tick_count,
                                       len(v.stops), mean, tuple(v.trace)))


#: Minimum in-lane separation the lane itself enforces (no overtaking);
#: drivers aim for s_min, this backstop only limits emergency cases where
#: the braking bound overrides the gap rule.
MIN_SEPARATION = 0.01


def step(world: WorldState) -> None:
    """Advance the world by one tick (the four-phase iteration)."""
    cfg = world.config
    net = world.net
    dt = cfg.dt
    eps = cfg.stop_speed_eps
    tick = world.tick
    queues = world.queues
    lengths = world._lane_length

    # (1) environment: light states for this tick
    colors = world._colors[tick % world._cycle]

    # (2) perception: one frozen snapshot per driver, front to back
    inf = math.inf
    lanes_todo: list[tuple[str, list[tuple[Vehicle, Perception]]]] = []
    for lane_id in world._lane_order:
        q = queues[lane_id]
        if not q:
            continue
        road_len = lengths[lane_id]
        snapshot: list[tuple[Vehicle, Perception]] = []
        pred: Vehicle | None = None
        for v in q:
            if pred is None:
                gap, pred_speed = inf, None
            else:
                gap, pred_speed = pred.position - v.position, pred.speed
            light = colors[v.route[v.route_index]] if v.route_index < len(v.route) else None
            snapshot.append((v, Perception(gap, pred_speed, road_len - v.position, light)))
            pred = v
        lanes_todo.append((lane_id, snapshot))

    # (3) movement, junction crossing, exit handling
    finished: list[Vehicle] = []
    green = LightColor.GREEN
    for lane_id, snapshot in lanes_todo:
        road_len = lengths[lane_id]
        ahead: Vehicle | None = None  # closest vehicle still in this lane
        for v, perc in snapshot:
            new_speed = drive_decision(perc, v.speed, cfg)
            new_pos = v.position + new_speed * dt
            if ahead is not None and new_pos > ahead.position - MIN_SEPARATION:
                new_pos = ahead.position - MIN_SEPARATION
                new_speed = (new_pos - v.position) / dt
            crossed = False
            if new_pos >= road_len:
                if v.route_index < len(v.route):
                    track = net.track_by_index[v.route[v.route_index]]
                    out_q = queues[track.out_lane]
                    if colors[track.index] is green or (
                            perc.light is LightColor.YELLOW and new_speed > 0.0):
                        if not out_q or out_q[-1].position >= cfg.s_min:
                            q = queues[lane_id]
                            assert q[0] is v
                            q.pop(0)
                            v.lane = track.out_lane
                            v.position = 0.0
                            v.speed = new_speed
                            v.route_index += 1
                            out_q.append(v)
                            crossed = True
                    if not crossed:
                        # blocked at the stop line: clamp to the road end
                        v.speed = (road_len - v.position) / dt
                        v.position = road_len
                else:
                    v.speed = new_speed
                    v.position = road_len
                    finished.append(v)
            else:
                v.speed = new_speed
                v.position = new_pos
            if not crossed:
                ahead = v

            # per-tick statistics
            v.speed_sum += v.speed
            v.tick_count += 1
            if cfg.record_traces:
                v.trace.append((tick, v.lane, v.position))
            if v.speed < eps:
                if v.stop_open is None:
                    v.stop_open = (tick, v.lane, v.position)
                    world.total_stops += 1
            elif v.stop_open is not None:
                start, lane, pos = v.stop_open
                v.stops.append(StopEvent(lane, pos, start, tick - start))
                v.stop_open = None
            world.speed_sum += v.speed
            world.vehicle_ticks += 1

    # (4) despawn finished vehicles, then spawn at entry roads
    for v in finished:
        q = queues[v.lane]
        assert q[0] is v
        q.pop(0)
        _finish_vehicle(world, v)
    rng = world.rng
    for road_id, rate in world._spawn_roads:
        if rate <= 0.0 or rng.random() >= rate:
            continue
        exits = world._exits[road_id]
        if not exits:
            continue
        exit_road = exits[rng.randrange(len(exits))]
        route = world._routes[(road_id, exit_road)]
        lane = net.track_by_index[route[0]].in_lane
        q = queues[lane]
        if q and q[-1].position < cfg.s_min:
            continue
        world.queues[lane].append(Vehicle(world._next_id, lane, 0.0, 0.0, route, 0, tick))
        world._next_id += 1
        world.spawned += 1

    world.tick = tick + 1


def run(world: WorldState, until_tick: int | None = None) -> SimulationStats:
    """Step the world to ``until_tick`` (default total_ticks) and aggregate."""
    limit = world.config.total_ticks if until_tick is None else until_tick
    if limit > world.config.total_ticks:
        raise ValueError("until_tick exceeds config.total_ticks")
    while world.tick < limit:
        step(world)
    records = list(world.records)
    for lane_id in world._lane_order:
        for v in world.queues[lane_id]:
            stops = len(v.stops) + (1 if v.stop_open is not None else 0)
            mean = v.speed_sum / v.tick_count if v.tick_count else 0.0
            records.append(VehicleRecord(v.id, v.spawn_tick, None, stops, mean, tuple(v.trace)))
    records.sort(key=lambda r: r.vehicle)
    completed = [r for r in records if r.travel_ticks is not None]
    mean_travel = sum(r.travel_ticks for r in completed) / len(completed) if completed else 0.0
    mean_speed = world.speed_sum / world.vehicle_ticks if world.vehicle_ticks else 0.0
    return SimulationStats(
        spawned=world.spawned,
        completed=world.completed,
        mean_travel_ticks=mean_travel,
        mean_speed=mean_speed,
        total_stops=world.total_stops,
        v_max=world.config.v_max,
        per_vehicle=tuple(records),
    )


def aggregate_fitness(stats: SimulationStats, weights: tuple[float, float] = (0.5, 0.5)) -> float:
    """Convex blend of throughput share and normalized average speed."""
    w_c, w_s = weights
    if w_c < 0 or w_s < 0 or abs(w_c + w_s - 1.0) > 1e-9:
        raise ValueError("weights must be non-negative and sum to 1")
    throughput = stats.completed / max(stats.spawned, 1)
    return w_c * throughput + w_s * stats.mean_speed / stats.v_max


def stats_to_csv(stats: SimulationStats) -> str:
    rows = [
        ("spawned", stats.spawned),
        ("completed", stats.completed),
        ("mean_travel_ticks", stats.mean_travel_ticks),
        ("mean_speed", stats.mean_speed),
        ("total_stops", stats.total_stops),
    ]
    return "metric,value\n" + "".join(f"{k},{v}\n" for k, v in rows)


def per_vehicle_csv(stats: SimulationStats) -> str:
    out = ["vehicle,spawn_tick,travel_ticks,stops,mean_speed\n"]
    for r in stats.per_vehicle:
        travel = "" if r.travel_ticks is None else r.travel_ticks
        out.append(f"{r.vehicle},{r.spawn_tick},{travel},{r.stops},{r.mean_speed}\n")
    return "".join(out)


def traces_to_jsonl(stats: SimulationStats) -> str:
    lines = []
    for r in stats.per_vehicle:
        lines.append(json.dumps({"vehicle": r.vehicle,
                                 "trace": [[t, lane, pos] for t, lane, pos in r.trace]}))
    return "\n".join(lines) + ("\n" if lines else "")
