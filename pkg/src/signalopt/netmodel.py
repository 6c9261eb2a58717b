"""Road-network data model, XML format, validation and static routing.

The network is a directed graph of one-way roads joined at junctions.
Frontier roads attach to the reserved junction id ``EXTERNAL``; vehicles
spawn on roads leaving EXTERNAL and despawn on roads entering it.  A track
(ingoing lane, junction trajectory, outgoing lane) is the unit controlled
by one traffic light; track indices 1..M fix the chromosome field order.
"""

from __future__ import annotations

import heapq
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from functools import cached_property

EXTERNAL = "EXTERNAL"


class ParseError(Exception):
    """Raised for any malformed network document.

    ``kind`` is one of MalformedXml, UnknownElement, InvalidAttribute,
    DuplicateId, UnknownReference, MissingLane, or the rule name of the
    first structural violation.
    """

    def __init__(self, kind: str, message: str):
        super().__init__(f"{kind}: {message}")
        self.kind = kind
        self.message = message


class UnknownTrack(KeyError):
    pass


@dataclass(frozen=True)
class Violation:
    rule: str
    subject: str
    message: str


@dataclass(frozen=True)
class Junction:
    id: str
    x: float = 0.0
    y: float = 0.0


@dataclass(frozen=True)
class Road:
    id: str
    src: str
    dst: str
    length: float
    spawn_rate: float = 0.0


@dataclass(frozen=True)
class Lane:
    id: str
    road: str


@dataclass(frozen=True)
class Trajectory:
    id: str
    junction: str
    in_lane: str
    out_lane: str
    crossing_length: float


@dataclass(frozen=True)
class Track:
    index: int
    in_lane: str
    trajectory: str
    out_lane: str


@dataclass(frozen=True)
class RoadNetwork:
    junctions: tuple[Junction, ...]
    roads: tuple[Road, ...]
    lanes: tuple[Lane, ...]
    trajectories: tuple[Trajectory, ...]
    conflicts: tuple[tuple[str, str], ...]  # sorted pairs, sorted list
    tracks: tuple[Track, ...]  # ordered by index

    @property
    def num_tracks(self) -> int:
        return len(self.tracks)

    @cached_property
    def junction_by_id(self) -> dict[str, Junction]:
        return {j.id: j for j in self.junctions}

    @cached_property
    def road_by_id(self) -> dict[str, Road]:
        return {r.id: r for r in self.roads}

    @cached_property
    def lane_by_id(self) -> dict[str, Lane]:
        return {l.id: l for l in self.lanes}

    @cached_property
    def trajectory_by_id(self) -> dict[str, Trajectory]:
        return {t.id: t for t in self.trajectories}

    @cached_property
    def track_by_index(self) -> dict[int, Track]:
        return {t.index: t for t in self.tracks}

    @cached_property
    def lanes_of_road(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, list[str]] = {r.id: [] for r in self.roads}
        for lane in self.lanes:
            if lane.road in out:
                out[lane.road].append(lane.id)
        return {rid: tuple(sorted(ids)) for rid, ids in out.items()}

    @cached_property
    def entry_roads(self) -> tuple[str, ...]:
        return tuple(sorted(r.id for r in self.roads if r.src == EXTERNAL))

    @cached_property
    def exit_roads(self) -> tuple[str, ...]:
        return tuple(sorted(r.id for r in self.roads if r.dst == EXTERNAL))

    def road_of_lane(self, lane_id: str) -> Road:
        return self.road_by_id[self.lane_by_id[lane_id].road]


def _attr(elem: ET.Element, name: str, line: str) -> str:
    value = elem.get(name)
    if value is None:
        raise ParseError("InvalidAttribute", f"<{elem.tag}> {line}: missing '{name}'")
    return value


def _float_attr(elem: ET.Element, name: str, line: str) -> float:
    raw = _attr(elem, name, line)
    try:
        value = float(raw)
    except ValueError:
        raise ParseError("InvalidAttribute", f"<{elem.tag}> {line}: '{name}'={raw!r} is not a number") from None
    return value


def parse_network(document: str) -> RoadNetwork:
    """Parse an XML network document; raises :class:`ParseError` on any defect.

    A returned network always satisfies every structural invariant
    (``validate_network`` on it yields no violations).
    """
    try:
        root = ET.fromstring(document)
    except ET.ParseError as exc:
        raise ParseError("MalformedXml", str(exc)) from None
    if root.tag != "network":
        raise ParseError("MalformedXml", f"root element is <{root.tag}>, expected <network>")

    junctions: list[Junction] = []
    roads: list[Road] = []
    lanes: list[Lane] = []
    trajectories: list[Trajectory] = []
    conflicts: list[tuple[str, str]] = []
    tracks: list[Track] = []
    seen_ids: set[str] = set()

    def claim(identifier: str, what: str) -> None:
        if identifier in seen_ids:
            raise ParseError("DuplicateId", f"{what} id {identifier!r} already used")
        seen_ids.add(identifier)

    for pos, elem in enumerate(root, start=1):
        where = f"element #{pos}"
        if elem.tag == "junction":
            jid = _attr(elem, "id", where)
            if jid == EXTERNAL:
                raise ParseError("InvalidAttribute", f"{where}: junction id {EXTERNAL!r} is reserved")
            claim(jid, "junction")
            junctions.append(Junction(jid, _float_attr(elem, "x", where), _float_attr(elem, "y", where)))
        elif elem.tag == "road":
            rid = _attr(elem, "id", where)
            claim(rid, "road")
            rate_raw = elem.get("spawn_rate")
            rate = float(rate_raw) if rate_raw is not None else 0.0
            roads.append(Road(rid, _attr(elem, "from", where), _attr(elem, "to", where),
                              _float_attr(elem, "length", where), rate))
        elif elem.tag == "lane":
            lid = _attr(elem, "id", where)
            claim(lid, "lane")
            lanes.append(Lane(lid, _attr(elem, "road", where)))
        elif elem.tag == "trajectory":
            tid = _attr(elem, "id", where)
            claim(tid, "trajectory")
            trajectories.append(Trajectory(tid, _attr(elem, "junction", where),
                                           _attr(elem, "in", where), _attr(elem, "out", where),
                                           _float_attr(elem, "length", where)))
        elif elem.tag == "conflict":
            a, b = _attr(elem, "a", where), _attr(elem, "b", where)
            conflicts.append((a, b) if a <= b else (b, a))
        elif elem.tag == "track":
            raw = _attr(elem, "id", where)
            try:
                index = int(raw)
            except ValueError:
                raise ParseError("InvalidAttribute", f"{where}: track id {raw!r} is not an integer") from None
            tracks.append(Track(index, _attr(elem, "in", where), _attr(elem, "trajectory", where),
                                _attr(elem, "out", where)))
        else:
            raise ParseError("UnknownElement", f"{where}: unexpected <{elem.tag}>")

    net = RoadNetwork(tuple(junctions), tuple(roads), tuple(lanes), tuple(trajectories),
                      tuple(sorted(set(conflicts))), tuple(sorted(tracks, key=lambda t: t.index)))
    violations = validate_network(net)
    if violations:
        first = violations[0]
        raise ParseError(first.rule, f"{first.subject}: {first.message}")
    return net


def _fmt(value: float) -> str:
    # repr round-trips floats exactly; integral values stay short
    return repr(int(value)) if value == int(value) else repr(value)


def serialize_network(net: RoadNetwork) -> str:
    """Canonical XML form; ``parse_network(serialize_network(net)) == net``."""
    out = ["<network>"]
    for j in net.junctions:
        out.append(f'  <junction id="{j.id}" x="{_fmt(j.x)}" y="{_fmt(j.y)}"/>')
    for r in net.roads:
        rate = f' spawn_rate="{_fmt(r.spawn_rate)}"' if r.spawn_rate else ""
        out.append(f'  <road id="{r.id}" from="{r.src}" to="{r.dst}" length="{_fmt(r.length)}"{rate}/>')
    for l in net.lanes:
        out.append(f'  <lane id="{l.id}" road="{l.road}"/>')
    for t in net.trajectories:
        out.append(f'  <trajectory id="{t.id}" junction="{t.junction}" in="{t.in_lane}"'
                   f' out="{t.out_lane}" length="{_fmt(t.crossing_length)}"/>')
    for a, b in net.conflicts:
        out.append(f'  <conflict a="{a}" b="{b}"/>')
    for t in net.tracks:
        out.append(f'  <track id="{t.index}" in="{t.in_lane}" trajectory="{t.trajectory}" out="{t.out_lane}"/>')
    out.append("</network>")
    return "\n".join(out) + "\n"


def validate_network(net: RoadNetwork) -> list[Violation]:
    """Structural checks; an empty list means every invariant holds."""
    violations: list[Violation] = []

    def bad(rule: str, subject: str, message: str) -> None:
        violations.append(Violation(rule, subject, message))

    junction_ids = {j.id for j in net.junctions}
    road_ids = {r.id for r in net.roads}
    lane_ids = {l.id for l in net.lanes}
    traj_ids = {t.id for t in net.trajectories}

    for group, count in (("junction", len(net.junctions)), ("road", len(net.roads)),
                         ("lane", len(net.lanes)), ("trajectory", len(net.trajectories))):
        ids = {"junction": junction_ids, "road": road_ids, "lane": lane_ids, "trajectory": traj_ids}[group]
        if len(ids) != count:
            bad("DuplicateId", group, f"duplicate {group} ids")

    for r in net.roads:
        if r.length <= 0:
            bad("InvalidAttribute", r.id, f"road length {r.length} must be > 0")
        if not 0.0 <= r.spawn_rate <= 1.0:
            bad("InvalidAttribute", r.id, f"spawn_rate {r.spawn_rate} outside [0, 1]")
        if r.src == EXTERNAL and r.dst == EXTERNAL:
            bad("InvalidAttribute", r.id, "road cannot join EXTERNAL to EXTERNAL")
        for end in (r.src, r.dst):
            if end != EXTERNAL and end not in junction_ids:
                bad("UnknownReference", r.id, f"road endpoint {end!r} is not a junction")
        if r.src != EXTERNAL and r.spawn_rate != 0.0:
            bad("InvalidAttribute", r.id, "spawn_rate only meaningful on entry roads")

    roads_with_lanes = {l.road for l in net.lanes}
    for l in net.lanes:
        if l.road not in road_ids:
            bad("UnknownReference", l.id, f"lane road {l.road!r} does not exist")
    for r in net.roads:
        if r.id not in roads_with_lanes:
            bad("MissingLane", r.id, "road has no lane")

    lane_map = {l.id: l for l in net.lanes}
    road_map = {r.id: r for r in net.roads}
    for t in net.trajectories:
        if t.junction not in junction_ids:
            bad("UnknownReference", t.id, f"junction {t.junction!r} does not exist")
        if t.crossing_length <= 0:
            bad("InvalidAttribute", t.id, f"crossing length {t.crossing_length} must be > 0")
        for attr, lane_id in (("in", t.in_lane), ("out", t.out_lane)):
            if lane_id not in lane_ids:
                bad("UnknownReference", t.id, f"{attr} lane {lane_id!r} does not exist")
        if t.in_lane in lane_ids and t.junction in junction_ids:
            road = road_map.get(lane_map[t.in_lane].road)
            if road is not None and road.dst != t.junction:
                bad("LaneJunctionMismatch", t.id, f"in lane's road ends at {road.dst!r}, not {t.junction!r}")
        if t.out_lane in lane_ids and t.junction in junction_ids:
            road = road_map.get(lane_map[t.out_lane].road)
            if road is not None and road.src != t.junction:
                bad("LaneJunctionMismatch", t.id, f"out lane's road starts at {road.src!r}, not {t.junction!r}")

    traj_map = {t.id: t for t in net.trajectories}
    seen_pairs: set[tuple[str, str]] = set()
    for a, b in net.conflicts:
        if a == b:
            bad("SelfConflict", a, "trajectory cannot conflict with itself")
            continue
        pair = (a, b) if a <= b else (b, a)
        if pair in seen_pairs:
            bad("DuplicateConflict", f"{a},{b}", "conflict pair stored twice")
        seen_pairs.add(pair)
        missing = [t for t in pair if t not in traj_ids]
        if missing:
            bad("UnknownReference", f"{a},{b}", f"conflict references unknown trajectory {missing[0]!r}")
            continue
        if traj_map[a].junction != traj_map[b].junction:
            bad("CrossJunctionConflict", f"{a},{b}", "conflicting trajectories lie at different junctions")

    indices = sorted(t.index for t in net.tracks)
    if indices != list(range(1, len(net.tracks) + 1)):
        bad("TrackIndexGap", "tracks", f"track indices {indices} are not dense 1..M")
    tracked: set[str] = set()
    for t in net.tracks:
        if t.trajectory not in traj_ids:
            bad("UnknownReference", str(t.index), f"track trajectory {t.trajectory!r} does not exist")
            continue
        traj = traj_map[t.trajectory]
        if (t.in_lane, t.out_lane) != (traj.in_lane, traj.out_lane):
            bad("TrackLaneMismatch", str(t.index), "track lanes do not match its trajectory")
        if t.trajectory in tracked:
            bad("DuplicateTrack", str(t.index), f"trajectory {t.trajectory!r} appears in two tracks")
        tracked.add(t.trajectory)
    for tid in traj_ids - tracked:
        bad("UntrackedTrajectory", tid, "trajectory belongs to no track")

    return violations


def conflicting_tracks(net: RoadNetwork, track_index: int) -> set[int]:
    """Indices of all tracks whose trajectory conflicts with the given track's."""
    try:
        own = net.track_by_index[track_index].trajectory
    except KeyError:
        raise UnknownTrack(track_index) from None
    hostile = {b for a, b in net.conflicts if a == own} | {a for a, b in net.conflicts if b == own}
    return {t.index for t in net.tracks if t.trajectory in hostile}


def shortest_route(net: RoadNetwork, entry: str, exit: str) -> tuple[int, ...] | None:
    """Minimum-total-length track sequence from an entry road to an exit road.

    Length is entry road length plus, per track taken, its crossing length
    and the outgoing road length.  Ties break on the lexicographically
    smallest track-index sequence; None when the exit is unreachable.
    """
    entry_road = net.road_by_id[entry]
    if entry_road.src != EXTERNAL:
        raise ValueError(f"{entry!r} is not an entry road")
    if net.road_by_id[exit].dst != EXTERNAL:
        raise ValueError(f"{exit!r} is not an exit road")

    tracks_from: dict[str, list[Track]] = {}
    for t in net.tracks:
        tracks_from.setdefault(net.road_of_lane(t.in_lane).id, []).append(t)

    heap: list[tuple[float, tuple[int, ...], str]] = [(entry_road.length, (), entry)]
    done: set[str] = set()
    while heap:
        dist, path, road = heapq.heappop(heap)
        if road == exit:
            return path
        if road in done:
            continue
        done.add(road)
        for t in tracks_from.get(road, ()):
            out_road = net.road_of_lane(t.out_lane)
            if out_road.id in done:
                continue
            step = net.trajectory_by_id[t.trajectory].crossing_length + out_road.length
            heapq.heappush(heap, (dist + step, path + (t.index,), out_road.id))
    return None


def reachable_exits(net: RoadNetwork, entry: str) -> tuple[str, ...]:
    """Exit roads reachable from an entry road, in sorted road-id order."""
    tracks_from: dict[str, list[Track]] = {}
    for t in net.tracks:
        tracks_from.setdefault(net.road_of_lane(t.in_lane).id, []).append(t)
    seen = {entry}
    frontier = [entry]
    while frontier:
        road = frontier.pop()
        for t in tracks_from.get(road, ()):
            nxt = net.road_of_lane(t.out_lane).id
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return tuple(sorted(r for r in seen if net.road_by_id[r].dst == EXTERNAL))
