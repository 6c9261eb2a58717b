"""Traffic-lights programmes: binary encoding, per-tick colors, feasibility.

A programme assigns each track one green window (start tick, duration)
inside a shared cycle of ``cycle_ticks`` ticks.  The transient phases
(yellow, red+yellow) have fixed durations and wrap the green; red fills
the rest of the cycle.  Collision exclusion between conflicting tracks is
disjointness of the extended windows [start - red_yellow, start + green +
yellow), taken cyclically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from random import Random

from .netmodel import RoadNetwork, UnknownTrack, Violation, conflicting_tracks


class InfeasibleTrack(Exception):
    """A track's maximum green duration falls below the minimum green."""

    def __init__(self, track: int | None, message: str):
        super().__init__(message)
        self.track = track


class LightColor(Enum):
    GREEN = "green"
    YELLOW = "yellow"
    RED = "red"
    RED_YELLOW = "red_yellow"


def bits_per_field(cycle_ticks: int) -> int:
    """Smallest n with cycle_ticks <= 2**n."""
    if cycle_ticks < 1:
        raise ValueError("cycle_ticks must be >= 1")
    return (cycle_ticks - 1).bit_length()


@dataclass(frozen=True)
class EncodingParams:
    """Cycle discretization and the fixed timing constants.

    ``transient_ticks`` (the reserve subtracted from every green budget) is
    always yellow + red+yellow.  ``bit_width`` defaults to the smallest
    field width that can address every tick of the cycle; a wider field
    only changes how many bit patterns alias onto each window.
    """

    cycle_ticks: int
    t_min: int
    yellow_ticks: int = 1
    red_yellow_ticks: int = 1
    repair_gap: int = 0
    bit_width: int | None = None

    def __post_init__(self):
        if self.cycle_ticks < 1:
            raise ValueError("cycle_ticks must be >= 1")
        if not 0 < self.t_min <= 2 ** self.n:
            raise ValueError(f"t_min {self.t_min} outside (0, 2^{self.n}]")
        if self.yellow_ticks < 0 or self.red_yellow_ticks < 0:
            raise ValueError("transient durations must be >= 0")
        if self.repair_gap < 0:
            raise ValueError("repair_gap must be >= 0")
        if self.bit_width is not None and self.bit_width < bits_per_field(self.cycle_ticks):
            raise ValueError("bit_width too small for cycle_ticks")

    @property
    def transient_ticks(self) -> int:
        return self.yellow_ticks + self.red_yellow_ticks

    @property
    def n(self) -> int:
        return self.bit_width if self.bit_width is not None else bits_per_field(self.cycle_ticks)


@dataclass(frozen=True)
class PhaseWindow:
    track: int
    start: int
    green: int


@dataclass(frozen=True)
class LightsProgramme:
    params: EncodingParams
    windows: tuple[PhaseWindow, ...]  # ordered by track index 1..M

    def window(self, track: int) -> PhaseWindow:
        if not 1 <= track <= len(self.windows):
            raise UnknownTrack(track)
        return self.windows[track - 1]


@dataclass(frozen=True)
class Chromosome:
    bits: tuple[int, ...]

    def __post_init__(self):
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("chromosome bits must be 0 or 1")

    def __len__(self) -> int:
        return len(self.bits)

    def field(self, index: int, n: int) -> int:
        """Value of the index-th n-bit field, most-significant-bit first."""
        value = 0
        for b in self.bits[index * n:(index + 1) * n]:
            value = (value << 1) | b
        return value


def random_chromosome(m: int, n: int, rng: Random) -> Chromosome:
    return Chromosome(tuple(rng.getrandbits(1) for _ in range(2 * m * n)))


def compute_t_max(params: EncodingParams, k: int) -> int:
    """Green-duration budget left after k colliding greens and the transient reserve."""
    t_max = params.cycle_ticks - k * params.t_min - params.transient_ticks
    if t_max < params.t_min:
        raise InfeasibleTrack(None, f"t_max {t_max} < t_min {params.t_min} with {k} colliding tracks")
    return t_max


def t_max_per_track(params: EncodingParams, net: RoadNetwork) -> dict[int, int]:
    out = {}
    for t in net.tracks:
        try:
            out[t.index] = compute_t_max(params, len(conflicting_tracks(net, t.index)))
        except InfeasibleTrack as exc:
            raise InfeasibleTrack(t.index, f"track {t.index}: {exc}") from None
    return out


def decode_window(left: int, right: int, params: EncodingParams, t_max: int) -> tuple[int, int]:
    """Map one (L, R) field pair to (start, green)."""
    start = left % params.cycle_ticks
    green = params.t_min + right % (t_max - params.t_min + 1)
    return start, green


def decode(chrom: Chromosome, params: EncodingParams, net: RoadNetwork) -> LightsProgramme:
    """Total decoding: every bit pattern yields a structurally valid programme.

    The result may still violate collision exclusion; see repair_conflicts.
    """
    n = params.n
    expected = 2 * net.num_tracks * n
    if len(chrom) != expected:
        raise ValueError(f"chromosome length {len(chrom)} != 2*M*n = {expected}")
    t_max = t_max_per_track(params, net)
    windows = []
    for t in net.tracks:
        i = t.index - 1
        start, green = decode_window(chrom.field(2 * i, n), chrom.field(2 * i + 1, n), params, t_max[t.index])
        windows.append(PhaseWindow(t.index, start, green))
    return LightsProgramme(params, tuple(windows))


def light_state_at(prog: LightsProgramme, track: int, tick: int) -> LightColor:
    """Color of a track's light at an absolute tick (cyclic timeline)."""
    p = prog.params
    w = prog.window(track)
    rel = (tick - w.start) % p.cycle_ticks
    if rel < w.green:
        return LightColor.GREEN
    if rel < w.green + p.yellow_ticks:
        return LightColor.YELLOW
    if rel >= p.cycle_ticks - p.red_yellow_ticks:
        return LightColor.RED_YELLOW
    return LightColor.RED


def _extended(w: PhaseWindow, params: EncodingParams) -> tuple[int, int]:
    """Cyclic (offset, length) of the green window widened by both transients."""
    return ((w.start - params.red_yellow_ticks) % params.cycle_ticks,
            w.green + params.transient_ticks)


def _cyclic_overlap(a_start: int, a_len: int, b_start: int, b_len: int, cycle: int) -> bool:
    if a_len + b_len > cycle:
        return True
    return ((b_start - a_start) % cycle) < a_len or ((a_start - b_start) % cycle) < b_len


def validate_programme(prog: LightsProgramme, net: RoadNetwork) -> list[Violation]:
    """Feasibility check: green bounds per track, no conflicting-window overlap."""
    p = prog.params
    violations: list[Violation] = []
    if len(prog.windows) != net.num_tracks:
        violations.append(Violation("WindowCount", "programme",
                                    f"{len(prog.windows)} windows for {net.num_tracks} tracks"))
        return violations
    try:
        t_max = t_max_per_track(p, net)
    except InfeasibleTrack as exc:
        return [Violation("InfeasibleTrack", str(exc.track), str(exc))]
    for w in prog.windows:
        if not 0 <= w.start < p.cycle_ticks:
            violations.append(Violation("StartOutOfRange", str(w.track),
                                        f"start {w.start} outside [0, {p.cycle_ticks})"))
        if not p.t_min <= w.green <= t_max[w.track]:
            violations.append(Violation("GreenOutOfRange", str(w.track),
                                        f"green {w.green} outside [{p.t_min}, {t_max[w.track]}]"))
    for a, b in _conflict_track_pairs(net):
        sa, la = _extended(prog.window(a), p)
        sb, lb = _extended(prog.window(b), p)
        if _cyclic_overlap(sa, la, sb, lb, p.cycle_ticks):
            violations.append(Violation("CollisionOverlap", f"{a},{b}",
                                        f"extended windows of tracks {a} and {b} overlap"))
    return violations


def _conflict_track_pairs(net: RoadNetwork) -> list[tuple[int, int]]:
    by_traj = {t.trajectory: t.index for t in net.tracks}
    pairs = []
    for a, b in net.conflicts:
        ia, ib = by_traj[a], by_traj[b]
        pairs.append((ia, ib) if ia < ib else (ib, ia))
    return sorted(pairs)


def repair_conflicts(prog: LightsProgramme, net: RoadNetwork) -> LightsProgramme | None:
    """Deterministic single-pass conflict resolution.

    Conflict pairs are visited in ascending track-index order.  When the
    extended windows of a pair overlap, the later-starting window (ties:
    higher track index) is pushed forward so its extended window begins
    ``repair_gap`` ticks after the other one ends; its green shrinks to
    keep the original end tick, or grows back to t_min when the shrunk
    green would be too short.  Returns None (irreparable) when the pass
    leaves any violation; otherwise the result always validates cleanly.
    """
    p = prog.params
    cycle = p.cycle_ticks
    windows = {w.track: w for w in prog.windows}
    for a, b in _conflict_track_pairs(net):
        wa, wb = windows[a], windows[b]
        sa, la = _extended(wa, p)
        sb, lb = _extended(wb, p)
        if not _cyclic_overlap(sa, la, sb, lb, cycle):
            continue
        if wa.start < wb.start or (wa.start == wb.start and a < b):
            keep, move = wa, wb
        else:
            keep, move = wb, wa
        new_start = (keep.start + keep.green + p.yellow_ticks + p.repair_gap
                     + p.red_yellow_ticks) % cycle
        old_end = (move.start + move.green) % cycle
        new_green = (old_end - new_start) % cycle
        if new_green < p.t_min or new_green > move.green:
            new_green = p.t_min
        windows[move.track] = PhaseWindow(move.track, new_start, new_green)
    repaired = LightsProgramme(p, tuple(windows[t.index] for t in net.tracks))
    if validate_programme(repaired, net):
        return None
    return repaired


def even_split_programme(params: EncodingParams, net: RoadNetwork) -> LightsProgramme:
    """Baseline: each junction's tracks share the cycle in equal slots.

    Track i of a junction with m tracks gets the green
    [i*slot + red_yellow, i*slot + slot - yellow), slot = cycle // m, so
    neighbouring extended windows abut without overlapping.
    """
    per_junction: dict[str, list[int]] = {}
    for t in net.tracks:
        per_junction.setdefault(net.trajectory_by_id[t.trajectory].junction, []).append(t.index)
    windows: dict[int, PhaseWindow] = {}
    for tracks in per_junction.values():
        slot = params.cycle_ticks // len(tracks)
        green = slot - params.transient_ticks
        if green < params.t_min:
            raise InfeasibleTrack(None, f"even split green {green} < t_min {params.t_min}")
        for i, track in enumerate(sorted(tracks)):
            windows[track] = PhaseWindow(track, i * slot + params.red_yellow_ticks, green)
    prog = LightsProgramme(params, tuple(windows[t.index] for t in net.tracks))
    violations = validate_programme(prog, net)
    if violations:
        raise InfeasibleTrack(None, f"even split infeasible: {violations[0].message}")
    return prog


def programme_to_json(prog: LightsProgramme) -> str:
    p = prog.params
    doc = {
        "cycle_ticks": p.cycle_ticks,
        "t_min": p.t_min,
        "yellow_ticks": p.yellow_ticks,
        "red_yellow_ticks": p.red_yellow_ticks,
        "repair_gap": p.repair_gap,
        "windows": [{"track": w.track, "start": w.start, "green": w.green} for w in prog.windows],
    }
    return json.dumps(doc, indent=2) + "\n"


def programme_from_json(text: str) -> LightsProgramme:
    doc = json.loads(text)
    params = EncodingParams(
        cycle_ticks=int(doc["cycle_ticks"]),
        t_min=int(doc["t_min"]),
        yellow_ticks=int(doc["yellow_ticks"]),
        red_yellow_ticks=int(doc["red_yellow_ticks"]),
        repair_gap=int(doc["repair_gap"]),
    )
    windows = tuple(PhaseWindow(int(w["track"]), int(w["start"]), int(w["green"]))
                    for w in doc["windows"])
    return LightsProgramme(params, windows)
