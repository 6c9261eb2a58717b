"""Built-in desk-scale networks used by tests, scripts and the demos.

``single_junction`` is one crossroad with two conflicting through-tracks;
``grid_2x2`` is four junctions joined by one-way arterials, two tracks per
junction, with deliberately unequal demand so that an even green split is
not optimal.
"""

from __future__ import annotations

from .lights import EncodingParams
from .netmodel import (EXTERNAL, Junction, Lane, Road, RoadNetwork, Track,
                       Trajectory)


def single_junction() -> RoadNetwork:
    roads = (
        Road("e_in", EXTERNAL, "J1", 50.0, 0.08),
        Road("n_in", EXTERNAL, "J1", 50.0, 0.15),
        Road("s_out", "J1", EXTERNAL, 30.0),
        Road("w_out", "J1", EXTERNAL, 30.0),
    )
    lanes = tuple(Lane(f"{r.id}_l", r.id) for r in roads)
    trajectories = (
        Trajectory("t_ew", "J1", "e_in_l", "w_out_l", 10.0),
        Trajectory("t_ns", "J1", "n_in_l", "s_out_l", 10.0),
    )
    return RoadNetwork(
        junctions=(Junction("J1", 0.0, 0.0),),
        roads=roads,
        lanes=lanes,
        trajectories=trajectories,
        conflicts=(("t_ew", "t_ns"),),
        tracks=(
            Track(1, "n_in_l", "t_ns", "s_out_l"),
            Track(2, "e_in_l", "t_ew", "w_out_l"),
        ),
    )


def single_junction_params() -> EncodingParams:
    return EncodingParams(cycle_ticks=16, t_min=2, yellow_ticks=1,
                          red_yellow_ticks=1, repair_gap=1)


def grid_2x2() -> RoadNetwork:
    junctions = (
        Junction("J1", 0.0, 0.0),
        Junction("J2", 1.0, 0.0),
        Junction("J3", 0.0, 1.0),
        Junction("J4", 1.0, 1.0),
    )
    # two horizontal one-way arterials (a: east through J1-J2, b: west
    # through J4-J3) and two vertical ones (x: north through J3-J1,
    # y: south through J2-J4)
    roads = (
        Road("a_in", EXTERNAL, "J1", 80.0, 0.10),
        Road("a_mid", "J1", "J2", 90.0),
        Road("a_out", "J2", EXTERNAL, 60.0),
        Road("b_in", EXTERNAL, "J4", 80.0, 0.02),
        Road("b_mid", "J4", "J3", 90.0),
        Road("b_out", "J3", EXTERNAL, 60.0),
        Road("x_in", EXTERNAL, "J3", 80.0, 0.08),
        Road("x_mid", "J3", "J1", 90.0),
        Road("x_out", "J1", EXTERNAL, 60.0),
        Road("y_in", EXTERNAL, "J2", 80.0, 0.02),
        Road("y_mid", "J2", "J4", 90.0),
        Road("y_out", "J4", EXTERNAL, 60.0),
    )
    lanes = tuple(Lane(f"{r.id}_l", r.id) for r in roads)
    trajectories = (
        Trajectory("t_a1", "J1", "a_in_l", "a_mid_l", 12.0),
        Trajectory("t_x1", "J1", "x_mid_l", "x_out_l", 12.0),
        Trajectory("t_a2", "J2", "a_mid_l", "a_out_l", 12.0),
        Trajectory("t_y2", "J2", "y_in_l", "y_mid_l", 12.0),
        Trajectory("t_b3", "J3", "b_mid_l", "b_out_l", 12.0),
        Trajectory("t_x3", "J3", "x_in_l", "x_mid_l", 12.0),
        Trajectory("t_b4", "J4", "b_in_l", "b_mid_l", 12.0),
        Trajectory("t_y4", "J4", "y_mid_l", "y_out_l", 12.0),
    )
    conflicts = (
        ("t_a1", "t_x1"),
        ("t_a2", "t_y2"),
        ("t_b3", "t_x3"),
        ("t_b4", "t_y4"),
    )
    tracks = (
        Track(1, "a_in_l", "t_a1", "a_mid_l"),
        Track(2, "x_mid_l", "t_x1", "x_out_l"),
        Track(3, "a_mid_l", "t_a2", "a_out_l"),
        Track(4, "y_in_l", "t_y2", "y_mid_l"),
        Track(5, "b_mid_l", "t_b3", "b_out_l"),
        Track(6, "x_in_l", "t_x3", "x_mid_l"),
        Track(7, "b_in_l", "t_b4", "b_mid_l"),
        Track(8, "y_mid_l", "t_y4", "y_out_l"),
    )
    return RoadNetwork(junctions, roads, lanes, trajectories,
                       tuple(sorted(conflicts)), tracks)


def grid_2x2_params() -> EncodingParams:
    return EncodingParams(cycle_ticks=32, t_min=4, yellow_ticks=2,
                          red_yellow_ticks=2, repair_gap=2)
