import random

import pytest

from signalopt.fixtures import (grid_2x2, grid_2x2_params, single_junction,
                                single_junction_params)


@pytest.fixture
def junction_net():
    return single_junction()


@pytest.fixture
def junction_params():
    return single_junction_params()


@pytest.fixture
def grid_net():
    return grid_2x2()


@pytest.fixture
def grid_params():
    return grid_2x2_params()


# acceptance tests register one human-readable pass/fail line each; echo
# them at the end of the run so they are visible in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_network(rng: random.Random):
    """A small random but structurally valid network, for round-trip tests."""
    from signalopt.netmodel import (EXTERNAL, Junction, Lane, Road,
                                    RoadNetwork, Track, Trajectory)

    n_junctions = rng.randint(1, 4)
    junctions = tuple(Junction(f"J{i}", rng.uniform(-50, 50), rng.uniform(-50, 50))
                      for i in range(n_junctions))
    roads = []
    # every junction gets one entry and one exit so trajectories always exist
    for i, j in enumerate(junctions):
        roads.append(Road(f"in{i}", EXTERNAL, j.id, rng.uniform(20, 200),
                          round(rng.uniform(0, 0.5), 3)))
        roads.append(Road(f"out{i}", j.id, EXTERNAL, rng.uniform(20, 200)))
    for _ in range(rng.randint(0, 3)):
        a, b = rng.sample(range(n_junctions), k=1) * 2 if n_junctions == 1 else rng.sample(range(n_junctions), 2)
        if a != b:
            roads.append(Road(f"mid{len(roads)}", junctions[a].id, junctions[b].id,
                              rng.uniform(20, 200)))
    lanes = tuple(Lane(f"{r.id}_l", r.id) for r in roads)
    in_lanes = {}
    out_lanes = {}
    for r in roads:
        if r.dst != EXTERNAL:
            in_lanes.setdefault(r.dst, []).append(f"{r.id}_l")
        if r.src != EXTERNAL:
            out_lanes.setdefault(r.src, []).append(f"{r.id}_l")
    trajectories = []
    for j in junctions:
        for _ in range(rng.randint(1, 3)):
            trajectories.append(Trajectory(f"t{len(trajectories)}", j.id,
                                           rng.choice(in_lanes[j.id]),
                                           rng.choice(out_lanes[j.id]),
                                           rng.uniform(5, 30)))
    conflicts = set()
    by_junction = {}
    for t in trajectories:
        by_junction.setdefault(t.junction, []).append(t.id)
    for ids in by_junction.values():
        for _ in range(rng.randint(0, 2)):
            if len(ids) >= 2:
                a, b = rng.sample(ids, 2)
                conflicts.add((a, b) if a < b else (b, a))
    tracks = tuple(Track(i + 1, t.in_lane, t.id, t.out_lane)
                   for i, t in enumerate(trajectories))
    return RoadNetwork(junctions, tuple(roads), lanes, tuple(trajectories),
                       tuple(sorted(conflicts)), tracks)
