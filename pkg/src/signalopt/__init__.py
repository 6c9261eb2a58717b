"""Microscopic traffic simulator with PBIL-based traffic-lights optimization."""

__version__ = "0.1.0"

from .lights import (Chromosome, EncodingParams, LightColor, LightsProgramme,
                     PhaseWindow, bits_per_field, compute_t_max, decode,
                     light_state_at, programme_from_json, programme_to_json,
                     random_chromosome, repair_conflicts, validate_programme)
from .netmodel import (EXTERNAL, ParseError, RoadNetwork, Violation,
                       conflicting_tracks, parse_network, serialize_network,
                       shortest_route, validate_network)
from .sim import (Perception, SimConfig, SimulationStats, WorldState,
                  aggregate_fitness, drive_decision, init_world, run, step)
from .evo import (EvaluatedIndividual, GenerationReport, PbilParams, evaluate,
                  init_probability_vector, mutate_vector, pbil_run,
                  sample_population, update_towards_best)

__all__ = [name for name in dir() if not name.startswith("_")]
