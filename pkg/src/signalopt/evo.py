"""Population-Based Incremental Learning over light-programme chromosomes.

The optimizer keeps one probability per chromosome bit, samples a fresh
population each generation, nudges the vector toward the generation's best
individual and applies a small random drift.  Individuals whose decoded
programme cannot be repaired are replaced by fresh random draws before
evaluation, so every evaluated programme is feasible.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from random import Random

from .lights import (Chromosome, EncodingParams, LightsProgramme, decode,
                     random_chromosome, repair_conflicts)
from .netmodel import RoadNetwork
from .sim import SimConfig, aggregate_fitness, init_world, run

_MASK64 = (1 << 64) - 1
_MIX = 0x9E3779B97F4A7C15  # 64-bit golden-ratio multiplier


class NoFeasibleIndividual(Exception):
    """Random redraws kept hitting irreparable programmes; the instance is over-constrained."""


@dataclass(frozen=True)
class PbilParams:
    theta1: float = 0.1   # learning rate toward the best individual
    theta2: float = 0.02  # per-component mutation probability
    theta3: float = 0.05  # mutation shift magnitude
    pop_size: int = 50
    max_generations: int = 100
    patience: int = 20
    retry_limit: int = 100
    seed: int = 0

    def __post_init__(self):
        for name in ("theta1", "theta2", "theta3"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise ValueError(f"{name} must lie in (0, 1)")
        if self.pop_size < 2:
            raise ValueError("pop_size must be >= 2")


@dataclass(frozen=True)
class EvaluatedIndividual:
    chromosome: Chromosome
    programme: LightsProgramme
    fitness: float
    was_replaced: bool


@dataclass(frozen=True)
class GenerationReport:
    generation: int
    best: float   # all-time best fitness so far (non-decreasing)
    mean: float   # mean fitness of this generation's population
    replacements: int
    entropy: float  # mean per-bit binary entropy of the probability vector


def init_probability_vector(d: int) -> list[float]:
    if d < 1:
        raise ValueError("d must be >= 1")
    return [0.5] * d


def sample_population(p: list[float], pop_size: int, rng: Random) -> list[Chromosome]:
    return [Chromosome(tuple(1 if rng.random() < pk else 0 for pk in p))
            for _ in range(pop_size)]


def update_towards_best(p: list[float], best: Chromosome, theta1: float) -> list[float]:
    if len(p) != len(best.bits):
        raise ValueError("length mismatch")
    return [pk * (1.0 - theta1) + bit * theta1 for pk, bit in zip(p, best.bits)]


def mutate_vector(p: list[float], theta2: float, theta3: float, rng: Random) -> list[float]:
    out = list(p)
    for k in range(len(out)):
        if rng.random() < theta2:
            out[k] = out[k] * (1.0 - theta3) + rng.getrandbits(1) * theta3
    return out


def derive_seed(seed: int, generation: int, index: int) -> int:
    """Stable per-evaluation seed from (run seed, generation, individual index)."""
    s = (seed * _MIX + generation + 1) & _MASK64
    s = (s ^ (s >> 29)) * _MIX & _MASK64
    s = (s + index + 1) * _MIX & _MASK64
    return s ^ (s >> 32)


def evaluate(chrom: Chromosome, net: RoadNetwork, params: EncodingParams,
             cfg: SimConfig, eval_seed: int,
             weights: tuple[float, float] = (0.5, 0.5),
             retry_limit: int = 100) -> EvaluatedIndividual:
    """Decode, repair (or replace), simulate and score one chromosome."""
    rng = Random(eval_seed)
    programme = repair_conflicts(decode(chrom, params, net), net)
    chromosome = chrom
    was_replaced = False
    tries = 0
    while programme is None:
        if tries >= retry_limit:
            raise NoFeasibleIndividual(f"no feasible programme after {retry_limit} redraws")
        chromosome = random_chromosome(net.num_tracks, params.n, rng)
        programme = repair_conflicts(decode(chromosome, params, net), net)
        was_replaced = True
        tries += 1
    sim_seed = rng.getrandbits(63)
    world = init_world(net, programme, replace(cfg, seed=sim_seed, record_traces=False))
    fitness = aggregate_fitness(run(world), weights)
    return EvaluatedIndividual(chromosome, programme, fitness, was_replaced)


def _evaluate_task(args) -> EvaluatedIndividual:
    return evaluate(*args)


def evaluate_population(population: list[Chromosome], net: RoadNetwork,
                        params: EncodingParams, cfg: SimConfig, pbil: PbilParams,
                        generation: int, weights: tuple[float, float],
                        jobs: int = 1) -> list[EvaluatedIndividual]:
    """Evaluate one generation; results are ordered by individual index
    regardless of the worker count."""
    tasks = [(chrom, net, params, cfg, derive_seed(pbil.seed, generation, i),
              weights, pbil.retry_limit)
             for i, chrom in enumerate(population)]
    if jobs <= 1:
        return [_evaluate_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_evaluate_task, tasks))


def _entropy(p: list[float]) -> float:
    total = 0.0
    for pk in p:
        if 0.0 < pk < 1.0:
            total -= pk * math.log2(pk) + (1.0 - pk) * math.log2(1.0 - pk)
    return total / len(p)


def _best_of(evaluated: list[EvaluatedIndividual]) -> EvaluatedIndividual:
    # max fitness; ties go to the lexicographically smallest chromosome
    return min(evaluated, key=lambda e: (-e.fitness, e.chromosome.bits))


def pbil_run(net: RoadNetwork, params: EncodingParams, pbil: PbilParams,
             cfg: SimConfig, weights: tuple[float, float] = (0.5, 0.5),
             jobs: int = 1) -> tuple[EvaluatedIndividual, list[GenerationReport]]:
    """Full PBIL loop; returns the all-time best individual and per-generation reports."""
    d = 2 * net.num_tracks * params.n
    rng = Random(pbil.seed)
    p = init_probability_vector(d)
    population = sample_population(p, pbil.pop_size, rng)
    evaluated = evaluate_population(population, net, params, cfg, pbil, 0, weights, jobs)

    best = _best_of(evaluated)
    reports = [_report(0, best, evaluated, p)]
    stale = 0
    for generation in range(1, pbil.max_generations + 1):
        if stale >= pbil.patience:
            break
        gen_best = _best_of(evaluated)
        p = update_towards_best(p, gen_best.chromosome, pbil.theta1)
        p = mutate_vector(p, pbil.theta2, pbil.theta3, rng)
        population = sample_population(p, pbil.pop_size, rng)
        evaluated = evaluate_population(population, net, params, cfg, pbil,
                                        generation, weights, jobs)
        candidate = _best_of(evaluated)
        if candidate.fitness > best.fitness + 1e-9:
            best = candidate
            stale = 0
        else:
            stale += 1
        reports.append(_report(generation, best, evaluated, p))
    return best, reports


def _report(generation: int, best: EvaluatedIndividual,
            evaluated: list[EvaluatedIndividual], p: list[float]) -> GenerationReport:
    mean = sum(e.fitness for e in evaluated) / len(evaluated)
    replacements = sum(1 for e in evaluated if e.was_replaced)
    return GenerationReport(generation, best.fitness, mean, replacements, _entropy(p))


def reports_to_csv(reports: list[GenerationReport]) -> str:
    out = ["generation,best,mean,replacements,entropy\n"]
    for r in reports:
        out.append(f"{r.generation},{r.best},{r.mean},{r.replacements},{r.entropy}\n")
    return "".join(out)
