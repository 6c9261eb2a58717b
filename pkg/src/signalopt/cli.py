"""Command-line front end: validate, simulate, optimize.

Exit codes are a stable contract: 0 success, 1 validation violations,
2 parse errors, 3 infeasible instances.  Every run writes a manifest with
the resolved parameters and input digests so it can be reproduced exactly.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

from . import __version__
from .evo import NoFeasibleIndividual, PbilParams, pbil_run, reports_to_csv
from .lights import (EncodingParams, InfeasibleTrack, programme_from_json,
                     programme_to_json, t_max_per_track, validate_programme)
from .netmodel import ParseError, parse_network, validate_network
from .sim import (SimConfig, init_world, per_vehicle_csv, run, stats_to_csv,
                  traces_to_jsonl)

EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_PARSE = 2
EXIT_INFEASIBLE = 3


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _manifest(subcommand: str, args: dict, inputs: dict[str, Path]) -> str:
    doc = {
        "tool": "signalopt",
        "version": __version__,
        "subcommand": subcommand,
        "params": args,
        "inputs": {name: {"path": str(p), "sha256": _sha256(p)} for name, p in inputs.items()},
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _load_network(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        return None
    try:
        return parse_network(text)
    except ParseError as exc:
        print(f"parse error in {path}: {exc}", file=sys.stderr)
        return None


def _load_programme(path: str):
    try:
        return programme_from_json(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError, KeyError) as exc:
        print(f"parse error in {path}: {exc}", file=sys.stderr)
        return None


def cmd_validate(args: argparse.Namespace) -> int:
    net = _load_network(args.network)
    if net is None:
        return EXIT_PARSE
    violations = validate_network(net)
    if args.programme:
        prog = _load_programme(args.programme)
        if prog is None:
            return EXIT_PARSE
        violations += validate_programme(prog, net)
    for v in violations:
        print(f"{v.rule} [{v.subject}]: {v.message}")
    if violations:
        return EXIT_VIOLATIONS
    print("ok")
    return EXIT_OK


def _sim_config(args: argparse.Namespace) -> SimConfig:
    return SimConfig(tick_ms=args.tau, total_ticks=args.ticks, v_max=args.v_max,
                     a_max=args.a_max, b_max=args.b_max, s_min=args.s_min,
                     seed=args.seed, record_traces=bool(args.traces_out))


def cmd_simulate(args: argparse.Namespace) -> int:
    net = _load_network(args.network)
    if net is None:
        return EXIT_PARSE
    prog = _load_programme(args.programme)
    if prog is None:
        return EXIT_PARSE
    violations = validate_programme(prog, net)
    if violations:
        for v in violations:
            print(f"{v.rule} [{v.subject}]: {v.message}")
        return EXIT_VIOLATIONS
    cfg = _sim_config(args)
    stats = run(init_world(net, prog, cfg))
    out = Path(args.out)
    _write(out, stats_to_csv(stats))
    if args.per_vehicle_out:
        _write(Path(args.per_vehicle_out), per_vehicle_csv(stats))
    if args.traces_out:
        _write(Path(args.traces_out), traces_to_jsonl(stats))
    params = {k: getattr(args, k) for k in
              ("ticks", "tau", "seed", "v_max", "a_max", "b_max", "s_min",
               "out", "per_vehicle_out", "traces_out")}
    _write(out.with_name(out.name + ".manifest.json"),
           _manifest("simulate", params,
                     {"network": Path(args.network), "programme": Path(args.programme)}))
    print(f"simulated {args.ticks} ticks: spawned={stats.spawned} completed={stats.completed}")
    return EXIT_OK


def cmd_optimize(args: argparse.Namespace) -> int:
    net = _load_network(args.network)
    if net is None:
        return EXIT_PARSE
    try:
        w_c, w_s = (float(x) for x in args.weights.split(","))
    except ValueError:
        print(f"error: bad --weights {args.weights!r}, expected like 0.5,0.5", file=sys.stderr)
        return EXIT_PARSE
    params = EncodingParams(cycle_ticks=args.cycle_ticks, t_min=args.t_min,
                            yellow_ticks=args.yellow, red_yellow_ticks=args.red_yellow,
                            repair_gap=args.repair_gap)
    try:
        t_max_per_track(params, net)
    except InfeasibleTrack as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    pbil = PbilParams(theta1=args.theta1, theta2=args.theta2, theta3=args.theta3,
                      pop_size=args.pop_size, max_generations=args.generations,
                      patience=args.patience, seed=args.seed)
    cfg = _sim_config(args)
    try:
        best, reports = pbil_run(net, params, pbil, cfg, weights=(w_c, w_s), jobs=args.jobs)
    except (NoFeasibleIndividual, InfeasibleTrack) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    out_dir = Path(args.out_dir)
    _write(out_dir / "best_programme.json", programme_to_json(best.programme))
    _write(out_dir / "best_chromosome.txt", "".join(map(str, best.chromosome.bits)) + "\n")
    _write(out_dir / "generations.csv", reports_to_csv(reports))
    resolved = {k: getattr(args, k) for k in
                ("generations", "pop_size", "theta1", "theta2", "theta3", "patience",
                 "seed", "weights", "jobs", "cycle_ticks", "t_min", "yellow",
                 "red_yellow", "repair_gap", "ticks", "tau", "v_max", "a_max",
                 "b_max", "s_min", "out_dir")}
    _write(out_dir / "manifest.json",
           _manifest("optimize", resolved, {"network": Path(args.network)}))
    print(f"best fitness {best.fitness} after {reports[-1].generation + 1} generations")
    return EXIT_OK


def _add_sim_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--ticks", type=int, default=1000, help="simulation length in ticks")
    sub.add_argument("--tau", type=int, default=200, help="tick length in milliseconds")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--v-max", dest="v_max", type=float, default=10.0)
    sub.add_argument("--a-max", dest="a_max", type=float, default=2.0)
    sub.add_argument("--b-max", dest="b_max", type=float, default=4.0)
    sub.add_argument("--s-min", dest="s_min", type=float, default=2.0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="signalopt",
                                     description="Traffic-lights programme optimizer "
                                                 "backed by a microscopic simulator")
    parser.add_argument("--version", action="version", version=f"signalopt {__version__}")
    subs = parser.add_subparsers(dest="subcommand", required=True)

    p_val = subs.add_parser("validate", help="check a network (and optional programme)")
    p_val.add_argument("network")
    p_val.add_argument("programme", nargs="?", default=None)
    p_val.set_defaults(func=cmd_validate)

    p_sim = subs.add_parser("simulate", help="run one simulation and export stats")
    p_sim.add_argument("network")
    p_sim.add_argument("programme")
    _add_sim_flags(p_sim)
    p_sim.add_argument("--out", default="stats.csv")
    p_sim.add_argument("--per-vehicle-out", dest="per_vehicle_out", default=None)
    p_sim.add_argument("--traces-out", dest="traces_out", default=None)
    p_sim.set_defaults(func=cmd_simulate)

    p_opt = subs.add_parser("optimize", help="optimize a lights programme with PBIL")
    p_opt.add_argument("network")
    _add_sim_flags(p_opt)
    p_opt.set_defaults(traces_out=None)
    p_opt.add_argument("--generations", type=int, default=30)
    p_opt.add_argument("--pop-size", dest="pop_size", type=int, default=50)
    p_opt.add_argument("--theta1", type=float, default=0.1)
    p_opt.add_argument("--theta2", type=float, default=0.02)
    p_opt.add_argument("--theta3", type=float, default=0.05)
    p_opt.add_argument("--patience", type=int, default=20)
    p_opt.add_argument("--weights", default="0.5,0.5", help="w_completed,w_speed")
    p_opt.add_argument("--jobs", type=int, default=1)
    p_opt.add_argument("--cycle-ticks", dest="cycle_ticks", type=int, default=60)
    p_opt.add_argument("--t-min", dest="t_min", type=int, default=5)
    p_opt.add_argument("--yellow", type=int, default=2)
    p_opt.add_argument("--red-yellow", dest="red_yellow", type=int, default=2)
    p_opt.add_argument("--repair-gap", dest="repair_gap", type=int, default=2)
    p_opt.add_argument("--out-dir", dest="out_dir", default="optimize_out")
    p_opt.set_defaults(func=cmd_optimize)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
