#!/usr/bin/env python3
"""Regenerate the checked-in fixture files from their Python definitions."""

from pathlib import Path

from signalopt.fixtures import (grid_2x2, grid_2x2_params, single_junction,
                                single_junction_params)
from signalopt.lights import even_split_programme, programme_to_json
from signalopt.netmodel import serialize_network

OUT = Path(__file__).resolve().parent.parent / "fixtures"


def main() -> None:
    OUT.mkdir(exist_ok=True)
    for name, net, params in (("single_junction", single_junction(), single_junction_params()),
                              ("grid_2x2", grid_2x2(), grid_2x2_params())):
        (OUT / f"{name}.xml").write_text(serialize_network(net), encoding="utf-8")
        baseline = even_split_programme(params, net)
        (OUT / f"{name}_even_split.json").write_text(programme_to_json(baseline),
                                                     encoding="utf-8")
        print(f"wrote {name}.xml and {name}_even_split.json")


if __name__ == "__main__":
    main()
