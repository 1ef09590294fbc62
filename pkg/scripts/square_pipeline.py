#!/usr/bin/env python3
"""Unit-square walkthrough: build both filtrations, print the diagrams,
and emit the SVG plot next to this script."""

import math
import pathlib

from vkit.complexes import build_cech, build_vr
from vkit.metric import space_from_points
from vkit.persistence import betti_at, compute_diagram
from vkit.plots import persistence_diagram_svg

OUT = pathlib.Path(__file__).parent / "out"


def main() -> None:
    square = space_from_points([[0, 0], [1, 0], [1, 1], [0, 1]])
    for flavor, builder in [("vr", build_vr), ("cech", build_cech)]:
        K = builder(square, math.inf, 2)
        diagram = compute_diagram(K, max_dim=1)
        print(f"== {flavor} filtration ==")
        for dim, birth, death in diagram.intervals:
            print(f"  H{dim}: [{birth:.6f}, {'inf' if math.isinf(death) else f'{death:.6f}'})")
        for r in (0.5, 1.1, 1.5):
            print(f"  betti at r={r}: "
                  f"b0={betti_at(K, r, 0)} b1={betti_at(K, r, 1)}")
        OUT.mkdir(exist_ok=True)
        (OUT / f"square_{flavor}.svg").write_text(
            persistence_diagram_svg(diagram, f"unit square ({flavor})"))
    print(f"plots in {OUT}")


if __name__ == "__main__":
    main()
