"""Command-line front end.

Subcommands: ``persist`` (diagram CSV + SVG from a CSV space), ``fk``
(OFF mesh + certificate JSON for a cube triangulation), ``straighten``
(certification log for a sampled map), ``verify`` (randomized property
suites).  Exit codes: 0 ok, 1 property failure, 2 input error, 3 pipeline
stage failure.  Identical (config, seed) pairs produce byte-identical
outputs.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .complexes import build_cech, build_vr
from .fk import FKTriangulation, build_fk
from .generators import GENERATORS
from .measures import FiniteMeasure
from .metric import (Cover, FiniteMetricSpace, MetricValidationError,
                     load_space_csv, space_from_points, validate_metric)
from .persistence import compute_diagram
from .plots import persistence_diagram_svg
from .straightening import PipelineError, SampledMap, straighten
from .verify import run_all

DEFAULT_SEED = 1729

EXIT_OK = 0
EXIT_PROPERTY = 1
EXIT_INPUT = 2
EXIT_PIPELINE = 3

FK_CELL_GUARD = 10 ** 6


def thread_cap() -> int:
    """Parallelism cap from VKIT_THREADS; all current paths are serial, so a
    cap of 1 is always honored, but the variable is validated here."""
    raw = os.environ.get("VKIT_THREADS")
    if raw is None:
        return 1
    cap = int(raw)
    if cap < 1:
        raise ValueError("VKIT_THREADS must be a positive integer")
    return cap


@dataclass
class RunConfig:
    command: str
    input: str | None = None
    input_kind: str = "auto"
    filtration: str = "vr"
    r: float | None = None
    kmax: int = 2
    n: int = 1
    res: int = 4
    pmass: float | None = None
    seed: int = DEFAULT_SEED
    out: str = "vkit-out"
    trials: int = 100


def _outdir(cfg: RunConfig) -> Path:
    path = Path(cfg.out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _fail_input(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return EXIT_INPUT


def cmd_persist(cfg: RunConfig) -> int:
    try:
        space = load_space_csv(cfg.input, kind=cfg.input_kind)
    except (OSError, ValueError, MetricValidationError) as exc:
        return _fail_input(f"cannot load {cfg.input}: {exc}")
    if cfg.kmax < 1:
        return _fail_input("persistence needs --kmax >= 1")
    r = cfg.r if cfg.r is not None else math.inf
    builder = build_cech if cfg.filtration == "cech" else build_vr
    K = builder(space, r, cfg.kmax)
    diagram = compute_diagram(K, max_dim=cfg.kmax - 1)
    out = _outdir(cfg)
    (out / "diagram.csv").write_text(diagram.to_csv())
    title = f"{cfg.filtration} persistence ({Path(cfg.input).name})"
    (out / "diagram.svg").write_text(persistence_diagram_svg(diagram, title))
    print(f"wrote {out / 'diagram.csv'} and {out / 'diagram.svg'} "
          f"({len(diagram.intervals)} intervals)")
    return EXIT_OK


def _max_vertex_star(tri: FKTriangulation) -> int:
    """Max star over the 3^n boundary patterns; stars are translation
    invariant inside each pattern, so one representative per pattern suffices."""
    per_axis = [0, tri.p] if tri.p == 1 else [0, 1, tri.p]
    best = 0
    from itertools import product
    for v in {tuple(c) for c in product(per_axis, repeat=tri.n)}:
        best = max(best, tri.vertex_star_size(v))
    return best


def cmd_fk(cfg: RunConfig) -> int:
    if cfg.n < 1 or cfg.res < 1:
        return _fail_input("need --n >= 1 and --res >= 1")
    if math.factorial(cfg.n) * cfg.res ** cfg.n > FK_CELL_GUARD:
        return _fail_input(f"n! * p^n exceeds the resource guard {FK_CELL_GUARD}")
    if cfg.n > 4:
        return _fail_input("mesh export supports n <= 4")
    tri = build_fk(cfg.n, cfg.res)
    out = _outdir(cfg)
    (out / "mesh.off").write_text(tri.to_off())
    first = next(tri.simplices())
    verts = tri.scaled_vertices(first)
    diam = max(float(np.linalg.norm(a - b))
               for i, a in enumerate(verts) for b in verts[i + 1:])
    cert = {
        "n": tri.n,
        "p": tri.p,
        "simplex_count": tri.simplex_count,
        "max_vertex_star": _max_vertex_star(tri),
        "max_diameter": diam,
    }
    (out / "certificate.json").write_text(json.dumps(cert, indent=2, sort_keys=True) + "\n")
    print(f"wrote {out / 'mesh.off'} and {out / 'certificate.json'}")
    return EXIT_OK


def _map_from_spec(spec: dict) -> tuple[FiniteMetricSpace, Cover, SampledMap]:
    if "generator" in spec:
        name = spec["generator"]
        if name not in GENERATORS:
            raise ValueError(f"unknown generator {name!r}; have {sorted(GENERATORS)}")
        kwargs = {k: v for k, v in spec.items() if k != "generator"}
        return GENERATORS[name](**kwargs)
    if "points" in spec:
        space = space_from_points(spec["points"])
    elif "distances" in spec:
        space = validate_metric(spec["distances"])
    else:
        raise ValueError("map spec needs 'generator', 'points', or 'distances'")
    cov_spec = spec["cover"]
    if isinstance(cov_spec, dict) and "balls" in cov_spec:
        cover = Cover.by_balls(space, float(cov_spec["balls"]))
    else:
        cover = Cover.explicit(space, cov_spec)
    n, res = int(spec["n"]), int(spec["res"])
    tri = FKTriangulation(n, res)
    values = {}
    for key, m in spec["vertices"].items():
        vertex = tuple(int(c) for c in key.split(","))
        values[vertex] = FiniteMeasure(space, tuple(m["support"]), tuple(m["weights"]))
    return space, cover, SampledMap(tri, values)


def cmd_straighten(cfg: RunConfig) -> int:
    try:
        with open(cfg.input) as fh:
            spec = json.load(fh)
        space, cover, smap = _map_from_spec(spec)
    except (OSError, ValueError, KeyError, MetricValidationError) as exc:
        return _fail_input(f"cannot build map from {cfg.input}: {exc}")
    out = _outdir(cfg)
    try:
        gmap, log = straighten(smap, cover, p_mass=cfg.pmass)
    except PipelineError as exc:
        (out / "certification.jsonl").write_text("")
        summary = {"all_pass": False, "failed_stage": exc.stage, "error": str(exc.cause)}
        (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
        print(f"pipeline failed at stage {exc.stage!r}: {exc.cause}", file=sys.stderr)
        return EXIT_PIPELINE
    (out / "certification.jsonl").write_text(log.to_jsonl())
    stages = log.stage_counts()
    summary = {
        "all_pass": log.all_pass(),
        "stages": stages,
        "resolution": gmap.tri.p,
        "dimension": gmap.tri.n,
        "vertices": {
            ",".join(str(c) for c in v): json.loads(gmap.values[v].to_json())
            for v in sorted(gmap.values)
        },
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    total = sum(c["pass"] + c["fail"] for c in stages.values())
    failed = sum(c["fail"] for c in stages.values())
    print(f"wrote {out / 'certification.jsonl'} ({total} checks, {failed} failures)")
    return EXIT_OK if log.all_pass() else EXIT_PIPELINE


def cmd_verify(cfg: RunConfig) -> int:
    failures = 0
    rows = []
    if cfg.input is not None:
        try:
            load_space_csv(cfg.input, kind=cfg.input_kind)
            rows.append(("input-validation", 1, 0, ""))
        except (OSError, ValueError, MetricValidationError) as exc:
            rows.append(("input-validation", 1, 1, str(exc)))
            failures += 1
    if cfg.trials == 0:
        print("warning: --trials 0 makes every randomized check vacuous", file=sys.stderr)
    for res in run_all(cfg.seed, cfg.trials):
        rows.append((res.name, res.trials, res.failures, res.note))
        failures += res.failures
    width = max(len(r[0]) for r in rows)
    print(f"{'check'.ljust(width)}  trials  failures  status")
    for name, trials, fail, note in rows:
        status = "ok" if fail == 0 else "FAIL"
        suffix = f"  ({note})" if note else ""
        print(f"{name.ljust(width)}  {trials:>6}  {fail:>8}  {status}{suffix}")
    return EXIT_OK if failures == 0 else EXIT_PROPERTY


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vkit",
        description="complexes, measure geometry, cube triangulations, "
                    "straightening, and persistence at desk scale")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("persist", help="persistence diagram of a CSV space")
    p.add_argument("--input", required=True)
    p.add_argument("--input-kind", choices=["auto", "points", "matrix"], default="auto")
    p.add_argument("--filtration", choices=["vr", "cech"], default="vr")
    p.add_argument("--r", type=float, default=None, help="truncate the filtration at r")
    p.add_argument("--kmax", type=int, default=2)
    p.add_argument("--out", default="vkit-out")

    p = sub.add_parser("fk", help="export a cube triangulation and its certificate")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--res", type=int, required=True)
    p.add_argument("--out", default="vkit-out")

    p = sub.add_parser("straighten", help="run the straightening pipeline on a map spec")
    p.add_argument("--input", required=True, help="JSON map spec or generator config")
    p.add_argument("--pmass", type=float, default=None)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out", default="vkit-out")

    p = sub.add_parser("verify", help="run the randomized property suites")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--input", default=None, help="optional metric CSV to validate")
    p.add_argument("--input-kind", choices=["auto", "points", "matrix"], default="auto")
    return parser


def main(argv=None) -> int:
    thread_cap()
    args = make_parser().parse_args(argv)
    cfg = RunConfig(command=args.command)
    for name in ("input", "input_kind", "filtration", "r", "kmax", "n", "res",
                 "pmass", "seed", "out", "trials"):
        if hasattr(args, name):
            setattr(cfg, name, getattr(args, name))
    handlers = {
        "persist": cmd_persist,
        "fk": cmd_fk,
        "straighten": cmd_straighten,
        "verify": cmd_verify,
    }
    return handlers[cfg.command](cfg)


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
