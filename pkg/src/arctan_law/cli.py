"""Command-line front end.

    arctan-law tabulate --r 1 --grid log:0.01:100:50 --out law.csv
    arctan-law sample --mechanism path --r 1 --n 10000 --seed 7 --out s.csv
    arctan-law verify --suite all --seed 42 --out report.json
    arctan-law rerun s.csv.manifest.json

Every output file gets a ``<out>.manifest.json`` sidecar holding the command
line, library version and wall-clock time; ``rerun`` replays it. Outputs other
than the sidecar are byte-deterministic for a given command line.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, analytic, levy_passage, simulate, verify
from .streams import MAX_SEED, make_rng

WORKERS_ENV = "ARCTAN_LAW_WORKERS"


class CliError(Exception):
    pass


def format_float(x: float) -> str:
    """Shortest round-trip decimal, with integral values written without ``.0``."""
    text = repr(float(x))
    return text[:-2] if text.endswith(".0") else text


def parse_grid(spec: str) -> np.ndarray:
    try:
        kind, lo, hi, count = spec.split(":")
        lo, hi, count = float(lo), float(hi), int(count)
    except ValueError:
        raise CliError(f"grid must look like lin|log:<min>:<max>:<count>, got {spec!r}") from None
    if count < 1 or not (math.isfinite(lo) and math.isfinite(hi)) or hi < lo or lo < 0:
        raise CliError(f"invalid grid {spec!r}")
    if count == 1:
        if lo != hi:
            raise CliError("a one-point grid needs min == max")
        return np.array([lo])
    if kind == "lin":
        return np.linspace(lo, hi, count)
    if kind == "log":
        if lo <= 0:
            raise CliError("log grid needs min > 0")
        return np.geomspace(lo, hi, count)
    raise CliError(f"grid kind must be lin or log, got {kind!r}")


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value <= MAX_SEED:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _workers(args) -> int:
    if args.workers is not None:
        return args.workers
    env = os.environ.get(WORKERS_ENV)
    return _positive_int(env) if env else 1


def _write_csv(path: Path, header, rows):
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}") from exc


def _write_json(path: Path, payload):
    try:
        Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}") from exc


def manifest(command: str, params: dict, seed, workers) -> dict:
    return {
        "command": command,
        "params": params,
        "seed": seed,
        "workers": workers,
        "version": __version__,
    }


def _write_sidecar(out: Path, base: dict, argv, started: float):
    sidecar = dict(base, argv=list(argv), wall_clock_seconds=time.perf_counter() - started)
    _write_json(Path(str(out) + ".manifest.json"), sidecar)


def cmd_tabulate(args, argv, started):
    grid = parse_grid(args.grid)
    params = analytic.LawParams(args.r)
    rows = []
    for s in grid:
        density = "" if s == 0 else format_float(analytic.arctan_density(s, params))
        rows.append([
            format_float(s),
            format_float(analytic.arctan_cdf(s, params)),
            density,
            format_float(analytic.arctan_survival(s, params)),
        ])
    _write_csv(args.out, ["s", "cdf", "density", "survival"], rows)
    _write_sidecar(args.out, manifest("tabulate", {"r": args.r, "grid": args.grid}, None, None), argv, started)
    return 0


def cmd_sample(args, argv, started):
    workers = _workers(args)
    params = {"mechanism": args.mechanism, "r": args.r, "n": args.n}
    if args.mechanism in ("exact", "lemma"):
        if args.r1 is not None or args.r2 is not None:
            raise CliError("--r1/--r2 apply to the path mechanism only")
        rng = make_rng(args.seed, 0)
        if args.mechanism == "exact":
            draws = simulate.sample_exceedance_exact(args.r, rng, args.n)
        else:
            draws = levy_passage.sample_passage_time(levy_passage.HalfNormal(args.r), rng, args.n)
        _write_csv(args.out, ["s"], ([format_float(x)] for x in draws))
    else:
        config = simulate.PathConfig(
            r=args.r,
            steps_per_unit_time=args.steps_per_unit,
            horizon_multiple=args.horizon_multiple,
            b0=args.b0,
            seed=args.seed,
            workers=workers,
        )
        params.update(steps_per_unit=args.steps_per_unit, horizon_multiple=args.horizon_multiple, b0=args.b0)
        if (args.r1 is None) != (args.r2 is None):
            raise CliError("--r1 and --r2 go together")
        if args.r1 is not None:
            out = simulate.simulate_interval_exceedance(args.r1, args.r2, config, args.n)
            params.update(r1=args.r1, r2=args.r2)
        else:
            out = simulate.simulate_exceedance(config, args.n)
        rows = (
            ["", "1"] if math.isinf(s) else [format_float(s), "0"]
            for s in out.s
        )
        _write_csv(args.out, ["s", "censored"], rows)
    _write_sidecar(args.out, manifest("sample", params, args.seed, workers), argv, started)
    return 0


def cmd_verify(args, argv, started):
    workers = _workers(args)
    checks, ok = verify.run_suite(args.suite, args.seed, workers)
    for check in checks:
        status = "PASS" if check.passed else "FAIL"
        print(f"{status} {check.name}: {check.metric:.6g} < {check.bound:.6g}")
    base = manifest("verify", {"suite": args.suite}, args.seed, workers)
    # results do not depend on the worker count, so the report leaves it to the sidecar
    embedded = {k: v for k, v in base.items() if k != "workers"}
    report = {
        "suite": args.suite,
        "checks": [c.to_dict() for c in checks],
        "overall_pass": ok,
        "manifest": embedded,
    }
    _write_json(args.out, report)
    _write_sidecar(args.out, base, argv, started)
    print("overall: " + ("PASS" if ok else "FAIL"))
    return 0 if ok else 1


def cmd_rerun(args, argv, started):
    try:
        recorded = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
        replay = recorded["argv"]
    except (OSError, ValueError, KeyError) as exc:
        raise CliError(f"cannot read manifest {args.manifest}: {exc}") from exc
    if recorded.get("version") != __version__:
        print(f"warning: manifest written by version {recorded.get('version')}", file=sys.stderr)
    return main(replay)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="arctan-law", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    tab = sub.add_parser("tabulate", help="write s, cdf, density, survival on a grid")
    tab.add_argument("--r", type=float, required=True)
    tab.add_argument("--grid", required=True, help="lin|log:<min>:<max>:<count>")
    tab.add_argument("--out", type=Path, required=True)
    tab.set_defaults(func=cmd_tabulate)

    smp = sub.add_parser("sample", help="draw exceedance times by one mechanism")
    smp.add_argument("--mechanism", choices=("exact", "lemma", "path"), required=True)
    smp.add_argument("--r", type=float, default=1.0)
    smp.add_argument("--r1", type=float)
    smp.add_argument("--r2", type=float)
    smp.add_argument("--n", type=_positive_int, required=True)
    smp.add_argument("--seed", type=_seed, required=True)
    smp.add_argument("--horizon-multiple", type=float, default=10.0)
    smp.add_argument("--steps-per-unit", type=_positive_int, default=1000)
    smp.add_argument("--b0", type=float, default=0.0)
    smp.add_argument("--workers", type=_positive_int)
    smp.add_argument("--out", type=Path, required=True)
    smp.set_defaults(func=cmd_sample)

    ver = sub.add_parser("verify", help="run a verification suite and write a JSON report")
    ver.add_argument("--suite", choices=verify.SUITES + ("all",), required=True)
    ver.add_argument("--seed", type=_seed, required=True)
    ver.add_argument("--workers", type=_positive_int)
    ver.add_argument("--out", type=Path, required=True)
    ver.set_defaults(func=cmd_verify)

    rer = sub.add_parser("rerun", help="replay the command recorded in a manifest")
    rer.add_argument("manifest", type=Path)
    rer.set_defaults(func=cmd_rerun)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    started = time.perf_counter()
    try:
        return args.func(args, argv, started)
    except (CliError, analytic.DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
