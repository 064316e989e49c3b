"""Command line entry point: ``pcpmoea {run,metrics,partition,plotdata,validate}``.

Exit codes: 0 success, 1 usage error, 2 data error.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields
from pathlib import Path

import numpy as np

from . import frontfile
from .experiment import ExperimentSpec, run_experiment
from .master import RunConfig
from .metrics import compare_fronts
from .momkp import InstanceFormatError, load_instance
from .partition import partition

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2

# flag name -> RunConfig field
RUN_FLAGS = {
    "pop_size": "pop_size",
    "alpha": "alpha",
    "period": "period",
    "budget": "budget",
    "pc": "crossover_probability",
    "pm": "mutation_probability",
    "seed": "seed",
    "mode": "mode",
}


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def read_config(path) -> dict:
    """Flat ``key = value`` file; '#' starts a comment, dashes equal underscores."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, _, value = line.partition("=")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise UsageError(f"expected a list of numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pcpmoea", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="run repeated experiments on one instance")
    p.add_argument("--config", help="key=value file; flags override it")
    p.add_argument("--instance")
    p.add_argument("--pop-size", type=int, dest="pop_size")
    p.add_argument("--alpha", type=float)
    p.add_argument("--period", type=int)
    p.add_argument("--budget", type=int, help="generations per worker")
    p.add_argument("--pc", type=float, help="crossover probability")
    p.add_argument("--pm", type=float, help="mutation probability")
    p.add_argument("--seed", type=int)
    p.add_argument("--reps", type=int)
    p.add_argument("--mode", choices=("sync", "async"))
    p.add_argument("--jobs", type=int, help="repetitions run in parallel")
    p.add_argument("--out")

    p = sub.add_parser("metrics", help="compare front files")
    p.add_argument("fronts", nargs="+")
    p.add_argument("--reference", help="reference front for IGD (default: merged fronts)")
    p.add_argument("--ref-point", dest="ref_point", help="hypervolume reference, default origin")
    p.add_argument("--ideal", help="ideal vector for ID (default: ideal of the reference front)")
    p.add_argument("--igd-mean", dest="igd_mean", action="store_true",
                   help="mean nearest distance instead of root-sum-of-squares / |PF|")
    p.add_argument("--out", help="write the report as JSON here")

    p = sub.add_parser("partition", help="show the quantile partition of a front")
    p.add_argument("front")
    p.add_argument("--alpha", type=float, default=0.25)
    p.add_argument("--out", help="directory for one front file per part")

    p = sub.add_parser("plotdata", help="column files for plotting")
    p.add_argument("fronts", nargs="+")
    p.add_argument("--out", default=".")

    p = sub.add_parser("validate", help="check instance and front files")
    p.add_argument("fronts", nargs="*")
    p.add_argument("--instance")
    return parser


def _label(path) -> str:
    return Path(path).name


def _read_fronts(paths) -> dict:
    fronts = {}
    for path in paths:
        label = _label(path)
        if label in fronts:
            label = str(path)
        fronts[label] = frontfile.read_front(path)
    return fronts


def cmd_run(args) -> int:
    cfg_values = read_config(args.config) if args.config else {}
    def pick(name, default=None):
        value = getattr(args, name, None)
        return value if value is not None else cfg_values.get(name, default)

    instance = pick("instance")
    if not instance:
        raise UsageError("--instance is required (flag or config file)")
    kwargs = {}
    types = {f.name: f.type for f in fields(RunConfig)}
    for flag, field_name in RUN_FLAGS.items():
        value = pick(flag)
        if value is None:
            value = cfg_values.get(field_name)
        if value is None:
            continue
        caster = {"int": int, "float": float, "str": str}[str(types[field_name])]
        try:
            kwargs[field_name] = caster(value)
        except ValueError:
            raise UsageError(f"bad value for {flag}: {value!r}") from None
    try:
        cfg = RunConfig(**kwargs)
        spec = ExperimentSpec(
            instance_path=instance,
            config=cfg,
            repetitions=int(pick("reps", 15)),
            out=pick("out", "results"),
            jobs=int(pick("jobs", 1)),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    result = run_experiment(spec)
    for path in result["paths"]:
        print(path)
    return EXIT_OK


def cmd_metrics(args) -> int:
    fronts = _read_fronts(args.fronts)
    arrays = {label: f.array() for label, f in fronts.items()}
    reference = frontfile.read_front(args.reference).array() if args.reference else None
    ref_point = _floats(args.ref_point) if args.ref_point else None
    ideal = _floats(args.ideal) if args.ideal else None
    reports = compare_fronts(arrays, reference, ref_point, ideal, args.igd_mean)
    print(format_reports(reports))
    if args.out:
        Path(args.out).write_text(json.dumps([r.as_dict() for r in reports], indent=2) + "\n")
    return EXIT_OK


def format_reports(reports) -> str:
    lines = [f"{'front':<24} {'size':>6} {'HV':>16} {'IGD':>12} {'ID':>12} {'SP':>12}"]
    for r in reports:
        lines.append(
            f"{r.label:<24} {r.size:>6} {r.hypervolume:>16.6e} {r.igd:>12.6f} "
            f"{r.ideal_distance:>12.6f} {r.spacing:>12.6f}"
        )
    if len(reports) > 1:
        labels = [r.label for r in reports]
        lines.append("")
        lines.append("coverage C(row, column)")
        lines.append(f"{'':<24} " + " ".join(f"{l[:12]:>12}" for l in labels))
        for r in reports:
            cells = [
                "-".rjust(12) if l == r.label else f"{r.coverage_vs[l][0]:>12.4f}" for l in labels
            ]
            lines.append(f"{r.label:<24} " + " ".join(cells))
    return "\n".join(lines)


def cmd_partition(args) -> int:
    front = frontfile.read_front(args.front)
    if not len(front):
        raise DataError("front is empty")
    try:
        result = partition(front.individuals(), args.alpha, front.k)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print(f"|P| = {len(front)}, alpha = {args.alpha}, |F| = {len(result.shared)}, "
          f"orphans reassigned = {len(result.orphans)}")
    for i, part in enumerate(result.parts):
        print(f"part {i + 1}: {len(part)} points")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        stem = Path(args.front).stem
        for i, part in enumerate(result.parts):
            members = list(part)
            pf = frontfile.FrontFile(
                header={**front.header, "part": i + 1, "alpha": args.alpha},
                objectives=[m.objectives for m in members],
                genotypes=[m.bits for m in members] if front.genotypes is not None else None,
            )
            print(frontfile.write_front(out / f"{stem}.part{i + 1}.front", pf))
    return EXIT_OK


def plot_rows(front: frontfile.FrontFile) -> str:
    if not len(front):
        raise DataError("front is empty")
    if front.k > 3:
        raise DataError(f"plot data supports 2 or 3 objectives, front has {front.k}")
    rows = sorted(front.objectives)
    return "\n".join(" ".join(frontfile._fmt(v) for v in z) for z in rows) + "\n"


def cmd_plotdata(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for path in args.fronts:
        text = plot_rows(frontfile.read_front(path))
        target = out / (Path(path).stem + ".dat")
        target.write_text(text)
        print(target)
    return EXIT_OK


def cmd_validate(args) -> int:
    if not args.fronts and not args.instance:
        raise UsageError("nothing to validate: give front files and/or --instance")
    inst = load_instance(args.instance) if args.instance else None
    if inst is not None:
        print(f"{args.instance}: n={inst.n} k={inst.k} p={inst.p} ok")
    for path in args.fronts:
        front = frontfile.read_front(path, inst)
        print(f"{path}: {len(front)} records ok")
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "metrics": cmd_metrics,
    "partition": cmd_partition,
    "plotdata": cmd_plotdata,
    "validate": cmd_validate,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"pcpmoea: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, InstanceFormatError, frontfile.FrontFormatError, OSError, ValueError) as exc:
        print(f"pcpmoea: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
