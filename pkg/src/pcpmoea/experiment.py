"""Repeated runs on one instance, with per-run metrics and summary rows."""
from __future__ import annotations

import json
import os
import statistics
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .frontfile import FrontFile, write_front
from .master import RunConfig, run
from .metrics import hypervolume, ideal_distance, merged_reference, spacing
from .momkp import Instance, load_instance

ALGORITHM = "PCPMOEA"

# which direction is better for each summary column
_BETTER = {"hypervolume": max, "ideal_distance": min, "spacing": min}


@dataclass
class ExperimentSpec:
    instance_path: str
    config: RunConfig
    repetitions: int = 15
    out: str = "results"
    jobs: int = 1

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")


def config_echo(cfg: RunConfig) -> str:
    return " ".join(f"{k}={v}" for k, v in cfg.as_dict().items())


def front_header(inst: Instance, cfg: RunConfig) -> dict:
    return {
        "instance": inst.name,
        "k": inst.k,
        "algorithm": ALGORITHM,
        "seed": cfg.seed,
        "config": config_echo(cfg),
    }


def run_front(inst: Instance, cfg: RunConfig) -> FrontFile:
    return FrontFile.from_archive(run(inst, cfg), front_header(inst, cfg))


def _run_job(args):
    inst, cfg = args
    return run_front(inst, cfg)


def summarize(values: list[float], better=max) -> dict:
    """Average/Median/std/Best/Worst; std uses the n-1 denominator."""
    worse = min if better is max else max
    return {
        "Average": statistics.fmean(values),
        "Median": statistics.median(values),
        "std": statistics.stdev(values) if len(values) > 1 else 0.0,
        "Best": better(values),
        "Worst": worse(values),
    }


def score_runs(fronts: list[FrontFile]) -> tuple[list[dict], dict]:
    """Per-run HV (origin reference), ID (empirical ideal of the merged fronts), SP."""
    arrays = {str(i): f.array() for i, f in enumerate(fronts)}
    z0 = merged_reference(arrays).max(axis=0)
    rows = []
    for i, f in enumerate(fronts):
        A = arrays[str(i)]
        rows.append(
            {
                "run": i + 1,
                "seed": int(f.header.get("seed", i)),
                "size": len(f),
                "hypervolume": hypervolume(A),
                "ideal_distance": ideal_distance(A, z0),
                "spacing": spacing(A) if len(A) > 1 else float("nan"),
            }
        )
    summary = {
        metric: summarize([r[metric] for r in rows], better)
        for metric, better in _BETTER.items()
    }
    summary["ideal"] = [float(v) for v in z0]
    return rows, summary


def format_summary(rows: list[dict], summary: dict, cfg: RunConfig, name: str) -> str:
    out = [
        f"# instance {name}, {len(rows)} runs, budget {cfg.budget} generations per worker",
        f"# {config_echo(cfg)}",
        f"{'run':>4} {'seed':>6} {'size':>6} {'hypervolume':>16} {'ideal_dist':>14} {'spacing':>14}",
    ]
    for r in rows:
        out.append(
            f"{r['run']:>4} {r['seed']:>6} {r['size']:>6} {r['hypervolume']:>16.6e} "
            f"{r['ideal_distance']:>14.6f} {r['spacing']:>14.6f}"
        )
    out.append("")
    out.append(f"{'':>8} {'hypervolume':>16} {'ideal_dist':>14} {'spacing':>14}")
    for stat in ("Average", "Median", "std", "Best", "Worst"):
        out.append(
            f"{stat:>8} {summary['hypervolume'][stat]:>16.6e} "
            f"{summary['ideal_distance'][stat]:>14.6f} {summary['spacing'][stat]:>14.6f}"
        )
    return "\n".join(out) + "\n"


def _check_writable(out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    if not os.access(out, os.W_OK):
        raise PermissionError(f"output directory {out} is not writable")
    with tempfile.TemporaryFile(dir=out):
        pass


def run_experiment(spec: ExperimentSpec, inst: Instance | None = None) -> dict:
    """Run all repetitions and persist fronts plus summary.

    Nothing is written until every run has finished; a failing write
    removes the files already written.
    """
    if inst is None:
        inst = load_instance(spec.instance_path)
    out = Path(spec.out)
    _check_writable(out)

    configs = [replace(spec.config, seed=spec.config.seed + r) for r in range(spec.repetitions)]
    if spec.jobs > 1 and len(configs) > 1:
        with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            fronts = list(pool.map(_run_job, [(inst, c) for c in configs]))
    else:
        fronts = [run_front(inst, c) for c in configs]

    rows, summary = score_runs(fronts)
    stem = inst.name or "instance"
    written = []
    try:
        for r, front in enumerate(fronts):
            written.append(write_front(out / f"{stem}.run{r + 1:02d}.front", front))
        text = format_summary(rows, summary, spec.config, stem)
        written.append(_atomic_text(out / f"{stem}.summary.txt", text))
        record = {"instance": stem, "config": spec.config.as_dict(), "runs": rows, "summary": summary}
        written.append(_atomic_text(out / f"{stem}.summary.json", json.dumps(record, indent=2) + "\n"))
    except BaseException:
        for p in written:
            p.unlink(missing_ok=True)
        raise
    return {"fronts": fronts, "paths": written, "rows": rows, "summary": summary}


def _atomic_text(path: Path, text: str) -> Path:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    return path


def random_search_front(inst: Instance, samples: int, seed: int = 0, batch: int = 10_000) -> np.ndarray:
    """Objective vectors of the non-dominated subset of repaired uniform samples."""
    from .momkp import repair
    from .pareto import nondominated_mask

    rng = np.random.default_rng(seed)
    best = np.zeros((0, inst.k), dtype=np.int64)
    left = samples
    while left:
        m = min(batch, left)
        genes = rng.integers(0, 2, size=(m, inst.n), dtype=np.uint8)
        loads = genes.astype(np.int64) @ inst.weights.T
        for r in np.flatnonzero((loads > inst.capacities).any(axis=1)):
            genes[r] = repair(inst, genes[r])
        values = genes.astype(np.int64) @ inst.profits.T
        pool = np.unique(np.vstack([best, values]), axis=0)
        best = pool[nondominated_mask(pool)]
        left -= m
    return best
