"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

The 2.250 benchmark file is looked up in $PCPMOEA_BENCHMARK_DIR, then in
data/ at the repository root.
"""
import os
import time
from pathlib import Path

import numpy as np
import pytest

from pcpmoea.experiment import front_header, random_search_front, run_front
from pcpmoea.frontfile import FrontFile
from pcpmoea.master import RunConfig, run
from pcpmoea.metrics import coverage, hypervolume, ideal_distance, igd, spacing
from pcpmoea.momkp import load_instance, toy4
from pcpmoea.pareto import ideal_of, nondominated_filter
from pcpmoea.partition import partition, quantile_index
from pcpmoea.worker import criterion_select

from conftest import TOY4_FRONT, brute_force_front, brute_nondominated, make_pop, zitzler_like

BENCHMARK = "knapsack.250.2"


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {n}] {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail

    return emit


def benchmark_path():
    roots = [os.environ.get("PCPMOEA_BENCHMARK_DIR"), Path(__file__).resolve().parents[1] / "data"]
    for root in roots:
        if root and (Path(root) / BENCHMARK).is_file():
            return Path(root) / BENCHMARK
    return None


def random_population(rng):
    k = int(rng.integers(2, 5))
    m = int(rng.integers(0, 201))
    hi = int(rng.choice([3, 10, 1000]))  # small ranges force ties and duplicates
    return make_pop(rng.integers(0, hi, size=(m, k)).tolist()), k


# 1 -------------------------------------------------------------------------

def test_criterion_1_dominance_oracle(report):
    rng = np.random.default_rng(101)
    mismatches, spent = 0, 0.0
    for _ in range(1000):
        pop, k = random_population(rng)
        t = time.perf_counter()
        got = nondominated_filter(pop)
        spent += time.perf_counter() - t
        objs = np.array([p.objectives for p in pop]).reshape(len(pop), k)
        want = {pop[j].key for j in brute_nondominated(objs)} if pop else set()
        if {m.key for m in got} != want:
            mismatches += 1
    report(1, mismatches == 0 and spent < 10.0,
           f"{mismatches} mismatches on 1000 populations, filter time {spent:.2f}s (limit 10s)")


# 2 -------------------------------------------------------------------------

def test_criterion_2_selection_contract(report):
    rng = np.random.default_rng(202)
    bad = 0
    for _ in range(1000):
        pop, k = random_population(rng)
        if not pop:
            continue
        i = int(rng.integers(0, k))
        N = int(rng.integers(1, 60))
        archive, survivors = criterion_select(pop, i, N)
        objs = np.array([p.objectives for p in pop])
        front_idx = brute_nondominated(objs)
        front = {pop[j].key for j in front_idx}
        dominated = [pop[j] for j in range(len(pop)) if j not in front_idx]
        key = lambda p: (p.objectives[i], [p.objectives[j] for j in range(k) if j != i], p.key)
        expected = sorted(dominated, key=key, reverse=True)[:N]
        if {m.key for m in archive} != front or [s.key for s in survivors] != [e.key for e in expected]:
            bad += 1
    report(2, bad == 0, f"{bad} contract violations on 1000 populations")


# 3 -------------------------------------------------------------------------

def test_criterion_3_partition(report):
    rng = np.random.default_rng(303)
    size_errors = coverage_errors = 0
    for _ in range(300):
        m = int(rng.integers(1, 200))
        alpha = float(rng.uniform(0.01, 0.5))
        xs = rng.choice(100_000, size=m, replace=False)
        pts = make_pop([(int(x), int(200_000 - x)) for x in xs])
        res = partition(pts, alpha, 2)
        drop = quantile_index(m, alpha)
        if any(len(p) != m - drop for p in res.parts) or len(res.shared) != m - 2 * drop:
            size_errors += 1
    for _ in range(300):
        m = int(rng.integers(1, 120))
        rows = rng.integers(0, 50, size=(m, 3))
        pts = nondominated_filter(make_pop(rows.tolist()))
        res = partition(list(pts), float(rng.uniform(0.01, 0.5)), 3)
        union = set().union(*({p.key for p in part} for part in res.parts))
        if union != {p.key for p in pts}:
            coverage_errors += 1
    report(3, size_errors == coverage_errors == 0,
           f"{size_errors} size errors on 300 bi-objective fronts, "
           f"{coverage_errors} coverage gaps on 300 tri-objective fronts")


# 4 -------------------------------------------------------------------------

def mc_volume(points, samples, rng, chunk=50_000):
    """Plain dominated-volume estimate inside the bounding box of the front."""
    points = np.asarray(points, dtype=float)
    box = points.max(axis=0)
    hits = 0
    for start in range(0, samples, chunk):
        u = rng.uniform(0.0, 1.0, size=(min(chunk, samples - start), points.shape[1])) * box
        inside = u[:, None, 0] <= points[None, :, 0]
        for d in range(1, points.shape[1]):
            inside &= u[:, None, d] <= points[None, :, d]
        hits += int(inside.any(axis=1).sum())
    frac = hits / samples
    vol = float(np.prod(box))
    return vol * frac, vol * np.sqrt(frac * (1 - frac) / samples)


def test_criterion_4_hypervolume(report):
    rng = np.random.default_rng(404)
    t = time.perf_counter()
    worst, misses = 0.0, 0
    for trial in range(100):
        k = 2 + trial % 2
        m = int(rng.integers(1, 51))
        front = rng.uniform(1.0, 100.0, size=(m, k))
        exact = hypervolume(front)
        est, se = mc_volume(front, 1_000_000, rng)
        z = abs(exact - est) / se if se > 0 else abs(exact - est)
        worst = max(worst, z)
        misses += z > 3
    spent = time.perf_counter() - t
    report(4, misses == 0 and spent < 60.0,
           f"{misses}/100 fronts outside 3 SE (worst {worst:.2f} SE), {spent:.1f}s (limit 60s)")


# 5 -------------------------------------------------------------------------

def test_criterion_5_identities(report):
    A = np.array(sorted(TOY4_FRONT))
    staircase = [(j, 9 - j) for j in range(1, 9)]
    checks = {
        "IGD(A,A)=0": igd(A, A) == 0.0,
        "C(A,A)=1": coverage(A, A) == 1.0,
        "SP(staircase)=0": spacing(staircase) == 0.0,
        "ID(singleton, its ideal)=0": ideal_distance([(11, 11)], ideal_of([(11, 11)])) == 0.0,
    }
    failed = [name for name, ok in checks.items() if not ok]
    report(5, not failed, "all identities hold" if not failed else f"failed: {failed}")


# 6 -------------------------------------------------------------------------

def test_criterion_6_toy_convergence(report):
    inst = toy4()
    _, true_front, _ = brute_force_front(inst)
    t = time.perf_counter()
    wrong = [
        seed
        for seed in range(20)
        if run(inst, RunConfig(pop_size=10, budget=50, period=5, seed=seed)).objective_set() != true_front
    ]
    spent = time.perf_counter() - t
    report(6, not wrong and spent < 5.0,
           f"{20 - len(wrong)}/20 seeds returned the exact 5-point front, {spent:.2f}s (limit 5s)")


# 7 -------------------------------------------------------------------------

def test_criterion_7_determinism(report, tmp_path):
    inst = zitzler_like(250, 2, 12345)
    cfg = RunConfig(pop_size=40, budget=60, period=10, seed=3)
    files = []
    for label, threads in (("a", 1), ("b", 1), ("c", 4), ("d", 2)):
        front = FrontFile.from_archive(run(inst, cfg, threads=threads), front_header(inst, cfg))
        path = tmp_path / f"{label}.front"
        path.write_text(front.dumps())
        files.append(path.read_bytes())
    same = all(f == files[0] for f in files)
    report(7, same, f"4 runs (threads 1, 1, 4, 2) {'byte-identical' if same else 'differ'}, "
                    f"{files[0].count(b'|')} records")


# 8 -------------------------------------------------------------------------

def test_criterion_8_benchmark(report):
    path = benchmark_path()
    if path is None:
        report(8, False, f"benchmark file {BENCHMARK} not found (set PCPMOEA_BENCHMARK_DIR)")
    inst = load_instance(path)
    cfg = RunConfig(pop_size=150, alpha=0.25, budget=2000, period=50)
    t = time.perf_counter()
    fronts = [run_front(inst, RunConfig(**{**cfg.as_dict(), "seed": s})).array() for s in range(5)]
    hvs = [hypervolume(f) for f in fronts]
    baseline = random_search_front(inst, 150 * 2000, seed=99)
    cov = min(coverage(f, baseline) for f in fronts)
    spent = time.perf_counter() - t
    median = float(np.median(hvs))
    ok = median >= 9.7e7 and cov == 1.0 and spent <= 600
    report(8, ok, f"median HV {median:.5e} (target 9.7e7), min C(PCPMOEA, random) {cov:.3f}, "
                  f"{spent:.0f}s (limit 600s)")


# 9 -------------------------------------------------------------------------

def monotone_violations(inst, cfg):
    history = []
    run(inst, cfg, observer=lambda c, a: history.append(a.objectives().copy()))
    bad = 0
    for before, after in zip(history, history[1:]):
        for z in before:
            bad += not (after >= z).all(axis=1).any()
    return bad, len(history)


def test_criterion_9_monotonicity(report):
    cases = [("toy4", toy4(), RunConfig(pop_size=10, budget=50, period=5))]
    path = benchmark_path()
    big = load_instance(path) if path else zitzler_like(250, 2, 12345)
    label = "2.250" if path else "2x250 synthetic"
    for mode in ("sync", "async"):
        cases.append((f"{label} {mode}", big, RunConfig(pop_size=60, budget=100, period=10, mode=mode)))
    lines, total = [], 0
    for name, inst, cfg in cases:
        bad, cycles = monotone_violations(inst, cfg)
        total += bad
        lines.append(f"{name}: {bad} lost points over {cycles} cycles")
    report(9, total == 0, "; ".join(lines))
