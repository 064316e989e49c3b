"""Master process: collect worker archives, filter, partition, redistribute.

Two runtimes share the same worker and master logic:

* ``sync``: workers advance one migration period each (optionally on a
  thread pool), then all meet at a barrier where the master runs one
  cycle. The result depends only on (instance, config).
* ``async``: each worker runs in its own thread and exchanges its archive
  with the master whenever it reaches a migration point; the master
  serves requests in arrival order.
"""
from __future__ import annotations

import os
import queue
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, asdict
from typing import Callable, Optional, Sequence

import numpy as np

from .momkp import Instance
from .pareto import Archive, nondominated_filter
from .partition import partition
from .worker import VariationConfig, apply_migration, init_worker, worker_generation

THREADS_ENV = "PCPMOEA_THREADS"

Observer = Callable[[int, Archive], None]


class WorkerError(RuntimeError):
    def __init__(self, index: int, cause: BaseException):
        self.index = index
        super().__init__(f"worker {index} failed: {cause!r}")
        self.__cause__ = cause


@dataclass(frozen=True)
class RunConfig:
    pop_size: int = 150
    alpha: float = 0.25
    period: int = 50
    crossover_probability: float = 0.8
    mutation_probability: float = 0.1
    budget: int = 2000
    seed: int = 0
    mode: str = "sync"

    def __post_init__(self):
        if self.pop_size < 1:
            raise ValueError("pop_size must be >= 1")
        if not 0.0 < self.alpha <= 0.5:
            raise ValueError("alpha must lie in (0, 0.5]")
        if self.period < 1:
            raise ValueError("period must be >= 1")
        if self.budget < 1:
            raise ValueError("budget must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if self.mode not in ("sync", "async"):
            raise ValueError(f"mode must be 'sync' or 'async', got {self.mode!r}")
        self.variation  # validates probabilities

    @property
    def variation(self) -> VariationConfig:
        return VariationConfig(self.crossover_probability, self.mutation_probability)

    def as_dict(self) -> dict:
        return asdict(self)


def worker_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed, index])


def default_threads() -> int:
    value = os.environ.get(THREADS_ENV)
    if value:
        return max(1, int(value))
    return 1


def master_cycle(
    global_archive: Archive, incoming: Sequence[Archive], alpha: float, k: int
) -> tuple[Archive, list[Archive]]:
    """Merge incoming archives into the global one and partition the result."""
    pool = list(global_archive)
    for arch in incoming:
        pool.extend(arch)
    merged = nondominated_filter(pool)
    if not merged:
        return merged, [Archive() for _ in range(k)]
    return merged, partition(merged, alpha, k).parts


def _advance(state, generations, cfg, inst):
    for _ in range(generations):
        state = worker_generation(state, cfg, inst)
    return state


def run(
    inst: Instance,
    cfg: RunConfig,
    observer: Optional[Observer] = None,
    threads: Optional[int] = None,
) -> Archive:
    """Run PCPMOEA with one worker per objective; return the global front.

    `observer(cycle, archive)` sees the global archive after every master
    cycle and after the terminal collection.
    """
    if threads is None:
        threads = default_threads()
    if cfg.mode == "async":
        return _run_async(inst, cfg, observer)
    return _run_sync(inst, cfg, observer, threads)


def _spawn(inst: Instance, cfg: RunConfig, index: int):
    try:
        return init_worker(inst, index, cfg.pop_size, worker_rng(cfg.seed, index))
    except Exception as exc:
        raise WorkerError(index, exc) from exc


def _run_sync(inst, cfg, observer, threads):
    k = inst.k
    variation = cfg.variation
    workers = [_spawn(inst, cfg, i) for i in range(k)]
    global_archive = Archive()
    cycle = 0
    done = 0

    def step(i, generations):
        try:
            return _advance(workers[i], generations, variation, inst)
        except Exception as exc:
            raise WorkerError(i, exc) from exc

    executor = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        while done < cfg.budget:
            epoch = min(cfg.period - done % cfg.period, cfg.budget - done)
            if executor is None:
                workers = [step(i, epoch) for i in range(k)]
            else:
                futures = [executor.submit(step, i, epoch) for i in range(k)]
                workers = [f.result() for f in futures]
            done += epoch
            if done % cfg.period == 0 and done < cfg.budget:
                incoming = [w.archive for w in workers]
                global_archive, parts = master_cycle(global_archive, incoming, cfg.alpha, k)
                cycle += 1
                if observer:
                    observer(cycle, global_archive)
                workers = [apply_migration(w, part)[1] for w, part in zip(workers, parts)]
    finally:
        if executor is not None:
            executor.shutdown()

    final = nondominated_filter(list(global_archive) + [m for w in workers for m in w.archive])
    if observer:
        observer(cycle + 1, final)
    return final


def _run_async(inst, cfg, observer):
    k = inst.k
    variation = cfg.variation
    requests: queue.Queue = queue.Queue()
    replies = [queue.Queue() for _ in range(k)]

    def body(i):
        try:
            state = init_worker(inst, i, cfg.pop_size, worker_rng(cfg.seed, i))
            while state.generation < cfg.budget:
                state = worker_generation(state, variation, inst)
                if state.generation % cfg.period == 0 and state.generation < cfg.budget:
                    requests.put(("exchange", i, state.archive.copy()))
                    part = replies[i].get()
                    _, state = apply_migration(state, part)
            requests.put(("done", i, state.archive.copy()))
        except BaseException as exc:  # reported to the master, which re-raises
            requests.put(("error", i, exc))

    threads = [threading.Thread(target=body, args=(i,), daemon=True) for i in range(k)]
    for t in threads:
        t.start()

    global_archive = Archive()
    finals: list[Archive] = []
    cycle = 0
    failure = None
    remaining = k
    while remaining:
        kind, i, payload = requests.get()
        if kind == "error":
            failure = WorkerError(i, payload)
            remaining -= 1
            # unblock anyone waiting for a reply so the threads can exit
            for r in replies:
                r.put(Archive())
            continue
        if kind == "done":
            finals.append(payload)
            remaining -= 1
            continue
        incoming = [Archive() for _ in range(k)]
        incoming[i] = payload
        global_archive, parts = master_cycle(global_archive, incoming, cfg.alpha, k)
        cycle += 1
        if observer:
            observer(cycle, global_archive)
        replies[i].put(parts[i])
    for t in threads:
        t.join()
    if failure is not None:
        raise failure

    final = nondominated_filter(list(global_archive) + [m for arch in finals for m in arch])
    if observer:
        observer(cycle + 1, final)
    return final
