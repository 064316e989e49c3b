"""Criterion-based MOEA run by each worker.

Worker i keeps every non-dominated individual it meets in an unbounded
archive and, among the dominated ones, only the N best on objective i.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .momkp import Individual, Instance, evaluate, random_individual, repair
from .pareto import Archive, nondominated_mask, objective_matrix, unique_by_genotype


@dataclass(frozen=True)
class VariationConfig:
    crossover_probability: float = 0.8
    mutation_probability: float = 0.1

    def __post_init__(self):
        for name in ("crossover_probability", "mutation_probability"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")


@dataclass
class WorkerState:
    index: int  # objective served, 0-based
    population: list  # dominated individuals, at most `size`
    archive: Archive
    size: int
    rng: np.random.Generator
    generation: int = 0


def criterion_key(ind: Individual, i: int) -> tuple:
    """Total order used for ranking on objective i.

    Z^i first, then the remaining objectives in index order, then the
    genotype bits. Larger key = better rank.
    """
    z = ind.objectives
    return (z[i],) + z[:i] + z[i + 1:] + (ind.key,)


def sort_by_criterion(pop: Sequence[Individual], i: int, descending: bool = True) -> list:
    return sorted(pop, key=lambda ind: criterion_key(ind, i), reverse=descending)


def rank_i(x: Individual, S: Sequence[Individual], i: int) -> int:
    """1 + number of members of S strictly ahead of x on objective i."""
    if not any(s.key == x.key for s in S):
        raise ValueError("individual is not a member of the ranked set")
    kx = criterion_key(x, i)
    return 1 + sum(1 for s in unique_by_genotype(S) if criterion_key(s, i) > kx)


def criterion_select(pop: Sequence[Individual], i: int, N: int) -> tuple[Archive, list]:
    """Split `pop` into its non-dominated archive and the N best dominated ones.

    `pop` is treated as a set (duplicate genotypes collapse). Both outputs
    come back in descending criterion order, so the result does not depend
    on the order of `pop`.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    pop = unique_by_genotype(pop)
    if not pop:
        return Archive(), []
    mask = nondominated_mask(objective_matrix(pop))
    front = [ind for ind, m in zip(pop, mask) if m]
    dominated = [ind for ind, m in zip(pop, mask) if not m]
    archive = Archive._trusted(sort_by_criterion(front, i))
    survivors = sort_by_criterion(dominated, i)[:N]
    return archive, survivors


def _tournament(objs: np.ndarray, a: np.ndarray, b: np.ndarray, i: int) -> np.ndarray:
    """Binary tournament under x >=_i y; undecided pairs go to the first draw."""
    za, zb = objs[a], objs[b]
    b_better = zb[:, i] > za[:, i]
    tie = zb[:, i] == za[:, i]
    b_dominates = (zb >= za).all(axis=1) & (zb > za).any(axis=1)
    return np.where(b_better | (tie & b_dominates), b, a)


def make_offspring(
    parents: Sequence[Individual],
    cfg: VariationConfig,
    inst: Instance,
    rng: np.random.Generator,
    count: int,
    objective: int = 0,
) -> list[Individual]:
    """Tournament selection, single-point crossover, bit-flip mutation, repair."""
    if not parents:
        raise ValueError("no parents to breed from")
    n = inst.n
    genes = np.array([p.genotype for p in parents], dtype=np.uint8)
    objs = objective_matrix(list(parents))
    m = len(parents)

    draws = rng.integers(0, m, size=(4, count))
    first = _tournament(objs, draws[0], draws[1], objective)
    second = _tournament(objs, draws[2], draws[3], objective)
    do_cross = rng.random(count) < cfg.crossover_probability
    cuts = rng.integers(1, n, size=count) if n > 1 else np.zeros(count, dtype=int)
    do_mutate = rng.random(count) < cfg.mutation_probability
    flips = rng.random((count, n)) < 1.0 / n

    children = genes[first].copy()
    if n > 1:
        tail = (np.arange(n)[None, :] >= cuts[:, None]) & do_cross[:, None]
        children = np.where(tail, genes[second], children)
    children ^= (flips & do_mutate[:, None]).astype(np.uint8)

    loads = children.astype(np.int64) @ inst.weights.T
    bad = np.flatnonzero((loads > inst.capacities).any(axis=1))
    for r in bad:
        children[r] = repair(inst, children[r])
    values = children.astype(np.int64) @ inst.profits.T
    return [Individual(children[r], values[r]) for r in range(count)]


def init_worker(inst: Instance, index: int, size: int, rng: np.random.Generator) -> WorkerState:
    """Random initial population of `size`, split by one selection step."""
    start = [random_individual(inst, rng) for _ in range(size)]
    archive, survivors = criterion_select(start, index, size)
    return WorkerState(index=index, population=survivors, archive=archive, size=size, rng=rng)


def worker_generation(state: WorkerState, cfg: VariationConfig, inst: Instance) -> WorkerState:
    """One generational cycle: breed N offspring, merge, select."""
    pool = state.archive.members + state.population
    offspring = make_offspring(pool, cfg, inst, state.rng, state.size, state.index)
    archive, survivors = criterion_select(pool + offspring, state.index, state.size)
    return replace(
        state, population=survivors, archive=archive, generation=state.generation + 1
    )


def apply_migration(state: WorkerState, incoming: Archive) -> tuple[Archive, WorkerState]:
    """Hand the archive to the master and adopt the part it sent back.

    An empty part keeps the current archive.
    """
    outgoing = state.archive.copy()
    if not incoming:
        return outgoing, state
    return outgoing, replace(state, archive=incoming.copy())


def check_individual(inst: Instance, ind: Individual) -> None:
    """Raise if the cached evaluation is stale or the individual infeasible."""
    objectives, feasible = evaluate(inst, ind.genotype)
    if objectives != ind.objectives or not feasible:
        raise AssertionError(f"inconsistent individual {ind!r}")
