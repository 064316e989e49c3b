"""Pareto dominance (maximisation), non-dominated filtering and the archive."""
from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .momkp import Individual


def _pair(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"objective vectors differ in length: {a.shape} vs {b.shape}")
    return a, b


def dominates(a, b) -> bool:
    """a >= b everywhere and a != b."""
    a, b = _pair(a, b)
    return bool((a >= b).all() and (a > b).any())


def weakly_dominates(a, b) -> bool:
    a, b = _pair(a, b)
    return bool((a >= b).all())


def nondominated_mask(points) -> np.ndarray:
    """Boolean mask of rows not dominated by any other row.

    Equal rows do not dominate each other, so duplicates are all kept.
    """
    pts = np.asarray(points)
    m = len(pts)
    if m == 0:
        return np.zeros(0, dtype=bool)
    if pts.ndim != 2:
        raise ValueError("points must be a 2-D array")
    # lexicographically descending: a dominator always precedes what it dominates
    order = np.lexsort(pts.T[::-1])[::-1]
    sorted_pts = pts[order]
    # rows identical to their predecessor share its verdict
    same = np.zeros(m, dtype=bool)
    same[1:] = (sorted_pts[1:] == sorted_pts[:-1]).all(axis=1)
    keep = np.zeros(m, dtype=bool)
    if pts.shape[1] == 2:
        ys = sorted_pts[:, 1]
        best = np.maximum.accumulate(ys)
        keep[0] = True
        keep[1:] = ys[1:] > best[:-1]
    else:
        kept = np.empty_like(sorted_pts)
        count = 0
        for r in range(m):
            p = sorted_pts[r]
            if same[r]:
                continue
            if count:
                block = kept[:count]
                if ((block >= p).all(axis=1) & (block > p).any(axis=1)).any():
                    continue
            keep[r] = True
            kept[count] = p
            count += 1
    run_start = np.maximum.accumulate(np.where(~same, np.arange(m), 0))
    keep = keep[run_start]
    mask = np.zeros(m, dtype=bool)
    mask[order] = keep
    return mask


def objective_matrix(pop: Sequence[Individual]) -> np.ndarray:
    if not pop:
        return np.zeros((0, 0), dtype=np.int64)
    return np.array([ind.objectives for ind in pop], dtype=np.int64)


def unique_by_genotype(pop: Iterable[Individual]) -> list[Individual]:
    """First occurrence of each genotype, input order preserved."""
    seen = set()
    out = []
    for ind in pop:
        if ind.key not in seen:
            seen.add(ind.key)
            out.append(ind)
    return out


class Archive:
    """Unbounded set of mutually non-dominated individuals, keyed by genotype.

    Members are held in insertion order; two genotypes with the same
    objective vector are both kept.
    """

    def __init__(self, members: Iterable[Individual] = ()):
        self._members: dict[bytes, Individual] = {}
        for ind in members:
            self.insert(ind)

    @classmethod
    def _trusted(cls, members: Iterable[Individual]) -> "Archive":
        arch = cls.__new__(cls)
        arch._members = {ind.key: ind for ind in members}
        return arch

    def insert(self, ind: Individual) -> bool:
        """Add `ind` unless it is dominated or already present.

        Returns True when the archive changed.
        """
        if not ind.feasible:
            raise ValueError("infeasible individuals cannot enter an archive")
        if ind.key in self._members:
            return False
        z = ind.objectives
        for other in self._members.values():
            if dominates(other.objectives, z):
                return False
        self._members = {
            key: m for key, m in self._members.items() if not dominates(z, m.objectives)
        }
        self._members[ind.key] = ind
        return True

    def copy(self) -> "Archive":
        return Archive._trusted(self._members.values())

    @property
    def members(self) -> list[Individual]:
        return list(self._members.values())

    def objectives(self) -> np.ndarray:
        return objective_matrix(self.members)

    def objective_set(self) -> set[tuple]:
        return {m.objectives for m in self._members.values()}

    def __contains__(self, ind) -> bool:
        return ind.key in self._members

    def __iter__(self):
        return iter(self._members.values())

    def __len__(self):
        return len(self._members)

    def __bool__(self):
        return bool(self._members)

    def __eq__(self, other):
        if not isinstance(other, Archive):
            return NotImplemented
        return self._members.keys() == other._members.keys()

    def __repr__(self):
        return f"Archive({len(self)} members)"


def nondominated_filter(pop: Iterable[Individual]) -> Archive:
    """Non-dominated subset of `pop`, deduplicated by genotype."""
    pop = unique_by_genotype(pop)
    if not pop:
        return Archive()
    for ind in pop:
        if not ind.feasible:
            raise ValueError("infeasible individual passed to nondominated_filter")
    mask = nondominated_mask(objective_matrix(pop))
    return Archive._trusted(ind for ind, keep in zip(pop, mask) if keep)


def archive_insert(arch: Archive, ind: Individual) -> Archive:
    """Functional insert: returns a new archive, `arch` is left untouched."""
    out = arch.copy()
    out.insert(ind)
    return out


def ideal_of(points) -> np.ndarray:
    """Component-wise maximum of a set of objective vectors (empirical ideal)."""
    if isinstance(points, Archive):
        points = points.objectives()
    elif not isinstance(points, np.ndarray):
        points = list(points)
        if points and isinstance(points[0], Individual):
            points = objective_matrix(points)
    pts = np.asarray(points)
    if pts.size == 0:
        raise ValueError("ideal vector of an empty set is undefined")
    return pts.max(axis=0)
