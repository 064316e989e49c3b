"""Quantile partition of a non-dominated set into k overlapping parts.

Part i keeps the points at or above the order-alpha quantile of objective
i, i.e. it drops the floor(alpha*|P|) points that are lowest on that
objective. For two objectives with distinct values the overlap of the two
parts holds |P| - 2*floor(alpha*|P|) points.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .pareto import Archive
from .worker import sort_by_criterion


@dataclass
class PartitionResult:
    parts: list  # one Archive per objective
    shared: list  # individuals present in every part
    alpha: float
    orphans: list = field(default_factory=list)  # reassigned points (k >= 3)


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha <= 0.5:
        raise ValueError(f"alpha must lie in (0, 0.5], got {alpha}")


def quantile_index(size: int, alpha: float) -> int:
    """Number of lowest-ranked points dropped from a set of `size`."""
    if size < 1:
        raise ValueError("size must be >= 1")
    _check_alpha(alpha)
    # round first: 0.29 * 100 == 28.999999999999996
    return math.floor(round(alpha * size, 9))


def partition(P, alpha: float, k: int | None = None) -> PartitionResult:
    members = list(P)
    if not members:
        raise ValueError("cannot partition an empty set")
    _check_alpha(alpha)
    if k is None:
        k = len(members[0].objectives)
    drop = quantile_index(len(members), alpha)

    ascending = [sort_by_criterion(members, i, descending=False) for i in range(k)]
    parts = [asc[drop:] for asc in ascending]

    covered = set()
    for part in parts:
        covered.update(ind.key for ind in part)
    orphans = [ind for ind in members if ind.key not in covered]
    if orphans:
        position = [
            {ind.key: pos for pos, ind in enumerate(asc)} for asc in ascending
        ]
        for ind in orphans:
            ranks = [position[i][ind.key] for i in range(k)]
            best = ranks.index(max(ranks))
            parts[best].append(ind)

    keysets = [{ind.key for ind in part} for part in parts]
    common = set.intersection(*keysets)
    shared = [ind for ind in members if ind.key in common]
    return PartitionResult(
        parts=[Archive._trusted(part) for part in parts],
        shared=shared,
        alpha=alpha,
        orphans=orphans,
    )
