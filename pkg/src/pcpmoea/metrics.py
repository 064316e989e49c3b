"""Quality indicators for fronts of a maximisation problem.

All functions take array-likes of objective vectors (one row per point)
and work on the set of distinct rows.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from .pareto import nondominated_mask


def as_front(points, name: str = "front") -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1 and pts.size:
        pts = pts[None, :]
    if pts.size == 0:
        raise ValueError(f"{name} is empty")
    if pts.ndim != 2:
        raise ValueError(f"{name} must be a 2-D array of objective vectors")
    return np.unique(pts, axis=0)


def _same_k(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape[1] != b.shape[1]:
        raise ValueError(f"dimension mismatch: {a.shape[1]} vs {b.shape[1]} objectives")


def _hv2d(pts: np.ndarray) -> float:
    # pts already shifted so the reference is the origin
    order = np.lexsort((-pts[:, 1], -pts[:, 0]))
    x = pts[order, 0]
    ymax = np.maximum.accumulate(pts[order, 1])
    rise = np.diff(ymax, prepend=0.0)
    return float(np.dot(x, rise))


def _hv3d(pts: np.ndarray) -> float:
    levels = np.unique(pts[:, 2])[::-1]
    total = 0.0
    for t, z in enumerate(levels):
        below = levels[t + 1] if t + 1 < len(levels) else 0.0
        total += _hv2d(pts[pts[:, 2] >= z, :2]) * (z - below)
    return total


def hypervolume_mc(
    points, ref=None, samples: int = 1_000_000, rng: Optional[np.random.Generator] = None
) -> tuple[float, float]:
    """Monte Carlo hypervolume: (estimate, standard error)."""
    pts = _shifted(points, ref)
    if rng is None:
        rng = np.random.default_rng(0)
    upper = pts.max(axis=0)
    box = float(np.prod(upper))
    if box == 0.0:
        return 0.0, 0.0
    pts = pts[nondominated_mask(pts)]
    hits = 0
    chunk = 100_000
    left = samples
    while left:
        m = min(chunk, left)
        u = rng.random((m, pts.shape[1])) * upper
        inside = np.zeros(m, dtype=bool)
        for p in pts:
            inside |= (u <= p).all(axis=1)
        hits += int(inside.sum())
        left -= m
    frac = hits / samples
    return box * frac, box * math.sqrt(frac * (1 - frac) / samples)


def _shifted(points, ref) -> np.ndarray:
    pts = as_front(points)
    ref = np.zeros(pts.shape[1]) if ref is None else np.asarray(ref, dtype=float)
    if ref.shape != (pts.shape[1],):
        raise ValueError(f"reference point has {ref.size} coordinates, front has {pts.shape[1]}")
    below = ~(pts >= ref).all(axis=1)
    if below.any():
        raise ValueError(
            f"reference point {ref.tolist()} is not dominated by {pts[below][0].tolist()}"
        )
    return pts - ref


def hypervolume(points, ref=None, samples: int = 1_000_000, seed: int = 0) -> float:
    """Volume dominated by the front above `ref` (default: the origin).

    Exact for two and three objectives; a Monte Carlo estimate with
    `samples` draws beyond that.
    """
    pts = _shifted(points, ref)
    k = pts.shape[1]
    if k == 1:
        return float(pts.max())
    if k == 2:
        return _hv2d(pts)
    if k == 3:
        return _hv3d(pts)
    est, _ = hypervolume_mc(pts, None, samples, np.random.default_rng(seed))
    return est


def _nearest(src: np.ndarray, dst: np.ndarray, p: int = 2, exclude_self: bool = False) -> np.ndarray:
    """Distance from every row of src to its nearest row of dst."""
    out = np.empty(len(src))
    step = max(1, 2_000_000 // max(1, len(dst) * src.shape[1]))
    for lo in range(0, len(src), step):
        diff = src[lo:lo + step, None, :] - dst[None, :, :]
        if p == 1:
            d = np.abs(diff).sum(axis=2)
        else:
            d = np.sqrt((diff ** 2).sum(axis=2))
        if exclude_self:
            idx = np.arange(lo, min(lo + step, len(src)))
            d[idx - lo, idx] = np.inf
        out[lo:lo + step] = d.min(axis=1)
    return out


def igd(points, reference, mean: bool = False) -> float:
    """sqrt(sum d_s^2) / |PF| over reference points s, d_s = nearest distance to A.

    `mean=True` gives the usual average-distance variant instead.
    """
    A = as_front(points)
    PF = as_front(reference, "reference front")
    _same_k(A, PF)
    d = _nearest(PF, A)
    if mean:
        return float(d.mean())
    return float(math.sqrt(float((d ** 2).sum())) / len(PF))


def ideal_distance(points, ideal) -> float:
    """sqrt(sum ||z - z0||^2) / |A|."""
    A = as_front(points)
    z0 = np.asarray(ideal, dtype=float)
    if z0.shape != (A.shape[1],):
        raise ValueError(f"dimension mismatch: ideal has {z0.size} coordinates, front {A.shape[1]}")
    d2 = ((A - z0) ** 2).sum(axis=1)
    return float(math.sqrt(float(d2.sum())) / len(A))


def spacing(points) -> float:
    """Sample std of Manhattan nearest-neighbour distances."""
    A = as_front(points)
    if len(A) < 2:
        raise ValueError("spacing needs at least two distinct points")
    d = _nearest(A, A, p=1, exclude_self=True)
    return float(np.sqrt(((d.mean() - d) ** 2).sum() / (len(A) - 1)))


def coverage(a, b) -> float:
    """Fraction of B weakly dominated by some member of A."""
    A = as_front(a)
    B = as_front(b)
    _same_k(A, B)
    covered = np.zeros(len(B), dtype=bool)
    for lo in range(0, len(B), 4096):
        blk = B[lo:lo + 4096]
        covered[lo:lo + 4096] = (A[None, :, :] >= blk[:, None, :]).all(axis=2).any(axis=1)
    return float(covered.mean())


@dataclass
class MetricsReport:
    label: str
    size: int
    hypervolume: float
    ideal_distance: float
    spacing: float
    igd: Optional[float] = None
    coverage_vs: dict = field(default_factory=dict)  # label -> (C(self, other), C(other, self))

    def as_dict(self) -> dict:
        return {
            "label": self.label,
            "size": self.size,
            "hypervolume": self.hypervolume,
            "igd": self.igd,
            "ideal_distance": self.ideal_distance,
            "spacing": self.spacing,
            "coverage_vs": {k: list(v) for k, v in self.coverage_vs.items()},
        }


def merged_reference(fronts: Mapping[str, np.ndarray]) -> np.ndarray:
    """Non-dominated union of all fronts."""
    union = np.unique(np.vstack([as_front(f) for f in fronts.values()]), axis=0)
    return union[nondominated_mask(union)]


def compare_fronts(
    fronts: Mapping[str, np.ndarray],
    reference=None,
    ref_point=None,
    ideal=None,
    igd_mean: bool = False,
) -> list[MetricsReport]:
    """Full metric report for several labelled fronts sharing k."""
    if not fronts:
        raise ValueError("no fronts given")
    arrays = {label: as_front(f, label) for label, f in fronts.items()}
    ks = {a.shape[1] for a in arrays.values()}
    if len(ks) != 1:
        raise ValueError(f"fronts mix objective counts: {sorted(ks)}")
    ref_front = merged_reference(arrays) if reference is None else as_front(reference, "reference")
    z0 = ref_front.max(axis=0) if ideal is None else np.asarray(ideal, dtype=float)
    reports = []
    for label, A in arrays.items():
        reports.append(
            MetricsReport(
                label=label,
                size=len(A),
                hypervolume=hypervolume(A, ref_point),
                ideal_distance=ideal_distance(A, z0),
                spacing=spacing(A) if len(A) > 1 else float("nan"),
                igd=igd(A, ref_front, mean=igd_mean),
            )
        )
    for ra in reports:
        for label, B in arrays.items():
            if label == ra.label:
                continue
            A = arrays[ra.label]
            ra.coverage_vs[label] = (coverage(A, B), coverage(B, A))
    return reports
