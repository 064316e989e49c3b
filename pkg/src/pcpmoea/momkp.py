"""Multiobjective multidimensional knapsack instances.

Reads and writes the Zitzler/Thiele benchmark layout::

    knapsack problem specification (2 knapsacks, 250 items)
    =
    knapsack 1:
     capacity: +6404
     item 1:
      weight: +94
      profit: +57
     ...
    =
    knapsack 2:
     ...

Each knapsack block carries one weight row (a constraint) and one profit
row (an objective), so these instances always have k == p.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


class InstanceFormatError(ValueError):
    """Raised when an instance file cannot be parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True, eq=False)
class Instance:
    """Immutable MOMKP data. Matrices are int64 and read-only."""

    profits: np.ndarray  # (k, n)
    weights: np.ndarray  # (p, n)
    capacities: np.ndarray  # (p,)
    name: str = ""

    def __post_init__(self):
        profits = np.array(self.profits, dtype=np.int64, ndmin=2)
        weights = np.array(self.weights, dtype=np.int64, ndmin=2)
        capacities = np.array(self.capacities, dtype=np.int64, ndmin=1)
        if profits.ndim != 2 or weights.ndim != 2 or capacities.ndim != 1:
            raise ValueError("profits and weights must be matrices, capacities a vector")
        if profits.shape[1] != weights.shape[1]:
            raise ValueError(
                f"profit rows have {profits.shape[1]} items, weight rows {weights.shape[1]}"
            )
        if weights.shape[0] != capacities.shape[0]:
            raise ValueError(
                f"{weights.shape[0]} weight rows but {capacities.shape[0]} capacities"
            )
        if profits.shape[1] == 0 or profits.shape[0] == 0 or weights.shape[0] == 0:
            raise ValueError("instance needs at least one item, objective and constraint")
        for label, arr in (("profit", profits), ("weight", weights), ("capacity", capacities)):
            if (arr < 0).any():
                raise ValueError(f"negative {label} value")
            arr.setflags(write=False)
        object.__setattr__(self, "profits", profits)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "capacities", capacities)

    @property
    def n(self) -> int:
        return self.profits.shape[1]

    @property
    def k(self) -> int:
        return self.profits.shape[0]

    @property
    def p(self) -> int:
        return self.weights.shape[0]

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return (
            self.name == other.name
            and np.array_equal(self.profits, other.profits)
            and np.array_equal(self.weights, other.weights)
            and np.array_equal(self.capacities, other.capacities)
        )

    __hash__ = object.__hash__

    @cached_property
    def removal_order(self) -> np.ndarray:
        """Item indices in the order repair drops them (lowest utility first).

        utility_j = sum_i c_ij / max_i (w_ij / W_i); stable sort keeps lower
        indices first on ties.
        """
        with np.errstate(divide="ignore", invalid="ignore"):
            cap = self.capacities.astype(float)[:, None]
            ratio = np.where(
                self.weights > 0, self.weights / cap, 0.0
            )  # w > 0, W == 0 gives inf
        load = ratio.max(axis=0)
        total = self.profits.sum(axis=0).astype(float)
        with np.errstate(divide="ignore", invalid="ignore"):
            utility = np.where(load > 0, total / load, np.inf)
        order = np.argsort(utility, kind="stable")
        order.setflags(write=False)
        return order


@dataclass(frozen=True, eq=False)
class Individual:
    """A genotype with its cached evaluation."""

    genotype: np.ndarray
    objectives: tuple
    feasible: bool = True
    key: bytes = field(init=False, repr=False)

    def __post_init__(self):
        g = np.asarray(self.genotype, dtype=np.uint8)
        g.setflags(write=False)
        object.__setattr__(self, "genotype", g)
        object.__setattr__(self, "objectives", tuple(int(v) for v in self.objectives))
        object.__setattr__(self, "key", g.tobytes())

    @property
    def bits(self) -> str:
        return "".join("1" if b else "0" for b in self.genotype)

    def __eq__(self, other):
        if not isinstance(other, Individual):
            return NotImplemented
        return self.key == other.key and self.objectives == other.objectives

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"Individual({self.objectives}, {self.bits})"


def _check_length(inst: Instance, g: np.ndarray) -> np.ndarray:
    g = np.asarray(g)
    if g.shape != (inst.n,):
        raise ValueError(f"genotype length {g.shape} does not match n={inst.n}")
    return g.astype(np.int64, copy=False)


def evaluate(inst: Instance, genotype) -> tuple[tuple[int, ...], bool]:
    """Return (objective vector, feasible) for a 0/1 genotype."""
    g = _check_length(inst, genotype)
    objectives = tuple(int(v) for v in inst.profits @ g)
    feasible = bool(((inst.weights @ g) <= inst.capacities).all())
    return objectives, feasible


def repair(inst: Instance, genotype) -> np.ndarray:
    """Drop selected items in `inst.removal_order` until every constraint holds.

    Never sets a bit. Feasible input is returned unchanged (as a copy).
    """
    g = _check_length(inst, genotype).astype(np.uint8)
    loads = inst.weights @ g
    excess = loads - inst.capacities
    if (excess <= 0).all():
        return g
    order = inst.removal_order
    selected = order[g[order] == 1]
    removed = np.cumsum(inst.weights[:, selected], axis=1)
    # first prefix of removals that clears every excess
    ok = (removed >= excess[:, None]).all(axis=0)
    stop = int(np.argmax(ok))
    g[selected[: stop + 1]] = 0
    return g


def make_individual(inst: Instance, genotype) -> Individual:
    """Repair then evaluate."""
    g = repair(inst, genotype)
    objectives, feasible = evaluate(inst, g)
    return Individual(g, objectives, feasible)


def random_individual(inst: Instance, rng: np.random.Generator) -> Individual:
    bits = rng.integers(0, 2, size=inst.n, dtype=np.uint8)
    return make_individual(inst, bits)


# -- text format -------------------------------------------------------------

_HEADER = re.compile(
    r"knapsack\s+problem\s+specification\s*\(\s*(\d+)\s+knapsacks?\s*,\s*(\d+)\s+items?\s*\)",
    re.IGNORECASE,
)
_KNAPSACK = re.compile(r"knapsack\s+(\d+)\s*:$", re.IGNORECASE)
_ITEM = re.compile(r"item\s+(\d+)\s*:$", re.IGNORECASE)
_FIELD = re.compile(r"(capacity|weight|profit)\s*:\s*([+-]?\d+(?:\.\d*)?)$", re.IGNORECASE)


def _number(text: str, lineno: int, label: str) -> int:
    value = float(text)
    if value < 0:
        raise InstanceFormatError(f"negative {label} {text}", lineno)
    # fractional capacities occur in some copies; with integer weights
    # sum(w) <= c is equivalent to sum(w) <= floor(c)
    return math.floor(value)


def parse_instance(text: str, name: str = "") -> Instance:
    """Parse the benchmark text format. Errors carry the offending line number."""
    lines = [(i + 1, ln.strip()) for i, ln in enumerate(text.splitlines())]
    lines = [(i, ln) for i, ln in lines if ln]
    if not lines:
        raise InstanceFormatError("empty instance file", 1)
    lineno, head = lines[0]
    m = _HEADER.search(head)
    if not m:
        raise InstanceFormatError("malformed header, expected 'knapsack problem specification (K knapsacks, N items)'", lineno)
    n_knap, n_items = int(m.group(1)), int(m.group(2))

    blocks: list[dict] = []
    current = None
    item = None
    for lineno, ln in lines[1:]:
        if set(ln) == {"="}:
            continue
        if m := _KNAPSACK.match(ln):
            current = {"line": lineno, "capacity": None, "items": []}
            blocks.append(current)
            item = None
            continue
        if current is None:
            raise InstanceFormatError(f"unexpected content before first knapsack block: {ln!r}", lineno)
        if m := _ITEM.match(ln):
            if int(m.group(1)) != len(current["items"]) + 1:
                raise InstanceFormatError(f"item {m.group(1)} out of sequence", lineno)
            item = {"line": lineno}
            current["items"].append(item)
            continue
        if m := _FIELD.match(ln):
            key = m.group(1).lower()
            value = _number(m.group(2), lineno, key)
            if key == "capacity":
                if current["capacity"] is not None:
                    raise InstanceFormatError("duplicate capacity", lineno)
                current["capacity"] = value
            else:
                if item is None:
                    raise InstanceFormatError(f"{key} outside an item", lineno)
                if key in item:
                    raise InstanceFormatError(f"duplicate {key}", lineno)
                item[key] = value
            continue
        raise InstanceFormatError(f"unrecognised line {ln!r}", lineno)

    if len(blocks) != n_knap:
        raise InstanceFormatError(
            f"header declares {n_knap} knapsacks, found {len(blocks)}", lines[0][0]
        )
    profits, weights, capacities = [], [], []
    for b in blocks:
        if b["capacity"] is None:
            raise InstanceFormatError("missing capacity", b["line"])
        if len(b["items"]) != n_items:
            raise InstanceFormatError(
                f"inconsistent item count: knapsack has {len(b['items'])} items, expected {n_items}",
                b["line"],
            )
        for it in b["items"]:
            for key in ("weight", "profit"):
                if key not in it:
                    raise InstanceFormatError(f"missing {key}", it["line"])
        capacities.append(b["capacity"])
        weights.append([it["weight"] for it in b["items"]])
        profits.append([it["profit"] for it in b["items"]])
    return Instance(profits, weights, capacities, name=name)


def format_instance(inst: Instance) -> str:
    """Canonical text layout; parse_instance(format_instance(x)) == x."""
    if inst.k != inst.p:
        raise ValueError("the benchmark layout requires one profit row per knapsack")
    out = [f"knapsack problem specification ({inst.p} knapsacks, {inst.n} items)"]
    for i in range(inst.p):
        out.append("=")
        out.append(f"knapsack {i + 1}:")
        out.append(f" capacity: +{inst.capacities[i]}")
        for j in range(inst.n):
            out.append(f" item {j + 1}:")
            out.append(f"  weight: +{inst.weights[i, j]}")
            out.append(f"  profit: +{inst.profits[i, j]}")
    out.append("=")
    return "\n".join(out) + "\n"


def load_instance(path) -> Instance:
    from pathlib import Path

    path = Path(path)
    name = path.name
    # knapsack.250.2 -> "2.250"
    if m := re.fullmatch(r"knapsack\.(\d+)\.(\d+)", name):
        name = f"{m.group(2)}.{m.group(1)}"
    return parse_instance(path.read_text(), name=name)


def toy4() -> Instance:
    """Four items, two objectives, one constraint; 16 genotypes, 11 feasible."""
    return Instance(
        profits=[[10, 4, 7, 1], [1, 7, 4, 10]],
        weights=[[3, 3, 3, 3]],
        capacities=[6],
        name="toy4",
    )
