"""Line-oriented front files.

    # instance: 2.250
    # k: 2
    # algorithm: PCPMOEA
    # seed: 0
    # config: pop_size=150 alpha=0.25 ...
    9012 8873 | 0110...
    ...

Header lines start with ``#`` and hold ``key: value`` pairs. Each record
is an objective vector, optionally followed by ``|`` and the genotype as a
0/1 string (fronts produced by other tools may omit it). Records are
written sorted, so the same front always produces the same bytes.
"""
from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .momkp import Individual, Instance, evaluate
from .pareto import Archive, nondominated_mask


class FrontFormatError(ValueError):
    pass


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    return str(int(v)) if v.is_integer() else repr(v)


def _num(text: str):
    try:
        return int(text)
    except ValueError:
        return float(text)


@dataclass
class FrontFile:
    header: dict = field(default_factory=dict)
    objectives: list = field(default_factory=list)  # list of tuples
    genotypes: Optional[list] = None  # list of 0/1 strings, aligned with objectives

    @property
    def k(self) -> int:
        if self.objectives:
            return len(self.objectives[0])
        return int(self.header.get("k", 0))

    def __len__(self):
        return len(self.objectives)

    def array(self) -> np.ndarray:
        return np.array(self.objectives, dtype=float).reshape(len(self.objectives), -1)

    @classmethod
    def from_archive(cls, archive: Archive, header: dict) -> "FrontFile":
        members = list(archive)
        return cls(
            header=dict(header),
            objectives=[m.objectives for m in members],
            genotypes=[m.bits for m in members],
        )

    def individuals(self) -> list[Individual]:
        """Records as Individuals; objective-only records get an index key."""
        out = []
        for r, z in enumerate(self.objectives):
            if self.genotypes is not None:
                bits = np.array([c == "1" for c in self.genotypes[r]], dtype=np.uint8)
            else:
                # placeholder genotype: the record number in binary, unique per record
                bits = np.array([int(c) for c in f"{r:032b}"], dtype=np.uint8)
            out.append(Individual(bits, z))
        return out

    def _sorted_records(self):
        rows = list(range(len(self.objectives)))
        if self.genotypes is None:
            rows.sort(key=lambda r: self.objectives[r])
        else:
            rows.sort(key=lambda r: (self.objectives[r], self.genotypes[r]))
        return rows

    def dumps(self) -> str:
        lines = [f"# {key}: {value}" for key, value in self.header.items()]
        for r in self._sorted_records():
            rec = " ".join(_fmt(v) for v in self.objectives[r])
            if self.genotypes is not None:
                rec += f" | {self.genotypes[r]}"
            lines.append(rec)
        return "\n".join(lines) + "\n"

    def validate(self, inst: Optional[Instance] = None) -> None:
        """Mutual non-dominance, consistent k, and (with `inst`) evaluation."""
        if not self.objectives:
            return
        ks = {len(z) for z in self.objectives}
        if len(ks) != 1:
            raise FrontFormatError(f"records mix objective counts {sorted(ks)}")
        k = ks.pop()
        if "k" in self.header and str(self.header["k"]) != str(k):
            raise FrontFormatError(f"header says k={self.header['k']} but records have {k}")
        mask = nondominated_mask(self.array())
        if not mask.all():
            bad = self.objectives[int(np.flatnonzero(~mask)[0])]
            raise FrontFormatError(f"record {bad} is dominated by another record")
        if inst is None:
            return
        if self.genotypes is None:
            raise FrontFormatError("front has no genotypes to check against the instance")
        if k != inst.k:
            raise FrontFormatError(f"front has {k} objectives, instance {inst.k}")
        for z, bits in zip(self.objectives, self.genotypes):
            if len(bits) != inst.n:
                raise FrontFormatError(f"genotype length {len(bits)} != n={inst.n}")
            value, feasible = evaluate(inst, np.array([c == "1" for c in bits], dtype=np.uint8))
            if not feasible:
                raise FrontFormatError(f"genotype {bits} violates a capacity")
            if tuple(value) != tuple(z):
                raise FrontFormatError(f"record {z} does not match its genotype (evaluates to {value})")


def loads(text: str) -> FrontFile:
    header: dict = {}
    objectives = []
    genotypes: list = []
    has_bits = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if ":" in body:
                key, _, value = body.partition(":")
                header[key.strip()] = value.strip()
            continue
        vec, sep, bits = line.partition("|")
        try:
            z = tuple(_num(t) for t in vec.split())
        except ValueError:
            raise FrontFormatError(f"line {lineno}: bad objective value in {line!r}") from None
        if not z:
            raise FrontFormatError(f"line {lineno}: empty record")
        bits = bits.strip()
        if has_bits is None:
            has_bits = bool(sep)
        elif has_bits != bool(sep):
            raise FrontFormatError(f"line {lineno}: genotype present on some records only")
        if sep:
            if not bits or set(bits) - {"0", "1"}:
                raise FrontFormatError(f"line {lineno}: genotype must be a 0/1 string")
            genotypes.append(bits)
        objectives.append(z)
    return FrontFile(header, objectives, genotypes if has_bits else None)


def read_front(path, inst: Optional[Instance] = None) -> FrontFile:
    front = loads(Path(path).read_text())
    front.validate(inst)
    return front


def write_front(path, front: FrontFile) -> Path:
    """Atomic write (temp file + rename)."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(front.dumps())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path
