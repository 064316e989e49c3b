import itertools

import numpy as np
import pytest

from pcpmoea.momkp import Individual, Instance, evaluate, format_instance, toy4

# Toy fixture facts, enumerated by hand: every pair of items weighs 6, every
# triple 9, so the feasible genotypes are the 11 subsets of size <= 2.
TOY4_FRONT = {(17, 5), (14, 8), (11, 11), (8, 14), (5, 17)}


@pytest.fixture
def toy():
    return toy4()


def all_genotypes(n):
    for bits in itertools.product((0, 1), repeat=n):
        yield np.array(bits, dtype=np.uint8)


def brute_force_front(inst):
    """(feasible objective vectors, Pareto objective set, Pareto genotypes) by enumeration."""
    feasible = []
    for g in all_genotypes(inst.n):
        z, ok = evaluate(inst, g)
        if ok:
            feasible.append((z, "".join(map(str, g))))
    front = set()
    genos = set()
    for z, bits in feasible:
        if not any(
            all(a >= b for a, b in zip(w, z)) and w != z for w, _ in feasible
        ):
            front.add(z)
            genos.add(bits)
    return feasible, front, genos


def brute_nondominated(objs):
    """O(n^2) oracle: indices of rows no other row dominates."""
    objs = np.asarray(objs)
    ge = (objs[:, None, :] >= objs[None, :, :]).all(axis=2)
    gt = (objs[:, None, :] > objs[None, :, :]).any(axis=2)
    dominated = (ge & gt).any(axis=0)
    return set(np.flatnonzero(~dominated).tolist())


def make_pop(objs, rng=None, n_bits=24):
    """Individuals with the given objective vectors and distinct genotypes."""
    out = []
    for r, z in enumerate(objs):
        bits = np.array([int(c) for c in f"{r:0{n_bits}b}"], dtype=np.uint8)
        out.append(Individual(bits, tuple(int(v) for v in z)))
    return out


def zitzler_like(n, k, seed):
    """Uncorrelated instance: profits/weights uniform in [10, 100], capacity half the weight sum."""
    rng = np.random.default_rng(seed)
    weights = rng.integers(10, 101, size=(k, n))
    profits = rng.integers(10, 101, size=(k, n))
    return Instance(profits, weights, weights.sum(axis=1) // 2, name=f"{k}.{n}")


@pytest.fixture
def synthetic_250():
    return zitzler_like(250, 2, 12345)


TOY_FILE = """knapsack problem specification (2 knapsacks, 4 items)
=
knapsack 1:
 capacity: +6
 item 1:
  weight: +3
  profit: +10
 item 2:
  weight: +3
  profit: +4
 item 3:
  weight: +3
  profit: +7
 item 4:
  weight: +3
  profit: +1
=
knapsack 2:
 capacity: +9
 item 1:
  weight: +2
  profit: +1
 item 2:
  weight: +4
  profit: +7
 item 3:
  weight: +5
  profit: +4
 item 4:
  weight: +1
  profit: +10
=
"""


@pytest.fixture
def toy_file_text():
    return TOY_FILE


@pytest.fixture
def instance_file(tmp_path):
    def write(inst, name="knapsack.4.2"):
        path = tmp_path / name
        path.write_text(format_instance(inst))
        return path

    return write
