import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pcpmoea.momkp import (
    Instance,
    InstanceFormatError,
    evaluate,
    format_instance,
    load_instance,
    parse_instance,
    random_individual,
    repair,
)

from conftest import TOY_FILE, all_genotypes, zitzler_like


def bits(s):
    return np.array([int(c) for c in s], dtype=np.uint8)


def test_parse_toy_file():
    inst = parse_instance(TOY_FILE)
    assert (inst.n, inst.k, inst.p) == (4, 2, 2)
    assert inst.capacities.tolist() == [6, 9]
    assert inst.weights[1].tolist() == [2, 4, 5, 1]
    assert inst.profits[0].tolist() == [10, 4, 7, 1]


def test_parse_tolerates_loose_whitespace():
    loose = "\n\n".join("   " + ln + "  " for ln in TOY_FILE.splitlines())
    assert parse_instance(loose) == parse_instance(TOY_FILE)


def test_inconsistent_item_count_reports_line():
    lines = TOY_FILE.splitlines()
    # drop item 4 of knapsack 2 (its three lines)
    cut = [i for i, ln in enumerate(lines) if ln.strip() == "item 4:"][1]
    broken = "\n".join(lines[:cut] + lines[cut + 3:])
    with pytest.raises(InstanceFormatError, match="inconsistent item count") as err:
        parse_instance(broken)
    assert err.value.line == 18  # the "knapsack 2:" line


@pytest.mark.parametrize(
    "mutate, message",
    [
        (lambda t: t.replace("specification (2 knapsacks", "spec (2 sacks"), "malformed header"),
        (lambda t: t.replace("weight: +3\n  profit: +4", "weight: -3\n  profit: +4"), "negative"),
        (lambda t: t.replace(" capacity: +9\n", ""), "missing capacity"),
        (lambda t: t.replace("  profit: +7\n", "", 1), "missing profit"),
        (lambda t: t.replace("(2 knapsacks", "(3 knapsacks"), "declares 3 knapsacks"),
    ],
)
def test_parse_errors(mutate, message):
    with pytest.raises(InstanceFormatError, match=message) as err:
        parse_instance(mutate(TOY_FILE))
    assert err.value.line is not None


def test_benchmark_sized_file_and_name(instance_file):
    path = instance_file(zitzler_like(250, 2, 7), name="knapsack.250.2")
    inst = load_instance(path)
    assert (inst.n, inst.k, inst.p) == (250, 2, 2)
    assert inst.name == "2.250"


def test_fractional_capacity_is_floored():
    inst = parse_instance(TOY_FILE.replace("capacity: +6\n", "capacity: +6.5\n"))
    assert inst.capacities[0] == 6


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 12), st.integers(1, 3), st.integers(0, 2**31))
def test_format_parse_roundtrip(n, k, seed):
    rng = np.random.default_rng(seed)
    inst = Instance(
        rng.integers(0, 100, (k, n)), rng.integers(0, 100, (k, n)), rng.integers(0, 500, k)
    )
    assert parse_instance(format_instance(inst)) == inst


# -- evaluate ---------------------------------------------------------------

@pytest.mark.parametrize(
    "g, expected",
    [("0000", ((0, 0), True)), ("1001", ((11, 11), True)), ("1110", ((21, 12), False))],
)
def test_evaluate_toy4(toy, g, expected):
    assert evaluate(toy, bits(g)) == expected


def test_evaluate_length_mismatch(toy):
    with pytest.raises(ValueError):
        evaluate(toy, bits("101"))


def test_evaluate_is_pure(toy):
    g = bits("0110")
    assert evaluate(toy, g) == evaluate(toy, g)
    assert g.tolist() == [0, 1, 1, 0]


# -- repair -----------------------------------------------------------------

def test_repair_noop_on_feasible(toy):
    assert repair(toy, bits("1001")).tolist() == [1, 0, 0, 1]


def test_repair_full_knapsack(toy):
    # all utilities tie (22 each): lower index leaves first
    out = repair(toy, bits("1111"))
    assert out.tolist() == [0, 0, 1, 1]
    assert evaluate(toy, out)[1]


def test_repair_three_items(toy):
    out = repair(toy, bits("1110"))
    assert evaluate(toy, out)[1]
    assert out.sum() <= 2 and out[3] == 0
    # the brute-force feasible subsets of {1,2,3} with two items
    feasible_pairs = {(1, 1, 0, 0), (1, 0, 1, 0), (0, 1, 1, 0)}
    assert tuple(out.tolist()) in feasible_pairs


def test_removal_order_prefers_low_utility():
    inst = Instance([[1, 50, 10]], [[10, 10, 10]], [15])
    # utilities 1.5, 75, 15 -> drop item 0 then item 2
    assert inst.removal_order.tolist() == [0, 2, 1]
    assert repair(inst, bits("111")).tolist() == [0, 1, 0]


def test_zero_capacity_with_free_items():
    inst = Instance([[5, 5]], [[0, 3]], [0])
    assert repair(inst, bits("11")).tolist() == [1, 0]


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 30), st.integers(1, 3), st.integers(0, 2**31))
def test_repair_properties(n, p, seed):
    rng = np.random.default_rng(seed)
    w = rng.integers(0, 50, (p, n))
    inst = Instance(rng.integers(0, 50, (2, n)), w, rng.integers(0, 25 * n, p))
    g = rng.integers(0, 2, n).astype(np.uint8)
    out = repair(inst, g)
    assert evaluate(inst, out)[1]
    assert ((out == 1) <= (g == 1)).all()  # only clears bits
    assert (w @ out <= w @ g).all()
    assert np.array_equal(repair(inst, out), out)


# -- random_individual ------------------------------------------------------

def test_random_individual_feasible_and_deterministic(toy):
    a = random_individual(toy, np.random.default_rng(3))
    b = random_individual(toy, np.random.default_rng(3))
    assert a.feasible and int((toy.weights @ a.genotype)[0]) <= 6
    assert a == b and a.objectives == b.objectives


def test_random_individual_covers_feasible_set(toy):
    feasible = {
        "".join(map(str, g)) for g in all_genotypes(4) if evaluate(toy, g)[1]
    }
    assert len(feasible) == 11
    rng = np.random.default_rng(0)
    seen = {random_individual(toy, rng).bits for _ in range(10_000)}
    assert seen == feasible


def test_instance_validation():
    with pytest.raises(ValueError):
        Instance([[1, 2]], [[1, 2, 3]], [3])
    with pytest.raises(ValueError):
        Instance([[1, 2]], [[1, 2]], [-1])
    inst = Instance([[1, 2]], [[1, 2]], [3])
    with pytest.raises(ValueError):
        inst.profits[0, 0] = 5
