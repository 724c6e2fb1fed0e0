"""Exact solver vs brute-force oracle, budgets, interval-packing export."""

from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gencaching import (
    BudgetExceeded,
    FORCED,
    IntervalPackingInstance,
    OPTIONAL,
    Service,
    UnsupportedPolicyError,
    enumerate_gaps,
    export_interval_packing,
    make_instance,
    optional_to_forced,
    packing_to_text,
    savings,
    solve_brute_force,
    solve_exact,
    validate_service,
)
from randgen import random_tiny_instance


def bare(capacity, pages, reqs, policy=OPTIONAL):
    return make_instance(capacity, pages, [(p, None) for p in reqs], (), policy)


# --- small hand-solved instances ------------------------------------------


def test_repeated_page_saves_its_cost():
    inst = bare(2, [("p", 2, 5)], ["p", "p"])
    assert solve_exact(inst).optimal_savings == 5


def test_interleaved_pair_needs_double_capacity():
    pages = [("p", 2, 1), ("q", 2, 1)]
    tight = bare(2, pages, ["p", "q", "p", "q"])
    roomy = bare(4, pages, ["p", "q", "p", "q"])
    assert solve_exact(tight).optimal_savings == 1
    assert solve_exact(roomy).optimal_savings == 2
    assert solve_brute_force(tight).optimal_savings == 1
    assert solve_brute_force(roomy).optimal_savings == 2


def test_no_gaps_means_no_savings():
    inst = bare(3, [("p", 1, 1), ("q", 1, 1)], ["p", "q"])
    result = solve_exact(inst)
    assert result.optimal_savings == 0
    assert result.witness == Service.of([])


def test_costs_steer_the_choice():
    # Only one of the two overlapping gaps fits; the dearer page wins.
    inst = bare(2, [("p", 2, 1), ("q", 2, 3)], ["p", "q", "p", "q"])
    result = solve_exact(inst)
    assert result.optimal_savings == 3
    assert result.witness == Service.of([("q", 0)])


def test_forced_momentary_fit_limits_savings():
    # Keeping p across q's request would leave no room to load q at all.
    pages = [("p", 2, 1), ("q", 2, 1)]
    optional = bare(3, pages, ["p", "q", "p"])
    forced = bare(3, pages, ["p", "q", "p"], policy=FORCED)
    assert solve_exact(optional).optimal_savings == 1
    assert solve_exact(forced).optimal_savings == 0
    assert solve_brute_force(forced).optimal_savings == 0


# --- guards ---------------------------------------------------------------


def test_exact_budget_exhaustion_raises():
    rng = random.Random(7)
    inst = random_tiny_instance(rng)
    while not enumerate_gaps(inst):
        inst = random_tiny_instance(rng)
    with pytest.raises(BudgetExceeded):
        solve_exact(inst, budget=1)


def test_brute_force_gap_guard():
    inst = bare(2, [("p", 1, 1)], ["p"] * 26)
    assert len(enumerate_gaps(inst)) == 25
    with pytest.raises(BudgetExceeded):
        solve_brute_force(inst)
    small = bare(2, [("p", 1, 1)], ["p"] * 6)
    with pytest.raises(BudgetExceeded):
        solve_brute_force(small, max_gaps=4)
    assert solve_brute_force(small, max_gaps=5).optimal_savings == 5


# --- randomized agreement ---------------------------------------------------


@pytest.mark.parametrize("policy", [OPTIONAL, FORCED])
def test_exact_matches_brute_force_on_random_instances(policy):
    rng = random.Random(20260814 if policy == OPTIONAL else 41)
    for _ in range(60):
        inst = random_tiny_instance(rng, policy)
        exact = solve_exact(inst)
        brute = solve_brute_force(inst)
        assert exact.optimal_savings == brute.optimal_savings
        for result in (exact, brute):
            assert validate_service(inst, result.witness).ok
            assert savings(inst, result.witness) == result.optimal_savings


def test_witness_is_deterministic():
    rng = random.Random(99)
    for _ in range(25):
        inst = random_tiny_instance(rng)
        assert solve_exact(inst).witness == solve_exact(inst).witness
        assert solve_brute_force(inst).witness == solve_brute_force(inst).witness


def test_savings_monotone_in_capacity():
    rng = random.Random(5)
    for _ in range(30):
        inst = random_tiny_instance(rng)
        pages = [(p.id, p.size, p.cost) for p in inst.pages.values()]
        reqs = [(r.page, r.block) for r in inst.requests]
        bigger = make_instance(inst.capacity + 1, pages, reqs, (), inst.policy)
        assert solve_exact(bigger).optimal_savings >= solve_exact(inst).optimal_savings


def test_forced_never_beats_optional():
    rng = random.Random(13)
    for _ in range(30):
        inst = random_tiny_instance(rng, FORCED)
        pages = [(p.id, p.size, p.cost) for p in inst.pages.values()]
        reqs = [(r.page, r.block) for r in inst.requests]
        optional = make_instance(inst.capacity, pages, reqs, (), OPTIONAL)
        assert solve_exact(inst).optimal_savings <= solve_exact(optional).optimal_savings


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_exact_matches_brute_force_hypothesis(seed):
    inst = random_tiny_instance(random.Random(seed))
    assert solve_exact(inst).optimal_savings == solve_brute_force(inst).optimal_savings


# --- interval packing export -------------------------------------------------


def max_packing_value(packing: IntervalPackingInstance) -> int:
    """Reference optimum: try every subset, intervals cover [start, end)."""
    best = 0
    intervals = packing.intervals
    horizon = max((end for _, end, _, _ in intervals), default=0)
    for picks in itertools.product([False, True], repeat=len(intervals)):
        load = [0] * horizon
        value = 0
        for chosen, (start, end, size, cost) in zip(picks, intervals):
            if not chosen:
                continue
            value += cost
            for t in range(start, end):
                load[t] += size
        if all(x <= packing.limit for x in load):
            best = max(best, value)
    return best


def test_packing_mirrors_gaps_verbatim():
    inst = bare(2, [("p", 2, 1), ("q", 2, 3)], ["p", "q", "p", "q"])
    packing = export_interval_packing(inst)
    assert packing.limit == 2
    assert packing.intervals == ((0, 2, 2, 1), (1, 3, 2, 3))


def test_packing_optimum_equals_caching_optimum():
    rng = random.Random(77)
    for _ in range(40):
        inst = random_tiny_instance(rng)
        if len(enumerate_gaps(inst)) > 10:
            continue
        packing = export_interval_packing(inst)
        assert max_packing_value(packing) == solve_exact(inst).optimal_savings


def test_packing_rejects_forced_instances():
    inst = bare(2, [("p", 2, 1)], ["p", "p"], policy=FORCED)
    with pytest.raises(UnsupportedPolicyError):
        export_interval_packing(inst)
    with pytest.raises(UnsupportedPolicyError):
        export_interval_packing(optional_to_forced(bare(2, [("p", 2, 1)], ["p", "p"])))


def test_packing_text_shape():
    inst = bare(2, [("p", 2, 1), ("q", 2, 3)], ["p", "q", "p", "q"])
    text = packing_to_text(export_interval_packing(inst))
    lines = text.splitlines()
    assert lines[0] == "interval-packing 1"
    assert lines[1] == "limit 2"
    assert lines[2:] == ["0 2 2 1", "1 3 2 3"]
