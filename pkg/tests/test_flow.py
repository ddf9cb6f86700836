"""Funding feasibility: exact max-flow, certificates, and the structural
properties the stability layer depends on (heredity, anonymity,
integrality)."""

import random
from fractions import Fraction

from conftest import M, random_instance, random_matching

from cutoffmatch.flow import (
    SINK,
    SOURCE,
    SipFeasibility,
    build_flow_graph,
    check_feasibility,
    feasible_counts,
    max_flow,
    min_cut_reachable,
    to_dot,
    verify_allocation,
)
from cutoffmatch.model import gadget, make_instance


def test_max_flow_hand_example():
    inst = gadget("example1")
    graph = build_flow_graph(inst, {"p1": 0, "p2": 1})
    value, flow = max_flow(graph)
    assert value == 1
    # the cut certifies optimality: all arcs leaving the reachable set are
    # saturated, so value == cut capacity
    reach = min_cut_reachable(graph, flow)
    assert SOURCE in reach and SINK not in reach
    cut = sum(
        cap for (u, v), cap in graph.capacity.items()
        if u in reach and v not in reach
    )
    assert cut == value


def test_check_feasibility_example1_triple():
    inst = gadget("example1")
    # s1 and s2 together hold 7/10 + 1/2, but p1 is funded by s1 alone
    ok, alloc = check_feasibility(inst, M(("a2", "p1")))
    assert not ok and alloc is None
    for m in (M(), M(("a1", "p2")), M(("a2", "p2"))):
        ok, alloc = check_feasibility(inst, m)
        assert ok
        assert verify_allocation(inst, m.counts(inst), alloc)


def test_check_feasibility_rejects_invalid_matchings():
    inst = gadget("example1")
    assert check_feasibility(inst, M(("a1", "p1"), ("a1", "p2")))[0] is False
    assert check_feasibility(inst, M(("a9", "p1")))[0] is False


def test_fractional_certificate_splits_funding():
    inst = gadget("example1")
    ok, alloc = check_feasibility(inst, M(("a1", "p2")))
    assert ok
    assert sum(alloc.values()) == 1
    assert alloc[("s1", "p2")] + alloc[("s2", "p2")] == 1


def test_verify_allocation_rejects_violations():
    inst = gadget("example1")
    counts = {"p1": 0, "p2": 1}
    assert verify_allocation(inst, counts, {("s2", "p2"): Fraction(1, 2),
                                            ("s1", "p2"): Fraction(1, 2)})
    # wrong total at the project
    assert not verify_allocation(inst, counts, {("s2", "p2"): Fraction(1, 2)})
    # supervisor over budget
    assert not verify_allocation(inst, counts, {("s2", "p2"): Fraction(1)})
    # funding a project outside the supervised set
    assert not verify_allocation(inst, {"p1": 1, "p2": 0}, {("s2", "p1"): Fraction(1)})


def test_sip_feasibility_counts_every_call():
    inst = gadget("example1")
    feas = SipFeasibility(inst)
    assert feas({"p1": 0, "p2": 1})
    assert feas({"p1": 0, "p2": 1})  # memo hit still counts
    assert feas.calls == 2


def test_feasible_counts_matches_check_feasibility():
    inst = gadget("thm7_item3")
    for m in (M(), M(("a1", "p2"), ("a2", "p2")), M(("a1", "p1"), ("a3", "p3"))):
        assert feasible_counts(inst, m.counts(inst)) == check_feasibility(inst, m)[0]


def test_heredity_and_anonymity_random_sweep():
    for seed in range(40):
        inst = random_instance(seed, max_applicants=6, max_projects=5, max_supervisors=3)
        rng = random.Random(seed * 31 + 1)
        feas = SipFeasibility(inst)
        m = random_matching(inst, rng)
        counts = m.counts(inst)
        if feas(counts):
            # heredity: any pointwise smaller count vector stays feasible
            sub = {p: rng.randint(0, c) for p, c in counts.items()}
            assert feas(sub)
        # anonymity: feasibility only reads the count vector, so any
        # matching with the same counts agrees
        ok1, _ = check_feasibility(inst, m)
        assert ok1 == feas(counts)


def test_integrality_with_integer_budgets():
    for seed in range(30):
        inst = random_instance(seed, max_applicants=6, max_projects=5,
                               max_supervisors=3, budget_range=(0, 3))
        if any(q.denominator != 1 for q in inst.budgets.values()):
            continue
        rng = random.Random(seed)
        m = random_matching(inst, rng)
        ok, alloc = check_feasibility(inst, m)
        if ok:
            assert all(x.denominator == 1 for x in alloc.values())


def test_integrality_fixture():
    inst = make_instance(
        applicants=["a1", "a2"],
        applicant_prefs={"a1": ["p1"], "a2": ["p2"]},
        project_prefs={"p1": ["a1"], "p2": ["a2"]},
        capacities={"p1": 1, "p2": 1},
        supervised={"s1": ["p1", "p2"], "s2": ["p2"]},
        budgets={"s1": 1, "s2": 1},
    )
    ok, alloc = check_feasibility(inst, M(("a1", "p1"), ("a2", "p2")))
    assert ok
    assert all(x.denominator == 1 for x in alloc.values())
    assert verify_allocation(inst, {"p1": 1, "p2": 1}, alloc)


def test_to_dot_lists_every_arc():
    inst = gadget("example1")
    graph = build_flow_graph(inst, {"p1": 0, "p2": 1})
    dot = to_dot(graph)
    assert dot.startswith("digraph funding {")
    assert dot.count("->") == len(graph.capacity)
