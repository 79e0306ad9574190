"""
tests/test_gadgets.py — Hardness gadgets, skew conversion, expansion and the
random corpus. Gadget answers are checked with the weighted-arc oracle
against exhaustive Clique / Max-Cut on tiny graphs.
"""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import app.services.gadgets as gadgets
from app.errors import ExpansionTooLargeError, InstanceError, NotSkewShapedError
from app.models.instance import INFINITE, UndirectedGraph, WeightedArc, WeightedArcInstance
from app.services.formats import render_weighted
from app.services.gadgets import (
    all_graphs,
    clique_parameters,
    expand_to_vertex_instance,
    gen_clique_instance,
    gen_maxcut_skew_instance,
    has_clique,
    max_cut_value,
    maxcut_parameters,
    random_dag_instance,
    skew_to_two_pairs,
)
from app.services.oracle import brute_solve, brute_solve_weighted_arcs

K2 = UndirectedGraph(n=2, edges=frozenset({(0, 1)}))
EMPTY2 = UndirectedGraph(n=2)
P2 = K2  # the path on two vertices
TRIANGLE = UndirectedGraph(n=3, edges=frozenset({(0, 1), (1, 2), (0, 2)}))
SMALL_GRAPHS = [g for n in range(1, 4) for g in all_graphs(n)]
GRAPHS_UP_TO_4 = [g for n in range(1, 5) for g in all_graphs(n)]


def _graph_id(graph):
    return f"n{graph.n}-" + "_".join(f"{u}{v}" for u, v in graph.sorted_edges())


# ── Clique ────────────────────────────────────────────────────────────────────
def test_clique_parameters():
    assert clique_parameters(2) == (18, 75), "D = 2·3², p = 2·2·1·18 + 3"
    assert clique_parameters(3) == (32, 390)


def test_clique_k2_shape():
    inst = gen_clique_instance(K2, 2)
    assert inst.budget == 75
    assert len(inst.finite_arcs) == 14, f"expected 14 finite arcs, got {len(inst.finite_arcs)}"
    assert len(inst.vertices) == 32
    assert len(inst.terminal_pairs) == 10
    assert min(inst.vertices) == 1 and max(inst.vertices) == 32, "IDs are 1-based and dense"


def test_clique_k2_is_yes():
    assert brute_solve_weighted_arcs(gen_clique_instance(K2, 2)), "K2 has a 2-clique"


def test_clique_empty_graph_is_no():
    assert not brute_solve_weighted_arcs(gen_clique_instance(EMPTY2, 2)), "no edges, no 2-clique"


@pytest.mark.parametrize("graph", SMALL_GRAPHS, ids=_graph_id)
def test_clique_matches_exhaustive(graph):
    assert brute_solve_weighted_arcs(gen_clique_instance(graph, 2)) == has_clique(graph, 2), (
        f"gadget disagrees with has_clique on {sorted(graph.edges)}"
    )


def test_clique_rejects_small_t():
    with pytest.raises(InstanceError):
        gen_clique_instance(K2, 1)


def test_clique_is_deterministic():
    assert render_weighted(gen_clique_instance(K2, 2)) == render_weighted(gen_clique_instance(K2, 2))


def test_has_clique():
    assert has_clique(TRIANGLE, 3)
    assert not has_clique(EMPTY2, 2)


# ── Max-Cut ───────────────────────────────────────────────────────────────────
def test_maxcut_parameters():
    assert maxcut_parameters(P2, 1) == (3, 7)
    assert maxcut_parameters(P2, 2) == (3, 6)


def test_maxcut_vertex_order():
    inst = gen_maxcut_skew_instance(P2, 1)
    assert inst.terminal_pairs == ((1, 11), (1, 12), (2, 12)), "s1, s2 first; t1, t2 last"
    assert len(inst.vertices) == 12


@pytest.mark.parametrize(
    "graph,t,expected",
    [(P2, 1, True), (P2, 2, False), (TRIANGLE, 2, True), (TRIANGLE, 3, False)],
)
def test_maxcut_answers(graph, t, expected):
    assert (max_cut_value(graph) >= t) == expected
    assert brute_solve_weighted_arcs(gen_maxcut_skew_instance(graph, t)) == expected, (
        f"gadget answer differs from max-cut ≥ {t}"
    )


@pytest.mark.parametrize("graph", GRAPHS_UP_TO_4, ids=_graph_id)
def test_maxcut_matches_exhaustive(graph):
    """Every target 0 ≤ t ≤ m, for the skew gadget and its two-pair form."""
    best = max_cut_value(graph)
    for t in range(graph.m + 1):
        skew = gen_maxcut_skew_instance(graph, t)
        assert brute_solve_weighted_arcs(skew) == (t <= best), f"skew gadget wrong at t={t}, max cut {best}"
        assert brute_solve_weighted_arcs(skew_to_two_pairs(skew)) == (t <= best), f"two-pair form wrong at t={t}"


def test_maxcut_rejects_negative_t():
    with pytest.raises(InstanceError):
        gen_maxcut_skew_instance(P2, -1)


def test_maxcut_rejects_negative_budget():
    with pytest.raises(InstanceError):
        gen_maxcut_skew_instance(P2, 100)


# ── Skew → two pairs ──────────────────────────────────────────────────────────
@pytest.mark.parametrize("t", [1, 2])
def test_skew_to_two_pairs_preserves_answer(t):
    skew = gen_maxcut_skew_instance(P2, t)
    pairs = skew_to_two_pairs(skew)
    assert pairs.terminal_pairs == ((1, 11), (2, 12))
    assert pairs.weight(12, 11) is INFINITE, "t2 → t1 is undeletable"
    assert brute_solve_weighted_arcs(pairs) == brute_solve_weighted_arcs(skew)


def test_skew_to_two_pairs_rejects_other_shapes():
    inst = WeightedArcInstance(
        vertices=frozenset({1, 2}),
        arcs=(WeightedArc(tail=1, head=2, weight=1),),
        terminal_pairs=((1, 2),),
        budget=1,
    )
    with pytest.raises(NotSkewShapedError):
        skew_to_two_pairs(inst)


# ── Expansion ─────────────────────────────────────────────────────────────────
def _chain(budget):
    return WeightedArcInstance(
        vertices=frozenset({1, 2, 3}),
        arcs=(WeightedArc(tail=1, head=2, weight=2), WeightedArc(tail=2, head=3, weight=INFINITE)),
        terminal_pairs=((1, 3),),
        budget=budget,
    )


def test_expand_sizes():
    """3 originals + p copies of 2 + 2 middles + p+1 middles."""
    expanded = expand_to_vertex_instance(_chain(2))
    assert len(expanded.vertices) == 10, f"got {len(expanded.vertices)} vertices"
    assert brute_solve(expanded).members == frozenset({6, 7}), "the two middles of the weight-2 arc"


@pytest.mark.parametrize("budget", [0, 1, 2, 3])
def test_expand_preserves_answer(budget):
    inst = _chain(budget)
    assert (brute_solve(expand_to_vertex_instance(inst)) is not None) == brute_solve_weighted_arcs(inst)


def test_expand_guard(monkeypatch):
    monkeypatch.setattr(gadgets, "EXPANSION_LIMIT", 3)
    with pytest.raises(ExpansionTooLargeError):
        expand_to_vertex_instance(_chain(2))


# ── Random corpus ─────────────────────────────────────────────────────────────
@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 100_000), n=st.integers(2, 8), r=st.integers(0, 3))
def test_random_instances_are_valid(seed, n, r):
    inst = random_dag_instance(seed, n, r, 1)
    assert inst.vertices == frozenset(range(1, n + 1))
    assert inst.r == r
    for s, t in inst.terminal_pairs:
        assert s != t, "pairs use two distinct vertices"


def test_random_is_seeded():
    first, second = random_dag_instance(42, 6, 2, 1), random_dag_instance(42, 6, 2, 1)
    assert first.key() == second.key() and first.terminal_pairs == second.terminal_pairs


def test_all_graphs_count():
    assert len(all_graphs(3)) == 8
    assert len(SMALL_GRAPHS) == 11, "1 + 2 + 8 labelled graphs on 1..3 vertices"
