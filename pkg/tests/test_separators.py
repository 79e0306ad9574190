"""
tests/test_separators.py — Minimum vertex separators, importance and the potential.

The max-flow separator is cross-checked against subset enumeration on
small random DAGs.
"""

from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from app.errors import InstanceError, NotASeparatorError
from app.models.instance import INFINITE
from app.services.dag_core import build_instance
from app.services.gadgets import random_dag_instance
from app.services.separators import is_important_separator, min_separator, potential, separates


def _brute_cut_size(instance, s, t):
    pool = sorted(instance.nonterminals)
    for k in range(len(pool) + 1):
        for combo in combinations(pool, k):
            if separates(instance, [s], [t], combo):
                return k
    return INFINITE


# ── min_separator ─────────────────────────────────────────────────────────────
def test_path_closest_cuts(i_path):
    """On a path the mincut closest to 1 is {2} and the one closest to 4 is {3}."""
    report = min_separator(i_path, {1}, {4})
    assert report.size == 1, f"expected size 1, got {report.size}"
    assert report.closest_to_x == frozenset({2}), f"closest to X: {set(report.closest_to_x)}"
    assert report.closest_to_y == frozenset({3}), f"closest to Y: {set(report.closest_to_y)}"


def test_diamond_unique_cut(diamond):
    report = min_separator(diamond, {1}, {4})
    assert report.size == 2
    assert report.closest_to_x == report.closest_to_y == frozenset({2, 3}), "the only mincut is {2, 3}"


def test_direct_arc_is_infinite():
    inst = build_instance([1, 2], [(1, 2)], [(1, 2)], 5)
    report = min_separator(inst, {1}, {2})
    assert report.size is INFINITE
    assert not report.is_finite
    assert report.closest_to_x == frozenset(), "no cut sets for an infinite report"


def test_path_through_terminal_is_infinite():
    """Terminals are undeletable, so a path of terminals cannot be cut."""
    inst = build_instance([1, 2, 3, 4], [(1, 2), (2, 3)], [(1, 3), (2, 4)], 2)
    assert min_separator(inst, {1}, {3}).size is INFINITE


def test_overlapping_sets_infinite(i_path):
    assert min_separator(i_path, {1, 2}, {2, 4}).size is INFINITE


def test_unreachable_is_zero():
    inst = build_instance([1, 2, 3], [(1, 2)], [(1, 3)], 0)
    report = min_separator(inst, {1}, {3})
    assert report.size == 0, "nothing to cut"
    assert report.closest_to_x == frozenset() and report.closest_to_y == frozenset()


def test_limit_reports_infinite(diamond):
    """Reaching the flow limit is reported as INFINITE."""
    assert min_separator(diamond, {1}, {4}, limit=2).size is INFINITE
    assert min_separator(diamond, {1}, {4}, limit=3).size == 2


def test_empty_side_rejected(i_path):
    with pytest.raises(InstanceError):
        min_separator(i_path, set(), {4})


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 100_000), n=st.integers(2, 7))
def test_separator_size_matches_enumeration(seed, n):
    """Flow value equals the smallest separating subset of nonterminals."""
    inst = random_dag_instance(seed, n, 1, 0)
    s, t = inst.terminal_pairs[0]
    report = min_separator(inst, {s}, {t})
    expected = _brute_cut_size(inst, s, t)
    assert report.size == expected, f"flow gave {report.size}, enumeration {expected}"
    if report.is_finite:
        for cut in (report.closest_to_x, report.closest_to_y):
            assert len(cut) == report.size, "closest cuts are minimum"
            assert separates(inst, {s}, {t}, cut), f"{set(cut)} does not separate"


# ── Importance ────────────────────────────────────────────────────────────────
def test_important_path(i_path):
    assert is_important_separator(i_path, {1}, {4}, {3}), "{3} pushes furthest from 1"
    assert not is_important_separator(i_path, {1}, {4}, {2}), "{3} lies behind {2} with equal size"


def test_important_diamond(diamond):
    assert is_important_separator(diamond, {1}, {4}, {2, 3})


def test_important_rejects_non_separator(i_path):
    with pytest.raises(NotASeparatorError):
        is_important_separator(i_path, {1}, {4}, set())


def test_important_rejects_terminal(i_path):
    with pytest.raises(NotASeparatorError):
        is_important_separator(i_path, {1}, {4}, {4})


def test_non_minimal_is_not_important(i_path):
    assert not is_important_separator(i_path, {1}, {4}, {2, 3})


# ── Potential ─────────────────────────────────────────────────────────────────
def test_potential_path(i_path):
    pot = potential(i_path)
    assert pot.value == 1, f"(1+1)·1 − 1 = 1, got {pot.value}"
    assert pot.cuts == (1,)


def test_potential_diamond(diamond):
    assert potential(diamond).value == 2, "(1+1)·2 − 2 = 2"


def test_potential_infeasible(diamond_p1):
    pot = potential(diamond_p1)
    assert not pot.feasible, "cut 2 exceeds p = 1"
    assert pot.cuts == (INFINITE,)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 100_000), n=st.integers(3, 7), density=st.floats(0.2, 0.7))
def test_closest_to_y_is_the_unique_minimum_important_separator(seed, n, density):
    """Among minimum separators exactly one is important: the one closest to Y."""
    inst = random_dag_instance(seed, n, 1, 0, density)
    s, t = inst.terminal_pairs[0]
    report = min_separator(inst, {s}, {t})
    if not report.is_finite or report.size == 0:
        return
    assert is_important_separator(inst, {s}, {t}, report.closest_to_y), f"{set(report.closest_to_y)} is not important"
    for combo in combinations(sorted(inst.nonterminals), report.size):
        if frozenset(combo) != report.closest_to_y and separates(inst, {s}, {t}, combo):
            assert not is_important_separator(inst, {s}, {t}, combo), f"{combo} is a second important mincut"


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 100_000), n=st.integers(2, 7), density=st.floats(0.2, 0.7))
def test_closest_to_x_is_closest_to_y_reversed(seed, n, density):
    """Reversing every arc swaps the roles of the two extremal mincuts."""
    inst = random_dag_instance(seed, n, 1, 0, density)
    s, t = inst.terminal_pairs[0]
    reverse = build_instance(inst.vertices, [(v, u) for u, v in inst.arcs], [(t, s)], inst.budget)
    forward = min_separator(inst, {s}, {t})
    backward = min_separator(reverse, {t}, {s})
    assert forward.size == backward.size
    assert forward.closest_to_x == backward.closest_to_y, "closest to s differs after reversal"
    assert forward.closest_to_y == backward.closest_to_x, "closest to t differs after reversal"
