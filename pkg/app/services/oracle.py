"""
oracle.py — Brute-force ground truth for both multicut variants.

  brute_solve               ← vertex deletion, returns the lex-min solution
  brute_solve_weighted_arcs ← arc deletion with weights, YES/NO only

Both refuse oversized inputs with TooLargeError instead of hanging.
"""

import logging
import os
from itertools import combinations
from math import comb
from typing import Optional

import networkx as nx
from dotenv import load_dotenv

from app.errors import TooLargeError
from app.models.instance import CutSet, DagInstance, WeightedArcInstance
from app.services.dag_core import is_multicut

load_dotenv(override=True)
logger = logging.getLogger(__name__)

# ── Config ────────────────────────────────────────────────────────────────────
ORACLE_LIMIT = int(os.getenv("DAGMC_ORACLE_LIMIT", "10000000"))


def brute_solve(instance: DagInstance) -> Optional[CutSet]:
    """
    Enumerate nonterminal subsets by size, then ς-lex order, and return the
    first multicut. That first hit is the lex-min solution. None means NO.
    """
    pool = sorted(instance.nonterminals, key=instance.position)
    top = min(instance.budget, len(pool))
    total = sum(comb(len(pool), k) for k in range(top + 1))
    if total > ORACLE_LIMIT:
        raise TooLargeError(f"{total} candidate cuts exceed DAGMC_ORACLE_LIMIT={ORACLE_LIMIT}")

    for k in range(top + 1):
        for combo in combinations(pool, k):
            if is_multicut(instance, combo):
                logger.debug("Oracle found lex-min cut %s", combo)
                return CutSet(members=frozenset(combo))
    return None


def brute_solve_weighted_arcs(instance: WeightedArcInstance) -> bool:
    """
    True iff finite-weight arcs of total weight ≤ p separate every pair.

    Bounded search tree: find an open s_i→t_i path, branch on deleting each
    affordable finite arc on it. Every solution hits that path, so the
    search is exhaustive. Failed deletion sets are memoised.
    """
    g = instance.graph()
    failed: set[frozenset[tuple[int, int]]] = set()
    states = 0

    def open_path(deleted: frozenset[tuple[int, int]]) -> Optional[list[int]]:
        view = nx.restricted_view(g, [], deleted)
        for s, t in instance.terminal_pairs:
            if nx.has_path(view, s, t):
                return nx.shortest_path(view, s, t)
        return None

    def search(deleted: frozenset[tuple[int, int]], spent: int) -> bool:
        nonlocal states
        states += 1
        if states > ORACLE_LIMIT:
            raise TooLargeError(f"weighted search exceeded DAGMC_ORACLE_LIMIT={ORACLE_LIMIT} states")
        path = open_path(deleted)
        if path is None:
            return True
        for u, v in zip(path, path[1:]):
            w = instance.weight(u, v)
            if not isinstance(w, int) or spent + w > instance.budget:
                continue
            nxt = deleted | {(u, v)}
            if nxt in failed:
                continue
            if search(nxt, spent + w):
                return True
            failed.add(nxt)
        return False

    if any(s == t for s, t in instance.terminal_pairs):
        return False
    answer = search(frozenset(), 0)
    logger.debug("Weighted oracle: %s after %d states", answer, states)
    return answer
