"""
shadows.py — Source shadows and shadow families.

A family is good for an instance with lex-min solution Z when some member A
has A ∩ Z = ∅ and covers every source shadow of Z. Four strategies:

  EXHAUSTIVE       ← powerset of the candidates (always good, 2^n members)
  RANDOMIZED       ← seeded Bernoulli(1/2) draws (good with high probability)
  ORACLE_ASSISTED  ← one set, the shadow of the brute-force lex-min solution
  CUT_SHADOWS      ← shadows of every multicut with ≤ p vertices (always good)
"""

import hashlib
import logging
import os
from itertools import combinations
from math import comb
from typing import Iterable, Optional

import numpy as np
from dotenv import load_dotenv

from app.errors import ContainsTerminalError, ExhaustiveLimitExceededError, TooLargeError
from app.models.instance import DagInstance
from app.models.results import ShadowFamily, ShadowKind, ShadowStrategy
from app.services.dag_core import VertexSet, as_vertex_set, is_multicut, reachable
from app.services.oracle import brute_solve

load_dotenv(override=True)
logger = logging.getLogger(__name__)

# ── Config ────────────────────────────────────────────────────────────────────
EXHAUSTIVE_LIMIT = int(os.getenv("DAGMC_EXHAUSTIVE_LIMIT", "16"))
CUT_SHADOW_LIMIT = int(os.getenv("DAGMC_CUT_SHADOW_LIMIT", "200000"))
RANDOM_ITERATIONS = int(os.getenv("DAGMC_RANDOM_ITERATIONS", "64"))


def source_shadow(instance: DagInstance, z: VertexSet) -> frozenset[int]:
    """Nonterminals outside Z that no source reaches in G ∖ Z."""
    members = as_vertex_set(z)
    if members & instance.terminals:
        raise ContainsTerminalError(f"cut contains terminals {sorted(members & instance.terminals)}")
    seen = reachable(instance, instance.sources, members)
    return instance.nonterminals - members - seen


def lexmin_shadow_oracle(instance: DagInstance) -> frozenset[int]:
    """Shadow of the brute-force lex-min solution; ∅ for NO instances."""
    cut = brute_solve(instance)
    if cut is None:
        return frozenset()
    return source_shadow(instance, cut)


def instance_digest(instance: DagInstance) -> int:
    """Process-independent 64-bit fingerprint of the vertex and arc sets."""
    h = hashlib.blake2b(digest_size=8)
    h.update(repr((sorted(instance.vertices), sorted(instance.arcs), instance.budget)).encode())
    return int.from_bytes(h.digest(), "little")


# ── Strategies ────────────────────────────────────────────────────────────────
def _exhaustive(pool: list[int]) -> list[frozenset[int]]:
    if len(pool) > EXHAUSTIVE_LIMIT:
        raise ExhaustiveLimitExceededError(
            f"{len(pool)} candidates exceed DAGMC_EXHAUSTIVE_LIMIT={EXHAUSTIVE_LIMIT}"
        )
    return [frozenset(c) for k in range(len(pool) + 1) for c in combinations(pool, k)]


def _randomized(instance: DagInstance, pool: list[int], seed: int, iterations: int) -> list[frozenset[int]]:
    rng = np.random.default_rng([seed, instance_digest(instance)])
    draws = rng.random((iterations, len(pool))) < 0.5
    members = np.array(pool, dtype=np.int64)
    return [frozenset(int(v) for v in members[row]) for row in draws]


def _cut_shadows(instance: DagInstance, pool: frozenset[int]) -> list[frozenset[int]]:
    nonterminals = sorted(instance.nonterminals, key=instance.position)
    top = min(instance.budget, len(nonterminals))
    total = sum(comb(len(nonterminals), k) for k in range(top + 1))
    if total > CUT_SHADOW_LIMIT:
        raise TooLargeError(f"{total} candidate cuts exceed DAGMC_CUT_SHADOW_LIMIT={CUT_SHADOW_LIMIT}")

    family: dict[frozenset[int], None] = {}
    for k in range(top + 1):
        for combo in combinations(nonterminals, k):
            if is_multicut(instance, combo):
                family.setdefault(source_shadow(instance, combo) & pool, None)
    return list(family)


def shadow_family(
    instance: DagInstance,
    strategy: ShadowStrategy,
    candidates: Optional[Iterable[int]] = None,
) -> ShadowFamily:
    """
    Family of nonterminal sets for the shadowless branching.

    Args:
        instance: the instance whose lex-min solution the family must cover.
        strategy: see module docstring.
        candidates: restrict members to these vertices; defaults to all
                    nonterminals.

    Raises:
        ExhaustiveLimitExceededError: EXHAUSTIVE over too many candidates.
        TooLargeError: CUT_SHADOWS or ORACLE_ASSISTED over too many cuts.
    """
    pool_set = instance.nonterminals if candidates is None else frozenset(candidates) & instance.nonterminals
    pool = sorted(pool_set, key=instance.position)

    if strategy.kind is ShadowKind.EXHAUSTIVE:
        sets = _exhaustive(pool)
    elif strategy.kind is ShadowKind.RANDOMIZED:
        iterations = strategy.iterations or RANDOM_ITERATIONS
        sets = _randomized(instance, pool, strategy.seed, iterations)
    elif strategy.kind is ShadowKind.ORACLE_ASSISTED:
        sets = [lexmin_shadow_oracle(instance) & pool_set]
    else:
        sets = _cut_shadows(instance, pool_set)

    logger.debug("Shadow family (%s): %d sets over %d candidates", strategy.kind.value, len(sets), len(pool))
    return ShadowFamily(sets=tuple(sets), strategy=strategy)
