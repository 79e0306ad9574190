"""
gadgets.py — Instance generators.

  gen_clique_instance        ← Clique → weighted DAG multicut (budget-parameterized hardness)
  gen_maxcut_skew_instance   ← Max-Cut → weighted skew multicut, 4 terminals
  skew_to_two_pairs          ← skew multicut → two-pair DAG multicut
  expand_to_vertex_instance  ← weighted arc deletion → unweighted vertex deletion
  random_dag_instance        ← seeded random corpus for benches and tests

Generated IDs are 1-based and assigned in one documented canonical order,
so rendered files are byte-stable.
"""

import logging
import os
from itertools import combinations, product
from typing import Hashable

import numpy as np
from dotenv import load_dotenv

from app.errors import ExpansionTooLargeError, InstanceError, NotSkewShapedError
from app.models.instance import INFINITE, DagInstance, UndirectedGraph, WeightedArc, WeightedArcInstance, Weight
from app.services.dag_core import build_instance

load_dotenv(override=True)
logger = logging.getLogger(__name__)

# ── Config ────────────────────────────────────────────────────────────────────
EXPANSION_LIMIT = int(os.getenv("DAGMC_EXPANSION_LIMIT", "200000"))


class _Namer:
    """Hands out consecutive IDs to structured labels, in first-seen order."""

    def __init__(self) -> None:
        self.ids: dict[Hashable, int] = {}

    def __call__(self, label: Hashable) -> int:
        if label not in self.ids:
            self.ids[label] = len(self.ids) + 1
        return self.ids[label]


def _weighted(namer: _Namer, arcs: list[tuple[int, int, Weight]], pairs: list[tuple[int, int]], budget: int) -> WeightedArcInstance:
    return WeightedArcInstance(
        vertices=frozenset(namer.ids.values()),
        arcs=tuple(WeightedArc(tail=u, head=v, weight=w) for u, v, w in arcs),
        terminal_pairs=tuple(pairs),
        budget=budget,
    )


# ── Clique ────────────────────────────────────────────────────────────────────
def clique_parameters(t: int) -> tuple[int, int]:
    """(D, p) = (2(t+1)², 2t(t−1)D + t(t+1)/2)."""
    heavy = 2 * (t + 1) ** 2
    return heavy, 2 * t * (t - 1) * heavy + t * (t + 1) // 2


def gen_clique_instance(graph: UndirectedGraph, t: int) -> WeightedArcInstance:
    """
    Weighted DAG multicut that is YES iff `graph` has a t-clique.

    ID order: gadgets G_{i,j} (ordered pairs i ≠ j, lexicographic), inside
    each w^{0,1}..w^{n²,1} then w^{0,2}..w^{n²,2}; then a/b connectors for
    i < j over ordered edge pairs (x, y); then c/d connectors for i = 1..t,
    x = 0..n-1.
    """
    if t < 2:
        raise InstanceError("clique size t must be at least 2")
    n = graph.n
    if n < 1:
        raise InstanceError("graph must have at least one vertex")
    heavy, budget = clique_parameters(t)
    top = n * n

    def iota(x: int, y: int) -> int:
        return x * n + y

    name = _Namer()
    arcs: list[tuple[int, int, Weight]] = []
    pairs: list[tuple[int, int]] = []
    gadgets = [(i, j) for i in range(1, t + 1) for j in range(1, t + 1) if i != j]

    def w(i: int, j: int, s: int, xi: int) -> int:
        return name(("w", i, j, s, xi))

    for i, j in gadgets:
        for xi in (1, 2):
            for s in range(top + 1):
                w(i, j, s, xi)
        for xi in (1, 2):
            for s in range(top):
                x, y = divmod(s, n)
                weight = heavy if graph.has_edge(x, y) else INFINITE
                arcs.append((w(i, j, s, xi), w(i, j, s + 1, xi), weight))
        for s in range(top + 1):
            arcs.append((w(i, j, s, 1), w(i, j, s, 2), INFINITE))
        arcs.append((w(i, j, top, 1), w(i, j, 0, 2), INFINITE))
        pairs.append((w(i, j, 0, 1), w(i, j, top, 2)))

    ordered_edges = sorted({(u, v) for u, v in graph.edges} | {(v, u) for u, v in graph.edges})
    for i, j in combinations(range(1, t + 1), 2):
        for x, y in ordered_edges:
            a, b = name(("a", i, j, x, y)), name(("b", i, j, x, y))
            arcs.append((a, b, 1))
            arcs.append((w(i, j, iota(x, y), 2), a, INFINITE))
            arcs.append((w(j, i, iota(y, x), 2), a, INFINITE))
            pairs.append((w(i, j, iota(x, y) + 1, 1), b))
            pairs.append((w(j, i, iota(y, x) + 1, 1), b))

    for i in range(1, t + 1):
        for x in range(n):
            c, d = name(("c", i, x)), name(("d", i, x))
            arcs.append((c, d, 1))
            for j in range(1, t + 1):
                if j == i:
                    continue
                arcs.append((w(i, j, iota(x, 0), 2), c, INFINITE))
                pairs.append((w(i, j, iota(x + 1, 0), 1), d))

    logger.info("Clique gadget: n=%d, t=%d → %d vertices, %d arcs, D=%d, p=%d", n, t, len(name.ids), len(arcs), heavy, budget)
    return _weighted(name, arcs, pairs, budget)


def has_clique(graph: UndirectedGraph, t: int) -> bool:
    return any(
        all(graph.has_edge(u, v) for u, v in combinations(group, 2))
        for group in combinations(range(graph.n), t)
    )


# ── Max-Cut ───────────────────────────────────────────────────────────────────
def maxcut_parameters(graph: UndirectedGraph, t: int) -> tuple[int, int]:
    """(D, p) = (2m+1, nD + 2m − t)."""
    heavy = 2 * graph.m + 1
    return heavy, graph.n * heavy + 2 * graph.m - t


def gen_maxcut_skew_instance(graph: UndirectedGraph, t: int) -> WeightedArcInstance:
    """
    Skew multicut with pairs (s1,t1), (s1,t2), (s2,t2) that is YES iff
    `graph` has a cut with at least t edges.

    ID order: s1, s2, a^v, b_α^{uv}, c_α^{uv}, d^v, t1, t2 (edges sorted, α = 1, 2).
    """
    if t < 0:
        raise InstanceError("cut size t must be nonnegative")
    heavy, budget = maxcut_parameters(graph, t)
    if budget < 0:
        raise InstanceError(f"t={t} exceeds n·D + 2m; the budget would be negative")
    edges = graph.sorted_edges()

    name = _Namer()
    s1, s2 = name("s1"), name("s2")
    a = [name(("a", v)) for v in range(graph.n)]
    b = {(e, alpha): name(("b", e, alpha)) for e in edges for alpha in (1, 2)}
    c = {(e, alpha): name(("c", e, alpha)) for e in edges for alpha in (1, 2)}
    d = [name(("d", v)) for v in range(graph.n)]
    t1, t2 = name("t1"), name("t2")

    arcs: list[tuple[int, int, Weight]] = []
    for v in range(graph.n):
        arcs += [(s1, a[v], heavy), (a[v], d[v], INFINITE), (d[v], t2, heavy)]
    for e in edges:
        u, v = e
        for alpha in (1, 2):
            arcs += [(b[e, alpha], c[e, alpha], 1), (s2, b[e, alpha], INFINITE), (c[e, alpha], t1, INFINITE)]
        arcs += [
            (a[u], b[e, 1], INFINITE),
            (a[v], b[e, 2], INFINITE),
            (c[e, 2], d[u], INFINITE),
            (c[e, 1], d[v], INFINITE),
        ]

    logger.info("Max-Cut gadget: n=%d, m=%d, t=%d → D=%d, p=%d", graph.n, graph.m, t, heavy, budget)
    return _weighted(name, arcs, [(s1, t1), (s1, t2), (s2, t2)], budget)


def max_cut_value(graph: UndirectedGraph) -> int:
    """Exhaustive over all bipartitions."""
    best = 0
    for bits in product((0, 1), repeat=graph.n):
        best = max(best, sum(1 for u, v in graph.edges if bits[u] != bits[v]))
    return best


def skew_to_two_pairs(instance: WeightedArcInstance) -> WeightedArcInstance:
    """
    Add an INFINITE arc (t2, t1) and keep pairs (s1, t1), (s2, t2).

    Raises:
        NotSkewShapedError: not three pairs (s1,t1), (s1,t2), (s2,t2) over
        four distinct terminals with in-degree-0 sources and out-degree-0 sinks.
    """
    if len(instance.terminal_pairs) != 3:
        raise NotSkewShapedError(f"expected 3 terminal pairs, got {len(instance.terminal_pairs)}")
    (s1, t1), (s1b, t2), (s2, t2b) = instance.terminal_pairs
    if s1 != s1b or t2 != t2b or len({s1, s2, t1, t2}) != 4:
        raise NotSkewShapedError("pairs are not (s1,t1), (s1,t2), (s2,t2) over four distinct terminals")
    g = instance.graph()
    if g.in_degree(s1) or g.in_degree(s2) or g.out_degree(t1) or g.out_degree(t2):
        raise NotSkewShapedError("sources need in-degree 0 and sinks out-degree 0")

    return WeightedArcInstance(
        vertices=instance.vertices,
        arcs=instance.arcs + (WeightedArc(tail=t2, head=t1, weight=INFINITE),),
        terminal_pairs=((s1, t1), (s2, t2)),
        budget=instance.budget,
    )


# ── Weighted → unweighted ─────────────────────────────────────────────────────
def expand_to_vertex_instance(instance: WeightedArcInstance) -> DagInstance:
    """
    Arc (u, v) of weight ω becomes ω deletable middle vertices u → m → v;
    an INFINITE arc gets p+1 of them. Every nonterminal original vertex gets
    p+1 copies (the original ID is the first) so it can never be cut.

    New IDs follow max(ID): copies by vertex, then middles by sorted arc.

    Raises:
        ExpansionTooLargeError: the result would exceed DAGMC_EXPANSION_LIMIT vertices.
    """
    p = instance.budget
    terminals = instance.terminals
    arcs = sorted(instance.arcs, key=lambda arc: (arc.tail, arc.head))
    multiplicity = [p + 1 if arc.weight is INFINITE else arc.weight for arc in arcs]

    size = len(instance.vertices) + p * len(instance.vertices - terminals) + sum(multiplicity)
    if size > EXPANSION_LIMIT:
        raise ExpansionTooLargeError(f"expansion needs {size} vertices, limit DAGMC_EXPANSION_LIMIT={EXPANSION_LIMIT}")

    next_id = max(instance.vertices, default=0) + 1
    image: dict[int, list[int]] = {}
    for v in sorted(instance.vertices):
        if v in terminals:
            image[v] = [v]
        else:
            image[v] = [v] + list(range(next_id, next_id + p))
            next_id += p

    vertices = {x for xs in image.values() for x in xs}
    out_arcs: set[tuple[int, int]] = set()
    for arc, count in zip(arcs, multiplicity):
        for middle in range(next_id, next_id + count):
            vertices.add(middle)
            out_arcs.update((u, middle) for u in image[arc.tail])
            out_arcs.update((middle, v) for v in image[arc.head])
        next_id += count

    logger.info("Expanded %d weighted arcs into %d vertices", len(arcs), len(vertices))
    return build_instance(vertices, out_arcs, instance.terminal_pairs, p)


# ── Random corpus ─────────────────────────────────────────────────────────────
def random_dag_instance(seed: int, n: int, r: int, p: int, density: float = 0.35) -> DagInstance:
    """
    Random DAG on IDs 1..n. A hidden permutation fixes the acyclic order so
    IDs are not pre-sorted; pairs (s, t) always have s before t in it.
    """
    if n < 2:
        raise InstanceError("need at least two vertices for a terminal pair")
    rng = np.random.default_rng(seed)
    labels = rng.permutation(n) + 1
    arcs = [
        (int(labels[i]), int(labels[j]))
        for i in range(n)
        for j in range(i + 1, n)
        if rng.random() < density
    ]
    pairs: list[tuple[int, int]] = []
    for _ in range(r):
        i, j = sorted(rng.choice(n, size=2, replace=False))
        pairs.append((int(labels[i]), int(labels[j])))
    return build_instance(range(1, n + 1), arcs, pairs, p)


def all_graphs(n: int) -> list[UndirectedGraph]:
    """Every labelled simple graph on n vertices."""
    slots = list(combinations(range(n), 2))
    return [
        UndirectedGraph(n=n, edges=frozenset(e for e, bit in zip(slots, bits) if bit))
        for bits in product((0, 1), repeat=len(slots))
    ]
