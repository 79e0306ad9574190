"""
dag_core.py — DAG construction, reachability, source sets and multicut checks.

All functions are pure over immutable DagInstance values.
"""

import logging
from typing import Iterable, Optional, Sequence, Union

import networkx as nx

from app.errors import CycleDetectedError, DanglingReferenceError
from app.models.instance import CutSet, DagInstance, SrcMap
from app.models.results import MulticutCheck, Ordering

logger = logging.getLogger(__name__)

VertexSet = Union[CutSet, Iterable[int]]


def as_vertex_set(z: Optional[VertexSet]) -> frozenset[int]:
    """Accept a CutSet, any iterable of IDs, or None (empty)."""
    if z is None:
        return frozenset()
    if isinstance(z, CutSet):
        return z.members
    return frozenset(z)


# ── Construction ──────────────────────────────────────────────────────────────
def build_instance(
    vertices: Iterable[int],
    arcs: Iterable[tuple[int, int]],
    terminal_pairs: Sequence[tuple[int, int]],
    budget: int,
) -> DagInstance:
    """
    Validate raw input and fix ς.

    Parallel arcs collapse into one. ς is Kahn's order popping the smallest
    available ID, so it only depends on the vertex and arc sets.

    Raises:
        DanglingReferenceError: an arc or terminal names an undeclared vertex.
        CycleDetectedError: a self-loop or a directed cycle.
    """
    verts = frozenset(vertices)
    arc_set: set[tuple[int, int]] = set()
    for u, v in arcs:
        if u not in verts or v not in verts:
            raise DanglingReferenceError(f"arc ({u}, {v}) references an undeclared vertex")
        if u == v:
            raise CycleDetectedError(f"self-loop on vertex {u}")
        arc_set.add((u, v))

    pairs = tuple((s, t) for s, t in terminal_pairs)
    for s, t in pairs:
        if s not in verts or t not in verts:
            raise DanglingReferenceError(f"terminal pair ({s}, {t}) references an undeclared vertex")
        if s == t:
            logger.warning("Terminal pair (%d, %d) has equal endpoints; the instance is NO", s, t)

    g = nx.DiGraph()
    g.add_nodes_from(verts)
    g.add_edges_from(arc_set)
    try:
        order = tuple(nx.lexicographical_topological_sort(g))
    except nx.NetworkXUnfeasible as exc:
        cycle = nx.find_cycle(g)
        raise CycleDetectedError(f"graph contains a cycle through {[u for u, _ in cycle]}") from exc

    return DagInstance(
        vertices=verts,
        arcs=frozenset(arc_set),
        terminal_pairs=pairs,
        budget=budget,
        order=order,
    )


# ── Reachability ──────────────────────────────────────────────────────────────
def reachable(instance: DagInstance, from_set: Iterable[int], deleted: Optional[VertexSet] = None) -> frozenset[int]:
    """Vertices with a (possibly empty) path from `from_set` in G ∖ deleted."""
    removed = as_vertex_set(deleted)
    seen: set[int] = set()
    stack = [v for v in from_set if v not in removed]
    while stack:
        v = stack.pop()
        if v in seen:
            continue
        seen.add(v)
        stack.extend(w for w in instance.succ(v) if w not in seen and w not in removed)
    return frozenset(seen)


def src_map(instance: DagInstance) -> SrcMap:
    """src(G, v) for every v, by one sweep along ς."""
    sources = frozenset(instance.sources)
    mapping: dict[int, frozenset[int]] = {}
    for v in instance.order:
        acc = {v} if v in sources else set()
        for u in instance.pred(v):
            acc |= mapping[u]
        mapping[v] = frozenset(acc)
    return SrcMap.model_construct(mapping=mapping)


def vertices_with_src(instance: DagInstance, s: Iterable[int], srcs: Optional[SrcMap] = None) -> frozenset[int]:
    """V(G, S): nonterminals whose source set is exactly S."""
    target = frozenset(s)
    srcs = srcs or src_map(instance)
    return frozenset(v for v in instance.nonterminals if srcs.of(v) == target)


# ── Ordering ──────────────────────────────────────────────────────────────────
def lex_compare(a: Iterable[int], b: Iterable[int], order: Union[DagInstance, Sequence[int]]) -> Ordering:
    """
    Compare the ς-sorted sequences of A and B. A strict prefix is smaller,
    so the order is total on subsets.
    """
    if isinstance(order, DagInstance):
        pos = order.position
    else:
        index = {v: i for i, v in enumerate(order)}
        pos = index.__getitem__
    ka = sorted(pos(v) for v in a)
    kb = sorted(pos(v) for v in b)
    if ka < kb:
        return Ordering.LT
    if ka > kb:
        return Ordering.GT
    return Ordering.EQ


# ── Multicut checks ───────────────────────────────────────────────────────────
def check_multicut(instance: DagInstance, z: VertexSet) -> MulticutCheck:
    """Like is_multicut, but says which condition failed."""
    members = as_vertex_set(z)
    unknown = members - instance.vertices
    if unknown:
        return MulticutCheck(ok=False, reason=f"unknown vertices {sorted(unknown)}")
    terminals = members & instance.terminals
    if terminals:
        return MulticutCheck(ok=False, reason=f"contains terminals {sorted(terminals)}")
    for i, (s, t) in enumerate(instance.terminal_pairs, start=1):
        if t in reachable(instance, [s], members):
            return MulticutCheck(ok=False, reason=f"pair {i} ({s}, {t}) is still connected")
    return MulticutCheck(ok=True)


def is_multicut(instance: DagInstance, z: VertexSet) -> bool:
    return check_multicut(instance, z).ok


def is_separated(instance: DagInstance) -> bool:
    """True when no s_i reaches t_i, i.e. ∅ is already a multicut."""
    return all(t not in reachable(instance, [s]) for s, t in instance.terminal_pairs)
