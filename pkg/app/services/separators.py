"""
separators.py — Minimum vertex separators, closest mincuts and the potential.

Vertex capacities are modelled by splitting every vertex v into an in-half
(v, IN) and an out-half (v, OUT). The internal edge has capacity 1 for a
deletable vertex and no capacity attribute (infinite in networkx) for
terminals and for X ∪ Y. Original arcs join out-halves to in-halves with
infinite capacity.
"""

import logging
import os
from itertools import combinations
from math import comb
from typing import Iterable, Optional

import networkx as nx
from dotenv import load_dotenv
from networkx.algorithms.flow import edmonds_karp

from app.errors import InstanceError, NotASeparatorError, TooLargeError
from app.models.instance import INFINITE, DagInstance
from app.models.results import Potential, SeparatorReport
from app.services.dag_core import VertexSet, as_vertex_set, reachable

load_dotenv(override=True)
logger = logging.getLogger(__name__)

# ── Config ────────────────────────────────────────────────────────────────────
ORACLE_LIMIT = int(os.getenv("DAGMC_ORACLE_LIMIT", "10000000"))

IN, OUT = 0, 1
_SOURCE = ("source", -1)
_SINK = ("sink", -1)


def _flow_network(instance: DagInstance, x: frozenset[int], y: frozenset[int]) -> nx.DiGraph:
    undeletable = instance.terminals | x | y
    net = nx.DiGraph()
    for v in instance.order:
        if v in undeletable:
            net.add_edge((v, IN), (v, OUT))
        else:
            net.add_edge((v, IN), (v, OUT), capacity=1)
    for u, v in instance.arcs:
        net.add_edge((u, OUT), (v, IN))
    for v in x:
        net.add_edge(_SOURCE, (v, IN))
    for v in y:
        net.add_edge((v, OUT), _SINK)
    return net


def _has_undeletable_path(instance: DagInstance, x: frozenset[int], y: frozenset[int]) -> bool:
    """An X→Y path whose vertices are all terminals or in X ∪ Y cannot be cut."""
    allowed = instance.terminals | x | y
    blocked = instance.vertices - allowed
    return bool(reachable(instance, x, blocked) & y)


def _residual_closure(residual: nx.DiGraph, start, forward: bool) -> set:
    """Nodes reachable from (forward) or co-reachable to (backward) `start` in the residual graph."""
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        edges = residual.out_edges(u, data=True) if forward else residual.in_edges(u, data=True)
        for a, b, attr in edges:
            w = b if forward else a
            if w not in seen and attr["capacity"] - attr["flow"] > 0:
                seen.add(w)
                stack.append(w)
    return seen


def min_separator(
    instance: DagInstance,
    x: Iterable[int],
    y: Iterable[int],
    limit: Optional[int] = None,
) -> SeparatorReport:
    """
    cut_G(X, Y) with the minimum separators closest to X and closest to Y.

    Args:
        instance: the DAG.
        x, y: nonempty vertex sets.
        limit: stop augmenting once the flow reaches this value and report
               INFINITE. The solver passes p + 1.

    Returns:
        SeparatorReport; size is INFINITE when no terminal-free separator
        exists (e.g. a direct X→Y arc) or when `limit` was reached.
    """
    xs, ys = frozenset(x), frozenset(y)
    if not xs or not ys:
        raise InstanceError("min_separator needs nonempty X and Y")
    if xs & ys or _has_undeletable_path(instance, xs, ys):
        return SeparatorReport(size=INFINITE)

    net = _flow_network(instance, xs, ys)
    try:
        residual = edmonds_karp(net, _SOURCE, _SINK, cutoff=limit)
    except nx.NetworkXUnbounded:
        return SeparatorReport(size=INFINITE)

    size = residual.graph["flow_value"]
    if limit is not None and size >= limit:
        return SeparatorReport(size=INFINITE)

    near_x = _residual_closure(residual, _SOURCE, forward=True)
    near_y = _residual_closure(residual, _SINK, forward=False)
    deletable = instance.vertices - instance.terminals - xs - ys
    closest_x = frozenset(v for v in deletable if (v, IN) in near_x and (v, OUT) not in near_x)
    closest_y = frozenset(v for v in deletable if (v, OUT) in near_y and (v, IN) not in near_y)
    return SeparatorReport(size=size, closest_to_x=closest_x, closest_to_y=closest_y)


def separates(instance: DagInstance, x: Iterable[int], y: Iterable[int], z: VertexSet) -> bool:
    return not (reachable(instance, x, z) & frozenset(y))


def is_important_separator(instance: DagInstance, x: Iterable[int], y: Iterable[int], z: VertexSet) -> bool:
    """
    Brute-force importance test.

    Z is important iff it is a minimal X–Y separator and no other separator
    Z' with |Z'| ≤ |Z| lies behind it, i.e. reaches at least everything Z
    lets X reach.

    Raises:
        NotASeparatorError: Z contains a terminal / X / Y vertex or leaves a path.
        TooLargeError: the candidate enumeration exceeds DAGMC_ORACLE_LIMIT.
    """
    xs, ys, zs = frozenset(x), frozenset(y), as_vertex_set(z)
    if zs & (instance.terminals | xs | ys):
        raise NotASeparatorError("separator contains an undeletable vertex")
    if not separates(instance, xs, ys, zs):
        raise NotASeparatorError(f"{sorted(zs)} does not separate {sorted(xs)} from {sorted(ys)}")

    if any(separates(instance, xs, ys, zs - {v}) for v in zs):
        return False

    pool = sorted(instance.vertices - instance.terminals - xs - ys, key=instance.position)
    total = sum(comb(len(pool), k) for k in range(len(zs) + 1))
    if total > ORACLE_LIMIT:
        raise TooLargeError(f"{total} candidate separators exceed DAGMC_ORACLE_LIMIT={ORACLE_LIMIT}")

    region = reachable(instance, xs, zs)
    for k in range(len(zs) + 1):
        for other in combinations(pool, k):
            candidate = frozenset(other)
            if candidate == zs or not separates(instance, xs, ys, candidate):
                continue
            if region <= reachable(instance, xs, candidate):
                return False
    return True


def potential(instance: DagInstance) -> Potential:
    """φ(I) = (r+1)·p − Σ cut(s_i, t_i); infeasible when some cut exceeds p."""
    cuts = tuple(
        min_separator(instance, [s], [t], limit=instance.budget + 1).size
        for s, t in instance.terminal_pairs
    )
    if any(c is INFINITE for c in cuts):
        return Potential(value=None, cuts=cuts)
    return Potential(value=(instance.r + 1) * instance.budget - sum(cuts), cuts=cuts)
