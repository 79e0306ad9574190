"""
transforms.py — Instance rewriting: normalize, kill, bypass, torso,
degree-reduced graph and degree branching.

Every transform returns a fresh DagInstance. Except for `normalize`, the
result inherits ς from its input and only adds ς-forward arcs.
"""

import logging
from typing import Iterable, Optional

from app.errors import (
    BudgetExhaustedError,
    BypassTerminalError,
    ContainsTerminalError,
    DanglingReferenceError,
    InfeasibleCutError,
    KillTerminalError,
)
from app.models.instance import DagInstance, SrcMap
from app.models.results import DegreeBranchResult, TaggedChild
from app.services.dag_core import build_instance, reachable, src_map
from app.services.separators import min_separator

logger = logging.getLogger(__name__)


# ── Normalization ─────────────────────────────────────────────────────────────
def normalize(instance: DagInstance) -> DagInstance:
    """
    Equivalent instance with pairwise distinct terminals, sources of
    in-degree 0 and sinks of out-degree 0.

    Fresh IDs start above the current maximum: first the p+1 copies of every
    terminal (terminals in ascending ID order), then s_1', t_1', s_2', ...
    Copies keep the terminal's neighbourhood and become deletable, which is
    harmless since a budget of p can never remove all p+1 of them. s_i'
    points where s_i pointed, t_i' is entered where t_i was; an arc or an
    identity between s_i and t_i becomes the arc (s_i', t_i').

    A multicut of the result maps back by intersecting with the original IDs.
    """
    p = instance.budget
    next_id = max(instance.vertices, default=0) + 1

    image: dict[int, list[int]] = {v: [v] for v in instance.nonterminals}
    for v in sorted(instance.terminals):
        image[v] = list(range(next_id, next_id + p + 1))
        next_id += p + 1

    new_pairs: list[tuple[int, int]] = []
    for _ in instance.terminal_pairs:
        new_pairs.append((next_id, next_id + 1))
        next_id += 2

    arcs: set[tuple[int, int]] = set()
    for u, v in instance.arcs:
        arcs.update((a, b) for a in image[u] for b in image[v])
    for (s, t), (s_new, t_new) in zip(instance.terminal_pairs, new_pairs):
        for v in instance.succ(s):
            arcs.update((s_new, b) for b in image[v])
        for u in instance.pred(t):
            arcs.update((a, t_new) for a in image[u])
        if s == t or t in instance.succ(s):
            arcs.add((s_new, t_new))

    vertices = {w for ws in image.values() for w in ws}
    vertices.update(v for pair in new_pairs for v in pair)
    normalized = build_instance(vertices, arcs, new_pairs, p)
    logger.debug("Normalized %d → %d vertices", len(instance.vertices), len(normalized.vertices))
    return normalized


def map_back(original: DagInstance, cut: Iterable[int]) -> frozenset[int]:
    """Restrict a cut of the normalized instance to the original vertex IDs."""
    return frozenset(cut) & original.vertices


# ── Kill / bypass / torso ─────────────────────────────────────────────────────
def _require_vertex(instance: DagInstance, v: int) -> None:
    if v not in instance.vertices:
        raise DanglingReferenceError(f"vertex {v} is not in the instance")


def kill(instance: DagInstance, v: int) -> DagInstance:
    """Delete nonterminal v and spend one unit of budget."""
    _require_vertex(instance, v)
    if v in instance.terminals:
        raise KillTerminalError(f"cannot kill terminal {v}")
    if instance.budget < 1:
        raise BudgetExhaustedError(f"cannot kill {v} with budget 0")
    return instance.derive(vertices=instance.vertices - {v}, budget=instance.budget - 1)


def kill_all(instance: DagInstance, vs: Iterable[int]) -> DagInstance:
    vs = frozenset(vs)
    for v in vs:
        _require_vertex(instance, v)
        if v in instance.terminals:
            raise KillTerminalError(f"cannot kill terminal {v}")
    if len(vs) > instance.budget:
        raise BudgetExhaustedError(f"cannot kill {len(vs)} vertices with budget {instance.budget}")
    return instance.derive(vertices=instance.vertices - vs, budget=instance.budget - len(vs))


def bypass(instance: DagInstance, v: int) -> DagInstance:
    """Remove nonterminal v, joining each in-neighbour to each out-neighbour."""
    _require_vertex(instance, v)
    if v in instance.terminals:
        raise BypassTerminalError(f"cannot bypass terminal {v}")
    arcs = {(a, b) for a, b in instance.arcs if v not in (a, b)}
    arcs.update((a, b) for a in instance.pred(v) for b in instance.succ(v))
    return instance.derive(vertices=instance.vertices - {v}, arcs=arcs)


def torso(instance: DagInstance, x: Iterable[int]) -> DagInstance:
    """
    Bypass every vertex of X at once.

    (u, v) is an arc of the result iff G has a u→v path whose internal
    vertices all lie in X, so the result does not depend on any order.
    """
    xs = frozenset(x)
    if not xs:
        return instance
    for v in xs:
        _require_vertex(instance, v)
    if xs & instance.terminals:
        raise ContainsTerminalError(f"torso set contains terminals {sorted(xs & instance.terminals)}")

    arcs: set[tuple[int, int]] = set()
    for u in instance.vertices - xs:
        seen: set[int] = set()
        stack = [w for w in instance.succ(u) if w in xs]
        targets = {w for w in instance.succ(u) if w not in xs}
        while stack:
            w = stack.pop()
            if w in seen:
                continue
            seen.add(w)
            for nxt in instance.succ(w):
                if nxt in xs:
                    stack.append(nxt)
                else:
                    targets.add(nxt)
        arcs.update((u, t) for t in targets)
    return instance.derive(vertices=instance.vertices - xs, arcs=arcs)


# ── Degree reduction ──────────────────────────────────────────────────────────
def closest_source_cuts(instance: DagInstance) -> list[frozenset[int]]:
    """B_i: the s_i–t_i mincut closest to s_i, for every pair."""
    cuts = []
    for i, (s, t) in enumerate(instance.terminal_pairs, start=1):
        report = min_separator(instance, [s], [t])
        if not report.is_finite:
            raise InfeasibleCutError(f"pair {i} ({s}, {t}) has no finite cut")
        cuts.append(report.closest_to_x)
    return cuts


def degree_reduced(
    instance: DagInstance,
    cuts: Optional[list[frozenset[int]]] = None,
    srcs: Optional[SrcMap] = None,
) -> DagInstance:
    """
    G*: drop every arc at a source, then give s_i the arcs (s_i, v) for
    v ∈ B_i and for v ∈ ∪B_i' with s_i ∈ src(G, v) that B_i does not reach
    (reachability from B_i is reflexive).
    """
    cuts = cuts if cuts is not None else closest_source_cuts(instance)
    srcs = srcs or src_map(instance)
    sources = frozenset(instance.sources)
    union = frozenset().union(*cuts) if cuts else frozenset()

    arcs = {(u, v) for u, v in instance.arcs if u not in sources and v not in sources}
    for (s, _), b in zip(instance.terminal_pairs, cuts):
        arcs.update((s, v) for v in b)
        behind_b = reachable(instance, b)
        arcs.update((s, v) for v in union if s in srcs.of(v) and v not in behind_b)
    return instance.derive(arcs=arcs)


def degree_branch(instance: DagInstance, srcs: Optional[SrcMap] = None) -> DegreeBranchResult:
    """
    One child per (i, v ∈ B_i): add (v, t_i), then bypass v; children in
    (i ascending, ς(v) ascending) order. `kept` is the degree-reduced graph.

    Raises:
        InfeasibleCutError: some pair cannot be cut by nonterminals.
    """
    cuts = closest_source_cuts(instance)
    children = []
    for i, ((_, t), b) in enumerate(zip(instance.terminal_pairs, cuts)):
        for v in instance.sort_by_order(b):
            pushed = instance.derive(arcs=instance.arcs | {(v, t)})
            children.append(TaggedChild(pair_index=i, vertex=v, instance=bypass(pushed, v)))
    kept = degree_reduced(instance, cuts=cuts, srcs=srcs)
    return DegreeBranchResult(children=tuple(children), kept=kept)
