"""
solver.py — The branching step and the top-level search.

One branching step on a normalized instance G with budget p:

  (a) large-cut         some cut(s_i, t_i) > p                 → NO
  (b) separated         no s_i reaches t_i                      → YES leaf
  (c) subcase S         every nonempty S ⊆ sources with V(G, S) ≠ ∅
  (d) bypass-subset-S   torso of {u : src(u) ⊊ S}                → G¹
  (e) deg-red-1         degree_branch(G¹), emit children         → G²
  (f) delete-futile-1   drop nonterminals with src = ∅          → G³
  (g) shadowless        per A in the family: torso A ∖ N⁺(src)   → G⁴
  (h) magic             kill nonterminal in-neighbours of v ∈ N⁺(src) ∩ V(G, S), bypass v
  (i) flatten           heads in V(G, S) re-hung under S         → G⁵
  (j) deg-red-2         degree_branch(G⁵), emit children         → G⁶
  (k) delete-futile-2   drop nonterminals with src = ∅          → G⁷
  (l) final             kill each v ∈ V(G, S) ∩ V(G⁷)

Every emitted child has strictly smaller potential, so the search depth is
at most (r+1)·p. Both facts are checked at runtime.
"""

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from itertools import combinations
from typing import Optional

from dotenv import load_dotenv

from app.errors import SolverInvariantError, VerificationFailedError
from app.models.instance import CutSet, DagInstance
from app.models.results import (
    Answer,
    BranchNode,
    ShadowStrategy,
    SolveOutcome,
    SolveTrace,
    StepKind,
    StepResult,
)
from app.services.dag_core import VertexSet, as_vertex_set, is_multicut, is_separated, src_map, vertices_with_src
from app.services.separators import potential
from app.services.shadows import shadow_family
from app.services.transforms import bypass, degree_branch, kill, kill_all, map_back, normalize, torso

load_dotenv(override=True)
logger = logging.getLogger(__name__)

# ── Config ────────────────────────────────────────────────────────────────────
DEFAULT_JOBS = int(os.getenv("DAGMC_JOBS", "1"))


def _out_of_sources(instance: DagInstance) -> frozenset[int]:
    return frozenset(v for s in instance.sources for v in instance.succ(s))


def _drop_futile(instance: DagInstance) -> DagInstance:
    srcs = src_map(instance)
    futile = {v for v in instance.nonterminals if not srcs.of(v)}
    return instance.derive(vertices=instance.vertices - futile) if futile else instance


class _StepBuilder:
    """Collects the children of one branching step and enforces their invariants."""

    def __init__(self, node: BranchNode, trace: SolveTrace, depth_bound: int):
        self.node = node
        self.trace = trace
        self.depth_bound = depth_bound
        self.children: list[BranchNode] = []
        self.emitted = 0

    def emit(self, stage: str, label: str, instance: DagInstance, killed: frozenset[int] = frozenset()) -> None:
        self.emitted += 1
        pot = potential(instance)
        if not pot.feasible:
            self.trace.pruned_children += 1
            return
        if pot.value >= self.node.potential:
            raise SolverInvariantError(
                f"{stage} child {label} has potential {pot.value} ≥ parent {self.node.potential}"
            )
        depth = self.node.depth + 1
        if depth > self.depth_bound:
            raise SolverInvariantError(f"depth {depth} exceeds (r+1)·p = {self.depth_bound}")
        self.trace.count_child(stage)
        self.children.append(
            BranchNode(
                instance=instance,
                kills_so_far=CutSet(members=self.node.kills_so_far.members | killed),
                depth=depth,
                label=f"{self.node.label}/{label}",
                potential=pot.value,
            )
        )


def branching_step(
    node: BranchNode,
    strategy: ShadowStrategy,
    trace: Optional[SolveTrace] = None,
    depth_bound: Optional[int] = None,
) -> StepResult:
    """
    Run stages (a)–(l) on a normalized node.

    Args:
        node: current search node; `node.potential` must be φ(node.instance).
        strategy: shadow family strategy for stage (g).
        trace: statistics accumulator, updated in place.
        depth_bound: (r+1)·p of the root; defaults to that of this node.

    Returns:
        NO, YES_LEAF (node.kills_so_far is a solution) or BRANCH with the
        feasible children in canonical order.
    """
    trace = trace if trace is not None else SolveTrace()
    g = node.instance
    r, p = g.r, g.budget
    depth_bound = depth_bound if depth_bound is not None else node.depth + (r + 1) * p

    # (a)
    if not potential(g).feasible:
        return StepResult(kind=StepKind.NO)
    # (b)
    if is_separated(g):
        return StepResult(kind=StepKind.YES_LEAF)

    srcs = src_map(g)
    sources = g.sources
    out = _StepBuilder(node, trace, depth_bound)
    family_max = 0

    # (c)
    for size in range(1, len(sources) + 1):
        for subset in combinations(sources, size):
            s_set = frozenset(subset)
            v_s = vertices_with_src(g, s_set, srcs)
            if not v_s:
                continue
            tag = "S=" + ",".join(map(str, subset))

            # (d)
            g1 = torso(g, {u for u in g.nonterminals if srcs.of(u) < s_set})
            if not potential(g1).feasible:
                continue

            # (e)
            srcs1 = src_map(g1)
            branched = degree_branch(g1, srcs=srcs1)
            for child in branched.children:
                out.emit("deg-red-1", f"{tag}/deg1({child.pair_index + 1},{child.vertex})", child.instance)
            g2 = branched.kept

            # (f)
            srcs2 = src_map(g2)
            for v in v_s & g2.vertices:
                if srcs1.of(v) != s_set or srcs2.of(v) not in (frozenset(), s_set):
                    raise SolverInvariantError(f"vertex {v} lost its source set {sorted(s_set)} in {tag}")
            g3 = _drop_futile(g2)

            # (g)
            n3 = _out_of_sources(g3)
            family = shadow_family(g3, strategy, candidates=g3.nonterminals - n3)
            trace.count_family(len(family.sets))
            family_max = max(family_max, len(family.sets))
            for index, shadow in enumerate(family.sets):
                _shadowless_subcase(out, g3, n3, s_set, v_s, shadow, f"{tag}/A{index}")

    bound = (2 ** r) * (family_max + 1) * (3 * r * p + 1)
    if out.emitted > bound:
        raise SolverInvariantError(f"{out.emitted} children exceed the per-step bound {bound}")
    return StepResult(kind=StepKind.BRANCH, children=tuple(out.children))


def _shadowless_subcase(
    out: _StepBuilder,
    g3: DagInstance,
    n3: frozenset[int],
    s_set: frozenset[int],
    v_s: frozenset[int],
    shadow: frozenset[int],
    tag: str,
) -> None:
    """Stages (g)–(l) for one member A of the shadow family."""
    g4 = torso(g3, shadow - n3)
    if not potential(g4).feasible:
        return
    sources = frozenset(g4.sources)
    r, p = g4.r, g4.budget

    # (h)
    for v in g4.sort_by_order(_out_of_sources(g4) & v_s):
        inner = g4.pred(v) - g4.terminals
        if not inner:
            continue
        if len(inner) > p:
            out.trace.pruned_children += 1
            continue
        out.emit("magic", f"{tag}/magic({v})", bypass(kill_all(g4, inner), v), killed=inner)

    # (i)
    flat = v_s & g4.vertices
    arcs = {(a, b) for a, b in g4.arcs if b not in flat}
    arcs.update((s, v) for s in s_set for v in flat)
    g5 = g4.derive(arcs=arcs)
    if not potential(g5).feasible:
        return

    # (j)
    branched = degree_branch(g5)
    for child in branched.children:
        out.emit("deg-red-2", f"{tag}/deg2({child.pair_index + 1},{child.vertex})", child.instance)

    # (k)
    g7 = _drop_futile(branched.kept)
    final = v_s & g7.vertices
    if len(final) > r * p:
        raise SolverInvariantError(f"{len(final)} final candidates exceed r·p = {r * p} in {tag}")
    if sources & final:
        raise SolverInvariantError("a source landed in V(G, S)")

    # (l)
    if p < 1:
        return
    for v in g7.sort_by_order(final):
        out.emit("final", f"{tag}/final({v})", kill(g7, v), killed=frozenset({v}))


# ── Search ────────────────────────────────────────────────────────────────────
class _Search:
    """Depth-first exploration of one subtree with a NO-memo."""

    def __init__(self, strategy: ShadowStrategy, depth_bound: int):
        self.strategy = strategy
        self.depth_bound = depth_bound
        self.trace = SolveTrace()
        self.refuted: set[tuple] = set()

    def run(self, node: BranchNode) -> Optional[frozenset[int]]:
        key = node.instance.key()
        if key in self.refuted:
            self.trace.memo_hits += 1
            return None
        self.trace.nodes_expanded += 1
        self.trace.max_depth = max(self.trace.max_depth, node.depth)
        step = branching_step(node, self.strategy, self.trace, self.depth_bound)
        logger.debug("Node %s (φ=%d): %s, %d children", node.label, node.potential, step.kind.value, len(step.children))
        if step.kind is StepKind.YES_LEAF:
            return node.kills_so_far.members
        for child in step.children:
            found = self.run(child)
            if found is not None:
                return found
        self.refuted.add(key)
        return None


def _explore(node: BranchNode, strategy: ShadowStrategy, depth_bound: int) -> tuple[Optional[frozenset[int]], SolveTrace]:
    search = _Search(strategy, depth_bound)
    return search.run(node), search.trace


def verify(instance: DagInstance, cut: VertexSet) -> bool:
    """A multicut of at most p vertices."""
    members = as_vertex_set(cut)
    return len(members) <= instance.budget and is_multicut(instance, members)


def solve(
    instance: DagInstance,
    strategy: Optional[ShadowStrategy] = None,
    jobs: Optional[int] = None,
) -> SolveOutcome:
    """
    Decide the instance; on YES return a verified multicut in original IDs.

    The root step runs here. With jobs > 1 its children are explored in a
    process pool; answers and statistics are still taken in canonical child
    order, so the outcome does not depend on scheduling.

    Raises:
        VerificationFailedError: a YES cut fails verification (a bug).
        SolverInvariantError: a runtime-checked property failed (a bug).
    """
    strategy = strategy or ShadowStrategy()
    jobs = jobs or DEFAULT_JOBS
    logger.info(
        "Solving: n=%d, m=%d, r=%d, p=%d, shadow=%s, jobs=%d",
        len(instance.vertices), len(instance.arcs), instance.r, instance.budget, strategy.kind.value, jobs,
    )

    norm = normalize(instance)
    trace = SolveTrace()
    root_pot = potential(norm)
    if not root_pot.feasible:
        trace.nodes_expanded = 1
        return _finish(instance, None, trace, strategy)

    depth_bound = (norm.r + 1) * norm.budget
    root = BranchNode(instance=norm, potential=root_pot.value)
    trace.nodes_expanded = 1
    step = branching_step(root, strategy, trace, depth_bound)
    if step.kind is StepKind.YES_LEAF:
        return _finish(instance, frozenset(), trace, strategy)

    found: Optional[frozenset[int]] = None
    if jobs > 1 and len(step.children) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_explore, child, strategy, depth_bound) for child in step.children]
            for future in futures:
                result, child_trace = future.result()
                trace.merge(child_trace)
                if result is not None:
                    found = result
                    for rest in futures:
                        rest.cancel()
                    break
    else:
        for child in step.children:
            result, child_trace = _explore(child, strategy, depth_bound)
            trace.merge(child_trace)
            if result is not None:
                found = result
                break
    return _finish(instance, found, trace, strategy)


def _finish(
    instance: DagInstance,
    kills: Optional[frozenset[int]],
    trace: SolveTrace,
    strategy: ShadowStrategy,
) -> SolveOutcome:
    if kills is None:
        logger.info("Answer NO after %d nodes", trace.nodes_expanded)
        return SolveOutcome(answer=Answer.NO, stats=trace, complete=strategy.complete)

    cut = map_back(instance, kills)
    if not verify(instance, cut):
        raise VerificationFailedError(f"cut {sorted(cut)} does not verify against the input instance")
    logger.info("Answer YES with |cut|=%d after %d nodes", len(cut), trace.nodes_expanded)
    return SolveOutcome(answer=Answer.YES, cut=CutSet(members=cut), stats=trace, complete=strategy.complete)
