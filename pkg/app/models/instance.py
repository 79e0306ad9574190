"""
instance.py — Pydantic models for multicut instances.

  DagInstance          ← vertex-deletion instance on a DAG (the solver's input)
    vertices / arcs    ← stable integer IDs, simple digraph
    terminal_pairs     ← ordered (s_i, t_i), i = 1..r
    budget             ← p, the number of nonterminals we may delete
    order              ← ς, a topological order fixed once and inherited

  CutSet               ← a proposed multicut
  SrcMap               ← v → set of source terminals that reach v
  WeightedArcInstance  ← arc-deletion instance with light/heavy/∞ weights
  UndirectedGraph      ← Clique / Max-Cut inputs for the generators

Instances are immutable. Transforms build new ones through `derive`, which
skips validation and restricts ς to the surviving vertices.
"""

from enum import Enum
from typing import Iterable, Optional, Union

import networkx as nx
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, field_validator, model_validator

from app.errors import CycleDetectedError, DanglingReferenceError


class Infinity(str, Enum):
    """Explicit sentinel for unbounded cut sizes and undeletable arcs."""

    INFINITE = "inf"


INFINITE = Infinity.INFINITE

Arc = tuple[int, int]
Weight = Union[int, Infinity]


# ── Vertex-deletion instance ──────────────────────────────────────────────────
class DagInstance(BaseModel):
    """
    A DAG multicut instance (G, 𝒯, p) together with its topological order ς.

    `order` lists every vertex exactly once and every arc points forward in
    it. All queries are pure; adjacency and positions are indexed lazily.
    """

    model_config = ConfigDict(frozen=True)

    vertices: frozenset[int] = Field(..., description="Stable vertex IDs.")
    arcs: frozenset[tuple[int, int]] = Field(..., description="Simple arc set, no self-loops.")
    terminal_pairs: tuple[tuple[int, int], ...] = Field(
        ..., description="Ordered terminal pairs (s_i, t_i)."
    )
    budget: int = Field(..., ge=0, description="Deletion budget p.")
    order: tuple[int, ...] = Field(..., description="Topological order ς.")

    _succ: Optional[dict[int, frozenset[int]]] = PrivateAttr(default=None)
    _pred: Optional[dict[int, frozenset[int]]] = PrivateAttr(default=None)
    _pos: Optional[dict[int, int]] = PrivateAttr(default=None)
    _graph: Optional[nx.DiGraph] = PrivateAttr(default=None)

    @model_validator(mode="after")
    def _check_structure(self) -> "DagInstance":
        for u, v in self.arcs:
            if u not in self.vertices or v not in self.vertices:
                raise DanglingReferenceError(f"arc ({u}, {v}) references an unknown vertex")
            if u == v:
                raise CycleDetectedError(f"self-loop on vertex {u}")
        for s, t in self.terminal_pairs:
            if s not in self.vertices or t not in self.vertices:
                raise DanglingReferenceError(f"terminal pair ({s}, {t}) references an unknown vertex")
        if len(self.order) != len(self.vertices) or set(self.order) != self.vertices:
            raise ValueError("order must list every vertex exactly once")
        pos = {v: i for i, v in enumerate(self.order)}
        for u, v in self.arcs:
            if pos[u] >= pos[v]:
                raise CycleDetectedError(f"arc ({u}, {v}) goes backwards in the topological order")
        return self

    # ── Construction without validation ──────────────────────────────────────
    def derive(
        self,
        vertices: Optional[Iterable[int]] = None,
        arcs: Optional[Iterable[Arc]] = None,
        budget: Optional[int] = None,
    ) -> "DagInstance":
        """
        Build a sibling instance with the same terminal pairs.

        ς is inherited from `self` and restricted to the new vertex set; the
        caller guarantees every new arc goes forward in it.
        """
        verts = self.vertices if vertices is None else frozenset(vertices)
        if arcs is None:
            arc_set = frozenset((u, v) for u, v in self.arcs if u in verts and v in verts)
        else:
            arc_set = frozenset(arcs)
        order = self.order if verts == self.vertices else tuple(v for v in self.order if v in verts)
        return DagInstance.model_construct(
            vertices=verts,
            arcs=arc_set,
            terminal_pairs=self.terminal_pairs,
            budget=self.budget if budget is None else budget,
            order=order,
        )

    # ── Indexes ──────────────────────────────────────────────────────────────
    def _index(self) -> None:
        succ: dict[int, set[int]] = {v: set() for v in self.vertices}
        pred: dict[int, set[int]] = {v: set() for v in self.vertices}
        for u, v in self.arcs:
            succ[u].add(v)
            pred[v].add(u)
        self._succ = {v: frozenset(s) for v, s in succ.items()}
        self._pred = {v: frozenset(s) for v, s in pred.items()}
        self._pos = {v: i for i, v in enumerate(self.order)}

    def succ(self, v: int) -> frozenset[int]:
        if self._succ is None:
            self._index()
        return self._succ[v]

    def pred(self, v: int) -> frozenset[int]:
        if self._pred is None:
            self._index()
        return self._pred[v]

    def position(self, v: int) -> int:
        """Index of v in ς."""
        if self._pos is None:
            self._index()
        return self._pos[v]

    def graph(self) -> nx.DiGraph:
        """networkx view of the instance (cached, do not mutate)."""
        if self._graph is None:
            g = nx.DiGraph()
            g.add_nodes_from(self.order)
            g.add_edges_from(sorted(self.arcs))
            self._graph = g
        return self._graph

    # ── Terminals ────────────────────────────────────────────────────────────
    @property
    def r(self) -> int:
        return len(self.terminal_pairs)

    @property
    def sources(self) -> tuple[int, ...]:
        """Distinct source terminals, in pair order."""
        return tuple(dict.fromkeys(s for s, _ in self.terminal_pairs))

    @property
    def sinks(self) -> tuple[int, ...]:
        return tuple(dict.fromkeys(t for _, t in self.terminal_pairs))

    @property
    def terminals(self) -> frozenset[int]:
        return frozenset(self.sources) | frozenset(self.sinks)

    @property
    def nonterminals(self) -> frozenset[int]:
        return self.vertices - self.terminals

    def sort_by_order(self, vertices: Iterable[int]) -> list[int]:
        return sorted(vertices, key=self.position)

    def key(self) -> tuple:
        """Hashable identity of the instance, used by the solver's NO-memo."""
        return (self.vertices, self.arcs, self.budget)


# ── Small value types ─────────────────────────────────────────────────────────
class CutSet(BaseModel):
    """A set of nonterminal vertex IDs proposed as a multicut."""

    model_config = ConfigDict(frozen=True)

    members: frozenset[int] = Field(default_factory=frozenset)

    @property
    def size(self) -> int:
        return len(self.members)


class SrcMap(BaseModel):
    """src(G, v): the source terminals having a path to v."""

    model_config = ConfigDict(frozen=True)

    mapping: dict[int, frozenset[int]]

    def of(self, v: int) -> frozenset[int]:
        return self.mapping.get(v, frozenset())


# ── Arc-deletion instance ─────────────────────────────────────────────────────
class WeightedArc(BaseModel):
    model_config = ConfigDict(frozen=True)

    tail: int
    head: int
    weight: Weight = Field(..., description="Positive integer or INFINITE (never deletable).")

    @field_validator("weight")
    @classmethod
    def _positive(cls, w: Weight) -> Weight:
        if w is not INFINITE and w < 1:
            raise ValueError("arc weights must be positive")
        return w

    @property
    def is_finite(self) -> bool:
        return self.weight is not INFINITE


class WeightedArcInstance(BaseModel):
    """
    Arc-deletion multicut instance. A solution is a set of finite-weight arcs
    of total weight at most `budget` whose removal separates every pair.
    """

    model_config = ConfigDict(frozen=True)

    vertices: frozenset[int]
    arcs: tuple[WeightedArc, ...]
    terminal_pairs: tuple[tuple[int, int], ...]
    budget: int = Field(..., ge=0)

    _graph: Optional[nx.DiGraph] = PrivateAttr(default=None)

    @model_validator(mode="after")
    def _check_structure(self) -> "WeightedArcInstance":
        seen: set[Arc] = set()
        for arc in self.arcs:
            if arc.tail not in self.vertices or arc.head not in self.vertices:
                raise DanglingReferenceError(f"arc ({arc.tail}, {arc.head}) references an unknown vertex")
            if (arc.tail, arc.head) in seen:
                raise ValueError(f"duplicate arc ({arc.tail}, {arc.head})")
            seen.add((arc.tail, arc.head))
        for s, t in self.terminal_pairs:
            if s not in self.vertices or t not in self.vertices:
                raise DanglingReferenceError(f"terminal pair ({s}, {t}) references an unknown vertex")
        if not nx.is_directed_acyclic_graph(self.graph()):
            raise CycleDetectedError("weighted instance contains a cycle")
        return self

    def graph(self) -> nx.DiGraph:
        if self._graph is None:
            g = nx.DiGraph()
            g.add_nodes_from(sorted(self.vertices))
            for arc in self.arcs:
                g.add_edge(arc.tail, arc.head, weight=arc.weight)
            self._graph = g
        return self._graph

    @property
    def finite_arcs(self) -> tuple[WeightedArc, ...]:
        return tuple(a for a in self.arcs if a.is_finite)

    @property
    def terminals(self) -> frozenset[int]:
        return frozenset(v for pair in self.terminal_pairs for v in pair)

    def weight(self, tail: int, head: int) -> Weight:
        return self.graph()[tail][head]["weight"]


# ── Undirected input graphs ───────────────────────────────────────────────────
class UndirectedGraph(BaseModel):
    """Simple undirected graph on vertices 0..n-1."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=0)
    edges: frozenset[tuple[int, int]] = Field(default_factory=frozenset)

    @field_validator("edges")
    @classmethod
    def _canonical_edges(cls, edges: frozenset[tuple[int, int]]) -> frozenset[tuple[int, int]]:
        canonical = set()
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop on vertex {u}")
            canonical.add((min(u, v), max(u, v)))
        return frozenset(canonical)

    @model_validator(mode="after")
    def _in_range(self) -> "UndirectedGraph":
        for u, v in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise DanglingReferenceError(f"edge ({u}, {v}) outside 0..{self.n - 1}")
        return self

    @property
    def m(self) -> int:
        return len(self.edges)

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edges

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)
