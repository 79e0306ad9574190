"""
results.py — Pydantic models for reports, branching state and outcomes.

  SeparatorReport     ← min_separator output (size + both closest mincuts)
  Potential           ← φ = (r+1)p − Σ cut(s_i, t_i), or infeasible
  DegreeBranchResult  ← degree-branch children plus the kept instance
  ShadowStrategy      ← how shadow families are produced
  ShadowFamily        ← the sets handed to the shadowless branching
  BranchNode          ← one node of the solver's search tree
  SolveTrace          ← statistics merged across the search
  SolveOutcome        ← final YES(cut) / NO answer
"""

from collections import Counter
from enum import Enum
from typing import Optional, Union

from pydantic import BaseModel, ConfigDict, Field

from app.models.instance import CutSet, DagInstance, Infinity


class Ordering(str, Enum):
    LT = "LT"
    EQ = "EQ"
    GT = "GT"


class MulticutCheck(BaseModel):
    model_config = ConfigDict(frozen=True)

    ok: bool
    reason: str = ""


# ── Separators ────────────────────────────────────────────────────────────────
class SeparatorReport(BaseModel):
    """
    Size of cut_G(X, Y) and the two extremal minimum separators.

    When `size` is INFINITE both closest cuts are empty.
    """

    model_config = ConfigDict(frozen=True)

    size: Union[int, Infinity]
    closest_to_x: frozenset[int] = Field(default_factory=frozenset)
    closest_to_y: frozenset[int] = Field(default_factory=frozenset)

    @property
    def is_finite(self) -> bool:
        return self.size is not Infinity.INFINITE


class Potential(BaseModel):
    model_config = ConfigDict(frozen=True)

    value: Optional[int] = Field(None, description="None when some pair cannot be cut within p.")
    cuts: tuple[Union[int, Infinity], ...] = ()

    @property
    def feasible(self) -> bool:
        return self.value is not None


# ── Degree branching ──────────────────────────────────────────────────────────
class TaggedChild(BaseModel):
    """A degree-branch child: arc (vertex, t_i) added, then vertex bypassed."""

    model_config = ConfigDict(frozen=True)

    pair_index: int = Field(..., description="0-based index i of the terminal pair.")
    vertex: int
    instance: DagInstance


class DegreeBranchResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    children: tuple[TaggedChild, ...]
    kept: DagInstance


# ── Shadows ───────────────────────────────────────────────────────────────────
class ShadowKind(str, Enum):
    EXHAUSTIVE = "exhaustive"
    RANDOMIZED = "random"
    ORACLE_ASSISTED = "oracle"
    CUT_SHADOWS = "cuts"


class ShadowStrategy(BaseModel):
    """
    Strategy for shadow_family. Only RANDOMIZED reads `seed` and `iterations`;
    EXHAUSTIVE, ORACLE_ASSISTED and CUT_SHADOWS always contain a good set.
    """

    model_config = ConfigDict(frozen=True)

    kind: ShadowKind = ShadowKind.EXHAUSTIVE
    seed: int = Field(0, ge=0)
    iterations: Optional[int] = Field(None, ge=1, description="Defaults to DAGMC_RANDOM_ITERATIONS.")

    @property
    def complete(self) -> bool:
        return self.kind is not ShadowKind.RANDOMIZED


class ShadowFamily(BaseModel):
    model_config = ConfigDict(frozen=True)

    sets: tuple[frozenset[int], ...]
    strategy: ShadowStrategy


# ── Search tree ───────────────────────────────────────────────────────────────
class BranchNode(BaseModel):
    model_config = ConfigDict(frozen=True)

    instance: DagInstance
    kills_so_far: CutSet = Field(default_factory=CutSet)
    depth: int = 0
    label: str = "root"
    potential: int = Field(..., description="φ of `instance`; children must be strictly smaller.")


class StepKind(str, Enum):
    NO = "NO"
    YES_LEAF = "YES_LEAF"
    BRANCH = "BRANCH"


class StepResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: StepKind
    children: tuple[BranchNode, ...] = ()


class SolveTrace(BaseModel):
    """Search statistics. Mutable so workers can accumulate, merged in canonical order."""

    nodes_expanded: int = 0
    max_depth: int = 0
    children_per_stage: dict[str, int] = Field(default_factory=dict)
    shadow_family_sizes: dict[int, int] = Field(default_factory=dict)
    pruned_children: int = 0
    memo_hits: int = 0

    def count_child(self, stage: str) -> None:
        self.children_per_stage[stage] = self.children_per_stage.get(stage, 0) + 1

    def count_family(self, size: int) -> None:
        self.shadow_family_sizes[size] = self.shadow_family_sizes.get(size, 0) + 1

    def merge(self, other: "SolveTrace") -> None:
        self.nodes_expanded += other.nodes_expanded
        self.max_depth = max(self.max_depth, other.max_depth)
        self.children_per_stage = dict(Counter(self.children_per_stage) + Counter(other.children_per_stage))
        self.shadow_family_sizes = dict(Counter(self.shadow_family_sizes) + Counter(other.shadow_family_sizes))
        self.pruned_children += other.pruned_children
        self.memo_hits += other.memo_hits


class Answer(str, Enum):
    YES = "YES"
    NO = "NO"


class SolveOutcome(BaseModel):
    model_config = ConfigDict(frozen=True)

    answer: Answer
    cut: Optional[CutSet] = None
    stats: SolveTrace = Field(default_factory=SolveTrace)
    complete: bool = Field(True, description="False when a NO may be a Monte-Carlo miss.")
