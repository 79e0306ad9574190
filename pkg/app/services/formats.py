"""
formats.py — Line-oriented text codecs.

  Vertex instance     p dagmc <n> <r> <p>     a <u> <v>        t <s> <t>
  Weighted instance   p dagmc-w <n> <r> <p>   a <u> <v> <w|inf> t <s> <t>
  Undirected graph    p graph <n> <m>         e <u> <v>
  Solution            s YES, then v <id> per vertex in ς order  |  s NO

`c ...` lines and blank lines are ignored. Instance IDs are 1..n; graph
files are 1-indexed on disk and 0-indexed in memory. Rendering is canonical
(sorted arcs), so equal instances render to identical bytes.
"""

import logging
import re
from typing import Iterator, Optional, Union

from app.errors import ParseError
from app.models.instance import INFINITE, DagInstance, UndirectedGraph, WeightedArc, WeightedArcInstance, Weight
from app.services.dag_core import build_instance

logger = logging.getLogger(__name__)

_TOKEN = re.compile(r"\S+")

Token = tuple[int, str]


def _lines(text: str) -> Iterator[tuple[int, list[Token]]]:
    """(line number, [(column, token), ...]) for every meaningful line."""
    for number, raw in enumerate(text.splitlines(), start=1):
        tokens = [(m.start() + 1, m.group()) for m in _TOKEN.finditer(raw)]
        if not tokens or tokens[0][1] == "c":
            continue
        yield number, tokens


def _int(token: Token, line: int, low: Optional[int] = None, high: Optional[int] = None) -> int:
    column, text = token
    try:
        value = int(text)
    except ValueError:
        raise ParseError(f"expected an integer, got {text!r}", line, column) from None
    if low is not None and value < low:
        raise ParseError(f"value {value} below {low}", line, column)
    if high is not None and value > high:
        raise ParseError(f"vertex {value} outside 1..{high}", line, column)
    return value


def _arity(tokens: list[Token], count: int, line: int) -> None:
    if len(tokens) != count:
        column = tokens[min(len(tokens), count) - 1][0]
        raise ParseError(f"'{tokens[0][1]}' line needs {count - 1} fields, got {len(tokens) - 1}", line, column)


# ── Instances ─────────────────────────────────────────────────────────────────
def parse_instance(text: str) -> Union[DagInstance, WeightedArcInstance]:
    """
    Parse a `dagmc` or `dagmc-w` file.

    Raises:
        ParseError: malformed text, with line and column.
        CycleDetectedError / DanglingReferenceError: forwarded from validation.
    """
    lines = _lines(text)
    header = next(lines, None)
    if header is None:
        raise ParseError("empty input: missing 'p' header")
    line, tokens = header
    if tokens[0][1] != "p" or len(tokens) < 2 or tokens[1][1] not in ("dagmc", "dagmc-w"):
        raise ParseError("first line must be 'p dagmc …' or 'p dagmc-w …'", line, tokens[0][0])
    _arity(tokens, 5, line)
    weighted = tokens[1][1] == "dagmc-w"
    n = _int(tokens[2], line, low=0)
    r = _int(tokens[3], line, low=0)
    p = _int(tokens[4], line, low=0)

    arcs: dict[tuple[int, int], Weight] = {}
    pairs: list[tuple[int, int]] = []
    last_line = line
    for line, tokens in lines:
        last_line = line
        kind = tokens[0][1]
        if kind == "a":
            _arity(tokens, 4 if weighted else 3, line)
            u = _int(tokens[1], line, low=1, high=n)
            v = _int(tokens[2], line, low=1, high=n)
            if not weighted:
                arcs[u, v] = 1
                continue
            w: Weight = INFINITE if tokens[3][1] == "inf" else _int(tokens[3], line, low=1)
            previous = arcs.get((u, v))
            if previous is not None:
                w = INFINITE if INFINITE in (previous, w) else previous + w
            arcs[u, v] = w
        elif kind == "t":
            _arity(tokens, 3, line)
            pairs.append((_int(tokens[1], line, low=1, high=n), _int(tokens[2], line, low=1, high=n)))
        elif kind == "p":
            raise ParseError("duplicate 'p' header", line, tokens[0][0])
        else:
            raise ParseError(f"unknown line type {kind!r}", line, tokens[0][0])

    if len(pairs) != r:
        raise ParseError(f"header declares {r} terminal pairs, found {len(pairs)}", last_line)

    vertices = range(1, n + 1)
    if weighted:
        return WeightedArcInstance(
            vertices=frozenset(vertices),
            arcs=tuple(WeightedArc(tail=u, head=v, weight=w) for (u, v), w in sorted(arcs.items())),
            terminal_pairs=tuple(pairs),
            budget=p,
        )
    return build_instance(vertices, arcs, pairs, p)


def render_instance(instance: DagInstance) -> str:
    """
    Canonical `dagmc` text. The header declares n = max ID, so an instance
    whose IDs are exactly 1..n parses back to itself. Gaps in the IDs, as
    left by `normalize` or a kill, come back as isolated nonterminals.
    """
    n = max(instance.vertices, default=0)
    out = [f"p dagmc {n} {instance.r} {instance.budget}"]
    out += [f"a {u} {v}" for u, v in sorted(instance.arcs)]
    out += [f"t {s} {t}" for s, t in instance.terminal_pairs]
    return "\n".join(out) + "\n"


def render_weighted(instance: WeightedArcInstance) -> str:
    n = max(instance.vertices, default=0)
    out = [f"p dagmc-w {n} {len(instance.terminal_pairs)} {instance.budget}"]
    for arc in sorted(instance.arcs, key=lambda a: (a.tail, a.head)):
        weight = "inf" if arc.weight is INFINITE else str(arc.weight)
        out.append(f"a {arc.tail} {arc.head} {weight}")
    out += [f"t {s} {t}" for s, t in instance.terminal_pairs]
    return "\n".join(out) + "\n"


# ── Undirected graphs ─────────────────────────────────────────────────────────
def parse_graph(text: str) -> UndirectedGraph:
    lines = _lines(text)
    header = next(lines, None)
    if header is None:
        raise ParseError("empty input: missing 'p graph' header")
    line, tokens = header
    if tokens[0][1] != "p" or len(tokens) < 2 or tokens[1][1] != "graph":
        raise ParseError("first line must be 'p graph <n> <m>'", line, tokens[0][0])
    _arity(tokens, 4, line)
    n = _int(tokens[2], line, low=0)
    m = _int(tokens[3], line, low=0)

    edges: set[tuple[int, int]] = set()
    last_line = line
    for line, tokens in lines:
        last_line = line
        if tokens[0][1] != "e":
            raise ParseError(f"unknown line type {tokens[0][1]!r}", line, tokens[0][0])
        _arity(tokens, 3, line)
        u = _int(tokens[1], line, low=1, high=n) - 1
        v = _int(tokens[2], line, low=1, high=n) - 1
        if u == v:
            raise ParseError(f"self-loop on vertex {u + 1}", line, tokens[1][0])
        edges.add((min(u, v), max(u, v)))
    if len(edges) != m:
        raise ParseError(f"header declares {m} edges, found {len(edges)} distinct", last_line)
    return UndirectedGraph(n=n, edges=frozenset(edges))


def render_graph(graph: UndirectedGraph) -> str:
    out = [f"p graph {graph.n} {graph.m}"]
    out += [f"e {u + 1} {v + 1}" for u, v in graph.sorted_edges()]
    return "\n".join(out) + "\n"


# ── Solutions ─────────────────────────────────────────────────────────────────
def render_solution(instance: DagInstance, cut: Optional[frozenset[int]]) -> str:
    if cut is None:
        return "s NO\n"
    lines = ["s YES"] + [f"v {v}" for v in instance.sort_by_order(cut)]
    return "\n".join(lines) + "\n"


def parse_solution(text: str) -> Optional[frozenset[int]]:
    """Vertex set of an `s YES` file, or None for `s NO`."""
    lines = _lines(text)
    header = next(lines, None)
    if header is None:
        raise ParseError("empty solution: missing 's' line")
    line, tokens = header
    if tokens[0][1] != "s" or len(tokens) != 2 or tokens[1][1] not in ("YES", "NO"):
        raise ParseError("first line must be 's YES' or 's NO'", line, tokens[0][0])
    verdict = tokens[1][1]
    members: set[int] = set()
    for line, tokens in lines:
        if verdict == "NO":
            raise ParseError("'s NO' takes no vertex lines", line, tokens[0][0])
        if tokens[0][1] != "v":
            raise ParseError(f"unknown line type {tokens[0][1]!r}", line, tokens[0][0])
        _arity(tokens, 2, line)
        members.add(_int(tokens[1], line, low=1))
    return frozenset(members) if verdict == "YES" else None
