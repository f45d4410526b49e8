"""Slow and fast Raney transducers for the map x -> n*x.

Nodes are 2x2 nonnegative integer matrices ``(a, b, c, d)`` of determinant
``n``.  An edge ``g --V:W--> h`` satisfies ``g * V == W * h`` as matrices,
where a word's matrix is the product of ``L = [[1,0],[1,1]]`` and
``R = [[1,1],[0,1]]``.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from itertools import product
from typing import NamedTuple

from .words import Mat, matmul, word_matrix

COMPACTION_LIMIT = 10**6


class NonPositiveDeterminant(ValueError):
    pass


class CompactionDiverged(RuntimeError):
    pass


def det(m: Mat) -> int:
    a, b, c, d = m
    return a * d - b * c


def row_balanced(m: Mat) -> bool:
    a, b, c, d = m
    return a > c and b < d


def doubly_balanced(m: Mat) -> bool:
    a, b, c, d = m
    return a > b and c < d and a > c and b < d


def mirror(m: Mat) -> Mat:
    """Conjugation by x -> 1/x; swaps L and R in inputs and outputs."""
    a, b, c, d = m
    return (d, c, b, a)


def swap_letters(word: str) -> str:
    return word.translate(str.maketrans("LR", "RL"))


def slow_step(gamma: Mat, letter: str) -> tuple[str, Mat]:
    """One step of the slow transducer: ``gamma * S == W * gamma'``."""
    if det(gamma) <= 0:
        raise NonPositiveDeterminant(gamma)
    a, b, c, d = matmul(gamma, word_matrix(letter))
    out = []
    while True:
        if a <= c:
            out.append("L")
            c, d = c - a, d - b
        elif b >= d:
            out.append("R")
            a, b = a - c, b - d
        else:
            return "".join(out), (a, b, c, d)


class Edge(NamedTuple):
    src: int
    inp: str
    out: str
    dst: int


@dataclass
class Transducer:
    level: int
    kind: str
    nodes: list[Mat]
    edges: list[Edge]
    start: int = 0
    index: dict[Mat, int] = field(init=False, repr=False)
    out_edges: list[list[int]] = field(init=False, repr=False)

    def __post_init__(self):
        self.index = {m: i for i, m in enumerate(self.nodes)}
        self.out_edges = [[] for _ in self.nodes]
        for i, e in enumerate(self.edges):
            self.out_edges[e.src].append(i)

    def indegrees(self) -> list[int]:
        deg = [0] * len(self.nodes)
        for e in self.edges:
            deg[e.dst] += 1
        return deg

    def to_json(self) -> str:
        return json.dumps(
            {
                "level": self.level,
                "kind": self.kind,
                "nodes": [list(m) for m in self.nodes],
                "edges": [{"from": e.src, "in": e.inp, "out": e.out, "to": e.dst} for e in self.edges],
            },
            separators=(",", ":"),
        )

    @classmethod
    def from_json(cls, text: str) -> Transducer:
        data = json.loads(text)
        nodes = [tuple(m) for m in data["nodes"]]
        edges = [Edge(e["from"], e["in"], e["out"], e["to"]) for e in data["edges"]]
        start = nodes.index((data["level"], 0, 0, 1))
        return cls(data["level"], data["kind"], nodes, edges, start)


def build_slow(n: int) -> Transducer:
    if n < 2:
        raise ValueError("level must be at least 2")
    start = (n, 0, 0, 1)
    nodes = [start]
    index = {start: 0}
    edges = []
    queue = deque([start])
    while queue:
        g = queue.popleft()
        for letter in "LR":
            w, h = slow_step(g, letter)
            if h not in index:
                index[h] = len(nodes)
                nodes.append(h)
                queue.append(h)
            edges.append(Edge(index[g], letter, w, index[h]))
    return Transducer(n, "slow", nodes, edges, 0)


def build_fast(n: int) -> Transducer:
    """Compact the slow transducer through its indegree-1 nodes."""
    slow = build_slow(n)
    indeg = slow.indegrees()
    hubs = [i for i in range(len(slow.nodes)) if indeg[i] >= 2]
    # BFS order from the start node over the compacted graph
    new_index = {slow.start: 0}
    order = [slow.start]
    edges: list[tuple[int, str, str, int]] = []
    pos = 0
    while pos < len(order):
        src = order[pos]
        pos += 1
        for e in _compacted_edges(slow, src, indeg):
            if e.dst not in new_index:
                new_index[e.dst] = len(order)
                order.append(e.dst)
            edges.append(e)
    if len(order) != len(hubs):
        raise CompactionDiverged(f"{len(order)} reachable hubs of {len(hubs)}")
    fast_edges = [Edge(new_index[e.src], e.inp, e.out, new_index[e.dst]) for e in edges]
    return Transducer(n, "fast", [slow.nodes[i] for i in order], fast_edges, 0)


def _compacted_edges(slow: Transducer, src: int, indeg: list[int]) -> list[Edge]:
    out = []
    stack = [(src, "", "", 0)]
    steps = 0
    while stack:
        node, vin, wout, depth = stack.pop()
        for ei in reversed(slow.out_edges[node]):
            e = slow.edges[ei]
            steps += 1
            if steps > COMPACTION_LIMIT:
                raise CompactionDiverged(f"chain from node {src} exceeds {COMPACTION_LIMIT} steps")
            v, w = vin + e.inp, wout + e.out
            if indeg[e.dst] >= 2:
                out.append(Edge(src, v, w, e.dst))
            else:
                stack.append((e.dst, v, w, depth + 1))
    # L-first lexicographic input order
    out.sort(key=lambda e: e.inp)
    return out


# validation --------------------------------------------------------------

def _is_base(words: list[str]) -> bool:
    """Prefix-free and complete: Kraft sum 1 with no word a prefix of another."""
    ws = sorted(words)
    for x, y in zip(ws, ws[1:]):
        if y.startswith(x):
            return False
    den = 2 ** max(len(w) for w in ws)
    return sum(den >> len(w) for w in ws) == den


def strongly_connected(t: Transducer) -> bool:
    n = len(t.nodes)
    fwd = [[] for _ in range(n)]
    bwd = [[] for _ in range(n)]
    for e in t.edges:
        fwd[e.src].append(e.dst)
        bwd[e.dst].append(e.src)

    def reach(adj):
        seen = {t.start}
        stack = [t.start]
        while stack:
            for j in adj[stack.pop()]:
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        return len(seen)

    return reach(fwd) == n and reach(bwd) == n


def validate(t: Transducer) -> list[str]:
    """Return a list of violated invariants (empty when valid)."""
    problems = []
    n = t.level
    for i, m in enumerate(t.nodes):
        if det(m) != n:
            problems.append(f"node {i} {m}: determinant {det(m)} != {n}")
        if math.gcd(*m) != 1:
            problems.append(f"node {i} {m}: entries not coprime")
        if t.kind == "slow" and not row_balanced(m):
            problems.append(f"node {i} {m}: not row-balanced")
        if t.kind == "fast" and not doubly_balanced(m):
            problems.append(f"node {i} {m}: not doubly balanced")
    for k, e in enumerate(t.edges):
        lhs = matmul(t.nodes[e.src], word_matrix(e.inp))
        rhs = matmul(word_matrix(e.out), t.nodes[e.dst])
        if lhs != rhs:
            problems.append(f"edge {k} {e}: matrix identity fails")
    for i, outs in enumerate(t.out_edges):
        inputs = [t.edges[k].inp for k in outs]
        if t.kind == "slow" and sorted(inputs) != ["L", "R"]:
            problems.append(f"node {i}: slow inputs {inputs}")
        if t.kind == "fast" and not _is_base(inputs):
            problems.append(f"node {i}: inputs {inputs} do not form a base")
    if not strongly_connected(t):
        problems.append("graph is not strongly connected")
    if t.kind == "slow" and n <= 5:
        problems += _silent_walks(t, n)
    return problems


def _silent_walks(t: Transducer, length: int) -> list[str]:
    """Walks of the given length whose outputs are all empty."""
    bad = []
    by_letter = [{t.edges[k].inp: t.edges[k] for k in outs} for outs in t.out_edges]
    for start in range(len(t.nodes)):
        for letters in product("LR", repeat=length):
            node, emitted = start, False
            for s in letters:
                e = by_letter[node][s]
                emitted = emitted or bool(e.out)
                node = e.dst
            if not emitted:
                bad.append(f"silent walk {''.join(letters)} from node {start}")
    return bad


def run(t: Transducer, word: str, node: int | None = None) -> tuple[str, int]:
    """Drive a slow transducer with an input word; return (output, end node)."""
    node = t.start if node is None else node
    by_letter = [{t.edges[k].inp: t.edges[k] for k in outs} for outs in t.out_edges]
    out = []
    for s in word:
        e = by_letter[node][s]
        out.append(e.out)
        node = e.dst
    return "".join(out), node


def run_fast(t: Transducer, word: str, node: int | None = None) -> tuple[str, str, int]:
    """Consume as many whole edges as ``word`` allows.

    Returns ``(consumed input, output, end node)``.
    """
    node = t.start if node is None else node
    pos = 0
    out = []
    while True:
        for k in t.out_edges[node]:
            e = t.edges[k]
            if word.startswith(e.inp, pos):
                out.append(e.out)
                pos += len(e.inp)
                node = e.dst
                break
        else:
            return word[:pos], "".join(out), node


# export ------------------------------------------------------------------

def _mat_label(m: Mat) -> str:
    a, b, c, d = m
    return f"[[{a},{b}],[{c},{d}]]"


def to_dot(t: Transducer) -> str:
    lines = [f'digraph "{t.kind}_{t.level}" {{', "  node [shape=box];"]
    for i, m in enumerate(t.nodes):
        shape = ' peripheries=2' if i == t.start else ""
        lines.append(f'  n{i} [label="{_mat_label(m)}"{shape}];')
    for e in t.edges:
        lines.append(f'  n{e.src} -> n{e.dst} [label="{e.inp or "-"}:{e.out or "-"}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
