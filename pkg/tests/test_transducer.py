import math
import random
import re
from fractions import Fraction

import pytest

from plagrange.factor import is_prime
from plagrange.transducer import (
    Edge,
    Transducer,
    build_fast,
    build_slow,
    doubly_balanced,
    mirror,
    run,
    run_fast,
    slow_step,
    swap_letters,
    to_dot,
    validate,
)
from plagrange.words import cf_value, matmul, word_matrix

# Raney transducer T_13: node label -> matrix, then (from, in, out, to)
T13_NODES = {
    0: (13, 0, 0, 1), 1: (7, 1, 1, 2), 2: (5, 2, 1, 3), 3: (4, 3, 1, 4), 4: (5, 4, 3, 5),
    5: (3, 2, 1, 5), 6: (7, 6, 6, 7), 7: (5, 1, 2, 3), 8: (5, 3, 4, 5), 9: (4, 1, 3, 4),
    10: (3, 1, 2, 5), 11: (2, 1, 1, 7), 12: (1, 0, 0, 13),
}
T13_EDGES = """
0 L^13 L 0; 0 R R^13 0; 0 LR R^6 1; 0 L^7R RLR 2; 0 L^9R RLL 3; 0 L^8R RL 4; 0 L^10R RLLL 5
0 L^6R R 6; 0 LLR R^4 7; 0 L^4R RR 8; 0 LLLR RRR 9; 0 L^5R RRL 10; 0 L^11R RL^5 11; 0 L^12R RL^12 12
1 L^6 LR 0; 1 R RR 2; 1 LLR RL 3; 1 LR R 4; 1 LLLR RLL 5; 1 L^4R RL^4 11; 1 L^5R RL^11 12
2 L^4 LRR 0; 2 R R 3; 2 LR RL 5; 2 LLR RLLL 11; 2 LLLR RL^10 12
3 LLL LRRR 0; 3 R R 5; 3 LR RLL 11; 3 LLR RL^9 12
4 LL LR^4 0; 4 R RL 11; 4 LR RL^8 12
5 RLL LR^5 0; 5 L L 2; 5 RR R 11; 5 RLR RL^7 12
6 L LR^6 0; 6 R RL^6 12
7 LRL LR^7 0; 7 LL L 1; 7 R R 10; 7 LRR RL^5 12
8 RL LR^8 0; 8 L LR 1; 8 RR RL^4 12
9 RRL LR^9 0; 9 RL LRR 1; 9 L L 7; 9 RRR RLLL 12
10 RRRL LR^10 0; 10 RRL LRRR 1; 10 RL LR 7; 10 L L 9; 10 R^4 RLL 12
11 R^5L LR^11 0; 11 R^4L LR^4 1; 11 RRRL LRR 7; 11 RL L 8; 11 RRL LR 9; 11 L LL 10; 11 R^6 RL 12
12 R^12L LR^12 0; 12 R^11L LR^5 1; 12 R^5L LLR 2; 12 RRRL LLL 3; 12 R^4L LL 4; 12 RRL L^4 5
12 R^6L L 6; 12 R^10L LRRR 7; 12 R^8L LR 8; 12 R^9L LRR 9; 12 R^7L LRL 10; 12 RL L^6 11
12 L L^13 12; 12 R^13 R 12
"""


def expand(word: str) -> str:
    return re.sub(r"([LR])\^(\d+)", lambda m: m.group(1) * int(m.group(2)), word)


def t13_table():
    out = set()
    for item in T13_EDGES.replace("\n", ";").split(";"):
        if item.strip():
            a, v, w, b = item.split()
            out.add((T13_NODES[int(a)], expand(v), expand(w), T13_NODES[int(b)]))
    return out


def row_balanced_matrices(n):
    """All coprime row-balanced matrices of determinant n (a + d <= n + 1)."""
    return {
        (a, b, c, d)
        for a in range(n + 2)
        for d in range(n + 2)
        for b in range(d)
        for c in range(a)
        if a * d - b * c == n and math.gcd(a, b, c, d) == 1
    }


def lr_expansion(x: Fraction, limit: int) -> str:
    """Stern-Brocot descent towards a positive rational."""
    out = []
    while x != 1 and len(out) < limit:
        if x > 1:
            out.append("R")
            x -= 1
        else:
            out.append("L")
            x = x / (1 - x)
    return "".join(out)


def mobius(m, x):
    a, b, c, d = m
    return (a * x + b) / (c * x + d)


# slow transducer -----------------------------------------------------------------

def test_slow_step_examples():
    assert slow_step((2, 0, 0, 1), "R") == ("RR", (2, 0, 0, 1))
    assert slow_step((1, 1, 0, 2), "L") == ("LR", (2, 0, 0, 1))
    assert slow_step((2, 1, 1, 2), "L") == ("LR", (3, 0, 0, 1))


def test_slow_node_counts():
    assert len(build_slow(2).nodes) == 4
    assert len(build_slow(3).nodes) == 7
    with pytest.raises(ValueError):
        build_slow(1)


@pytest.mark.parametrize("n", range(2, 21))
def test_slow_nodes_are_all_row_balanced_matrices(n):
    assert set(build_slow(n).nodes) == row_balanced_matrices(n)


@pytest.mark.parametrize("n", range(2, 6))
def test_slow_drives_lr_expansion(n):
    t = build_slow(n)
    rng = random.Random(n)
    for gi, g in enumerate(t.nodes):
        for _ in range(500 // len(t.nodes) + 1):
            s = "".join(rng.choice("LR") for _ in range(80))
            x0 = cf_value([rng.randint(1, 5) for _ in range(30)])
            xi = mobius(word_matrix(s), x0)
            w, end = run(t, s, gi)
            assert matmul(g, word_matrix(s)) == matmul(word_matrix(w), t.nodes[end])
            image = lr_expansion(mobius(g, xi), len(w) + 10)
            assert image.startswith(w)
            assert len(w) >= 50


# fast transducer --------------------------------------------------------------------

def test_fast_two():
    t = build_fast(2)
    assert len(t.nodes) == 2 and len(t.edges) == 6
    edges = {(t.nodes[e.src], e.inp, e.out, t.nodes[e.dst]) for e in t.edges}
    assert ((2, 0, 0, 1), "LR", "RL", (1, 0, 0, 2)) in edges


def test_fast_three():
    t = build_fast(3)
    assert len(t.nodes) == 3
    loops = {(e.inp, e.out) for e in t.edges if e.src == e.dst == t.index[(3, 0, 0, 1)]}
    assert {("LLL", "L"), ("R", "RRR")} <= loops


def test_fast_thirteen_matches_reference_table():
    t = build_fast(13)
    assert set(t.nodes) == set(T13_NODES.values())
    got = {(t.nodes[e.src], e.inp, e.out, t.nodes[e.dst]) for e in t.edges}
    assert got == t13_table()
    assert len(t.edges) == len(t13_table())


@pytest.mark.parametrize("p", [p for p in range(2, 100) if is_prime(p)])
def test_fast_has_p_nodes(p):
    t = build_fast(p)
    assert len(t.nodes) == p
    assert all(doubly_balanced(m) for m in t.nodes)


@pytest.mark.parametrize("n", range(2, 14))
def test_fast_agrees_with_slow(n):
    slow, fast = build_slow(n), build_fast(n)
    rng = random.Random(100 + n)
    for _ in range(100):
        word = "".join(rng.choice("LR") for _ in range(200))
        used, out, end = run_fast(fast, word)
        assert len(used) >= 100
        s_out, s_end = run(slow, used)
        assert out == s_out
        assert fast.nodes[end] == slow.nodes[s_end]


# validation -------------------------------------------------------------------------

@pytest.mark.parametrize("n", range(2, 31))
def test_validate_clean(n):
    assert validate(build_slow(n)) == []
    assert validate(build_fast(n)) == []


def test_validate_reports_flipped_output():
    t = build_fast(5)
    e = t.edges[3]
    flipped = e.out[:-1] + ("L" if e.out[-1] == "R" else "R")
    bad = Transducer(t.level, t.kind, t.nodes, t.edges[:3] + [Edge(e.src, e.inp, flipped, e.dst)] + t.edges[4:])
    problems = validate(bad)
    assert any("matrix identity" in p for p in problems)


def test_validate_reports_missing_edge():
    t = build_fast(5)
    bad = Transducer(t.level, t.kind, t.nodes, t.edges[1:])
    assert any("base" in p for p in validate(bad))


def test_mirror_maps_transducer_to_itself():
    for n in (2, 3, 7, 13):
        t = build_fast(n)
        edges = {(t.nodes[e.src], e.inp, e.out, t.nodes[e.dst]) for e in t.edges}
        mirrored = {(mirror(a), swap_letters(v), swap_letters(w), mirror(b)) for a, v, w, b in edges}
        assert mirrored == edges


# export ------------------------------------------------------------------------------

def test_dot_export():
    text = to_dot(build_fast(2))
    assert text.count("label=\"[[") == 2
    assert text.count("->") == 6
    assert to_dot(build_fast(2)) == text
    assert to_dot(build_slow(3)).count("label=\"[[") == 7


@pytest.mark.parametrize("n", [2, 3, 13])
def test_json_round_trip(n):
    for t in (build_slow(n), build_fast(n)):
        again = Transducer.from_json(t.to_json())
        assert again.to_json() == t.to_json()
        assert again.nodes == t.nodes and again.edges == t.edges
