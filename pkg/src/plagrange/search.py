"""Pruned enumeration of good paths on the fast Raney transducer.

Computes ``min L_p`` for a prime ``p`` together with an isolation bound
``beta`` (no other point of ``L_p`` lies below it) and the optimal cycles.

A path is *good* when the lower bound on the approximability of both its
input and its output word is at most the current ``alpha``.  Generation
``k`` holds the good paths with ``k`` edges; a candidate of length ``k`` is
built only if both of its ``k - 1`` edge subpaths are good.

Values that are square roots of rationals (``alpha``, ``beta``, cycle
values) are carried as their squares; ``None`` stands for infinity.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import multiprocessing
import os
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .exact import INF, Surd, Value, compare, mobius_apply, positive_root
from .factor import is_prime
from .transducer import Transducer, build_fast
from .words import (
    classify_symmetry,
    lambda_periodic,
    lambda_periodic_sq,
    matmul,
    run_lengths,
    surd_cf,
    underline_lambda_float,
    underline_lambda_runs,
    word_matrix,
)

log = logging.getLogger(__name__)

CHECKPOINT_FORMAT = "plagrange-checkpoint"
CHECKPOINT_VERSION = 1
FLOAT_MARGIN = 1e-9
# below this many parent paths a generation is processed in-process
PARALLEL_THRESHOLD = 2000

Sq = Optional[Fraction]


class NotPrime(ValueError):
    pass


class EmptyCycleSet(ValueError):
    pass


class VerificationFailed(AssertionError):
    pass


class CorruptCheckpoint(ValueError):
    pass


def sq_lt(x: Sq, y: Sq) -> bool:
    """``x < y`` for squared values where None is infinity."""
    if x is None:
        return False
    return y is None or x < y


def sq_value(x: Sq) -> Value:
    return INF if x is None else Surd.sqrt_of(x)


def sq_float(x: Sq) -> float:
    return math.inf if x is None else math.sqrt(x)


# run-length words ---------------------------------------------------------------

Runs = tuple  # (first letter or "", (run lengths, ...))

EMPTY_RUNS: Runs = ("", ())


def word_runs(word: str) -> Runs:
    return (word[:1], tuple(run_lengths(word)))


def _last_letter(r: Runs) -> str:
    first, runs = r
    if len(runs) % 2:
        return first
    return "R" if first == "L" else "L"


def join(left: Runs, right: Runs) -> Runs:
    if not left[1]:
        return right
    if not right[1]:
        return left
    if _last_letter(left) == right[0]:
        a, b = left[1], right[1]
        return (left[0], a[:-1] + (a[-1] + b[0],) + b[1:])
    return (left[0], left[1] + right[1])


def cyclic(r: Runs) -> tuple[int, ...] | None:
    """Run lengths over one period of ``w^inf``; None for a single letter."""
    runs = r[1]
    if len(runs) < 2:
        return None
    if len(runs) % 2:
        # first and last runs share a letter and merge around the period
        return (runs[-1] + runs[0],) + runs[1:-1]
    return runs


def runs_to_word(r: Runs) -> str:
    first, runs = r
    other = "R" if first == "L" else "L"
    return "".join((first if i % 2 == 0 else other) * n for i, n in enumerate(runs))


# paths -------------------------------------------------------------------------

@dataclass(frozen=True)
class Path:
    start: int
    edges: tuple[int, ...]
    V: str
    W: str
    end: int

    def identity_holds(self, t: Transducer) -> bool:
        lhs = matmul(t.nodes[self.start], word_matrix(self.V))
        return lhs == matmul(word_matrix(self.W), t.nodes[self.end])


def make_path(t: Transducer, edges: Sequence[int], start: int | None = None) -> Path:
    edges = tuple(edges)
    if not edges:
        node = t.start if start is None else start
        return Path(node, (), "", "", node)
    for a, b in zip(edges, edges[1:]):
        if t.edges[a].dst != t.edges[b].src:
            raise ValueError(f"edges {a} and {b} are not consecutive")
    V = "".join(t.edges[i].inp for i in edges)
    W = "".join(t.edges[i].out for i in edges)
    return Path(t.edges[edges[0]].src, edges, V, W, t.edges[edges[-1]].dst)


def path_bound(V: str, W: str) -> Fraction:
    """Pruning bound of a path: the larger lower bound of its two words.

    Every run, the first included, is cut: a path that matters lies deep
    inside an infinite walk, so its first run sits inside a genuine term.
    """
    return max(underline_lambda_runs(run_lengths(V), True), underline_lambda_runs(run_lengths(W), True))


def is_good(path: Path, alpha: Value) -> bool:
    if alpha is INF:
        return True
    x = Surd.from_rational(path_bound(path.V, path.W))
    return compare(x, alpha) <= 0


def cycle_value_sq(vr: Runs, wr: Runs) -> Sq:
    """``max(lambda(V^inf), lambda(W^inf))**2`` for a closed walk."""
    best = Fraction(0)
    for r in (vr, wr):
        per = cyclic(r)
        if per is None:
            return None
        best = max(best, lambda_periodic_sq(per))
    return best


def cycle_value(t: Transducer, cycle: Sequence[int]) -> Value:
    p = make_path(t, cycle)
    return sq_value(cycle_value_sq(word_runs(p.V), word_runs(p.W)))


# search state ---------------------------------------------------------------------

@dataclass
class Generation:
    """Good paths of one length, as tuples of edge indices."""

    paths: list[tuple[int, ...]]
    starts: list[int]
    ends: list[int]
    vruns: list[Runs]
    wruns: list[Runs]
    _index: Optional[dict] = field(default=None, repr=False)

    @property
    def index(self) -> dict[tuple[int, ...], int]:
        if self._index is None:
            self._index = {p: i for i, p in enumerate(self.paths)}
        return self._index

    def __len__(self) -> int:
        return len(self.paths)


@dataclass
class SearchState:
    p: int
    k: int
    alpha_sq: Sq
    beta_sq: Sq
    good: Generation
    good_prev: Optional[Generation]
    alpha_history: list[tuple[int, str]] = field(default_factory=list)

    @property
    def alpha(self) -> Value:
        return sq_value(self.alpha_sq)

    @property
    def beta(self) -> Value:
        return sq_value(self.beta_sq)


class Context:
    """Transducer plus per-edge data shared by every generation."""

    def __init__(self, t: Transducer):
        self.t = t
        self.ein = [word_runs(e.inp) for e in t.edges]
        self.eout = [word_runs(e.out) for e in t.edges]
        self.between: dict[tuple[int, int], list[int]] = {}
        for i, e in enumerate(t.edges):
            self.between.setdefault((e.src, e.dst), []).append(i)

    def generation(self, paths: list[tuple[int, ...]]) -> Generation:
        """Rebuild words and endpoints of stored paths."""
        edges = self.t.edges
        starts, ends, vr, wr = [], [], [], []
        for path in paths:
            make_path(self.t, path)  # raises on broken paths
            v = w = EMPTY_RUNS
            for ei in path:
                v, w = join(v, self.ein[ei]), join(w, self.eout[ei])
            starts.append(edges[path[0]].src)
            ends.append(edges[path[-1]].dst)
            vr.append(v)
            wr.append(w)
        return Generation(list(paths), starts, ends, vr, wr)


def initial_state(t: Transducer) -> SearchState:
    """Generation 0: the empty path at every node."""
    n = len(t.nodes)
    gen0 = Generation([()] * n, list(range(n)), list(range(n)), [EMPTY_RUNS] * n, [EMPTY_RUNS] * n, {})
    return SearchState(t.level, 0, None, None, gen0, None)


# generation step -------------------------------------------------------------------

def _trailing_ok(gen: Generation, k_prev: int, path: tuple[int, ...], ei: int) -> bool:
    return k_prev == 0 or path[1:] + (ei,) in gen.index


def _cycles_min(ctx: Context, gen: Generation, k_prev: int, alpha_sq: Sq) -> Sq:
    """Least cycle value among the candidates.

    A cycle ``P`` has bound at most ``lambda(P^inf)``, so every cycle below
    the current alpha is itself good and the update is order independent.
    """
    cache: dict[tuple, Sq] = {}
    for j, path in enumerate(gen.paths):
        for ei in ctx.between.get((gen.ends[j], gen.starts[j]), ()):
            if not _trailing_ok(gen, k_prev, path, ei):
                continue
            vr, wr = join(gen.vruns[j], ctx.ein[ei]), join(gen.wruns[j], ctx.eout[ei])
            key = (cyclic(vr), cyclic(wr))
            if key not in cache:
                cache[key] = cycle_value_sq(vr, wr)
            if sq_lt(cache[key], alpha_sq):
                alpha_sq = cache[key]
    return alpha_sq


def _bound_float(vr: Runs, wr: Runs) -> float:
    return max(underline_lambda_float(vr[1], True), underline_lambda_float(wr[1], True))


def _bound(vr: Runs, wr: Runs) -> Fraction:
    return max(underline_lambda_runs(vr[1], True), underline_lambda_runs(wr[1], True))


def _classify(ctx: Context, gen: Generation, k_prev: int, lo: int, hi: int, alpha_sq: Sq, beta_sq: Sq):
    """Good extensions of parents ``lo..hi`` and the least bound among bad ones."""
    out_edges = ctx.t.out_edges
    ein, eout = ctx.ein, ctx.eout
    alpha_f = sq_float(alpha_sq)
    beta_f = sq_float(beta_sq)
    good = []
    for j in range(lo, hi):
        path = gen.paths[j]
        pv, pw = gen.vruns[j], gen.wruns[j]
        for ei in out_edges[gen.ends[j]]:
            if not _trailing_ok(gen, k_prev, path, ei):
                continue
            vr, wr = join(pv, ein[ei]), join(pw, eout[ei])
            # every run is a cut, so the longest run bounds from below
            lb = max(max(vr[1]), max(wr[1], default=0))
            if lb > alpha_f + FLOAT_MARGIN:
                if lb >= beta_f + FLOAT_MARGIN:
                    continue
                lf = _bound_float(vr, wr)
            else:
                lf = _bound_float(vr, wr)
                if lf < alpha_f - FLOAT_MARGIN or (
                    lf <= alpha_f + FLOAT_MARGIN and (alpha_sq is None or _bound(vr, wr) ** 2 <= alpha_sq)
                ):
                    good.append((path + (ei,), gen.starts[j], vr, wr))
                    continue
            if lf < beta_f + FLOAT_MARGIN:
                x = _bound(vr, wr)
                if sq_lt(x * x, beta_sq):
                    beta_sq, beta_f = x * x, float(x)
    return good, beta_sq


# state inherited by forked workers
_WORK: Optional[tuple] = None


def _classify_worker(bounds):
    ctx, gen, k_prev, alpha_sq, beta_sq = _WORK
    return _classify(ctx, gen, k_prev, bounds[0], bounds[1], alpha_sq, beta_sq)


def iterate(ctx: Context, state: SearchState, threads: int = 1) -> SearchState:
    """Advance the search by one generation.

    Work is split over parent paths; the merge keeps parent order, so the
    result does not depend on ``threads``.
    """
    global _WORK
    gen, k_prev = state.good, state.k
    alpha_sq = _cycles_min(ctx, gen, k_prev, state.alpha_sq)
    n = len(gen)
    if threads > 1 and n >= PARALLEL_THRESHOLD and "fork" in multiprocessing.get_all_start_methods():
        gen.index  # build once before forking
        _WORK = (ctx, gen, k_prev, alpha_sq, state.beta_sq)
        step = -(-n // (4 * threads))
        ranges = [(lo, min(n, lo + step)) for lo in range(0, n, step)]
        try:
            with multiprocessing.get_context("fork").Pool(threads) as pool:
                parts = pool.map(_classify_worker, ranges)
        finally:
            _WORK = None
    else:
        parts = [_classify(ctx, gen, k_prev, 0, n, alpha_sq, state.beta_sq)]
    good = [g for part, _ in parts for g in part]
    beta_sq = state.beta_sq
    for _, b in parts:
        if sq_lt(b, beta_sq):
            beta_sq = b

    edges = ctx.t.edges
    new = Generation(
        [g[0] for g in good],
        [g[1] for g in good],
        [edges[g[0][-1]].dst for g in good],
        [g[2] for g in good],
        [g[3] for g in good],
    )
    history = list(state.alpha_history)
    if sq_lt(alpha_sq, state.alpha_sq):
        history.append((k_prev + 1, str(sq_value(alpha_sq))))
    return SearchState(state.p, k_prev + 1, alpha_sq, beta_sq, new, gen, history)


# stopping condition ------------------------------------------------------------------

def choose_t(k: int) -> tuple[int, int]:
    """``t ~ sqrt(k)`` and ``m = k - 2t - 1``."""
    t = max(1, round(math.sqrt(k)))
    return t, k - 2 * t - 1


def stopping_check(state: SearchState, t: int, m: int) -> Optional[list[tuple[int, ...]]]:
    """Cycles forced on every long good path, or None if not yet forced.

    Uses the good paths of lengths ``m + 2t`` (previous generation) and
    ``m + 2t + 1`` (current generation): every middle segment of length ``m``
    must have exactly one forward extension among the middle segments of
    length ``m + 1``.
    """
    if m < 1 or t < 1 or state.good_prev is None or state.k != m + 2 * t + 1:
        return None
    A = {q[t : t + m] for q in state.good_prev.paths}
    B = {q[t : t + m + 1] for q in state.good.paths}
    if not A:
        return None
    succ: dict[tuple[int, ...], tuple[int, ...]] = {}
    for b in B:
        a = b[:m]
        if a in succ:
            return None
        succ[a] = b[1:]
    if len(succ) != len(A):
        return None
    cycles = set()
    done: set[tuple[int, ...]] = set()
    for a0 in sorted(A):
        if a0 in done:
            continue
        pos: dict[tuple[int, ...], int] = {}
        order = []
        a = a0
        while a not in pos and a not in done:
            pos[a] = len(order)
            order.append(a)
            a = succ.get(a)
            if a is None:
                return None
        if a in pos:
            cycles.add(canonical_cycle(tuple(seg[0] for seg in order[pos[a] :])))
        done.update(order)
    return sorted(cycles)


def canonical_cycle(edges: tuple[int, ...]) -> tuple[int, ...]:
    """Primitive period, rotated to its least form."""
    n = len(edges)
    for d in range(1, n + 1):
        if n % d == 0 and edges[:d] * (n // d) == edges:
            edges = edges[:d]
            break
    return min(edges[i:] + edges[:i] for i in range(len(edges)))


@dataclass
class Finalized:
    alpha_sq: Fraction
    beta_sq: Sq
    optimal: list[tuple[int, ...]]
    values: list[tuple[tuple[int, ...], Sq]]  # ascending, infinite last


def finalize(t: Transducer, cycles: Sequence[tuple[int, ...]], beta_sq: Sq) -> Finalized:
    if not cycles:
        raise EmptyCycleSet("no cycles")
    values = []
    for cyc in cycles:
        p = make_path(t, cyc)
        values.append((cyc, cycle_value_sq(word_runs(p.V), word_runs(p.W))))
    values.sort(key=lambda cv: (cv[1] is None, cv[1] or 0, cv[0]))
    finite = [v for _, v in values if v is not None]
    if not finite:
        raise EmptyCycleSet("every forced cycle has infinite value")
    alpha_sq = finite[0]
    second = next((v for v in finite if v > alpha_sq), None)
    if sq_lt(second, beta_sq):
        beta_sq = second
    optimal = [c for c, v in values if v == alpha_sq]
    return Finalized(alpha_sq, beta_sq, optimal, values)


# witnesses ----------------------------------------------------------------------------

def shortest_path(t: Transducer, target: int) -> list[int]:
    """Edge indices of a BFS-shortest path from the start node to ``target``."""
    prev: dict[int, Optional[int]] = {t.start: None}
    queue = deque([t.start])
    while queue:
        v = queue.popleft()
        if v == target:
            break
        for ei in t.out_edges[v]:
            w = t.edges[ei].dst
            if w not in prev:
                prev[w] = ei
                queue.append(w)
    if target not in prev:
        raise VerificationFailed(f"node {target} unreachable from start")
    path = []
    v = target
    while prev[v] is not None:
        ei = prev[v]
        path.append(ei)
        v = t.edges[ei].src
    return path[::-1]


def periodic_word_value(prefix: str, cycle: str) -> Surd:
    """Value of the infinite LR-word ``prefix + cycle^inf``."""
    a, b, c, d = word_matrix(cycle)
    # attracting fixed point of the cycle's map; b, c > 0 for mixed words
    x = positive_root(c, d - a, -b)
    return mobius_apply(word_matrix(prefix), x)


@dataclass
class Witness:
    cycle: tuple[int, ...]
    lead: tuple[int, ...]
    xi: Surd
    preperiod: tuple[int, ...]
    period: tuple[int, ...]
    p_preperiod: tuple[int, ...]
    p_period: tuple[int, ...]
    symmetry: str

    def to_json(self) -> dict:
        return {
            "cycle": list(self.cycle),
            "lead": list(self.lead),
            "xi": str(self.xi),
            "preperiod": list(self.preperiod),
            "period": list(self.period),
            "p_preperiod": list(self.p_preperiod),
            "p_period": list(self.p_period),
            "symmetry": self.symmetry,
        }


def witness(t: Transducer, cycle: tuple[int, ...], alpha: Surd) -> Witness:
    """Irrational ``xi`` whose walk reaches ``cycle`` and loops on it forever."""
    lead = shortest_path(t, t.edges[cycle[0]].src)
    pre, cyc = make_path(t, lead, t.start), make_path(t, cycle)
    xi = periodic_word_value(pre.V, cyc.V)
    pxi = periodic_word_value(pre.W, cyc.W)
    if pxi != xi * t.level:
        raise VerificationFailed(f"{pxi} != {t.level} * {xi}")
    cf_x, cf_px = surd_cf(xi), surd_cf(pxi)
    lam = max(lambda_periodic(cf_x.period), lambda_periodic(cf_px.period))
    if lam != alpha:
        raise VerificationFailed(f"lambda_p(xi) = {lam} != alpha = {alpha}")
    sym = classify_symmetry(cf_x.period, cf_px.period)
    return Witness(cycle, tuple(lead), xi, cf_x.terms, cf_x.period, cf_px.terms, cf_px.period, sym)


# reports ------------------------------------------------------------------------------

@dataclass
class ResultReport:
    p: int
    alpha: Surd
    beta: Value
    witnesses: list[Witness]
    k_stop: int
    t: int
    m: int
    cycle_values: list[tuple[tuple[int, ...], Value]] = field(default_factory=list)

    def to_json(self) -> dict:
        n, d = self.alpha.root_form()
        return {
            "p": self.p,
            "alpha": {"num_under_root": n, "denom": d},
            "alpha_text": str(self.alpha),
            "alpha_decimal": self.alpha.decimal_str(15),
            "beta": str(self.beta),
            "beta_decimal": None if self.beta is INF else self.beta.decimal_str(15),
            "k_stop": self.k_stop,
            "t": self.t,
            "m": self.m,
            "cycles": [{"cycle": list(c), "value": str(v)} for c, v in self.cycle_values],
            "witnesses": [w.to_json() for w in self.witnesses],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2) + "\n"


@dataclass
class NotTerminated:
    k_max: int
    state: SearchState

    def to_json(self) -> dict:
        return {
            "p": self.state.p,
            "status": "not-terminated",
            "k_max": self.k_max,
            "k": self.state.k,
            "alpha": str(self.state.alpha),
            "beta": str(self.state.beta),
            "good_paths": len(self.state.good),
        }


# checkpoints --------------------------------------------------------------------------

def transducer_digest(t: Transducer) -> str:
    return hashlib.sha256(t.to_json().encode()).hexdigest()


def _sq_json(x: Sq):
    return None if x is None else [x.numerator, x.denominator]


def _sq_load(x) -> Sq:
    return None if x is None else Fraction(int(x[0]), int(x[1]))


def save_checkpoint(state: SearchState, t: Transducer, path: str) -> None:
    """Write the state as JSON; the file is replaced atomically."""
    data = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "p": state.p,
        "k": state.k,
        "transducer_sha256": transducer_digest(t),
        "alpha_sq": _sq_json(state.alpha_sq),
        "beta_sq": _sq_json(state.beta_sq),
        "alpha_history": [list(h) for h in state.alpha_history],
        "good": [list(q) for q in state.good.paths] if state.k else None,
        "good_prev": [list(q) for q in state.good_prev.paths] if state.k > 1 else None,
    }
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        json.dump(data, fh, separators=(",", ":"))
    os.replace(tmp, path)


def load_checkpoint(path: str, t: Transducer) -> SearchState:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CorruptCheckpoint(f"{path}: {exc}") from exc
    if not isinstance(data, dict) or data.get("format") != CHECKPOINT_FORMAT:
        raise CorruptCheckpoint(f"{path}: not a checkpoint")
    if data.get("version") != CHECKPOINT_VERSION:
        raise CorruptCheckpoint(f"{path}: unsupported version {data.get('version')}")
    if data.get("p") != t.level or data.get("transducer_sha256") != transducer_digest(t):
        raise CorruptCheckpoint(f"{path}: written for a different transducer")
    ctx = Context(t)
    try:
        k = int(data["k"])
        if k == 0:
            state = initial_state(t)
        else:
            good = ctx.generation([tuple(q) for q in data["good"]])
            if k == 1:
                prev = initial_state(t).good
            else:
                prev = ctx.generation([tuple(q) for q in data["good_prev"]])
            state = SearchState(t.level, k, _sq_load(data["alpha_sq"]), _sq_load(data["beta_sq"]), good, prev)
        state.alpha_history = [(int(a), str(b)) for a, b in data["alpha_history"]]
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise CorruptCheckpoint(f"{path}: {exc}") from exc
    return state


# driver ---------------------------------------------------------------------------------

def min_lagrange(
    p: int,
    k_max: int = 400,
    threads: int = 1,
    state: Optional[SearchState] = None,
    transducer: Optional[Transducer] = None,
    progress: Optional[Callable[[SearchState], None]] = None,
    t_rule: Callable[[int], tuple[int, int]] = choose_t,
):
    """Run the search until the stopping condition holds or ``k_max`` is hit.

    Returns a :class:`ResultReport` or :class:`NotTerminated`.
    """
    if not is_prime(p):
        raise NotPrime(p)
    t = transducer or build_fast(p)
    ctx = Context(t)
    state = state or initial_state(t)
    while state.k < k_max:
        state = iterate(ctx, state, threads)
        tt, m = t_rule(state.k)
        log.info("p=%d k=%d good=%d alpha=%s beta=%s", p, state.k, len(state.good), state.alpha, state.beta)
        if progress:
            progress(state)
        cycles = stopping_check(state, tt, m)
        if cycles is None:
            continue
        fin = finalize(t, cycles, state.beta_sq)
        if fin.beta_sq is None:
            continue
        if sq_lt(state.alpha_sq, fin.alpha_sq):
            raise VerificationFailed(f"forced cycles miss the search value {state.alpha}")
        if not sq_lt(fin.alpha_sq, fin.beta_sq):
            raise VerificationFailed("beta does not exceed alpha")
        alpha = Surd.sqrt_of(fin.alpha_sq)
        wits = [witness(t, c, alpha) for c in fin.optimal]
        vals = [(c, sq_value(v)) for c, v in fin.values]
        return ResultReport(p, alpha, Surd.sqrt_of(fin.beta_sq), wits, state.k, tt, m, vals)
    return NotTerminated(k_max, state)
