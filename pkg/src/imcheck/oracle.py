"""Brute-force oracles the test suite checks the fast algorithms against.

The central one enumerates every on/off assignment of a product's optional
edges (lower bound 0, positive upper bound, and free row mass to fire),
keeps the assignments whose rows remain realizable, classifies the bottom
SCCs of each resulting support graph directly from the definitions, and
unions the classified states.  This is the exponential baseline the search
algorithm is supposed to match exactly.

Also here: exact reachability in a concrete chain by linear solve, and
memoryless vertex adversaries sampled from a product's interval polytopes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import ContractError, ValidationError
from .model import Mc
from .reachability import extremal_distribution
from .search import tarjan_scc

DEFAULT_EDGE_CAP = 14


# ---------------------------------------------------------------------------
# resolution enumeration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EdgeResolution:
    """One feasible on/off assignment: per-state support lists."""

    mask: int
    succ: tuple[tuple[int, ...], ...]


def optional_edges(p, vertices=None) -> list[tuple[int, int]]:
    """Edges an adversary can switch on or off: lower 0 < upper, row not pinned."""
    lower, upper = np.asarray(p.lower), np.asarray(p.upper)
    if vertices is None:
        vertices = np.flatnonzero(p.reachable)
    out = []
    for v in sorted(int(x) for x in vertices):
        if math.fsum(lower[v]) < 1.0:
            for w in np.flatnonzero((upper[v] > 0.0) & (lower[v] == 0.0)):
                out.append((v, int(w)))
    return out


def iter_resolutions(p, cap: int = DEFAULT_EDGE_CAP, vertices=None) -> Iterator[EdgeResolution]:
    """All feasible resolutions; raises when the optional-edge count exceeds cap."""
    lower, upper = np.asarray(p.lower), np.asarray(p.upper)
    if vertices is None:
        vertices = np.flatnonzero(p.reachable)
    vertices = sorted(int(x) for x in vertices)
    opt = optional_edges(p, vertices)
    if len(opt) > cap:
        raise ContractError(f"{len(opt)} optional edges exceed the enumeration cap {cap}")

    forced = {v: tuple(int(w) for w in np.flatnonzero(lower[v] > 0.0)) for v in vertices}
    by_row: dict[int, list[int]] = {}
    for bit, (v, _) in enumerate(opt):
        by_row.setdefault(v, []).append(bit)

    n = lower.shape[0]
    for mask in range(1 << len(opt)):
        succ: list[tuple[int, ...]] = [()] * n
        feasible = True
        for v in vertices:
            kept = list(forced[v])
            for bit in by_row.get(v, ()):
                if mask & (1 << bit):
                    kept.append(opt[bit][1])
            if math.fsum(upper[v][kept]) < 1.0:
                feasible = False
                break
            succ[v] = tuple(sorted(kept))
        if feasible:
            yield EdgeResolution(mask, tuple(succ))


def bottom_sccs(succ, vertices) -> list[frozenset[int]]:
    """Bottom SCCs of a support graph: strongly connected and closed."""
    vertices = set(int(v) for v in vertices)
    out = []
    for comp in tarjan_scc(succ, len(succ), vertices):
        closed = all(w in comp for v in comp for w in succ[v])
        has_edge = any(succ[v] for v in comp)
        if closed and has_edge:
            out.append(comp)
    return out


def classify_bsccs(p, succ, vertices) -> tuple[frozenset[int], frozenset[int]]:
    """(accepting states, non-accepting states) of one support graph."""
    acc: set[int] = set()
    non: set[int] = set()
    for b in bottom_sccs(succ, vertices):
        accepting = any(
            any(p.f_members[v, i] for v in b) and not any(p.e_members[v, i] for v in b)
            for i in range(p.pair_count))
        (acc if accepting else non).update(b)
    return frozenset(acc), frozenset(non)


def enumerate_nonaccepting_union(p, cap: int = DEFAULT_EDGE_CAP, vertices=None) -> frozenset[int]:
    """Union over all feasible resolutions of non-accepting BSCC states."""
    if vertices is None:
        vertices = np.flatnonzero(p.reachable)
    vertices = sorted(int(x) for x in vertices)
    union: set[int] = set()
    for res in iter_resolutions(p, cap, vertices):
        _, non = classify_bsccs(p, res.succ, vertices)
        union |= non
    return frozenset(union)


def enumerate_accepting_union(p, cap: int = DEFAULT_EDGE_CAP, vertices=None) -> frozenset[int]:
    """Union over all feasible resolutions of accepting BSCC states."""
    if vertices is None:
        vertices = np.flatnonzero(p.reachable)
    vertices = sorted(int(x) for x in vertices)
    union: set[int] = set()
    for res in iter_resolutions(p, cap, vertices):
        acc, _ = classify_bsccs(p, res.succ, vertices)
        union |= acc
    return frozenset(union)


# ---------------------------------------------------------------------------
# exact reachability in a concrete chain
# ---------------------------------------------------------------------------


def reach_exact_values(trans: np.ndarray, target) -> np.ndarray:
    """Hitting probabilities of ``target`` by direct linear solve.

    States with no support path to the target get exactly 0; the rest solve
    (I - Q) x = r on the transient block.  A singular block means a recurrent
    class was left in the system, which the zero-state removal precludes up
    to numerical pathology; that case raises.
    """
    trans = np.asarray(trans, dtype=float)
    n = trans.shape[0]
    target = sorted(int(t) for t in target)
    in_target = np.zeros(n, dtype=bool)
    in_target[target] = True

    succ = [np.flatnonzero(trans[v] > 0.0).tolist() for v in range(n)]
    can_reach = set(target)
    pred: dict[int, list[int]] = {v: [] for v in range(n)}
    for v in range(n):
        for w in succ[v]:
            pred[w].append(v)
    frontier = list(target)
    while frontier:
        w = frontier.pop()
        for v in pred[w]:
            if v not in can_reach:
                can_reach.add(v)
                frontier.append(v)

    values = np.zeros(n)
    values[target] = 1.0
    rest = [v for v in range(n) if not in_target[v] and v in can_reach]
    if rest:
        q = trans[np.ix_(rest, rest)]
        r = trans[np.ix_(rest, target)].sum(axis=1)
        try:
            x = np.linalg.solve(np.eye(len(rest)) - q, r)
        except np.linalg.LinAlgError as exc:
            raise ValidationError(f"singular reachability system: {exc}") from None
        values[rest] = x
    return values


def mc_reach_exact(mc: Mc, target) -> dict[str, float]:
    """Per-state hitting probability of a set of state ids in a concrete chain."""
    idx = {q: i for i, q in enumerate(mc.states)}
    target_idx = []
    for q in target:
        if q not in idx:
            raise ValidationError(f"unknown state {q!r}")
        target_idx.append(idx[q])
    values = reach_exact_values(mc.trans, target_idx)
    return {q: float(values[i]) for i, q in enumerate(mc.states)}


# ---------------------------------------------------------------------------
# sampled adversaries
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VertexAdversary:
    """Memoryless adversary: per state, one row distribution within bounds."""

    rows: np.ndarray

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=float)
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)

    def induced(self, chain) -> Mc:
        view = chain.as_imc() if hasattr(chain, "as_imc") else chain
        return Mc(view.states, self.rows, view.props, view.labels)


def sample_vertex_adversary(p, seed: int) -> Mc:
    """Induced product chain for a random memoryless vertex adversary.

    Per state, successors get random priorities and the extremal vertex for
    that ordering is emitted, so every row is a polytope vertex within bounds.
    Point-interval rows are reproduced exactly regardless of seed.
    """
    rng = np.random.default_rng(seed)
    lower, upper = np.asarray(p.lower), np.asarray(p.upper)
    n = lower.shape[0]
    rows = np.zeros((n, n))
    for v in range(n):
        succ = np.flatnonzero(upper[v] > 0.0)
        priorities = rng.random(len(succ))
        rows[v, succ] = extremal_distribution(lower[v, succ], upper[v, succ], priorities)
    return VertexAdversary(rows).induced(p)


def simulate_path(mc: Mc, start: int, steps: int, seed: int) -> list[int]:
    """One trajectory of ``steps`` transitions, as state indices."""
    rng = np.random.default_rng(seed)
    cum = np.cumsum(np.asarray(mc.trans), axis=1)
    path = [int(start)]
    v = int(start)
    for _ in range(steps):
        v = int(np.searchsorted(cum[v], rng.random(), side="right"))
        v = min(v, mc.n - 1)
        path.append(v)
    return path
