"""Graph search for the largest non-accepting / accepting state sets.

The candidate graph has an edge (u, v) whenever the interval upper bound is
positive AND the edge can actually carry probability mass in some induced
chain.  The second condition matters for rows whose lower bounds already sum
to 1: such a row is pinned to its lower bounds, so its optional edges
(lower 0 < upper) can never fire and must not contribute graph structure.

A candidate set keeps shrinking through two eliminations until it is a
closed, strongly connected block (a BSCC of some induced chain):

  * leaky states: forced (lower > 0) to transition outside the surviving
    candidate, or unable to concentrate upper mass 1 inside it;
  * acceptance repairs: states whose pair labels contradict the class being
    searched for (unmatched F-labels for the non-accepting search, E-labels
    for the single-pair accepting search).
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import ContractError


def realizable_successors(lower: np.ndarray, upper: np.ndarray) -> list[list[int]]:
    """Per-row successor lists restricted to edges that can carry mass."""
    lower = np.asarray(lower)
    upper = np.asarray(upper)
    out = []
    for j in range(lower.shape[0]):
        if math.fsum(lower[j]) < 1.0:
            out.append(np.flatnonzero(upper[j] > 0.0).tolist())
        else:
            out.append(np.flatnonzero(lower[j] > 0.0).tolist())
    return out


@dataclass(frozen=True)
class EdgeGraph:
    """Realizable-edge view of a product: successor and forced-successor lists."""

    n: int
    succ: tuple[tuple[int, ...], ...]
    forced: tuple[tuple[int, ...], ...]

    @classmethod
    def from_product(cls, p) -> "EdgeGraph":
        succ = realizable_successors(p.lower, p.upper)
        forced = [np.flatnonzero(np.asarray(p.lower)[j] > 0.0).tolist() for j in range(p.n)]
        return cls(p.n, tuple(tuple(s) for s in succ), tuple(tuple(f) for f in forced))


def strongly_connected_components(g: EdgeGraph, restrict=None) -> list[frozenset[int]]:
    """Tarjan's algorithm, iterative, restricted to ``restrict`` when given.

    Singleton components without a self-edge are returned too; callers filter.
    """
    return tarjan_scc(g.succ, g.n, restrict)


def tarjan_scc(succ, n: int, restrict=None) -> list[frozenset[int]]:
    """Strongly connected components of an adjacency-list graph."""
    if restrict is None:
        vertices = range(n)
        allowed = None
    else:
        vertices = sorted(restrict)
        allowed = set(restrict)

    index: dict[int, int] = {}
    lowlink: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    counter = 0
    sccs: list[frozenset[int]] = []

    for root in vertices:
        if root in index:
            continue
        # (vertex, successor iterator position) frames
        work = [(root, 0)]
        while work:
            v, i = work[-1]
            if i == 0:
                index[v] = lowlink[v] = counter
                counter += 1
                stack.append(v)
                on_stack.add(v)
            advanced = False
            succs = succ[v]
            while i < len(succs):
                w = succs[i]
                i += 1
                if allowed is not None and w not in allowed:
                    continue
                if w not in index:
                    work[-1] = (v, i)
                    work.append((w, 0))
                    advanced = True
                    break
                if w in on_stack:
                    lowlink[v] = min(lowlink[v], index[w])
            if advanced:
                continue
            work.pop()
            if lowlink[v] == index[v]:
                comp = set()
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.add(w)
                    if w == v:
                        break
                sccs.append(frozenset(comp))
            if work:
                u, _ = work[-1]
                lowlink[u] = min(lowlink[u], lowlink[v])
    return sccs


def find_leaky(candidate, p, seeds=frozenset()) -> frozenset[int]:
    """Least fixpoint of the leaky conditions within ``candidate``.

    A state is leaky when some positive lower bound leads outside the
    surviving (non-leaky) part of the candidate, or when the upper bounds
    into the surviving part sum below 1.  ``seeds`` are pre-marked leaky,
    which is how acceptance repairs reuse the same elimination.
    """
    candidate = set(candidate)
    alive = candidate - set(seeds)
    lower = np.asarray(p.lower)
    upper = np.asarray(p.upper)
    changed = True
    while changed:
        changed = False
        for v in sorted(alive):
            forced_out = any(w not in alive for w in np.flatnonzero(lower[v] > 0.0))
            if forced_out or math.fsum(upper[v][sorted(alive)]) < 1.0:
                alive.discard(v)
                changed = True
    return frozenset(candidate - alive)


@dataclass(frozen=True)
class Witness:
    """One retained BSCC with the reason it was classified."""

    members: frozenset[int]
    kind: str                       # "non_accepting" | "accepting"
    pair: int | None                # justifying pair for accepting BSCCs
    matched_pairs: tuple[int, ...]  # F-pairs present and E-matched (non-accepting)


@dataclass(frozen=True)
class ClassifiedSets:
    """Result of a largest-set search over a product."""

    non_accepting: frozenset[int] | None
    accepting: frozenset[int] | None
    witnesses: tuple[Witness, ...]


def _sorted_components(g, restrict) -> list[frozenset[int]]:
    comps = strongly_connected_components(g, restrict)
    return sorted(comps, key=min)


def _run_worklist(p, vertices, classify) -> list[Witness]:
    """Shared elimination loop; ``classify`` retains or repairs leak-free blocks."""
    g = EdgeGraph.from_product(p)
    self_loop = {v for v in range(p.n) if v in g.succ[v]}
    work = deque(_sorted_components(g, vertices))
    retained: list[Witness] = []
    while work:
        c = work.popleft()
        if len(c) == 1 and next(iter(c)) not in self_loop:
            continue
        leaky = find_leaky(c, p)
        if not leaky:
            witness, seeds = classify(c)
            if witness is not None:
                retained.append(witness)
                continue
            if seeds is None:
                continue  # discarded for good
            leaky = find_leaky(c, p, seeds=seeds)
        residual = c - leaky
        if residual:
            work.extend(_sorted_components(g, residual))
    return retained


def _f_pairs_present(p, c) -> list[int]:
    return [i for i in range(p.pair_count) if any(p.f_members[v, i] for v in c)]


def find_largest_nonaccepting(p, vertices=None) -> ClassifiedSets:
    """Largest set of states belonging to non-accepting BSCCs of induced chains.

    A leak-free block is non-accepting when every Rabin pair with an F-label
    present also has an E-label present.  Unmatched F-labeled states can never
    sit in a non-accepting BSCC, so they are eliminated like leaky states and
    the remainder is re-searched.
    """
    if vertices is None:
        vertices = np.flatnonzero(p.reachable)

    def classify(c):
        f_present = _f_pairs_present(p, c)
        unmatched = [i for i in f_present if not any(p.e_members[v, i] for v in c)]
        if not unmatched:
            return Witness(c, "non_accepting", None, tuple(f_present)), None
        seeds = {v for v in c for i in unmatched if p.f_members[v, i]}
        return None, seeds

    retained = _run_worklist(p, vertices, classify)
    union = frozenset().union(*(w.members for w in retained)) if retained else frozenset()
    return ClassifiedSets(union, None, tuple(retained))


def find_largest_accepting_single_pair(p, vertices=None) -> ClassifiedSets:
    """Largest accepting-state set; only defined for one Rabin pair.

    A leak-free block is accepting when it has an F-label and no E-label.
    E-labeled states are eliminated; a block with no F-label at all is
    discarded (nothing below it can be accepting either).
    """
    if p.pair_count != 1:
        raise ContractError(
            f"accepting-set search needs exactly one Rabin pair, got {p.pair_count}; "
            "use the complement route for multi-pair automata")
    if vertices is None:
        vertices = np.flatnonzero(p.reachable)

    def classify(c):
        e_states = {v for v in c if p.e_members[v, 0]}
        if e_states:
            return None, e_states
        if any(p.f_members[v, 0] for v in c):
            return Witness(c, "accepting", 0, ()), None
        return None, None

    retained = _run_worklist(p, vertices, classify)
    union = frozenset().union(*(w.members for w in retained)) if retained else frozenset()
    return ClassifiedSets(None, union, tuple(retained))
