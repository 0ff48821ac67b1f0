"""Extremal reachability probabilities in an interval chain.

Value iteration with order-based extremal distributions: per state and sweep,
successors are ranked by current value and the free mass (1 minus the row's
lower-bound sum) is poured greedily into the best (maximize) or worst
(minimize) successors up to their upper bounds.  Iterates start at the target
indicator and climb monotonically from below.

Two graph precomputations keep qualitative answers exact in maximize mode:
states with no realizable path to the target are pinned to 0, and states from
which some adversary reaches the target almost surely are pinned to 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .search import realizable_successors

MAXIMIZE = "maximize"
MINIMIZE = "minimize"


@dataclass(frozen=True)
class ReachQuery:
    """Reachability question over a product or plain interval chain.

    ``chain`` needs lower/upper matrices; a ``reachable`` mask, when present,
    restricts the computation to that state set.  ``target`` holds state
    indices.
    """

    chain: object
    target: frozenset[int]
    mode: str = MAXIMIZE
    epsilon: float = 1e-6
    max_iters: int = 100_000
    restrict: frozenset[int] | None = None
    keep_history: bool = False

    def __post_init__(self):
        if self.mode not in (MAXIMIZE, MINIMIZE):
            raise ValidationError(f"mode must be maximize or minimize, got {self.mode!r}")
        if not self.epsilon > 0.0:
            raise ValidationError("epsilon must be positive")
        if self.max_iters < 1:
            raise ValidationError("max_iters must be positive")
        object.__setattr__(self, "target", frozenset(int(t) for t in self.target))

    def vertices(self) -> frozenset[int]:
        if self.restrict is not None:
            return self.restrict
        reachable = getattr(self.chain, "reachable", None)
        if reachable is not None:
            return frozenset(np.flatnonzero(reachable).tolist())
        return frozenset(range(len(np.asarray(self.chain.lower))))


@dataclass(frozen=True)
class ReachResult:
    values: np.ndarray
    iterations: int
    residual: float
    converged: bool
    zero_states: frozenset[int]
    one_states: frozenset[int]
    history: tuple[np.ndarray, ...] | None = field(default=None, compare=False)

    def value_of(self, idx: int) -> float:
        return float(self.values[idx])


def qualitative_zero_states(chain, target, vertices=None) -> frozenset[int]:
    """States with no realizable path to the target; value exactly 0."""
    lower, upper = np.asarray(chain.lower), np.asarray(chain.upper)
    if vertices is None:
        vertices = range(lower.shape[0])
    vertices = set(int(v) for v in vertices)
    succ = realizable_successors(lower, upper)
    # backward closure from the target along realizable edges
    pred: dict[int, list[int]] = {v: [] for v in vertices}
    for v in vertices:
        for w in succ[v]:
            if w in vertices:
                pred[w].append(v)
    can_reach = set(int(t) for t in target) & vertices
    frontier = list(can_reach)
    while frontier:
        w = frontier.pop()
        for v in pred[w]:
            if v not in can_reach:
                can_reach.add(v)
                frontier.append(v)
    return frozenset(vertices - can_reach)


def qualitative_one_states(chain, target, vertices=None) -> frozenset[int]:
    """States from which some adversary reaches the target almost surely.

    Greatest fixpoint: keep the largest X such that every state of X has an
    interval-consistent distribution supported inside X with positive mass
    toward the target-attractor computed within X.  Values of these states
    are exactly 1 in maximize mode, which is what makes graph-level zeros
    (via 1 - value) exact in the bound pipelines.
    """
    lower, upper = np.asarray(chain.lower), np.asarray(chain.upper)
    if vertices is None:
        vertices = range(lower.shape[0])
    target = set(int(t) for t in target) & set(int(v) for v in vertices)
    x = set(int(v) for v in vertices)
    forced = [np.flatnonzero(lower[v] > 0.0).tolist() for v in range(lower.shape[0])]
    residual_pos = [math.fsum(lower[v]) < 1.0 for v in range(lower.shape[0])]

    while True:
        y = set(target)
        changed = True
        while changed:
            changed = False
            for v in sorted(x - y):
                if any(w not in x for w in forced[v]):
                    continue
                x_list = sorted(x)
                if math.fsum(upper[v][x_list]) < 1.0:
                    continue
                progress = any(
                    lower[v, u] > 0.0 or (upper[v, u] > 0.0 and residual_pos[v])
                    for u in y)
                if progress:
                    y.add(v)
                    changed = True
        if y == x:
            return frozenset(x)
        x = y


def extremal_distribution(lows, highs, values, mode=MAXIMIZE) -> np.ndarray:
    """Vertex of the interval polytope optimizing the expected successor value.

    Successors are sorted by value (descending for maximize, ascending for
    minimize, ties by index), every successor starts at its lower bound, and
    the free mass 1 - sum(lows) is poured in sorted order up to each upper
    bound.  Fully-filled entries are set to their bound exactly and the one
    partially-filled entry absorbs the remaining mass, so the result passes
    exact bound checks and sums to 1.
    """
    lows = np.asarray(lows, dtype=float)
    highs = np.asarray(highs, dtype=float)
    values = np.asarray(values, dtype=float)
    if lows.shape != highs.shape or lows.shape != values.shape:
        raise ValidationError("lows, highs, and values must have equal length")
    if (lows > highs).any():
        raise ValidationError("infeasible bounds: some lower bound exceeds its upper bound")
    low_sum = math.fsum(lows)
    if low_sum > 1.0 or math.fsum(highs) < 1.0:
        raise ValidationError(
            f"infeasible bounds: lower sum {low_sum}, upper sum {math.fsum(highs)}")

    sign = -1.0 if mode == MAXIMIZE else 1.0
    order = sorted(range(len(values)), key=lambda i: (sign * values[i], i))
    d = lows.copy()
    residual = 1.0 - low_sum
    partial = None
    for i in order:
        if residual <= 0.0:
            break
        room = highs[i] - lows[i]
        if room <= 0.0:
            continue
        if residual >= room:
            d[i] = highs[i]
            residual -= room
        else:
            d[i] = lows[i] + residual
            partial = i
            residual = 0.0
    if partial is not None:
        # absorb float dust so the row sums to 1 exactly
        others = math.fsum(d[j] for j in range(len(d)) if j != partial)
        d[partial] = min(max(1.0 - others, lows[partial]), highs[partial])
    return d


def reach_probability(q: ReachQuery) -> ReachResult:
    """Jacobi value iteration for the extremal probability of reaching a set.

    Returns per-state values (monotone from below), the sweep count, the final
    sup-norm residual, and a convergence flag; non-convergence within
    max_iters is reported, not raised.
    """
    lower, upper = np.asarray(q.chain.lower), np.asarray(q.chain.upper)
    n = lower.shape[0]
    vertices = q.vertices()
    target = q.target & vertices

    zero: frozenset[int] = frozenset()
    one: frozenset[int] = frozenset()
    if q.mode == MAXIMIZE:
        zero = qualitative_zero_states(q.chain, target, vertices)
        one = qualitative_one_states(q.chain, target, vertices)

    v = np.zeros(n)
    for t in q.target:
        v[t] = 1.0  # a target state counts as reached even outside the restriction
    for t in one:
        v[t] = 1.0

    sweep = sorted(vertices - target - zero - one)
    rows = []
    for s in sweep:
        succ = np.flatnonzero(upper[s] > 0.0)
        rows.append((s, succ, lower[s, succ].copy(), upper[s, succ].copy()))

    history: list[np.ndarray] | None = [v.copy()] if q.keep_history else None
    iterations = 0
    residual = 0.0
    converged = True
    if sweep:
        converged = False
        for iterations in range(1, q.max_iters + 1):
            new = v.copy()
            for s, succ, lo, hi in rows:
                vals = v[succ]
                d = extremal_distribution(lo, hi, vals, q.mode)
                new[s] = float(np.dot(d, vals))
            # monotone from below and bounded, by construction
            np.maximum(new, v, out=new)
            np.minimum(new, 1.0, out=new)
            residual = float(np.max(np.abs(new - v)))
            v = new
            if history is not None:
                history.append(v.copy())
            if residual < q.epsilon:
                converged = True
                break

    v.setflags(write=False)
    return ReachResult(v, iterations, residual, converged, zero, one,
                       tuple(history) if history is not None else None)
