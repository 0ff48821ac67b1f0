"""End-to-end bound computation for omega-regular properties.

The lower bound always comes from the largest non-accepting set: build the
product, find that set, maximize the probability of reaching it, and report
one minus the value at each <Q_i, s0>.  The upper bound has two routes: for a
single Rabin pair, maximize reachability of the largest accepting set; for
more pairs, run the lower-bound machinery on a user-supplied automaton for
the complemented property.

Reachability always runs on the original product intervals with the target
set pinned to value 1; no refined worst-case product is materialized, since
transitions outside the target set are unchanged in it anyway.
"""

from __future__ import annotations

from dataclasses import dataclass

from .automata import RabinAutomaton, pair_count
from .errors import ComplementRequiredError, ContractError
from .model import Imc
from .product import ProductImc, build_product
from .reachability import MAXIMIZE, ReachQuery, reach_probability
from .search import ClassifiedSets, find_largest_accepting_single_pair, find_largest_nonaccepting

ROUTE_SINGLE_PAIR = "single-pair"
ROUTE_COMPLEMENT = "complement"


@dataclass(frozen=True)
class BoundResult:
    """Per-state [lower, upper] satisfaction bounds with run metadata."""

    states: tuple[str, ...]
    lower: dict[str, float]
    upper: dict[str, float]
    meta: dict

    def __post_init__(self):
        slack = 2.0 * self.meta.get("epsilon", 0.0) + 1e-12
        for q in self.states:
            lo, hi = self.lower[q], self.upper[q]
            if not (-slack <= lo <= 1.0 + slack and -slack <= hi <= 1.0 + slack and lo <= hi + slack):
                raise ContractError(f"inconsistent bounds for {q}: [{lo}, {hi}]")

    def as_dict(self) -> dict:
        return {
            "per_state": [
                {"state": q, "lower": self.lower[q], "upper": self.upper[q]}
                for q in self.states
            ],
            "meta": self.meta,
        }


def _max_reach_to(p: ProductImc, target: frozenset[int], eps: float, max_iters: int):
    query = ReachQuery(p, target, MAXIMIZE, eps, max_iters)
    return reach_probability(query)


def lower_bounds(m: Imc, a: RabinAutomaton, eps: float = 1e-6,
                 max_iters: int = 100_000) -> dict[str, float]:
    """Greatest lower bound per state: 1 - max reach of the non-accepting set."""
    values, _, _ = _lower_bounds_detail(m, a, eps, max_iters)
    return values


def _lower_bounds_detail(m, a, eps, max_iters):
    p = build_product(m, a)
    sets = find_largest_nonaccepting(p)
    res = _max_reach_to(p, sets.non_accepting, eps, max_iters)
    out = {q: 1.0 - res.value_of(i) for q, i in p.initial_of.items()}
    return out, sets, res


def upper_bounds_single_pair(m: Imc, a: RabinAutomaton, eps: float = 1e-6,
                             max_iters: int = 100_000) -> dict[str, float]:
    """Least upper bound per state via the largest accepting set (one pair)."""
    values, _, _ = _upper_single_detail(m, a, eps, max_iters)
    return values


def _upper_single_detail(m, a, eps, max_iters):
    if pair_count(a) != 1:
        raise ContractError(
            f"single-pair upper bound needs one Rabin pair, got {pair_count(a)}; "
            "supply a complement automaton instead")
    p = build_product(m, a)
    sets = find_largest_accepting_single_pair(p)
    res = _max_reach_to(p, sets.accepting, eps, max_iters)
    out = {q: res.value_of(i) for q, i in p.initial_of.items()}
    return out, sets, res


def upper_bounds_via_complement(m: Imc, a_comp: RabinAutomaton, eps: float = 1e-6,
                                max_iters: int = 100_000) -> dict[str, float]:
    """Least upper bound per state: max reach of the complement product's
    non-accepting set.  ``a_comp`` is trusted to denote the negated property."""
    values, _, _ = _upper_complement_detail(m, a_comp, eps, max_iters)
    return values


def _upper_complement_detail(m, a_comp, eps, max_iters):
    p = build_product(m, a_comp)
    sets = find_largest_nonaccepting(p)
    res = _max_reach_to(p, sets.non_accepting, eps, max_iters)
    out = {q: res.value_of(i) for q, i in p.initial_of.items()}
    return out, sets, res


def verify(m: Imc, a: RabinAutomaton, a_comp: RabinAutomaton | None = None,
           eps: float = 1e-6, max_iters: int = 100_000) -> BoundResult:
    """Lower and upper satisfaction bounds for every initial state.

    The upper route is picked by pair count: one pair uses the accepting-set
    search, otherwise a complement automaton is required.
    """
    k = pair_count(a)
    lower, n_sets, n_res = _lower_bounds_detail(m, a, eps, max_iters)

    if k == 1:
        route = ROUTE_SINGLE_PAIR
        upper, a_sets, u_res = _upper_single_detail(m, a, eps, max_iters)
        upper_set_size = len(a_sets.accepting)
    else:
        if a_comp is None:
            raise ComplementRequiredError(
                f"automaton has {k} Rabin pairs: complement automaton required "
                "for the upper bound")
        route = ROUTE_COMPLEMENT
        upper, c_sets, u_res = _upper_complement_detail(m, a_comp, eps, max_iters)
        upper_set_size = len(c_sets.non_accepting)

    meta = {
        "route": route,
        "pair_count": k,
        "nonaccepting_set_size": len(n_sets.non_accepting),
        "upper_target_set_size": upper_set_size,
        "lower_iterations": n_res.iterations,
        "upper_iterations": u_res.iterations,
        "lower_residual": n_res.residual,
        "upper_residual": u_res.residual,
        "converged": bool(n_res.converged and u_res.converged),
        "epsilon": eps,
        "max_iters": max_iters,
    }
    if route == ROUTE_COMPLEMENT:
        meta["complement_assumed"] = (
            "the supplied complement automaton is assumed to denote the negated property")
    return BoundResult(tuple(m.states), lower, upper, meta)


def classified_sets_dump(m: Imc, a: RabinAutomaton,
                         a_comp: RabinAutomaton | None = None) -> dict:
    """JSON-ready dump of the searched sets with witnesses (--dump-sets)."""
    p = build_product(m, a)
    doc = {"nonaccepting": _sets_doc(p, find_largest_nonaccepting(p))}
    if pair_count(a) == 1:
        doc["accepting"] = _sets_doc(p, find_largest_accepting_single_pair(p))
    if a_comp is not None:
        pc = build_product(m, a_comp)
        doc["complement_nonaccepting"] = _sets_doc(pc, find_largest_nonaccepting(pc))
    return doc


def _sets_doc(p: ProductImc, sets: ClassifiedSets) -> dict:
    union = sets.non_accepting if sets.non_accepting is not None else sets.accepting
    return {
        "states": sorted(p.states[i] for i in union),
        "projected_model_states": sorted(p.project(union)),
        "witnesses": [
            {
                "members": sorted(p.states[i] for i in w.members),
                "kind": w.kind,
                "pair": None if w.pair is None else w.pair + 1,
                "matched_pairs": [i + 1 for i in w.matched_pairs],
            }
            for w in sets.witnesses
        ],
    }
