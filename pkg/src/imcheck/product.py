"""Product of an interval chain with a Rabin automaton.

The product runs the automaton alongside the chain: a transition from
<q_j, s> lands in <q_l, s'> with the original interval of q_j -> q_l exactly
when s' is the automaton's move on the *destination* label L(q_l); every
other automaton component gets the zero interval.  Rabin pair sets become
atomic propositions over product states.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .automata import RabinAutomaton
from .errors import ValidationError
from .model import Imc, serialize_imc_json
from .search import realizable_successors


def pstate_name(q: str, s: str) -> str:
    return f"<{q},{s}>"


@dataclass(frozen=True)
class ProductImc:
    """Interval chain over Q x S with acceptance-derived labels.

    e_members / f_members are (N, k) booleans: product state i carries the
    E_j / F_j label iff its automaton component belongs to that pair set.
    ``reachable`` marks states reachable from any <Q_i, s0> along realizable
    edges; searches and value iteration default to that subset.
    """

    pstates: tuple[tuple[str, str], ...]
    lower: np.ndarray
    upper: np.ndarray
    pair_count: int
    e_members: np.ndarray
    f_members: np.ndarray
    initial_of: dict[str, int]
    reachable: np.ndarray
    model_state_of: tuple[str, ...] = field(default=())

    def __post_init__(self):
        n = len(self.pstates)
        for name in ("lower", "upper", "e_members", "f_members", "reachable"):
            a = np.asarray(getattr(self, name))
            a.setflags(write=False)
            object.__setattr__(self, name, a)
        if self.lower.shape != (n, n) or self.upper.shape != (n, n):
            raise ValidationError("product bound matrices do not match the state count")
        if self.e_members.shape != (n, self.pair_count) or self.f_members.shape != (n, self.pair_count):
            raise ValidationError("pair membership arrays do not match the state count")
        if not self.model_state_of:
            object.__setattr__(self, "model_state_of", tuple(q for q, _ in self.pstates))

    @property
    def n(self) -> int:
        return len(self.pstates)

    # Imc-compatible views, so validate_imc and serializers work unchanged
    @property
    def states(self) -> tuple[str, ...]:
        return tuple(pstate_name(q, s) for q, s in self.pstates)

    @property
    def props(self) -> frozenset[str]:
        return frozenset(self.acc_props)

    @property
    def acc_props(self) -> tuple[str, ...]:
        k = self.pair_count
        return tuple(f"E{i+1}" for i in range(k)) + tuple(f"F{i+1}" for i in range(k))

    @property
    def labels(self) -> tuple[frozenset[str], ...]:
        out = []
        for v in range(self.n):
            lab = {f"E{i+1}" for i in range(self.pair_count) if self.e_members[v, i]}
            lab |= {f"F{i+1}" for i in range(self.pair_count) if self.f_members[v, i]}
            out.append(frozenset(lab))
        return tuple(out)

    def as_imc(self) -> Imc:
        return Imc(self.states, self.lower, self.upper, self.props, self.labels)

    def project(self, indices) -> frozenset[str]:
        """Model states touched by a set of product-state indices."""
        return frozenset(self.pstates[int(v)][0] for v in indices)


def build_product(m: Imc, a: RabinAutomaton) -> ProductImc:
    """Construct the full Q x S product and mark its reachable part."""
    if set(a.props) != set(m.props):
        raise ValidationError(
            f"prop mismatch: model has {sorted(m.props)}, automaton has {sorted(a.props)}")
    nq, ns = m.n, a.n
    n = nq * ns

    # automaton successor per destination model state (label-driven)
    dest_aut = np.empty((ns, nq), dtype=int)
    for l in range(nq):
        mask = a.letter_mask(m.labels[l])
        for s in range(ns):
            dest_aut[s, l] = a.delta[s, mask]

    lower = np.zeros((n, n))
    upper = np.zeros((n, n))
    for qj in range(nq):
        for s in range(ns):
            src = qj * ns + s
            for ql in range(nq):
                dst = ql * ns + dest_aut[s, ql]
                lower[src, dst] = m.lower[qj, ql]
                upper[src, dst] = m.upper[qj, ql]

    e_aut, f_aut = a.pair_member_arrays()
    e_members = np.tile(e_aut, (nq, 1))
    f_members = np.tile(f_aut, (nq, 1))

    s0 = a.index_of(a.initial)
    initial_of = {m.states[qj]: qj * ns + s0 for qj in range(nq)}

    succ = realizable_successors(lower, upper)
    reachable = np.zeros(n, dtype=bool)
    frontier = list(initial_of.values())
    for v in frontier:
        reachable[v] = True
    while frontier:
        v = frontier.pop()
        for w in succ[v]:
            if not reachable[w]:
                reachable[w] = True
                frontier.append(w)

    pstates = tuple((m.states[qj], a.aut_states[s]) for qj in range(nq) for s in range(ns))
    return ProductImc(pstates, lower, upper, len(a.pairs), e_members, f_members,
                      initial_of, reachable)


def dump_product_json(p: ProductImc) -> dict:
    """Debug dump: the product in IMC-JSON form plus product-only metadata."""
    doc = json.loads(serialize_imc_json(p.as_imc()))
    doc["initial_of"] = {q: int(i) for q, i in sorted(p.initial_of.items())}
    doc["reachable"] = [p.states[i] for i in np.flatnonzero(p.reachable)]
    return doc
