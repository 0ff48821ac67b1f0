"""Interval-valued Markov chains and the concrete chains they induce.

An IMC assigns every edge a probability interval [lower, upper].  A row is
*feasible* when its lower bounds sum to at most 1 and its upper bounds to at
least 1, so at least one genuine distribution fits between the bounds.

Structural zeros matter: an edge is optional (can be switched on or off by an
adversary) exactly when its stored lower bound is 0.0 and its upper bound is
positive.  All interval comparisons are therefore exact comparisons on the
stored floats; only concrete-distribution row sums get a 1e-9 tolerance.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParseError, ValidationError

ROW_SUM_TOL = 1e-9


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Imc:
    """Interval-valued Markov chain over a finite state set.

    states:  state identifiers, in declaration order
    lower:   |Q| x |Q| lower transition bounds
    upper:   |Q| x |Q| upper transition bounds
    props:   atomic proposition names
    labels:  per-state subset of props, aligned with ``states``
    """

    states: tuple[str, ...]
    lower: np.ndarray
    upper: np.ndarray
    props: frozenset[str]
    labels: tuple[frozenset[str], ...]
    _index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = len(self.states)
        object.__setattr__(self, "lower", _freeze(self.lower))
        object.__setattr__(self, "upper", _freeze(self.upper))
        if self.lower.shape != (n, n) or self.upper.shape != (n, n):
            raise ValidationError(
                f"bound matrices must be {n}x{n}, got {self.lower.shape} and {self.upper.shape}"
            )
        if len(self.labels) != n:
            raise ValidationError("labels must cover every state")
        if len(set(self.states)) != n:
            raise ValidationError("duplicate state identifier")
        object.__setattr__(self, "_index", {q: i for i, q in enumerate(self.states)})

    @property
    def n(self) -> int:
        return len(self.states)

    def index_of(self, state: str) -> int:
        try:
            return self._index[state]
        except KeyError:
            raise ValidationError(f"unknown state {state!r}") from None


@dataclass(frozen=True)
class Mc:
    """Concrete Markov chain: one row-stochastic matrix instead of intervals."""

    states: tuple[str, ...]
    trans: np.ndarray
    props: frozenset[str]
    labels: tuple[frozenset[str], ...]

    def __post_init__(self):
        object.__setattr__(self, "trans", _freeze(self.trans))

    @property
    def n(self) -> int:
        return len(self.states)


def validate_imc(m) -> list[str]:
    """Check every IMC invariant; return one message per violation.

    Accepts anything exposing states/lower/upper/props/labels, so product
    chains can be validated with the same code.  An empty list means valid.
    """
    out: list[str] = []
    states = m.states
    lower, upper = np.asarray(m.lower), np.asarray(m.upper)
    for j, qj in enumerate(states):
        for k, ql in enumerate(states):
            lo, hi = lower[j, k], upper[j, k]
            if not (0.0 <= lo <= 1.0) or not (0.0 <= hi <= 1.0):
                out.append(f"probability out of range at ({qj},{ql}): [{lo},{hi}]")
            elif lo > hi:
                out.append(f"interval inverted at ({qj},{ql}): lower={lo} > upper={hi}")
        lo_sum = math.fsum(lower[j])
        hi_sum = math.fsum(upper[j])
        if lo_sum > 1.0:
            out.append(f"row {qj}: lower bounds sum to {lo_sum} > 1")
        if hi_sum < 1.0:
            out.append(f"row {qj}: upper bounds sum to {hi_sum} < 1")
    for j, lab in enumerate(m.labels):
        for p in sorted(lab):
            if p not in m.props:
                out.append(f"label of {states[j]} references undeclared prop {p}")
    return out


def validate_mc(m: Mc) -> list[str]:
    """Row-stochasticity check for concrete chains (tolerance 1e-9)."""
    out: list[str] = []
    trans = np.asarray(m.trans)
    for j, qj in enumerate(m.states):
        row = trans[j]
        if (row < 0.0).any() or (row > 1.0).any():
            out.append(f"row {qj}: entry outside [0,1]")
        s = math.fsum(row)
        if abs(s - 1.0) > ROW_SUM_TOL:
            out.append(f"row {qj}: sums to {s}, not 1")
    for j, lab in enumerate(m.labels):
        for p in sorted(lab):
            if p not in m.props:
                out.append(f"label of {m.states[j]} references undeclared prop {p}")
    return out


def contains_distribution(m: Imc, state: str, row) -> bool:
    """True iff ``row`` is a distribution within ``state``'s interval bounds."""
    j = m.index_of(state)
    row = np.asarray(row, dtype=float)
    if row.shape != (m.n,):
        raise ValidationError(f"row must have length {m.n}, got {row.shape}")
    if abs(math.fsum(row) - 1.0) > ROW_SUM_TOL:
        return False
    return bool((row >= m.lower[j]).all() and (row <= m.upper[j]).all())


# ---------------------------------------------------------------------------
# text format
#
#   states: q0 q1 ...
#   props: W G R
#   label q0: W
#   lower:
#   <|Q| whitespace-separated rows>
#   upper:
#   <|Q| rows>
#
# '#' starts a comment; blank lines are ignored.
# ---------------------------------------------------------------------------


def parse_imc(text: str) -> Imc:
    """Parse the native IMC text format into a validated Imc."""
    lines = [(i + 1, ln.split("#", 1)[0].strip()) for i, ln in enumerate(text.splitlines())]
    lines = [(no, ln) for no, ln in lines if ln]
    pos = 0

    def peek():
        return lines[pos] if pos < len(lines) else (None, None)

    no, ln = peek()
    if ln is None or not ln.startswith("states:"):
        raise ParseError("expected 'states:' header", no or 1)
    states = tuple(ln[len("states:"):].split())
    if not states:
        raise ParseError("no states declared", no)
    seen = set()
    for q in states:
        if q in seen:
            raise ParseError(f"duplicate state {q!r}", no)
        seen.add(q)
    pos += 1

    no, ln = peek()
    if ln is None or not ln.startswith("props:"):
        raise ParseError("expected 'props:' header", no or 1)
    props = frozenset(ln[len("props:"):].split())
    pos += 1

    labels: dict[str, frozenset[str]] = {}
    while True:
        no, ln = peek()
        if ln is None or not ln.startswith("label "):
            break
        head, _, rest = ln[len("label "):].partition(":")
        q = head.strip()
        if q not in seen:
            raise ParseError(f"label for unknown state {q!r}", no)
        if q in labels:
            raise ParseError(f"duplicate label line for {q!r}", no)
        lab = frozenset(rest.split())
        for p in sorted(lab):
            if p not in props:
                raise ParseError(f"unknown prop {p!r} in label of {q}", no)
        labels[q] = lab
        pos += 1

    def read_matrix(name: str) -> np.ndarray:
        nonlocal pos
        no, ln = peek()
        if ln is None or ln != f"{name}:":
            raise ParseError(f"expected '{name}:' section", no or 1)
        pos += 1
        rows = []
        for _ in states:
            no, ln = peek()
            if ln is None:
                raise ParseError(f"{name} matrix truncated: expected {len(states)} rows", 1 + lines[-1][0])
            try:
                row = [float(tok) for tok in ln.split()]
            except ValueError as exc:
                raise ParseError(f"bad number in {name} matrix: {exc}", no) from None
            if len(row) != len(states):
                raise ParseError(f"{name} row has {len(row)} entries, expected {len(states)}", no)
            rows.append(row)
            pos += 1
        return np.array(rows)

    lower = read_matrix("lower")
    upper = read_matrix("upper")
    no, ln = peek()
    if ln is not None:
        raise ParseError(f"unexpected trailing content {ln!r}", no)

    m = Imc(states, lower, upper, props, tuple(labels.get(q, frozenset()) for q in states))
    violations = validate_imc(m)
    if violations:
        raise ValidationError("; ".join(violations))
    return m


def serialize_imc(m: Imc) -> str:
    """Write the native text format; parse_imc round-trips it exactly."""
    out = ["states: " + " ".join(m.states), "props: " + " ".join(sorted(m.props))]
    for q, lab in zip(m.states, m.labels):
        if lab:
            out.append(f"label {q}: " + " ".join(sorted(lab)))
    for name, mat in (("lower", m.lower), ("upper", m.upper)):
        out.append(f"{name}:")
        for row in mat:
            out.append(" ".join(repr(float(x)) for x in row))
    return "\n".join(out) + "\n"


def parse_imc_json(text: str) -> Imc:
    """Parse the JSON mirror {states, props, labels, lower, upper}."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno) from None
    for key in ("states", "props", "labels", "lower", "upper"):
        if key not in doc:
            raise ParseError(f"missing field {key!r}")
    states = tuple(str(q) for q in doc["states"])
    if len(set(states)) != len(states):
        raise ParseError("duplicate state identifier")
    props = frozenset(str(p) for p in doc["props"])
    labels = []
    for q in states:
        lab = frozenset(str(p) for p in doc["labels"].get(q, []))
        for p in sorted(lab):
            if p not in props:
                raise ParseError(f"unknown prop {p!r} in label of {q}")
        labels.append(lab)
    for q in doc["labels"]:
        if q not in states:
            raise ParseError(f"label for unknown state {q!r}")
    m = Imc(states, np.array(doc["lower"], dtype=float), np.array(doc["upper"], dtype=float),
            props, tuple(labels))
    violations = validate_imc(m)
    if violations:
        raise ValidationError("; ".join(violations))
    return m


def serialize_imc_json(m: Imc) -> str:
    doc = {
        "states": list(m.states),
        "props": sorted(m.props),
        "labels": {q: sorted(lab) for q, lab in zip(m.states, m.labels) if lab},
        "lower": [[float(x) for x in row] for row in m.lower],
        "upper": [[float(x) for x in row] for row in m.upper],
    }
    return json.dumps(doc, indent=2) + "\n"


def load_imc(path: str) -> Imc:
    """Read a model file; JSON mirror is selected by the .json extension."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    if path.endswith(".json"):
        return parse_imc_json(text)
    return parse_imc(text)
