"""Deterministic Rabin automata over the alphabet 2^Pi.

Two input formats are supported: a subset of the Hanoi Omega-Automata (HOA v1)
format with state-based acceptance in Rabin shape, and a native JSON format
with one explicit edge per (state, letter).  Letters are subsets of the atomic
propositions, encoded internally as bitmasks over the ordered prop list.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import ParseError, ValidationError

MAX_PROPS = 8  # alphabet is expanded eagerly; 2^8 letters is the ceiling


@dataclass(frozen=True)
class RabinAutomaton:
    """DRA (S, 2^props, delta, initial, pairs).

    delta is a dense (|S|, 2^|props|) array of successor indices: totality and
    determinism are structural.  A pair (E, F) accepts a run that visits E
    finitely often and F infinitely often.
    """

    aut_states: tuple[str, ...]
    props: tuple[str, ...]
    initial: str
    delta: np.ndarray
    pairs: tuple[tuple[frozenset[str], frozenset[str]], ...]
    _index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n, n_letters = len(self.aut_states), 1 << len(self.props)
        if len(self.props) > MAX_PROPS:
            raise ValidationError(f"{len(self.props)} props exceed the {MAX_PROPS}-prop limit")
        delta = np.asarray(self.delta, dtype=int)
        delta.setflags(write=False)
        object.__setattr__(self, "delta", delta)
        if delta.shape != (n, n_letters):
            raise ValidationError(f"delta must be {n}x{n_letters}, got {delta.shape}")
        if ((delta < 0) | (delta >= n)).any():
            raise ValidationError("delta is not total: missing transition for some letter")
        if len(set(self.aut_states)) != n:
            raise ValidationError("duplicate automaton state")
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(self.aut_states)})
        if self.initial not in self._index:
            raise ValidationError(f"initial state {self.initial!r} not declared")
        if not self.pairs:
            raise ValidationError("acceptance needs at least one Rabin pair")
        for e, f in self.pairs:
            for s in sorted(e | f):
                if s not in self._index:
                    raise ValidationError(f"Rabin pair references unknown state {s!r}")

    @property
    def n(self) -> int:
        return len(self.aut_states)

    def index_of(self, state: str) -> int:
        return self._index[state]

    def letter_mask(self, letter) -> int:
        mask = 0
        for p in letter:
            try:
                mask |= 1 << self.props.index(p)
            except ValueError:
                raise ValidationError(f"letter references unknown prop {p!r}") from None
        return mask

    def step(self, state_idx: int, letter) -> int:
        return int(self.delta[state_idx, self.letter_mask(letter)])

    def pair_member_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """(E, F) membership as two (|S|, k) boolean arrays."""
        k = len(self.pairs)
        e = np.zeros((self.n, k), dtype=bool)
        f = np.zeros((self.n, k), dtype=bool)
        for i, (es, fs) in enumerate(self.pairs):
            for s in es:
                e[self._index[s], i] = True
            for s in fs:
                f[self._index[s], i] = True
        return e, f


def pair_count(a: RabinAutomaton) -> int:
    return len(a.pairs)


def accepts_lasso(a: RabinAutomaton, prefix, cycle) -> bool:
    """Decide acceptance of the ultimately periodic word prefix . cycle^omega.

    Each word element is a set of prop names.  The run is unique; acceptance
    depends only on the set of states visited infinitely often.
    """
    if not cycle:
        raise ValidationError("cycle must be nonempty")
    s = a.index_of(a.initial)
    for letter in prefix:
        s = a.step(s, letter)
    seen = {}
    trace = []
    pos = 0
    while (s, pos) not in seen:
        seen[(s, pos)] = len(trace)
        trace.append(s)
        s = a.step(s, cycle[pos])
        pos = (pos + 1) % len(cycle)
    inf_states = {a.aut_states[t] for t in trace[seen[(s, pos)]:]}
    return any(not (inf_states & e) and (inf_states & f) for e, f in a.pairs)


# ---------------------------------------------------------------------------
# HOA v1 subset
# ---------------------------------------------------------------------------

_ACC_PAIR_RE = re.compile(r"^Fin\((\d+)\)&Inf\((\d+)\)$")


def _parse_acceptance(spec: str, line: int) -> int:
    """Return the pair count k from '2k (Fin(0)&Inf(1))|(Fin(2)&Inf(3))|...'."""
    parts = spec.split(None, 1)
    if len(parts) != 2 or not parts[0].isdigit():
        raise ParseError("malformed Acceptance header", line)
    n_sets, formula = int(parts[0]), parts[1].replace(" ", "")
    if n_sets == 0 or n_sets % 2 != 0:
        raise ParseError("acceptance condition not in Rabin shape: need 2k sets, k >= 1", line)
    k = n_sets // 2
    disjuncts = formula.split("|")
    if len(disjuncts) != k:
        raise ParseError("acceptance condition not in Rabin shape", line)
    for i, d in enumerate(disjuncts):
        if d.startswith("(") and d.endswith(")"):
            d = d[1:-1]
        m = _ACC_PAIR_RE.match(d)
        if not m or int(m.group(1)) != 2 * i or int(m.group(2)) != 2 * i + 1:
            raise ParseError(
                f"acceptance condition not in Rabin shape: expected Fin({2*i})&Inf({2*i+1})", line)
    return k


class _LabelParser:
    """Boolean label expressions over AP indices: !, &, |, parens, t, f."""

    def __init__(self, text: str, n_props: int, line: int):
        self.toks = re.findall(r"\d+|[tf!&|()]", text.replace(" ", ""))
        if "".join(self.toks) != text.replace(" ", ""):
            raise ParseError(f"bad label expression {text!r}", line)
        self.pos = 0
        self.n_props = n_props
        self.line = line

    def _peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def _next(self):
        tok = self._peek()
        if tok is None:
            raise ParseError("unexpected end of label expression", self.line)
        self.pos += 1
        return tok

    def parse(self) -> list[bool]:
        table = self._disj()
        if self._peek() is not None:
            raise ParseError("trailing tokens in label expression", self.line)
        return table

    def _disj(self):
        table = self._conj()
        while self._peek() == "|":
            self._next()
            rhs = self._conj()
            table = [a or b for a, b in zip(table, rhs)]
        return table

    def _conj(self):
        table = self._unit()
        while self._peek() == "&":
            self._next()
            rhs = self._unit()
            table = [a and b for a, b in zip(table, rhs)]
        return table

    def _unit(self):
        tok = self._next()
        if tok == "!":
            return [not v for v in self._unit()]
        if tok == "(":
            table = self._disj()
            if self._next() != ")":
                raise ParseError("unbalanced parentheses in label", self.line)
            return table
        if tok == "t":
            return [True] * (1 << self.n_props)
        if tok == "f":
            return [False] * (1 << self.n_props)
        if tok.isdigit():
            i = int(tok)
            if i >= self.n_props:
                raise ParseError(f"label references AP {i}, but only {self.n_props} declared",
                                 self.line)
            return [bool(mask & (1 << i)) for mask in range(1 << self.n_props)]
        raise ParseError(f"unexpected token {tok!r} in label expression", self.line)


def parse_hoa(text: str, props) -> RabinAutomaton:
    """Parse the HOA v1 subset; ``props`` must equal the model's prop set."""
    lines = text.splitlines()
    header: dict[str, tuple[str, int]] = {}
    body_start = None
    for i, raw in enumerate(lines):
        ln = raw.strip()
        if not ln:
            continue
        if ln == "--BODY--":
            body_start = i + 1
            break
        key, _, rest = ln.partition(":")
        header[key.strip()] = (rest.strip(), i + 1)
    if body_start is None:
        raise ParseError("missing --BODY-- marker")
    if header.get("HOA", ("", 0))[0] != "v1":
        raise ParseError("expected 'HOA: v1' header")

    def need(key):
        if key not in header:
            raise ParseError(f"missing {key!r} header")
        return header[key]

    n_states_text, ln_no = need("States")
    if not n_states_text.isdigit():
        raise ParseError("malformed States header", ln_no)
    n_states = int(n_states_text)

    start_text, ln_no = need("Start")
    if not start_text.isdigit():
        raise ParseError("a single initial state is required", ln_no)
    start = int(start_text)

    ap_text, ln_no = need("AP")
    ap_toks = re.findall(r'"([^"]*)"', ap_text)
    ap_count = ap_text.split(None, 1)[0]
    if not ap_count.isdigit() or int(ap_count) != len(ap_toks):
        raise ParseError("malformed AP header", ln_no)
    if len(ap_toks) > MAX_PROPS:
        raise ParseError(f"{len(ap_toks)} props exceed the {MAX_PROPS}-prop limit", ln_no)
    if set(ap_toks) != set(props):
        raise ParseError(
            f"automaton props {sorted(ap_toks)} do not match model props {sorted(props)}", ln_no)

    acc_text, ln_no = need("Acceptance")
    k = _parse_acceptance(acc_text, ln_no)
    if "acc-name" in header:
        name, name_ln = header["acc-name"]
        if name.split() != ["Rabin", str(k)]:
            raise ParseError(f"acc-name {name!r} disagrees with Acceptance ({k} pairs)", name_ln)

    n_letters = 1 << len(ap_toks)
    delta = np.full((n_states, n_letters), -1, dtype=int)
    names: list[str | None] = [None] * n_states
    in_sets: list[set[int]] = [set() for _ in range(n_states)]
    current = None
    for i in range(body_start, len(lines)):
        ln = lines[i].strip()
        no = i + 1
        if not ln:
            continue
        if ln == "--END--":
            break
        if ln.startswith("State:"):
            rest = ln[len("State:"):].strip()
            m = re.match(r'^(\d+)\s*(?:"([^"]*)")?\s*(?:\{([\d\s]*)\})?$', rest)
            if not m:
                raise ParseError(f"malformed State line {ln!r}", no)
            current = int(m.group(1))
            if current >= n_states:
                raise ParseError(f"state index {current} out of range", no)
            if m.group(2):
                names[current] = m.group(2)
            if m.group(3) is not None:
                sets = {int(t) for t in m.group(3).split()}
                if any(x >= 2 * k for x in sets):
                    raise ParseError("acceptance set index out of range", no)
                in_sets[current] = sets
            continue
        m = re.match(r"^\[(.*)\]\s*(\d+)\s*(\{.*\})?$", ln)
        if not m:
            raise ParseError(f"malformed edge line {ln!r}", no)
        if m.group(3):
            raise ParseError("edge-based acceptance marks are not supported (state-based only)", no)
        if current is None:
            raise ParseError("edge before any State line", no)
        dest = int(m.group(2))
        if dest >= n_states:
            raise ParseError(f"edge target {dest} out of range", no)
        table = _LabelParser(m.group(1), len(ap_toks), no).parse()
        for mask, hit in enumerate(table):
            if not hit:
                continue
            if delta[current, mask] != -1:
                raise ParseError(
                    f"non-deterministic edge: state {current} has two successors for one letter", no)
            delta[current, mask] = dest
    else:
        raise ParseError("missing --END-- marker")

    missing = np.argwhere(delta < 0)
    if missing.size:
        s, mask = missing[0]
        letter = {ap_toks[b] for b in range(len(ap_toks)) if mask & (1 << b)}
        raise ParseError(
            f"missing transition: state {s} has no successor for letter {sorted(letter)}")
    if start >= n_states:
        raise ParseError("initial state out of range")

    state_ids = tuple(names[i] if names[i] is not None else f"s{i}" for i in range(n_states))
    pairs = []
    for i in range(k):
        e = frozenset(state_ids[s] for s in range(n_states) if 2 * i in in_sets[s])
        f = frozenset(state_ids[s] for s in range(n_states) if 2 * i + 1 in in_sets[s])
        pairs.append((e, f))

    # reorder props to the caller's canonical (sorted) order
    order = sorted(range(len(ap_toks)), key=lambda b: ap_toks[b])
    perm = np.zeros(n_letters, dtype=int)
    for mask in range(n_letters):
        new_mask = 0
        for new_bit, old_bit in enumerate(order):
            if mask & (1 << old_bit):
                new_mask |= 1 << new_bit
        perm[new_mask] = mask
    return RabinAutomaton(state_ids, tuple(sorted(ap_toks)), state_ids[start],
                          delta[:, perm], tuple(pairs))


def serialize_hoa(a: RabinAutomaton) -> str:
    k = len(a.pairs)
    out = [
        "HOA: v1",
        f"States: {a.n}",
        f"Start: {a.index_of(a.initial)}",
        f'AP: {len(a.props)} ' + " ".join(f'"{p}"' for p in a.props),
        f"acc-name: Rabin {k}",
        "Acceptance: " + str(2 * k) + " " + " | ".join(
            f"(Fin({2*i}) & Inf({2*i+1}))" for i in range(k)),
        "properties: deterministic complete state-acc",
        "--BODY--",
    ]
    for s_idx, s in enumerate(a.aut_states):
        sets = []
        for i, (e, f) in enumerate(a.pairs):
            if s in e:
                sets.append(2 * i)
            if s in f:
                sets.append(2 * i + 1)
        marker = (" {" + " ".join(str(x) for x in sorted(sets)) + "}") if sets else ""
        out.append(f'State: {s_idx} "{s}"{marker}')
        for mask in range(1 << len(a.props)):
            lits = [(str(b) if mask & (1 << b) else f"!{b}") for b in range(len(a.props))]
            label = " & ".join(lits) if lits else "t"
            out.append(f"[{label}] {int(a.delta[s_idx, mask])}")
    out.append("--END--")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# native JSON format
# ---------------------------------------------------------------------------


def parse_dra_json(text: str, props) -> RabinAutomaton:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno) from None
    for key in ("states", "initial", "props", "edges", "pairs"):
        if key not in doc:
            raise ParseError(f"missing field {key!r}")
    if set(doc["props"]) != set(props):
        raise ParseError(
            f"automaton props {sorted(doc['props'])} do not match model props {sorted(props)}")
    states = tuple(str(s) for s in doc["states"])
    prop_order = tuple(sorted(doc["props"]))
    index = {s: i for i, s in enumerate(states)}
    n_letters = 1 << len(prop_order)
    delta = np.full((len(states), n_letters), -1, dtype=int)
    for edge in doc["edges"]:
        src, dst = str(edge["from"]), str(edge["to"])
        if src not in index or dst not in index:
            raise ParseError(f"edge references unknown state: {edge}")
        mask = 0
        for p in edge["letter"]:
            if p not in prop_order:
                raise ParseError(f"edge letter references unknown prop {p!r}")
            mask |= 1 << prop_order.index(p)
        if delta[index[src], mask] != -1:
            raise ParseError(
                f"non-deterministic edge: {src} has two successors for letter {sorted(edge['letter'])}")
        delta[index[src], mask] = index[dst]
    missing = np.argwhere(delta < 0)
    if missing.size:
        s, mask = missing[0]
        letter = sorted(p for b, p in enumerate(prop_order) if mask & (1 << b))
        raise ParseError(f"missing transition: state {states[s]} has no successor for {letter}")
    pairs = tuple((frozenset(str(x) for x in pr["E"]), frozenset(str(x) for x in pr["F"]))
                  for pr in doc["pairs"])
    return RabinAutomaton(states, prop_order, str(doc["initial"]), delta, pairs)


def serialize_dra_json(a: RabinAutomaton) -> str:
    edges = []
    for s_idx, s in enumerate(a.aut_states):
        for mask in range(1 << len(a.props)):
            letter = [p for b, p in enumerate(a.props) if mask & (1 << b)]
            edges.append({"from": s, "letter": letter, "to": a.aut_states[int(a.delta[s_idx, mask])]})
    doc = {
        "states": list(a.aut_states),
        "initial": a.initial,
        "props": list(a.props),
        "edges": edges,
        "pairs": [{"E": sorted(e), "F": sorted(f)} for e, f in a.pairs],
    }
    return json.dumps(doc, indent=2) + "\n"


def load_automaton(path: str, props) -> RabinAutomaton:
    """Read an automaton file; JSON is selected by the .json extension."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    if path.endswith(".json"):
        return parse_dra_json(text, props)
    return parse_hoa(text, props)
