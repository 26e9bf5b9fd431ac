"""Variable-set automata (VAs) and extended VAs.

A VA reads letters and single variable markers; an extended VA reads letters
and whole sets of markers at once (ev-transitions). Both are stored as flat
transition tuples over integer states; markers use the integer encoding of
:mod:`spanrun.core`.
"""

import os
from collections import deque
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from .core import (
    BudgetExceededError,
    SpanrunError,
    close_marker,
    is_open,
    marker_var,
    open_marker,
)

EV = "ev"
LETTER = "letter"

UNSEEN, OPENED, CLOSED = 0, 1, 2


class BlowupLimitError(BudgetExceededError):
    pass


def budget(default: int) -> int:
    """Size budget for exponential constructions; SPANRUN_BUDGET overrides."""
    value = os.environ.get("SPANRUN_BUDGET")
    return int(value) if value else default


@dataclass(frozen=True)
class SymbolPredicate:
    """A set of bytes: one byte, every byte, or every byte except some."""

    kind: str
    byte: int = -1
    excluded: frozenset = frozenset()

    @classmethod
    def single(cls, b: int) -> "SymbolPredicate":
        return cls("byte", byte=b)

    @classmethod
    def any(cls) -> "SymbolPredicate":
        return cls("any")

    @classmethod
    def except_(cls, excluded) -> "SymbolPredicate":
        return cls("except", excluded=frozenset(excluded))

    def matches(self, b: int) -> bool:
        if self.kind == "byte":
            return b == self.byte
        if self.kind == "any":
            return True
        return b not in self.excluded

    def is_empty(self) -> bool:
        return self.kind == "except" and len(self.excluded) >= 256

    def __str__(self):
        if self.kind == "byte":
            return "'" + _quote_byte(self.byte) + "'"
        if self.kind == "any":
            return "any"
        return "except:'" + "".join(_quote_byte(b) for b in sorted(self.excluded)) + "'"


def _quote_byte(b: int) -> str:
    if b == 0x27 or b == 0x5C:
        return "\\" + chr(b)
    if 0x20 <= b < 0x7F:
        return chr(b)
    return f"\\x{b:02x}"


def _check_states(count, initial, finals, transitions):
    if count and not 0 <= initial < count:
        raise ValueError(f"initial state {initial} out of range")
    for q in finals:
        if not 0 <= q < count:
            raise ValueError(f"final state {q} out of range")
    for src, _, dst in transitions:
        if not (0 <= src < count and 0 <= dst < count):
            raise ValueError(f"transition {src}->{dst} out of range")


@dataclass(frozen=True)
class VsetAutomaton:
    state_count: int
    initial: Optional[int]
    finals: frozenset
    letter_transitions: tuple
    marker_transitions: tuple
    variables: tuple = ()

    def __post_init__(self):
        _check_states(self.state_count, self.initial, self.finals,
                      self.letter_transitions + self.marker_transitions)
        for _, m, _ in self.marker_transitions:
            if marker_var(m) >= len(self.variables):
                raise ValueError(f"marker {m} references an unknown variable")

    @classmethod
    def empty(cls, variables=()) -> "VsetAutomaton":
        return cls(0, None, frozenset(), (), (), tuple(variables))

    @property
    def is_empty(self) -> bool:
        return self.state_count == 0

    @property
    def var_count(self) -> int:
        return len(self.variables)

    @property
    def size(self) -> int:
        return self.state_count + len(self.letter_transitions) + len(self.marker_transitions)


@dataclass(frozen=True)
class ExtendedVsetAutomaton:
    state_count: int
    initial: Optional[int]
    finals: frozenset
    letter_transitions: tuple
    ev_transitions: tuple  # (src, sorted tuple of markers, dst)
    variables: tuple = ()
    state_class: Optional[tuple] = field(default=None)

    def __post_init__(self):
        _check_states(self.state_count, self.initial, self.finals,
                      self.letter_transitions + self.ev_transitions)
        for _, markers, _ in self.ev_transitions:
            for m in markers:
                if marker_var(m) >= len(self.variables):
                    raise ValueError(f"marker {m} references an unknown variable")
        if self.state_class is not None:
            cls = self.state_class
            if len(cls) != self.state_count:
                raise ValueError("state_class length mismatch")
            if self.state_count and cls[self.initial] != EV:
                raise ValueError("initial state must be an ev-state")
            if any(cls[q] != LETTER for q in self.finals):
                raise ValueError("final states must be letter-states")
            for src, _, dst in self.ev_transitions:
                if cls[src] != EV or cls[dst] != LETTER:
                    raise ValueError("ev-transitions must go from ev-states to letter-states")
            for src, _, dst in self.letter_transitions:
                if cls[src] != LETTER or cls[dst] != EV:
                    raise ValueError("letter transitions must go from letter-states to ev-states")

    @classmethod
    def empty(cls, variables=()) -> "ExtendedVsetAutomaton":
        return cls(0, None, frozenset(), (), (), tuple(variables), ())

    @property
    def is_empty(self) -> bool:
        return self.state_count == 0

    @property
    def var_count(self) -> int:
        return len(self.variables)

    @property
    def size(self) -> int:
        return self.state_count + len(self.letter_transitions) + len(self.ev_transitions)


# -- graph helpers -----------------------------------------------------------

def _live_edges(a):
    """(src, dst) pairs of all usable transitions of either automaton kind."""
    edges = [(s, d) for s, p, d in a.letter_transitions if not p.is_empty()]
    other = a.ev_transitions if isinstance(a, ExtendedVsetAutomaton) else a.marker_transitions
    edges.extend((s, d) for s, _, d in other)
    return edges


def _reachable(count, starts, edges):
    adj = [[] for _ in range(count)]
    for s, d in edges:
        adj[s].append(d)
    seen = [False] * count
    todo = list(starts)
    for q in todo:
        seen[q] = True
    while todo:
        q = todo.pop()
        for r in adj[q]:
            if not seen[r]:
                seen[r] = True
                todo.append(r)
    return seen


def _useful_states(a):
    edges = _live_edges(a)
    fwd = _reachable(a.state_count, [a.initial], edges)
    bwd = _reachable(a.state_count, list(a.finals), [(d, s) for s, d in edges])
    return [f and b for f, b in zip(fwd, bwd)]


def trim(a):
    """Keep only states that are both accessible and co-accessible.

    Works for both automaton kinds. Returns the kind's empty automaton when
    the initial state does not survive.
    """
    if a.is_empty:
        return a
    keep = _useful_states(a)
    if not keep[a.initial]:
        return type(a).empty(a.variables)
    renum = {}
    for q in range(a.state_count):
        if keep[q]:
            renum[q] = len(renum)

    def restrict(transitions, drop_empty=False):
        return tuple(
            (renum[s], x, renum[d]) for s, x, d in transitions
            if s in renum and d in renum and not (drop_empty and x.is_empty())
        )

    finals = frozenset(renum[q] for q in a.finals if q in renum)
    letters = restrict(a.letter_transitions, drop_empty=True)
    if isinstance(a, ExtendedVsetAutomaton):
        cls = None
        if a.state_class is not None:
            cls = tuple(a.state_class[q] for q in sorted(renum))
        return ExtendedVsetAutomaton(len(renum), renum[a.initial], finals, letters,
                                     restrict(a.ev_transitions), a.variables, cls)
    return VsetAutomaton(len(renum), renum[a.initial], finals, letters,
                         restrict(a.marker_transitions), a.variables)


# -- sequentiality ------------------------------------------------------------

class SequentialityResult(NamedTuple):
    is_sequential: bool
    witness: Optional[list] = None  # transitions of an accepting, invalid run
    variable: Optional[int] = None

    def __bool__(self):
        return self.is_sequential


def _apply_status(status, markers, var):
    """New status of ``var`` after reading ``markers`` at once, or None if invalid."""
    o = open_marker(var) in markers
    c = close_marker(var) in markers
    if o and c:
        return CLOSED if status == UNSEEN else None
    if o:
        return OPENED if status == UNSEEN else None
    if c:
        return CLOSED if status == OPENED else None
    return status


def check_sequential(a) -> SequentialityResult:
    """Decide whether every accepting run of ``a`` is valid.

    One product with {unseen, open, closed} per variable; a violation counts
    only if the run can still be completed to an accepting one.
    """
    if isinstance(a, ExtendedVsetAutomaton) and a.state_class is None:
        a = normalize_extended(a)
    if a.is_empty:
        return SequentialityResult(True)
    extended = isinstance(a, ExtendedVsetAutomaton)
    edges = _live_edges(a)
    coacc = _reachable(a.state_count, list(a.finals), [(d, s) for s, d in edges])
    out = [[] for _ in range(a.state_count)]
    for t in a.letter_transitions:
        if not t[1].is_empty():
            out[t[0]].append(("letter", t))
    if extended:
        for t in a.ev_transitions:
            out[t[0]].append(("ev", t))
    else:
        for t in a.marker_transitions:
            out[t[0]].append(("marker", t))

    for var in range(a.var_count):
        start = (a.initial, UNSEEN)
        parent = {start: None}
        queue = deque([start])
        while queue:
            conf = queue.popleft()
            q, status = conf
            if q in a.finals and status == OPENED:
                return SequentialityResult(False, _witness(parent, conf), var)
            for kind, t in out[q]:
                if kind == "letter":
                    new = status
                elif kind == "ev":
                    new = _apply_status(status, t[1], var)
                else:
                    new = _apply_status(status, (t[1],), var)
                if new is None:
                    if coacc[t[2]]:
                        return SequentialityResult(False, _witness(parent, conf) + [(kind, t)], var)
                    continue
                nxt = (t[2], new)
                if nxt not in parent:
                    parent[nxt] = (conf, (kind, t))
                    queue.append(nxt)
    return SequentialityResult(True)


def _witness(parent, conf):
    steps = []
    while parent[conf] is not None:
        conf, step = parent[conf]
        steps.append(step)
    steps.reverse()
    return steps


def make_sequential(a: VsetAutomaton, max_vars: int = 12, state_budget: Optional[int] = None) -> VsetAutomaton:
    """Equivalent sequential VA whose states carry a status per variable."""
    k = a.var_count
    if state_budget is None:
        state_budget = budget(10**6)
    if k > max_vars or (3 ** k) * a.state_count > state_budget:
        raise BlowupLimitError(f"3^{k} * {a.state_count} states exceeds the budget")
    if a.is_empty:
        return a
    letters_from = [[] for _ in range(a.state_count)]
    markers_from = [[] for _ in range(a.state_count)]
    for t in a.letter_transitions:
        letters_from[t[0]].append(t)
    for t in a.marker_transitions:
        markers_from[t[0]].append(t)

    start = (a.initial, (UNSEEN,) * k)
    ids = {start: 0}
    todo = [start]
    letters, markers = [], []
    while todo:
        conf = todo.pop()
        q, vec = conf
        src = ids[conf]
        succ = []
        for _, pred, dst in letters_from[q]:
            succ.append(("l", pred, (dst, vec)))
        for _, m, dst in markers_from[q]:
            var = marker_var(m)
            new = _apply_status(vec[var], (m,), var)
            if new is not None:
                succ.append(("m", m, (dst, vec[:var] + (new,) + vec[var + 1:])))
        for kind, label, nxt in succ:
            if nxt not in ids:
                ids[nxt] = len(ids)
                todo.append(nxt)
            (letters if kind == "l" else markers).append((src, label, ids[nxt]))
    finals = frozenset(i for (q, vec), i in ids.items() if q in a.finals and OPENED not in vec)
    out = VsetAutomaton(len(ids), 0, finals, tuple(letters), tuple(markers), a.variables)
    return trim(out)


# -- extended VAs -------------------------------------------------------------

def _infer_classes(a: ExtendedVsetAutomaton):
    """Class tags if ``a`` is already partitioned, else None."""
    cls = [None] * a.state_count
    for s, _, _ in a.ev_transitions:
        cls[s] = EV
    for s, _, _ in a.letter_transitions:
        if cls[s] == EV:
            return None
        cls[s] = LETTER
    for q in range(a.state_count):
        if cls[q] is None:
            cls[q] = LETTER if q in a.finals else EV
    try:
        ExtendedVsetAutomaton(a.state_count, a.initial, a.finals, a.letter_transitions,
                              a.ev_transitions, a.variables, tuple(cls))
    except ValueError:
        return None
    return tuple(cls)


def normalize_extended(a: ExtendedVsetAutomaton) -> ExtendedVsetAutomaton:
    """Partition states into ev-states and letter-states.

    Already-partitioned input keeps its states; otherwise every state q is
    split into an ev-copy ``2q`` and a letter-copy ``2q+1`` and the result is
    trimmed.
    """
    if a.is_empty:
        return ExtendedVsetAutomaton.empty(a.variables)
    if a.state_class is not None:
        return a
    cls = _infer_classes(a)
    if cls is not None:
        return ExtendedVsetAutomaton(a.state_count, a.initial, a.finals, a.letter_transitions,
                                     a.ev_transitions, a.variables, cls)
    n = a.state_count
    ev = tuple((2 * s, m, 2 * d + 1) for s, m, d in a.ev_transitions)
    letters = tuple((2 * s + 1, p, 2 * d) for s, p, d in a.letter_transitions)
    out = ExtendedVsetAutomaton(
        2 * n, 2 * a.initial, frozenset(2 * q + 1 for q in a.finals), letters, ev,
        a.variables, tuple(EV if i % 2 == 0 else LETTER for i in range(2 * n)))
    return trim(out)


def expand_to_extended(a: VsetAutomaton, transition_budget: Optional[int] = None) -> ExtendedVsetAutomaton:
    """Extended VA reading, in one ev-transition, the markers of a marker-only path.

    Exponential in the worst case; meant for cross-checking the two pipelines.
    """
    if transition_budget is None:
        transition_budget = budget(10**5)
    if a.is_empty:
        return ExtendedVsetAutomaton.empty(a.variables)
    succ = [[] for _ in range(a.state_count)]
    for s, m, d in a.marker_transitions:
        succ[s].append((m, d))
    memo = {}
    total = 0

    def closure(q, onstack=()):
        nonlocal total
        if q in memo:
            return memo[q]
        if q in onstack:
            raise SpanrunError("marker transitions contain a cycle; automaton is not sequential")
        out = {(q, frozenset())}
        for m, d in succ[q]:
            for target, ms in closure(d, onstack + (q,)):
                if m not in ms:
                    out.add((target, ms | {m}))
        total += len(out)
        if total > transition_budget:
            raise BudgetExceededError("ev-transition budget exceeded")
        memo[q] = out
        return out

    ev = []
    for q in range(a.state_count):
        for target, ms in sorted(closure(q), key=lambda x: (x[0], sorted(x[1]))):
            ev.append((q, tuple(sorted(ms)), target))
    out = ExtendedVsetAutomaton(a.state_count, a.initial, a.finals, a.letter_transitions,
                                tuple(ev), a.variables)
    return normalize_extended(out)


def marker_graph_is_acyclic(a: VsetAutomaton) -> bool:
    indeg = [0] * a.state_count
    succ = [[] for _ in range(a.state_count)]
    for s, _, d in a.marker_transitions:
        succ[s].append(d)
        indeg[d] += 1
    todo = [q for q in range(a.state_count) if indeg[q] == 0]
    seen = 0
    while todo:
        q = todo.pop()
        seen += 1
        for d in succ[q]:
            indeg[d] -= 1
            if indeg[d] == 0:
                todo.append(d)
    return seen == a.state_count


def describe_step(step, variables) -> str:
    kind, (src, label, dst) = step
    if kind == "letter":
        return f"{src} --{label}--> {dst}"
    if kind == "marker":
        return f"{src} --{_marker_text(label, variables)}--> {dst}"
    return f"{src} --[{','.join(_marker_text(m, variables) for m in label)}]--> {dst}"


def _marker_text(m, variables):
    name = variables[marker_var(m)]
    return ("+" if is_open(m) else "-") + name
