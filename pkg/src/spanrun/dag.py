"""Leveled mapping DAGs: the product of an automaton and a document.

A DAG is stored level-major. Each level is a :class:`Level`: the vertices at
that level (one slot per automaton state), the marker edges inside the level
and the epsilon edges into the next level. A vertex is a ``(level, slot)``
pair. Marker-edge labels are sorted tuples of marker codes; the position of
every pair in a label is the level itself, so it is not stored.

Levels with identical local structure are the same object. A product DAG
over a long document therefore holds one list entry per position but only a
handful of distinct levels, and every per-level pass below is memoized on
level identity. Step counters still charge the full cost of each level.
"""

from collections import Counter
from functools import cached_property
from typing import NamedTuple, Optional

from .automata import ExtendedVsetAutomaton, VsetAutomaton, normalize_extended
from .core import SpanrunError, is_open, marker_var

FINAL_STATE = -1


class NotAcyclicError(SpanrunError):
    pass


def bits(mask: int):
    """Indices of the set bits of ``mask``, lowest first."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class LevelSet(NamedTuple):
    level: int
    mask: int

    def members(self):
        return list(bits(self.mask))

    def __len__(self):
        return bin(self.mask).count("1")


class Level:
    """Vertices of one level with their outgoing edges.

    ``marker_edges`` holds ``(src, label, dst)`` with ``dst`` in this level;
    ``eps_edges`` holds ``(src, dst)`` with ``dst`` a slot of the next level,
    which has ``next_width`` slots.
    """

    def __init__(self, states, marker_edges=(), eps_edges=(), next_width=0):
        self.states = tuple(states)
        self.marker_edges = tuple(marker_edges)
        self.eps_edges = tuple(eps_edges)
        self.next_width = next_width

    def __repr__(self):
        return (f"Level(states={self.states}, marker_edges={self.marker_edges}, "
                f"eps_edges={self.eps_edges}, next_width={self.next_width})")

    @property
    def width(self):
        return len(self.states)

    @property
    def size(self):
        return len(self.states) + len(self.marker_edges) + len(self.eps_edges)

    @cached_property
    def marker_out(self):
        out = [[] for _ in self.states]
        for s, label, d in self.marker_edges:
            out[s].append((label, d))
        return out

    @cached_property
    def eps_out(self):
        out = [[] for _ in self.states]
        for s, d in self.eps_edges:
            out[s].append(d)
        return out

    @cached_property
    def eps_row(self):
        rows = [0] * len(self.states)
        for s, d in self.eps_edges:
            rows[s] |= 1 << d
        return tuple(rows)

    @cached_property
    def marker_succ(self):
        rows = [0] * len(self.states)
        for s, _, d in self.marker_edges:
            rows[s] |= 1 << d
        return tuple(rows)

    @cached_property
    def topo(self):
        """Slots in a topological order of the marker edges."""
        indeg = [0] * len(self.states)
        for _, _, d in self.marker_edges:
            indeg[d] += 1
        order = [s for s, k in enumerate(indeg) if k == 0]
        for s in order:
            for _, d in self.marker_out[s]:
                indeg[d] -= 1
                if indeg[d] == 0:
                    order.append(d)
        if len(order) != len(self.states):
            raise NotAcyclicError("marker edges inside a level form a cycle")
        return tuple(order)

    @cached_property
    def nontrivial(self):
        """Mask of slots with an outgoing marker edge whose label is non-empty."""
        mask = 0
        for s, label, _ in self.marker_edges:
            if label:
                mask |= 1 << s
        return mask

    @cached_property
    def empty_succ(self):
        rows = [0] * len(self.states)
        for s, label, d in self.marker_edges:
            if not label:
                rows[s] |= 1 << d
        return tuple(rows)

    @cached_property
    def empty_closure(self):
        """Per slot, the slots reachable through empty-label edges (reflexive)."""
        closure = [1 << s for s in range(len(self.states))]
        for s in reversed(self.topo):
            for d in bits(self.empty_succ[s]):
                closure[s] |= closure[d]
        return tuple(closure)

    @cached_property
    def step_rows(self):
        """Rows of the one-level reachability matrix: empty edges, then one epsilon edge."""
        rows = []
        for s in range(len(self.states)):
            acc = 0
            for t in bits(self.empty_closure[s]):
                acc |= self.eps_row[t]
            rows.append(acc)
        return tuple(rows)

    @cached_property
    def self_jump(self):
        """Mask of slots whose jump level is this level."""
        mask = 0
        for s in range(len(self.states)):
            if self.empty_closure[s] & self.nontrivial:
                mask |= 1 << s
        return mask

    @cached_property
    def label_order(self):
        """Distinct labels in canonical order, the empty label last."""
        labels = {label for _, label, _ in self.marker_edges}
        return tuple(sorted(labels, key=lambda lab: (not lab, lab)))

    @cached_property
    def sorted_adjacency(self):
        """Per slot, ``(rank, dst)`` pairs sorted by label rank (bucketed)."""
        rank = {label: i for i, label in enumerate(self.label_order)}
        buckets = [[] for _ in self.label_order]
        for s, label, d in self.marker_edges:
            buckets[rank[label]].append((s, d))
        adj = [[] for _ in self.states]
        for r, bucket in enumerate(buckets):
            for s, d in bucket:
                adj[s].append((r, d))
        return tuple(tuple(a) for a in adj)

    @cached_property
    def alphabet(self):
        """Sorted marker codes used by marker edges of this level."""
        return tuple(sorted({m for _, label, _ in self.marker_edges for m in label}))

    @cached_property
    def preds(self):
        """Per slot, ``(src, label bits)`` over :attr:`alphabet` for incoming marker edges."""
        index = {m: i for i, m in enumerate(self.alphabet)}
        out = [[] for _ in self.states]
        for s, label, d in self.marker_edges:
            lab = 0
            for m in label:
                lab |= 1 << index[m]
            out[d].append((s, lab))
        return tuple(tuple(p) for p in out)


FINAL_LEVEL = None  # built lazily per DAG; see _final_level


def _final_level():
    return Level((FINAL_STATE,))


class DagStats(NamedTuple):
    depth: int
    width: int
    complete_width: int
    alphabet_size: int


class MappingDAG:
    """A leveled mapping DAG; the last level holds only the final vertex."""

    def __init__(self, levels, initial_slot, variables=(), extended=False, adjacency_sorted=False):
        self.levels = levels
        self.initial_slot = initial_slot
        self.variables = tuple(variables)
        self.extended = extended
        self.adjacency_sorted = adjacency_sorted

    @property
    def depth(self):
        return len(self.levels)

    @property
    def final_level(self):
        return len(self.levels) - 1

    @property
    def initial_vertex(self):
        return (0, self.initial_slot)

    @property
    def final_vertex(self):
        return (len(self.levels) - 1, 0)

    def state(self, level, slot):
        q = self.levels[level].states[slot]
        return None if q == FINAL_STATE else q

    def slot_of(self, level, state):
        """Slot of ``(state, level)``, or None if the vertex is absent."""
        states = self.levels[level].states
        return states.index(state) if state in states else None

    def marker_out(self, level, slot):
        return self.levels[level].marker_out[slot]

    def eps_out(self, level, slot):
        return self.levels[level].eps_out[slot]

    def vertex_count(self):
        return sum(L.width * k for L, k in Counter(self.levels).items())

    def edge_count(self):
        return sum((len(L.marker_edges) + len(L.eps_edges)) * k for L, k in Counter(self.levels).items())

    def size(self):
        return sum(L.size * k for L, k in Counter(self.levels).items())

    def stats(self) -> DagStats:
        distinct = set(self.levels)
        return DagStats(
            depth=len(self.levels),
            width=max(L.width for L in distinct),
            complete_width=max(L.size for L in distinct),
            alphabet_size=max(sum(1 for lab in L.label_order if lab) for L in distinct),
        )

    def vertices(self):
        for i, L in enumerate(self.levels):
            for s in range(L.width):
                yield (i, s)

    def edges(self):
        """All edges as ``(src, label, dst)``; label is None for epsilon edges."""
        for i, L in enumerate(self.levels):
            for s, label, d in L.marker_edges:
                yield (i, s), label, (i, d)
            for s, d in L.eps_edges:
                yield (i, s), None, (i + 1, d)

    def dump(self) -> str:
        """Text dump: ``vertex LEVEL STATE`` and ``edge L:S LABEL L:S`` lines."""
        names = self.variables

        def vname(level, slot):
            q = self.levels[level].states[slot]
            return f"{level}:{'f' if q == FINAL_STATE else q}"

        lines = []
        for i, s in self.vertices():
            q = self.levels[i].states[s]
            lines.append(f"vertex {i} {'f' if q == FINAL_STATE else q}")
        for (i, s), label, (j, t) in self.edges():
            if label is None:
                text = "eps"
            else:
                text = "[" + ",".join(
                    ("+" if is_open(m) else "-")
                    + (names[marker_var(m)] if marker_var(m) < len(names) else str(marker_var(m)))
                    + f"@{i}" for m in label) + "]"
            lines.append(f"edge {vname(i, s)} {text} {vname(j, t)}")
        return "\n".join(lines) + "\n"


# -- product construction -----------------------------------------------------

def _byte_classes(letter_transitions):
    """Map each byte to a class id; bytes in a class enable the same letter transitions."""
    sig_ids = {}
    table = bytearray(256)
    for b in range(256):
        sig = tuple(i for i, (_, p, _) in enumerate(letter_transitions) if p.matches(b))
        table[b] = sig_ids.setdefault(sig, len(sig_ids))
    reps = {}
    for b in range(256):
        reps.setdefault(table[b], b)
    return bytes(table), reps


def _product(a, d, marker_edges, extended):
    if a.is_empty:
        return None
    states = tuple(range(a.state_count))
    table, reps = _byte_classes(a.letter_transitions)
    class_levels = {}
    for cls, b in reps.items():
        eps = tuple(sorted({(s, t) for s, p, t in a.letter_transitions if p.matches(b)}))
        class_levels[cls] = Level(states, marker_edges, eps, a.state_count)
    last = Level(states, marker_edges, tuple((q, 0) for q in sorted(a.finals)), 1)
    levels = [class_levels[c] for c in d.translate(table)]
    levels.append(last)
    levels.append(_final_level())
    return MappingDAG(levels, a.initial, a.variables, extended=extended)


def product_dag_extended(a: ExtendedVsetAutomaton, d: bytes) -> Optional[MappingDAG]:
    """Product DAG of an extended VA and a document (None if ``a`` is empty).

    Untagged input is normalized first.
    """
    if a.state_class is None:
        a = normalize_extended(a)
    marker_edges = tuple(sorted((s, tuple(sorted(ms)), t) for s, ms, t in a.ev_transitions))
    return _product(a, bytes(d), marker_edges, extended=True)


def product_dag_general(a: VsetAutomaton, d: bytes) -> Optional[MappingDAG]:
    """Product DAG of a VA and a document; labels are singletons."""
    marker_edges = tuple(sorted((s, (m,), t) for s, m, t in a.marker_transitions))
    return _product(a, bytes(d), marker_edges, extended=False)


# -- trimming -----------------------------------------------------------------

def _forward(L: Level, mask: int) -> int:
    """Accessible mask of the next level, given accessible slots of ``L``."""
    succ = L.marker_succ
    for s in L.topo:
        if mask >> s & 1:
            mask |= succ[s]
    out = 0
    rows = L.eps_row
    for s in bits(mask):
        out |= rows[s]
    return out


def _closure(L: Level, mask: int) -> int:
    succ = L.marker_succ
    for s in L.topo:
        if mask >> s & 1:
            mask |= succ[s]
    return mask


def _backward(L: Level, next_mask: int) -> int:
    """Co-accessible slots of ``L`` given co-accessible slots of the next level."""
    rows = L.eps_row
    succ = L.marker_succ
    mask = 0
    for s in reversed(L.topo):
        if rows[s] & next_mask or succ[s] & mask:
            mask |= 1 << s
    return mask


def _restrict(L: Level, keep: int, keep_next: int) -> Level:
    slots = list(bits(keep))
    renum = {s: i for i, s in enumerate(slots)}
    renum_next = {s: i for i, s in enumerate(bits(keep_next))}
    marker = tuple((renum[s], lab, renum[d]) for s, lab, d in L.marker_edges
                   if s in renum and d in renum)
    eps = tuple((renum[s], renum_next[d]) for s, d in L.eps_edges
                if s in renum and d in renum_next)
    return Level(tuple(L.states[s] for s in slots), marker, eps, len(renum_next))


def trim_dag(g: Optional[MappingDAG]) -> Optional[MappingDAG]:
    """Keep vertices that are accessible and co-accessible; None if nothing survives."""
    if g is None:
        return None
    levels = g.levels
    D = len(levels)
    fwd = [0] * D
    fwd[0] = _closure(levels[0], 1 << g.initial_slot)
    memo = {}
    mask = 1 << g.initial_slot
    for i in range(D - 1):
        key = (levels[i], mask)
        nxt = memo.get(key)
        if nxt is None:
            nxt = memo[key] = _forward(levels[i], mask)
        mask = nxt
        fwd[i + 1] = mask
    # fwd[i] for i > 0 holds epsilon targets; close them under marker edges
    cmemo = {}
    for i in range(1, D):
        key = (levels[i], fwd[i])
        c = cmemo.get(key)
        if c is None:
            c = cmemo[key] = _closure(levels[i], fwd[i])
        fwd[i] = c

    bwd = [0] * D
    bwd[D - 1] = 1
    memo = {}
    mask = 1
    for i in range(D - 2, -1, -1):
        key = (levels[i], mask)
        prev = memo.get(key)
        if prev is None:
            prev = memo[key] = _backward(levels[i], mask)
        mask = prev
        bwd[i] = mask

    alive = [f & b for f, b in zip(fwd, bwd)]
    if not alive[0] >> g.initial_slot & 1 or not alive[D - 1]:
        return None
    memo = {}
    out = []
    for i in range(D):
        nxt = alive[i + 1] if i + 1 < D else 0
        key = (levels[i], alive[i], nxt)
        L = memo.get(key)
        if L is None:
            L = memo[key] = _restrict(levels[i], alive[i], nxt)
        out.append(L)
    initial = bin(alive[0] & ((1 << g.initial_slot) - 1)).count("1")
    return MappingDAG(out, initial, g.variables, extended=g.extended)


def sort_adjacency(g: Optional[MappingDAG]) -> Optional[MappingDAG]:
    """Order every vertex's marker edges by label, the empty label last."""
    if g is None:
        return None
    for L in set(g.levels):
        L.sorted_adjacency
    return MappingDAG(g.levels, g.initial_slot, g.variables, g.extended, adjacency_sorted=True)


# -- structural checks --------------------------------------------------------

def check_leveled(g: MappingDAG) -> None:
    """Raise AssertionError unless ``g`` satisfies the leveled mapping-DAG invariants."""
    for i, L in enumerate(g.levels):
        nxt_width = g.levels[i + 1].width if i + 1 < len(g.levels) else 0
        assert L.next_width == nxt_width, f"level {i}: next_width mismatch"
        for s, lab, d in L.marker_edges:
            assert 0 <= s < L.width and 0 <= d < L.width
            assert list(lab) == sorted(set(lab)), f"level {i}: label not canonical"
        for s, d in L.eps_edges:
            assert 0 <= s < L.width and 0 <= d < nxt_width
        L.topo  # raises on a cycle
        seen = [set() for _ in range(L.width)]
        for s in L.topo:
            for lab, d in L.marker_out[s]:
                assert seen[s].isdisjoint(lab), f"level {i}: label repeats on a path"
                seen[d] |= seen[s] | set(lab)
    assert g.levels[-1].states == (FINAL_STATE,)
    assert not g.levels[-1].marker_edges and not g.levels[-1].eps_edges


def check_normalized(g: MappingDAG) -> None:
    """Raise AssertionError unless every path alternates marker edge, epsilon edge."""
    for i, L in enumerate(g.levels[:-1]):
        targets = {d for _, _, d in L.marker_edges}
        for s in range(L.width):
            has_marker = bool(L.marker_out[s])
            has_eps = bool(L.eps_out[s])
            assert not (has_marker and has_eps), f"vertex ({i},{s}) mixes edge kinds"
            if s in targets:
                assert not has_marker, f"vertex ({i},{s}) follows a marker edge with another"
        if i + 1 < len(g.levels) - 1:
            nxt = g.levels[i + 1]
            for _, d in L.eps_edges:
                assert not nxt.eps_out[d], f"vertex ({i + 1},{d}) follows an epsilon edge with another"
    assert g.levels[0].marker_out[g.initial_slot], "initial vertex must start with a marker edge"
