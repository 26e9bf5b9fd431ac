"""Duplicate-free enumeration of the mappings of a trimmed mapping DAG.

The enumerator keeps a stack of frames, one per level set being expanded.
Each frame owns a NextLevel stream that yields ``(label, next level set)``
pairs, the empty label last. Non-empty labels push a new frame; the empty
label replaces the current frame (a tail call), so the stack never holds
more frames than the current partial mapping has labels, plus one.

Two NextLevel implementations are provided: a k-way merge of sorted edge
lists for DAGs built from extended VAs, and a flashlight search over label
subsets for DAGs built from plain VAs, where one label set may be spread
over a path of single-marker edges.
"""

from typing import Optional

from .core import SpanrunError, canonical
from .dag import LevelSet, MappingDAG, bits

MEMORY_CONSTANT = 10


class OrderingError(SpanrunError, AssertionError):
    pass


class StepMeter:
    """Counts vertex touches, edge touches and matrix-row operations."""

    __slots__ = ("steps",)

    def __init__(self):
        self.steps = 0


def _popcount(x):
    return bin(x).count("1")


# -- NextLevel for normalized DAGs --------------------------------------------

def next_level_extended(g: MappingDAG, ls: LevelSet, meter: Optional[StepMeter] = None):
    """Stream ``(label, level set)`` for every distinct label leaving ``ls``.

    The level set reached is: follow every edge with that label, then one
    epsilon edge. Labels come in the level's canonical order, empty last.
    """
    i, mask = ls
    L = g.levels[i]
    adj = L.sorted_adjacency
    labels = L.label_order
    eps_row = L.eps_row
    cursors = [[adj[s], 0] for s in bits(mask) if adj[s]]
    if meter is not None:
        meter.steps += len(cursors) + 1
    while cursors:
        best = min(c[0][c[1]][0] for c in cursors)
        targets = 0
        touched = 0
        live = []
        for c in cursors:
            edges, pos = c
            while pos < len(edges) and edges[pos][0] == best:
                targets |= 1 << edges[pos][1]
                pos += 1
                touched += 1
            c[1] = pos
            if pos < len(edges):
                live.append(c)
        cursors = live
        nxt = 0
        for t in bits(targets):
            nxt |= eps_row[t]
        if meter is not None:
            meter.steps += touched + len(cursors) + _popcount(targets) + len(labels[best]) + 1
        yield labels[best], LevelSet(i + 1, nxt)


# -- flashlight search for general DAGs ---------------------------------------

def _extend_bits(L, start: int, plus: int, minus: int, meter=None) -> int:
    """Slots reachable from ``start`` by a path seeing each label of ``plus`` once and none of ``minus``.

    Labels are bits over ``L.alphabet``. A fresh label bit above the
    alphabet marks paths that come from ``start``; for each vertex we keep
    the label set seen on the way in, and two incomparable incoming sets
    collapse to the empty set (no single path can carry both).
    """
    fresh = 1 << len(L.alphabet)
    full = plus | fresh
    preds = L.preds
    chi = [None] * len(L.states)
    result = 0
    work = 0
    for v in L.topo:
        union = 0
        cands = []
        if start >> v & 1:
            cands.append(fresh)
            union = fresh
        for u, lab in preds[v]:
            work += 1
            cu = chi[u]
            if cu is None or lab & minus:
                continue
            c = (cu | lab) & full
            cands.append(c)
            union |= c
        if not cands:
            continue
        value = union if union in cands else 0
        chi[v] = value
        if value == full:
            result |= 1 << v
    if meter is not None:
        meter.steps += work + len(L.states)
    return result


def extend_to_path(level, start, s_plus, s_minus) -> set:
    """Vertices of ``level`` reachable from ``start`` by an S+/S- path.

    ``level`` is a :class:`~spanrun.dag.Level` whose epsilon edges are
    ignored; ``start`` is an iterable of slots; ``s_plus`` and ``s_minus``
    are disjoint collections of labels (markers). A path qualifies when it
    sees every label of ``s_plus`` exactly once and no label of ``s_minus``.
    """
    s_plus, s_minus = set(s_plus), set(s_minus)
    if s_plus & s_minus:
        raise ValueError("S+ and S- must be disjoint")
    index = {m: k for k, m in enumerate(level.alphabet)}
    if not s_plus <= index.keys():
        return set()
    plus = sum(1 << index[m] for m in s_plus)
    minus = sum(1 << index[m] for m in s_minus if m in index)
    mask = 0
    for s in start:
        mask |= 1 << s
    return set(bits(_extend_bits(level, mask, plus, minus)))


def next_level_general(g: MappingDAG, ls: LevelSet, meter: Optional[StepMeter] = None):
    """Stream ``(label set, level set)`` by depth-first search over label subsets.

    Labels of the level are decided one at a time, included first. A
    partial decision is explored only if some path from ``ls`` respects it
    and ends in an epsilon edge. The search keeps only the current included
    set and backtracks by re-testing, so its state is one integer.
    """
    i, start = ls
    L = g.levels[i]
    K = len(L.alphabet)
    alphabet = L.alphabet
    eps_row = L.eps_row

    def good(plus, depth):
        minus = ((1 << depth) - 1) & ~plus
        reached = _extend_bits(L, start, plus, minus, meter)
        out = 0
        for v in bits(reached):
            out |= eps_row[v]
        return out

    plus = 0
    depth = 0
    nxt = good(0, 0)
    if not nxt:
        return
    while True:
        while depth < K:
            bit = 1 << depth
            r = good(plus | bit, depth + 1)
            if r:
                plus |= bit
                nxt = r
            elif depth + 1 == K:
                nxt = good(plus, depth + 1)
            depth += 1
        yield tuple(alphabet[k] for k in bits(plus)), LevelSet(i + 1, nxt)
        # backtrack to the deepest included label whose excluded sibling is good
        while True:
            if not plus:
                return
            k = plus.bit_length() - 1
            plus &= ~(1 << k)
            r = good(plus, k + 1)
            if r:
                depth = k + 1
                nxt = r
                break


# -- the enumerator -----------------------------------------------------------

class EnumerationStream:
    """Iterator over the mappings of a trimmed DAG, with instrumentation.

    ``mode`` is ``"extended"`` for normalized DAGs with sorted adjacency and
    ``"general"`` otherwise. With ``check_order`` the stream verifies after
    every empty label that its NextLevel stream is exhausted.
    """

    def __init__(self, dag: Optional[MappingDAG], index, mode: str = "general",
                 check_order: bool = False):
        if mode not in ("extended", "general"):
            raise ValueError(f"unknown mode {mode!r}")
        if dag is not None and mode == "extended" and not dag.adjacency_sorted:
            raise ValueError("extended mode needs sorted adjacency")
        self.dag = dag
        self.index = index
        self.mode = mode
        self.check_order = check_order
        self.meter = StepMeter()
        self.outputs = 0
        self.max_delay = 0
        self.max_delay_per_size = 0.0
        self.peak_stack = 0
        self.peak_memory = 0
        self.r_max = 0
        self.stack_violations = 0
        self.empty_labels_seen = 0
        self.items_seen = 0
        self.preprocessing_steps = 0
        self._last = 0
        self._gen = self._run()

    def __iter__(self):
        return self

    def __next__(self):
        return next(self._gen)

    def _emit(self, mapping):
        now = self.meter.steps
        delay = now - self._last
        self._last = now
        r = len(mapping)
        self.outputs += 1
        self.max_delay = max(self.max_delay, delay)
        self.max_delay_per_size = max(self.max_delay_per_size, delay / (r + 1))
        self.r_max = max(self.r_max, r)

    def _run(self):
        g = self.dag
        if g is None:
            return
        if not g.variables:
            self._emit(())
            yield ()
            return
        meter = self.meter
        index = self.index
        next_level = next_level_extended if self.mode == "extended" else next_level_general
        final = g.final_level
        levels = g.levels
        check = self.check_order
        stack = []  # frames: [stream, link, words, chain length]
        memory = 0

        pending = (LevelSet(0, 1 << g.initial_slot), None, 0)
        while True:
            if pending is not None:
                ls, link, depth_r = pending
                pending = None
                ls = index.jump(ls, meter)
                if ls.level == final:
                    pairs = []
                    node = link
                    while node is not None:
                        label, pos, node = node
                        pairs.extend((m, pos) for m in label)
                    meter.steps += len(pairs) + 1
                    mapping = canonical(pairs)
                    self._emit(mapping)
                    yield mapping
                else:
                    size = _popcount(ls.mask)
                    if self.mode == "extended":
                        cursor = size
                    else:
                        cursor = len(levels[ls.level].alphabet) + 1
                    words = size + cursor + 2 + (len(link[0]) if link else 0)
                    stack.append([next_level(g, ls, meter), link, words, depth_r])
                    memory += words
                    if len(stack) > self.peak_stack:
                        self.peak_stack = len(stack)
                    if memory > self.peak_memory:
                        self.peak_memory = memory
                    if len(stack) > depth_r + 1:
                        self.stack_violations += 1
            if not stack:
                break
            frame = stack[-1]
            item = next(frame[0], None)
            if item is None:
                stack.pop()
                memory -= frame[2]
                continue
            self.items_seen += 1
            label, nls = item
            if not label:
                self.empty_labels_seen += 1
                if check and next(frame[0], None) is not None:
                    raise OrderingError(f"empty label not last at level {nls.level - 1}")
                stack.pop()
                memory -= frame[2]
                pending = (nls, frame[1], frame[3])
            else:
                pending = (nls, (label, nls.level - 1, frame[1]), frame[3] + len(label))
        tail = self.meter.steps - self._last
        self.max_delay = max(self.max_delay, tail)

    def stats(self) -> dict:
        return {
            "outputs": self.outputs,
            "preprocessing_steps": self.preprocessing_steps,
            "max_delay_steps": self.max_delay,
            "max_delay_per_size": self.max_delay_per_size,
            "enumeration_steps": self.meter.steps,
            "peak_stack": self.peak_stack,
            "peak_memory_words": self.peak_memory,
            "r_max": self.r_max,
        }


def enumerate_mappings(g: Optional[MappingDAG], index, mode: str = "general",
                       check_order: bool = False) -> EnumerationStream:
    """Stream the mappings of ``g`` (None means no mappings)."""
    return EnumerationStream(g, index, mode, check_order)
