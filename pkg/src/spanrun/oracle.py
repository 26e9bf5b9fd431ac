"""Brute-force reference evaluators.

Exponential time, guarded by budgets that raise instead of truncating. These
share no code with the enumeration pipeline and serve as ground truth.
"""

from .automata import ExtendedVsetAutomaton, budget
from .core import BudgetExceededError, canonical, close_marker, is_open, marker_var, open_marker
from . import regex as rx


def _valid_step(used, markers):
    """Whether reading ``markers`` (in order) after ``used`` keeps the run valid."""
    seen = set(used)
    for m in markers:
        if m in seen:
            return False
        if not is_open(m) and (m - 1) not in seen:
            return False
        seen.add(m)
    return True


def _all_closed(pairs):
    markers = {m for m, _ in pairs}
    return all(m + 1 in markers for m in markers if is_open(m))


def brute_force_mappings(a, d: bytes, cap=None) -> set:
    """All mappings defined by valid accepting runs of ``a`` on ``d``."""
    if cap is None:
        cap = budget(10**6)
    if a.is_empty:
        return set()
    n = len(d)
    letters = [[] for _ in range(a.state_count)]
    for s, p, t in a.letter_transitions:
        letters[s].append((p, t))
    extended = isinstance(a, ExtendedVsetAutomaton)
    others = [[] for _ in range(a.state_count)]
    for s, x, t in (a.ev_transitions if extended else a.marker_transitions):
        # ev sets are read open-before-close for the same variable
        others[s].append((tuple(sorted(x, key=lambda m: (marker_var(m), m))) if extended else (x,), t))

    results = set()
    start = (a.initial, 0, frozenset())
    seen = {start}
    todo = [start]
    while todo:
        q, i, pairs = todo.pop()
        used = {m for m, _ in pairs}
        nxt = []
        if extended:
            # ev-phase configuration: one ev-transition, then one letter or the end
            for markers, q2 in others[q]:
                if not _valid_step(used, markers):
                    continue
                new = pairs | {(m, i) for m in markers}
                if i == n:
                    if q2 in a.finals and _all_closed(new):
                        results.add(canonical(new))
                    continue
                for p, q3 in letters[q2]:
                    if p.matches(d[i]):
                        nxt.append((q3, i + 1, new))
        else:
            if i == n and q in a.finals and _all_closed(pairs):
                results.add(canonical(pairs))
            if i < n:
                for p, q2 in letters[q]:
                    if p.matches(d[i]):
                        nxt.append((q2, i + 1, pairs))
            for (m,), q2 in others[q]:
                if _valid_step(used, (m,)):
                    nxt.append((q2, i, pairs | {(m, i)}))
        for conf in nxt:
            if conf not in seen:
                seen.add(conf)
                if len(seen) > cap:
                    raise BudgetExceededError("configuration budget exceeded")
                todo.append(conf)
    return results


def brute_force_dag_paths(g, start=None, cap=None) -> set:
    """Label sets of all paths from ``start`` vertices to the final vertex.

    ``start`` is an iterable of ``(level, slot)`` vertices; defaults to the
    initial vertex.
    """
    if cap is None:
        cap = budget(10**5)
    if start is None:
        start = [g.initial_vertex]
    final = g.final_vertex
    memo = {}
    total = 0

    def below(v):
        nonlocal total
        if v in memo:
            return memo[v]
        if v == final:
            out = {frozenset()}
        else:
            level, slot = v
            out = set()
            for label, dst in g.marker_out(level, slot):
                pairs = {(m, level) for m in label}
                for rest in below((level, dst)):
                    out.add(rest | pairs)
            for dst in g.eps_out(level, slot):
                out |= below((level + 1, dst))
        total += len(out)
        if total > cap:
            raise BudgetExceededError("path budget exceeded")
        memo[v] = out
        return out

    result = set()
    for v in start:
        result |= below(v)
    return {canonical(s) for s in result}


def reference_regex_match(f, d: bytes, names=None, max_length: int = 12) -> set:
    """Mappings of a formula on ``d`` by direct recursive matching."""
    if len(d) > max_length:
        raise BudgetExceededError(f"document longer than {max_length}")
    if names is None:
        names = rx.variables(f)
    index = {name: i for i, name in enumerate(names)}
    n = len(d)
    memo = {}

    def join(left, right):
        out = set()
        for a in left:
            am = {m for m, _ in a}
            for b in right:
                if am.isdisjoint(m for m, _ in b):
                    out.add(a | b)
        return out

    def match(node, i, j):
        key = (node, i, j)
        if key in memo:
            return memo[key]
        if isinstance(node, rx.Epsilon):
            out = {frozenset()} if i == j else set()
        elif isinstance(node, rx.Literal):
            out = {frozenset()} if j == i + 1 and d[i] == node.byte else set()
        elif isinstance(node, rx.AnyChar):
            out = {frozenset()} if j == i + 1 else set()
        elif isinstance(node, rx.NegClass):
            out = {frozenset()} if j == i + 1 and d[i] not in node.excluded else set()
        elif isinstance(node, rx.Union):
            out = set()
            for item in node.items:
                out |= match(item, i, j)
        elif isinstance(node, rx.Concat):
            out = seq(node.items, 0, i, j)
        elif isinstance(node, rx.Capture):
            var = index[node.variable]
            tags = {(open_marker(var), i), (close_marker(var), j)}
            out = {s | tags for s in match(node.child, i, j)
                   if open_marker(var) not in {m for m, _ in s}
                   and close_marker(var) not in {m for m, _ in s}}
        elif isinstance(node, rx.Star):
            out = star(node.child, i, j)
        else:
            raise TypeError(f"not a formula node: {node!r}")
        memo[key] = out
        return out

    def seq(items, k, i, j):
        key = (items, k, i, j)
        if key in memo:
            return memo[key]
        if k == len(items) - 1:
            out = match(items[k], i, j)
        else:
            out = set()
            for mid in range(i, j + 1):
                head = match(items[k], i, mid)
                if head:
                    out |= join(head, seq(items, k + 1, mid, j))
        memo[key] = out
        return out

    def star(child, i, j):
        key = ("star", child, i, j)
        if key in memo:
            return memo[key]
        out = {frozenset()} if i == j else set()
        rests = {mid: star(child, mid, j) for mid in range(i + 1, j + 1)}
        for mid, rest in rests.items():
            out |= join(match(child, i, mid), rest)
        # iterations that consume nothing may still add markers
        empty_iter = match(child, i, i)
        while True:
            grown = out | join(empty_iter, out)
            if grown == out:
                break
            out = grown
        memo[key] = out
        return out

    results = set()
    for s in match(f, 0, n):
        if _all_closed(s):
            results.add(canonical(s))
    return results
