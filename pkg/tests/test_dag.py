import random
import re
from collections import defaultdict

from randomgen import all_documents, random_dag, random_sequential_va
from spanrun.automata import SymbolPredicate, VsetAutomaton, expand_to_extended
from spanrun.core import close_marker, open_marker
from spanrun.dag import (
    FINAL_STATE,
    Level,
    LevelSet,
    MappingDAG,
    check_leveled,
    check_normalized,
    product_dag_extended,
    product_dag_general,
    sort_adjacency,
    trim_dag,
)
from spanrun.oracle import brute_force_dag_paths, brute_force_mappings
from spanrun.samples import EMAIL_DOCUMENT, email_eva

OX, CX = open_marker(0), close_marker(0)
A = SymbolPredicate.single(ord("a"))

_EDGE = re.compile(r"^edge (\d+):(\w+) (eps|\[[^\]]*\]) (\d+):(\w+)$")


def check_dump(text, trimmed=True, normalized=False):
    """Independent checker over the text dump; returns the number of vertices."""
    vertices = set()
    edges = []
    for line in text.splitlines():
        if line.startswith("vertex "):
            _, level, state = line.split()
            vertices.add((int(level), state))
            continue
        m = _EDGE.match(line)
        assert m, line
        src = (int(m.group(1)), m.group(2))
        dst = (int(m.group(4)), m.group(5))
        label = m.group(3)
        assert src in vertices and dst in vertices
        if label == "eps":
            assert dst[0] == src[0] + 1
            edges.append((src, None, dst))
        else:
            assert dst[0] == src[0]
            items = [x for x in label[1:-1].split(",") if x]
            for item in items:
                assert int(item.split("@")[1]) == src[0], "pair position differs from level"
            assert len(set(items)) == len(items)
            edges.append((src, frozenset(items), dst))
    depth = max(v[0] for v in vertices) + 1
    final = (depth - 1, "f")
    assert final in vertices
    succ = defaultdict(list)
    pred = defaultdict(list)
    for s, lab, d in edges:
        succ[s].append((lab, d))
        pred[d].append((lab, s))
    # acyclic, and labels never repeat on a path: propagate seen-label sets forward
    order = sorted(vertices, key=lambda v: v[0])
    indeg = {v: len(pred[v]) for v in vertices}
    todo = [v for v in vertices if indeg[v] == 0]
    seen_labels = defaultdict(set)
    visited = 0
    while todo:
        v = todo.pop()
        visited += 1
        for lab, d in succ[v]:
            if lab:
                assert not (seen_labels[v] & lab), "label repeats along a path"
            seen_labels[d] |= seen_labels[v] | (lab or set())
            indeg[d] -= 1
            if indeg[d] == 0:
                todo.append(d)
    assert visited == len(vertices), "cycle"
    if trimmed:
        sources = [v for v in order if not pred[v]]
        assert len(sources) == 1 and sources[0][0] == 0
        fwd = _closure(sources[0], succ)
        bwd = _closure(final, pred)
        assert fwd == vertices and bwd == vertices
    if normalized:
        for v in vertices:
            kinds = {lab is None for lab, _ in succ[v]}
            assert len(kinds) <= 1, "vertex mixes edge kinds"
            for lab, d in succ[v]:
                if d != final:
                    assert {l2 is None for l2, _ in succ[d]} == {lab is not None}
    return len(vertices)


def _closure(start, adj):
    seen = {start}
    todo = [start]
    while todo:
        v = todo.pop()
        for _, w in adj[v]:
            if w not in seen:
                seen.add(w)
                todo.append(w)
    return seen


def email_dag():
    return sort_adjacency(trim_dag(product_dag_extended(email_eva(), EMAIL_DOCUMENT)))


class TestProductExtended:
    def test_email_shape(self):
        raw = product_dag_extended(email_eva(), EMAIL_DOCUMENT)
        check_leveled(raw)
        stats = raw.stats()
        assert stats.depth == 11 and stats.width <= 13

    def test_email_mappings(self):
        g = email_dag()
        assert brute_force_dag_paths(g) == {((OX, 2), (CX, 5)), ((OX, 6), (CX, 9))}
        check_dump(g.dump(), normalized=True)
        check_normalized(g)

    def test_trim_removes_dead_open(self):
        g = email_dag()
        raw = product_dag_extended(email_eva(), EMAIL_DOCUMENT)
        assert raw.slot_of(0, 4) is not None
        assert g.slot_of(0, 4) is None
        assert g.slot_of(1, 5) is None and g.slot_of(1, 6) is None

    def test_empty_document(self):
        a = expand_to_extended(VsetAutomaton(3, 0, frozenset({2}), (), ((0, OX, 1), (1, CX, 2)), ("x",)))
        g = trim_dag(product_dag_extended(a, b""))
        assert g.depth == 2
        assert brute_force_dag_paths(g) == brute_force_mappings(a, b"") == {((OX, 0), (CX, 0))}


class TestProductGeneral:
    def test_unique_path(self):
        a = VsetAutomaton(4, 0, frozenset({3}), ((1, A, 2),), ((0, OX, 1), (2, CX, 3)), ("x",))
        g = trim_dag(product_dag_general(a, b"a"))
        check_leveled(g)
        check_dump(g.dump())
        assert brute_force_dag_paths(g) == {((OX, 0), (CX, 1))}

    def test_no_match_trims_to_nothing(self):
        a = VsetAutomaton(4, 0, frozenset({3}), ((1, A, 2),), ((0, OX, 1), (2, CX, 3)), ("x",))
        assert trim_dag(product_dag_general(a, b"b")) is None

    def test_matches_oracle_and_extended_product(self):
        rng = random.Random(21)
        docs = list(all_documents(3)) + [bytes(rng.choice(b"ab") for _ in range(7)) for _ in range(3)]
        for _ in range(60):
            a = random_sequential_va(rng)
            e = expand_to_extended(a)
            for d in docs:
                expected = brute_force_mappings(a, d)
                g = product_dag_general(a, d)
                check_leveled(g)
                stats = g.stats()
                assert stats.width <= a.state_count and stats.depth == len(d) + 2
                # the final epsilon edges into the sink are not automaton transitions
                assert stats.complete_width <= a.size + len(a.finals)
                assert stats.alphabet_size <= 2 * a.var_count
                gt = trim_dag(g)
                got = brute_force_dag_paths(gt) if gt is not None else set()
                assert got == expected
                ge = trim_dag(product_dag_extended(e, d))
                assert (brute_force_dag_paths(ge) if ge is not None else set()) == expected
                if gt is not None:
                    check_dump(gt.dump())
                if ge is not None:
                    check_normalized(ge)
                    check_dump(ge.dump(), normalized=True)


class TestTrim:
    def test_final_unreachable(self):
        level = Level((0, 1), ((0, (), 1),), (), 1)
        g = MappingDAG([level, Level((FINAL_STATE,))], 0, ())
        assert trim_dag(g) is None

    def test_against_reachability(self):
        rng = random.Random(8)
        checked = 0
        for _ in range(100):
            g = random_dag(rng, trimmed=False)
            t = trim_dag(g)
            fwd = _closure(g.initial_vertex, _adjacency(g, reverse=False))
            bwd = _closure(g.final_vertex, _adjacency(g, reverse=True))
            alive = {(i, g.state(i, s)) for i, s in fwd & bwd}
            if g.initial_vertex not in bwd:
                assert t is None
                continue
            checked += 1
            assert {(i, t.state(i, s)) for i, s in t.vertices()} == alive
            again = trim_dag(t)
            assert again.dump() == t.dump()
            assert brute_force_dag_paths(t) == brute_force_dag_paths(g)
        assert checked > 30


def _adjacency(g, reverse):
    adj = defaultdict(list)
    for s, lab, d in g.edges():
        if reverse:
            adj[d].append((lab, s))
        else:
            adj[s].append((lab, d))
    return adj


class TestSortAdjacency:
    def test_empty_label_last(self):
        level = Level((0, 1, 2, 3), ((0, (CX,), 1), (0, (), 2), (0, (OX,), 3)), ((1, 0), (2, 0), (3, 0)), 1)
        g = sort_adjacency(MappingDAG([level, Level((FINAL_STATE,))], 0, ("x",)))
        order = [level.label_order[r] for r, _ in level.sorted_adjacency[0]]
        assert order == [(OX,), (CX,), ()]
        assert g.adjacency_sorted

    def test_all_empty_is_stable(self):
        level = Level((0, 1, 2), ((0, (), 2), (0, (), 1)), ((1, 0), (2, 0)), 1)
        assert [d for _, d in level.sorted_adjacency[0]] == [2, 1]

    def test_none_passthrough(self):
        assert sort_adjacency(None) is None and trim_dag(None) is None


def test_level_set():
    ls = LevelSet(3, 0b1011)
    assert ls.members() == [0, 1, 3] and len(ls) == 3


def test_long_document_shares_levels():
    g = trim_dag(product_dag_extended(email_eva(), b"ab cd@ef gh " * 2000))
    assert g.depth == 24002
    assert len(set(map(id, g.levels))) < 200
