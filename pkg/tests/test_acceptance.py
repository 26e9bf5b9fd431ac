"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the summary section
"acceptance criteria" lists every criterion with its measured numbers.
"""

import itertools
import random
import time

import pytest

from randomgen import all_documents, random_dag, random_level_graph, random_sequential_va
from spanrun.automata import expand_to_extended
from spanrun.bench import linear_fit, run_bench
from spanrun.core import BudgetExceededError, close_marker, open_marker
from spanrun.dag import LevelSet
from spanrun.enumeration import MEMORY_CONSTANT, extend_to_path
from spanrun.jumpindex import JumpIndex
from spanrun.oracle import brute_force_dag_paths, brute_force_mappings
from spanrun.pipeline import evaluate, prepare
from spanrun.samples import EMAIL_DOCUMENT, EMAIL_PATTERN, email_eva
from test_dag import email_dag
from test_enumeration import exhaustive_extend
from test_jumpindex import _graph, oracle_jl, oracle_reach

OX, CX = open_marker(0), close_marker(0)
BENCH_SIZES = (10**4, 10**5, 10**6)


def report(record_property, ok, detail):
    record_property("detail", detail)
    print(f"{'PASS' if ok else 'FAIL'}: {detail}")


def _run(a, d, mode):
    stream = prepare(a, d, mode=mode).enumerate(check_order=True)
    got = list(stream)
    return got, stream


@pytest.fixture(scope="module")
def conformance():
    """Criterion 1 workload; the stream statistics also feed criteria 6 and 9."""
    rng = random.Random(1)
    short = list(all_documents(5))
    start = time.perf_counter()
    out = {"instances": 0, "mismatches": [], "duplicates": 0, "streams": [], "captures": 0}
    for _ in range(1000):
        a = random_sequential_va(rng, max_states=6, max_vars=2)
        long_docs = [bytes(rng.choice(b"ab") for _ in range(7)) for _ in range(10)]
        for d in short + long_docs:
            got, stream = _run(a, d, "general")
            out["instances"] += 1
            out["duplicates"] += len(got) - len(set(got))
            out["captures"] += sum(1 for m in got if m)
            if set(got) != brute_force_mappings(a, d):
                out["mismatches"].append((a, d))
            out["streams"].append(stream)
    out["seconds"] = time.perf_counter() - start
    return out


@pytest.fixture(scope="module")
def agreement():
    """Criterion 2 workload."""
    rng = random.Random(2)
    docs = list(all_documents(4)) + [bytes(rng.choice(b"ab") for _ in range(6)) for _ in range(4)]
    out = {"vas": 0, "skipped": 0, "mismatches": [], "streams": []}
    while out["vas"] < 300:
        a = random_sequential_va(rng, max_states=6, max_vars=2)
        try:
            e = expand_to_extended(a)
        except BudgetExceededError:
            out["skipped"] += 1
            continue
        out["vas"] += 1
        for d in docs:
            general, s1 = _run(a, d, "general")
            extended, s2 = _run(e, d, "extended")
            out["streams"] += [s1, s2]
            if set(general) != set(extended) or len(extended) != len(set(extended)):
                out["mismatches"].append((a, d))
    return out


@pytest.fixture(scope="module")
def bench():
    start = time.perf_counter()
    records = run_bench(EMAIL_PATTERN, BENCH_SIZES, "email", seed=0)
    return records, time.perf_counter() - start


@pytest.mark.criterion(1, "oracle equivalence on 1000 random sequential VAs")
def test_oracle_equivalence(conformance, record_property):
    c = conformance
    ok = not c["mismatches"] and c["duplicates"] == 0 and c["seconds"] < 300
    report(record_property, ok, f"{c['instances']} runs, {len(c['mismatches'])} mismatches, "
                                f"{c['duplicates']} duplicates, {c['captures']} non-empty mappings, "
                                f"{c['seconds']:.1f}s")
    assert not c["mismatches"], c["mismatches"][:3]
    assert c["duplicates"] == 0
    assert c["seconds"] < 300


@pytest.mark.criterion(2, "general and extended pipelines agree on 300 VAs")
def test_pipeline_agreement(agreement, record_property):
    g = agreement
    ok = not g["mismatches"]
    report(record_property, ok, f"{g['vas']} VAs ({g['skipped']} over expansion budget), "
                                f"{len(g['mismatches'])} mismatches")
    assert ok, g["mismatches"][:3]


@pytest.mark.criterion(3, "worked email example and Rlevel(3)")
def test_worked_example(record_property):
    got = list(evaluate(email_eva(), EMAIL_DOCUMENT))
    expected = [((OX, 2), (CX, 5)), ((OX, 6), (CX, 9))]
    rlevel3 = JumpIndex.build(email_dag()).rlevels(3)
    ok = got == expected and rlevel3 == {5, 6}
    report(record_property, ok, f"mappings={got}, Rlevel(3)={sorted(rlevel3)}")
    assert got == expected
    assert rlevel3 == {5, 6}


@pytest.mark.criterion(4, "max output delay at 10^6 within 1.5x of 10^4")
def test_delay_constancy(bench, record_property):
    records, seconds = bench
    delays = [r.max_delay_steps for r in records]
    ok = delays[-1] <= 1.5 * delays[0] and seconds < 120
    report(record_property, ok, f"max delay steps {delays} at n={list(BENCH_SIZES)}, "
                                f"outputs {[r.outputs for r in records]}, {seconds:.1f}s")
    assert all(r.outputs > 0 for r in records)
    assert delays[-1] <= 1.5 * delays[0]
    assert seconds < 120


@pytest.mark.criterion(5, "preprocessing steps linear in n (residual < 10%)")
def test_preprocessing_linear(bench, record_property):
    records, _ = bench
    xs = [r.n for r in records]
    ys = [r.preprocessing_steps for r in records]
    a, b, residuals = linear_fit(xs, ys)
    ok = max(residuals) < 0.10
    report(record_property, ok, f"steps={ys}, fit a={a:.2f} b={b:.0f}, "
                                f"residuals={[round(r, 4) for r in residuals]}")
    assert ok


@pytest.mark.criterion(6, "stack depth <= r_max+1 and memory <= c(r_max+1)W")
def test_memory_bound(conformance, agreement, record_property):
    streams = conformance["streams"] + agreement["streams"]
    worst_stack = 0
    worst_ratio = 0.0
    violations = 0
    for s in streams:
        if s.dag is None:
            continue
        r1 = s.r_max + 1
        worst_stack = max(worst_stack, s.peak_stack - r1)
        violations += s.stack_violations
        worst_ratio = max(worst_ratio, s.peak_memory / (r1 * s.dag.stats().width))
    ok = worst_stack <= 0 and violations == 0 and worst_ratio <= MEMORY_CONSTANT
    report(record_property, ok, f"{len(streams)} streams, max(peak_stack-(r_max+1))={worst_stack}, "
                                f"max memory/((r_max+1)W)={worst_ratio:.2f} (c={MEMORY_CONSTANT})")
    assert ok


@pytest.mark.criterion(7, "jump, JL, Rlevel and Reach on 500 random DAGs")
def test_jump_correctness(record_property):
    rng = random.Random(7)
    built = checks = 0
    while built < 500:
        g = random_dag(rng, max_levels=12, max_width=8)
        if g is None:
            continue
        built += 1
        idx = JumpIndex.build(g)
        succ = _graph(g)
        for v in g.vertices():
            assert idx.jl(*v) == oracle_jl(g, succ, v)
        for i, L in enumerate(g.levels):
            assert idx.rlevels(i) == {oracle_jl(g, succ, (i, s)) for s in range(L.width)}
            for j in idx.rlevels(i) - {i}:
                m = idx.reach(i, j)
                for s in range(L.width):
                    assert {(j, t) for t in range(m.ncols) if m.rows[s] >> t & 1} == \
                        oracle_reach(succ, [(i, s)], j)
            for _ in range(2):
                ls = LevelSet(i, rng.randrange(1, 1 << L.width))
                jumped = idx.jump(ls)
                assert brute_force_dag_paths(g, [(jumped.level, s) for s in jumped.members()]) == \
                    brute_force_dag_paths(g, [(i, s) for s in ls.members()])
                checks += 1
    report(record_property, True, f"{built} DAGs, {checks} sampled level sets")


@pytest.mark.criterion(8, "extend_to_path against exhaustive path search")
def test_extend_to_path_exhaustive(record_property):
    rng = random.Random(8)
    cases = 0
    for _ in range(1000):
        level = random_level_graph(rng, n_vertices=rng.randint(1, 12), n_labels=4)
        start = set(rng.sample(range(level.width), rng.randint(1, level.width)))
        chosen = rng.sample(range(4), rng.randint(0, 3))
        for signs in itertools.product((0, 1, 2), repeat=len(chosen)):
            s_plus = frozenset(l for l, s in zip(chosen, signs) if s == 1)
            s_minus = frozenset(l for l, s in zip(chosen, signs) if s == 2)
            assert extend_to_path(level, start, s_plus, s_minus) == \
                exhaustive_extend(level, start, s_plus, s_minus)
            cases += 1
    report(record_property, True, f"1000 graphs, {cases} S+/S- partitions")


@pytest.mark.criterion(9, "empty label is the last item of every NextLevel stream")
def test_empty_label_last(conformance, agreement, record_property):
    # the streams ran with check_order=True, which raises on any item after the empty label
    streams = conformance["streams"] + agreement["streams"]
    items = sum(s.items_seen for s in streams)
    empties = sum(s.empty_labels_seen for s in streams)
    ok = items > 0 and empties > 0
    report(record_property, ok, f"{len(streams)} streams, {items} NextLevel items, "
                                f"{empties} empty labels, 0 ordering errors")
    assert ok
