"""End-to-end evaluation: spanner + document -> stream of mappings."""

import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from . import regex as rx
from .automata import (
    ExtendedVsetAutomaton,
    VsetAutomaton,
    check_sequential,
    expand_to_extended,
    make_sequential,
    normalize_extended,
    trim,
)
from .core import SpanrunError
from .dag import MappingDAG, product_dag_extended, product_dag_general, sort_adjacency, trim_dag
from .enumeration import EnumerationStream
from .jumpindex import JumpIndex

MODES = ("auto", "extended", "general")


class NotSequentialError(SpanrunError):
    def __init__(self, result):
        super().__init__("automaton is not sequential")
        self.result = result


def load_spanner(spanner):
    """Accept a pattern string, a formula tree, a VA or an extended VA."""
    if isinstance(spanner, str):
        return rx.compile_pattern(spanner)
    if isinstance(spanner, (VsetAutomaton, ExtendedVsetAutomaton)):
        return spanner
    return rx.compile(spanner)


def _level_cost(g: Optional[MappingDAG]) -> int:
    if g is None:
        return 0
    return sum(L.size * k for L, k in Counter(g.levels).items())


@dataclass
class Prepared:
    automaton: object
    dag: Optional[MappingDAG]
    index: Optional[JumpIndex]
    mode: str
    steps: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def preprocessing_steps(self) -> int:
        return sum(self.steps.values())

    def enumerate(self, check_order: bool = False) -> EnumerationStream:
        stream = EnumerationStream(self.dag, self.index, self.mode, check_order)
        stream.preprocessing_steps = self.preprocessing_steps
        return stream


def prepare_automaton(spanner, mode: str = "auto", sequentialize: bool = False):
    """Load, trim, check and (if asked) convert; returns ``(automaton, mode)``."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    a = load_spanner(spanner)
    if isinstance(a, ExtendedVsetAutomaton):
        if mode == "general":
            raise ValueError("general mode needs a VA; extended VAs run in extended mode")
        a = trim(normalize_extended(a))
        result = check_sequential(a)
        if not result:
            raise NotSequentialError(result)
        return a, "extended"
    a = trim(a)
    result = check_sequential(a)
    if not result:
        if not sequentialize:
            raise NotSequentialError(result)
        a = make_sequential(a)
    if mode == "extended":
        return expand_to_extended(a), "extended"
    return a, "general"


def prepare(spanner, document: bytes, mode: str = "auto", sequentialize: bool = False) -> Prepared:
    """Build the trimmed product DAG and its jump index."""
    start = time.perf_counter()
    a, mode = prepare_automaton(spanner, mode, sequentialize)
    document = bytes(document)
    steps = {}
    if mode == "extended":
        raw = product_dag_extended(a, document)
    else:
        raw = product_dag_general(a, document)
    steps["product"] = _level_cost(raw)
    g = trim_dag(raw)
    steps["trim"] = 2 * steps["product"]
    index = None
    if g is not None:
        if mode == "extended":
            g = sort_adjacency(g)
        steps["sort"] = _level_cost(g)
        index = JumpIndex.build(g)
        steps["index"] = index.steps
    return Prepared(a, g, index, mode, steps, time.perf_counter() - start)


def evaluate(spanner, document: bytes, mode: str = "auto", sequentialize: bool = False,
             check_order: bool = False) -> EnumerationStream:
    """Stream the mappings of ``spanner`` on ``document``."""
    return prepare(spanner, document, mode, sequentialize).enumerate(check_order)


def mappings(spanner, document: bytes, mode: str = "auto", sequentialize: bool = False) -> list:
    """All mappings as a list, in enumeration order."""
    return list(evaluate(spanner, document, mode, sequentialize))
