"""spanrun: enumerate the mappings of a document spanner without duplicates.

Typical use::

    >>> import spanrun
    >>> [spanrun.mapping_to_spans(m, 1) for m in spanrun.mappings(spanrun.EMAIL_PATTERN, b"a a@b b@c")]
    [[Span(begin=2, end=5)], [Span(begin=6, end=9)]]
"""

from .automata import (
    BlowupLimitError,
    ExtendedVsetAutomaton,
    SymbolPredicate,
    VsetAutomaton,
    check_sequential,
    expand_to_extended,
    make_sequential,
    normalize_extended,
    trim,
)
from .core import (
    BudgetExceededError,
    MalformedMappingError,
    Marker,
    Span,
    SpanrunError,
    canonical,
    close_marker,
    mapping_from_json,
    mapping_to_json,
    mapping_to_spans,
    mapping_to_tsv,
    open_marker,
    spans_to_mapping,
)
from .dag import LevelSet, MappingDAG, product_dag_extended, product_dag_general, sort_adjacency, trim_dag
from .enumeration import (
    EnumerationStream,
    enumerate_mappings,
    extend_to_path,
    next_level_extended,
    next_level_general,
)
from .jumpindex import (
    BoolMatrix,
    JumpIndex,
    bool_multiply,
    compute_jump_levels,
    compute_reach_matrices,
    compute_rlevels,
)
from .oracle import brute_force_dag_paths, brute_force_mappings, reference_regex_match
from .pipeline import NotSequentialError, evaluate, mappings, prepare
from .regex import PatternSyntaxError, compile_pattern, parse
from .samples import EMAIL_DOCUMENT, EMAIL_PATTERN, email_eva
from .vafile import AutomatonFormatError, dump_automaton, parse_automaton

__version__ = "0.1.0"
