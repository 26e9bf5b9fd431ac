"""Shared vocabulary: markers, spans, mappings and their serializations.

Markers are small integers: ``2 * var`` opens variable ``var`` and
``2 * var + 1`` closes it. A mapping is a canonical tuple of
``(marker, position)`` pairs sorted by ``(position, marker)``, which orders
pairs by position, then variable, then open before close.
"""

import json
from typing import Iterable, NamedTuple, Optional, Sequence


class SpanrunError(Exception):
    """Base class for all errors raised by this package."""


class MalformedMappingError(SpanrunError, ValueError):
    pass


class BudgetExceededError(SpanrunError):
    """A size guard tripped; results would otherwise be truncated."""


OPEN = "open"
CLOSE = "close"


class Span(NamedTuple):
    begin: int
    end: int

    def __str__(self):
        return f"<{self.begin},{self.end}>"


class Marker(NamedTuple):
    kind: str
    variable: int

    @property
    def code(self) -> int:
        return open_marker(self.variable) if self.kind == OPEN else close_marker(self.variable)

    @classmethod
    def from_code(cls, code: int) -> "Marker":
        return cls(OPEN if is_open(code) else CLOSE, marker_var(code))


def open_marker(var: int) -> int:
    return 2 * var


def close_marker(var: int) -> int:
    return 2 * var + 1


def marker_var(code: int) -> int:
    return code >> 1


def is_open(code: int) -> bool:
    return not code & 1


def marker_name(code: int, names: Optional[Sequence[str]] = None) -> str:
    var = marker_var(code)
    name = names[var] if names is not None else str(var)
    return ("+" if is_open(code) else "-") + name


Mapping = tuple  # tuple[tuple[int, int], ...] of (marker, position)


def canonical(pairs: Iterable[tuple]) -> Mapping:
    """Return the canonical form of a collection of ``(marker, position)`` pairs.

    Raises MalformedMappingError if a marker occurs twice.
    """
    out = tuple(sorted(set(pairs), key=lambda p: (p[1], p[0])))
    seen = set()
    for marker, _ in out:
        if marker in seen:
            raise MalformedMappingError(f"marker {marker_name(marker)} occurs twice")
        seen.add(marker)
    return out


def mapping_to_spans(m: Mapping, var_count: int) -> list:
    """Convert a mapping into one optional Span per variable."""
    opens = {}
    closes = {}
    for marker, pos in m:
        var = marker_var(marker)
        if var >= var_count:
            raise MalformedMappingError(f"variable {var} out of range")
        target = opens if is_open(marker) else closes
        if var in target:
            raise MalformedMappingError(f"marker {marker_name(marker)} occurs twice")
        target[var] = pos
    spans = [None] * var_count
    for var in range(var_count):
        if (var in opens) != (var in closes):
            raise MalformedMappingError(f"variable {var} has a dangling marker")
        if var in opens:
            if opens[var] > closes[var]:
                raise MalformedMappingError(f"variable {var} closes before it opens")
            spans[var] = Span(opens[var], closes[var])
    return spans


def spans_to_mapping(spans: Sequence[Optional[Span]]) -> Mapping:
    pairs = []
    for var, span in enumerate(spans):
        if span is not None:
            pairs.append((open_marker(var), span[0]))
            pairs.append((close_marker(var), span[1]))
    return canonical(pairs)


def mapping_to_json(m: Mapping, names: Sequence[str]) -> str:
    pairs = [[OPEN if is_open(mk) else CLOSE, names[marker_var(mk)], pos] for mk, pos in m]
    return json.dumps({"pairs": pairs}, separators=(",", ":"))


def mapping_from_json(line: str, names: Sequence[str]) -> Mapping:
    index = {name: i for i, name in enumerate(names)}
    pairs = []
    for kind, name, pos in json.loads(line)["pairs"]:
        var = index[name]
        pairs.append((open_marker(var) if kind == OPEN else close_marker(var), pos))
    return canonical(pairs)


def mapping_to_tsv(m: Mapping, names: Sequence[str]) -> str:
    fields = []
    for name, span in zip(names, mapping_to_spans(m, len(names))):
        fields.append("-" if span is None else f"{name}={span.begin}..{span.end}")
    return "\t".join(fields)


def format_mapping(m: Mapping, names: Optional[Sequence[str]] = None) -> str:
    return "{" + ", ".join(f"({marker_name(mk, names)},{pos})" for mk, pos in m) + "}"
