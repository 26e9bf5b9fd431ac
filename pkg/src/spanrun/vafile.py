"""Line-oriented text format for VAs and extended VAs.

::

    va                      # or: eva
    vars x y                # optional; fixes variable order
    states 4
    initial 0
    final 3
    t 1 'a' 2               # letter edge: 'c', any, except:'c1c2'
    open 0 x 1              # va only
    close 2 x 3
    ev 0 [+x,-y] 1          # eva only; [] is the empty marker set

``#`` starts a comment. Inside quotes, ``\\xNN``, ``\\'`` and ``\\\\`` escape.
"""

import re

from .automata import ExtendedVsetAutomaton, SymbolPredicate, VsetAutomaton
from .core import SpanrunError, close_marker, is_open, marker_var, open_marker


class AutomatonFormatError(SpanrunError):
    def __init__(self, message, line=None):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


_QUOTED = r"'(?:[^'\\]|\\.)*'"
_LETTER_RE = re.compile(rf"^t\s+(\d+)\s+({_QUOTED}|any|except:{_QUOTED})\s+(\d+)$")
_EV_RE = re.compile(r"^ev\s+(\d+)\s+\[([^\]]*)\]\s+(\d+)$")


def _unquote(text, lineno):
    body = text[1:-1]
    out = []
    i = 0
    while i < len(body):
        c = body[i]
        if c == "\\":
            if i + 1 >= len(body):
                raise AutomatonFormatError("dangling escape", lineno)
            nxt = body[i + 1]
            if nxt == "x":
                try:
                    out.append(int(body[i + 2:i + 4], 16))
                except ValueError:
                    raise AutomatonFormatError("bad \\x escape", lineno) from None
                i += 4
                continue
            out.append(ord(nxt))
            i += 2
            continue
        if ord(c) > 0x7F:
            raise AutomatonFormatError("non-ASCII byte must be \\x-escaped", lineno)
        out.append(ord(c))
        i += 1
    return out


def _predicate(text, lineno):
    if text == "any":
        return SymbolPredicate.any()
    if text.startswith("except:"):
        return SymbolPredicate.except_(_unquote(text[len("except:"):], lineno))
    chars = _unquote(text, lineno)
    if len(chars) != 1:
        raise AutomatonFormatError("letter edge needs exactly one byte", lineno)
    return SymbolPredicate.single(chars[0])


def parse_automaton(text: str):
    """Parse the text format into a VsetAutomaton or ExtendedVsetAutomaton."""
    kind = None
    states = None
    initial = None
    finals = []
    variables = []
    index = {}
    letters, markers, evs = [], [], []

    def var_id(name):
        if name not in index:
            index[name] = len(variables)
            variables.append(name)
        return index[name]

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        words = line.split()
        head = words[0]
        try:
            if kind is None:
                if head not in ("va", "eva") or len(words) != 1:
                    raise AutomatonFormatError("expected 'va' or 'eva' header", lineno)
                kind = head
            elif head == "vars":
                for name in words[1:]:
                    var_id(name)
            elif head == "states":
                states = int(words[1])
            elif head == "initial":
                initial = int(words[1])
            elif head == "final":
                finals.extend(int(w) for w in words[1:])
            elif head == "t":
                m = _LETTER_RE.match(line)
                if not m:
                    raise AutomatonFormatError("malformed letter edge", lineno)
                letters.append((int(m.group(1)), _predicate(m.group(2), lineno), int(m.group(3))))
            elif head in ("open", "close") and kind == "va":
                if len(words) != 4:
                    raise AutomatonFormatError("malformed marker edge", lineno)
                v = var_id(words[2])
                code = open_marker(v) if head == "open" else close_marker(v)
                markers.append((int(words[1]), code, int(words[3])))
            elif head == "ev" and kind == "eva":
                m = _EV_RE.match(line)
                if not m:
                    raise AutomatonFormatError("malformed ev edge", lineno)
                codes = set()
                for item in filter(None, (s.strip() for s in m.group(2).split(","))):
                    if item[0] not in "+-" or len(item) < 2:
                        raise AutomatonFormatError(f"bad marker {item!r}", lineno)
                    v = var_id(item[1:])
                    codes.add(open_marker(v) if item[0] == "+" else close_marker(v))
                evs.append((int(m.group(1)), tuple(sorted(codes)), int(m.group(3))))
            else:
                raise AutomatonFormatError(f"unknown directive {head!r}", lineno)
        except (ValueError, IndexError) as exc:
            if isinstance(exc, AutomatonFormatError):
                raise
            raise AutomatonFormatError(str(exc) or "malformed line", lineno) from None

    if kind is None:
        raise AutomatonFormatError("missing header")
    if states is None or initial is None:
        raise AutomatonFormatError("missing 'states' or 'initial'")
    try:
        if kind == "va":
            return VsetAutomaton(states, initial, frozenset(finals), tuple(letters),
                                 tuple(markers), tuple(variables))
        return ExtendedVsetAutomaton(states, initial, frozenset(finals), tuple(letters),
                                     tuple(evs), tuple(variables))
    except ValueError as exc:
        raise AutomatonFormatError(str(exc)) from None


def _strip_comment(raw):
    quoted = False
    escaped = False
    for i, c in enumerate(raw):
        if escaped:
            escaped = False
        elif c == "\\":
            escaped = True
        elif c == "'":
            quoted = not quoted
        elif c == "#" and not quoted:
            return raw[:i]
    return raw


def dump_automaton(a) -> str:
    extended = isinstance(a, ExtendedVsetAutomaton)
    lines = ["eva" if extended else "va"]
    if a.variables:
        lines.append("vars " + " ".join(a.variables))
    if a.is_empty:
        lines += ["states 0", "initial 0", "final"]
        return "\n".join(lines) + "\n"
    lines.append(f"states {a.state_count}")
    lines.append(f"initial {a.initial}")
    lines.append("final " + " ".join(str(q) for q in sorted(a.finals)))
    for s, p, d in sorted(a.letter_transitions, key=lambda t: (t[0], t[2], str(t[1]))):
        lines.append(f"t {s} {p} {d}")
    if extended:
        for s, ms, d in sorted(a.ev_transitions):
            body = ",".join(("+" if is_open(m) else "-") + a.variables[marker_var(m)] for m in ms)
            lines.append(f"ev {s} [{body}] {d}")
    else:
        for s, m, d in sorted(a.marker_transitions):
            word = "open" if is_open(m) else "close"
            lines.append(f"{word} {s} {a.variables[marker_var(m)]} {d}")
    return "\n".join(lines) + "\n"
