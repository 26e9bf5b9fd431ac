"""Regex formulas with capture variables.

Grammar::

    union  := concat ('|' concat)*
    concat := star+
    star   := atom ('*' | '+' | '?')?
    atom   := literal | '.' | '[^...]' | '[...]' | '(' union ')'
            | ident '{' union '}' | 'ε'

A maximal run of ``[A-Za-z0-9_]`` directly followed by ``{`` names a capture
variable. ``\\`` escapes a metacharacter; ``\\xNN``, ``\\n``, ``\\t`` and
``\\r`` denote bytes. ``e+`` and ``e?`` are sugar for ``ee*`` and ``e|ε``.
"""

from dataclasses import dataclass

from .automata import SymbolPredicate, VsetAutomaton
from .core import SpanrunError, close_marker, open_marker


class PatternSyntaxError(SpanrunError):
    def __init__(self, message, offset):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


@dataclass(frozen=True)
class Epsilon:
    pass


@dataclass(frozen=True)
class Literal:
    byte: int


@dataclass(frozen=True)
class AnyChar:
    pass


@dataclass(frozen=True)
class NegClass:
    excluded: frozenset


@dataclass(frozen=True)
class Concat:
    items: tuple


@dataclass(frozen=True)
class Union:
    items: tuple


@dataclass(frozen=True)
class Star:
    child: object


@dataclass(frozen=True)
class Capture:
    variable: str
    child: object


_META = set("|*+?(){}[].\\")
_IDENT = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_")
_ESCAPES = {"n": 0x0A, "t": 0x09, "r": 0x0D}


class _Parser:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def peek(self):
        return self.text[self.pos] if self.pos < len(self.text) else None

    def expect(self, c):
        if self.peek() != c:
            raise PatternSyntaxError(f"expected {c!r}", self.pos)
        self.pos += 1

    def parse(self):
        node = self.union()
        if self.pos != len(self.text):
            raise PatternSyntaxError(f"unexpected {self.peek()!r}", self.pos)
        return node

    def union(self):
        items = [self.concat()]
        while self.peek() == "|":
            self.pos += 1
            items.append(self.concat())
        return items[0] if len(items) == 1 else Union(tuple(items))

    def concat(self):
        items = []
        while self.peek() is not None and self.peek() not in "|)}":
            node = self.star()
            if isinstance(node, Concat):
                items.extend(node.items)
            else:
                items.append(node)
        if not items:
            raise PatternSyntaxError("empty expression", self.pos)
        return items[0] if len(items) == 1 else Concat(tuple(items))

    def star(self):
        node = self.atom()
        c = self.peek()
        if c == "*":
            self.pos += 1
            return Star(node)
        if c == "+":
            self.pos += 1
            return Concat((node, Star(node)))
        if c == "?":
            self.pos += 1
            return Union((node, Epsilon()))
        return node

    def atom(self):
        start = self.pos
        c = self.peek()
        if c is None:
            raise PatternSyntaxError("unexpected end of pattern", self.pos)
        if c == "(":
            self.pos += 1
            node = self.union()
            self.expect(")")
            return node
        if c == ".":
            self.pos += 1
            return AnyChar()
        if c == "[":
            return self.char_class()
        if c == "ε":
            self.pos += 1
            return Epsilon()
        if c in _IDENT:
            end = self.pos
            while end < len(self.text) and self.text[end] in _IDENT:
                end += 1
            if end < len(self.text) and self.text[end] == "{":
                name = self.text[self.pos:end]
                self.pos = end + 1
                node = self.union()
                self.expect("}")
                return Capture(name, node)
        if c in "*+?":
            raise PatternSyntaxError(f"nothing to repeat before {c!r}", start)
        if c in _META and c != "\\":
            raise PatternSyntaxError(f"unexpected {c!r}", start)
        return Literal(self.byte())

    def byte(self):
        c = self.peek()
        if c is None:
            raise PatternSyntaxError("unexpected end of pattern", self.pos)
        if c == "\\":
            self.pos += 1
            e = self.peek()
            if e is None:
                raise PatternSyntaxError("dangling escape", self.pos)
            if e == "x":
                digits = self.text[self.pos + 1:self.pos + 3]
                try:
                    value = int(digits, 16) if len(digits) == 2 else None
                except ValueError:
                    value = None
                if value is None:
                    raise PatternSyntaxError("bad \\x escape", self.pos)
                self.pos += 3
                return value
            self.pos += 1
            return _ESCAPES.get(e, ord(e)) if ord(e) < 0x80 else self._non_ascii(e)
        if ord(c) >= 0x80:
            return self._non_ascii(c)
        self.pos += 1
        return ord(c)

    def _non_ascii(self, c):
        raise PatternSyntaxError(f"non-ASCII character {c!r} must be \\x-escaped", self.pos)

    def char_class(self):
        self.expect("[")
        negated = self.peek() == "^"
        if negated:
            self.pos += 1
        members = set()
        first = True
        while True:
            c = self.peek()
            if c is None:
                raise PatternSyntaxError("unterminated class", self.pos)
            if c == "]" and not first:
                self.pos += 1
                break
            lo = self.byte()
            if self.peek() == "-" and self.pos + 1 < len(self.text) and self.text[self.pos + 1] != "]":
                self.pos += 1
                hi = self.byte()
                if hi < lo:
                    raise PatternSyntaxError("reversed range", self.pos)
                members.update(range(lo, hi + 1))
            else:
                members.add(lo)
            first = False
        if negated:
            return NegClass(frozenset(members))
        items = tuple(Literal(b) for b in sorted(members))
        return items[0] if len(items) == 1 else Union(items)


def parse(pattern: str):
    """Parse a pattern into a formula tree."""
    return _Parser(pattern).parse()


def variables(f) -> tuple:
    """Capture variable names in first-appearance order."""
    out = []

    def walk(node):
        if isinstance(node, Capture):
            if node.variable not in out:
                out.append(node.variable)
            walk(node.child)
        elif isinstance(node, (Concat, Union)):
            for item in node.items:
                walk(item)
        elif isinstance(node, Star):
            walk(node.child)

    walk(f)
    return tuple(out)


def node_count(f) -> int:
    if isinstance(f, (Concat, Union)):
        return 1 + sum(node_count(i) for i in f.items)
    if isinstance(f, (Star, Capture)):
        return 1 + node_count(f.child)
    return 1


def compile(f, names=None) -> VsetAutomaton:
    """Compile a formula to a VA.

    Thompson fragments are built with epsilon moves, which are then removed:
    the kept states are the start state and the targets of letter or marker
    moves, so the state count stays linear in the formula.
    """
    if names is None:
        names = variables(f)
    index = {name: i for i, name in enumerate(names)}
    eps = []
    moves = []  # (src, kind, label, dst)
    count = 0

    def new():
        nonlocal count
        count += 1
        return count - 1

    def build(node):
        s, t = new(), new()
        if isinstance(node, Epsilon):
            eps.append((s, t))
        elif isinstance(node, Literal):
            moves.append((s, "l", SymbolPredicate.single(node.byte), t))
        elif isinstance(node, AnyChar):
            moves.append((s, "l", SymbolPredicate.any(), t))
        elif isinstance(node, NegClass):
            moves.append((s, "l", SymbolPredicate.except_(node.excluded), t))
        elif isinstance(node, Concat):
            prev = s
            for item in node.items:
                a, b = build(item)
                eps.append((prev, a))
                prev = b
            eps.append((prev, t))
        elif isinstance(node, Union):
            for item in node.items:
                a, b = build(item)
                eps.append((s, a))
                eps.append((b, t))
        elif isinstance(node, Star):
            a, b = build(node.child)
            eps.extend([(s, t), (s, a), (b, a), (b, t)])
        elif isinstance(node, Capture):
            a, b = build(node.child)
            var = index[node.variable]
            moves.append((s, "m", open_marker(var), a))
            moves.append((b, "m", close_marker(var), t))
        else:
            raise TypeError(f"not a formula node: {node!r}")
        return s, t

    start, accept = build(f)

    eps_succ = [[] for _ in range(count)]
    for a, b in eps:
        eps_succ[a].append(b)
    moves_from = [[] for _ in range(count)]
    for m in moves:
        moves_from[m[0]].append(m)

    kept = [start] + sorted({m[3] for m in moves} - {start})
    renum = {q: i for i, q in enumerate(kept)}
    letters, markers, finals = [], [], set()
    for q in kept:
        seen = {q}
        todo = [q]
        while todo:
            p = todo.pop()
            for r in eps_succ[p]:
                if r not in seen:
                    seen.add(r)
                    todo.append(r)
        if accept in seen:
            finals.add(renum[q])
        for p in sorted(seen):
            for _, kind, label, dst in moves_from[p]:
                t = (renum[q], label, renum[dst])
                (letters if kind == "l" else markers).append(t)
    return VsetAutomaton(len(kept), 0, frozenset(finals), tuple(dict.fromkeys(letters)),
                         tuple(dict.fromkeys(markers)), tuple(names))


def compile_pattern(pattern: str) -> VsetAutomaton:
    return compile(parse(pattern))
