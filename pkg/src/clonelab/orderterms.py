"""Order terms over Q and their exact evaluation.

The term basis is: coordinate selectors, binary (or folded n-ary) min
and max, the binary order-embedding `lex`, and application of named
increasing piecewise maps.  `lex` embeds Q^2, ordered lexicographically,
into Q; it has no closed form, so evaluation works in a value algebra
instead of in Q directly:

  value ::= Rat(q)            a plain rational
          | Pair(head, tail)  the image lex(head, tail)

Values are linearly ordered by the rule "a pair sits immediately above
its head": two pairs compare lexicographically, a pair against a
rational compares by head with ties resolved above.  This amounts to
reading Pair(u, v) as u + eps * squash(v) for an infinitesimal eps; any
finite set of comparisons made this way is realized by an honest
order-embedding of Q^2 into Q (extend the finitely many constraints by
back-and-forth), and increasing maps act on a pair by acting on its
head.  Whole evaluation sets are materialized to rationals by rank, so
downstream consumers see ordinary exact rationals whose order agrees
with the value order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, Sequence

from .errors import ParseError, UnsupportedTerm
from .plmap import PLMap

# -- values --------------------------------------------------------------


class Value:
    __slots__ = ()


@total_ordering
@dataclass(frozen=True)
class Rat(Value):
    q: Fraction

    def __lt__(self, other):
        return compare_values(self, other) < 0


@total_ordering
@dataclass(frozen=True)
class Pair(Value):
    head: Value
    tail: Value

    def __lt__(self, other):
        return compare_values(self, other) < 0


def compare_values(u: Value, v: Value) -> int:
    """Total order on values; 0 only for structurally equal values."""
    if isinstance(u, Rat) and isinstance(v, Rat):
        return (u.q > v.q) - (u.q < v.q)
    if isinstance(u, Pair) and isinstance(v, Pair):
        c = compare_values(u.head, v.head)
        return c if c else compare_values(u.tail, v.tail)
    if isinstance(u, Rat):
        c = compare_values(u, v.head)  # type: ignore[union-attr]
        return c if c else -1
    c = compare_values(u.head, v)
    return c if c else 1


def map_value(m: PLMap, v: Value) -> Value:
    """Increasing maps move the head of a pair and leave the tail alone."""
    if isinstance(v, Rat):
        return Rat(m.apply(v.q))
    return Pair(map_value(m, v.head), v.tail)


def rank_codes(values: Sequence[Value]) -> tuple[int, ...]:
    """Rank vector of a value list (the order pattern it realizes)."""
    distinct = sorted(set(values))
    rank = {v: i for i, v in enumerate(distinct)}
    return tuple(rank[v] for v in values)


def materialize(values: Iterable[Value]) -> dict[Value, Fraction]:
    """Rank materialization of a whole finite evaluation set: the i-th
    distinct value in value order becomes the rational i."""
    return {v: Fraction(i) for i, v in enumerate(sorted(set(values)))}


# -- terms ---------------------------------------------------------------


class OrderTerm:
    __slots__ = ()


@dataclass(frozen=True)
class Coord(OrderTerm):
    index: int  # 1-based

    def __str__(self):
        return f"x{self.index}"


@dataclass(frozen=True)
class Min(OrderTerm):
    items: tuple[OrderTerm, ...]

    def __str__(self):
        return "min(" + ", ".join(str(t) for t in self.items) + ")"


@dataclass(frozen=True)
class Max(OrderTerm):
    items: tuple[OrderTerm, ...]

    def __str__(self):
        return "max(" + ", ".join(str(t) for t in self.items) + ")"


@dataclass(frozen=True)
class Lex(OrderTerm):
    head: OrderTerm
    tail: OrderTerm

    def __str__(self):
        return f"lex({self.head}, {self.tail})"


@dataclass(frozen=True)
class MapApply(OrderTerm):
    map_name: str
    map: PLMap
    arg: OrderTerm

    def __str__(self):
        return f"{self.map_name}({self.arg})"


def term_arity(term: OrderTerm) -> int:
    """Smallest n such that the term only mentions x1..xn."""
    if isinstance(term, Coord):
        return term.index
    if isinstance(term, (Min, Max)):
        return max(term_arity(t) for t in term.items)
    if isinstance(term, Lex):
        return max(term_arity(term.head), term_arity(term.tail))
    return term_arity(term.arg)  # type: ignore[union-attr]


def eval_term(term: OrderTerm, args: Sequence[Value]) -> Value:
    if isinstance(term, Coord):
        return args[term.index - 1]
    if isinstance(term, Min):
        return min(eval_term(t, args) for t in term.items)
    if isinstance(term, Max):
        return max(eval_term(t, args) for t in term.items)
    if isinstance(term, Lex):
        return Pair(eval_term(term.head, args), eval_term(term.tail, args))
    return map_value(term.map, eval_term(term.arg, args))


def eval_rational(term: OrderTerm, point: Sequence[Fraction]) -> Value:
    return eval_term(term, tuple(Rat(Fraction(x)) for x in point))


def substitute(term: OrderTerm, children: Sequence[OrderTerm]) -> OrderTerm:
    """Replace xi by children[i-1] throughout."""
    if isinstance(term, Coord):
        return children[term.index - 1]
    if isinstance(term, Min):
        return Min(tuple(substitute(t, children) for t in term.items))
    if isinstance(term, Max):
        return Max(tuple(substitute(t, children) for t in term.items))
    if isinstance(term, Lex):
        return Lex(substitute(term.head, children), substitute(term.tail, children))
    return MapApply(term.map_name, term.map, substitute(term.arg, children))


def peel_outer_maps(term: OrderTerm) -> tuple[list[PLMap], OrderTerm]:
    """Strip the outermost chain of map applications."""
    maps = []
    while isinstance(term, MapApply):
        maps.append(term.map)
        term = term.arg
    return maps, term


def contains_map(term: OrderTerm) -> bool:
    if isinstance(term, MapApply):
        return True
    if isinstance(term, (Min, Max)):
        return any(contains_map(t) for t in term.items)
    if isinstance(term, Lex):
        return contains_map(term.head) or contains_map(term.tail)
    return False


def require_pattern_determined(term: OrderTerm) -> OrderTerm:
    """Return the map-free core of a term whose output pattern depends
    only on the input pattern, or raise.

    Increasing maps applied outermost preserve output patterns and may be
    peeled off; maps in inner compared positions make the output pattern
    depend on how the map's breakpoints interleave with the inputs, which
    pattern enumeration cannot decide, so such terms are rejected.
    """
    _, core = peel_outer_maps(term)
    if contains_map(core):
        raise UnsupportedTerm(
            f"term {term} applies a map in an inner position; its output "
            "pattern is not determined by input patterns alone"
        )
    return core


# -- parsing -------------------------------------------------------------


def parse_order_term(text: str, maps: dict[str, PLMap] | None = None,
                     line: int | None = None) -> OrderTerm:
    """Parse prefix syntax such as `lex(x1, min(x2, x3))`.

    `maps` supplies named increasing maps usable as unary symbols.
    """
    tokens = _tokenize(text, line)
    term, pos = _parse(tokens, 0, maps or {}, line)
    if pos != len(tokens):
        raise ParseError(f"trailing input after term: {text!r}", line)
    return term


def _tokenize(text: str, line: int | None) -> list[str]:
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "(),":
            tokens.append(ch)
            i += 1
        elif ch.isalnum() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(text[i:j])
            i = j
        else:
            raise ParseError(f"unexpected character {ch!r} in term", line)
    return tokens


def _parse(tokens, pos, maps, line):
    if pos >= len(tokens):
        raise ParseError("unexpected end of term", line)
    tok = tokens[pos]
    if tok.startswith("x") and tok[1:].isdigit():
        index = int(tok[1:])
        if index < 1:
            raise ParseError("coordinates are numbered from x1", line)
        return Coord(index), pos + 1
    args, pos = _parse_args(tokens, pos + 1, maps, line, tok)
    if tok in ("min", "max"):
        if len(args) < 2:
            raise ParseError(f"{tok} needs at least 2 arguments", line)
        return (Min if tok == "min" else Max)(tuple(args)), pos
    if tok == "lex":
        if len(args) != 2:
            raise ParseError("lex takes exactly 2 arguments", line)
        return Lex(args[0], args[1]), pos
    if tok in maps:
        if len(args) != 1:
            raise ParseError(f"map {tok!r} takes exactly 1 argument", line)
        return MapApply(tok, maps[tok], args[0]), pos
    raise ParseError(f"unknown symbol {tok!r} in term", line)


def _parse_args(tokens, pos, maps, line, symbol):
    if pos >= len(tokens) or tokens[pos] != "(":
        raise ParseError(f"expected '(' after {symbol!r}", line)
    pos += 1
    args = []
    while True:
        term, pos = _parse(tokens, pos, maps, line)
        args.append(term)
        if pos >= len(tokens):
            raise ParseError("unterminated argument list", line)
        if tokens[pos] == ",":
            pos += 1
            continue
        if tokens[pos] == ")":
            return args, pos + 1
        raise ParseError(f"expected ',' or ')', got {tokens[pos]!r}", line)
