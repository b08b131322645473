"""Base structures and their type spaces.

Two worlds share one vocabulary here.  Finite relational structures get
automorphism groups by backtracking and type spaces whose types are
orbits of tuples.  The two symbolic structures, the dense linear order
on Q and the pure set on Q, get type spaces whose types are order
patterns (weak orders as rank vectors) respectively equality patterns
(partitions as first-occurrence codes).  Both kinds of space classify
tuples, produce canonical representatives, and restrict types along
index maps.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .config import Caps, DEFAULT_CAPS, guard, ordered_set_partition_count
from .errors import InconsistentData, ParseError
from .plmap import PLMap, from_point_pairs


# -- finite structures -------------------------------------------------


@dataclass(frozen=True)
class Relation:
    name: str
    arity: int
    tuples: frozenset[tuple[int, ...]]


@dataclass(frozen=True)
class FiniteStructure:
    domain_size: int
    relations: tuple[Relation, ...] = ()

    def __post_init__(self):
        if self.domain_size < 1:
            raise InconsistentData("domain must be nonempty")
        seen = set()
        for rel in self.relations:
            if rel.name in seen:
                raise InconsistentData(f"duplicate relation name {rel.name!r}")
            seen.add(rel.name)
            if rel.arity < 1:
                raise InconsistentData(f"relation {rel.name!r} has arity < 1")
            for t in rel.tuples:
                if len(t) != rel.arity:
                    raise InconsistentData(f"tuple {t} has wrong arity for {rel.name!r}")
                if any(not 0 <= v < self.domain_size for v in t):
                    raise InconsistentData(f"tuple {t} out of domain in {rel.name!r}")

    @property
    def max_relation_arity(self) -> int:
        """Largest declared arity; 1 for a relation-free structure."""
        return max((r.arity for r in self.relations), default=1)


def parse_structure(text: str) -> FiniteStructure:
    """Parse the line format: `domain <n>`, then `relation <name> <arity>`
    blocks with one tuple per line.  '#' comments and blank lines are
    ignored; errors carry line numbers."""
    domain_size: int | None = None
    relations: list[tuple[str, int, set[tuple[int, ...]], int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            continue
        parts = stripped.split()
        if parts[0] == "domain":
            if domain_size is not None:
                raise ParseError("domain declared twice", lineno)
            if len(parts) != 2 or not parts[1].isdigit():
                raise ParseError("expected `domain <n>`", lineno)
            domain_size = int(parts[1])
            continue
        if domain_size is None:
            raise ParseError("`domain <n>` must come first", lineno)
        if parts[0] == "relation":
            if len(parts) != 3 or not parts[2].isdigit():
                raise ParseError("expected `relation <name> <arity>`", lineno)
            relations.append((parts[1], int(parts[2]), set(), lineno))
            continue
        if not relations:
            raise ParseError(f"unexpected line {stripped!r} before any relation", lineno)
        name, arity, tuples, _ = relations[-1]
        try:
            values = tuple(int(p) for p in parts)
        except ValueError:
            raise ParseError(f"expected {arity} integers", lineno)
        if len(values) != arity:
            raise ParseError(
                f"tuple has {len(values)} entries, relation {name!r} has arity {arity}",
                lineno,
            )
        if any(not 0 <= v < domain_size for v in values):
            raise ParseError(f"vertex out of range in {values}", lineno)
        tuples.add(values)
    if domain_size is None:
        raise ParseError("missing `domain <n>` line")
    try:
        return FiniteStructure(
            domain_size,
            tuple(Relation(n, a, frozenset(ts)) for n, a, ts, _ in relations),
        )
    except InconsistentData as exc:
        raise ParseError(str(exc))


@dataclass(frozen=True)
class Permutation:
    images: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.images) != list(range(len(self.images))):
            raise InconsistentData(f"not a permutation: {self.images}")

    def apply(self, t: Sequence[int]) -> tuple[int, ...]:
        return tuple(self.images[v] for v in t)

    def compose(self, other: "Permutation") -> "Permutation":
        """self after other."""
        return Permutation(tuple(self.images[v] for v in other.images))

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.images)
        for i, v in enumerate(self.images):
            inv[v] = i
        return Permutation(tuple(inv))

    @staticmethod
    def identity(n: int) -> "Permutation":
        return Permutation(tuple(range(n)))


def automorphisms(structure: FiniteStructure) -> list[Permutation]:
    """All automorphisms, by backtracking with relation-consistency pruning,
    in lexicographic order of their image tuples."""
    n = structure.domain_size
    # tuples grouped by their largest vertex: checkable as soon as that
    # vertex gets an image
    by_max: list[list[tuple[frozenset, tuple[int, ...]]]] = [[] for _ in range(n)]
    for rel in structure.relations:
        for t in rel.tuples:
            by_max[max(t)].append((rel.tuples, t))

    found: list[Permutation] = []
    images: list[int] = []
    used = [False] * n

    def extend() -> None:
        d = len(images)
        if d == n:
            found.append(Permutation(tuple(images)))
            return
        for candidate in range(n):
            if used[candidate]:
                continue
            images.append(candidate)
            used[candidate] = True
            if all(
                tuple(images[v] for v in t) in tuples for tuples, t in by_max[d]
            ):
                extend()
            images.pop()
            used[candidate] = False

    extend()
    return found


# -- symbolic structures ------------------------------------------------


class StructureKind(enum.Enum):
    DLO = "dlo"
    PURE_SET = "pureset"


@dataclass(frozen=True)
class SymbolicStructure:
    kind: StructureKind

    @property
    def max_relation_arity(self) -> int:
        """Arity bound past which type spaces stop changing (2 for the
        order, 1 for the pure set)."""
        return 2 if self.kind is StructureKind.DLO else 1

    @property
    def name(self) -> str:
        return self.kind.value


DLO = SymbolicStructure(StructureKind.DLO)
PURE_SET = SymbolicStructure(StructureKind.PURE_SET)


@dataclass(frozen=True)
class Pattern:
    """Type of a k-tuple: rank vector over the order, first-occurrence
    block codes over the pure set."""

    kind: StructureKind
    codes: tuple[int, ...]

    def describe(self) -> str:
        k = len(self.codes)
        if self.kind is StructureKind.DLO:
            by_rank: dict[int, list[int]] = {}
            for i, r in enumerate(self.codes):
                by_rank.setdefault(r, []).append(i)
            groups = [
                "=".join(f"x{i + 1}" for i in by_rank[r]) for r in sorted(by_rank)
            ]
            return " < ".join(groups)
        by_block: dict[int, list[int]] = {}
        for i, c in enumerate(self.codes):
            by_block.setdefault(c, []).append(i)
        groups = ["=".join(f"x{i + 1}" for i in by_block[c]) for c in sorted(by_block)]
        return " | ".join(groups)

    def __str__(self) -> str:
        return "(" + ",".join(str(c) for c in self.codes) + ")"


def pattern_of(structure: SymbolicStructure, values: Sequence[Fraction]) -> Pattern:
    if structure.kind is StructureKind.DLO:
        distinct = sorted(set(values))
        rank = {v: i for i, v in enumerate(distinct)}
        return Pattern(structure.kind, tuple(rank[v] for v in values))
    codes: dict[Fraction, int] = {}
    out = []
    for v in values:
        if v not in codes:
            codes[v] = len(codes)
        out.append(codes[v])
    return Pattern(structure.kind, tuple(out))


def _weak_orders(k: int) -> Iterable[tuple[int, ...]]:
    """All rank vectors of length k (weak orders on positions)."""
    codes = [0] * k

    def rec(remaining: tuple[int, ...], rank: int):
        if not remaining:
            yield tuple(codes)
            return
        for size in range(1, len(remaining) + 1):
            for block in itertools.combinations(remaining, size):
                for i in block:
                    codes[i] = rank
                rest = tuple(i for i in remaining if i not in block)
                yield from rec(rest, rank + 1)

    yield from rec(tuple(range(k)), 0)


def _partitions(k: int) -> Iterable[tuple[int, ...]]:
    """All first-occurrence code vectors of length k (set partitions)."""
    codes = [0] * k

    def rec(i: int, blocks: int):
        if i == k:
            yield tuple(codes)
            return
        for c in range(blocks + 1):
            codes[i] = c
            yield from rec(i + 1, blocks + (1 if c == blocks else 0))

    if k == 0:
        yield ()
        return
    yield from rec(0, 0)


# -- type spaces --------------------------------------------------------


@dataclass(frozen=True)
class ConcreteTypeSpace:
    """Orbits of k-tuples of a finite structure under its automorphisms."""

    structure: FiniteStructure
    k: int
    reps: tuple[tuple[int, ...], ...]
    index: dict[tuple[int, ...], int] = field(compare=False, repr=False)
    orbit_sizes: tuple[int, ...] = ()

    @property
    def size(self) -> int:
        return len(self.reps)

    def classify(self, t: Sequence[int]) -> int:
        return self.index[tuple(t)]

    def representative(self, i: int) -> tuple[int, ...]:
        return self.reps[i]

    def describe(self, i: int) -> str:
        return "(" + ",".join(str(v) for v in self.reps[i]) + ")"


@dataclass(frozen=True)
class PatternTypeSpace:
    """Patterns of k-tuples over a symbolic structure."""

    structure: SymbolicStructure
    k: int
    patterns: tuple[Pattern, ...]
    index: dict[Pattern, int] = field(compare=False, repr=False)

    @property
    def size(self) -> int:
        return len(self.patterns)

    def classify(self, t: Sequence[Fraction]) -> int:
        return self.index[pattern_of(self.structure, t)]

    def classify_pattern(self, p: Pattern) -> int:
        return self.index[p]

    def representative(self, i: int) -> tuple[Fraction, ...]:
        return tuple(Fraction(c) for c in self.patterns[i].codes)

    def describe(self, i: int) -> str:
        return self.patterns[i].describe()


TypeSpace = ConcreteTypeSpace | PatternTypeSpace


def orbits(
    structure: FiniteStructure, k: int, caps: Caps = DEFAULT_CAPS
) -> ConcreteTypeSpace:
    """Type space at level k: orbit representatives are the
    lexicographically least tuples, ids follow representative order."""
    guard(k, caps.k_cap, "tuple length")
    guard(structure.domain_size**k, caps.tuple_cap, "tuple space size")
    auts = automorphisms(structure)
    index: dict[tuple[int, ...], int] = {}
    reps: list[tuple[int, ...]] = []
    sizes: list[int] = []
    for t in itertools.product(range(structure.domain_size), repeat=k):
        if t in index:
            continue
        orbit = {aut.apply(t) for aut in auts}
        idx = len(reps)
        reps.append(t)
        sizes.append(len(orbit))
        for member in orbit:
            index[member] = idx
    return ConcreteTypeSpace(structure, k, tuple(reps), index, tuple(sizes))


def enumerate_patterns(
    structure: SymbolicStructure, k: int, caps: Caps = DEFAULT_CAPS
) -> PatternTypeSpace:
    """All patterns of length k, sorted by code vector."""
    guard(k, caps.k_cap, "tuple length")
    if structure.kind is StructureKind.DLO:
        guard(ordered_set_partition_count(k), caps.pattern_cap, "pattern family size")
        codes = sorted(_weak_orders(k))
    else:
        codes = sorted(_partitions(k))
    patterns = tuple(Pattern(structure.kind, c) for c in codes)
    index = {p: i for i, p in enumerate(patterns)}
    return PatternTypeSpace(structure, k, patterns, index)


def joint_order_patterns(
    length: int, caps: Caps = DEFAULT_CAPS
) -> list[tuple[int, ...]]:
    """Sorted rank vectors of the given length.

    Used to enumerate the joint order configurations of several tuples
    laid side by side, so the length is a product n*k rather than a
    tuple length; only the family-size cap applies.
    """
    guard(
        ordered_set_partition_count(length),
        caps.pattern_cap,
        "joint pattern family size",
    )
    return sorted(_weak_orders(length))


def type_restriction(
    space_k: TypeSpace, space_l: TypeSpace, t: int, u: Sequence[int]
) -> int:
    """Image of type t under the index map u: {1..l} -> {1..k}."""
    if len(u) != space_l.k:
        raise InconsistentData(f"index map has length {len(u)}, target level is {space_l.k}")
    if space_k.structure != space_l.structure:
        raise InconsistentData("type spaces belong to different structures")
    if any(not 1 <= j <= space_k.k for j in u):
        raise InconsistentData(f"index map {u} out of range for level {space_k.k}")
    rep = space_k.representative(t)
    return space_l.classify(tuple(rep[j - 1] for j in u))


def witness_partial_automorphism(
    structure: SymbolicStructure,
    a: Sequence[Fraction],
    b: Sequence[Fraction],
) -> PLMap | None:
    """An increasing piecewise map sending a_i to b_i, or None when the
    tuples have different patterns.

    Over the pure set the pairing must itself be increasing to be
    representable as one of these maps; a non-monotone pairing raises.
    """
    if len(a) != len(b):
        raise InconsistentData("tuples have different lengths")
    if pattern_of(structure, a) != pattern_of(structure, b):
        return None
    pairs = sorted(set(zip(map(Fraction, a), map(Fraction, b))))
    for (x1, y1), (x2, y2) in zip(pairs, pairs[1:]):
        if y1 >= y2:
            raise InconsistentData(
                "pairing is not increasing; no piecewise order witness exists"
            )
    return from_point_pairs(pairs)
