"""Canonicity of operations and their action on type spaces.

An operation f is canonical for a structure when tuples of arguments of
the same types have images of the same type, for every tuple length k:
applying automorphisms to the arguments independently can be undone by
one automorphism on the image.  Canonical operations act on type spaces;
that action is the type table computed here, and at the structure's
critical level m (2 for the dense order, 1 for the pure set, the largest
relation arity for finite structures) the action determines the whole
family.

Deciding canonicity is exhaustive, never sampled.  Over a finite
structure all argument tuples are grouped by their orbit lists.  Over a
symbolic structure all joint order patterns of the n*k argument entries
are enumerated; this is exact precisely because the order-term basis is
pattern-determined, so inner applications of named maps are rejected
(see `orderterms.require_pattern_determined`).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .clones import Table, selector
from .config import Caps, DEFAULT_CAPS, guard
from .errors import InconsistentData, NonCanonicalOperation
from .orderterms import (
    Coord,
    OrderTerm,
    Value,
    eval_rational,
    rank_codes,
    require_pattern_determined,
    substitute,
    term_arity,
)
from .structures import (
    ConcreteTypeSpace,
    FiniteStructure,
    Pattern,
    PatternTypeSpace,
    Permutation,
    StructureKind,
    SymbolicStructure,
    automorphisms,
    enumerate_patterns,
    joint_order_patterns,
    orbits,
    pattern_of,
)

Structure = FiniteStructure | SymbolicStructure


@dataclass(frozen=True)
class Operation:
    """A named operation: a finite table or an order term."""

    name: str
    arity: int
    body: Table | OrderTerm

    def __post_init__(self):
        if isinstance(self.body, Table):
            if self.arity != self.body.arity:
                raise InconsistentData(
                    f"operation {self.name!r} declares arity {self.arity}, "
                    f"table has {self.body.arity}"
                )
        else:
            used = term_arity(self.body)
            if self.arity < used:
                raise InconsistentData(
                    f"operation {self.name!r} declares arity {self.arity}, "
                    f"term uses x{used}"
                )


@dataclass(frozen=True)
class CanonicalCounterexample:
    """Two argument lists with equal per-argument types whose images have
    different types.  Over a finite structure, `automorphisms[i]` maps
    args_a[i] onto args_b[i]."""

    k: int
    args_a: tuple[tuple, ...]
    args_b: tuple[tuple, ...]
    automorphisms: tuple[Permutation, ...] | None = None


@dataclass(frozen=True)
class CanonicalVerdict:
    canonical: bool
    checked_up_to: int
    counterexample: CanonicalCounterexample | None = None


def default_k_max(structure: Structure) -> int:
    return max(structure.max_relation_arity, 3)


# -- finite case ----------------------------------------------------------


def is_canonical_finite(
    table: Table,
    structure: FiniteStructure,
    k_max: int | None = None,
    caps: Caps = DEFAULT_CAPS,
) -> CanonicalVerdict:
    """Exhaustive canonicity check over a finite structure."""
    if table.size != structure.domain_size:
        raise InconsistentData("table base size differs from structure domain")
    k_max = default_k_max(structure) if k_max is None else k_max
    n = table.arity
    auts = automorphisms(structure)
    for k in range(1, k_max + 1):
        guard(structure.domain_size ** (k * n), caps.tuple_cap, "argument space size")
        space = orbits(structure, k, caps)
        groups: dict[tuple[int, ...], tuple[tuple, int]] = {}
        for args in itertools.product(
            itertools.product(range(structure.domain_size), repeat=k), repeat=n
        ):
            key = tuple(space.classify(a) for a in args)
            image = tuple(table.apply(tuple(a[j] for a in args)) for j in range(k))
            image_type = space.classify(image)
            if key not in groups:
                groups[key] = (args, image_type)
                continue
            first_args, first_type = groups[key]
            if image_type != first_type:
                witnesses = tuple(
                    next(p for p in auts if p.apply(a) == b)
                    for a, b in zip(first_args, args)
                )
                return CanonicalVerdict(
                    False,
                    k,
                    CanonicalCounterexample(k, first_args, args, witnesses),
                )
    return CanonicalVerdict(True, k_max)


# -- symbolic case --------------------------------------------------------


def _output_codes(kind: StructureKind, outputs: Sequence[Value]) -> tuple[int, ...]:
    codes = rank_codes(outputs)
    if kind is StructureKind.DLO:
        return codes
    # pure set: only equality matters
    seen: dict[int, int] = {}
    out = []
    for c in codes:
        if c not in seen:
            seen[c] = len(seen)
        out.append(seen[c])
    return tuple(out)


def is_canonical_symbolic(
    term: OrderTerm,
    structure: SymbolicStructure,
    k_max: int | None = None,
    caps: Caps = DEFAULT_CAPS,
) -> CanonicalVerdict:
    """Exact canonicity decision for a pattern-determined order term.

    For each k the joint order patterns of all n*k argument entries are
    enumerated (each realized by its rank tuple), grouped by the list of
    individual argument patterns; the output pattern must be constant on
    each group.  Outer increasing-map chains are peeled off first since
    they preserve output patterns; inner map applications are rejected.
    """
    core = require_pattern_determined(term)
    k_max = default_k_max(structure) if k_max is None else k_max
    n = max(term_arity(core), 1)
    for k in range(1, k_max + 1):
        groups: dict[tuple, tuple[tuple, tuple[int, ...]]] = {}
        for codes in joint_order_patterns(n * k, caps):
            realization = tuple(Fraction(c) for c in codes)
            args = tuple(realization[i * k : (i + 1) * k] for i in range(n))
            key = tuple(pattern_of(structure, a) for a in args)
            outputs = [
                eval_rational(core, tuple(a[j] for a in args)) for j in range(k)
            ]
            out_codes = _output_codes(structure.kind, outputs)
            if key not in groups:
                groups[key] = (args, out_codes)
                continue
            first_args, first_codes = groups[key]
            if out_codes != first_codes:
                return CanonicalVerdict(
                    False, k, CanonicalCounterexample(k, first_args, args)
                )
    return CanonicalVerdict(True, k_max)


def is_canonical(
    operation: Operation,
    structure: Structure,
    k_max: int | None = None,
    caps: Caps = DEFAULT_CAPS,
) -> CanonicalVerdict:
    if isinstance(operation.body, Table):
        if not isinstance(structure, FiniteStructure):
            raise InconsistentData("table operations need a finite structure")
        return is_canonical_finite(operation.body, structure, k_max, caps)
    if not isinstance(structure, SymbolicStructure):
        raise InconsistentData("order terms need a symbolic structure")
    return is_canonical_symbolic(operation.body, structure, k_max, caps)


# -- action on types --------------------------------------------------------


@dataclass(frozen=True)
class TypeOperation:
    """The action of a canonical operation on the level-k type space."""

    space: ConcreteTypeSpace | PatternTypeSpace
    table: Table

    def describe(self) -> str:
        rows = []
        for args in itertools.product(range(self.space.size), repeat=self.table.arity):
            out = self.table.apply(args)
            left = ", ".join(self.space.describe(a) for a in args)
            rows.append(f"({left}) -> {self.space.describe(out)}")
        return "\n".join(rows)


def type_image(
    operation: Operation,
    structure: Structure,
    k: int,
    caps: Caps = DEFAULT_CAPS,
    check: bool = True,
) -> TypeOperation:
    """Type table of a canonical operation at level k.

    Raises NonCanonicalOperation (carrying the counterexample) when the
    canonicity check up to k fails; representatives are then meaningless.
    """
    if check:
        verdict = is_canonical(operation, structure, k_max=k, caps=caps)
        if not verdict.canonical:
            raise NonCanonicalOperation(
                f"operation {operation.name!r} is not canonical at level "
                f"{verdict.counterexample.k}",
                verdict.counterexample,
            )
    n = operation.arity
    if isinstance(operation.body, Table):
        assert isinstance(structure, FiniteStructure)
        space = orbits(structure, k, caps)
        guard(space.size**n, caps.tuple_cap, "type table size")
        outputs = []
        for type_args in itertools.product(range(space.size), repeat=n):
            reps = [space.representative(t) for t in type_args]
            image = tuple(
                operation.body.apply(tuple(r[j] for r in reps)) for j in range(k)
            )
            outputs.append(space.classify(image))
        return TypeOperation(space, Table(space.size, n, tuple(outputs)))
    assert isinstance(structure, SymbolicStructure)
    space = enumerate_patterns(structure, k, caps)
    guard(space.size**n, caps.tuple_cap, "type table size")
    outputs = []
    for type_args in itertools.product(range(space.size), repeat=n):
        reps = [space.representative(t) for t in type_args]
        column_values = [
            eval_rational(operation.body, tuple(r[j] for r in reps))
            for j in range(k)
        ]
        out_pattern = Pattern(
            structure.kind, _output_codes(structure.kind, column_values)
        )
        outputs.append(space.classify_pattern(out_pattern))
    return TypeOperation(space, Table(space.size, n, tuple(outputs)))


@dataclass(frozen=True)
class XiImage:
    """Images of a generating set on the critical-level type space."""

    space: ConcreteTypeSpace | PatternTypeSpace
    images: tuple[tuple[str, TypeOperation], ...]

    def named_tables(self) -> list[tuple[str, Table]]:
        return [(name, op.table) for name, op in self.images]


def xi_infty(
    generators: Sequence[Operation],
    structure: Structure,
    caps: Caps = DEFAULT_CAPS,
    check: bool = True,
) -> XiImage:
    """Action of the generators at the critical level m, past which the
    type spaces of a structure stop changing."""
    m = structure.max_relation_arity
    images = tuple(
        (op.name, type_image(op, structure, m, caps, check)) for op in generators
    )
    if isinstance(structure, FiniteStructure):
        space = orbits(structure, m, caps)
    else:
        space = enumerate_patterns(structure, m, caps)
    return XiImage(space, images)


# -- factor consistency ------------------------------------------------------


@dataclass(frozen=True)
class FactorViolation:
    term_a: object
    term_b: object
    direction: str  # "well-defined" or "injective"


@dataclass(frozen=True)
class FactorReport:
    consistent: bool
    k: int
    k_prime: int
    checked: int
    violations: tuple[FactorViolation, ...]


def check_table_correspondence(
    pairs: Sequence[tuple[object, Table, Table]], k: int, k_prime: int
) -> FactorReport:
    """Verify the map (level-k' table) -> (level-k table) is a bijection
    on the given (term, high table, low table) triples."""
    violations = []
    by_high: dict[Table, tuple[object, Table]] = {}
    by_low: dict[Table, tuple[object, Table]] = {}
    for term, high, low in pairs:
        if high in by_high:
            other_term, other_low = by_high[high]
            if other_low != low:
                violations.append(FactorViolation(other_term, term, "well-defined"))
        else:
            by_high[high] = (term, low)
        if low in by_low:
            other_term, other_high = by_low[low]
            if other_high != high:
                violations.append(FactorViolation(other_term, term, "injective"))
        else:
            by_low[low] = (term, high)
    return FactorReport(not violations, k, k_prime, len(pairs), tuple(violations))


def check_factor_isomorphism(
    generators: Sequence[Operation],
    structure: Structure,
    k: int,
    k_prime: int,
    depth_cap: int = 3,
    caps: Caps = DEFAULT_CAPS,
) -> FactorReport:
    """Desk-scale check that restriction from level k' to level k is a
    bijection between the type actions of all composed operations up to
    the depth cap (k <= k')."""
    if k > k_prime:
        raise InconsistentData("restriction goes from the higher level down")
    if not generators:
        raise InconsistentData("need at least one generator")
    if not all(isinstance(g.body, OrderTerm) for g in generators):
        # finite tables compose directly
        return _check_factor_tables(generators, structure, k, k_prime, depth_cap, caps)
    n = max(g.arity for g in generators)
    layers: list[list[OrderTerm]] = [[Coord(i) for i in range(1, n + 1)]]
    seen: set[OrderTerm] = set(layers[0])
    for _ in range(depth_cap):
        previous = [t for layer in layers for t in layer]
        fresh = []
        for g in generators:
            for children in itertools.product(previous, repeat=g.arity):
                candidate = substitute(g.body, children)
                if candidate not in seen:
                    seen.add(candidate)
                    fresh.append(candidate)
        layers.append(fresh)
    pairs = []
    for term in sorted(seen, key=str):
        op = Operation("t", max(term_arity(term), 1), term)
        high = type_image(op, structure, k_prime, caps, check=False).table
        low = type_image(op, structure, k, caps, check=False).table
        pairs.append((term, high, low))
    return check_table_correspondence(pairs, k, k_prime)


def _check_factor_tables(generators, structure, k, k_prime, depth_cap, caps):
    n = max(g.arity for g in generators)
    assert isinstance(structure, FiniteStructure)
    size = structure.domain_size
    current: dict[Table, object] = {}
    for i in range(1, n + 1):
        current[selector(size, n, i)] = f"x{i}"
    for _ in range(depth_cap):
        snapshot = list(current)
        for g in generators:
            assert isinstance(g.body, Table)
            for children in itertools.product(snapshot, repeat=g.arity):
                t = g.body.compose(list(children))
                if t not in current:
                    names = ",".join(str(current[c]) for c in children)
                    current[t] = f"{g.name}({names})"
    pairs = []
    for table, label in current.items():
        op = Operation("t", table.arity, table)
        high = type_image(op, structure, k_prime, caps, check=False).table
        low = type_image(op, structure, k, caps, check=False).table
        pairs.append((label, high, low))
    return check_table_correspondence(pairs, k, k_prime)
