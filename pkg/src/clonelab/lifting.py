"""Reading type-table identities back as order-term identities.

A system of equations satisfied by the type tables of canonical
generators does not usually hold verbatim for the order terms
themselves: ``lex(lex(x,y),z)`` and ``lex(x,lex(y,z))`` are different
values, they merely order every finite argument family the same way.
What the type tables promise is the weaker statement that on each
finite argument set the two sides of every equation can be equalized by
increasing maps applied on the outside.

This module makes those maps concrete.  ``build_instance`` fixes a
satisfying assignment of the system into the type clone and substitutes
the generator bodies into the assigned catalog terms, producing one
order term per symbol.  ``lift`` then walks a chain of growing argument
sets ``A_0 ⊂ A_1 ⊂ ...``, evaluates both sides of every equation on all
argument columns, and constructs a pair of order-preserving maps per
equation whose composites agree exactly, column by column.  A stage at
which no such pair exists is a genuine obstruction and is reported as
an :class:`~clonelab.errors.EqualizerFailure` rather than papered over.

The maps produced at different stages need not cohere, and nothing here
claims they converge.  ``approximate_accumulation`` only classifies the
stages by the joint order pattern of the maps on a few sample points
and reports whether a single pattern owns a tail of the chain.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .canonical import Operation, XiImage, is_canonical, type_image, xi_infty
from .clones import CatalogEntry, FiniteClone, eval_term_table, generate
from .config import Caps, DEFAULT_CAPS, guard
from .equations import (
    EquationSystem,
    ProjHomReport,
    has_projective_homomorphism,
    pad_to_common_arity,
    satisfiable_in_clone,
    satisfiable_in_projections,
)
from .errors import (
    CapExceeded,
    EqualizerFailure,
    InconsistentData,
    NonCanonicalOperation,
    UnsatisfiableSystem,
)
from .orderterms import Coord, OrderTerm, eval_rational, materialize, substitute
from .plmap import PLMap, from_point_pairs
from .structures import StructureKind, SymbolicStructure, pattern_of
from .terms import Term, fold


@dataclass(frozen=True)
class PointInjection:
    """A finite injective partial map on the rationals.

    Order-preserving maps are the right witnesses over a dense linear
    order, but over a pure set the symmetries are arbitrary injections,
    and the equalizing maps may genuinely have to invert the order of
    their inputs.  A point injection records such a map on exactly the
    points where it is needed.
    """

    pairs: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        sources = [x for x, _ in self.pairs]
        targets = [y for _, y in self.pairs]
        if len(set(sources)) != len(self.pairs):
            raise InconsistentData("point injection maps a source twice")
        if len(set(targets)) != len(self.pairs):
            raise InconsistentData("point injection reuses a target")

    def apply(self, x: Fraction) -> Fraction:
        x = Fraction(x)
        for src, dst in self.pairs:
            if src == x:
                return dst
        raise InconsistentData(f"{x} is outside the injection's domain")

    def describe(self) -> str:
        return " ".join(f"{x}->{y}" for x, y in self.pairs)


Witness = PLMap | PointInjection


@dataclass(frozen=True)
class WitnessTuple:
    """Equalizing maps for one stage: one pair per equation.

    For every equation ``s = t`` of the system and every argument
    column ``c`` drawn from ``universe``, the stored pair ``(w_s, w_t)``
    satisfies ``w_s(s(c)) == w_t(t(c))`` exactly, where both sides are
    evaluated through one shared rank materialization of the stage.
    """

    universe: tuple[Fraction, ...]
    pairs: tuple[tuple[Witness, Witness], ...]
    columns: int


def enumerate_argument_matrix(
    points: Sequence[Fraction], n: int, caps: Caps = DEFAULT_CAPS
) -> list[tuple[Fraction, ...]]:
    """Rows of the matrix whose columns run through ``points**n``.

    Columns are ordered lexicographically, so for points ``{0,1}`` and
    ``n = 2`` the rows are ``(0,0,1,1)`` and ``(0,1,0,1)``.
    """
    pts = tuple(Fraction(p) for p in points)
    if not pts:
        raise InconsistentData("argument matrix needs at least one point")
    if n < 1:
        raise InconsistentData("argument matrix needs at least one row")
    guard(len(pts) ** n, caps.tuple_cap, "argument matrix width")
    columns = list(itertools.product(pts, repeat=n))
    return [tuple(col[i] for col in columns) for i in range(n)]


def find_equalizers(
    left: Sequence[Fraction],
    right: Sequence[Fraction],
    structure: SymbolicStructure,
) -> tuple[Witness, Witness] | None:
    """Maps ``(w_l, w_r)`` with ``w_l(left[c]) == w_r(right[c])`` for all c.

    Both value lists are mapped onto the code sequence of their common
    pattern; if the patterns differ, no pair of symmetries of the
    structure can reconcile the two sides and None is returned.
    """
    lv = tuple(Fraction(x) for x in left)
    rv = tuple(Fraction(x) for x in right)
    if len(lv) != len(rv):
        raise InconsistentData("equalizer sides have different lengths")
    pat_l = pattern_of(structure, lv)
    pat_r = pattern_of(structure, rv)
    if pat_l.codes != pat_r.codes:
        return None
    target = tuple(Fraction(c) for c in pat_l.codes)
    if structure.kind is StructureKind.DLO:
        return (
            from_point_pairs(zip(lv, target)),
            from_point_pairs(zip(rv, target)),
        )
    return (
        PointInjection(tuple(sorted(set(zip(lv, target))))),
        PointInjection(tuple(sorted(set(zip(rv, target))))),
    )


def _mismatched_columns(
    left: Sequence[Fraction], right: Sequence[Fraction], kind: StructureKind
) -> tuple[int, int]:
    # a pattern disagreement always shows up on a pair of columns
    for c1, c2 in itertools.combinations(range(len(left)), 2):
        if kind is StructureKind.DLO:
            cl = (left[c1] > left[c2]) - (left[c1] < left[c2])
            cr = (right[c1] > right[c2]) - (right[c1] < right[c2])
            if cl != cr:
                return c1, c2
        elif (left[c1] == left[c2]) != (right[c1] == right[c2]):
            return c1, c2
    raise InconsistentData("no mismatching column pair found")


@dataclass(frozen=True)
class LiftInstance:
    """Everything a lift needs, assembled by :func:`build_instance`.

    ``order_terms`` interprets each symbol of the system as an order
    term over the structure; the interpretation's action on the
    critical-level type space is exactly the catalog table assigned to
    the symbol.
    """

    structure: SymbolicStructure
    generators: tuple[Operation, ...]
    system: EquationSystem
    xi: XiImage
    type_clone: FiniteClone
    assignment: tuple[tuple[str, CatalogEntry], ...]
    order_terms: tuple[tuple[str, OrderTerm], ...]
    points: tuple[Fraction, ...] | None = None

    def universe(self, j: int) -> tuple[Fraction, ...]:
        """The j-th argument set: ``{0, ..., j}`` unless points were given."""
        if j < 0:
            raise InconsistentData("stage index must be nonnegative")
        if self.points is not None:
            if j + 1 > len(self.points):
                raise CapExceeded(
                    f"stage {j} needs {j + 1} points, only {len(self.points)} provided"
                )
            return self.points[: j + 1]
        return tuple(Fraction(i) for i in range(j + 1))

    def order_term_of(self, name: str) -> OrderTerm:
        for sym, term in self.order_terms:
            if sym == name:
                return term
        raise InconsistentData(f"no interpretation for symbol {name!r}")


def build_instance(
    structure: SymbolicStructure,
    generators: Sequence[Operation],
    system: EquationSystem,
    caps: Caps = DEFAULT_CAPS,
    assign: Mapping[str, str] | None = None,
    points: Sequence[Fraction] | None = None,
    recheck: bool = True,
) -> LiftInstance:
    """Prepare a lift: check canonicity, satisfy the system on the type
    tables, and substitute generator bodies into the satisfying terms.

    By default the assignment is found by searching the type clone's
    catalogs.  ``assign`` forces specific generators onto the symbols
    instead (by generator name), which matters when the search would
    settle on a degenerate solution such as a plain selector; with
    ``recheck=False`` the forced assignment is accepted without
    verifying that it satisfies the system, so that the resulting
    obstruction can be observed downstream.
    """
    gen_ops = tuple(generators)
    names = [op.name for op in gen_ops]
    if len(set(names)) != len(names):
        raise InconsistentData("duplicate generator name")
    for op in gen_ops:
        if not isinstance(op.body, OrderTerm):
            raise InconsistentData(f"generator {op.name!r} is not an order term")
        verdict = is_canonical(op, structure, caps=caps)
        if not verdict.canonical:
            raise NonCanonicalOperation(
                f"generator {op.name!r} is not canonical", verdict.counterexample
            )
    xi = xi_infty(gen_ops, structure, caps, check=False)
    clone = generate(xi.named_tables(), xi.space.size, caps)
    padded = pad_to_common_arity(system)
    fixed = None
    if assign is not None:
        chosen = []
        for sym, arity in padded.signature:
            gname = assign.get(sym)
            if gname is None:
                raise InconsistentData(f"forced assignment misses symbol {sym!r}")
            table = clone.generator_table(gname)
            if table.arity != arity:
                raise InconsistentData(
                    f"generator {gname!r} has arity {table.arity}, "
                    f"symbol {sym!r} needs {arity}"
                )
            entry = clone.lookup_by_table(table)
            if entry is None:
                raise InconsistentData(
                    f"table of generator {gname!r} is missing from the catalog"
                )
            chosen.append((sym, entry))
        fixed = tuple(chosen)
        if recheck:
            _check_satisfaction(padded, fixed, clone)
    else:
        search = satisfiable_in_clone(padded, clone)
        if not search.found:
            qualifier = "" if search.exhaustive else " within the explored catalogs"
            raise UnsatisfiableSystem(
                f"no assignment into the type clone satisfies the system{qualifier}"
            )
        fixed = search.assignment
    return _finish_instance(structure, gen_ops, padded, xi, clone, fixed, points, caps)


def _check_satisfaction(
    system: EquationSystem,
    assignment: tuple[tuple[str, CatalogEntry], ...],
    clone: FiniteClone,
) -> None:
    tables = {sym: entry.table for sym, entry in assignment}
    n = system.ambient_arity
    for eq in system.equations:
        lhs = eval_term_table(eq.lhs, tables, n, clone.base_size)
        rhs = eval_term_table(eq.rhs, tables, n, clone.base_size)
        if lhs != rhs:
            raise UnsatisfiableSystem(f"assignment breaks {eq} on the type tables")


def _finish_instance(
    structure: SymbolicStructure,
    gen_ops: tuple[Operation, ...],
    padded: EquationSystem,
    xi: XiImage,
    clone: FiniteClone,
    assignment: tuple[tuple[str, CatalogEntry], ...],
    points: Sequence[Fraction] | None,
    caps: Caps,
) -> LiftInstance:
    bodies = {op.name: op.body for op in gen_ops}
    critical = structure.max_relation_arity
    order_terms = []
    for sym, entry in assignment:
        interp = fold(
            entry.term,
            lambda i: Coord(i),
            lambda name, parts: substitute(bodies[name], parts),
        )
        arity = padded.arity_of(sym)
        image = type_image(Operation(sym, arity, interp), structure, critical, caps, check=False)
        if image.table != entry.table:
            raise InconsistentData(
                f"substituted term for {sym!r} does not act as its catalog table"
            )
        order_terms.append((sym, interp))
    pts = None
    if points is not None:
        pts = tuple(Fraction(p) for p in points)
        if sorted(set(pts)) != list(pts):
            raise InconsistentData("stage points must be strictly increasing")
    return LiftInstance(
        structure=structure,
        generators=gen_ops,
        system=padded,
        xi=xi,
        type_clone=clone,
        assignment=assignment,
        order_terms=tuple(order_terms),
        points=pts,
    )


def _as_order_term(term: Term, bodies: Mapping[str, OrderTerm]) -> OrderTerm:
    return fold(
        term,
        lambda i: Coord(i),
        lambda name, parts: substitute(bodies[name], parts),
    )


def lift(
    instance: LiftInstance,
    stages: int,
    caps: Caps = DEFAULT_CAPS,
    recheck: bool = True,
) -> tuple[WitnessTuple, ...]:
    """Equalizing maps for every stage ``A_0, ..., A_stages``.

    Per stage, both sides of every equation are evaluated on all
    argument columns, all values of the stage are ranked through one
    shared materialization, and each equation receives a pair of maps
    agreeing on the common pattern codes.  The resulting equalities are
    verified exactly before the stage is returned.  A missing equalizer
    raises :class:`~clonelab.errors.EqualizerFailure` naming the stage,
    the equation, and a column pair the two sides order differently.
    """
    if stages < 0:
        raise InconsistentData("need at least stage 0")
    if recheck:
        _check_satisfaction(instance.system, instance.assignment, instance.type_clone)
    bodies = dict(instance.order_terms)
    n = instance.system.ambient_arity
    sides = [
        (_as_order_term(eq.lhs, bodies), _as_order_term(eq.rhs, bodies))
        for eq in instance.system.equations
    ]
    out = []
    for j in range(stages + 1):
        pts = instance.universe(j)
        rows = enumerate_argument_matrix(pts, n, caps)
        columns = len(rows[0])
        evaluations = []
        for lt, rt in sides:
            lv = [eval_rational(lt, [row[c] for row in rows]) for c in range(columns)]
            rv = [eval_rational(rt, [row[c] for row in rows]) for c in range(columns)]
            evaluations.append((lv, rv))
        ranks = materialize(v for lv, rv in evaluations for v in lv + rv)
        pairs = []
        for eq, (lv, rv) in zip(instance.system.equations, evaluations):
            left = [ranks[v] for v in lv]
            right = [ranks[v] for v in rv]
            found = find_equalizers(left, right, instance.structure)
            if found is None:
                c1, c2 = _mismatched_columns(left, right, instance.structure.kind)
                raise EqualizerFailure(
                    f"stage {j}: sides of {eq} order columns {c1} and {c2} "
                    "differently; no increasing maps can equalize them",
                    j=j,
                    equation=str(eq),
                )
            w_l, w_r = found
            for c in range(columns):
                if w_l.apply(left[c]) != w_r.apply(right[c]):
                    raise InconsistentData(
                        f"equalizer pair for {eq} fails on column {c}"
                    )
            pairs.append((w_l, w_r))
        out.append(WitnessTuple(universe=pts, pairs=tuple(pairs), columns=columns))
    return tuple(out)


@dataclass(frozen=True)
class AccumulationReport:
    """Which joint pattern owns the most stages, and whether it owns a tail.

    ``stable`` means every stage from ``indices[0]`` on realizes the
    same pattern.  That is a statement about the inspected stages only;
    it does not assert anything about stages that were never computed.
    """

    depth: int
    pattern: tuple[int, ...]
    indices: tuple[int, ...]
    total: int
    stable: bool

    def describe(self) -> str:
        kind = "tail" if self.stable else "subsequence"
        members = ",".join(str(i) for i in self.indices)
        return (
            f"depth {self.depth}: pattern {self.pattern} on {kind} "
            f"[{members}] across {self.total} stages"
        )


def approximate_accumulation(
    witnesses: Sequence[WitnessTuple],
    depth: int,
    points: Sequence[Fraction] | None = None,
) -> AccumulationReport:
    """Classify witness stages by the joint order pattern of their maps.

    Every map of every pair is applied to the first ``depth`` sample
    points (``0, ..., depth-1`` unless given) and the rank pattern of
    the concatenated images is the stage's class.  The report picks the
    largest class, breaking ties toward the latest stage.  Increasing
    maps applied on the outside of all witnesses leave the classes
    unchanged, so the classification only sees the mutual order of the
    witness maps, not their absolute values.
    """
    if len(witnesses) < 2:
        raise InconsistentData("need at least two stages to compare")
    if depth < 1:
        raise InconsistentData("need at least one sample point")
    if points is None:
        pts = tuple(Fraction(i) for i in range(depth))
    else:
        if len(points) < depth:
            raise InconsistentData(f"need {depth} sample points, got {len(points)}")
        pts = tuple(Fraction(p) for p in points[:depth])
    classes: dict[tuple[int, ...], list[int]] = {}
    for index, witness in enumerate(witnesses):
        images = []
        for w_l, w_r in witness.pairs:
            images.extend(w_l.apply(p) for p in pts)
            images.extend(w_r.apply(p) for p in pts)
        distinct = sorted(set(images))
        rank = {v: i for i, v in enumerate(distinct)}
        signature = tuple(rank[v] for v in images)
        classes.setdefault(signature, []).append(index)
    pattern, indices = max(classes.items(), key=lambda kv: (len(kv[1]), kv[1][-1]))
    stable = indices == list(range(indices[0], len(witnesses)))
    return AccumulationReport(
        depth=depth,
        pattern=pattern,
        indices=tuple(indices),
        total=len(witnesses),
        stable=stable,
    )


@dataclass(frozen=True)
class TransferReport:
    """End-to-end analysis of a generating set over a structure."""

    structure: SymbolicStructure
    xi: XiImage
    type_clone: FiniteClone
    homomorphism: ProjHomReport
    system: EquationSystem | None
    # (witness system satisfiable in the type clone,
    #  witness system unsatisfiable in the projections)
    triangle: tuple[bool, bool] | None
    instance: LiftInstance | None
    witnesses: tuple[WitnessTuple, ...] | None
    accumulation: AccumulationReport | None
    failure: str | None

    def describe(self) -> str:
        lines = [f"structure: {self.structure.name}"]
        lines.append(f"type space size: {self.xi.space.size}")
        for name, image in self.xi.images:
            lines.append(f"xi({name}):")
            lines.extend("  " + row for row in image.describe().splitlines())
        lines.append(f"catalogs: {self.type_clone.saturation_summary()}")
        lines.append(f"projection reading: {self.homomorphism.status}")
        if self.homomorphism.sigma is not None:
            sigma = " ".join(f"{s}->{i}" for s, i in self.homomorphism.sigma)
            lines.append(f"  assignment: {sigma}")
        if self.system is not None:
            lines.append("obstruction:")
            for eq in self.system.equations:
                lines.append(f"  {eq}")
            holds, fails = self.triangle  # type: ignore[misc]
            lines.append(f"  satisfiable in the type clone: {'yes' if holds else 'NO'}")
            lines.append(f"  satisfiable in projections: {'no' if fails else 'YES'}")
        if self.witnesses is not None:
            for j, witness in enumerate(self.witnesses):
                lines.append(
                    f"stage {j}: {witness.columns} columns, "
                    f"{len(witness.pairs)} equalizer pairs"
                )
        if self.accumulation is not None:
            lines.append("accumulation " + self.accumulation.describe())
        if self.failure is not None:
            lines.append(f"lift failed: {self.failure}")
        return "\n".join(lines)


def analyze_transfer(
    structure: SymbolicStructure,
    generators: Sequence[Operation],
    caps: Caps = DEFAULT_CAPS,
    stages: int = 3,
    depth: int = 2,
) -> TransferReport:
    """Full pipeline: type images, projection reading, and if a
    refutation was found, the lift of its witness system.

    A refuted projection reading comes with an equation system that the
    type clone satisfies but no selector assignment does; the lift then
    shows how the generators themselves satisfy it up to increasing
    maps — or fails honestly at some stage, which is itself a finding.
    """
    gen_ops = tuple(generators)
    for op in gen_ops:
        verdict = is_canonical(op, structure, caps=caps)
        if not verdict.canonical:
            raise NonCanonicalOperation(
                f"generator {op.name!r} is not canonical", verdict.counterexample
            )
    xi = xi_infty(gen_ops, structure, caps, check=False)
    clone = generate(xi.named_tables(), xi.space.size, caps)
    hom = has_projective_homomorphism(clone)
    if hom.status != "refuted":
        return TransferReport(
            structure=structure,
            xi=xi,
            type_clone=clone,
            homomorphism=hom,
            system=None,
            triangle=None,
            instance=None,
            witnesses=None,
            accumulation=None,
            failure=None,
        )
    system = pad_to_common_arity(hom.witness_system())
    in_clone = satisfiable_in_clone(system, clone)
    in_projections = satisfiable_in_projections(system)
    triangle = (in_clone.found, not in_projections.satisfiable)
    instance = None
    witnesses = None
    accumulation = None
    failure = None
    if in_clone.found:
        instance = _finish_instance(
            structure, gen_ops, system, xi, clone, in_clone.assignment, None, caps
        )
        try:
            witnesses = lift(instance, stages, caps)
            if len(witnesses) >= 2:
                accumulation = approximate_accumulation(witnesses, depth)
        except EqualizerFailure as exc:
            witnesses = None
            accumulation = None
            failure = str(exc)
    else:
        failure = "witness system not satisfied in the explored catalogs"
    return TransferReport(
        structure=structure,
        xi=xi,
        type_clone=clone,
        homomorphism=hom,
        system=system,
        triangle=triangle,
        instance=instance,
        witnesses=witnesses,
        accumulation=accumulation,
        failure=failure,
    )
