"""Equation systems and where they can be satisfied.

Three satisfaction notions over a common signature of operation symbols:

* in projections -- every symbol becomes a selector of one argument, so
  a term collapses to a single variable and an equation holds when both
  sides collapse to the same one;
* in a generated clone -- symbols range over catalog entries and the
  equations must hold as table identities;
* in a clone modulo outside unaries -- each side of an equation may be
  post-composed with a unary function from a supplied family before the
  comparison, which makes equations "up to outside noise" satisfiable.

The projective-homomorphism search runs the first notion against the
equations a clone generation discovered (its collisions): an assignment
of selectors consistent with every collision, or a small set of
collisions that together rule out all assignments.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from .clones import CatalogEntry, FiniteClone, Table, eval_term_table
from .config import guard
from .errors import InconsistentData, ParseError
from .terms import App, Term, Var, collapse, max_variable, parse_term

Sigma = tuple[tuple[str, int], ...]


@dataclass(frozen=True)
class Equation:
    lhs: Term
    rhs: Term

    def __str__(self):
        return f"{self.lhs} = {self.rhs}"


@dataclass(frozen=True)
class EquationSystem:
    signature: tuple[tuple[str, int], ...]
    equations: tuple[Equation, ...]
    # set by pad_to_common_arity: every term is read as an operation in
    # the variables x1..xn for this shared n
    common_arity: int | None = None

    def __post_init__(self):
        names = [name for name, _ in self.signature]
        if len(set(names)) != len(names):
            raise InconsistentData("duplicate symbol in signature")
        sig = dict(self.signature)
        for eq in self.equations:
            _check_term(eq.lhs, sig)
            _check_term(eq.rhs, sig)
        if self.common_arity is not None and self.common_arity < self._width():
            raise InconsistentData(
                f"declared common arity {self.common_arity} is below x{self._width()}"
            )

    def _width(self) -> int:
        widths = [
            max(max_variable(eq.lhs), max_variable(eq.rhs)) for eq in self.equations
        ]
        return max(widths, default=1)

    def arity_of(self, name: str) -> int:
        for n, a in self.signature:
            if n == name:
                return a
        raise InconsistentData(f"undeclared symbol {name!r}")

    @property
    def ambient_arity(self) -> int:
        return self.common_arity if self.common_arity is not None else self._width()


def pad_to_common_arity(system: EquationSystem, n: int | None = None) -> EquationSystem:
    """Fix one variable space x1..xn for every term of the system.

    Semantically each term is composed with selectors up to arity n; the
    terms themselves are unchanged, only the declared width moves.
    """
    width = max(system.ambient_arity, n if n is not None else 1)
    if system.common_arity == width:
        return system
    return EquationSystem(system.signature, system.equations, width)


def _check_term(term: Term, signature: Mapping[str, int]) -> None:
    if isinstance(term, Var):
        return
    assert isinstance(term, App)
    if term.symbol not in signature:
        raise InconsistentData(f"undeclared symbol {term.symbol!r}")
    if len(term.args) != signature[term.symbol]:
        raise InconsistentData(
            f"symbol {term.symbol!r} used with {len(term.args)} arguments, "
            f"declared with {signature[term.symbol]}"
        )
    for a in term.args:
        _check_term(a, signature)


def parse_equation_system(text: str) -> EquationSystem:
    """Read `sig f 2` declarations followed by `eq <term> = <term>` lines."""
    signature: list[tuple[str, int]] = []
    equations: list[Equation] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        if head == "sig":
            parts = rest.split()
            if len(parts) != 2 or not parts[1].isdigit():
                raise ParseError("expected `sig <name> <arity>`", number)
            name, arity = parts[0], int(parts[1])
            if arity < 1:
                raise ParseError("symbol arity must be at least 1", number)
            if any(n == name for n, _ in signature):
                raise ParseError(f"symbol {name!r} declared twice", number)
            signature.append((name, arity))
        elif head == "eq":
            sides = rest.split("=")
            if len(sides) != 2:
                raise ParseError("expected `eq <term> = <term>`", number)
            sig = dict(signature)
            equations.append(
                Equation(
                    parse_term(sides[0], sig, number),
                    parse_term(sides[1], sig, number),
                )
            )
        else:
            raise ParseError(f"unknown directive {head!r}", number)
    return EquationSystem(tuple(signature), tuple(equations))


# -- projections --------------------------------------------------------------


def projection_assignments(
    signature: Sequence[tuple[str, int]],
) -> Iterator[Sigma]:
    """All selector assignments, lexicographic in signature order."""
    names = [name for name, _ in signature]
    for choice in itertools.product(*(range(1, a + 1) for _, a in signature)):
        yield tuple(zip(names, choice))


@dataclass(frozen=True)
class ProjectionReport:
    satisfiable: bool
    sigma: Sigma | None
    # one entry per failed assignment: (assignment, index of first bad equation)
    failures: tuple[tuple[Sigma, int], ...]


def satisfiable_in_projections(system: EquationSystem) -> ProjectionReport:
    """First selector assignment satisfying every equation, or a failure
    table covering all assignments."""
    failures = []
    for sigma in projection_assignments(system.signature):
        mapping = dict(sigma)
        bad = next(
            (
                i
                for i, eq in enumerate(system.equations)
                if collapse(eq.lhs, mapping) != collapse(eq.rhs, mapping)
            ),
            None,
        )
        if bad is None:
            return ProjectionReport(True, sigma, ())
        failures.append((sigma, bad))
    return ProjectionReport(False, None, tuple(failures))


# -- generated clones ----------------------------------------------------------


def _eval_pointwise(
    term: Term, tables: Mapping[str, Table], args: Sequence[int]
) -> int:
    if isinstance(term, Var):
        return args[term.index - 1]
    assert isinstance(term, App)
    inner = tuple(_eval_pointwise(a, tables, args) for a in term.args)
    return tables[term.symbol].apply(inner)


def _holds_pointwise(
    eq: Equation, tables: Mapping[str, Table], arity: int, base_size: int
) -> bool:
    return all(
        _eval_pointwise(eq.lhs, tables, point) == _eval_pointwise(eq.rhs, tables, point)
        for point in itertools.product(range(base_size), repeat=arity)
    )


@dataclass(frozen=True)
class CloneSearchReport:
    found: bool
    assignment: tuple[tuple[str, CatalogEntry], ...] | None
    checked: int
    # whether a negative answer is definitive: every catalog the symbols
    # draw from is saturated
    exhaustive: bool


def satisfiable_in_clone(
    system: EquationSystem, clone: FiniteClone
) -> CloneSearchReport:
    """Search symbol assignments over the clone's catalogs.

    A hit is re-verified pointwise before it is returned.  A miss is
    definitive only if every involved catalog is saturated.
    """
    catalogs = [clone.catalog(arity) for _, arity in system.signature]
    guard(
        math.prod(len(c) for c in catalogs),
        clone.caps.tuple_cap,
        "assignment search space",
    )
    names = [name for name, _ in system.signature]
    n = system.ambient_arity
    exhaustive = all(
        clone.saturated[arity] for _, arity in system.signature
    )
    checked = 0
    for entries in itertools.product(*catalogs):
        checked += 1
        tables = {name: entry.table for name, entry in zip(names, entries)}
        if all(
            eval_term_table(eq.lhs, tables, n, clone.base_size)
            == eval_term_table(eq.rhs, tables, n, clone.base_size)
            for eq in system.equations
        ):
            if not all(
                _holds_pointwise(eq, tables, n, clone.base_size)
                for eq in system.equations
            ):
                raise InconsistentData(
                    "table evaluation and pointwise evaluation disagree"
                )
            return CloneSearchReport(
                True, tuple(zip(names, entries)), checked, exhaustive
            )
    return CloneSearchReport(False, None, checked, exhaustive)


@dataclass(frozen=True)
class ModuloReport:
    found: bool
    assignment: tuple[tuple[str, CatalogEntry], ...] | None
    # one (left unary name, right unary name) per equation
    modifiers: tuple[tuple[str, str], ...] | None
    checked: int
    exhaustive: bool


def satisfiable_modulo_outside(
    system: EquationSystem,
    clone: FiniteClone,
    outside: Sequence[tuple[str, Table]],
) -> ModuloReport:
    """Like `satisfiable_in_clone`, but each side of an equation may be
    post-composed with a unary function from `outside` (supplied as
    (name, table) pairs; include the identity to allow plain equality).
    """
    if not outside:
        raise InconsistentData("the outside family must not be empty")
    for name, table in outside:
        if table.arity != 1 or table.size != clone.base_size:
            raise InconsistentData(
                f"outside function {name!r} must be unary on the clone's base"
            )
    catalogs = [clone.catalog(arity) for _, arity in system.signature]
    guard(
        math.prod(len(c) for c in catalogs) * len(outside) ** 2,
        clone.caps.tuple_cap,
        "assignment search space",
    )
    names = [name for name, _ in system.signature]
    n = system.ambient_arity
    exhaustive = all(clone.saturated[arity] for _, arity in system.signature)
    checked = 0
    for entries in itertools.product(*catalogs):
        checked += 1
        tables = {name: entry.table for name, entry in zip(names, entries)}
        modifiers: list[tuple[str, str]] = []
        for eq in system.equations:
            lhs = eval_term_table(eq.lhs, tables, n, clone.base_size)
            rhs = eval_term_table(eq.rhs, tables, n, clone.base_size)
            pick = next(
                (
                    (bl_name, br_name)
                    for bl_name, bl in outside
                    for br_name, br in outside
                    if bl.compose([lhs]) == br.compose([rhs])
                ),
                None,
            )
            if pick is None:
                break
            modifiers.append(pick)
        else:
            return ModuloReport(
                True, tuple(zip(names, entries)), tuple(modifiers), checked, exhaustive
            )
    return ModuloReport(False, None, None, checked, exhaustive)


# -- homomorphisms onto the projections -----------------------------------------


@dataclass(frozen=True)
class ProjHomReport:
    status: str  # "found" | "refuted" | "undecided"
    sigma: Sigma | None
    signature: tuple[tuple[str, int], ...]
    # refutations: a small set of discovered equations such that every
    # selector assignment breaks at least one of them
    witness: tuple[tuple[Term, Term], ...]
    # (assignment, index into witness of an equation it breaks)
    coverage: tuple[tuple[Sigma, int], ...]
    exhaustive: bool
    collisions_checked: int

    def witness_system(self) -> EquationSystem:
        """The refutation as an equation system: it holds in the clone
        that produced it and fails in every projection reading."""
        return EquationSystem(
            self.signature, tuple(Equation(s, t) for s, t in self.witness)
        )


def has_projective_homomorphism(clone: FiniteClone) -> ProjHomReport:
    """Search for a selector reading of the generators consistent with
    every equation discovered while generating the clone.

    A refutation is exact.  A positive answer is exact only when every
    catalog saturated; otherwise deeper compositions could still add
    obstructions.  When a generator's arity exceeds the arity cap its
    own equations were never observed, so nothing can be concluded.
    """
    signature = [(name, table.arity) for name, table in clone.generators]
    if any(arity > clone.caps.arity_cap for _, arity in signature):
        return ProjHomReport("undecided", None, tuple(signature), (), (), False, 0)
    collisions = [
        pair for arity in sorted(clone.collisions) for pair in clone.collisions[arity]
    ]
    exhaustive = all(clone.saturated[a] for a in clone.saturated)
    sigmas = list(projection_assignments(signature))
    killed: dict[int, list[int]] = {}  # collision index -> assignments it breaks
    surviving: Sigma | None = None
    for si, sigma in enumerate(sigmas):
        mapping = dict(sigma)
        broke = None
        for ci, (s, t) in enumerate(collisions):
            if collapse(s, mapping) != collapse(t, mapping):
                broke = ci
                break
        if broke is None:
            surviving = sigma
            break
        killed.setdefault(broke, []).append(si)
    if surviving is not None:
        return ProjHomReport(
            "found", surviving, tuple(signature), (), (), exhaustive, len(collisions)
        )
    # greedy cover: prefer collisions that break many assignments at once
    remaining = set(range(len(sigmas)))
    chosen: list[int] = []
    full_kill: dict[int, set[int]] = {
        ci: {
            si
            for si, sigma in enumerate(sigmas)
            if collapse(collisions[ci][0], dict(sigma))
            != collapse(collisions[ci][1], dict(sigma))
        }
        for ci in killed
    }
    while remaining:
        best = max(full_kill, key=lambda ci: (len(full_kill[ci] & remaining), -ci))
        chosen.append(best)
        remaining -= full_kill[best]
    chosen.sort()
    coverage = []
    for si, sigma in enumerate(sigmas):
        wi = next(i for i, ci in enumerate(chosen) if si in full_kill[ci])
        coverage.append((sigma, wi))
    return ProjHomReport(
        "refuted",
        None,
        tuple(signature),
        tuple(collisions[ci] for ci in chosen),
        tuple(coverage),
        exhaustive,
        len(collisions),
    )
