"""Polymorphisms of the rational order that are eventually a coordinate.

The functions built here take rational arguments and, once every
argument exceeds a threshold, return a fixed increasing bijection of a
fixed coordinate.  Below the threshold they do whatever a finite
strictly monotone data set demands, filled in by a hull construction
that keeps the whole function a polymorphism of (Q,<): strictly
increasing in every coordinate simultaneously.

Reading off the eventual coordinate is a homomorphism onto the clone of
coordinate selectors — composition collapses to composition of
selectors — yet no finite restriction of a member pins that coordinate
down: ``extend_restriction`` rebuilds any strict-monotone-consistent
finite data with whatever eventual coordinate is requested, and
``noncontinuity_demo`` packages that as n members agreeing on a common
restriction while disagreeing everywhere in their eventual behavior.

Thresholds, maps, and data are exact rationals throughout; every
verification in this module compares values with ``==``, not with
tolerances.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .config import Caps, DEFAULT_CAPS, guard
from .errors import InconsistentData, ParseError
from .plmap import Piece, PLMap, identity, parse_plmap, translation


def _squash(x: Fraction) -> Fraction:
    # bounded strictly increasing self-map of Q with values in (-1, 1)
    return x / (1 + x) if x >= 0 else x / (1 - x)


@dataclass(frozen=True)
class DataHull:
    """Strictly monotone interpolation of finite data, range-bounded above.

    Off the data points the value is the largest data value weakly
    dominated by the argument (or a floor below all data), plus a
    strictly increasing tie-breaker small enough never to disturb a
    data gap.  Exact on the data, strictly increasing against it, and
    bounded above by the ceiling the builder was given.
    """

    data: tuple[tuple[tuple[Fraction, ...], Fraction], ...]
    floor: Fraction
    epsilon: Fraction

    def apply(self, point: tuple[Fraction, ...]) -> Fraction:
        for p, v in self.data:
            if p == point:
                return v
        best = self.floor
        for p, v in self.data:
            if v > best and all(pj <= xj for pj, xj in zip(p, point)):
                best = v
        n = len(point)
        return best + self.epsilon * (n + sum(_squash(x) for x in point))


@dataclass(frozen=True)
class CoordinateGraph:
    """Below-threshold behavior that is one increasing map of the
    eventual coordinate — the whole function is ``graph(u_i)``."""

    graph: PLMap


@dataclass(frozen=True)
class Composition:
    """Provenance of a composed member; evaluation recurses through it."""

    outer: "QFunction"
    inners: tuple["QFunction", ...]


@dataclass(frozen=True)
class QFunction:
    """A polymorphism of (Q,<) that is eventually a coordinate bijection.

    Whenever every argument exceeds ``threshold``, the value is
    ``eventual(u[coordinate-1])`` with ``eventual`` an increasing
    bijection of Q.  ``below`` fixes the rest of the function and
    records where the member came from.
    """

    arity: int
    coordinate: int
    threshold: Fraction
    eventual: PLMap
    below: DataHull | CoordinateGraph | Composition

    def __post_init__(self):
        if self.arity < 1:
            raise InconsistentData("arity must be at least 1")
        if not 1 <= self.coordinate <= self.arity:
            raise InconsistentData(
                f"coordinate {self.coordinate} outside 1..{self.arity}"
            )
        object.__setattr__(self, "threshold", Fraction(self.threshold))
        if isinstance(self.below, CoordinateGraph) and not _agree_above(
            self.below.graph, self.eventual, self.threshold
        ):
            raise InconsistentData(
                "graph disagrees with the eventual map above the threshold"
            )


def _agree_above(m1: PLMap, m2: PLMap, lo: Fraction) -> bool:
    # exact: on each subinterval both maps are single fractional-linear
    # pieces, and those are determined by three points
    cuts = sorted(
        {b for b in m1.breakpoints() + m2.breakpoints() if b > lo}
    )
    samples: list[Fraction] = list(cuts)
    bounds = [lo, *cuts, None]
    for left, right in zip(bounds, bounds[1:]):
        if right is None:
            samples.extend(left + k for k in (1, 2, 3))
        else:
            step = (right - left) / 4
            samples.extend(left + k * step for k in (1, 2, 3))
    return all(m1.apply(x) == m2.apply(x) for x in samples)


# -- construction --------------------------------------------------------


def _normalize_data(
    data: Mapping[Sequence[Fraction], Fraction], n: int
) -> dict[tuple[Fraction, ...], Fraction]:
    out: dict[tuple[Fraction, ...], Fraction] = {}
    for point, value in data.items():
        if len(point) != n:
            raise InconsistentData(f"data point {point} is not {n}-ary")
        out[tuple(Fraction(x) for x in point)] = Fraction(value)
    return out


def _check_consistency(
    data: Mapping[tuple[Fraction, ...], Fraction], strict_only: bool
) -> None:
    """The order condition finite data must satisfy to extend.

    ``strict_only`` checks just pointwise-strict pairs — the condition
    forced on any restriction of a polymorphism.  Otherwise any weak
    domination between distinct points must already increase the value.
    """
    for (p, pv), (q, qv) in itertools.permutations(data.items(), 2):
        if strict_only:
            if all(pj < qj for pj, qj in zip(p, q)) and pv >= qv:
                raise InconsistentData(f"inconsistent data: {p} -> {pv}, {q} -> {qv}")
        elif p != q and all(pj <= qj for pj, qj in zip(p, q)) and pv >= qv:
            raise InconsistentData(f"inconsistent data: {p} -> {pv}, {q} -> {qv}")


def _build_hull(
    data: Mapping[tuple[Fraction, ...], Fraction], n: int, ceiling: Fraction
) -> DataHull:
    entries = tuple(sorted(data.items()))
    values = [v for _, v in entries]
    floor = min(values) - 1 if values else ceiling - 2
    head = max(values) if values else floor
    if head >= ceiling:
        raise InconsistentData(f"base value {head} at or above the bound {ceiling}")
    gaps = {abs(a - b) for a in values for b in values if a != b}
    min_gap = min(gaps) if gaps else Fraction(1)
    epsilon = min(min_gap, Fraction(1), ceiling - head) / (4 * n)
    return DataHull(entries, floor, epsilon)


def make_member(
    n: int,
    i: int,
    a: Fraction,
    alpha: PLMap,
    base_data: Mapping[Sequence[Fraction], Fraction],
) -> QFunction:
    """A member from its parameters: eventually ``alpha`` of coordinate
    ``i``, below the threshold ``a`` a strict extension of ``base_data``.

    The data must be monotone-consistent (weak pointwise domination
    between distinct points increases the value), sit below the
    threshold in at least one coordinate, and stay under ``alpha(a)``.
    """
    if not alpha.is_automorphism:
        raise InconsistentData("the eventual map must be a bijection of Q")
    a = Fraction(a)
    data = _normalize_data(base_data, n)
    for point in data:
        if all(x > a for x in point):
            raise InconsistentData(
                f"data point {point} lies entirely above the threshold {a}"
            )
    _check_consistency(data, strict_only=False)
    return QFunction(n, i, a, alpha, _build_hull(data, n, alpha.apply(a)))


def selector_member(n: int, i: int) -> QFunction:
    """The i-th coordinate itself, as a member (eventual everywhere)."""
    return QFunction(n, i, Fraction(0), identity(), CoordinateGraph(identity()))


# -- evaluation and the homomorphism --------------------------------------


def evaluate(f: QFunction, u: Sequence[Fraction]) -> Fraction:
    """Exact value at a rational point; compositions evaluate recursively."""
    point = tuple(Fraction(x) for x in u)
    if len(point) != f.arity:
        raise InconsistentData(f"expected {f.arity} arguments, got {len(point)}")
    if isinstance(f.below, Composition):
        inner = [evaluate(g, point) for g in f.below.inners]
        return evaluate(f.below.outer, inner)
    if isinstance(f.below, CoordinateGraph):
        return f.below.graph.apply(point[f.coordinate - 1])
    if min(point) > f.threshold:
        return f.eventual.apply(point[f.coordinate - 1])
    return f.below.apply(point)


def _collapse(f: QFunction) -> int:
    if isinstance(f.below, Composition):
        return _collapse(f.below.inners[_collapse(f.below.outer) - 1])
    return f.coordinate


def xi(f: QFunction) -> int:
    """The eventual coordinate — the selector the member maps to.

    Recomputed as the selector collapse of the provenance and
    cross-checked by one evaluation past the threshold; a disagreement
    means the bookkeeping is broken and raises.
    """
    symbolic = _collapse(f)
    if symbolic != f.coordinate:
        raise InconsistentData(
            f"recorded coordinate {f.coordinate} differs from collapse {symbolic}"
        )
    sample = tuple(f.threshold + 1 + j for j in range(f.arity))
    expected = f.eventual.apply(sample[f.coordinate - 1])
    if evaluate(f, sample) != expected:
        raise InconsistentData("evaluation past the threshold contradicts the coordinate")
    return symbolic


def compose_members(f: QFunction, gs: Sequence[QFunction]) -> QFunction:
    """Composition f(g_1, ..., g_k), with its eventual regime computed.

    The new threshold is large enough that every inner member is in its
    eventual regime and its output has cleared the outer threshold, so
    above it the composite is the composed bijection of the collapsed
    coordinate.
    """
    inners = tuple(gs)
    if len(inners) != f.arity:
        raise InconsistentData(f"{f.arity}-ary member composed with {len(inners)} inners")
    arities = {g.arity for g in inners}
    if len(arities) != 1:
        raise InconsistentData("inner members must share one arity")
    n = arities.pop()
    star = inners[f.coordinate - 1]
    candidates = [g.threshold for g in inners]
    for g in inners:
        pre = g.eventual.invert_value(f.threshold)
        if pre is not None:
            candidates.append(pre)
            continue
        sup = g.eventual.range_sup()
        if sup is not None and sup <= f.threshold:
            raise InconsistentData("inner eventual map never clears the outer threshold")
        # the whole range already sits above the outer threshold
    return QFunction(
        arity=n,
        coordinate=star.coordinate,
        threshold=max(candidates),
        eventual=f.eventual.compose(star.eventual),
        below=Composition(f, inners),
    )


def spot_check_polymorphism(f: QFunction, pairs: int = 1000, seed: int = 0) -> int:
    """Randomized strict-monotonicity check; raises on any violation."""
    rng = random.Random(seed)
    for _ in range(pairs):
        u = [Fraction(rng.randint(-60, 60), rng.randint(1, 6)) for _ in range(f.arity)]
        v = [x + Fraction(rng.randint(1, 30), rng.randint(1, 6)) for x in u]
        if not evaluate(f, u) < evaluate(f, v):
            raise InconsistentData(f"not increasing between {u} and {v}")
    return pairs


# -- rebuilding restrictions ----------------------------------------------


def extend_restriction(
    restriction: Mapping[Sequence[Fraction], Fraction], target_i: int, n: int
) -> QFunction:
    """A member agreeing exactly with a finite restriction, with the
    eventual coordinate of our choosing.

    Only pointwise-strict domination constrains a polymorphism, so only
    that is demanded of the data — restrictions of min, say, repeat
    values across weakly comparable points and still extend.  The
    threshold is pushed above every coordinate in the data and the
    eventual map is a translation clearing every data value.
    """
    data = _normalize_data(restriction, n)
    _check_consistency(data, strict_only=True)
    coords = [x for point in data for x in point]
    a = max(coords) + 1 if coords else Fraction(0)
    values = list(data.values())
    offset = max(values) + 1 - a if values else Fraction(0)
    member = QFunction(
        arity=n,
        coordinate=target_i,
        threshold=a,
        eventual=translation(offset),
        below=_build_hull(data, n, a + offset),
    )
    for point, value in data.items():
        if evaluate(member, point) != value:
            raise InconsistentData(f"extension failed to reproduce {point}")
    return member


# -- the uniqueness argument ----------------------------------------------


def _embedding_above(a: Fraction) -> PLMap:
    # increasing self-map with range exactly (a, oo): a Moebius squash
    # below zero, a translation above
    a = Fraction(a)
    return PLMap(
        (
            Piece(None, Fraction(0), (-a, a + 1, Fraction(-1), Fraction(1))),
            Piece(Fraction(0), None, (Fraction(1), a + 1, Fraction(0), Fraction(1))),
        )
    )


@dataclass(frozen=True)
class UniquenessReport:
    """Record of the check that forces the coordinate reading.

    The witnesses push every argument strictly past the threshold, so
    the composite equals the eventual map of one inner value and
    depends on exactly one coordinate — any selector reading of the
    member has to pick that coordinate.
    """

    threshold: Fraction
    range_inf: Fraction
    range_attained: bool
    unbounded_above: bool
    grid_side: int
    checked: int
    coordinate: int

    def describe(self) -> str:
        return (
            f"witness range ({self.range_inf}, oo), threshold {self.threshold}; "
            f"composite on the {self.grid_side}x{self.grid_side} grid "
            f"({self.checked} points) depends only on coordinate {self.coordinate}"
        )


def uniqueness_witnesses(
    f: QFunction, grid_side: int = 10, caps: Caps = DEFAULT_CAPS
) -> tuple[tuple[QFunction, ...], UniquenessReport]:
    """Unary members whose ranges sit strictly above f's threshold,
    together with the verification that plugging them into f leaves a
    function of the eventual coordinate alone.

    The range bound is read off the pieces of the witness map exactly;
    the grid evaluation then confirms the composite pointwise.
    """
    if isinstance(f.below, Composition):
        raise InconsistentData("uniqueness witnesses want a member with parameters")
    a = f.threshold
    graph = _embedding_above(a)
    inf = graph.range_inf()
    if inf != a or graph.range_sup() is not None:
        raise InconsistentData("witness map range is not the interval above the threshold")
    g = QFunction(1, 1, Fraction(0), translation(a + 1), CoordinateGraph(graph))
    witnesses = tuple(g for _ in range(f.arity))
    guard(grid_side**f.arity, caps.tuple_cap, "verification grid size")
    half = grid_side // 2
    axis = [Fraction(k - half) for k in range(grid_side)]
    checked = 0
    for x in itertools.product(axis, repeat=f.arity):
        pushed = [evaluate(w, (xj,)) for w, xj in zip(witnesses, x)]
        lhs = evaluate(f, pushed)
        rhs = f.eventual.apply(pushed[f.coordinate - 1])
        if lhs != rhs:
            raise InconsistentData(f"composite not a function of x{f.coordinate} at {x}")
        checked += 1
    report = UniquenessReport(
        threshold=a,
        range_inf=inf,
        range_attained=False,
        unbounded_above=True,
        grid_side=grid_side,
        checked=checked,
        coordinate=f.coordinate,
    )
    return witnesses, report


# -- the discontinuity demonstration --------------------------------------


@dataclass(frozen=True)
class NoncontinuityReport:
    """One restriction, n extensions, n different eventual coordinates."""

    arity: int
    seed: int
    base: QFunction
    restriction: tuple[tuple[tuple[Fraction, ...], Fraction], ...]
    extensions: tuple[QFunction, ...]

    def coordinates(self) -> tuple[int, ...]:
        return tuple(xi(g) for g in self.extensions)

    def describe(self) -> str:
        lines = [
            f"arity {self.arity}, seed {self.seed}",
            f"restriction of {len(self.restriction)} points "
            f"of a member with eventual coordinate {self.base.coordinate}",
        ]
        for point, value in self.restriction:
            args = ", ".join(str(x) for x in point)
            lines.append(f"  ({args}) -> {value}")
        for g in self.extensions:
            lines.append(
                f"extension with eventual coordinate {xi(g)}: "
                f"threshold {g.threshold}, agrees on all "
                f"{len(self.restriction)} points"
            )
        lines.append(
            "no finite restriction determines the eventual coordinate"
        )
        return "\n".join(lines)


def noncontinuity_demo(n: int, sample_count: int, seed: int = 0) -> NoncontinuityReport:
    """Restrict a member to finitely many points, then rebuild it with
    every possible eventual coordinate.

    All extensions agree with the original on the sampled points
    exactly, yet their eventual coordinates exhaust 1..n — knowing a
    member on finitely many points says nothing about where it goes.
    """
    if n < 2:
        raise InconsistentData("the demonstration needs arity at least 2")
    if sample_count < 0:
        raise InconsistentData("sample count must be nonnegative")
    rng = random.Random(seed)
    base = make_member(n, 1, Fraction(0), identity(), {})
    points: set[tuple[Fraction, ...]] = set()
    while len(points) < sample_count:
        points.add(
            tuple(Fraction(rng.randint(-24, 24), rng.randint(1, 4)) for _ in range(n))
        )
    restriction = {p: evaluate(base, p) for p in sorted(points)}
    extensions = []
    for target in range(1, n + 1):
        member = extend_restriction(restriction, target, n)
        for point, value in restriction.items():
            if evaluate(member, point) != value:
                raise InconsistentData(f"extension {target} broke the restriction at {point}")
        extensions.append(member)
    return NoncontinuityReport(
        arity=n,
        seed=seed,
        base=base,
        restriction=tuple(sorted(restriction.items())),
        extensions=tuple(extensions),
    )


# -- files -----------------------------------------------------------------


def serialize_member(f: QFunction) -> str:
    """File form of a member with parameters: arity, eventual coordinate
    and threshold, the named eventual map, and the data rows."""
    if not isinstance(f.below, DataHull):
        raise InconsistentData("only members with parameters have a file form")
    lines = [
        f"arity {f.arity}",
        f"eventual {f.coordinate} {f.threshold}",
        "alpha m",
        "map m",
    ]
    lines.extend(f.eventual.serialize().strip().splitlines())
    for point, value in f.below.data:
        row = " ".join(str(x) for x in point)
        lines.append(f"data {row} {value}")
    return "\n".join(lines) + "\n"


def parse_member(text: str) -> QFunction:
    """Inverse of :func:`serialize_member`; '#' starts a comment."""
    arity: int | None = None
    coordinate: int | None = None
    threshold: Fraction | None = None
    alpha_name: str | None = None
    maps: dict[str, list[str]] = {}
    current: list[str] | None = None
    rows: list[tuple[int, list[str]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            continue
        head, *rest = stripped.split()
        try:
            if head == "arity":
                (field,) = rest
                arity = int(field)
            elif head == "eventual":
                coord_field, threshold_field = rest
                coordinate = int(coord_field)
                threshold = Fraction(threshold_field)
            elif head == "alpha":
                (alpha_name,) = rest
            elif head == "map":
                (name,) = rest
                if name in maps:
                    raise ParseError(f"map {name!r} defined twice", lineno)
                current = maps.setdefault(name, [])
            elif head == "piece":
                if current is None:
                    raise ParseError("piece line outside a map block", lineno)
                current.append(stripped)
            elif head == "data":
                rows.append((lineno, rest))
            else:
                raise ParseError(f"unknown directive {head!r}", lineno)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(str(exc), lineno) from exc
    if arity is None or coordinate is None or threshold is None:
        raise ParseError("missing arity or eventual line")
    if alpha_name is None or alpha_name not in maps:
        raise ParseError("no alpha map named")
    alpha = parse_plmap("\n".join(maps[alpha_name]))
    if not alpha.is_automorphism:
        raise InconsistentData("the eventual map must be a bijection of Q")
    data: dict[tuple[Fraction, ...], Fraction] = {}
    for lineno, fields in rows:
        if len(fields) != arity + 1:
            raise ParseError(f"data row needs {arity + 1} rationals", lineno)
        try:
            numbers = [Fraction(field) for field in fields]
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(str(exc), lineno) from exc
        point = tuple(numbers[:arity])
        if point in data:
            raise ParseError(f"data point {point} repeated", lineno)
        data[point] = numbers[arity]
    for point in data:
        if all(x > threshold for x in point):
            raise InconsistentData(
                f"data point {point} lies entirely above the threshold {threshold}"
            )
    _check_consistency(data, strict_only=True)
    return QFunction(
        arity,
        coordinate,
        threshold,
        alpha,
        _build_hull(data, arity, alpha.apply(threshold)),
    )
