"""Increasing piecewise maps of the rationals with affine and Mobius pieces.

A PLMap is a strictly increasing self-map of Q given by finitely many
pieces on half-open intervals [lo, hi) covering the line.  Each piece is
a fractional-linear map x -> (a*x + b)/(c*x + d) with positive
determinant and pole outside the piece; affine pieces are the c == 0
case.  Adjacent pieces agree at shared endpoints, so the whole map is
strictly increasing.  Maps with unbounded range in both directions are
automorphisms of (Q, <); bounded ones are proper self-embeddings.

All coefficients and arguments are `fractions.Fraction`; everything is
exact.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InconsistentData, ParseError

Mat = tuple[Fraction, Fraction, Fraction, Fraction]

_ZERO = Fraction(0)
_ONE = Fraction(1)


def _canonical(mat: Mat) -> Mat:
    """Scale a matrix to its canonical representative (c == 1, or d == 1)."""
    a, b, c, d = mat
    if c != 0:
        return (a / c, b / c, _ONE, d / c)
    if d == 0:
        raise InconsistentData("degenerate piece matrix: c = d = 0")
    return (a / d, b / d, _ZERO, _ONE)


@dataclass(frozen=True)
class Piece:
    """One interval [lo, hi) with its fractional-linear map; None is +-infinity."""

    lo: Fraction | None
    hi: Fraction | None
    mat: Mat

    def __post_init__(self):
        object.__setattr__(self, "mat", _canonical(tuple(Fraction(v) for v in self.mat)))
        if self.lo is not None:
            object.__setattr__(self, "lo", Fraction(self.lo))
        if self.hi is not None:
            object.__setattr__(self, "hi", Fraction(self.hi))
        a, b, c, d = self.mat
        if a * d - b * c <= 0:
            raise InconsistentData("piece matrix must have positive determinant")
        if self.lo is not None and self.hi is not None and not self.lo < self.hi:
            raise InconsistentData("piece interval is empty")
        if c != 0:
            pole = -d / c
            if (self.lo is None or pole >= self.lo) and (
                self.hi is None or pole <= self.hi
            ):
                raise InconsistentData("piece has a pole inside its closed interval")

    @property
    def is_affine(self) -> bool:
        return self.mat[2] == 0

    def value(self, x: Fraction) -> Fraction:
        a, b, c, d = self.mat
        return (a * x + b) / (c * x + d)

    def invert(self, y: Fraction) -> Fraction | None:
        """Solve value(x) == y; None when y is the piece's asymptote."""
        a, b, c, d = self.mat
        if a - c * y == 0:
            return None
        return (d * y - b) / (a - c * y)

    def limit_low(self) -> Fraction | None:
        """Infimum of values on the piece; None means -infinity."""
        if self.lo is not None:
            return self.value(self.lo)
        a, _, c, _ = self.mat
        return None if c == 0 else a / c

    def limit_high(self) -> Fraction | None:
        """Supremum of values on the piece; None means +infinity."""
        if self.hi is not None:
            return self.value(self.hi)
        a, _, c, _ = self.mat
        return None if c == 0 else a / c


@dataclass(frozen=True)
class PLMap:
    pieces: tuple[Piece, ...]

    def __post_init__(self):
        ps = self.pieces
        if not ps:
            raise InconsistentData("a PLMap needs at least one piece")
        if ps[0].lo is not None or ps[-1].hi is not None:
            raise InconsistentData("pieces must cover the whole line")
        for left, right in zip(ps, ps[1:]):
            if left.hi is None or right.lo is None or left.hi != right.lo:
                raise InconsistentData("pieces must be adjacent")
            if left.value(left.hi) != right.value(right.lo):
                raise InconsistentData(
                    f"pieces disagree at breakpoint {left.hi}: "
                    f"{left.value(left.hi)} vs {right.value(right.lo)}"
                )

    # -- evaluation ----------------------------------------------------

    def _breaks(self) -> list[Fraction]:
        return [p.hi for p in self.pieces[:-1]]  # type: ignore[misc]

    def piece_at(self, x: Fraction) -> Piece:
        return self.pieces[bisect_right(self._breaks(), x)]

    def apply(self, x: Fraction) -> Fraction:
        return self.piece_at(x).value(x)

    def __call__(self, x: Fraction) -> Fraction:
        return self.apply(x)

    def invert_value(self, y: Fraction) -> Fraction | None:
        """Preimage of y, or None when y is outside the range."""
        for piece in self.pieces:
            x = piece.invert(y)
            if x is None:
                continue
            if (piece.lo is None or x >= piece.lo) and (piece.hi is None or x < piece.hi):
                if piece.value(x) == y:
                    return x
        return None

    # -- range shape ---------------------------------------------------

    def range_inf(self) -> Fraction | None:
        """Greatest lower bound of the range (never attained); None is -infinity."""
        return self.pieces[0].limit_low()

    def range_sup(self) -> Fraction | None:
        return self.pieces[-1].limit_high()

    @property
    def is_automorphism(self) -> bool:
        """True when the map is onto Q (unbounded in both directions)."""
        return self.range_inf() is None and self.range_sup() is None

    # -- algebra -------------------------------------------------------

    def compose(self, inner: "PLMap") -> "PLMap":
        """self after inner, as a PLMap."""
        cuts: set[Fraction] = set(inner._breaks())
        for piece in inner.pieces:
            low, high = piece.limit_low(), piece.limit_high()
            for b in self._breaks():
                if (low is None or low < b) and (high is None or b < high):
                    x = piece.invert(b)
                    if x is None:
                        continue
                    if (piece.lo is None or x >= piece.lo) and (
                        piece.hi is None or x < piece.hi
                    ):
                        cuts.add(x)
        points = sorted(cuts)
        bounds: list[Fraction | None] = [None, *points, None]
        pieces = []
        for lo, hi in zip(bounds, bounds[1:]):
            sample = _interior_point(lo, hi)
            f = inner.piece_at(sample)
            g = self.piece_at(f.value(sample))
            pieces.append(Piece(lo, hi, _matmul(g.mat, f.mat)))
        return PLMap(_merge(pieces))

    # -- serialization -------------------------------------------------

    def serialize(self) -> str:
        lines = []
        for p in self.pieces:
            lo, hi = _endpoint_str(p.lo, "-inf"), _endpoint_str(p.hi, "inf")
            a, b, c, d = p.mat
            if p.is_affine:
                lines.append(f"piece {lo} {hi} affine {a} {b}")
            else:
                lines.append(f"piece {lo} {hi} mobius {a} {b} {c} {d}")
        return "\n".join(lines) + "\n"

    def breakpoints(self) -> list[Fraction]:
        return self._breaks()


def _interior_point(lo: Fraction | None, hi: Fraction | None) -> Fraction:
    if lo is None and hi is None:
        return _ZERO
    if lo is None:
        return hi - 1  # type: ignore[operand-type]
    if hi is None:
        return lo + 1
    return (lo + hi) / 2


def _matmul(g: Mat, f: Mat) -> Mat:
    a1, b1, c1, d1 = g
    a2, b2, c2, d2 = f
    return (
        a1 * a2 + b1 * c2,
        a1 * b2 + b1 * d2,
        c1 * a2 + d1 * c2,
        c1 * b2 + d1 * d2,
    )


def _merge(pieces: list[Piece]) -> tuple[Piece, ...]:
    merged = [pieces[0]]
    for piece in pieces[1:]:
        last = merged[-1]
        if piece.mat == last.mat:
            merged[-1] = Piece(last.lo, piece.hi, last.mat)
        else:
            merged.append(piece)
    return tuple(merged)


def _endpoint_str(v: Fraction | None, inf: str) -> str:
    return inf if v is None else str(v)


# -- constructors ------------------------------------------------------


def identity() -> PLMap:
    return PLMap((Piece(None, None, (_ONE, _ZERO, _ZERO, _ONE)),))


def affine(slope: Fraction, offset: Fraction) -> PLMap:
    if slope <= 0:
        raise InconsistentData("affine map must have positive slope")
    return PLMap((Piece(None, None, (Fraction(slope), Fraction(offset), _ZERO, _ONE)),))


def translation(offset) -> PLMap:
    return affine(_ONE, Fraction(offset))


def from_point_pairs(pairs: Iterable[tuple[Fraction, Fraction]]) -> PLMap:
    """Increasing interpolation through finitely many points, slope-1 tails.

    The pairs must be strictly increasing in both coordinates after
    sorting by the first; equal first coordinates must carry equal second
    coordinates (duplicates are collapsed).
    """
    cleaned = sorted(set((Fraction(x), Fraction(y)) for x, y in pairs))
    for (x1, y1), (x2, y2) in zip(cleaned, cleaned[1:]):
        if x1 == x2:
            raise InconsistentData(f"point {x1} maps to both {y1} and {y2}")
        if y1 >= y2:
            raise InconsistentData("point pairs are not increasing")
    if not cleaned:
        return identity()
    pieces = []
    x0, y0 = cleaned[0]
    pieces.append(Piece(None, x0, (_ONE, y0 - x0, _ZERO, _ONE)))
    for (x1, y1), (x2, y2) in zip(cleaned, cleaned[1:]):
        slope = (y2 - y1) / (x2 - x1)
        pieces.append(Piece(x1, x2, (slope, y1 - slope * x1, _ZERO, _ONE)))
    xr, yr = cleaned[-1]
    pieces.append(Piece(xr, None, (_ONE, yr - xr, _ZERO, _ONE)))
    return PLMap(_merge(pieces))


# -- parsing -----------------------------------------------------------


def parse_fraction(text: str, line: int | None = None) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad rational literal {text!r}", line)


def _parse_endpoint(text: str, line: int | None) -> Fraction | None:
    if text in ("inf", "-inf"):
        return None
    return parse_fraction(text, line)


def parse_piece_line(parts: Sequence[str], line: int | None = None) -> Piece:
    """Parse the tail of a `piece` line (after the keyword itself)."""
    if len(parts) < 3:
        raise ParseError("piece needs endpoints and a kind", line)
    lo = _parse_endpoint(parts[0], line)
    hi = _parse_endpoint(parts[1], line)
    kind = parts[2]
    coeffs = [parse_fraction(t, line) for t in parts[3:]]
    if kind == "affine":
        if len(coeffs) != 2:
            raise ParseError("affine piece needs 2 coefficients", line)
        mat = (coeffs[0], coeffs[1], _ZERO, _ONE)
    elif kind == "mobius":
        if len(coeffs) != 4:
            raise ParseError("mobius piece needs 4 coefficients", line)
        mat = (coeffs[0], coeffs[1], coeffs[2], coeffs[3])
    else:
        raise ParseError(f"unknown piece kind {kind!r}", line)
    try:
        return Piece(lo, hi, mat)
    except InconsistentData as exc:
        raise ParseError(str(exc), line)


def parse_plmap(text: str) -> PLMap:
    """Parse a whole map from `piece ...` lines ('#' comments allowed)."""
    pieces = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            continue
        parts = stripped.split()
        if parts[0] != "piece":
            raise ParseError(f"expected 'piece', got {parts[0]!r}", lineno)
        pieces.append(parse_piece_line(parts[1:], lineno))
    if not pieces:
        raise ParseError("no pieces found")
    try:
        return PLMap(tuple(pieces))
    except InconsistentData as exc:
        raise ParseError(str(exc))
