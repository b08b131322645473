"""Eventually-a-coordinate polymorphisms: construction, composition,
restriction rebuilding, and the uniqueness check.

Monotonicity below the threshold is exercised with randomized strictly
dominated pairs; everything else is exact rational equality.
"""

from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from clonelab.errors import InconsistentData, ParseError
from clonelab.plmap import identity, translation
from clonelab.qclone import (
    Composition,
    QFunction,
    compose_members,
    evaluate,
    extend_restriction,
    make_member,
    noncontinuity_demo,
    parse_member,
    selector_member,
    serialize_member,
    spot_check_polymorphism,
    uniqueness_witnesses,
    xi,
)

F = Fraction


def plain_member(n=2, i=1, a=0):
    return make_member(n, i, F(a), identity(), {})


def incomparable_member():
    # two data points neither of which dominates the other
    return make_member(2, 1, F(2), translation(4), {(F(0), F(1)): F(5), (F(1), F(0)): F(2)})


MIN_POINTS = {
    (F(0), F(1)): F(0),
    (F(0), F(2)): F(0),
    (F(1), F(0)): F(0),
    (F(2), F(3)): F(2),
    (F(-1), F(-2)): F(-2),
}


# -- members from parameters -----------------------------------------------


def test_empty_member_is_the_coordinate_past_the_threshold():
    f = plain_member()
    assert evaluate(f, (F(5), F(7))) == 5
    assert evaluate(f, (F(1000), F(1, 2))) == 1000
    # once any argument drops to the threshold, values fall below alpha(a)
    assert evaluate(f, (F(5), F(-1))) < 0
    assert evaluate(f, (F(5), F(0))) < 0


def test_single_data_point_member():
    f = make_member(1, 1, F(0), translation(3), {(F(-1),): F(0)})
    assert evaluate(f, (F(-1),)) == 0
    assert evaluate(f, (F(2),)) == 5
    assert evaluate(f, (F(-2),)) < 0


def test_incomparable_data_points_are_accepted():
    f = incomparable_member()
    assert evaluate(f, (F(0), F(1))) == 5
    assert evaluate(f, (F(1), F(0))) == 2
    assert evaluate(f, (F(3), F(3))) == 7


@pytest.mark.parametrize(
    "kwargs",
    [
        # weak domination with a non-increasing value
        dict(data={(F(0), F(1)): F(5), (F(0), F(2)): F(3)}),
        # value at the eventual bound alpha(a) = 0
        dict(data={(F(-1), F(-1)): F(0)}),
        # data point entirely above the threshold
        dict(data={(F(1), F(2)): F(-1)}),
    ],
)
def test_member_data_validation(kwargs):
    with pytest.raises(InconsistentData):
        make_member(2, 1, F(0), identity(), kwargs["data"])


def test_member_parameter_validation():
    with pytest.raises(InconsistentData):
        make_member(2, 3, F(0), identity(), {})
    bounded = uniqueness_witnesses(plain_member())[0][0].below.graph
    with pytest.raises(InconsistentData):
        make_member(2, 1, F(0), bounded, {})


@given(
    st.integers(min_value=1, max_value=60),
    st.integers(min_value=1, max_value=6),
    st.integers(min_value=1, max_value=60),
    st.integers(min_value=1, max_value=6),
)
def test_eventual_regime_is_exact(p, q, r, s):
    f = make_member(2, 2, F(3), translation(-7), {(F(0), F(0)): F(-12)})
    u = (F(3) + F(p, q), F(3) + F(r, s))
    assert evaluate(f, u) == u[1] - 7


def test_polymorphism_spot_checks_pass():
    members = [
        plain_member(),
        incomparable_member(),
        selector_member(3, 2),
        extend_restriction(MIN_POINTS, 1, 2),
        compose_members(plain_member(), [incomparable_member(), plain_member(2, 2)]),
        uniqueness_witnesses(plain_member())[0][0],
    ]
    for f in members:
        assert spot_check_polymorphism(f, 300, seed=5) == 300


# -- composition and the coordinate reading --------------------------------


def test_xi_of_members_and_compositions():
    assert xi(plain_member(3, 2)) == 2
    f = plain_member(2, 1)
    unary = make_member(1, 1, F(0), translation(3), {})
    assert xi(compose_members(unary, [unary])) == 1
    # a binary member reading coordinate 2 composed with two unary
    # members collapses to the second inner's coordinate
    g = plain_member(2, 2)
    assert xi(compose_members(g, [unary, unary])) == 1
    assert xi(compose_members(f, [selector_member(2, 2), selector_member(2, 1)])) == 2


def test_composition_collapse_law_on_random_chains():
    import random

    rng = random.Random(11)
    pool = [
        plain_member(2, 1),
        plain_member(2, 2),
        incomparable_member(),
        selector_member(2, 1),
        selector_member(2, 2),
    ]
    for _ in range(100):
        f = rng.choice(pool)
        gs = [rng.choice(pool) for _ in range(f.arity)]
        composed = compose_members(f, gs)
        assert xi(composed) == xi(gs[xi(f) - 1])
        pool.append(composed)


def test_composing_with_selectors_changes_nothing_pointwise():
    f = incomparable_member()
    comp = compose_members(f, [selector_member(2, 1), selector_member(2, 2)])
    import random

    rng = random.Random(3)
    for _ in range(50):
        u = (F(rng.randint(-40, 40), rng.randint(1, 5)), F(rng.randint(-40, 40), rng.randint(1, 5)))
        assert evaluate(comp, u) == evaluate(f, u)


def test_two_unary_members_compose_to_the_composed_map():
    outer = make_member(1, 1, F(0), translation(3), {})
    inner = make_member(1, 1, F(5), translation(10), {})
    comp = compose_members(outer, [inner])
    assert comp.threshold == 5
    assert comp.eventual == translation(13)
    for k in range(1, 101):
        x = F(5) + F(k, 7)
        assert evaluate(comp, (x,)) == x + 13


def test_composition_arity_mismatches_are_rejected():
    f = plain_member(2, 1)
    with pytest.raises(InconsistentData):
        compose_members(f, [selector_member(2, 1)])
    with pytest.raises(InconsistentData):
        compose_members(f, [selector_member(2, 1), selector_member(3, 1)])


# -- rebuilding restrictions ------------------------------------------------


def test_extension_agrees_but_reads_the_other_coordinate():
    base = plain_member(2, 1)
    points = [(F(1), F(4)), (F(-2), F(0)), (F(3), F(-1)), (F(0), F(0)), (F(5), F(2))]
    restriction = {p: evaluate(base, p) for p in points}
    ext = extend_restriction(restriction, 2, 2)
    assert xi(ext) == 2
    for p in points:
        assert evaluate(ext, p) == evaluate(base, p)
    # past its threshold the extension follows coordinate 2, the base
    # does not feel that coordinate at all
    big = ext.threshold + 1
    assert evaluate(ext, (big, big + 1)) != evaluate(ext, (big, big + 2))
    assert evaluate(base, (big, big + 1)) == evaluate(base, (big, big + 2))


def test_min_restrictions_extend_despite_repeated_values():
    for target in (1, 2):
        ext = extend_restriction(MIN_POINTS, target, 2)
        assert xi(ext) == target
        for point, value in MIN_POINTS.items():
            assert evaluate(ext, point) == value
    # the repeated value on weakly comparable points is exactly what
    # the stricter member constructor refuses
    with pytest.raises(InconsistentData):
        make_member(2, 1, F(4), translation(10), MIN_POINTS)


def test_extension_rejects_strictly_dominated_decrease():
    with pytest.raises(InconsistentData):
        extend_restriction({(F(0), F(0)): F(1), (F(1), F(1)): F(0)}, 1, 2)


def test_extension_of_empty_restriction():
    ext = extend_restriction({}, 2, 3)
    assert xi(ext) == 2
    assert evaluate(ext, (F(1), F(2), F(3))) == 2


# -- uniqueness --------------------------------------------------------------


def test_uniqueness_witnesses_match_the_worked_example():
    f = plain_member(2, 1, a=0)
    witnesses, report = uniqueness_witnesses(f)
    assert len(witnesses) == 2
    g = witnesses[0]
    assert evaluate(g, (F(-1),)) == F(1, 2)
    assert evaluate(g, (F(0),)) == 1
    assert evaluate(g, (F(3),)) == 4
    assert report.range_inf == 0 and not report.range_attained
    assert report.unbounded_above
    assert report.checked == 100
    assert report.coordinate == 1
    assert "depends only on coordinate 1" in report.describe()


def test_uniqueness_range_bound_is_symbolic():
    f = make_member(2, 2, F(3), translation(1), {})
    witnesses, report = uniqueness_witnesses(f)
    graph = witnesses[0].below.graph
    assert graph.range_inf() == 3
    assert graph.range_sup() is None
    assert evaluate(witnesses[0], (F(-1),)) == F(7, 2)
    assert report.coordinate == 2


def test_uniqueness_composite_ignores_the_other_coordinate():
    f = plain_member(2, 1)
    (g, h), _ = uniqueness_witnesses(f)
    for x2 in (F(-9), F(0), F(42)):
        assert evaluate(f, (evaluate(g, (F(1, 3),)), evaluate(h, (x2,)))) == evaluate(
            f, (evaluate(g, (F(1, 3),)), evaluate(h, (F(7),)))
        )


def test_uniqueness_needs_parameters():
    comp = compose_members(plain_member(), [plain_member(), plain_member(2, 2)])
    with pytest.raises(InconsistentData):
        uniqueness_witnesses(comp)


# -- the discontinuity demonstration ----------------------------------------


def test_demo_produces_one_extension_per_coordinate():
    report = noncontinuity_demo(2, 5, seed=7)
    assert len(report.restriction) == 5
    assert report.coordinates() == (1, 2)
    for member in report.extensions:
        for point, value in report.restriction:
            assert evaluate(member, point) == value
    assert "eventual coordinate 2" in report.describe()


def test_demo_is_deterministic_per_seed():
    first = noncontinuity_demo(3, 4, seed=21)
    second = noncontinuity_demo(3, 4, seed=21)
    assert first.describe() == second.describe()
    assert first.restriction == second.restriction
    assert noncontinuity_demo(3, 4, seed=22).restriction != first.restriction


def test_demo_edge_cases():
    assert len(noncontinuity_demo(3, 1, seed=0).extensions) == 3
    assert noncontinuity_demo(2, 0, seed=0).restriction == ()
    with pytest.raises(InconsistentData):
        noncontinuity_demo(1, 5)


# -- files --------------------------------------------------------------------


def test_member_file_roundtrip():
    f = incomparable_member()
    text = serialize_member(f)
    g = parse_member(text)
    assert serialize_member(g) == text
    for u in [(F(0), F(1)), (F(1), F(0)), (F(3), F(3)), (F(-5), F(1, 2))]:
        assert evaluate(g, u) == evaluate(f, u)


def test_extension_members_roundtrip_despite_repeated_values():
    ext = extend_restriction(MIN_POINTS, 2, 2)
    again = parse_member(serialize_member(ext))
    for point, value in MIN_POINTS.items():
        assert evaluate(again, point) == value


def test_only_parameterized_members_serialize():
    comp = compose_members(plain_member(), [plain_member(), plain_member(2, 2)])
    with pytest.raises(InconsistentData):
        serialize_member(comp)


@pytest.mark.parametrize(
    "text",
    [
        "arity 2\neventual 1 0\nmap m\npiece -inf inf affine 1 0\n",  # no alpha line
        "arity 2\neventual 1 0\nalpha m\n",  # alpha names a missing map
        "piece -inf inf affine 1 0\n",  # piece outside any map
        "arity 2\neventual 1 0\nalpha m\nmap m\npiece -inf inf affine 1 0\ndata 1 2\n",
        "arity two\n",
        "arity 2\nwhatever\n",
    ],
)
def test_member_parse_errors(text):
    with pytest.raises(ParseError):
        parse_member(text)


def test_parsed_members_are_validated():
    inconsistent = (
        "arity 2\neventual 1 10\nalpha m\nmap m\npiece -inf inf affine 1 0\n"
        "data 0 0 5\ndata 1 1 4\n"
    )
    with pytest.raises(InconsistentData):
        parse_member(inconsistent)
