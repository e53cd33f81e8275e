import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from proetale import finspace as fs
from proetale.finspace import FiniteSpace, SpaceMap, SpaceSizeError

SIERPINSKI = FiniteSpace.from_relation(["o", "c"], [("o", "c")])
POINT = FiniteSpace.discrete(["*"])


def disjoint(*spaces):
    pts, rel = [], []
    for i, s in enumerate(spaces):
        pts += [(i, p) for p in s.points]
        rel += [((i, a), (i, b)) for a, b in s.relation()]
    return FiniteSpace.from_relation(pts, rel)


def test_closure_of_relation_and_opens():
    x = FiniteSpace.from_relation("abc", [("a", "b"), ("b", "c")])
    assert x.leq("a", "c")
    assert not x.leq("c", "a")
    assert x.open_sets() == [frozenset(), frozenset("a"), frozenset("ab"), frozenset("abc")]
    x.check_invariants()


def test_sierpinski_opens_are_down_sets():
    assert SIERPINSKI.is_open({"o"})
    assert not SIERPINSKI.is_open({"c"})
    assert SIERPINSKI.closure({"o"}) == frozenset({"o", "c"})


@pytest.mark.parametrize("space, expected_points", [
    (FiniteSpace.discrete([0, 1]), 2),
    (SIERPINSKI, 1),
    (disjoint(SIERPINSKI, POINT), 2),
])
def test_components(space, expected_points):
    cs, q = fs.components(space)
    assert len(cs.points) == expected_points
    assert cs.is_discrete()
    assert q.is_continuous() and q.is_surjective()


def test_components_of_sierpinski_plus_point_is_two_point_discrete():
    cs, _ = fs.components(disjoint(SIERPINSKI, POINT))
    assert fs.find_homeomorphism(cs, FiniteSpace.discrete("xy")) is not None


def test_disconnectedness_predicates():
    assert fs.is_totally_disconnected(POINT)
    assert not fs.is_totally_disconnected(SIERPINSKI)
    assert fs.is_totally_disconnected(FiniteSpace.discrete(range(3)))
    assert fs.is_extremally_disconnected(FiniteSpace.discrete(range(4)))
    assert not fs.is_extremally_disconnected(SIERPINSKI)


@pytest.mark.parametrize("x, t, count", [
    (POINT, FiniteSpace.discrete(range(3)), 3),
    (SIERPINSKI, FiniteSpace.discrete(range(2)), 2),
    (FiniteSpace.discrete(range(2)), FiniteSpace.discrete(range(2)), 4),
    (SIERPINSKI, SIERPINSKI, 3),
])
def test_hom_space_count(x, t, count):
    assert fs.hom_space_count(x, t) == count


def test_fibre_product_along_identity_is_the_space():
    s = disjoint(SIERPINSKI, POINT)
    cs, _ = fs.components(s)
    ident = SpaceMap(cs, cs, {p: p for p in cs.points})
    product, _, to_s = fs.fibre_product_over_components(cs, ident, s)
    assert fs.is_homeomorphism(to_s)
    assert fs.find_homeomorphism(product, s) is not None


def test_fibre_product_of_sierpinski_over_two_points():
    cs, _ = fs.components(SIERPINSKI)
    p = FiniteSpace.discrete([0, 1])
    f = SpaceMap(p, cs, {0: cs.points[0], 1: cs.points[0]})
    product, to_p, _ = fs.fibre_product_over_components(p, f, SIERPINSKI)
    assert fs.find_homeomorphism(product, disjoint(SIERPINSKI, SIERPINSKI)) is not None
    assert to_p.is_continuous()


def test_fibre_product_with_empty_factor():
    cs, _ = fs.components(SIERPINSKI)
    empty = FiniteSpace.discrete([])
    product, _, _ = fs.fibre_product_over_components(empty, SpaceMap(empty, cs, {}), SIERPINSKI)
    assert product.points == ()


def test_quotient_topology_is_not_always_discrete():
    # identifying the two ends of a 3-chain gives a non-discrete 2-point space
    x = FiniteSpace.from_relation("abc", [("a", "b"), ("c", "b")])
    qs, q = fs.quotient(x, [["a", "c"], ["b"]])
    assert len(qs.points) == 2 and not qs.is_discrete()
    assert q.is_continuous()


def test_homeomorphism_search_is_capped():
    big = FiniteSpace.from_relation(range(13), [(i, i + 1) for i in range(12)])
    with pytest.raises(SpaceSizeError):
        fs.find_homeomorphism(big, big)


@pytest.mark.parametrize("n, count", [(0, 1), (1, 1), (2, 3), (3, 9), (4, 33), (5, 139)])
def test_spaces_up_to_homeomorphism_match_known_counts(n, count):
    assert len(fs.all_spaces(n)) == count


def test_json_round_trip():
    x = FiniteSpace.from_relation("abc", [("a", "b")])
    assert FiniteSpace.from_json(x.to_json()) == x


preorders = st.integers(1, 5).flatmap(
    lambda n: st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=8).map(
        lambda rel: FiniteSpace.from_relation(range(n), rel)))


@settings(max_examples=150, deadline=None)
@given(preorders)
def test_components_are_idempotent_and_preserve_surjections(x):
    x.check_invariants()
    cs, q = fs.components(x)
    again, _ = fs.components(cs)
    assert fs.find_homeomorphism(again, cs) is not None
    induced = fs.induced_map(q)
    assert induced.is_surjective()


@settings(max_examples=100, deadline=None)
@given(preorders, st.integers(1, 3))
def test_maps_to_discrete_factor_through_components(x, t):
    target = FiniteSpace.discrete(range(t))
    cs, _ = fs.components(x)
    assert fs.hom_space_count(cs, target) == fs.hom_space_count(x, target) == t ** len(cs.points)


def test_products_are_continuous_in_each_projection():
    x = fs.product(SIERPINSKI, FiniteSpace.discrete([0, 1]))
    assert len(x.points) == 4
    for a, b in itertools.product(x.points, repeat=2):
        if x.leq(a, b):
            assert SIERPINSKI.leq(a[0], b[0]) and a[1] == b[1]
