import pytest

from proetale import groups
from proetale.groups import FiniteGroup, GroupTableError


def test_cyclic_group_basics():
    g = groups.cyclic(4)
    assert g.order == 4 and g.identity == 0
    assert [g.element_order(a) for a in g.elements] == [1, 4, 2, 4]
    assert g.inv(1) == 3
    assert g.closure(g.gens) == set(g.elements)


def test_symmetric_group_is_nonabelian_of_order_six():
    s3 = groups.symmetric(3)
    assert s3.order == 6
    assert any(s3.m(a, b) != s3.m(b, a) for a in s3.elements for b in s3.elements)
    assert len(s3.gens) == 2


def test_direct_product_and_isomorphism_search():
    klein = groups.direct_product(groups.cyclic(2), groups.cyclic(2))
    assert klein.order == 4
    assert groups.find_isomorphism(klein, groups.cyclic(4)) is None
    phi = groups.find_isomorphism(groups.cyclic(6), groups.direct_product(groups.cyclic(2), groups.cyclic(3)))
    assert phi is not None
    assert groups.is_homomorphism(groups.cyclic(6), groups.direct_product(groups.cyclic(2), groups.cyclic(3)), phi)


def test_json_round_trip():
    g = groups.symmetric(3)
    assert FiniteGroup.from_json(g.to_json()) == g


@pytest.mark.parametrize("table, row, col", [
    ([[0, 1], [1, 2]], 1, 1),  # entry out of range
    ([[0, 1], [0, 1]], None, 0),  # column not a permutation
    ([[0, 1, 2], [1, 2, 0]], 0, None),  # rows longer than the table
])
def test_bad_tables_report_position(table, row, col):
    with pytest.raises(GroupTableError) as err:
        FiniteGroup(tuple(map(tuple, table)))
    assert err.value.row == row
    assert err.value.col == col


def test_non_associative_latin_square_rejected():
    # a loop of order 5 that is not a group
    table = [[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3], [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]]
    with pytest.raises(GroupTableError, match="associativity"):
        FiniteGroup(tuple(map(tuple, table)))


def test_declared_order_must_match():
    with pytest.raises(GroupTableError):
        FiniteGroup.from_json({"order": 3, "mul": [[0, 1], [1, 0]]})
