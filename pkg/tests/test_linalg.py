import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from proetale.linalg import (AbelianGroup, SNFError, direct_sum, elementary_divisors, ext_cyclic, hom_cyclic,
                             invariant_factors, kernel_lattice, matmul, rank_mod_p, smith_normal_form,
                             subquotient, tensor_cyclic, tor_cyclic, verify_smith)


def leibniz(m):
    n = len(m)
    total = 0
    for perm in itertools.permutations(range(n)):
        sign = (-1) ** sum(1 for i, j in itertools.combinations(range(n), 2) if perm[i] > perm[j])
        total += sign * math.prod(m[i][perm[i]] for i in range(n))
    return total


def determinantal_divisors(m):
    """Elementary divisors as ratios of gcds of k x k minors (independent of elimination)."""
    rows, cols = len(m), len(m[0])
    gcds = [1]
    for k in range(1, min(rows, cols) + 1):
        g = 0
        for r in itertools.combinations(range(rows), k):
            for c in itertools.combinations(range(cols), k):
                g = math.gcd(g, leibniz([[m[i][j] for j in c] for i in r]))
        if g == 0:
            break
        gcds.append(g)
    return tuple(gcds[k] // gcds[k - 1] for k in range(1, len(gcds)))


matrices = st.integers(1, 4).flatmap(
    lambda r: st.integers(1, 4).flatmap(
        lambda c: st.lists(st.lists(st.integers(-6, 6), min_size=c, max_size=c), min_size=r, max_size=r)))


@settings(max_examples=200, deadline=None)
@given(matrices)
def test_smith_form_matches_determinantal_divisors(m):
    form = smith_normal_form(m)
    assert form.diagonal == determinantal_divisors(m)
    sparse = [{j: v for j, v in enumerate(row) if v} for row in m]
    assert elementary_divisors(sparse, len(m[0])) == form.diagonal


def test_smith_form_known_example():
    m = [[2, 4, 4], [-6, 6, 12], [10, -4, -16]]
    assert smith_normal_form(m).diagonal == (2, 6, 12)


def test_verify_smith_rejects_a_wrong_diagonal():
    m = [[2, 0], [0, 3]]
    form = smith_normal_form(m)
    assert form.diagonal == (1, 6)
    bad = type(form)((2, 3), form.p, form.q, form.shape)
    with pytest.raises(SNFError):
        verify_smith(m, bad)


def test_rank_mod_p():
    rows = [{0: 2, 1: 4}, {0: 1, 1: 2}]
    assert rank_mod_p(rows, 2) == 1
    assert rank_mod_p(rows, 3) == 1
    assert rank_mod_p([{0: 1}, {1: 3}], 3) == 1


def test_invariant_factors_are_canonical():
    assert invariant_factors([2, 3]) == (6,)
    assert invariant_factors([2, 4]) == (2, 4)
    assert invariant_factors([6, 10]) == (2, 30)
    assert AbelianGroup.from_cyclic(1, [1, 2]) == AbelianGroup(1, (2,))
    assert str(AbelianGroup(2, (2, 6))) == "Z^2 + Z/2 + Z/6"
    assert str(AbelianGroup()) == "0"


def test_universal_coefficient_pieces():
    g = AbelianGroup(1, (4,))
    assert tensor_cyclic(g, 2) == AbelianGroup(0, (2, 2))
    assert tor_cyclic(g, 6) == AbelianGroup(0, (2,))
    assert hom_cyclic(g, 0) == AbelianGroup(1)
    assert ext_cyclic(g, 0) == AbelianGroup(0, (4,))
    assert direct_sum(AbelianGroup(0, (2,)), AbelianGroup(0, (3,))) == AbelianGroup(0, (6,))


def test_kernel_lattice_mod_n():
    # x + y = 0 mod 2 in Z^2
    gens = kernel_lattice([[1, 1]], 2, 2)
    span = {(a * gens[0][0] + b * gens[0][1], a * gens[1][0] + b * gens[1][1])
            for a in range(-3, 4) for b in range(-3, 4)}
    assert (1, 1) in span and (2, 0) in span and (1, 0) not in span


def test_subquotient_coordinates():
    # Z^1 / 3Z with representative 1
    h = subquotient([[1]], [[3]], 1)
    assert h.group == AbelianGroup(0, (3,))
    assert h.coordinates([4]) == (1,)
    assert h.coordinates(h.representative(0)) == (1,)


@settings(max_examples=100, deadline=None)
@given(matrices)
def test_transforms_multiply_out(m):
    form = smith_normal_form(m)
    s = matmul(matmul(form.p, m), form.q)
    for i, row in enumerate(s):
        for j, v in enumerate(row):
            assert v == (form.diagonal[i] if i == j and i < form.rank else 0)
