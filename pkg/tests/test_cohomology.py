import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from proetale import groups
from proetale.category import SizeCapError
from proetale.cohomology import (Coefficients, ElementwiseSheaf, PiSheaf, cochain_complex, cohomology,
                                 cohomology_table, complex_of_simplicial_set, group_cohomology_oracle, pi_sheaf_check,
                                 verdier_colimit, _is_injective)
from proetale.homotopy_type import GaloisSystem, nerve
from proetale.linalg import AbelianGroup
from proetale.simplicial import constant
from proetale.site import GSetSite, SliceSite, cosk0_hypercovering, refine_to_split_wc

Z = Coefficients(0)


def refined(g, d):
    site = GSetSite(g)
    w, _ = refine_to_split_wc(site, cosk0_hypercovering(site, site.regular(), d))
    return site, w


@pytest.mark.parametrize("text, modulus", [("Z", 0), ("Z/6", 6), ("0", 1), (" Z / 4 ", 4), ("5", 5)])
def test_coefficient_parsing(text, modulus):
    assert Coefficients.parse(text).modulus == modulus


@pytest.mark.parametrize("text", ["Q", "Z/0", "Z/-2", ""])
def test_bad_coefficients(text):
    with pytest.raises(ValueError):
        Coefficients.parse(text)


def test_constant_terminal_hypercovering_has_cohomology_only_in_degree_zero():
    site = SliceSite(["p", "q"])
    cx = cochain_complex(site, constant(site.terminal(), 3, site), Z, 2)
    assert cx.ranks == (2, 2, 2, 2)
    assert [c.group for c in cohomology_table(cx, 2)] == [AbelianGroup(2), AbelianGroup(), AbelianGroup()]


def test_cochain_ranks_for_z2_are_powers_of_two():
    site, w = refined(groups.cyclic(2), 4)
    cx = cochain_complex(site, w, Z, 3)
    assert cx.ranks == (1, 2, 4, 8, 16)
    assert cx.check()


def test_zero_coefficients_kill_everything():
    site, w = refined(groups.cyclic(3), 3)
    cx = cochain_complex(site, w, Coefficients(1), 2)
    assert all(c.group == AbelianGroup() for c in cohomology_table(cx, 2))


def test_changing_coefficients_reuses_the_divisor_cache():
    site, w = refined(groups.cyclic(2), 3)
    cx = cochain_complex(site, w, Z, 2)
    cohomology_table(cx, 2)
    other = cx.with_coefficients(Coefficients(2))
    assert other.divisors is cx.divisors
    assert [str(c) for c in cohomology_table(other, 2)] == ["Z/2", "Z/2", "Z/2"]


def test_degree_needs_one_more_level():
    site, w = refined(groups.cyclic(2), 2)
    with pytest.raises(ValueError):
        cochain_complex(site, w, Z, 2)


def test_degree_out_of_range():
    cx = complex_of_simplicial_set(nerve(groups.cyclic(2), 2), Z, 1)
    with pytest.raises(ValueError):
        cohomology(cx, 2)


# -- the bar complex oracle -------------------------------------------------------------

def test_oracle_in_degree_zero_is_the_coefficients():
    assert group_cohomology_oracle(groups.cyclic(5), Z, 0).group == AbelianGroup(1)
    assert group_cohomology_oracle(groups.symmetric(3), Coefficients(4), 0).group == AbelianGroup(0, (4,))


@pytest.mark.parametrize("p", [1, 2, 3])
def test_trivial_group_has_no_higher_cohomology(p):
    assert group_cohomology_oracle(groups.cyclic(1), Coefficients(7), p).group == AbelianGroup()


def test_oracle_respects_its_cap():
    with pytest.raises(SizeCapError):
        group_cohomology_oracle(groups.symmetric(3), Z, 5)


def test_klein_four_group_in_degree_two():
    klein = groups.direct_product(groups.cyclic(2), groups.cyclic(2))
    assert group_cohomology_oracle(klein, Z, 2).group == AbelianGroup(0, (2, 2))
    assert group_cohomology_oracle(klein, Coefficients(2), 2).group == AbelianGroup(0, (2, 2, 2))


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 6), st.integers(0, 6), st.integers(0, 2))
def test_cyclic_groups_agree_with_the_oracle(n, m, p):
    coeffs = Coefficients(m)
    cx = complex_of_simplicial_set(nerve(groups.cyclic(n), p + 1), coeffs, p)
    assert cohomology(cx, p).group == group_cohomology_oracle(groups.cyclic(n), coeffs, p).group


# -- colimits over Galois systems -----------------------------------------------------

def test_single_node_colimit_is_the_stage():
    report = verdier_colimit(GaloisSystem.build({"g": groups.cyclic(3)}, {}), Coefficients(3), 1)
    assert report.colimit.group == AbelianGroup(0, (3,))
    assert report.stabilized


def test_inflation_from_z2_to_z4():
    system = GaloisSystem.build({"a": groups.cyclic(4), "b": groups.cyclic(2)}, {("a", "b"): [0, 1, 0, 1]})
    one = verdier_colimit(system, Coefficients(2), 1)
    assert one.injective[("a", "b")] and one.stabilized
    # the square of the degree one class vanishes upstairs
    two = verdier_colimit(system, Coefficients(2), 2)
    assert not two.injective[("a", "b")] and not two.stabilized
    assert two.colimit.group == AbelianGroup(0, (2,))


def test_integral_colimit_has_a_free_degree_zero():
    system = GaloisSystem.build({"a": groups.cyclic(4), "b": groups.cyclic(2)}, {("a", "b"): [0, 1, 0, 1]})
    report = verdier_colimit(system, Z, 0)
    assert report.colimit.group == AbelianGroup(1)
    assert report.injective[("a", "b")] and report.stabilized


@pytest.mark.parametrize("matrix, src, tgt, expected", [
    ([[2]], (0,), (0,), True),
    ([[0]], (0,), (0,), False),
    ([[1]], (0,), (2,), False),
    ([[2]], (2,), (4,), True),
    ([[1, 0], [0, 2]], (0, 2), (0, 4), True),
])
def test_injectivity_with_free_summands(matrix, src, tgt, expected):
    assert _is_injective(matrix, src, tgt) == expected


# -- sheaves that only see components ----------------------------------------------------

def test_pi_sheaf_check():
    site = GSetSite(groups.cyclic(2))
    reg, pt = site.regular(), site.terminal()
    collapse = {x: () for x in reg.elements}
    assert pi_sheaf_check(site, PiSheaf(Z), reg, pt, collapse)
    assert pi_sheaf_check(site, PiSheaf(Z), reg, reg, {0: 1, 1: 0})
    verdict = pi_sheaf_check(site, ElementwiseSheaf(Z), reg, pt, collapse)
    assert not verdict and "square" in verdict.reason


def test_pi_sheaf_check_needs_a_bijection_on_components():
    site = SliceSite(["p", "q"])
    two = site.make([("p", 0), ("p", 1)], over=lambda e: e[0])
    one = site.make([("p", 0)], over=lambda e: e[0])
    assert not pi_sheaf_check(site, PiSheaf(Z), two, one, {e: ("p", 0) for e in two.elements})
