"""Acceptance suite: eight end-to-end checks on the two finite site models.

Each test records a pass/fail line through ``conftest.criterion``; the lines
are printed in the pytest terminal summary.  Reference values are frozen
literals computed beforehand by the bar-complex oracle, never by the code
under test.
"""
import collections
import itertools
import random
import time

from conftest import criterion
from proetale import finspace as fs
from proetale import groups
from proetale.category import SETS, SizeCapError
from proetale.cohomology import Coefficients, cochain_complex, cohomology_table, group_cohomology_oracle
from proetale.finspace import SPACES, FiniteSpace
from proetale.homotopy_type import (as_simplicial_space, check_isomorphism, classifying_space, nerve, pi0,
                                    pi0_transpose, pi1_edge_path, pi1_matches, pi_of_hypercovering, underlying)
from proetale.simplicial import (Homotopy, check_reduced_homotopy, constant, coskeleton, disjoint_union,
                                 enumerate_maps, enumerate_reduced_homotopies, extend_reduced_homotopy,
                                 homotopy_to_reduced, product_with_interval, reduced_to_homotopy, skeleton,
                                 standard_simplex, transpose_from_cosk, transpose_to_cosk, validate_map)
from proetale.site import (GSetSite, SliceSite, homotopy_between, is_split_wc, map_from_split_wc,
                           random_hypercovering, refine_to_split_wc)

Z2, Z3, Z4, S3 = groups.cyclic(2), groups.cyclic(3), groups.cyclic(4), groups.symmetric(3)
KLEIN = groups.direct_product(Z2, Z2)


def table_key(maps):
    return tuple(tuple(sorted(m.items(), key=repr)) for m in maps)


# -- 1: classifying space of Z/2 from the G-set site ----------------------------------

def test_classifying_space_of_z2_through_dim_4():
    with criterion(1) as info:
        start = time.perf_counter()
        bg = classifying_space(Z2, 4)
        elapsed = time.perf_counter() - start
        assert bg.sizes() == [1, 2, 4, 8, 16]
        assert check_isomorphism(bg.certificate)
        assert bg.certificate.target.sizes() == nerve(Z2, 4).sizes()
        assert is_split_wc(GSetSite(Z2), bg.hypercovering)
        assert elapsed < 1.0, f"{elapsed:.2f} s"
        info["detail"] = f"sizes {bg.sizes()}, certified isomorphism onto the nerve"


# -- 2: cohomology against the bar-complex oracle ---------------------------------------

# frozen oracle output: group -> coefficients -> H^0..H^p_max
ORACLE = {
    "Z/2": {"Z/2": ["Z/2"] * 5, "Z/3": ["Z/3", "0", "0", "0", "0"],
            "Z/6": ["Z/6"] + ["Z/2"] * 4, "Z": ["Z", "0", "Z/2", "0", "Z/2"]},
    "Z/3": {"Z/2": ["Z/2", "0", "0", "0", "0"], "Z/3": ["Z/3"] * 5,
            "Z/6": ["Z/6"] + ["Z/3"] * 4, "Z": ["Z", "0", "Z/3", "0", "Z/3"]},
    "Z/4": {"Z/2": ["Z/2"] * 4, "Z/3": ["Z/3", "0", "0", "0"],
            "Z/6": ["Z/6", "Z/2", "Z/2", "Z/2"], "Z": ["Z", "0", "Z/4", "0"]},
    "S3": {"Z/2": ["Z/2"] * 4, "Z/3": ["Z/3", "0", "0", "Z/3"],
           "Z/6": ["Z/6", "Z/2", "Z/2", "Z/6"], "Z": ["Z", "0", "Z/2", "0"]},
}
GROUPS = {"Z/2": Z2, "Z/3": Z3, "Z/4": Z4, "S3": S3}


def test_cohomology_matches_oracle():
    with criterion(2) as info:
        start = time.perf_counter()
        pairs = 0
        for name, g in GROUPS.items():
            p_max = len(ORACLE[name]["Z"]) - 1
            bg = classifying_space(g, p_max + 1)
            base = cochain_complex(GSetSite(g), bg.hypercovering, Coefficients(0), p_max)
            assert base.check()
            for coeff, expected in ORACLE[name].items():
                a = Coefficients.parse(coeff)
                got = cohomology_table(base.with_coefficients(a), p_max)
                assert [str(h) for h in got] == expected, (name, coeff)
                live = [group_cohomology_oracle(g, a, p) for p in range(p_max + 1)]
                assert [h.group for h in got] == [h.group for h in live], (name, coeff)
                pairs += 1
        elapsed = time.perf_counter() - start
        assert pairs == 16
        assert elapsed < 30.0, f"{elapsed:.1f} s"
        info["detail"] = f"{pairs} group/coefficient pairs agree with the oracle"


# -- 3: maps out of a split wc hypercovering are unique up to homotopy ------------------

SITE_GROUPS = [Z2, Z3, S3, Z4]
HOMOTOPY_CAP = 2048


def homotopy_instance(site, dim, seed):
    u = random_hypercovering(site, dim, random.Random(seed))
    w, _ = refine_to_split_wc(site, u)
    f = map_from_split_wc(site, w, u)
    g = map_from_split_wc(site, w, u, random.Random(seed + 1))
    r = homotopy_between(site, f, g, random.Random(seed + 2))
    return check_reduced_homotopy(r), f.maps != g.maps


def sample_homotopies(model, wanted=50, attempts=1000):
    accepted, rejected, distinct = 0, 0, 0
    dims = collections.Counter()
    for a in range(attempts):
        if accepted == wanted:
            break
        dim = 1 + (a // 4) % 3
        if model == "gset":
            site = GSetSite(SITE_GROUPS[a % 4], cap=HOMOTOPY_CAP)
        else:
            site = SliceSite(list(range(1 + a % 4)), cap=HOMOTOPY_CAP)
        try:
            verdict, differ = homotopy_instance(site, dim, 1000 * a)
        except SizeCapError:
            rejected += 1
            continue
        assert verdict, f"{model} attempt {a}: {verdict.reason}"
        accepted += 1
        distinct += differ
        dims[dim] += 1
    return accepted, rejected, distinct, dims


def test_maps_from_split_wc_unique_up_to_homotopy():
    with criterion(3) as info:
        parts = []
        for model in ("gset", "slice"):
            accepted, rejected, distinct, dims = sample_homotopies(model)
            assert accepted >= 50, f"{model}: only {accepted} instances under the cap"
            assert dims[3] > 0
            parts.append(f"{model} {accepted} ok ({distinct} with f != g, dims {dict(sorted(dims.items()))}, "
                         f"{rejected} over cap)")
        info["detail"] = "; ".join(parts)


# -- 4: simplicial components of the homotopy type ------------------------------------

def random_refined(site, seeds):
    for seed in seeds:
        try:
            u = random_hypercovering(site, 1 + seed % 2, random.Random(seed))
            w, _ = refine_to_split_wc(site, u)
        except SizeCapError:
            continue
        yield w


def test_components_of_pi0_recover_the_base():
    with criterion(4) as info:
        counts = {}
        for size in (1, 2, 3, 5):
            site = SliceSite(list(range(size)))
            n = 0
            for w in itertools.islice(random_refined(site, range(10000 * size, 10000 * size + 500)), 20):
                space, _ = pi0(pi_of_hypercovering(site, w))
                comps, _ = fs.components(space)
                assert fs.find_homeomorphism(comps, FiniteSpace.discrete(site.base_points)) is not None
                n += 1
            assert n == 20
            counts[f"|B|={size}"] = n
        for g in SITE_GROUPS:
            site = GSetSite(g)
            n = 0
            for w in itertools.islice(random_refined(site, range(500)), 20):
                space, _ = pi0(pi_of_hypercovering(site, w))
                assert len(fs.components(space)[0].points) == 1
                n += 1
            assert n == 20
            counts[f"G={g.name}"] = n
        info["detail"] = ", ".join(f"{k}: {v}" for k, v in counts.items())


# -- 5: reduced homotopies ----------------------------------------------------------------

def small_family(d):
    """Simplicial sets with at most 8 simplices per level through dim 3."""
    return {
        "point": standard_simplex(0, d),
        "interval": standard_simplex(1, d),
        "two points": constant(SETS.make([0, 1]), d),
        "interval + point": disjoint_union(standard_simplex(1, d), standard_simplex(0, d)),
        "nerve Z/2": nerve(Z2, d),
    }


def test_reduced_homotopy_calculus():
    with criterion(5) as info:
        reduced_count = homotopy_count = 0
        for d in (1, 2, 3):
            family = small_family(d)
            assert all(max(x.sizes()) <= 8 for x in family.values())
            for x, y in itertools.product(family.values(), repeat=2):
                per_pair = collections.Counter()
                maps = enumerate_maps(x, y)
                for f, g in itertools.product(maps, repeat=2):
                    for r in enumerate_reduced_homotopies(f, g):
                        assert homotopy_to_reduced(reduced_to_homotopy(r)) == r
                        per_pair[(table_key(f.maps), table_key(g.maps))] += 1
                        reduced_count += 1
                for h in enumerate_maps(product_with_interval(x), y):
                    hom = Homotopy.from_map(x, h)
                    back = reduced_to_homotopy(homotopy_to_reduced(hom))
                    assert table_key(back.h.maps) == table_key(h.maps)
                    per_pair[(table_key(hom.f.maps), table_key(hom.g.maps))] -= 1
                    homotopy_count += 1
                # both directions enumerate the same number of homotopies f => g
                assert not +per_pair and not -per_pair
        assert reduced_count == homotopy_count

        pool: dict = {}
        names = list(small_family(0))
        extended = nonconstant = 0
        for seed in range(120):
            rng = random.Random(seed)
            n, a, b = rng.randrange(3), rng.choice(names), rng.choice(names)
            if (n, a, b) not in pool:
                x, y = small_family(n)[a], small_family(n)[b]
                pool[(n, a, b)] = [r for f, g in itertools.product(enumerate_maps(x, y), repeat=2)
                                   for r in enumerate_reduced_homotopies(f, g)]
            if not pool[(n, a, b)]:
                continue
            r = rng.choice(pool[(n, a, b)])
            e = extend_reduced_homotopy(r)
            assert e.dim == n + 1 and check_reduced_homotopy(e)
            assert all(table_key(p) == table_key(q) for p, q in zip(e.r[:n + 1], r.r))
            extended += 1
            nonconstant += r.f.maps != r.g.maps
        assert extended >= 100
        info["detail"] = (f"{reduced_count} round trips each way; {extended} extensions "
                          f"({nonconstant} between distinct maps)")


# -- 6: adjunctions -------------------------------------------------------------------

def test_adjunction_transposes_are_bijections():
    with criterion(6) as info:
        # truncation -| coskeleton on objects with at most 24 elements in total
        curated = [x for d in (1, 2, 3) for x in small_family(d).values() if sum(x.sizes()) <= 24]
        sk_pairs = sk_maps = 0
        for x, y in itertools.product(curated, repeat=2):
            if x.dim != y.dim:
                continue
            for n in range(x.dim):
                cy = coskeleton(y, n, x.dim)
                left = enumerate_maps(skeleton(x, n), skeleton(y, n))
                right = {table_key(g.maps) for g in enumerate_maps(x, cy)}
                images = set()
                for f in left:
                    t = transpose_to_cosk(f, x, cy, n)
                    assert validate_map(t)
                    images.add(table_key(t.maps))
                    assert table_key(transpose_from_cosk(t, n).maps) == table_key(f.maps)
                assert images == right and len(left) == len(right)
                sk_pairs += 1
                sk_maps += len(left)

        # components -| inclusion of discrete spaces
        pi_maps = 0
        for k in range(7):
            for x in fs.all_spaces(k):
                cx, q = fs.components(x)
                for t in range(1, 5):
                    target = FiniteSpace.discrete(range(t))
                    left = list(fs.continuous_maps(cx, target))
                    right = {table_key([m]) for m in fs.continuous_maps(x, target)}
                    images = {table_key([{p: phi[q(p)] for p in x.points}]) for phi in left}
                    assert images == right and len(left) == len(right)
                    pi_maps += len(left)

        # simplicial components -| constant simplicial space
        sierpinski = FiniteSpace.from_relation(["o", "c"], [("o", "c")])
        vee = FiniteSpace.from_relation(["a", "m", "b"], [("m", "a"), ("m", "b")])
        sources = [standard_simplex(1, 2), disjoint_union(standard_simplex(0, 2), standard_simplex(0, 2)),
                   nerve(Z2, 2), constant(sierpinski, 2, SPACES), constant(vee, 2, SPACES),
                   constant(FiniteSpace.discrete([0, 1, 2]), 2, SPACES), constant(SETS.make([0, 1]), 3)]
        targets = [t for k in range(1, 5) for t in fs.all_spaces(k)]
        pi0_maps = 0
        for x in map(as_simplicial_space, sources):
            assert sum(x.sizes()) <= 20
            px, _ = pi0(x)
            for t in targets:
                left = list(fs.continuous_maps(px, t))
                right = {table_key(g.maps) for g in enumerate_maps(x, constant(t, x.dim, SPACES))}
                images = set()
                for phi in left:
                    tables = pi0_transpose(x, phi)
                    images.add(table_key([tables[n] for n in range(x.dim + 1)]))
                assert images == right and len(left) == len(right)
                pi0_maps += len(left)
        info["detail"] = (f"sk/cosk {sk_pairs} pairs ({sk_maps} maps), pi/iota {pi_maps} maps, "
                          f"pi0/const {pi0_maps} maps")


# -- 7: fibre products over the component space -------------------------------------

def test_fibre_product_components_exhaustive():
    with criterion(7) as info:
        start = time.perf_counter()
        instances = 0
        spaces = [s for n in range(7) for s in fs.all_spaces(n)]
        for s in spaces:
            cs, _ = fs.components(s)
            for size in range(6):
                p = FiniteSpace.discrete(range(size))
                for image in itertools.product(cs.points, repeat=size):
                    f = fs.SpaceMap(p, cs, dict(zip(range(size), image)))
                    product, _, _ = fs.fibre_product_over_components(p, f, s)
                    comps, _ = fs.components(product)
                    assert fs.find_homeomorphism(comps, p) is not None
                    instances += 1
        elapsed = time.perf_counter() - start
        assert elapsed < 10.0, f"{elapsed:.1f} s"
        info["detail"] = f"{instances} instances over {len(spaces)} spaces"


# -- 8: edge-path group of the classifying space -------------------------------------

def test_edge_path_group_of_classifying_space():
    with criterion(8) as info:
        start = time.perf_counter()
        orders = []
        for g in (Z2, Z3, Z4, KLEIN, S3):
            bg = classifying_space(g, 2)
            x = underlying(bg.simplicial)
            result = pi1_edge_path(x, x.elements(0)[0])
            assert result.status == "finite" and pi1_matches(result, g), g.name
            orders.append(result.order)
        elapsed = time.perf_counter() - start
        assert elapsed < 5.0, f"{elapsed:.2f} s"
        info["detail"] = f"orders {orders}, each isomorphic to its group"
