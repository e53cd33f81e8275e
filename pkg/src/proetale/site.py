"""Finite models of the pro-étale site.

``GSetSite(G)`` models a field with finite Galois group ``G``: objects are
finite G-sets, coverings are equivariant surjections, components are orbits
and the weakly contractible objects are the free G-sets.  ``SliceSite(B)``
models a totally split base with component set ``B``: objects are finite sets
over ``B`` and every object is weakly contractible.

A hypercovering is a ``TruncSimp`` whose levels are objects of the site; the
augmentation is the structure map to the base, which is implicit in every
``SiteObject``.  Split hypercoverings carry their decomposition implicitly:
nondegenerate simplices are exactly those outside the degeneracy images.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping, Sequence

from .category import PASS, Category, SiteObject, SizeCapError, Verdict, key, ordered
from .finspace import FiniteSpace, SpaceMap
from .groups import FiniteGroup, trivial
from .simplicial import (DeltaMap, ReducedHomotopy, SimpMap, TruncSimp, _subsets, check_reduced_homotopy,
                         coskeleton, cosk_comparison, extension_family, nondegenerate_decomposition,
                         skeleton, surjections_from, validate, validate_map, _faces_to_cosk_tuple)

DEFAULT_CAP = 512


class LiftError(RuntimeError):
    """No lift exists; the source is not weakly contractible for this covering."""


class NotWeaklyContractible(ValueError):
    pass


class FiniteSite(Category):
    """Shared behaviour of the two site models."""

    # -- coverings and components -------------------------------------------------
    def is_covering(self, src: SiteObject, tgt: SiteObject, p: Mapping) -> bool:
        return self.is_morphism(src, tgt, p) and set(p.values()) == set(tgt.elements)

    def covering_from_family(self, family: Sequence[tuple[SiteObject, Mapping]], tgt: SiteObject
                             ) -> tuple[SiteObject, dict]:
        """Normalize a family ``{U_i -> X}`` to one map from the coproduct."""
        parts = [(obj, (lambda i: lambda x: (i, x))(i)) for i, (obj, _) in enumerate(family)]
        total = self.coproduct(parts)
        p = {(i, x): family[i][1][x] for i, (obj, _) in enumerate(family) for x in obj.elements}
        return total, p

    def components(self, x: SiteObject) -> tuple[FiniteSpace, dict]:
        """Discrete space of orbits, each labelled by its least element."""
        proj = {}
        for orb in x.orbits():
            for e in orb:
                proj[e] = orb[0]
        return FiniteSpace.discrete(proj.values()), proj

    def component_map(self, src: SiteObject, tgt: SiteObject, f: Mapping) -> SpaceMap:
        cs, ps = self.components(src)
        ct, pt = self.components(tgt)
        return SpaceMap(cs, ct, {ps[x]: pt[f[x]] for x in src.elements})

    # -- weak contractibility ----------------------------------------------------
    def free_cover(self, x: SiteObject) -> tuple[SiteObject, dict]:
        """``G x X -> X``, ``(g, x) -> g.x``; a covering by a free object."""
        g = self.group
        cover = self.make(((h, e) for h in g.elements for e in x.elements),
                          act=lambda a, p: (g.m(a, p[0]), p[1]), over=lambda p: x.base[p[1]])
        return cover, {(h, e): x.action[h][e] for h, e in cover.elements}

    def is_wc(self, w: SiteObject) -> bool:
        """Lifting criterion: the free cover of ``w`` admits a section."""
        cover, p = self.free_cover(w)
        try:
            self.lift(w, {e: e for e in w.elements}, cover, p)
        except LiftError:
            return False
        return True

    def canonical_wc_cover(self, x: SiteObject) -> tuple[SiteObject, dict]:
        """Identity on wc objects; otherwise free orbits are kept as ``(0, x)``
        and each non-free orbit with least element ``r`` is covered by one free
        orbit ``(1, g, r) -> g.r``."""
        if self.is_wc(x):
            return x, {e: e for e in x.elements}
        g = self.group
        labels, cover = [], {}
        for orb in x.orbits():
            r = orb[0]
            if len(orb) == g.order:
                for e in orb:
                    labels.append((0, e))
                    cover[(0, e)] = e
            else:
                for h in g.elements:
                    labels.append((1, h, r))
                    cover[(1, h, r)] = x.action[h][r]

        def act(a, lab):
            if lab[0] == 0:
                return (0, x.action[a][lab[1]])
            return (1, g.m(a, lab[1]), lab[2])

        return self.make(labels, act=act, over=lambda lab: x.base[cover[lab]]), cover

    def lift(self, w: SiteObject, f: Mapping, u: SiteObject, p: Mapping,
             tiebreak: random.Random | None = None) -> dict:
        """A morphism ``g: w -> u`` with ``p o g = f``.

        One orbit representative at a time: the least admissible preimage is
        chosen, or a random one when ``tiebreak`` is given.
        """
        fibres: dict = {}
        for e in u.elements:
            fibres.setdefault(p[e], []).append(e)
        out = {}
        for orb in w.orbits():
            r = orb[0]
            stab = w.stabilizer(r)
            cands = [e for e in fibres.get(f[r], ()) if u.base[e] == w.base[r] and stab <= u.stabilizer(e)]
            if not cands:
                raise LiftError(f"no lift for {r!r}")
            c = tiebreak.choice(cands) if tiebreak is not None else cands[0]
            for g in self.group.elements:
                out[w.action[g][r]] = u.action[g][c]
        return out


class GSetSite(FiniteSite):
    def __init__(self, group: FiniteGroup, cap: int | None = DEFAULT_CAP):
        super().__init__(group, ((),), cap)

    def regular(self) -> SiteObject:
        """``G`` acting on itself by left translation."""
        g = self.group
        return self.make(g.elements, act=lambda a, x: g.m(a, x))

    def is_wc(self, w: SiteObject) -> bool:
        return w.is_free()


class SliceSite(FiniteSite):
    def __init__(self, base: Sequence, cap: int | None = DEFAULT_CAP):
        super().__init__(trivial(), tuple(base), cap)

    def is_wc(self, w: SiteObject) -> bool:
        return True


def wc_by_lifting(site: FiniteSite, w: SiteObject) -> bool:
    """Decide weak contractibility through the lifting criterion only."""
    return FiniteSite.is_wc(site, w)


# -- hypercoverings ---------------------------------------------------------------

def check_hypercovering(site: FiniteSite, h: TruncSimp) -> Verdict:
    v = validate(h)
    if not v:
        return v
    base0 = {h.levels[0].base[e] for e in h.elements(0)}
    if base0 != set(site.base_points):
        return Verdict.fail("level 0 does not cover the terminal object")
    for n in range(h.dim):
        c = coskeleton(h, n, n + 1, cap=site.cap)
        cmp = cosk_comparison(h, n, n + 1)
        if not site.is_covering(h.levels[n + 1], c.levels[n + 1], cmp):
            return Verdict.fail(f"level {n + 1} does not cover the {n}-coskeleton")
    return PASS


def is_split_wc(site: FiniteSite, w: TruncSimp) -> Verdict:
    """Every nondegenerate summand is a wc subobject."""
    for n in range(w.dim + 1):
        nd = nondegenerate_decomposition(w, n).nondegenerate
        try:
            sub = site.subobject(w.levels[n], nd)
        except ValueError:
            return Verdict.fail(f"nondegenerate simplices at level {n} are not a subobject")
        if not site.is_wc(sub):
            return Verdict.fail(f"nondegenerate summand at level {n} is not weakly contractible")
    return PASS


def _presentations(w: TruncSimp, n: int) -> dict:
    dec = nondegenerate_decomposition(w, n)
    pres = {x: (DeltaMap.identity(n), x) for x in dec.nondegenerate}
    pres.update(dec.degenerate)
    return pres


def extend_split(site: FiniteSite, w: TruncSimp, nd: SiteObject, to_cosk: Mapping) -> TruncSimp:
    """Add level ``n+1`` to a split ``n``-truncated ``w`` given the nondegenerate
    summand ``nd`` and its map to ``cosk_n(w)_{n+1}``.

    Degenerate simplices are labelled ``('D', sigma, y)`` for a surjection
    ``sigma: [n+1] -> [k]`` and a nondegenerate ``y`` in level ``k``;
    nondegenerate ones keep the label ``('N', z)``.
    """
    n = w.dim
    m = n + 1
    nds = [nondegenerate_decomposition(w, k).nondegenerate for k in range(m)]
    degs = [(s, y) for s in surjections_from(m) if not s.is_identity() for y in nds[s.target_dim]]
    site.check_size(len(degs) + len(nd.elements), f"level {m}")
    grp = site.group
    parts = [(nd, lambda z: ("N", z))]
    deg_lookup = {("D", s.values, y): (s, y) for s, y in degs}

    def deg_act(g, lab):
        s, y = deg_lookup[lab]
        return ("D", s.values, w.levels[s.target_dim].action[g][y])

    deg_obj = site.make(deg_lookup, act=deg_act,
                        over=lambda lab: w.levels[deg_lookup[lab][0].target_dim].base[deg_lookup[lab][1]])
    parts.append((deg_obj, lambda lab: lab))
    level = site.coproduct(parts)
    cw = coskeleton(w, n, m, cap=site.cap)
    faces = []
    for j in range(m + 1):
        fj = {}
        delta = DeltaMap.coface(m, j)
        for lab in level.elements:
            if lab[0] == "N":
                fj[lab] = cw.faces[m][j][to_cosk[lab[1]]]
            else:
                s, y = deg_lookup[lab]
                fj[lab] = w.act(s.compose(delta), y)
        faces.append(fj)
    pres = _presentations(w, n)
    degens = []
    for j in range(m):
        sj = {}
        sig = DeltaMap.codegeneracy(n, j)
        for x in w.elements(n):
            tau, y = pres[x]
            sj[x] = ("D", tau.compose(sig).values, y)
        degens.append(sj)
    out = TruncSimp(w.levels + (level,), w.faces + (tuple(faces),), w.degens + (tuple(degens),), site)
    return out


def _lift_level(site, w_lvl: SiteObject, elems, target: Mapping, u_lvl: SiteObject, cmp: Mapping, tiebreak):
    sub = site.subobject(w_lvl, elems)
    return site.lift(sub, target, u_lvl, cmp, tiebreak)


def refine_to_split_wc(site: FiniteSite, h: TruncSimp, d: int | None = None) -> tuple[TruncSimp, SimpMap]:
    """A split wc hypercovering ``W`` with a morphism ``W -> H`` up to level ``d``.

    Level ``n+1`` refines ``F = H_{n+1} x_{cosk_n H} cosk_n(W)_{n+1}``: the part of
    ``F`` hit by degenerate simplices is reused, and the remainder is covered
    by its canonical wc cover.  When ``H`` is already wc in the relevant
    sense nothing is duplicated (e.g. ``cosk_0(G)`` is reproduced exactly).
    """
    d = h.dim if d is None else d
    if d > h.dim:
        raise ValueError(f"hypercovering is only {h.dim}-truncated")
    w0, c0 = site.canonical_wc_cover(h.levels[0])
    w = TruncSimp((w0,), ((),), (), site)
    phi = [dict(c0)]
    for n in range(d):
        m = n + 1
        hn = skeleton(h, n)
        ch = coskeleton(hn, n, m, cap=site.cap)
        cw = coskeleton(w, n, m, cap=site.cap)
        cmp_h = cosk_comparison(h, n, m)
        phi_n = phi[n]
        cphi = {c: tuple(phi_n[e] for e in c) for c in cw.elements(m)}
        by_image: dict = {}
        for c, img in cphi.items():
            by_image.setdefault(img, []).append(c)
        pairs = [(a, c) for a in h.elements(m) for c in by_image.get(cmp_h[a], ())]
        site.check_size(len(pairs), f"fibre product at level {m}")
        f_obj = site.limit([h.levels[m], cw.levels[m]], pairs)
        # images of degenerate simplices in F
        deg_image = set()
        nds = [nondegenerate_decomposition(w, k).nondegenerate for k in range(m)]
        for s in surjections_from(m):
            if s.is_identity():
                continue
            for y in nds[s.target_dim]:
                hv = h.act(s, phi[s.target_dim][y])
                cv = tuple(w.act(s.compose(DeltaMap.inclusion(t, m)), y) for t in _subsets(m, n + 1))
                deg_image.add((hv, cv))
        rest = site.subobject(f_obj, [e for e in f_obj.elements if e not in deg_image])
        nd, cover = site.canonical_wc_cover(rest)
        to_cosk = {z: cover[z][1] for z in nd.elements}
        w = extend_split(site, w, nd, to_cosk)
        new_phi = {}
        for lab in w.elements(m):
            if lab[0] == "N":
                new_phi[lab] = cover[lab[1]][0]
            else:
                s = DeltaMap(m, max(lab[1]), lab[1])
                new_phi[lab] = h.act(s, phi[s.target_dim][lab[2]])
        phi.append(new_phi)
    hd = skeleton(h, d)
    out = SimpMap(w, hd, tuple(phi))
    for name, verdict in (("W", validate(w)), ("W -> H", validate_map(out))):
        if not verdict:
            raise AssertionError(f"refinement produced invalid {name}: {verdict.reason}")
    return w, out


def map_from_split_wc(site: FiniteSite, w: TruncSimp, u: TruncSimp,
                      tiebreak: random.Random | None = None) -> SimpMap:
    """A morphism ``W -> U`` built level by level from lifts of nondegenerate simplices."""
    d = min(w.dim, u.dim)
    psi = [site.lift(w.levels[0], dict(w.levels[0].base), u.levels[0], dict(u.levels[0].base), tiebreak)]
    for n in range(d):
        m = n + 1
        cmp_w = cosk_comparison(w, n, m)
        cmp_u = cosk_comparison(u, n, m)
        pres = _presentations(w, m)
        nd = [x for x, (s, _) in pres.items() if s.is_identity()]
        pn = psi[n]
        target = {x: tuple(pn[e] for e in cmp_w[x]) for x in nd}
        level = _lift_level(site, w.levels[m], nd, target, u.levels[m], cmp_u, tiebreak) if nd else {}
        for x, (s, y) in pres.items():
            if not s.is_identity():
                level[x] = u.act(s, psi[s.target_dim][y])
        psi.append(level)
    out = SimpMap(skeleton(w, d), skeleton(u, d), tuple(psi))
    verdict = validate_map(out)
    if not verdict:
        raise AssertionError(f"constructed map is not simplicial: {verdict.reason}")
    return out


def homotopy_between(site: FiniteSite, f: SimpMap, g: SimpMap,
                     tiebreak: random.Random | None = None) -> ReducedHomotopy:
    """A reduced homotopy ``f => g`` for maps out of a split wc hypercovering.

    On degenerate simplices ``x = s_j y`` the value is forced by the
    degeneracy identities except for ``r^{j+1}``; that case and the
    nondegenerate summand are lifted along ``U_{n+1} -> cosk_n(U)_{n+1}``
    from the coskeletal extension.
    """
    w, u = f.source, f.target
    d = w.dim
    r = [(dict(f.maps[0]), dict(g.maps[0]))]
    for n in range(d):
        m = n + 1
        cmp_u = cosk_comparison(u, n, m)
        level = [dict(f.maps[m])] + [dict() for _ in range(m)] + [dict(g.maps[m])]
        to_lift = {i: [] for i in range(1, m + 1)}
        for x in w.elements(m):
            degs = [j for j in range(m) if w.degens[n][j][w.faces[m][j][x]] == x]
            for i in range(1, m + 1):
                val = None
                for j in degs:
                    y = w.faces[m][j][x]
                    if i <= j:
                        val = u.degens[n][j][r[n][i][y]]
                    elif i >= j + 2:
                        val = u.degens[n][j][r[n][i - 1][y]]
                    if val is not None:
                        break
                if val is None:
                    to_lift[i].append(x)
                else:
                    level[i][x] = val
        for i, xs in to_lift.items():
            if not xs:
                continue
            target = {}
            for x in xs:
                faces = [w.faces[m][j][x] for j in range(m + 1)]
                target[x] = _faces_to_cosk_tuple(extension_family(r, n, faces, i), n)
            level[i].update(_lift_level(site, w.levels[m], xs, target, u.levels[m], cmp_u, tiebreak))
        r.append(tuple(level))
    out = ReducedHomotopy(f, g, tuple(tuple(lvl) for lvl in r))
    verdict = check_reduced_homotopy(out)
    if not verdict:
        raise AssertionError(f"constructed homotopy fails: {verdict.reason}")
    return out


# -- random instances ----------------------------------------------------------------

def random_covering(site: FiniteSite, x: SiteObject, rng: random.Random, extra: float = 0.3,
                    free: float = 0.5) -> tuple[SiteObject, dict]:
    """A covering of ``x`` by copies of its orbits and free orbits mapping onto them."""
    g = site.group
    parts, maps = [], {}
    for k, orb in enumerate(x.orbits()):
        copies = 1
        while rng.random() < extra and copies < 3:
            copies += 1
        for c in range(copies):
            if not g.is_trivial() and rng.random() < free:
                rep = orb[0]
                obj = site.make(g.elements, act=lambda a, h: g.m(a, h), over=lambda h, rep=rep: x.base[rep])
                wrap = (lambda k, c: lambda h: ("f", k, c, h))(k, c)
                for h in g.elements:
                    maps[wrap(h)] = x.action[h][rep]
            else:
                obj = site.make(orb, act=lambda a, e: x.action[a][e], over=lambda e: x.base[e])
                wrap = (lambda k, c: lambda e: ("c", k, c, e))(k, c)
                for e in orb:
                    maps[wrap(e)] = e
            parts.append((obj, wrap))
    return site.coproduct(parts), maps


def random_hypercovering(site: FiniteSite, dim: int, rng: random.Random, extra: float = 0.3) -> TruncSimp:
    """A random split hypercovering: each nondegenerate summand is a random
    covering of the coskeleton level, with redundancy damped at higher levels."""
    u0, _ = random_covering(site, site.terminal(), rng, extra)
    u = TruncSimp((u0,), ((),), (), site)
    for n in range(dim):
        c = coskeleton(u, n, n + 1, cap=site.cap)
        nd, p = random_covering(site, c.levels[n + 1], rng, extra / 2 ** (n + 1), 0.5 / (n + 2))
        u = extend_split(site, u, nd, p)
    return u


def cosk0_hypercovering(site: FiniteSite, u0: SiteObject, d: int) -> TruncSimp:
    """``cosk_0`` of a covering ``u0 -> terminal`` as a ``d``-truncated hypercovering."""
    from .simplicial import constant
    return coskeleton(constant(u0, 0, site), 0, d, cap=site.cap)
