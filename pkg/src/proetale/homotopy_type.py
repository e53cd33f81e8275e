"""The homotopy type of a finite site model as a (pro-)simplicial space.

The homotopy type is computed from one split wc hypercovering by applying
the component functor levelwise.  For a Galois group ``G`` the pipeline
``G -> cosk_0 -> split wc refinement -> orbits`` produces the classifying
space, which is certified against the nerve by an explicit isomorphism.
"""
from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Sequence

from . import finspace
from .category import PASS, SETS, Verdict, key, ordered
from .finspace import SPACES, FiniteSpace, SpaceMap
from .groups import FiniteGroup, find_isomorphism as find_group_isomorphism, is_homomorphism
from .simplicial import (ReducedHomotopy, SimpMap, TruncSimp, compose, constant, enumerate_maps,
                         find_isomorphism, identity_map, levelwise_product, skeleton, validate, validate_map)
from .site import (FiniteSite, GSetSite, NotWeaklyContractible, check_hypercovering, cosk0_hypercovering,
                   homotopy_between, is_split_wc, map_from_split_wc, refine_to_split_wc)

PI1_ORDER_CAP = 5000
TABLE_LIMIT = 720


# -- pro-diagrams ---------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ProDiagram:
    """A diagram over a finite codirected poset; ``leq`` holds pairs ``(i, j)``
    with ``i <= j`` and ``transitions[(i, j)]`` goes from ``values[i]`` to ``values[j]``."""

    index: tuple
    leq: frozenset
    values: Mapping
    transitions: Mapping

    def lower_bound(self, i, j):
        cands = [k for k in self.index if (k, i) in self.leq and (k, j) in self.leq]
        return cands[0] if cands else None

    def minimum(self):
        """The least index, which exists in a finite codirected poset."""
        for k in self.index:
            if all((k, i) in self.leq for i in self.index):
                return k
        return None

    def check(self, compose_fn: Callable, equal: Callable = lambda a, b: a == b) -> Verdict:
        for i in self.index:
            if (i, i) not in self.leq:
                return Verdict.fail(f"relation is not reflexive at {i!r}")
        for (i, j) in self.leq:
            for (j2, k) in self.leq:
                if j2 == j and (i, k) not in self.leq:
                    return Verdict.fail("relation is not transitive")
            if i != j and (j, i) in self.leq:
                return Verdict.fail("relation is not antisymmetric")
        for i in self.index:
            for j in self.index:
                if self.lower_bound(i, j) is None:
                    return Verdict.fail(f"{i!r} and {j!r} have no common lower bound")
        for (i, j) in self.leq:
            for (j2, k) in self.leq:
                if j2 != j:
                    continue
                if not equal(compose_fn(self.transitions[(j, k)], self.transitions[(i, j)]),
                             self.transitions[(i, k)]):
                    return Verdict.fail(f"transitions do not compose along {i!r} <= {j!r} <= {k!r}")
        return PASS


def _closure(index, pairs) -> frozenset:
    rel = {(i, i) for i in index} | set(pairs)
    changed = True
    while changed:
        changed = False
        for (a, b) in list(rel):
            for (c, d) in list(rel):
                if b == c and (a, d) not in rel:
                    rel.add((a, d))
                    changed = True
    return frozenset(rel)


@dataclass(frozen=True, eq=False)
class GaloisSystem:
    """Finite quotients ``G_i`` of a Galois group with surjections ``G_i -> G_j`` for ``i <= j``."""

    diagram: ProDiagram

    @classmethod
    def build(cls, groups: Mapping, quotients: Mapping) -> "GaloisSystem":
        """``quotients[(i, j)]`` are generating surjections; the rest is composed."""
        index = ordered(groups)
        leq = _closure(index, quotients)
        trans = {(i, i): list(groups[i].elements) for i in index}
        trans.update({k: list(v) for k, v in quotients.items()})
        pending = True
        while pending:
            pending = False
            for (i, j) in sorted(leq, key=key):
                if (i, j) in trans:
                    continue
                for k in index:
                    if (i, k) in trans and (k, j) in trans and k not in (i, j):
                        trans[(i, j)] = [trans[(k, j)][x] for x in trans[(i, k)]]
                        pending = True
                        break
        return cls(ProDiagram(index, leq, dict(groups), trans))

    def check(self) -> Verdict:
        d = self.diagram
        for (i, j), phi in d.transitions.items():
            gi, gj = d.values[i], d.values[j]
            if not is_homomorphism(gi, gj, phi):
                return Verdict.fail(f"transition {i!r} -> {j!r} is not a homomorphism")
            if set(phi) != set(gj.elements):
                return Verdict.fail(f"transition {i!r} -> {j!r} is not surjective")
        return d.check(lambda b, a: [b[x] for x in a], lambda a, b: list(a) == list(b))


@dataclass(frozen=True, eq=False)
class HomotopyType:
    diagram: ProDiagram  # values: TruncSimp over finite spaces
    dim: int
    provenance: Mapping = field(default_factory=dict)


# -- components of hypercoverings --------------------------------------------------------

def pi_of_hypercovering(site: FiniteSite, w: TruncSimp) -> TruncSimp:
    """Apply the component functor levelwise; rejects non-split-wc input."""
    v = check_hypercovering(site, w)
    if not v:
        raise NotWeaklyContractible(f"not a hypercovering: {v.reason}")
    v = is_split_wc(site, w)
    if not v:
        raise NotWeaklyContractible(v.reason)
    return _apply_components(site, w)


def _apply_components(site: FiniteSite, w: TruncSimp) -> TruncSimp:
    comps = [site.components(l) for l in w.levels]
    levels = tuple(c[0] for c in comps)
    proj = [c[1] for c in comps]
    faces = [()]
    for n in range(1, w.dim + 1):
        faces.append(tuple({proj[n][x]: proj[n - 1][w.faces[n][j][x]] for x in w.elements(n)}
                           for j in range(n + 1)))
    degens = [tuple({proj[n][x]: proj[n + 1][w.degens[n][j][x]] for x in w.elements(n)}
                    for j in range(n + 1)) for n in range(w.dim)]
    return TruncSimp(levels, tuple(faces), tuple(degens), SPACES)


def pi_of_map(site: FiniteSite, f: SimpMap) -> SimpMap:
    src, tgt = _apply_components(site, f.source), _apply_components(site, f.target)
    maps = []
    for n in range(f.source.dim + 1):
        _, ps = site.components(f.source.levels[n])
        _, pt = site.components(f.target.levels[n])
        maps.append({ps[x]: pt[y] for x, y in f.maps[n].items()})
    return SimpMap(src, tgt, tuple(maps))


def pi_of_homotopy(site: FiniteSite, rh: ReducedHomotopy) -> ReducedHomotopy:
    f, g = pi_of_map(site, rh.f), pi_of_map(site, rh.g)
    r = []
    for n, lvl in enumerate(rh.r):
        _, ps = site.components(rh.source.levels[n])
        _, pt = site.components(rh.target.levels[n])
        r.append(tuple({ps[x]: pt[y] for x, y in ri.items()} for ri in lvl))
    return ReducedHomotopy(f, g, tuple(r))


def underlying(x: TruncSimp) -> TruncSimp:
    """Forget the topology of a simplicial space."""
    return TruncSimp(tuple(SETS.make(l.elements) for l in x.levels), x.faces, x.degens, SETS)


# -- nerve and classifying space ------------------------------------------------------

def nerve(g: FiniteGroup, d: int) -> TruncSimp:
    """Levels ``G^n``; ``d_0`` drops the first entry, ``d_n`` the last, inner faces
    multiply neighbours, degeneracies insert the identity."""
    import itertools
    e = g.identity
    levels = [SETS.make(itertools.product(g.elements, repeat=n)) for n in range(d + 1)]
    faces = [()]
    for n in range(1, d + 1):
        fs = []
        for j in range(n + 1):
            if j == 0:
                fs.append({t: t[1:] for t in levels[n].elements})
            elif j == n:
                fs.append({t: t[:-1] for t in levels[n].elements})
            else:
                fs.append({t: t[:j - 1] + (g.m(t[j - 1], t[j]),) + t[j + 1:] for t in levels[n].elements})
        faces.append(tuple(fs))
    degens = [tuple({t: t[:j] + (e,) + t[j:] for t in levels[n].elements} for j in range(n + 1))
              for n in range(d)]
    return TruncSimp(tuple(levels), tuple(faces), tuple(degens), SETS)


def orbit_coordinates(g: FiniteGroup, h: Sequence[int]) -> tuple:
    """``(h_0, .., h_n) -> (h_0^-1 h_1, .., h_{n-1}^-1 h_n)``, constant on left orbits."""
    return tuple(g.m(g.inv(a), b) for a, b in zip(h, h[1:]))


@dataclass(frozen=True, eq=False)
class ClassifyingSpace:
    group: FiniteGroup
    simplicial: TruncSimp  # over finite spaces
    certificate: SimpMap  # isomorphism onto the nerve
    hypercovering: TruncSimp
    refinement: SimpMap

    def sizes(self) -> list[int]:
        return self.simplicial.sizes()


def classifying_space(g: FiniteGroup, d: int, cap: int | None = None) -> ClassifyingSpace:
    site = GSetSite(g, cap=cap if cap is not None else max(512, g.order ** (d + 1)))
    h = cosk0_hypercovering(site, site.regular(), d)
    w, phi = refine_to_split_wc(site, h, d)
    b = pi_of_hypercovering(site, w)
    target = nerve(g, d)
    maps = []
    for n in range(d + 1):
        # level 0 of cosk_0 holds bare group elements
        maps.append({x: orbit_coordinates(g, phi.maps[n][x]) if n else () for x in b.elements(n)})
    cert = SimpMap(underlying(b), target, tuple(maps))
    verdict = check_isomorphism(cert)
    if not verdict:
        raise AssertionError(f"classifying space certificate fails: {verdict.reason}")
    return ClassifyingSpace(g, b, cert, w, phi)


def check_isomorphism(f: SimpMap) -> Verdict:
    v = validate_map(f)
    if not v:
        return v
    for n, m in enumerate(f.maps):
        if len(set(m.values())) != len(m) or set(m.values()) != set(f.target.elements(n)):
            return Verdict.fail(f"level {n} is not a bijection")
    return PASS


def invert(f: SimpMap) -> SimpMap:
    return SimpMap(f.target, f.source, tuple({v: k for k, v in m.items()} for m in f.maps))


def nerve_map(phi: Sequence[int], src: TruncSimp, tgt: TruncSimp) -> SimpMap:
    return SimpMap(src, tgt, tuple({t: tuple(phi[a] for a in t) for t in src.elements(n)}
                                   for n in range(src.dim + 1)))


def pro_homotopy_type(system: GaloisSystem, d: int) -> HomotopyType:
    v = system.check()
    if not v:
        raise ValueError(f"invalid Galois system: {v.reason}")
    dg = system.diagram
    spaces, certs, nerves = {}, {}, {}
    for i in dg.index:
        bg = classifying_space(dg.values[i], d)
        spaces[i] = bg.simplicial
        certs[i] = bg.certificate
        nerves[i] = bg.certificate.target
    trans = {}
    for (i, j), phi in dg.transitions.items():
        nm = nerve_map(phi, nerves[i], nerves[j])
        back = invert(certs[j])
        t = compose(back, compose(nm, certs[i]))
        trans[(i, j)] = SimpMap(spaces[i], spaces[j], t.maps)
    diagram = ProDiagram(dg.index, dg.leq, spaces, trans)
    v = diagram.check(compose)
    if not v:
        raise AssertionError(v.reason)
    for t in trans.values():
        v = validate_map(t)
        if not v:
            raise AssertionError(f"transition is not simplicial: {v.reason}")
    prov = {i: f"components of the split wc refinement of cosk_0 of {dg.values[i].name or 'G'}"
            for i in dg.index}
    return HomotopyType(diagram, d, prov)


# -- simplicial components -------------------------------------------------------------

def _as_space(obj) -> FiniteSpace:
    return obj if isinstance(obj, FiniteSpace) else FiniteSpace.discrete(obj.elements)


def pi0(x: TruncSimp) -> tuple[FiniteSpace, SpaceMap]:
    """Coequalizer of ``d_0, d_1: X_1 -> X_0`` with the quotient topology."""
    if x.dim < 1:
        raise ValueError("simplicial components need level 1")
    x0 = _as_space(x.levels[0])
    parent = {p: p for p in x0.points}

    def find(p):
        while parent[p] != p:
            parent[p] = parent[parent[p]]
            p = parent[p]
        return p

    for e in x.elements(1):
        a, b = find(x.faces[1][0][e]), find(x.faces[1][1][e])
        if a != b:
            parent[max(a, b, key=key)] = min(a, b, key=key)
    classes: dict = {}
    for p in x0.points:
        classes.setdefault(find(p), []).append(p)
    return finspace.quotient(x0, list(classes.values()))


def pi0_map(f: SimpMap) -> SpaceMap:
    sx, qx = pi0(f.source)
    sy, qy = pi0(f.target)
    out = {}
    for p in f.source.elements(0):
        c, v = qx(p), qy(f.maps[0][p])
        if out.setdefault(c, v) != v:
            raise AssertionError("map does not respect simplicial components")
    return SpaceMap(sx, sy, out)


def pi0_transpose(x: TruncSimp, phi: Mapping) -> dict:
    """A map ``pi0(X) -> Y`` as the levelwise tables of ``X -> c(Y)`` (via the last vertex)."""
    _, q = pi0(x)
    return {n: {e: phi[q(_last_vertex(x, n, e))] for e in x.elements(n)} for n in range(x.dim + 1)}


def _last_vertex(x: TruncSimp, n: int, e):
    from .simplicial import DeltaMap
    return x.act(DeltaMap(0, n, (n,)), e)


def pi0_product_check(x: TruncSimp, y: TruncSimp) -> Verdict:
    """``pi0(X x Y) -> pi0(X) x pi0(Y)`` is a homeomorphism."""
    d = min(x.dim, y.dim)
    xs = as_simplicial_space(skeleton(x, d))
    ys = as_simplicial_space(skeleton(y, d))
    p = levelwise_product(xs, ys, SPACES)
    sp, qp = pi0(p)
    sx, qx = pi0(xs)
    sy, qy = pi0(ys)
    prod = finspace.product(sx, sy)
    cmp = {}
    for a, b in p.elements(0):
        c, v = qp((a, b)), (qx(a), qy(b))
        if cmp.setdefault(c, v) != v:
            return Verdict.fail("comparison map is not well defined")
    f = SpaceMap(sp, prod, cmp)
    if not f.is_continuous():
        return Verdict.fail("comparison map is not continuous")
    if not finspace.is_homeomorphism(f):
        return Verdict.fail("comparison map is not a homeomorphism")
    return PASS


def as_simplicial_space(x: TruncSimp) -> TruncSimp:
    """Give every level of a simplicial set the discrete topology."""
    if x.cat is SPACES:
        return x
    return TruncSimp(tuple(_as_space(l) for l in x.levels), x.faces, x.degens, SPACES)


# -- edge-path group --------------------------------------------------------------------

@dataclass(frozen=True)
class Pi1Result:
    status: str  # "finite" or "undecided"
    order: int | None
    group: FiniteGroup | None
    generators: tuple
    relators: tuple

    def to_json(self) -> dict:
        out = {"status": self.status, "order": self.order, "generators": len(self.generators),
               "relators": len(self.relators)}
        if self.group is not None:
            out["table"] = [list(r) for r in self.group.mul]
        return out


def edge_path_presentation(x: TruncSimp, basepoint) -> tuple[tuple, tuple]:
    """Generators are the non-tree, nondegenerate edges of the basepoint's
    component; each 2-simplex gives ``d_2 . d_0 = d_1``."""
    if x.dim < 2:
        raise ValueError("edge-path group needs level 2")
    src = x.faces[1][1]
    tgt = x.faces[1][0]
    degenerate = {x.degens[0][0][v] for v in x.elements(0)}
    adj: dict = {}
    for e in x.elements(1):
        if e in degenerate:
            continue
        adj.setdefault(src[e], []).append((e, tgt[e]))
        adj.setdefault(tgt[e], []).append((e, src[e]))
    seen = {basepoint}
    tree = set()
    queue = deque([basepoint])
    while queue:
        v = queue.popleft()
        for e, u in sorted(adj.get(v, ()), key=lambda p: key(p[0])):
            if u not in seen:
                seen.add(u)
                tree.add(e)
                queue.append(u)
    gens = ordered(e for e in x.elements(1) if e not in degenerate and e not in tree and src[e] in seen)
    index = {e: i for i, e in enumerate(gens)}
    relators = []
    for s in x.elements(2):
        a, b, c = x.faces[2][2][s], x.faces[2][0][s], x.faces[2][1][s]
        if src[a] not in seen:
            continue
        word = []
        for edge, sign in ((a, 1), (b, 1), (c, -1)):
            if edge in index:
                word.append(2 * index[edge] + (0 if sign > 0 else 1))
        word = _free_reduce(word)
        if word:
            relators.append(tuple(word))
    return gens, tuple(sorted(set(relators)))


def _free_reduce(word: list) -> list:
    out: list = []
    for w in word:
        if out and out[-1] == w ^ 1:
            out.pop()
        else:
            out.append(w)
    return out


def todd_coxeter(ngens: int, relators: Sequence[Sequence[int]], max_cosets: int) -> list[list[int]] | None:
    """HLT coset enumeration over the trivial subgroup.

    Letters are ``2g`` (generator) and ``2g+1`` (inverse).  Returns the coset
    table of the live cosets renumbered ``0..k-1``, or None when more than
    ``max_cosets`` cosets would be defined.
    """
    width = 2 * ngens
    table: list[list] = [[None] * width]
    parent = [0]

    def rep(c):
        root = c
        while parent[root] != root:
            root = parent[root]
        while parent[c] != root:
            parent[c], c = root, parent[c]
        return root

    def define(c, x):
        if len(table) >= max_cosets:
            raise _Overflow
        d = len(table)
        table.append([None] * width)
        parent.append(d)
        table[c][x] = d
        table[d][x ^ 1] = c

    def merge(a, b, queue):
        a, b = rep(a), rep(b)
        if a == b:
            return
        lo, hi = min(a, b), max(a, b)
        parent[hi] = lo
        queue.append(hi)

    def coincidence(a, b):
        queue: list = []
        merge(a, b, queue)
        i = 0
        while i < len(queue):
            e = queue[i]
            i += 1
            for x in range(width):
                f = table[e][x]
                if f is None:
                    continue
                if table[f][x ^ 1] == e:
                    table[f][x ^ 1] = None
                e1, f1 = rep(e), rep(f)
                if table[e1][x] is not None:
                    merge(f1, table[e1][x], queue)
                elif table[f1][x ^ 1] is not None:
                    merge(e1, table[f1][x ^ 1], queue)
                else:
                    table[e1][x] = f1
                    table[f1][x ^ 1] = e1

    def scan_and_fill(c, w):
        f, b = c, c
        i, j = 0, len(w) - 1
        while True:
            while i <= j and table[f][w[i]] is not None:
                f = table[f][w[i]]
                i += 1
            if i > j:
                if f != b:
                    coincidence(f, b)
                return
            while j >= i and table[b][w[j] ^ 1] is not None:
                b = table[b][w[j] ^ 1]
                j -= 1
            if j < i:
                coincidence(f, b)
                return
            if i == j:
                table[f][w[i]] = b
                table[b][w[i] ^ 1] = f
                return
            define(f, w[i])

    try:
        c = 0
        while c < len(table):
            if parent[c] == c:
                for w in relators:
                    scan_and_fill(c, w)
                    if parent[c] != c:
                        break
                if parent[c] == c:
                    for x in range(width):
                        if table[c][x] is None:
                            define(c, x)
            c += 1
    except _Overflow:
        return None
    live = [c for c in range(len(table)) if parent[c] == c]
    renum = {c: i for i, c in enumerate(live)}
    return [[renum[rep(table[c][x])] for x in range(width)] for c in live]


class _Overflow(Exception):
    pass


def pi1_edge_path(x: TruncSimp, basepoint, cap: int = PI1_ORDER_CAP) -> Pi1Result:
    gens, rels = edge_path_presentation(x, basepoint)
    if not gens:
        return Pi1Result("finite", 1, FiniteGroup(((0,),), name="1"), gens, rels)
    table = todd_coxeter(len(gens), rels, max(50 * cap, 100000))
    if table is None or len(table) > cap:
        return Pi1Result("undecided", None, None, gens, rels)
    order = len(table)
    group = _regular_group(table, len(gens)) if order <= TABLE_LIMIT else None
    return Pi1Result("finite", order, group, gens, rels)


def _regular_group(table: list[list[int]], ngens: int) -> FiniteGroup:
    """Multiplication of cosets of the trivial subgroup: ``c * d = c . word(d)``."""
    order = len(table)
    word: list = [None] * order
    word[0] = ()
    queue = deque([0])
    while queue:
        c = queue.popleft()
        for x in range(2 * ngens):
            d = table[c][x]
            if word[d] is None:
                word[d] = word[c] + (x,)
                queue.append(d)

    def apply(c, w):
        for x in w:
            c = table[c][x]
        return c

    mul = tuple(tuple(apply(c, word[d]) for d in range(order)) for c in range(order))
    return FiniteGroup(mul, name="pi1", checked=order <= 64)


def pi1_matches(result: Pi1Result, g: FiniteGroup) -> bool:
    return result.group is not None and find_group_isomorphism(result.group, g) is not None


# -- homotopy equivalence certificates ----------------------------------------------

@dataclass(frozen=True, eq=False)
class HomotopyEquivalence:
    forward: SimpMap  # W -> W'
    backward: SimpMap  # W' -> W
    source_homotopy: ReducedHomotopy  # backward o forward => id
    target_homotopy: ReducedHomotopy  # forward o backward => id

    def check(self) -> Verdict:
        from .simplicial import check_reduced_homotopy
        for name, v in (("forward", validate_map(self.forward)), ("backward", validate_map(self.backward)),
                        ("source homotopy", check_reduced_homotopy(self.source_homotopy)),
                        ("target homotopy", check_reduced_homotopy(self.target_homotopy))):
            if not v:
                return Verdict.fail(f"{name}: {v.reason}")
        return PASS


def certify_homotopy_equivalence(site: FiniteSite, w: TruncSimp, w2: TruncSimp,
                                 tiebreak: random.Random | None = None) -> HomotopyEquivalence:
    """Maps both ways between split wc hypercoverings plus homotopies to the identities."""
    fwd = map_from_split_wc(site, w, w2, tiebreak)
    bwd = map_from_split_wc(site, w2, w, tiebreak)
    h1 = homotopy_between(site, compose(bwd, fwd), identity_map(w), tiebreak)
    h2 = homotopy_between(site, compose(fwd, bwd), identity_map(w2), tiebreak)
    return HomotopyEquivalence(fwd, bwd, h1, h2)


def pi_homotopy_equivalence(site: FiniteSite, cert: HomotopyEquivalence) -> HomotopyEquivalence:
    """Push a certificate through the component functor."""
    return HomotopyEquivalence(pi_of_map(site, cert.forward), pi_of_map(site, cert.backward),
                               pi_of_homotopy(site, cert.source_homotopy),
                               pi_of_homotopy(site, cert.target_homotopy))
