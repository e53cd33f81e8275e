"""Truncated simplicial objects over a finite concrete category.

A ``TruncSimp`` stores its levels ``0..dim`` together with the generating face
and degeneracy maps as dictionaries.  The action of an arbitrary monotone map
is computed from its epi-mono factorization.  Levels are objects of a
``Category`` (``SETS``, a site, or ``SPACES``), which supplies limits for
coskeleta and products with the simplices of the interval.

Coskeleton elements above the truncation level ``n`` are flat tuples of
``n``-simplices indexed by the ``(n+1)``-element subsets of ``[m]`` in
lexicographic order; for ``n = 0`` this is literally ``X_0^(m+1)``.

Homotopy convention: for ``t: [n] -> [1]`` with ``c`` zeros, a homotopy ``h``
and a reduced homotopy ``r`` correspond via ``h_n(x, t) = r^c_n(x)``, so the
constant map ``t = 1`` carries ``f`` and ``t = 0`` carries ``g``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Iterable, Iterator, Mapping, Sequence

from .category import PASS, SETS, SizeCapError, Verdict, key, ordered


# -- the simplex category -----------------------------------------------------

@dataclass(frozen=True)
class DeltaMap:
    """A weakly monotone map ``[source_dim] -> [target_dim]``."""

    source_dim: int
    target_dim: int
    values: tuple

    def __post_init__(self):
        v = self.values
        if len(v) != self.source_dim + 1:
            raise ValueError("wrong number of values")
        if any(not 0 <= x <= self.target_dim for x in v) or any(a > b for a, b in zip(v, v[1:])):
            raise ValueError(f"not a monotone map into [{self.target_dim}]: {v}")

    def __call__(self, i: int) -> int:
        return self.values[i]

    def compose(self, inner: "DeltaMap") -> "DeltaMap":
        """``self o inner``."""
        if inner.target_dim != self.source_dim:
            raise ValueError("maps are not composable")
        return DeltaMap(inner.source_dim, self.target_dim, tuple(self.values[i] for i in inner.values))

    def is_injective(self) -> bool:
        return len(set(self.values)) == len(self.values)

    def is_surjective(self) -> bool:
        return set(self.values) == set(range(self.target_dim + 1))

    def is_identity(self) -> bool:
        return self.source_dim == self.target_dim and self.values == tuple(range(self.source_dim + 1))

    def factor(self) -> tuple["DeltaMap", "DeltaMap"]:
        """``(surjection, injection)`` with ``self == injection o surjection``."""
        return _factor(self)

    @staticmethod
    def identity(n: int) -> "DeltaMap":
        return DeltaMap(n, n, tuple(range(n + 1)))

    @staticmethod
    def coface(n: int, j: int) -> "DeltaMap":
        """``delta^j: [n-1] -> [n]`` skipping ``j``."""
        return DeltaMap(n - 1, n, tuple(i if i < j else i + 1 for i in range(n)))

    @staticmethod
    def codegeneracy(n: int, j: int) -> "DeltaMap":
        """``sigma^j: [n+1] -> [n]`` hitting ``j`` twice."""
        return DeltaMap(n + 1, n, tuple(i if i <= j else i - 1 for i in range(n + 2)))

    @staticmethod
    def inclusion(subset: Sequence[int], m: int) -> "DeltaMap":
        return DeltaMap(len(subset) - 1, m, tuple(subset))


@lru_cache(maxsize=None)
def _factor(alpha: DeltaMap) -> tuple[DeltaMap, DeltaMap]:
    image = sorted(set(alpha.values))
    pos = {v: i for i, v in enumerate(image)}
    surj = DeltaMap(alpha.source_dim, len(image) - 1, tuple(pos[v] for v in alpha.values))
    inj = DeltaMap(len(image) - 1, alpha.target_dim, tuple(image))
    return surj, inj


@lru_cache(maxsize=None)
def monotone_maps(k: int, m: int) -> tuple[DeltaMap, ...]:
    return tuple(DeltaMap(k, m, v) for v in itertools.combinations_with_replacement(range(m + 1), k + 1))


@lru_cache(maxsize=None)
def surjections_from(n: int) -> tuple[DeltaMap, ...]:
    """All surjections ``[n] -> [k]``, ``k <= n``, identity first."""
    out = [m for k in range(n, -1, -1) for m in monotone_maps(n, k) if m.is_surjective()]
    return tuple(out)


@lru_cache(maxsize=None)
def _subsets(m: int, size: int) -> tuple[tuple[int, ...], ...]:
    return tuple(itertools.combinations(range(m + 1), size))


@lru_cache(maxsize=None)
def _subset_index(m: int, size: int) -> dict:
    return {s: i for i, s in enumerate(_subsets(m, size))}


@lru_cache(maxsize=None)
def _face_steps(inj: DeltaMap) -> tuple[int, ...]:
    """Face indices to apply, in order, realizing an injection."""
    missing = [j for j in range(inj.target_dim + 1) if j not in inj.values]
    return tuple(reversed(missing))


@lru_cache(maxsize=None)
def _degeneracy_steps(surj: DeltaMap) -> tuple[tuple[int, int], ...]:
    """``(level, j)`` degeneracies to apply, in order, realizing a surjection."""
    steps = []
    s = surj
    while not s.is_identity():
        v = s.values
        i = next(i for i in range(len(v) - 1) if v[i] == v[i + 1])
        # s = s' o sigma^i ; apply X(s') first, then s_i
        steps.append((s.source_dim - 1, i))
        s = DeltaMap(s.source_dim - 1, s.target_dim, v[:i + 1] + v[i + 2:])
    return tuple(reversed(steps))


# -- truncated simplicial objects -----------------------------------------------

@dataclass(frozen=True, eq=False)
class TruncSimp:
    levels: tuple
    faces: tuple  # faces[n][j]: X_n -> X_{n-1}, n >= 1; faces[0] == ()
    degens: tuple  # degens[n][j]: X_n -> X_{n+1}, n < dim
    cat: Any = field(default=SETS, repr=False)
    coskeletal_above: int | None = None

    @property
    def dim(self) -> int:
        return len(self.levels) - 1

    def elements(self, n: int) -> tuple:
        return self.levels[n].elements

    def sizes(self) -> list[int]:
        return [len(l.elements) for l in self.levels]

    def face(self, n: int, j: int, x):
        return self.faces[n][j][x]

    def degen(self, n: int, j: int, x):
        return self.degens[n][j][x]

    def act(self, alpha: DeltaMap, x):
        """``X(alpha)(x)`` for ``alpha: [k] -> [m]`` and ``x`` in ``X_m``."""
        if alpha.is_identity():
            return x
        surj, inj = _factor(alpha)
        n = inj.target_dim
        for j in _face_steps(inj):
            x = self.faces[n][j][x]
            n -= 1
        for lvl, j in _degeneracy_steps(surj):
            x = self.degens[lvl][j][x]
        return x

    def __repr__(self):
        return f"TruncSimp(sizes={self.sizes()}, cat={self.cat!r}, cosk={self.coskeletal_above})"


def make_simp(levels, faces, degens, cat=SETS, coskeletal_above=None) -> TruncSimp:
    faces = tuple(tuple(fs) for fs in faces)
    if not faces or faces[0] != ():
        faces = ((),) + faces
    return TruncSimp(tuple(levels), faces, tuple(tuple(ds) for ds in degens), cat, coskeletal_above)


def _identities(x: TruncSimp) -> Iterator[tuple[str, int, int, int, Any, Any]]:
    """Yield ``(name, n, i, j, lhs, rhs)`` for each simplicial identity instance."""
    F, D, d = x.faces, x.degens, x.dim
    for n in range(2, d + 1):
        for j in range(n + 1):
            for i in range(j):
                for e in x.elements(n):
                    yield ("d_i d_j = d_{j-1} d_i", n, i, j, F[n - 1][i][F[n][j][e]], F[n - 1][j - 1][F[n][i][e]])
    for n in range(d):
        for j in range(n + 1):
            for e in x.elements(n):
                y = D[n][j][e]
                for i in range(n + 2):
                    lhs = F[n + 1][i][y]
                    if i < j:
                        rhs = D[n - 1][j - 1][F[n][i][e]]
                    elif i in (j, j + 1):
                        rhs = e
                    else:
                        rhs = D[n - 1][j][F[n][i - 1][e]]
                    yield ("d_i s_j", n, i, j, lhs, rhs)
    for n in range(d - 1):
        for j in range(n + 1):
            for i in range(j + 1):
                for e in x.elements(n):
                    yield ("s_i s_j = s_{j+1} s_i", n, i, j, D[n + 1][i][D[n][j][e]], D[n + 1][j + 1][D[n][i][e]])


def validate(x: TruncSimp) -> Verdict:
    """Check all simplicial identities, structure-map typing and the coskeletal flag."""
    for n in range(1, x.dim + 1):
        if len(x.faces[n]) != n + 1:
            return Verdict.fail(f"level {n} has {len(x.faces[n])} face maps")
        for j, f in enumerate(x.faces[n]):
            if not x.cat.is_morphism(x.levels[n], x.levels[n - 1], f):
                return Verdict.fail(f"d_{j} on level {n} is not a morphism")
    for n in range(x.dim):
        if len(x.degens[n]) != n + 1:
            return Verdict.fail(f"level {n} has {len(x.degens[n])} degeneracies")
        for j, s in enumerate(x.degens[n]):
            if not x.cat.is_morphism(x.levels[n], x.levels[n + 1], s):
                return Verdict.fail(f"s_{j} on level {n} is not a morphism")
    for name, n, i, j, lhs, rhs in _identities(x):
        if lhs != rhs:
            return Verdict.fail(f"identity {name} fails at level {n}, i={i}, j={j}")
    if x.coskeletal_above is not None:
        c = x.coskeletal_above
        for m in range(c + 1, x.dim + 1):
            comp = cosk_comparison(x, c, m)
            target = _cosk_families(skeleton(x, c), c, m)
            if len(set(comp.values())) != len(comp) or set(comp.values()) != set(target):
                return Verdict.fail(f"level {m} is not {c}-coskeletal")
    return PASS


# -- maps ---------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SimpMap:
    source: TruncSimp
    target: TruncSimp
    maps: tuple  # maps[n]: dict X_n -> Y_n

    def __call__(self, n: int, x):
        return self.maps[n][x]

    def __eq__(self, other):
        if not isinstance(other, SimpMap):
            return NotImplemented
        return tuple(dict(m) for m in self.maps) == tuple(dict(m) for m in other.maps)

    __hash__ = None


def identity_map(x: TruncSimp) -> SimpMap:
    return SimpMap(x, x, tuple({e: e for e in x.elements(n)} for n in range(x.dim + 1)))


def compose(g: SimpMap, f: SimpMap) -> SimpMap:
    """``g o f``."""
    return SimpMap(f.source, g.target, tuple({x: gm[y] for x, y in fm.items()} for fm, gm in zip(f.maps, g.maps)))


def validate_map(f: SimpMap) -> Verdict:
    x, y = f.source, f.target
    if x.dim != y.dim or len(f.maps) != x.dim + 1:
        return Verdict.fail("dimension mismatch")
    for n in range(x.dim + 1):
        if not x.cat.is_morphism(x.levels[n], y.levels[n], f.maps[n]):
            return Verdict.fail(f"level {n} component is not a morphism")
    for n in range(1, x.dim + 1):
        for j in range(n + 1):
            dx, dy = x.faces[n][j], y.faces[n][j]
            for e in x.elements(n):
                if f.maps[n - 1][dx[e]] != dy[f.maps[n][e]]:
                    return Verdict.fail(f"does not commute with d_{j} at level {n}")
    for n in range(x.dim):
        for j in range(n + 1):
            sx, sy = x.degens[n][j], y.degens[n][j]
            for e in x.elements(n):
                if f.maps[n + 1][sx[e]] != sy[f.maps[n][e]]:
                    return Verdict.fail(f"does not commute with s_{j} at level {n}")
    return PASS


def enumerate_maps(x: TruncSimp, y: TruncSimp, limit: int | None = None) -> list[SimpMap]:
    """All simplicial maps ``x -> y`` (backtracking; small inputs only).

    Degenerate simplices are forced by lower levels, so only nondegenerate
    simplices are branched on; each candidate must match the images of its
    faces.  Level components are checked to be morphisms of the category.
    """
    if x.dim != y.dim:
        raise ValueError("dimension mismatch")
    decomps = [nondegenerate_decomposition(x, n) for n in range(x.dim + 1)]
    face_index = []
    for n in range(y.dim + 1):
        idx: dict = {}
        for e in y.elements(n):
            sig = tuple(y.faces[n][j][e] for j in range(n + 1)) if n else ()
            idx.setdefault(sig, []).append(e)
        face_index.append(idx)
    out: list[SimpMap] = []
    maps: list[dict] = [dict() for _ in range(x.dim + 1)]

    def level(n):
        if n > x.dim:
            out.append(SimpMap(x, y, tuple(dict(m) for m in maps)))
            return limit is not None and len(out) >= limit
        dec = decomps[n]
        fixed = {}
        for e, (sigma, base) in dec.degenerate.items():
            fixed[e] = y.act(sigma, maps[sigma.target_dim][base])
        nd = list(dec.nondegenerate)

        def rec(i):
            if i == len(nd):
                maps[n].clear()
                maps[n].update(fixed)
                maps[n].update(assign)
                if x.cat.is_morphism(x.levels[n], y.levels[n], maps[n]):
                    return level(n + 1)
                return False
            e = nd[i]
            sig = tuple(maps[n - 1][x.faces[n][j][e]] for j in range(n + 1)) if n else ()
            for v in face_index[n].get(sig, ()):
                assign[e] = v
                if rec(i + 1):
                    return True
            assign.pop(e, None)
            return False

        assign: dict = {}
        return rec(0)

    level(0)
    return out


def find_isomorphism(x: TruncSimp, y: TruncSimp) -> SimpMap | None:
    """A simplicial isomorphism ``x -> y`` found by levelwise backtracking."""
    if x.dim != y.dim or x.sizes() != y.sizes():
        return None
    for f in _iso_search(x, y):
        return f
    return None


def _iso_search(x: TruncSimp, y: TruncSimp) -> Iterator[SimpMap]:
    face_index = []
    for n in range(y.dim + 1):
        idx: dict = {}
        for e in y.elements(n):
            sig = tuple(y.faces[n][j][e] for j in range(n + 1)) if n else ()
            idx.setdefault(sig, []).append(e)
        face_index.append(idx)
    maps: list[dict] = [dict() for _ in range(x.dim + 1)]

    def level(n):
        if n > x.dim:
            f = SimpMap(x, y, tuple(dict(m) for m in maps))
            if validate_map(f):
                yield f
            return
        elems = list(x.elements(n))
        used: set = set()
        assign: dict = {}

        def rec(i):
            if i == len(elems):
                maps[n] = dict(assign)
                if x.cat.is_morphism(x.levels[n], y.levels[n], maps[n]):
                    yield from level(n + 1)
                return
            e = elems[i]
            sig = tuple(maps[n - 1][x.faces[n][j][e]] for j in range(n + 1)) if n else ()
            for v in face_index[n].get(sig, ()):
                if v in used:
                    continue
                assign[e] = v
                used.add(v)
                yield from rec(i + 1)
                used.discard(v)
                del assign[e]

        yield from rec(0)

    yield from level(0)


# -- skeleton and coskeleton ---------------------------------------------------------

def skeleton(x: TruncSimp, n: int) -> TruncSimp:
    """Truncation to levels ``<= n``."""
    if n > x.dim or n < 0:
        raise ValueError(f"cannot truncate a {x.dim}-truncated object at {n}")
    cosk = x.coskeletal_above if x.coskeletal_above is not None and x.coskeletal_above <= n else None
    return TruncSimp(x.levels[:n + 1], x.faces[:n + 1], x.degens[:n], x.cat, cosk)


def _face_to(x: TruncSimp, n: int, simplex, subset: Sequence[int], sub: Sequence[int]):
    """Face of an ``n``-simplex labelled by ``subset`` onto ``sub`` (subset of it)."""
    positions = tuple(subset.index(v) for v in sub)
    return x.act(DeltaMap(len(sub) - 1, n, positions), simplex)


def _cosk_value(x: TruncSimp, n: int, y, m: int, alpha: DeltaMap):
    """``cosk_n(X)(alpha)(y)`` for ``y`` at level ``m`` and ``alpha: [k] -> [m]``, ``k <= n``."""
    if m <= n:
        return x.act(alpha, y)
    surj, inj = _factor(alpha)
    image = inj.values
    subsets = _subsets(m, n + 1)
    s = next(s for s in subsets if set(image) <= set(s))
    simplex = y[_subset_index(m, n + 1)[s]]
    face = _face_to(x, n, simplex, s, image)
    return x.act(surj, face)


def _cosk_families(x: TruncSimp, n: int, m: int, cap: int | None = None) -> list[tuple]:
    """Compatible families of ``n``-simplices of ``x`` indexed by ``(n+1)``-subsets of ``[m]``."""
    subsets = _subsets(m, n + 1)
    xn = x.elements(n)
    if n == 0:
        # products are taken over the base: vertices of a family share a base point
        base = getattr(x.levels[0], "base", None)
        if base is None:
            fams = list(itertools.product(xn, repeat=len(subsets)))
        else:
            fibres: dict = {}
            for e in xn:
                fibres.setdefault(base[e], []).append(e)
            fams = [t for b in ordered(fibres) for t in itertools.product(fibres[b], repeat=len(subsets))]
            fams.sort(key=key)
        if cap is not None and len(fams) > cap:
            raise SizeCapError(f"coskeleton level {m} would have {len(fams)} candidates (cap {cap})")
        return fams
    by_face: dict = {}
    for e in xn:
        for pos in range(n + 1):
            by_face.setdefault((pos, x.faces[n][pos][e]), set()).add(e)
    out: list[tuple] = []
    chosen: list = []
    faces_known: dict = {}

    def rec(i):
        if i == len(subsets):
            out.append(tuple(chosen))
            if cap is not None and len(out) > cap:
                raise SizeCapError(f"coskeleton level {m} exceeds cap {cap}")
            return
        s = subsets[i]
        cands = None
        for pos in range(n + 1):
            t = s[:pos] + s[pos + 1:]
            if t in faces_known:
                pool = by_face.get((pos, faces_known[t]), set())
                cands = pool if cands is None else cands & pool
        if cands is None:
            cands = xn
        for e in ordered(cands):
            added = []
            for pos in range(n + 1):
                t = s[:pos] + s[pos + 1:]
                if t not in faces_known:
                    faces_known[t] = x.faces[n][pos][e]
                    added.append(t)
            chosen.append(e)
            rec(i + 1)
            chosen.pop()
            for t in added:
                del faces_known[t]

    rec(0)
    return out


def coskeleton(x: TruncSimp, n: int, d: int, cap: int | None = None) -> TruncSimp:
    """``cosk_n`` of the ``n``-truncation of ``x``, computed up to level ``d``."""
    if n > x.dim or n < 0:
        raise ValueError(f"coskeleton level {n} exceeds truncation {x.dim}")
    base = skeleton(x, n)
    levels = list(base.levels)
    faces = [list(f) for f in base.faces]
    degens = [list(s) for s in base.degens]
    elems = {}
    for m in range(n + 1, d + 1):
        fams = _cosk_families(base, n, m, cap)
        obj = x.cat.limit([base.levels[n]] * len(_subsets(m, n + 1)), fams)
        levels.append(obj)
        elems[m] = obj.elements
    full_x = TruncSimp(tuple(levels), tuple(tuple(f) for f in faces), tuple(tuple(s) for s in degens), x.cat)

    for m in range(n + 1, d + 1):
        subs_prev = _subsets(m - 1, n + 1)
        level_faces = []
        for j in range(m + 1):
            delta = DeltaMap.coface(m, j)
            if m - 1 == n:
                face_set = tuple(v for v in range(m + 1) if v != j)
                idx = _subset_index(m, n + 1)[face_set]
                level_faces.append({y: y[idx] for y in elems[m]})
            else:
                idxs = [_subset_index(m, n + 1)[tuple(delta(v) for v in s)] for s in subs_prev]
                level_faces.append({y: tuple(y[i] for i in idxs) for y in elems[m]})
        faces.append(level_faces)
        # degeneracies from level m-1 into level m
        src = full_x.levels[m - 1].elements
        level_degens = []
        for j in range(m):
            plan = _degeneracy_plan(n, m, j)
            if m - 1 <= n:
                level_degens.append({y: tuple(base.act(a, y) for _, a in plan) for y in src})
            else:
                level_degens.append({y: tuple(base.act(a, y[i]) for i, a in plan) for y in src})
        degens.append(level_degens)
    return TruncSimp(tuple(levels), tuple(tuple(f) for f in faces), tuple(tuple(s) for s in degens),
                     x.cat, n)


@lru_cache(maxsize=None)
def _degeneracy_plan(n: int, m: int, j: int) -> tuple:
    """For ``s_j`` into ``cosk_n`` level ``m``: per target subset, the source
    component index and the map to apply to it."""
    sigma = DeltaMap.codegeneracy(m - 1, j)
    plan = []
    for s in _subsets(m, n + 1):
        alpha = sigma.compose(DeltaMap.inclusion(s, m))
        if m - 1 <= n:
            plan.append((None, alpha))
            continue
        surj, inj = _factor(alpha)
        image = inj.values
        big = next(t for t in _subsets(m - 1, n + 1) if set(image) <= set(t))
        face = DeltaMap(len(image) - 1, n, tuple(big.index(v) for v in image))
        plan.append((_subset_index(m - 1, n + 1)[big], face.compose(surj)))
    return tuple(plan)


def cosk_comparison(x: TruncSimp, n: int, m: int) -> dict:
    """The canonical map ``X_m -> cosk_n(X)_m`` as a dictionary."""
    if m <= n:
        return {e: e for e in x.elements(m)}
    incs = _inclusions(m, n + 1)
    return {e: tuple(x.act(i, e) for i in incs) for e in x.elements(m)}


@lru_cache(maxsize=None)
def _inclusions(m: int, size: int) -> tuple:
    return tuple(DeltaMap.inclusion(s, m) for s in _subsets(m, size))


def cosk_map(f: SimpMap, n: int, cx: TruncSimp, cy: TruncSimp) -> SimpMap:
    """``cosk_n(f): cx -> cy`` where ``cx``, ``cy`` are the ``n``-coskeleta."""
    maps = []
    for m in range(cx.dim + 1):
        if m <= n:
            maps.append(dict(f.maps[m]))
        else:
            fm = f.maps[n]
            maps.append({y: tuple(fm[c] for c in y) for y in cx.elements(m)})
    return SimpMap(cx, cy, tuple(maps))


def coskeleton_unit(x: TruncSimp, n: int) -> SimpMap:
    """The unit ``X -> cosk_n(sk_n X)`` of the truncation/coskeleton adjunction."""
    c = coskeleton(x, n, x.dim)
    return SimpMap(x, c, tuple(cosk_comparison(x, n, m) for m in range(x.dim + 1)))


def transpose_to_cosk(f: SimpMap, x: TruncSimp, c: TruncSimp, n: int) -> SimpMap:
    """Transpose of ``f: sk_n X -> Y_{<=n}`` to ``X -> cosk_n Y``."""
    maps = []
    for m in range(x.dim + 1):
        if m <= n:
            maps.append(dict(f.maps[m]))
        else:
            comp = cosk_comparison(x, n, m)
            fn = f.maps[n]
            maps.append({e: tuple(fn[s] for s in comp[e]) for e in x.elements(m)})
    return SimpMap(x, c, tuple(maps))


def transpose_from_cosk(g: SimpMap, n: int) -> SimpMap:
    """Transpose of ``g: X -> cosk_n Y`` to ``sk_n X -> sk_n Y``."""
    return SimpMap(skeleton(g.source, n), skeleton(g.target, n), tuple(dict(m) for m in g.maps[:n + 1]))


# -- Eilenberg-Zilber decomposition ---------------------------------------------------

@dataclass(frozen=True)
class Decomposition:
    level: int
    nondegenerate: tuple
    degenerate: Mapping  # x -> (surjection sigma, nondegenerate y) with x = X(sigma)(y)


def nondegenerate_decomposition(x: TruncSimp, n: int) -> Decomposition:
    """Split ``X_n`` into nondegenerate simplices and ``X(sigma)(y)`` presentations."""
    if n > x.dim:
        raise ValueError("level above truncation")
    nd, deg = [], {}
    memo: dict = {}

    def present(level, e):
        if (level, e) in memo:
            return memo[level, e]
        res = (DeltaMap.identity(level), e)
        if level > 0:
            for j in range(level):
                z = x.faces[level][j][e]
                if x.degens[level - 1][j][z] == e:
                    tau, y = present(level - 1, z)
                    res = (tau.compose(DeltaMap.codegeneracy(level - 1, j)), y)
                    break
        memo[level, e] = res
        return res

    for e in x.elements(n):
        sigma, y = present(n, e)
        if sigma.is_identity():
            nd.append(e)
        else:
            deg[e] = (sigma, y)
    return Decomposition(n, tuple(nd), deg)


def check_eilenberg_zilber(x: TruncSimp, n: int) -> Verdict:
    """Exhaustively confirm each simplex has exactly one ``(sigma, y)`` presentation."""
    nds = {k: set(nondegenerate_decomposition(x, k).nondegenerate) for k in range(n + 1)}
    for e in x.elements(n):
        found = [(s, y) for s in surjections_from(n) for y in nds[s.target_dim] if x.act(s, y) == e]
        if len(found) != 1:
            return Verdict.fail(f"simplex {e!r} at level {n} has {len(found)} presentations")
    return PASS


# -- standard objects -------------------------------------------------------------------

def constant(obj, d: int, cat=SETS) -> TruncSimp:
    """The constant simplicial object on ``obj`` truncated at ``d``."""
    ident = {e: e for e in obj.elements}
    faces = [()] + [tuple(ident for _ in range(n + 1)) for n in range(1, d + 1)]
    degens = [tuple(ident for _ in range(n + 1)) for n in range(d)]
    return TruncSimp(tuple(obj for _ in range(d + 1)), tuple(faces), tuple(degens), cat, 0)


def standard_simplex(k: int, d: int) -> TruncSimp:
    """``Delta[k]`` truncated at ``d``: level ``n`` is the monotone maps ``[n] -> [k]``."""
    levels = [SETS.make(tuple(a.values for a in monotone_maps(n, k))) for n in range(d + 1)]
    faces = [()]
    for n in range(1, d + 1):
        faces.append(tuple({v: v[:j] + v[j + 1:] for v in levels[n].elements} for j in range(n + 1)))
    degens = [tuple({v: v[:j + 1] + v[j:] for v in levels[n].elements} for j in range(n + 1)) for n in range(d)]
    return TruncSimp(tuple(levels), tuple(faces), tuple(degens), SETS, k if k <= d else None)


def interval(d: int) -> TruncSimp:
    return standard_simplex(1, d)


def disjoint_union(x: TruncSimp, y: TruncSimp) -> TruncSimp:
    """Coproduct of two simplicial sets (labels tagged 0 and 1)."""
    if x.dim != y.dim:
        raise ValueError("dimension mismatch")
    levels = [SETS.make([(0, e) for e in x.elements(n)] + [(1, e) for e in y.elements(n)]) for n in range(x.dim + 1)]

    def tag(maps_x, maps_y):
        out = {(0, e): (0, v) for e, v in maps_x.items()}
        out.update({(1, e): (1, v) for e, v in maps_y.items()})
        return out

    faces = [()] + [tuple(tag(x.faces[n][j], y.faces[n][j]) for j in range(n + 1)) for n in range(1, x.dim + 1)]
    degens = [tuple(tag(x.degens[n][j], y.degens[n][j]) for j in range(n + 1)) for n in range(x.dim)]
    return TruncSimp(tuple(levels), tuple(faces), tuple(degens), SETS)


def levelwise_product(x: TruncSimp, y: TruncSimp, cat=None) -> TruncSimp:
    """Levelwise product (for simplicial sets and simplicial spaces)."""
    if x.dim != y.dim:
        raise ValueError("dimension mismatch")
    cat = cat if cat is not None else x.cat
    levels = [cat.limit([x.levels[n], y.levels[n]], itertools.product(x.elements(n), y.elements(n)))
              for n in range(x.dim + 1)]
    faces = [()] + [tuple({(a, b): (x.faces[n][j][a], y.faces[n][j][b]) for a, b in levels[n].elements}
                          for j in range(n + 1)) for n in range(1, x.dim + 1)]
    degens = [tuple({(a, b): (x.degens[n][j][a], y.degens[n][j][b]) for a, b in levels[n].elements}
                    for j in range(n + 1)) for n in range(x.dim)]
    return TruncSimp(tuple(levels), tuple(faces), tuple(degens), cat)


# -- interval products and homotopies ---------------------------------------------------

def interval_simplices(n: int) -> tuple[tuple[int, ...], ...]:
    """Monotone maps ``[n] -> [1]`` as 0/1 tuples, ordered by number of zeros."""
    return tuple(tuple([0] * c + [1] * (n + 1 - c)) for c in range(n + 2))


def product_with_interval(x: TruncSimp) -> TruncSimp:
    """``X x Delta[1]``: level ``n`` pairs ``(x, t)`` with ``t: [n] -> [1]`` monotone."""
    levels = [x.cat.product_with_labels(x.levels[n], interval_simplices(n)) for n in range(x.dim + 1)]
    faces = [()]
    for n in range(1, x.dim + 1):
        faces.append(tuple({(e, t): (x.faces[n][j][e], t[:j] + t[j + 1:]) for e, t in levels[n].elements}
                           for j in range(n + 1)))
    degens = [tuple({(e, t): (x.degens[n][j][e], t[:j + 1] + t[j:]) for e, t in levels[n].elements}
                    for j in range(n + 1)) for n in range(x.dim)]
    return TruncSimp(tuple(levels), tuple(faces), tuple(degens), x.cat)


@dataclass(frozen=True, eq=False)
class ReducedHomotopy:
    """A (truncated) reduced homotopy ``{r[n][i]: X_n -> Y_n}`` from ``f`` to ``g``."""

    f: SimpMap
    g: SimpMap
    r: tuple  # r[n][i] dict for 0 <= i <= n+1

    @property
    def source(self) -> TruncSimp:
        return self.f.source

    @property
    def target(self) -> TruncSimp:
        return self.f.target

    @property
    def dim(self) -> int:
        return len(self.r) - 1

    def __eq__(self, other):
        if not isinstance(other, ReducedHomotopy):
            return NotImplemented
        return all(dict(a) == dict(b) for ra, rb in zip(self.r, other.r) for a, b in zip(ra, rb)) \
            and len(self.r) == len(other.r)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class Homotopy:
    """A map ``h: X x Delta[1] -> Y`` restricting to ``f`` at ``t = 1`` and ``g`` at ``t = 0``."""

    f: SimpMap
    g: SimpMap
    h: SimpMap

    def endpoint(self, value: int) -> SimpMap:
        return _endpoint(self.f.source, self.h, value)

    @classmethod
    def from_map(cls, x: TruncSimp, h: SimpMap) -> "Homotopy":
        """Read ``f`` and ``g`` off a map ``h: X x Delta[1] -> Y``."""
        return cls(_endpoint(x, h, 1), _endpoint(x, h, 0), h)


def _endpoint(x: TruncSimp, h: SimpMap, value: int) -> SimpMap:
    return SimpMap(x, h.target, tuple({e: h.maps[n][(e, (value,) * (n + 1))] for e in x.elements(n)}
                                      for n in range(x.dim + 1)))


def check_reduced_homotopy(rh: ReducedHomotopy) -> Verdict:
    x, y = rh.source, rh.target
    d = rh.dim
    if d > x.dim or d > y.dim:
        return Verdict.fail("homotopy exceeds truncation")
    r = rh.r
    for n in range(d + 1):
        if len(r[n]) != n + 2:
            return Verdict.fail(f"level {n} has {len(r[n])} maps, expected {n + 2}")
        if dict(r[n][0]) != dict(rh.f.maps[n]):
            return Verdict.fail(f"boundary r[{n}][0] != f_{n}")
        if dict(r[n][n + 1]) != dict(rh.g.maps[n]):
            return Verdict.fail(f"boundary r[{n}][{n + 1}] != g_{n}")
        for i in range(n + 2):
            if not x.cat.is_morphism(x.levels[n], y.levels[n], r[n][i]):
                return Verdict.fail(f"r[{n}][{i}] is not a morphism")
    for n in range(1, d + 1):
        for i in range(n + 2):
            for j in range(n + 1):
                lower = i - 1 if i > j else i
                dx, dy = x.faces[n][j], y.faces[n][j]
                ri, rl = r[n][i], r[n - 1][lower]
                for e in x.elements(n):
                    if dy[ri[e]] != rl[dx[e]]:
                        return Verdict.fail(f"face identity fails (n={n}, i={i}, j={j})")
    for n in range(d):
        for i in range(n + 2):
            for j in range(n + 1):
                upper = i + 1 if i > j else i
                sx, sy = x.degens[n][j], y.degens[n][j]
                ri, ru = r[n][i], r[n + 1][upper]
                for e in x.elements(n):
                    if sy[ri[e]] != ru[sx[e]]:
                        return Verdict.fail(f"degeneracy identity fails (n={n}, i={i}, j={j})")
    return PASS


def constant_reduced_homotopy(f: SimpMap) -> ReducedHomotopy:
    return ReducedHomotopy(f, f, tuple(tuple(f.maps[n] for _ in range(n + 2)) for n in range(f.source.dim + 1)))


def extension_family(r: Sequence[Sequence[Mapping]], n: int, faces_of_x: Sequence, i: int) -> tuple:
    """Faces of the extended value at level ``n+1``: component ``j`` is
    ``r^{i-1}_n(x_j)`` when ``i > j`` and ``r^i_n(x_j)`` otherwise."""
    return tuple(r[n][i - 1][xj] if i > j else r[n][i][xj] for j, xj in enumerate(faces_of_x))


def _faces_to_cosk_tuple(faces_by_j: Sequence, n: int) -> tuple:
    """Reorder faces ``(d_0, .., d_{n+1})`` into the flat coskeleton tuple at level ``n+1``."""
    m = n + 1
    return tuple(faces_by_j[next(j for j in range(m + 1) if j not in s)] for s in _subsets(m, n + 1))


def extend_reduced_homotopy(rh: ReducedHomotopy) -> ReducedHomotopy:
    """Extend an ``n``-truncated reduced homotopy to the ``n``-coskeleta at level ``n+1``."""
    n = rh.dim
    x, y = skeleton(rh.source, n), skeleton(rh.target, n)
    cx, cy = coskeleton(x, n, n + 1), coskeleton(y, n, n + 1)
    f = SimpMap(x, y, rh.f.maps[:n + 1])
    g = SimpMap(x, y, rh.g.maps[:n + 1])
    cf, cg = cosk_map(f, n, cx, cy), cosk_map(g, n, cx, cy)
    top_y = set(cy.elements(n + 1))
    new_level = []
    for i in range(n + 3):
        ri = {}
        for e in cx.elements(n + 1):
            faces = [cx.faces[n + 1][j][e] for j in range(n + 2)]
            val = _faces_to_cosk_tuple(extension_family(rh.r, n, faces, i), n)
            if val not in top_y:
                raise AssertionError(f"extended family for i={i} is not compatible at {e!r}")
            ri[e] = val
        new_level.append(ri)
    out = ReducedHomotopy(cf, cg, tuple(rh.r[:n + 1]) + (tuple(new_level),))
    verdict = check_reduced_homotopy(out)
    if not verdict:
        raise AssertionError(f"extension violates identities: {verdict.reason}")
    return out


def reduced_to_homotopy(rh: ReducedHomotopy) -> Homotopy:
    x, y = rh.source, rh.target
    px = product_with_interval(skeleton(x, rh.dim) if rh.dim < x.dim else x)
    maps = []
    for n in range(rh.dim + 1):
        maps.append({(e, t): rh.r[n][t.count(0)][e] for e, t in px.elements(n)})
    yy = skeleton(y, rh.dim) if rh.dim < y.dim else y
    h = SimpMap(px, yy, tuple(maps))
    verdict = validate_map(h)
    if not verdict:
        raise AssertionError(f"homotopy from reduced homotopy is not simplicial: {verdict.reason}")
    return Homotopy(rh.f, rh.g, h)


def homotopy_to_reduced(hom: Homotopy) -> ReducedHomotopy:
    x = hom.f.source
    d = hom.h.source.dim
    r = []
    for n in range(d + 1):
        ts = interval_simplices(n)
        r.append(tuple({e: hom.h.maps[n][(e, ts[c])] for e in x.elements(n)} for c in range(n + 2)))
    return ReducedHomotopy(hom.f, hom.g, tuple(r))


def enumerate_reduced_homotopies(f: SimpMap, g: SimpMap) -> list[ReducedHomotopy]:
    """All reduced homotopies ``f => g`` (bottom-up backtracking; tiny inputs)."""
    x, y = f.source, f.target
    d = x.dim
    face_index = []
    for n in range(d + 1):
        idx: dict = {}
        for e in y.elements(n):
            sig = tuple(y.faces[n][j][e] for j in range(n + 1)) if n else ()
            idx.setdefault(sig, []).append(e)
        face_index.append(idx)
    out = []
    r: list[list[dict]] = []

    def level(n):
        if n > d:
            cand = ReducedHomotopy(f, g, tuple(tuple(dict(m) for m in lvl) for lvl in r))
            if check_reduced_homotopy(cand):
                out.append(cand)
            return
        maps = [dict() for _ in range(n + 2)]
        maps[0] = dict(f.maps[n])
        maps[n + 1] = dict(g.maps[n])
        slots = [(i, e) for i in range(1, n + 1) for e in x.elements(n)]

        def rec(k):
            if k == len(slots):
                r.append(maps)
                level(n + 1)
                r.pop()
                return
            i, e = slots[k]
            sig = tuple(r[n - 1][i - 1 if i > j else i][x.faces[n][j][e]] for j in range(n + 1))
            forced = None
            for j in range(n):
                z = x.faces[n][j][e]
                if x.degens[n - 1][j][z] == e:
                    # e = s_j z: r^i(s_j z) = s_j r^{i'}(z) when i != j+1
                    if i <= j:
                        forced = y.degens[n - 1][j][r[n - 1][i][z]]
                    elif i > j + 1:
                        forced = y.degens[n - 1][j][r[n - 1][i - 1][z]]
                    if forced is not None:
                        break
            cands = face_index[n].get(sig, ())
            for v in cands:
                if forced is not None and v != forced:
                    continue
                maps[i][e] = v
                rec(k + 1)
            maps[i].pop(e, None)

        rec(0)

    level(0)
    return out
