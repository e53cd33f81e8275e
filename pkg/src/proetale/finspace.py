"""Finite topological spaces as specialization preorders.

Convention: ``leq(a, b)`` holds when ``a`` lies in every open set containing
``b``; the open sets are then exactly the down-closed subsets.  A map of
finite spaces is continuous iff it is monotone for this preorder.

The component functor, its adjunction with the inclusion of totally
disconnected spaces, fibre products over the component space and the
disconnectedness predicates all live here.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from .category import key, ordered

QUOTIENT_SUBSET_LIMIT = 15
HOMEO_LIMIT = 12


class SpaceSizeError(ValueError):
    """Input exceeds the size supported by a brute-force routine."""


@dataclass(frozen=True, eq=False)
class FiniteSpace:
    points: tuple
    below: Mapping  # point -> frozenset of points <= it (down-closure)

    @classmethod
    def from_relation(cls, points: Iterable, leq: Iterable[tuple] = ()) -> "FiniteSpace":
        """Reflexive-transitive closure of ``leq`` on ``points``."""
        pts = ordered(set(points))
        if len(pts) != len(set(pts)):
            raise ValueError("duplicate points")
        index = set(pts)
        up: dict = {p: set() for p in pts}
        for a, b in leq:
            if a not in index or b not in index:
                raise ValueError(f"relation mentions unknown point in ({a!r}, {b!r})")
            up[b].add(a)
        below = {}
        for p in pts:
            seen = {p}
            stack = [p]
            while stack:
                x = stack.pop()
                for y in up[x]:
                    if y not in seen:
                        seen.add(y)
                        stack.append(y)
            below[p] = frozenset(seen)
        return cls(pts, below)

    @classmethod
    def discrete(cls, points: Iterable) -> "FiniteSpace":
        pts = ordered(set(points))
        return cls(pts, {p: frozenset((p,)) for p in pts})

    @property
    def elements(self) -> tuple:
        return self.points

    def __len__(self):
        return len(self.points)

    def __eq__(self, other):
        if not isinstance(other, FiniteSpace):
            return NotImplemented
        return self.points == other.points and dict(self.below) == dict(other.below)

    __hash__ = None

    def leq(self, a, b) -> bool:
        return a in self.below[b]

    def relation(self) -> list[tuple]:
        return [(a, b) for b in self.points for a in ordered(self.below[b])]

    def is_open(self, subset) -> bool:
        s = set(subset)
        return all(self.below[p] <= s for p in s)

    def is_discrete(self) -> bool:
        return all(len(self.below[p]) == 1 for p in self.points)

    def closure(self, subset) -> frozenset:
        s = set(subset)
        return frozenset(p for p in self.points if self.below[p] & s)

    def open_sets(self) -> list[frozenset]:
        """All down-closed subsets (exponential; intended for small spaces)."""
        out = []
        # strictly smaller points have strictly smaller down-closures, so they come first
        pts = sorted(self.points, key=lambda p: (len(self.below[p]), key(p)))

        def rec(i, chosen: frozenset):
            if i == len(pts):
                out.append(chosen)
                return
            p = pts[i]
            rec(i + 1, chosen)
            if all(q in chosen or p in self.below[q] for q in self.below[p]):
                rec(i + 1, chosen | {p})

        rec(0, frozenset())
        return [o for o in out if self.is_open(o)]

    def check_invariants(self) -> None:
        for p in self.points:
            if p not in self.below[p]:
                raise AssertionError(f"preorder not reflexive at {p!r}")
            for q in self.below[p]:
                if not self.below[q] <= self.below[p]:
                    raise AssertionError(f"preorder not transitive at {q!r} <= {p!r}")
        if len(self.points) <= 12:
            opens = set(self.open_sets())
            for a, b in itertools.combinations(opens, 2):
                if a | b not in opens or a & b not in opens:
                    raise AssertionError("open sets not closed under union/intersection")

    def to_json(self) -> dict:
        return {"points": list(self.points),
                "leq": [[a, b] for a, b in self.relation() if a != b]}

    @classmethod
    def from_json(cls, data: dict) -> "FiniteSpace":
        return cls.from_relation(data["points"], (tuple(pair) for pair in data.get("leq", ())))

    def __repr__(self):
        rel = [(a, b) for a, b in self.relation() if a != b]
        return f"FiniteSpace({list(self.points)}, leq={rel})"


@dataclass(frozen=True, eq=False)
class SpaceMap:
    source: FiniteSpace
    target: FiniteSpace
    assignment: Mapping

    def __call__(self, p):
        return self.assignment[p]

    def is_continuous(self) -> bool:
        a = self.assignment
        return all(self.target.leq(a[q], a[p]) for p in self.source.points for q in self.source.below[p])

    def is_surjective(self) -> bool:
        return set(self.assignment.values()) >= set(self.target.points)


def product(x: FiniteSpace, y: FiniteSpace) -> FiniteSpace:
    pts = [(a, b) for a in x.points for b in y.points]
    below = {(a, b): frozenset(itertools.product(x.below[a], y.below[b])) for a, b in pts}
    return FiniteSpace(ordered(pts), below)


def subspace(x: FiniteSpace, subset: Iterable) -> FiniteSpace:
    s = set(subset)
    return FiniteSpace(ordered(s), {p: x.below[p] & s for p in s})


# -- components ---------------------------------------------------------------

def _comparability_classes(x: FiniteSpace) -> list[tuple]:
    parent = {p: p for p in x.points}

    def find(p):
        while parent[p] != p:
            parent[p] = parent[parent[p]]
            p = parent[p]
        return p

    for p in x.points:
        for q in x.below[p]:
            rp, rq = find(p), find(q)
            if rp != rq:
                parent[rp] = rq
    groups: dict = {}
    for p in x.points:
        groups.setdefault(find(p), []).append(p)
    return sorted((ordered(g) for g in groups.values()), key=lambda g: key(g[0]))


def quotient(x: FiniteSpace, classes: Sequence[Sequence]) -> tuple[FiniteSpace, SpaceMap]:
    """Quotient of ``x`` by a partition, with the quotient topology.

    Each class is labelled by its least point.  With at most
    ``QUOTIENT_SUBSET_LIMIT`` classes the topology is found by testing every
    subset of the quotient with the preimage criterion; beyond that the
    specialization order is the transitive closure of the image relation,
    which describes the same topology for finite spaces.
    """
    labels = [ordered(c)[0] for c in classes]
    proj = {}
    for lab, c in zip(labels, classes):
        for p in c:
            proj[p] = lab
    if set(proj) != set(x.points):
        raise ValueError("classes do not partition the space")
    if len(labels) <= QUOTIENT_SUBSET_LIMIT:
        # U is open iff its preimage is down-closed, i.e. iff U contains every
        # class meeting the down-closure of a class in U; subsets are bitmasks
        bit = {lab: 1 << i for i, lab in enumerate(labels)}
        reach = {lab: 0 for lab in labels}
        for p in x.points:
            for q in x.below[p]:
                reach[proj[p]] |= bit[proj[q]]
        if all(reach[lab] == bit[lab] for lab in labels):
            # every singleton is open, hence every subset: the quotient is discrete
            q = FiniteSpace(ordered(labels), {lab: frozenset((lab,)) for lab in labels})
            return q, SpaceMap(x, q, proj)
        reach_by_bit = [reach[lab] for lab in labels]
        opens = []
        for mask in range(1 << len(labels)):
            m, i, ok = mask, 0, True
            while m:
                if m & 1 and reach_by_bit[i] & ~mask:
                    ok = False
                    break
                m >>= 1
                i += 1
            if ok:
                opens.append(mask)
        full = (1 << len(labels)) - 1
        below = {}
        for lab in labels:
            meet = full
            for o in opens:
                if o & bit[lab]:
                    meet &= o
            below[lab] = frozenset(a for a in labels if meet & bit[a])
        q = FiniteSpace(ordered(labels), below)
    else:
        rel = {(proj[a], proj[b]) for b in x.points for a in x.below[b]}
        q = FiniteSpace.from_relation(labels, rel)
    return q, SpaceMap(x, q, proj)


def components(x: FiniteSpace) -> tuple[FiniteSpace, SpaceMap]:
    """The space of components and the quotient map onto it (memoized per space)."""
    cached = x.__dict__.get("_components")
    if cached is None:
        cached = quotient(x, _comparability_classes(x))
        object.__setattr__(x, "_components", cached)
    return cached


def is_totally_disconnected(x: FiniteSpace) -> bool:
    return all(len(c) == 1 for c in _comparability_classes(x))


def is_extremally_disconnected(x: FiniteSpace) -> bool:
    # a finite space is profinite iff it is Hausdorff iff it is discrete
    if not x.is_discrete():
        return False
    if len(x) > HOMEO_LIMIT:
        return True
    return all(x.is_open(x.closure(u)) for u in x.open_sets())


def induced_map(f: SpaceMap) -> SpaceMap:
    """The map on component spaces induced by a continuous map."""
    cx, qx = components(f.source)
    cy, qy = components(f.target)
    assignment = {}
    for p in f.source.points:
        c, d = qx(p), qy(f(p))
        if assignment.setdefault(c, d) != d:
            raise AssertionError("continuous map does not respect components")
    return SpaceMap(cx, cy, assignment)


# -- maps and counting ---------------------------------------------------------

def continuous_maps(x: FiniteSpace, t: FiniteSpace) -> Iterator[dict]:
    """Enumerate monotone assignments ``x -> t`` by backtracking."""
    pts = sorted(x.points, key=lambda p: (len(x.below[p]), key(p)))
    assign: dict = {}

    def rec(i):
        if i == len(pts):
            yield dict(assign)
            return
        p = pts[i]
        for v in t.points:
            ok = True
            for q, w in assign.items():
                if (x.leq(q, p) and not t.leq(w, v)) or (x.leq(p, q) and not t.leq(v, w)):
                    ok = False
                    break
            if ok:
                assign[p] = v
                yield from rec(i + 1)
                del assign[p]

    yield from rec(0)


def hom_space_count(x: FiniteSpace, t: FiniteSpace) -> int:
    return sum(1 for _ in continuous_maps(x, t))


def fibre_product_over_components(p: FiniteSpace, f: SpaceMap, s: FiniteSpace
                                  ) -> tuple[FiniteSpace, SpaceMap, SpaceMap]:
    """``P x_{pi(S)} S`` with its projections to ``P`` and ``S``."""
    cs, q = components(s)
    if f.target is not cs and f.target != cs:
        raise ValueError("structure map must land in the component space of S")
    if f.source is not p and f.source != p:
        raise ValueError("structure map must start at P")
    if not f.is_continuous():
        raise ValueError("structure map is not continuous")
    fa, qa = f.assignment, q.assignment
    fibres: dict = {}
    for b in s.points:
        fibres.setdefault(qa[b], []).append(b)
    pts = [(a, b) for a in p.points for b in fibres.get(fa[a], ())]
    keep = set(pts)
    below = {(a, b): frozenset(pair for pair in itertools.product(p.below[a], s.below[b]) if pair in keep)
             for a, b in pts}
    fp = FiniteSpace(ordered(pts), below)
    return (fp, SpaceMap(fp, p, {pt: pt[0] for pt in pts}), SpaceMap(fp, s, {pt: pt[1] for pt in pts}))


# -- homeomorphism -------------------------------------------------------------

def _profile(x: FiniteSpace, p) -> tuple:
    above = sum(1 for q in x.points if p in x.below[q])
    return (len(x.below[p]), above)


def find_homeomorphism(x: FiniteSpace, y: FiniteSpace) -> dict | None:
    """Backtracking search for a homeomorphism ``x -> y``."""
    if len(x) > HOMEO_LIMIT or len(y) > HOMEO_LIMIT:
        raise SpaceSizeError(f"homeomorphism search is capped at {HOMEO_LIMIT} points")
    if len(x) != len(y):
        return None
    if x.is_discrete() or y.is_discrete():
        return dict(zip(x.points, y.points)) if x.is_discrete() and y.is_discrete() else None
    px = {p: _profile(x, p) for p in x.points}
    py = {p: _profile(y, p) for p in y.points}
    if sorted(px.values()) != sorted(py.values()):
        return None
    order = sorted(x.points, key=lambda p: (px[p], key(p)))
    assign: dict = {}
    used: set = set()

    def rec(i):
        if i == len(order):
            return True
        p = order[i]
        for v in y.points:
            if v in used or py[v] != px[p]:
                continue
            if all(x.leq(q, p) == y.leq(w, v) and x.leq(p, q) == y.leq(v, w) for q, w in assign.items()):
                assign[p] = v
                used.add(v)
                if rec(i + 1):
                    return True
                del assign[p]
                used.discard(v)
        return False

    return dict(assign) if rec(0) else None


def is_homeomorphism(f: SpaceMap) -> bool:
    a = f.assignment
    if len(set(a.values())) != len(f.target) or len(f.source) != len(f.target):
        return False
    return all(f.source.leq(p, q) == f.target.leq(a[p], a[q])
               for p in f.source.points for q in f.source.points)


# -- enumeration of small spaces -------------------------------------------------

def _dedupe(spaces: Iterable[FiniteSpace]) -> list[FiniteSpace]:
    buckets: dict = {}
    for s in spaces:
        inv = tuple(sorted(_profile(s, p) for p in s.points))
        bucket = buckets.setdefault(inv, [])
        if not any(find_homeomorphism(s, t) is not None for t in bucket):
            bucket.append(s)
    return [s for b in buckets.values() for s in b]


_POSETS: dict[int, list[FiniteSpace]] = {}
_SPACES: dict[int, list[FiniteSpace]] = {}


def posets(k: int) -> list[FiniteSpace]:
    """All T0 spaces (partial orders) on ``0..k-1`` up to homeomorphism."""
    if k in _POSETS:
        return _POSETS[k]
    if k == 0:
        res = [FiniteSpace.discrete(())]
    else:
        res = []
        for smaller in posets(k - 1):
            # a new maximal point whose down-set is any open of the smaller poset
            for ideal in smaller.open_sets():
                below = dict(smaller.below)
                below[k - 1] = frozenset(ideal) | {k - 1}
                res.append(FiniteSpace(tuple(range(k)), below))
        res = _dedupe(res)
    _POSETS[k] = res
    return res


def _compositions(n: int, k: int) -> Iterator[tuple[int, ...]]:
    for cuts in itertools.combinations(range(1, n), k - 1):
        bounds = (0,) + cuts + (n,)
        yield tuple(bounds[i + 1] - bounds[i] for i in range(k))


def all_spaces(n: int) -> list[FiniteSpace]:
    """Every topology on ``n`` points up to homeomorphism, points ``0..n-1``."""
    if n in _SPACES:
        return _SPACES[n]
    if n == 0:
        _SPACES[0] = [FiniteSpace.discrete(())]
        return _SPACES[0]
    res = []
    for k in range(1, n + 1):
        for poset in posets(k):
            for sizes in _compositions(n, k):
                blocks, start = [], 0
                for sz in sizes:
                    blocks.append(list(range(start, start + sz)))
                    start += sz
                below = {}
                for c in range(k):
                    down = frozenset(p for d in poset.below[c] for p in blocks[d])
                    for p in blocks[c]:
                        below[p] = down
                res.append(FiniteSpace(tuple(range(n)), below))
    _SPACES[n] = _dedupe(res)
    return _SPACES[n]


class SpaceCategory:
    """Finite spaces as a concrete category, for simplicial spaces.

    Offers the same construction hooks as the site categories (limits of
    candidate tuples, products with discrete label sets, morphism checks), so
    the simplicial engine runs unchanged on levels that are finite spaces.
    """

    cap = None

    def make(self, elements: Iterable) -> FiniteSpace:
        return FiniteSpace.discrete(elements)

    def limit(self, factors: Sequence[FiniteSpace], candidates: Iterable[tuple]) -> FiniteSpace:
        pts = list(candidates)
        keep = set(pts)
        below = {}
        for t in pts:
            below[t] = frozenset(u for u in itertools.product(*(factors[i].below[c] for i, c in enumerate(t)))
                                 if u in keep)
        return FiniteSpace(ordered(pts), below)

    def product_with_labels(self, obj: FiniteSpace, labels: Sequence) -> FiniteSpace:
        return product(obj, FiniteSpace.discrete(labels))

    def is_morphism(self, src: FiniteSpace, tgt: FiniteSpace, mapping: Mapping) -> bool:
        if any(p not in mapping or mapping[p] not in tgt.below for p in src.points):
            return False
        return SpaceMap(src, tgt, mapping).is_continuous()

    def __repr__(self):
        return "SPACES"


SPACES = SpaceCategory()
