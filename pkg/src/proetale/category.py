"""Concrete finite categories: finite G-sets lying over a finite base set.

Every object used by the simplicial engine is a ``SiteObject``: a finite set
with a left action of a finite group and an equivariant map to a fixed base
set.  Plain finite sets are the case of the trivial group over a one-point
base (``SETS``).  Limits, coproducts and products with discrete label sets are
computed on underlying sets, which is why one representation serves both site
models as well as bare simplicial sets.

Point labels are arbitrary nested tuples of ints and strings; ``key`` gives
them a total order so that every choice made anywhere in the package (orbit
representatives, lifts, spanning trees) is deterministic.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .groups import FiniteGroup, trivial


class SizeCapError(RuntimeError):
    """A construction would exceed the configured element cap."""


@dataclass(frozen=True)
class Verdict:
    """Outcome of a structural check: truthy on success, with a reason otherwise."""

    ok: bool
    reason: str | None = None

    def __bool__(self):
        return self.ok

    @classmethod
    def fail(cls, reason: str) -> "Verdict":
        return cls(False, reason)


PASS = Verdict(True)


_KEYS: dict = {}


def key(x):
    """Total-order sort key for point labels (ints < strings < tuples)."""
    try:
        return _KEYS[x]
    except KeyError:
        pass
    if isinstance(x, tuple):
        k = (2, tuple(key(e) for e in x))
    elif isinstance(x, str):
        k = (1, x)
    elif isinstance(x, int):
        k = (0, x)
    else:
        raise TypeError(f"unsupported point label {x!r}")
    if len(_KEYS) > 1 << 20:
        _KEYS.clear()
    _KEYS[x] = k
    return k


def ordered(xs: Iterable) -> tuple:
    xs = list(xs)
    if all(type(x) is int for x in xs):
        return tuple(sorted(xs))
    return tuple(sorted(xs, key=key))


@dataclass(frozen=True, eq=False)
class SiteObject:
    group: FiniteGroup
    elements: tuple
    action: tuple  # action[g] is a dict x -> g.x
    base: Mapping  # x -> point of the base set

    def __len__(self):
        return len(self.elements)

    def __contains__(self, x):
        return x in self.base

    def __eq__(self, other):
        if not isinstance(other, SiteObject):
            return NotImplemented
        return (self.group == other.group and self.elements == other.elements
                and tuple(self.action) == tuple(other.action) and dict(self.base) == dict(other.base))

    __hash__ = None

    def act(self, g: int, x):
        return self.action[g][x]

    def orbit(self, x) -> tuple:
        return ordered({a[x] for a in self.action})

    def orbits(self) -> list[tuple]:
        seen, out = set(), []
        for x in self.elements:
            if x not in seen:
                orb = self.orbit(x)
                seen.update(orb)
                out.append(orb)
        return out

    def stabilizer(self, x) -> frozenset:
        return frozenset(g for g in self.group.elements if self.action[g][x] == x)

    def is_free(self) -> bool:
        e = self.group.identity
        return all(self.stabilizer(x) == {e} for x in (o[0] for o in self.orbits()))


class Category:
    """Finite G-sets over a finite base; the common ground of the two sites."""

    def __init__(self, group: FiniteGroup | None = None, base: Sequence[Hashable] = ((),),
                 cap: int | None = 512):
        self.group = group if group is not None else trivial()
        self.base_points = ordered(base)
        self.cap = cap

    # -- construction -----------------------------------------------------
    def check_size(self, n: int, what: str = "object") -> None:
        if self.cap is not None and n > self.cap:
            raise SizeCapError(f"{what} with {n} elements exceeds cap {self.cap}")

    def make(self, elements: Iterable, act: Callable[[int, object], object] | None = None,
             over: Callable[[object], object] | None = None) -> SiteObject:
        elems = ordered(elements)
        g = self.group
        if act is None or g.is_trivial():
            ident = {x: x for x in elems}
            action = tuple(ident for _ in g.elements)
        else:
            action = tuple({x: act(h, x) for x in elems} for h in g.elements)
        if over is None:
            if len(self.base_points) != 1:
                raise ValueError("base map required when the base has several points")
            b = self.base_points[0]
            base = {x: b for x in elems}
        else:
            base = {x: over(x) for x in elems}
        return SiteObject(g, elems, action, base)

    def terminal(self) -> SiteObject:
        return self.make(self.base_points, over=lambda b: b)

    def empty(self) -> SiteObject:
        return self.make(())

    def limit(self, factors: Sequence[SiteObject], candidates: Iterable[tuple]) -> SiteObject:
        """Subobject of the product over the base on the given candidate tuples.

        Candidates whose components lie over different base points are dropped;
        the caller is responsible for any further compatibility conditions.
        """
        kept = []
        for t in candidates:
            bs = {factors[i].base[c] for i, c in enumerate(t)}
            if len(bs) == 1:
                kept.append(t)
        return self.make(
            kept,
            act=lambda g, t: tuple(factors[i].action[g][c] for i, c in enumerate(t)),
            over=lambda t: factors[0].base[t[0]],
        )

    def product_with_labels(self, obj: SiteObject, labels: Sequence) -> SiteObject:
        """``obj x L`` for a discrete label set ``L`` (a coproduct of copies of obj)."""
        return self.make(
            ((x, l) for x in obj.elements for l in labels),
            act=lambda g, p: (obj.action[g][p[0]], p[1]),
            over=lambda p: obj.base[p[0]],
        )

    def coproduct(self, parts: Sequence[tuple[SiteObject, Callable]]) -> SiteObject:
        """Disjoint union of ``parts``; each part comes with an injective relabelling."""
        back: dict = {}
        for idx, (obj, wrap) in enumerate(parts):
            for x in obj.elements:
                y = wrap(x)
                if y in back:
                    raise ValueError(f"coproduct labels collide at {y!r}")
                back[y] = (idx, x)

        def act(g, y):
            idx, x = back[y]
            obj, wrap = parts[idx]
            return wrap(obj.action[g][x])

        def over(y):
            idx, x = back[y]
            return parts[idx][0].base[x]

        return self.make(back, act=act, over=over)

    def subobject(self, obj: SiteObject, elements: Iterable) -> SiteObject:
        sub = set(elements)
        for g in self.group.elements:
            for x in sub:
                if obj.action[g][x] not in sub:
                    raise ValueError(f"subset is not stable under the action ({x!r})")
        return self.make(sub, act=lambda g, x: obj.action[g][x], over=lambda x: obj.base[x])

    # -- morphisms --------------------------------------------------------
    def is_morphism(self, src: SiteObject, tgt: SiteObject, mapping: Mapping) -> bool:
        for x in src.elements:
            y = mapping.get(x, _MISSING)
            if y is _MISSING or y not in tgt.base:
                return False
            if src.base[x] != tgt.base[y]:
                return False
        # equivariance for a generating set implies it for the whole group
        for g in self.group.gens:
            sa, ta = src.action[g], tgt.action[g]
            for x in src.elements:
                if mapping[sa[x]] != ta[mapping[x]]:
                    return False
        return True

    def hom(self, src: SiteObject, tgt: SiteObject) -> list[dict]:
        """All morphisms ``src -> tgt`` (orbit representatives determine them)."""
        reps = [o[0] for o in src.orbits()]
        choices = []
        for r in reps:
            stab = src.stabilizer(r)
            choices.append([y for y in tgt.elements
                            if tgt.base[y] == src.base[r] and stab <= tgt.stabilizer(y)])
        out = []

        def rec(i, acc):
            if i == len(reps):
                out.append(dict(acc))
                return
            r = reps[i]
            for y in choices[i]:
                for g in self.group.elements:
                    acc[src.action[g][r]] = tgt.action[g][y]
                rec(i + 1, acc)

        rec(0, {})
        return out

    def __repr__(self):
        return f"{type(self).__name__}(|G|={self.group.order}, base={list(self.base_points)})"


_MISSING = object()

SETS = Category(cap=None)
