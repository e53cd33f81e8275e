"""Finite groups given by multiplication tables.

Elements are the integers ``0 .. order-1``.  Tables are validated on
construction (closure, associativity, identity, inverses), so every
``FiniteGroup`` in circulation is a genuine group.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence


class GroupTableError(ValueError):
    """Raised for a multiplication table that does not define a group.

    ``row`` and ``col`` locate the offending entry when there is one.
    """

    def __init__(self, message: str, row: int | None = None, col: int | None = None):
        super().__init__(message)
        self.row = row
        self.col = col


@dataclass(frozen=True)
class FiniteGroup:
    mul: tuple[tuple[int, ...], ...]
    name: str = field(default="", compare=False)
    # tables produced by a permutation representation are groups by construction
    checked: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        if self.checked:
            _validate_table(self.mul)

    @property
    def order(self) -> int:
        return len(self.mul)

    @property
    def elements(self) -> range:
        return range(len(self.mul))

    @cached_property
    def identity(self) -> int:
        return _identity(self.mul)

    def m(self, a: int, b: int) -> int:
        return self.mul[a][b]

    def inv(self, a: int) -> int:
        e = self.identity
        row = self.mul[a]
        return row.index(e)

    def element_order(self, a: int) -> int:
        e, x, k = self.identity, a, 1
        while x != e:
            x = self.mul[x][a]
            k += 1
        return k

    def is_trivial(self) -> bool:
        return self.order == 1

    def generators(self) -> list[int]:
        """A small generating set, chosen greedily in element order."""
        gens: list[int] = []
        span = {self.identity}
        for a in self.elements:
            if a not in span:
                gens.append(a)
                span = self.closure(gens)
        return gens

    @cached_property
    def gens(self) -> tuple:
        return tuple(self.generators())

    def closure(self, gens: Sequence[int]) -> set[int]:
        seen = {self.identity}
        frontier = [self.identity]
        while frontier:
            x = frontier.pop()
            for g in gens:
                y = self.mul[x][g]
                if y not in seen:
                    seen.add(y)
                    frontier.append(y)
        return seen

    def to_json(self) -> dict:
        return {"order": self.order, "mul": [list(r) for r in self.mul]}

    @classmethod
    def from_json(cls, data: dict) -> "FiniteGroup":
        try:
            mul = data["mul"]
        except (KeyError, TypeError):
            raise GroupTableError("group JSON needs a 'mul' table") from None
        if "order" in data and data["order"] != len(mul):
            raise GroupTableError(f"declared order {data['order']} but table has {len(mul)} rows")
        return cls(tuple(tuple(int(v) for v in row) for row in mul), name=data.get("name", ""))


def _identity(mul) -> int:
    n = len(mul)
    for e in range(n):
        if all(mul[e][x] == x and mul[x][e] == x for x in range(n)):
            return e
    raise GroupTableError("no identity element")


def _validate_table(mul) -> None:
    n = len(mul)
    if n == 0:
        raise GroupTableError("empty table")
    for i, row in enumerate(mul):
        if len(row) != n:
            raise GroupTableError(f"row {i} has length {len(row)}, expected {n}", row=i)
        for j, v in enumerate(row):
            if not isinstance(v, int) or not 0 <= v < n:
                raise GroupTableError(f"entry ({i},{j}) = {v!r} out of range", row=i, col=j)
        if len(set(row)) != n:
            raise GroupTableError(f"row {i} is not a permutation", row=i)
    for j in range(n):
        if len({mul[i][j] for i in range(n)}) != n:
            raise GroupTableError(f"column {j} is not a permutation", col=j)
    _identity(mul)
    for a, b, c in itertools.product(range(n), repeat=3):
        if mul[mul[a][b]][c] != mul[a][mul[b][c]]:
            raise GroupTableError(f"associativity fails at ({a},{b},{c})", row=a, col=b)


def from_function(elements: Sequence, op, name: str = "") -> FiniteGroup:
    """Build a group from a list of elements and a binary operation on them."""
    index = {x: i for i, x in enumerate(elements)}
    mul = tuple(tuple(index[op(a, b)] for b in elements) for a in elements)
    return FiniteGroup(mul, name=name)


def cyclic(n: int) -> FiniteGroup:
    return from_function(list(range(n)), lambda a, b: (a + b) % n, name=f"Z/{n}")


def trivial() -> FiniteGroup:
    return cyclic(1)


def symmetric(k: int) -> FiniteGroup:
    perms = sorted(itertools.permutations(range(k)))
    return from_function(perms, lambda a, b: tuple(a[b[i]] for i in range(k)), name=f"S{k}")


def direct_product(g: FiniteGroup, h: FiniteGroup) -> FiniteGroup:
    pairs = [(a, b) for a in g.elements for b in h.elements]
    return from_function(pairs, lambda x, y: (g.m(x[0], y[0]), h.m(x[1], y[1])),
                         name=f"{g.name}x{h.name}")


def is_homomorphism(src: FiniteGroup, tgt: FiniteGroup, phi: Sequence[int]) -> bool:
    return all(phi[src.m(a, b)] == tgt.m(phi[a], phi[b])
               for a in src.elements for b in src.elements)


def find_isomorphism(g: FiniteGroup, h: FiniteGroup) -> list[int] | None:
    """Search for an isomorphism ``g -> h``; returns the element map or None.

    Generators of ``g`` are sent to elements of matching order and the
    assignment is extended along words; backtracking over the generator
    images only.
    """
    if g.order != h.order:
        return None
    gens = g.generators()
    # word for every element of g as a path from the identity
    parent: dict[int, tuple[int, int]] = {}
    order_seen = [g.identity]
    seen = {g.identity}
    for x in order_seen:
        for k, s in enumerate(gens):
            y = g.m(x, s)
            if y not in seen:
                seen.add(y)
                parent[y] = (x, k)
                order_seen.append(y)

    candidates = [[b for b in h.elements if h.element_order(b) == g.element_order(a)] for a in gens]
    for images in itertools.product(*candidates):
        phi = [-1] * g.order
        phi[g.identity] = h.identity
        for y in order_seen[1:]:
            x, k = parent[y]
            phi[y] = h.m(phi[x], images[k])
        if len(set(phi)) == g.order and is_homomorphism(g, h, phi):
            return phi
    return None
