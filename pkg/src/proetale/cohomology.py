"""Cohomology of the homotopy type with constant coefficients.

For a split wc hypercovering ``W`` and a coefficient group ``A`` the cochain
complex is ``C^n = A^{pi(W_n)}`` with ``d = sum_j (-1)^j (d_j)^*``.  Integer
cohomology comes from elementary divisors; ``Z/n`` coefficients follow from
the universal coefficient sequence ``H^p(Z) (x) Z/n + Tor(H^{p+1}(Z), Z/n)``.

The group cohomology oracle is separate: it builds the normalized bar chain
complex of ``G`` directly from the multiplication table, takes integral
homology and applies ``Hom(H_p, A) + Ext(H_{p-1}, A)``.
"""
from __future__ import annotations

import functools
import itertools
import math
import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .category import SizeCapError, Verdict, PASS, ordered
from .groups import FiniteGroup
from .linalg import (AbelianGroup, determinant, direct_sum, elementary_divisors, ext_cyclic, hom_cyclic, kernel_lattice,
                     smith_normal_form, subquotient, tensor_cyclic, tor_cyclic)
from .simplicial import SimpMap, TruncSimp

ORACLE_CAP = 20000


@dataclass(frozen=True)
class Coefficients:
    """``Z`` when ``modulus == 0``, otherwise ``Z/modulus`` (``Z/1`` is the zero group)."""

    modulus: int

    @classmethod
    def parse(cls, text: str) -> "Coefficients":
        t = text.strip().replace(" ", "")
        if t in ("Z", "ZZ"):
            return cls(0)
        if t == "0":
            return cls(1)
        m = re.fullmatch(r"Z/(\d+)", t) or re.fullmatch(r"(\d+)", t)
        if not m or int(m.group(1)) < 1:
            raise ValueError(f"unrecognised coefficient group {text!r}")
        return cls(int(m.group(1)))

    def group(self) -> AbelianGroup:
        return AbelianGroup(1) if self.modulus == 0 else AbelianGroup.from_cyclic(0, [self.modulus])

    def __str__(self):
        return "Z" if self.modulus == 0 else "0" if self.modulus == 1 else f"Z/{self.modulus}"


@dataclass(frozen=True)
class PiSheaf:
    """``F(X) = A^{pi(X)}``: a sheaf whose value depends only on components."""

    coefficients: Coefficients

    def basis(self, site, obj) -> tuple:
        _, proj = site.components(obj)
        return ordered(set(proj.values()))

    def restriction(self, site, src, tgt, f: Mapping) -> list[list[int]]:
        """Matrix of ``F(tgt) -> F(src)``: rows indexed by ``basis(src)``."""
        _, ps = site.components(src)
        _, pt = site.components(tgt)
        rows, cols = self.basis(site, src), self.basis(site, tgt)
        cidx = {c: i for i, c in enumerate(cols)}
        image = {ps[x]: pt[f[x]] for x in src.elements}
        return [[int(cidx[image[r]] == j) for j in range(len(cols))] for r in rows]


@dataclass(frozen=True)
class ElementwiseSheaf(PiSheaf):
    """``A^X`` on elements; not a pi-sheaf (used to exercise the check)."""

    def basis(self, site, obj) -> tuple:
        return tuple(obj.elements)

    def restriction(self, site, src, tgt, f: Mapping) -> list[list[int]]:
        cols = {c: i for i, c in enumerate(tgt.elements)}
        return [[int(cols[f[x]] == j) for j in range(len(cols))] for x in src.elements]


def pi_sheaf_check(site, sheaf: PiSheaf, src, tgt, f: Mapping) -> Verdict:
    """For ``f`` bijective on components, ``F(tgt) -> F(src)`` must be invertible."""
    cmap = site.component_map(src, tgt, f)
    if len(set(cmap.assignment.values())) != len(cmap.assignment) or not cmap.is_surjective():
        return Verdict.fail("component map is not bijective")
    m = sheaf.restriction(site, src, tgt, f)
    if len(m) != (len(m[0]) if m else 0):
        return Verdict.fail("restriction is not square")
    det = determinant(m)
    n = sheaf.coefficients.modulus
    unit = abs(det) == 1 if n == 0 else math.gcd(det, n) == 1
    return PASS if unit else Verdict.fail("restriction is not invertible")


# -- cochain complexes ------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CochainComplex:
    """Free cochain complex: ``ranks[n]`` generators in degree ``n`` and sparse
    differentials ``d[n]: C^n -> C^{n+1}`` (one dict per row of ``C^{n+1}``)."""

    coefficients: Coefficients
    ranks: tuple
    d: tuple
    bases: tuple = field(default=(), repr=False)
    # elementary divisors of each d^n; shared by complexes differing only in coefficients
    divisors: dict = field(default_factory=dict, repr=False)

    def with_coefficients(self, coefficients: Coefficients) -> "CochainComplex":
        """Same complex over another constant coefficient group (same integer matrices)."""
        return CochainComplex(coefficients, self.ranks, self.d, self.bases, self.divisors)

    @property
    def top(self) -> int:
        return len(self.ranks) - 1

    def check(self) -> Verdict:
        for n in range(len(self.d) - 1):
            if not _composes_to_zero(self.d[n + 1], self.d[n]):
                return Verdict.fail(f"d^{n + 1} d^{n} != 0")
        return PASS


def _composes_to_zero(outer: Sequence[dict], inner: Sequence[dict]) -> bool:
    for row in outer:
        acc: dict = {}
        for k, v in row.items():
            for c, w in inner[k].items():
                acc[c] = acc.get(c, 0) + v * w
        if any(acc.values()):
            return False
    return True


def cochain_complex(site, w: TruncSimp, sheaf: PiSheaf | Coefficients, p_max: int) -> CochainComplex:
    if isinstance(sheaf, Coefficients):
        sheaf = PiSheaf(sheaf)
    if w.dim < p_max + 1:
        raise ValueError(f"degree {p_max} needs the hypercovering through dimension {p_max + 1}, got {w.dim}")
    bases, projs = [], []
    for n in range(p_max + 2):
        _, proj = site.components(w.levels[n])
        projs.append(proj)
        bases.append(ordered(set(proj.values())))
    return _complex_from_faces(sheaf.coefficients, bases,
                               lambda n, j, x: projs[n - 1][w.faces[n][j][x]])


def complex_of_simplicial_set(x: TruncSimp, coeffs: Coefficients, p_max: int) -> CochainComplex:
    """Cochains ``A^{X_n}`` of a simplicial set (or discrete simplicial space)."""
    if x.dim < p_max + 1:
        raise ValueError(f"degree {p_max} needs dimension {p_max + 1}, got {x.dim}")
    bases = [ordered(x.elements(n)) for n in range(p_max + 2)]
    return _complex_from_faces(coeffs, bases, lambda n, j, e: x.faces[n][j][e])


def _complex_from_faces(coeffs: Coefficients, bases, face) -> CochainComplex:
    index = [{b: i for i, b in enumerate(bs)} for bs in bases]
    ds = []
    for n in range(len(bases) - 1):
        rows = []
        for x in bases[n + 1]:
            row: dict = {}
            for j in range(n + 2):
                c = index[n][face(n + 1, j, x)]
                row[c] = row.get(c, 0) + (-1) ** j
            rows.append({c: v for c, v in row.items() if v})
        ds.append(tuple(rows))
    cx = CochainComplex(coeffs, tuple(len(b) for b in bases), tuple(ds), tuple(bases))
    v = cx.check()
    if not v:
        raise AssertionError(v.reason)
    return cx


@dataclass(frozen=True)
class CohomologyGroup:
    degree: int
    group: AbelianGroup

    @property
    def free_rank(self) -> int:
        return self.group.free_rank

    @property
    def invariant_factors(self) -> tuple:
        return self.group.torsion

    def __str__(self):
        return str(self.group)

    def to_json(self) -> dict:
        return {"p": self.degree, "invariant_factors": list(self.group.torsion), "free_rank": self.group.free_rank}


def _integral(cx: CochainComplex, p: int, divisors: dict) -> AbelianGroup:
    """``H^p`` with integer coefficients."""
    def divs(n):
        if n < 0 or n >= len(cx.d):
            return ()
        if n not in divisors:
            divisors[n] = elementary_divisors(cx.d[n], cx.ranks[n])
        return divisors[n]

    rank_out = len(divs(p))
    before = divs(p - 1)
    free = cx.ranks[p] - rank_out - len(before)
    return AbelianGroup.from_cyclic(free, [t for t in before if t > 1])


def cohomology(cx: CochainComplex, p: int) -> CohomologyGroup:
    if p < 0 or p > len(cx.d) - 1:
        raise ValueError(f"degree {p} out of range 0..{len(cx.d) - 1}")
    cache = cx.divisors
    hp = _integral(cx, p, cache)
    n = cx.coefficients.modulus
    if n == 0:
        return CohomologyGroup(p, hp)
    if p + 1 < len(cx.d):
        hq = _integral(cx, p + 1, cache)
        tor = tor_cyclic(hq, n)
    else:
        # torsion of H^{p+1}(Z) is read off the divisors of d^p
        if p not in cache:
            cache[p] = elementary_divisors(cx.d[p], cx.ranks[p])
        divs = cache[p]
        tor = tor_cyclic(AbelianGroup.from_cyclic(0, [t for t in divs if t > 1]), n)
    return CohomologyGroup(p, direct_sum(tensor_cyclic(hp, n), tor))


def cohomology_table(cx: CochainComplex, p_max: int) -> list[CohomologyGroup]:
    return [cohomology(cx, p) for p in range(p_max + 1)]


# -- independent oracle --------------------------------------------------------------

def _normalized_bar(g: FiniteGroup, k: int) -> list[tuple]:
    e = g.identity
    return [t for t in itertools.product(g.elements, repeat=k) if e not in t]


def _bar_boundary(g: FiniteGroup, k: int, cells: dict) -> list[dict]:
    """``d(g_1..g_k) = (g_2..g_k) + sum (-1)^i (..g_i g_{i+1}..) + (-1)^k (g_1..g_{k-1})``
    in the normalized complex (columns: ``C_k``, rows: ``C_{k-1}``)."""
    e = g.identity
    lower = cells[k - 1]
    rows = [dict() for _ in lower]
    for col, t in enumerate(cells[k]):
        terms = [(t[1:], 1)]
        for i in range(1, k):
            terms.append((t[:i - 1] + (g.m(t[i - 1], t[i]),) + t[i + 1:], (-1) ** i))
        terms.append((t[:-1], (-1) ** k))
        for face, sign in terms:
            if e in face:
                continue
            r = lower[face]
            rows[r][col] = rows[r].get(col, 0) + sign
    return [{c: v for c, v in r.items() if v} for r in rows]


def group_cohomology_oracle(g: FiniteGroup, coeffs: Coefficients, p: int, cap: int = ORACLE_CAP) -> CohomologyGroup:
    """``H^p(G, A)`` for trivial action from the normalized bar complex."""
    if g.order ** (p + 1) > cap:
        raise SizeCapError(f"|G|^{p + 1} = {g.order ** (p + 1)} exceeds oracle cap {cap}")
    hp = _bar_homology(g, p)
    hq = _bar_homology(g, p - 1) if p >= 1 else AbelianGroup()
    n = coeffs.modulus
    return CohomologyGroup(p, direct_sum(hom_cyclic(hp, n), ext_cyclic(hq, n)))


@functools.lru_cache(maxsize=64)
def _bar_cells(g: FiniteGroup, k: int) -> dict:
    return {t: i for i, t in enumerate(_normalized_bar(g, k))}


@functools.lru_cache(maxsize=64)
def _bar_divisors(g: FiniteGroup, k: int) -> tuple:
    """Elementary divisors of ``d_k : C_k -> C_{k-1}``."""
    if k < 1:
        return ()
    cells = {k - 1: _bar_cells(g, k - 1), k: _bar_cells(g, k)}
    return elementary_divisors(_bar_boundary(g, k, cells), len(cells[k]))


def _bar_homology(g: FiniteGroup, k: int) -> AbelianGroup:
    dk, dk1 = _bar_divisors(g, k), _bar_divisors(g, k + 1)
    free = len(_bar_cells(g, k)) - len(dk) - len(dk1)
    return AbelianGroup.from_cyclic(free, [t for t in dk1 if t > 1])


# -- colimits over Galois systems ---------------------------------------------------

@dataclass(frozen=True)
class VerdierReport:
    degree: int
    colimit: CohomologyGroup
    stages: Mapping  # index -> CohomologyGroup
    transitions: Mapping  # (i, j) -> matrix H(j) -> H(i) in cyclic coordinates
    injective: Mapping
    stabilized: bool

    def to_json(self) -> dict:
        return {
            "p": self.degree,
            "colimit": self.colimit.to_json(),
            "stages": {str(k): v.to_json() for k, v in self.stages.items()},
            "transitions": {f"{i}->{j}": m for (i, j), m in self.transitions.items()},
            "stabilized": self.stabilized,
        }


def _class_space(cx: CochainComplex, p: int):
    """Cohomology in degree ``p`` with explicit coordinates (dense; small inputs)."""
    n = cx.coefficients.modulus
    a = cx.ranks[p]
    dense_out = [[row.get(c, 0) for c in range(a)] for row in cx.d[p]] if p < len(cx.d) else []
    z = kernel_lattice(dense_out, a, n)
    b_cols = []
    if p >= 1:
        prev = cx.d[p - 1]
        b_cols = [[prev[r].get(c, 0) for c in range(cx.ranks[p - 1])] for r in range(a)]
    if n:
        b_cols = [row + [n if i == k else 0 for k in range(a)] for i, row in enumerate(b_cols or [[] for _ in range(a)])]
    return subquotient(z, b_cols, a)


def verdier_colimit(system, coeffs: Coefficients, p: int, d: int | None = None) -> VerdierReport:
    """Colimit of ``H^p(B G_i, A)`` along inflation maps.

    The index poset is finite and codirected, so the colimit is the value at
    its least element; transition matrices are computed by pulling cocycles
    back along the simplicial maps ``B G_i -> B G_j``.
    """
    from .homotopy_type import pro_homotopy_type, underlying
    ht = pro_homotopy_type(system, d if d is not None else p + 1)
    dg = ht.diagram
    spaces, stages = {}, {}
    for i in dg.index:
        x = underlying(dg.values[i])
        cx = complex_of_simplicial_set(x, coeffs, p)
        spaces[i] = (cx, _class_space(cx, p))
        stages[i] = CohomologyGroup(p, spaces[i][1].group)
    transitions, injective = {}, {}
    for (i, j), t in dg.transitions.items():
        if i == j:
            continue
        cx_i, h_i = spaces[i]
        cx_j, h_j = spaces[j]
        idx_j = {b: k for k, b in enumerate(cx_j.bases[p])}
        cols = []
        for k in range(len(h_j.moduli)):
            rep = h_j.representative(k)
            pulled = [rep[idx_j[t.maps[p][s]]] for s in cx_i.bases[p]]
            cols.append(list(h_i.coordinates(pulled)))
        matrix = [[cols[k][r] for k in range(len(cols))] for r in range(len(h_i.moduli))]
        transitions[(i, j)] = matrix
        injective[(i, j)] = _is_injective(matrix, h_j.moduli, h_i.moduli)
    least = dg.minimum()
    stabilized = True
    preds = [j for j in dg.index if j != least and (least, j) in dg.leq
             and not any(k not in (least, j) and (least, k) in dg.leq and (k, j) in dg.leq for k in dg.index)]
    for j in preds:
        iso = stages[least].group == stages[j].group and injective[(least, j)]
        stabilized = stabilized and iso
    return VerdierReport(p, stages[least], stages, transitions, injective, stabilized)


def _is_injective(matrix, src_moduli, tgt_moduli) -> bool:
    """Injectivity of a map between small finitely generated abelian groups
    (modulus 0 is a copy of ``Z``).  Torsion cannot reach the free part, so the
    map is injective iff the free-to-free block has full column rank and the
    torsion part is injective (checked by brute force)."""
    free_src = [k for k, m in enumerate(src_moduli) if m == 0]
    free_tgt = [r for r, m in enumerate(tgt_moduli) if m == 0]
    block = [[matrix[r][k] for k in free_src] for r in free_tgt]
    if free_src and (not free_tgt or smith_normal_form(block, len(free_src)).rank < len(free_src)):
        return False
    tors = [k for k, m in enumerate(src_moduli) if m]
    for v in itertools.product(*(range(src_moduli[k]) for k in tors)):
        if not any(v):
            continue
        img = [sum(matrix[r][k] * x for k, x in zip(tors, v)) for r in range(len(tgt_moduli))]
        if all((x % m if m else x) == 0 for x, m in zip(img, tgt_moduli)):
            return False
    return True
