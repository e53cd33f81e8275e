"""Exact integer linear algebra: Smith normal form and finite abelian groups.

Matrices are lists of rows of Python ints (arbitrary precision).  Sparse
matrices are lists of ``{column: value}`` dicts.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

Matrix = list  # list[list[int]]


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if not a:
        return []
    cols = len(b[0]) if b else 0
    bt = list(zip(*b)) if b else [()] * cols
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def transpose(a: Matrix, ncols: int | None = None) -> Matrix:
    if not a:
        return [[] for _ in range(ncols or 0)]
    return [list(c) for c in zip(*a)]


class SNFError(AssertionError):
    pass


@dataclass(frozen=True)
class SmithForm:
    diagonal: tuple  # nonzero diagonal entries d_1 | d_2 | ...
    p: Matrix  # unimodular, rows x rows
    q: Matrix  # unimodular, cols x cols
    shape: tuple

    @property
    def rank(self) -> int:
        return len(self.diagonal)


def smith_normal_form(m: Matrix, ncols: int | None = None, check: bool = True) -> SmithForm:
    """``P M Q = S`` with ``S`` diagonal in divisibility order; verified on return.

    The inverses of ``P`` and ``Q`` are accumulated alongside, so the check
    certifies unimodularity by multiplying out rather than by determinants.
    """
    rows = len(m)
    cols = len(m[0]) if m else (ncols or 0)
    a = [list(r) for r in m]
    p, p_inv = identity(rows), identity(rows)
    q, q_inv = identity(cols), identity(cols)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        p[i], p[j] = p[j], p[i]
        for r in p_inv:
            r[i], r[j] = r[j], r[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in q:
            r[i], r[j] = r[j], r[i]
        q_inv[i], q_inv[j] = q_inv[j], q_inv[i]

    def add_row(dst, src, k):  # row_dst += k row_src
        if k:
            for mat, n in ((a, cols), (p, rows)):
                rd, rs = mat[dst], mat[src]
                for c in range(n):
                    if rs[c]:
                        rd[c] += k * rs[c]
            for r in p_inv:  # col_src -= k col_dst
                if r[dst]:
                    r[src] -= k * r[dst]

    def add_col(dst, src, k):  # col_dst += k col_src
        if k:
            for mat in (a, q):
                for r in mat:
                    if r[src]:
                        r[dst] += k * r[src]
            rs, rd = q_inv[src], q_inv[dst]  # row_src -= k row_dst
            for c in range(cols):
                if rd[c]:
                    rs[c] -= k * rd[c]

    t = 0
    while t < min(rows, cols):
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                v = a[i][j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            piv = a[t][t]
            redo = False
            for i in range(t + 1, rows):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // piv))
                    if a[i][t]:
                        swap_rows(t, i)
                        redo = True
                        break
            if redo:
                continue
            for j in range(t + 1, cols):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // piv))
                    if a[t][j]:
                        swap_cols(t, j)
                        redo = True
                        break
            if redo:
                continue
            bad = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols) if a[i][j] % piv), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if a[t][t] < 0:
            a[t] = [-v for v in a[t]]
            p[t] = [-v for v in p[t]]
            for r in p_inv:
                r[t] = -r[t]
        t += 1
    diag = tuple(a[i][i] for i in range(min(rows, cols)) if a[i][i])
    form = SmithForm(diag, p, q, (rows, cols))
    if check:
        verify_smith(m, form, p_inv, q_inv)
    return form


def verify_smith(m: Matrix, form: SmithForm, p_inv: Matrix | None = None,
                 q_inv: Matrix | None = None) -> None:
    """Check ``P M Q = S``, the divisibility chain, and that P and Q are unimodular.

    With integer inverses supplied, unimodularity is ``P P^-1 = I``; otherwise
    it falls back to determinants.
    """
    rows, cols = form.shape
    s = [[0] * cols for _ in range(rows)]
    for i, d in enumerate(form.diagonal):
        s[i][i] = d
    if rows and cols and matmul(matmul(form.p, m), form.q) != s:
        raise SNFError("P M Q != S")
    for a, b in zip(form.diagonal, form.diagonal[1:]):
        if b % a:
            raise SNFError("diagonal is not a divisibility chain")
    for t, t_inv in ((form.p, p_inv), (form.q, q_inv)):
        if t_inv is None:
            ok = abs(determinant(t)) == 1
        else:
            ok = matmul(t, t_inv) == identity(len(t))
        if not ok:
            raise SNFError("transform is not unimodular")


def determinant(m: Matrix) -> int:
    """Bareiss fraction-free elimination."""
    n = len(m)
    if n == 0:
        return 1
    a = [list(r) for r in m]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            sw = next((i for i in range(k + 1, n) if a[i][k]), None)
            if sw is None:
                return 0
            a[k], a[sw] = a[sw], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


# -- sparse elimination -------------------------------------------------------------------

def _sparse_copy(rows: Sequence[dict]) -> list[dict]:
    return [{c: v for c, v in r.items() if v} for r in rows]


def elementary_divisors(rows: Sequence[dict], ncols: int, check: bool = True) -> tuple[int, ...]:
    """Nonzero elementary divisors of a sparse integer matrix.

    Unit pivots are eliminated sparsely first (these contribute divisors 1);
    the remaining block goes through the dense Smith form, which verifies
    itself.  The combined answer is cross-checked against ranks modulo a
    few primes: the rank mod ``p`` must count the divisors prime to ``p``.
    """
    a = _sparse_copy(rows)
    col_index: dict = {}
    for i, r in enumerate(a):
        for c in r:
            col_index.setdefault(c, set()).add(i)
    alive = set(i for i, r in enumerate(a) if r)
    units = 0
    progress = True
    while progress:
        progress = False
        # pivot on a unit entry in a shortest row
        for i in sorted(alive, key=lambda i: len(a[i])):
            r = a[i]
            c = next((c for c, v in r.items() if v in (1, -1)), None)
            if c is None:
                continue
            pv = r[c]
            for k in list(col_index.get(c, ())):
                if k == i:
                    continue
                rk = a[k]
                f = rk[c] * pv  # pv = +-1 so rk -= f * pv * r
                for cc, vv in r.items():
                    nv = rk.get(cc, 0) - f * vv
                    if nv:
                        if cc not in rk:
                            col_index.setdefault(cc, set()).add(k)
                        rk[cc] = nv
                    else:
                        if cc in rk:
                            del rk[cc]
                            col_index[cc].discard(k)
                if not rk:
                    alive.discard(k)
            for cc in r:
                col_index[cc].discard(i)
            # the pivot column is now zero outside row i; drop row i and the column
            a[i] = {}
            alive.discard(i)
            units += 1
            progress = True
            break
    rest_rows = sorted(alive)
    rest_cols = sorted({c for i in rest_rows for c in a[i]})
    if rest_rows:
        pos = {c: k for k, c in enumerate(rest_cols)}
        dense = [[0] * len(rest_cols) for _ in rest_rows]
        for k, i in enumerate(rest_rows):
            for c, v in a[i].items():
                dense[k][pos[c]] = v
        tail = smith_normal_form(dense, check=check).diagonal
    else:
        tail = ()
    divisors = tuple([1] * units) + tail
    divisors = tuple(sorted(divisors))
    if check:
        _modular_check(rows, ncols, divisors)
    return divisors


def _modular_check(rows: Sequence[dict], ncols: int, divisors: Sequence[int]) -> None:
    primes = {2, 3, 1000003}
    for d in divisors:
        primes.update(prime_factors(d))
    for p in sorted(primes):
        expected = sum(1 for d in divisors if d % p)
        got = rank_mod_p(rows, p)
        if got != expected:
            raise SNFError(f"rank mod {p} is {got}, divisors predict {expected}")


def rank_mod_p(rows: Sequence[dict], p: int) -> int:
    pivots: dict = {}  # column -> reduced row with leading entry 1 at that column
    rank = 0
    for r in rows:
        v = {c: x % p for c, x in r.items() if x % p}
        while v:
            c = min(v)
            if c in pivots:
                f = v[c]
                for cc, x in pivots[c].items():
                    nx = (v.get(cc, 0) - f * x) % p
                    if nx:
                        v[cc] = nx
                    else:
                        v.pop(cc, None)
            else:
                inv = pow(v[c], -1, p)
                pivots[c] = {cc: x * inv % p for cc, x in v.items()}
                rank += 1
                break
    return rank


def prime_factors(n: int) -> set[int]:
    out, k = set(), 2
    n = abs(n)
    while k * k <= n:
        while n % k == 0:
            out.add(k)
            n //= k
        k += 1
    if n > 1:
        out.add(n)
    return out


# -- finite abelian groups --------------------------------------------------------------

def invariant_factors(orders: Sequence[int]) -> tuple[int, ...]:
    """Canonical divisibility chain for ``sum Z/orders``; trivial factors dropped."""
    prime_powers: dict = {}
    for n in orders:
        if n == 0:
            raise ValueError("free summands are tracked separately")
        for p in prime_factors(n):
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            prime_powers.setdefault(p, []).append(p ** e)
    length = max((len(v) for v in prime_powers.values()), default=0)
    chain = [1] * length
    for p, pw in prime_powers.items():
        pw.sort(reverse=True)
        for i, q in enumerate(pw):
            chain[length - 1 - i] *= q
    return tuple(c for c in chain if c > 1)


@dataclass(frozen=True)
class AbelianGroup:
    """``Z^free_rank + sum Z/t`` with ``torsion`` a divisibility chain."""

    free_rank: int = 0
    torsion: tuple = ()

    @classmethod
    def from_cyclic(cls, free_rank: int, orders: Sequence[int]) -> "AbelianGroup":
        return cls(free_rank, invariant_factors([o for o in orders if o != 1]))

    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def order(self) -> int | None:
        return None if self.free_rank else math.prod(self.torsion)

    def __str__(self):
        parts = (["Z"] if self.free_rank == 1 else [f"Z^{self.free_rank}"] if self.free_rank else [])
        parts += [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank, "invariant_factors": list(self.torsion)}


def tensor_cyclic(g: AbelianGroup, n: int) -> AbelianGroup:
    """``g (x) Z/n`` (``n = 0`` means ``Z``)."""
    if n == 0:
        return g
    return AbelianGroup.from_cyclic(0, [n] * g.free_rank + [math.gcd(t, n) for t in g.torsion])


def tor_cyclic(g: AbelianGroup, n: int) -> AbelianGroup:
    if n == 0:
        return AbelianGroup()
    return AbelianGroup.from_cyclic(0, [math.gcd(t, n) for t in g.torsion])


def hom_cyclic(g: AbelianGroup, n: int) -> AbelianGroup:
    """``Hom(g, Z/n)``; ``Hom(g, Z)`` when ``n = 0``."""
    if n == 0:
        return AbelianGroup(g.free_rank)
    return AbelianGroup.from_cyclic(0, [n] * g.free_rank + [math.gcd(t, n) for t in g.torsion])


def ext_cyclic(g: AbelianGroup, n: int) -> AbelianGroup:
    """``Ext(g, Z/n)``; ``Ext(g, Z)`` is the torsion of ``g`` when ``n = 0``."""
    if n == 0:
        return AbelianGroup.from_cyclic(0, g.torsion)
    return AbelianGroup.from_cyclic(0, [math.gcd(t, n) for t in g.torsion])


def direct_sum(a: AbelianGroup, b: AbelianGroup) -> AbelianGroup:
    return AbelianGroup.from_cyclic(a.free_rank + b.free_rank, list(a.torsion) + list(b.torsion))


# -- subquotients with coordinates -----------------------------------------------------

@dataclass(frozen=True)
class Subquotient:
    """``H = Z / B`` for lattices ``B <= Z <= Z^a``, with a coordinate map.

    ``basis`` spans ``Z`` (columns ``z_i``); ``moduli`` are the orders of the
    cyclic factors of ``H`` in diagonal coordinates (``0`` for free factors).
    """

    basis: Matrix  # a x r, columns z_i
    inv_p: Matrix  # P of the Smith form of the Z generators
    scales: tuple  # s_i with z_i = s_i * (P^-1)_i
    change: Matrix  # P2 of the relation Smith form
    moduli: tuple  # one entry per row of ``change`` that survives
    keep: tuple  # indices of surviving coordinates
    change_inv: Matrix

    @property
    def group(self) -> AbelianGroup:
        return AbelianGroup.from_cyclic(sum(1 for m in self.moduli if m == 0), [m for m in self.moduli if m])

    def coordinates(self, v: Sequence[int]) -> tuple:
        """Coordinates of a vector of ``Z`` in the cyclic decomposition of ``H``."""
        pv = [sum(x * y for x, y in zip(row, v)) for row in self.inv_p]
        c = []
        for i, s in enumerate(self.scales):
            if pv[i] % s:
                raise ValueError("vector is not in the lattice Z")
            c.append(pv[i] // s)
        for i in range(len(self.scales), len(pv)):
            if pv[i]:
                raise ValueError("vector is not in the lattice Z")
        d = [sum(x * y for x, y in zip(row, c)) for row in self.change]
        return tuple(d[k] % m if m else d[k] for k, m in zip(self.keep, self.moduli))

    def representative(self, k: int) -> list[int]:
        """A vector of ``Z`` representing the ``k``-th generator."""
        idx = self.keep[k]
        c = [row[idx] for row in self.change_inv]
        return [sum(self.basis[r][i] * c[i] for i in range(len(c))) for r in range(len(self.basis))]


def kernel_lattice(d: Matrix, a: int, modulus: int) -> Matrix:
    """Columns spanning ``{x in Z^a : d x = 0 (mod modulus)}`` (``modulus = 0``: exact)."""
    b = len(d)
    aug = [list(row) + ([modulus if i == k else 0 for k in range(b)] if modulus else []) for i, row in enumerate(d)]
    width = a + (b if modulus else 0)
    if b == 0:
        return identity(a)
    form = smith_normal_form(aug, width)
    r = form.rank
    gens = [[form.q[i][j] for j in range(r, width)] for i in range(a)]
    return gens


def subquotient(z_gens: Matrix, b_gens: Matrix, a: int) -> Subquotient:
    """``span(z_gens) / span(b_gens)``; both given as ``a x k`` column matrices."""
    kz = len(z_gens[0]) if z_gens and z_gens[0] else 0
    if kz == 0:
        return Subquotient([[] for _ in range(a)], [], (), [], (), (), [])
    fz = smith_normal_form(z_gens, kz)
    r = fz.rank
    pinv = _inverse_unimodular(fz.p)
    basis = [[pinv[i][k] * fz.diagonal[k] for k in range(r)] for i in range(a)]
    kb = len(b_gens[0]) if b_gens and b_gens[0] else 0
    rel = [[0] * kb for _ in range(r)]
    for j in range(kb):
        v = [b_gens[i][j] for i in range(a)]
        pv = [sum(x * y for x, y in zip(row, v)) for row in fz.p]
        for k in range(r):
            if pv[k] % fz.diagonal[k]:
                raise ValueError("boundary lattice is not contained in the cycle lattice")
            rel[k][j] = pv[k] // fz.diagonal[k]
    if kb:
        fr = smith_normal_form(rel, kb)
        p2, diag2 = fr.p, fr.diagonal
    else:
        p2, diag2 = identity(r), ()
    moduli, keep = [], []
    for k in range(r):
        m = diag2[k] if k < len(diag2) else 0
        if m != 1:
            moduli.append(m)
            keep.append(k)
    return Subquotient(basis, fz.p, tuple(fz.diagonal), p2, tuple(moduli), tuple(keep), _inverse_unimodular(p2))


def _inverse_unimodular(m: Matrix) -> Matrix:
    """Exact inverse of a unimodular integer matrix (Gauss-Jordan over Q)."""
    from fractions import Fraction
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for c in range(n):
        piv = next(i for i in range(c, n) if a[i][c] != 0)
        a[c], a[piv] = a[piv], a[c]
        pv = a[c][c]
        a[c] = [x / pv for x in a[c]]
        for i in range(n):
            if i != c and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    out = [[int(x) for x in row[n:]] for row in a]
    if any(x.denominator != 1 for row in a for x in row[n:]):
        raise SNFError("matrix is not unimodular")
    return out
