"""Classification of small 4-algebras over F_p up to isomorphism.

Tables are compared through a canonical form: the lexicographically least
upper-triangular table (pairs i <= j, then output index) in the GL_n-orbit,
where P acts by c'(x, y) = P^{-1} c(Px, Py).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from . import _tensors as T
from ._batch import batch_inverse, batch_rref, encode, gl_list, gl_order, sym_coords
from .algebra import Algebra, abelian, derived_algebra, is_metabelian
from .cohomology import _four_algebra_tables, _valid_pairs
from .errors import SizeGuard
from .exactfield import Field

DEFAULT_BUDGET = 10**8
_BLOCK = 1 << 21


@dataclass(frozen=True)
class ClassEntry:
    algebra: Algebra
    derived_dim: int
    metabelian: bool
    count: int


@dataclass(frozen=True)
class ClassificationReport:
    dimension: int
    p: int
    method: str
    classes: tuple = ()
    total_tables: int = 0

    def tables(self) -> list[tuple]:
        return [c.algebra.table_key() for c in self.classes]


class _GL:
    """GL_n(F_p) together with inverses, for transporting batches of tables."""

    def __init__(self, F: Field, n: int):
        self.F = F
        self.P = gl_list(F, n)
        self.Pinv = batch_inverse(self.P, F.p) if n else self.P

    def transports(self, c: np.ndarray) -> np.ndarray:
        """All P^{-1} c(P., P.) for a batch c (N, n, n, n) -> (N, G, n, n, n)."""
        F = self.F
        y = F.einsum("gsi,nstk->ngitk", self.P, c)
        y = F.einsum("gtj,ngitk->ngijk", self.P, y)
        return F.einsum("glk,ngijk->ngijl", self.Pinv, y)


def _codes(F: Field, tabs: np.ndarray) -> np.ndarray:
    return encode(sym_coords(tabs), F.p)


def _canonical(F: Field, gl: _GL, tabs: np.ndarray):
    """Least code and the matching table over each GL-orbit (naive: every table)."""
    n = tabs.shape[-1]
    G = gl.P.shape[0]
    step = max(1, _BLOCK // max(1, G * n ** 3))
    codes, reps = [], []
    for s in range(0, tabs.shape[0], step):
        t = gl.transports(tabs[s:s + step])
        cd = _codes(F, t)
        idx = np.argmin(cd, axis=1)
        rows = np.arange(cd.shape[0])
        codes.append(cd[rows, idx])
        reps.append(t[rows, idx])
    if not codes:
        return np.zeros(0, dtype=np.int64), np.zeros((0, n, n, n), dtype=np.int64)
    return np.concatenate(codes), np.concatenate(reps)


def _orbit_size(F: Field, gl: _GL, tab: np.ndarray) -> int:
    return len(np.unique(_codes(F, gl.transports(tab[None])[0])))


def _entry(F: Field, tab: np.ndarray, count: int) -> ClassEntry:
    A = Algebra(F, tab)
    return ClassEntry(A, derived_algebra(A).dim, is_metabelian(A), count)


def _sorted(entries) -> tuple:
    return tuple(sorted(entries, key=lambda e: (e.derived_dim, e.algebra.table_key())))


def four_algebra_tables(n: int, p: int, *, force: bool = False, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """Every 4-algebra structure tensor on F_p^n, in lexicographic order."""
    return _four_algebra_tables(Field.Fp(p), n, force=force, budget=budget)


def _guard(n: int, p: int, force: bool, budget: int, max_dim: int = 2):
    cost = p ** (n * n * (n + 1) // 2) + gl_order(p, n)
    if (n > max_dim or cost > budget) and not force:
        raise SizeGuard(f"classification in dimension {n} over F_{p}", cost, budget)


def classify_brute(n: int, p: int, *, force: bool = False, budget: int = DEFAULT_BUDGET,
                   naive: bool = False) -> ClassificationReport:
    """Enumerate symmetric tables, keep 4-algebras, and split them into GL_n-orbits.

    Tables are visited in increasing code order; the first unseen table of an
    orbit is its least member, and only such tables are moved by GL_n.  With
    ``naive=True`` every table is canonicalized instead (used as a cross-check).
    """
    F = Field.Fp(p)
    _guard(n, p, force, budget)
    tabs = four_algebra_tables(n, p, force=True)
    gl = _GL(F, n)
    entries = []
    if naive:
        codes, reps = _canonical(F, gl, tabs)
        uniq, first, counts = np.unique(codes, return_index=True, return_counts=True)
        entries = [_entry(F, reps[i], int(c)) for i, c in zip(first, counts)]
    else:
        codes = _codes(F, tabs)
        order = np.argsort(codes, kind="stable")
        seen = set()
        for i in order:
            code = codes[i]
            if int(code) in seen:
                continue
            orbit = _codes(F, gl.transports(tabs[i][None])[0])
            seen.update(int(x) for x in orbit)
            entries.append(_entry(F, tabs[i], len(np.unique(orbit))))
    return ClassificationReport(n, p, "naive" if naive else "brute", _sorted(entries), int(tabs.shape[0]))


def twisted_candidates(n: int, m: int, p: int) -> np.ndarray:
    """Tables of all twisted products V # A, dim V = m, A abelian of dim n - m,
    whose derived algebra has dimension exactly m."""
    F = Field.Fp(p)
    k = n - m
    A = abelian(k, F)
    out = []
    for mV in _four_algebra_tables(F, m, force=True, budget=0):
        act, f = _valid_pairs(F, A.c, mV, k, m)
        if not act.shape[0]:
            continue
        c = T.crossed_product_table(F, A.c, act, f, mV)
        # the derived algebra is spanned by the products e_i e_j
        prods = c.reshape(c.shape[0], n * n, n)
        _, rk = batch_rref(prods, p)
        out.append(c[rk == m])
    if not out:
        return np.zeros((0, n, n, n), dtype=np.int64)
    return np.concatenate(out)


def classify_via_twisted(n: int, p: int, *, force: bool = False, budget: int = DEFAULT_BUDGET) -> ClassificationReport:
    """Classification through twisted products, stratified by the derived dimension m."""
    F = Field.Fp(p)
    _guard(n, p, force, budget)
    gl = _GL(F, n)
    entries = []
    total = 0
    for m in range(n + 1):
        cands = twisted_candidates(n, m, p)
        if not cands.shape[0]:
            continue
        codes, reps = _canonical(F, gl, cands)
        uniq, first = np.unique(codes, return_index=True)
        for i in first:
            size = _orbit_size(F, gl, reps[i])
            total += size
            entries.append(_entry(F, reps[i], size))
    return ClassificationReport(n, p, "twisted", _sorted(entries), total)


def classify(n: int, p: int, method: str = "brute", **kw) -> ClassificationReport:
    if method == "brute":
        return classify_brute(n, p, **kw)
    if method == "twisted":
        return classify_via_twisted(n, p, **kw)
    if method == "naive":
        return classify_brute(n, p, naive=True, **kw)
    raise ValueError(f"unknown method {method!r}")
