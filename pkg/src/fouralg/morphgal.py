"""V-stabilizing morphisms between crossed products and the Galois group of V # A.

A pair ``(r, alpha)`` has ``r`` an m x n matrix (a map A -> V) and ``alpha``
an n x n matrix; it induces psi(x, a) = (x + r(a), alpha(a)).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from ._batch import batch_rref, gl_matrices, grid_chunks, grid
from .algebra import _morphism_defect, is_algebra_morphism
from .crossed import CrossedSystem, crossed_product
from .errors import DifferentMultV, ShapeError, SizeGuard
from .exactfield import Field, Matrix

DEFAULT_BUDGET = 10**8


@dataclass(frozen=True, eq=False)
class MorphismPair:
    r: Matrix
    alpha: Matrix

    def __post_init__(self):
        if self.r.cols != self.alpha.rows or self.alpha.rows != self.alpha.cols:
            raise ShapeError("r must be m x n and alpha n x n")

    @property
    def field(self) -> Field:
        return self.alpha.field

    def __mul__(self, other: "MorphismPair") -> "MorphismPair":
        """(r, alpha) . (r', alpha') = (r' + r alpha', alpha alpha')."""
        return MorphismPair(other.r + self.r @ other.alpha, self.alpha @ other.alpha)

    def inverse(self) -> "MorphismPair":
        ainv = self.alpha.inverse()
        return MorphismPair(-(self.r @ ainv), ainv)

    @classmethod
    def identity(cls, field: Field, m: int, n: int) -> "MorphismPair":
        return cls(Matrix.zero(field, m, n), Matrix.identity(field, n))

    def sort_key(self) -> tuple:
        F = self.field
        return F.key(self.alpha.data) + F.key(self.r.data)

    def __eq__(self, other):
        if not isinstance(other, MorphismPair):
            return NotImplemented
        return self.r == other.r and self.alpha == other.alpha

    def __hash__(self):
        return hash(self.sort_key())

    def __repr__(self):
        return f"MorphismPair(r={self.r.data.tolist()}, alpha={self.alpha.data.tolist()})"


def psi_of_pair(pair: MorphismPair) -> Matrix:
    """Block matrix [[I, r], [0, alpha]] of psi(x, a) = (x + r(a), alpha(a))."""
    F = pair.field
    m, n = pair.r.shape
    data = F.zeros((m + n, m + n))
    data[:m, :m] = F.identity(m)
    data[:m, m:] = pair.r.data
    data[m:, m:] = pair.alpha.data
    return Matrix(F, data)


def psi_inverse(pair: MorphismPair) -> Matrix:
    """psi^{-1}(x, a) = (x - r(alpha^{-1}(a)), alpha^{-1}(a)) for invertible alpha."""
    return psi_of_pair(pair.inverse())


def _pair_defects(F: Field, cs: CrossedSystem, cs2: CrossedSystem, R: np.ndarray, Al: np.ndarray) -> np.ndarray:
    """Boolean mask over the (alpha, r) grid: do (M1) and (M2) fail?

    ``R`` has shape (Br, m, n); ``Al`` has shape (Ba, n, n); the result is (Ba, Br).
    """
    cA = cs.A.c
    act, f = cs.act, cs.f
    act2, f2, mV2 = cs2.act, cs2.f, cs2.multV
    # (M1): a > x - alpha(a) >' x - r(a) .' x
    t1 = F.einsum("bsi,sjk->bijk", Al, act2)[:, None]
    t2 = F.einsum("rsi,sjk->rijk", R, mV2)[None, :]
    m1 = F.reduce(act[None, None] - t1 - t2)
    bad = np.any(m1 != 0, axis=(-3, -2, -1))
    # (M2): f(a,b) - f'(alpha a, alpha b) - alpha(a) >' r(b) - alpha(b) >' r(a) - r(a).'r(b) + r(ab)
    y = F.einsum("bsi,stk->bitk", Al, f2)
    ff = F.einsum("btj,bitk->bijk", Al, y)[:, None]
    z = F.einsum("bsi,stk->bitk", Al, act2)
    ar = F.einsum("rtj,bitk->brijk", R, z)
    ar = F.reduce(ar + np.swapaxes(ar, -3, -2))
    w = F.einsum("rsi,stk->ritk", R, mV2)
    rr = F.einsum("rtj,ritk->rijk", R, w)[None]
    rab = F.einsum("rks,ijs->rijk", R, cA)[None]
    m2 = F.reduce(f[None, None] - ff - ar - rr + rab)
    return bad | np.any(m2 != 0, axis=(-3, -2, -1))


def _as_int(F: Field, arr):
    return arr if F.dtype is not object else arr.astype(object)


def _enumerate_pairs(cs: CrossedSystem, cs2: CrossedSystem, alphas: np.ndarray) -> list[MorphismPair]:
    F = cs.field
    m, n = cs.v_dim, cs.a_dim
    rg = grid(F.p, m * n)
    R = _as_int(F, rg.reshape(rg.shape[0], m, n))
    out = []
    step = max(1, (1 << 18) // max(1, R.shape[0]))
    for start in range(0, alphas.shape[0], step):
        Al = _as_int(F, alphas[start:start + step])
        bad = _pair_defects(F, cs, cs2, R, Al)
        for ai, ri in zip(*np.nonzero(~bad)):
            out.append(MorphismPair(Matrix(F, R[ri]), Matrix(F, Al[ai])))
    out.sort(key=MorphismPair.sort_key)
    return out


def _algebra_endomorphisms(cs: CrossedSystem, invertible: bool) -> np.ndarray:
    F = cs.field
    n = cs.a_dim
    cA = cs.A.c
    if invertible:
        chunks = gl_matrices(F, n)
    else:
        rg = grid(F.p, n * n)
        chunks = (rg.reshape(rg.shape[0], n, n),)
    keep = []
    for ch in chunks:
        ch = _as_int(F, ch)
        ok = ~np.any(_morphism_defect(F, cA, cA, ch) != 0, axis=(-3, -2, -1))
        keep.append(ch[ok])
    return np.concatenate(keep) if keep else np.zeros((0, n, n), dtype=np.int64)


def stabilizing_morphisms(cs: CrossedSystem, cs2: CrossedSystem, *, force: bool = False,
                          budget: int = DEFAULT_BUDGET) -> list[MorphismPair]:
    """All (r, alpha), alpha an algebra endomorphism of A, satisfying (M1)-(M2).

    Raises :class:`DifferentMultV` when the two systems carry different
    multiplications on V (then no V-stabilizing algebra map exists).
    """
    F = cs.field
    F.require_finite("stabilizing_morphisms")
    if cs.A != cs2.A or cs.v_dim != cs2.v_dim:
        raise ShapeError("both systems must be over the same A and V")
    if np.any(cs.multV != cs2.multV):
        raise DifferentMultV("multV differs; no V-stabilizing morphisms exist")
    m, n = cs.v_dim, cs.a_dim
    cost = F.p ** (n * m) * F.p ** (n * n)
    if cost > budget and not force:
        raise SizeGuard("stabilizing_morphisms", cost, budget)
    pairs = _enumerate_pairs(cs, cs2, _algebra_endomorphisms(cs, invertible=False))
    src, dst = crossed_product(cs, validate=False), crossed_product(cs2, validate=False)
    for pr in pairs:
        assert is_algebra_morphism(src, dst, psi_of_pair(pr)), "pair does not induce an algebra map"
    return pairs


@dataclass(frozen=True, eq=False)
class GaloisGroup:
    cs: CrossedSystem
    elements: list = dc_field(default_factory=list)

    @property
    def order(self) -> int:
        return len(self.elements)

    def index(self, g: MorphismPair) -> int:
        return self._lookup()[g.sort_key()]

    def _lookup(self) -> dict:
        cache = self.__dict__.get("_idx")
        if cache is None:
            cache = {g.sort_key(): k for k, g in enumerate(self.elements)}
            object.__setattr__(self, "_idx", cache)
        return cache

    def cayley_table(self) -> list[list[int]]:
        lk = self._lookup()
        table = []
        for g in self.elements:
            row = []
            for h in self.elements:
                row.append(lk.get((g * h).sort_key(), -1))
            table.append(row)
        return table

    def check_group(self) -> dict:
        """Closure, identity, inverses and associativity under the pair product."""
        F = self.cs.field
        m, n = self.cs.v_dim, self.cs.a_dim
        lk = self._lookup()
        table = self.cayley_table()
        closed = all(k >= 0 for row in table for k in row)
        e = MorphismPair.identity(F, m, n)
        has_id = e.sort_key() in lk
        inverses = all(g.inverse().sort_key() in lk for g in self.elements)
        assoc = closed
        if closed:
            N = self.order
            for a in range(N):
                for b in range(N):
                    ab = table[a][b]
                    for c in range(N):
                        if table[ab][c] != table[a][table[b][c]]:
                            assoc = False
                            break
                    if not assoc:
                        break
                if not assoc:
                    break
        invertible_alpha = all(g.alpha.is_invertible() for g in self.elements)
        return {"closed": closed, "identity": has_id, "inverses": inverses,
                "associative": assoc, "in_Hom_x_GL": invertible_alpha}


def galois_group(cs: CrossedSystem, *, max_a_dim: int = 3, force: bool = False,
                 budget: int = DEFAULT_BUDGET) -> GaloisGroup:
    """All (r, alpha) with alpha in Aut(A) satisfying the two stabilizer conditions."""
    F = cs.field
    F.require_finite("galois_group")
    m, n = cs.v_dim, cs.a_dim
    cost = F.p ** (n * n) + F.p ** (n * m) * F.p ** (n * n)
    if (n > max_a_dim or cost > budget) and not force:
        raise SizeGuard("galois_group", cost, budget)
    auts = _algebra_endomorphisms(cs, invertible=True)
    return GaloisGroup(cs, _enumerate_pairs(cs, cs, auts))


def fixing_automorphisms(cs: CrossedSystem, *, max_total_dim: int = 3, force: bool = False,
                         budget: int = DEFAULT_BUDGET) -> list[Matrix]:
    """Brute force: automorphisms of V # A that are the identity on V (GL filter)."""
    F = cs.field
    F.require_finite("fixing_automorphisms")
    m, n = cs.v_dim, cs.a_dim
    N = m + n
    cost = F.p ** (N * n)
    if (N > max_total_dim or cost > budget) and not force:
        raise SizeGuard("fixing_automorphisms", cost, budget)
    prod = crossed_product(cs, validate=False)
    # only the last n columns are free once V is fixed pointwise
    out = []
    for flat in grid_chunks(F.p, N * n):
        ch = np.zeros((flat.shape[0], N, N), dtype=np.int64)
        ch[:, :m, :m] = np.eye(m, dtype=np.int64)
        ch[:, :, m:] = flat.reshape(flat.shape[0], N, n)
        _, rk = batch_rref(ch, F.p)
        ch = _as_int(F, ch[rk == N])
        if not ch.shape[0]:
            continue
        ok = ~np.any(_morphism_defect(F, prod.c, prod.c, ch) != 0, axis=(-3, -2, -1))
        out.extend(Matrix(F, g) for g in ch[ok])
    return out


def verify_galois_isomorphism(cs: CrossedSystem, *, force: bool = False, group: GaloisGroup | None = None) -> dict:
    """Compare the pair group with independently enumerated V-fixing automorphisms.

    Returns a report whose ``"ok"`` entry is True iff psi is a bijection between
    the two sets and psi(g . h) = psi(g) psi(h) for all g, h.
    """
    G = group if group is not None else galois_group(cs, force=force)
    auts = fixing_automorphisms(cs, force=force)
    images = [psi_of_pair(g) for g in G.elements]
    img_set = {m for m in images}
    aut_set = set(auts)
    bijective = len(img_set) == len(images) and img_set == aut_set
    hom = all(psi_of_pair(g * h) == images[i] @ images[j]
              for i, g in enumerate(G.elements) for j, h in enumerate(G.elements))
    group_ok = G.check_group()
    return {"ok": bijective and hom and all(group_ok.values()),
            "group_order": G.order, "automorphism_count": len(auts),
            "bijective": bijective, "homomorphism": hom, "group_axioms": group_ok}
