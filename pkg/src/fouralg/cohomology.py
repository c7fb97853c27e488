"""Cohomology of crossed systems: the Hom(A, V)-action, orbit enumeration over
F_p, and the linear-algebra quotients for abelian kernels.

Conventions.  A map r: A -> V is an m x n matrix (column i is r(e_i)).  The
canonical representative of a class is the member whose serialized key
(act, then f, then multV, row-major) is lexicographically least.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import _tensors as T
from ._batch import encode, grid, grid_chunks, sym_coords, sym_from_coords
from .algebra import Algebra, abelian, is_four_algebra, is_module
from .crossed import CrossedSystem, validate_batch
from .errors import InvalidLambda, NotAModule, ShapeError, SizeGuard
from .exactfield import Field, Matrix, Subspace, complement_representatives, kernel_basis, solve_affine
from .identities import symmetrize

DEFAULT_BUDGET = 10**8
_BLOCK = 1 << 21


# -- the action ---------------------------------------------------------------

def _transform(F: Field, cA, mV, act, f, R):
    """Apply every r in the batch ``R`` (Br, m, n) to every (act, f) in a batch (N, ...).

    Returns arrays of shape (N, Br, n, m, m) and (N, Br, n, n, m).
    """
    act_r = F.einsum("rsa,sxk->raxk", R, mV)
    new_act = F.reduce(act[:, None] + act_r[None])
    g = F.einsum("nitk,rtj->nrijk", act, R)
    w = F.einsum("rsi,stk->ritk", R, mV)
    rr = F.einsum("rtj,ritk->rijk", R, w)
    rab = F.einsum("ijs,rks->rijk", cA, R)
    new_f = F.reduce(f[:, None] + g + np.swapaxes(g, -3, -2) + (rr - rab)[None])
    return new_act, new_f


def transform_by_r(cs: CrossedSystem, r) -> CrossedSystem:
    """The system cohomologous to ``cs`` via ``r``.

    act(a, x) = act'(a, x) + r(a).x and
    f(a, b) = f'(a, b) + a >' r(b) + b >' r(a) + r(a).r(b) - r(ab).
    """
    F = cs.field
    R = r.data if isinstance(r, Matrix) else F.array(r)
    if R.shape != (cs.v_dim, cs.a_dim):
        raise ShapeError(f"r must be {cs.v_dim} x {cs.a_dim}, got {R.shape}")
    act, f = _transform(F, cs.A.c, cs.multV, cs.act[None], cs.f[None], R[None])
    return cs.replace(act=act[0, 0], f=f[0, 0])


def _compa2_system(cs: CrossedSystem, cs2: CrossedSystem):
    """Linear system in the entries of r (row-major) from the action equation."""
    F = cs.field
    m, n = cs.v_dim, cs.a_dim
    mV = cs2.multV
    rows, rhs = [], []
    diff = F.reduce(cs.act - cs2.act)
    for a in range(n):
        for x in range(m):
            for k in range(m):
                row = F.zeros(m * n)
                for s in range(m):
                    row[s * n + a] = mV[s, x, k]
                rows.append(row)
                rhs.append(diff[a, x, k])
    if not rows:
        return Matrix(F, F.zeros((0, m * n))), []
    return Matrix(F, np.stack(rows)), rhs


def are_cohomologous(cs: CrossedSystem, cs2: CrossedSystem, *, force: bool = False,
                     budget: int = DEFAULT_BUDGET) -> Matrix | None:
    """Lexicographically least r with ``transform_by_r(cs2, r) == cs``, or None."""
    F = cs.field
    F.require_finite("are_cohomologous")
    if cs.A != cs2.A or cs.v_dim != cs2.v_dim:
        raise ShapeError("systems must share A and the dimension of V")
    if np.any(cs.multV != cs2.multV):
        return None
    m, n = cs.v_dim, cs.a_dim
    cost = F.p ** (n * m)
    if cost > budget and not force:
        raise SizeGuard("are_cohomologous", cost, budget)
    M, rhs = _compa2_system(cs, cs2)
    if M.rows:
        sol = solve_affine(M, rhs)
        if not sol.consistent:
            return None
        base = F.array(sol.particular)
        kern = [F.array(v) for v in sol.kernel]
    else:
        base = F.zeros(m * n)
        kern = [F.array(v) for v in np.eye(m * n, dtype=np.int64)]
    coeffs = grid(F.p, len(kern))
    K = np.stack(kern) if kern else F.zeros((0, m * n))
    cands = F.reduce(base[None] + coeffs @ K) if kern else base[None]
    cands = cands[np.lexsort(cands.T[::-1])] if cands.shape[1] else cands
    R = cands.reshape(cands.shape[0], m, n)
    _, new_f = _transform(F, cs.A.c, cs2.multV, cs2.act[None], cs2.f[None], R)
    ok = ~np.any(new_f[0] != cs.f[None], axis=(1, 2, 3))
    hits = np.flatnonzero(ok)
    if not hits.size:
        return None
    return Matrix(F, R[hits[0]])


# -- class sets ---------------------------------------------------------------

@dataclass(frozen=True)
class CohomologyClass:
    representative: CrossedSystem
    orbit_size: int


@dataclass(frozen=True)
class Stratum:
    """Classes sharing one fixed datum (multV, act or lambda)."""

    label: np.ndarray = dc_field(repr=False, compare=False)
    classes: tuple = ()

    @property
    def total(self) -> int:
        return sum(c.orbit_size for c in self.classes)


@dataclass(frozen=True)
class CohomologyClassSet:
    A: Algebra
    v_dim: int
    decomposition_label: str
    strata: tuple = ()

    @property
    def field(self) -> Field:
        return self.A.field

    @property
    def classes(self) -> list[CohomologyClass]:
        return [c for s in self.strata for c in s.classes]

    @property
    def count(self) -> int:
        return sum(len(s.classes) for s in self.strata)

    @property
    def total(self) -> int:
        return sum(s.total for s in self.strata)

    def representative_keys(self) -> list[tuple]:
        return sorted(c.representative.key() for c in self.classes)


# -- orbit enumeration --------------------------------------------------------

def _four_algebra_tables(F: Field, m: int, *, force: bool, budget: int) -> np.ndarray:
    """All 4-algebra structure tensors on an m-dimensional space, lexicographic order."""
    L = m * m * (m + 1) // 2
    cost = F.p ** L
    if cost > budget and not force:
        raise SizeGuard("4-algebra structures on V", cost, budget)
    out = []
    for coords in grid_chunks(F.p, L):
        c = F.array(sym_from_coords(coords, m, m))
        ok = ~np.any(T.pairing_defect(F, c) != 0, axis=(-5, -4, -3, -2, -1))
        out.append(c[ok])
    tabs = np.concatenate(out)
    keys = tabs.reshape(len(tabs), -1)
    order = np.lexsort(keys.T[::-1]) if keys.shape[1] else np.arange(len(tabs))
    return tabs[order]


def _valid_pairs(F: Field, cA, mV, n: int, m: int) -> tuple[np.ndarray, np.ndarray]:
    """All (act, f) making (act, f, mV) a crossed system."""
    la, lf = n * m * m, n * (n + 1) // 2 * m
    acts, fs = [], []
    for d in grid_chunks(F.p, la + lf):
        act = F.array(d[:, :la].reshape(d.shape[0], n, m, m))
        f = F.array(sym_from_coords(d[:, la:], n, m))
        ok = validate_batch(F, cA, act, f, mV)
        acts.append(act[ok])
        fs.append(f[ok])
    return np.concatenate(acts), np.concatenate(fs)


def _orbits(F: Field, cA, mV, act, f, n: int, m: int):
    """Hom(A, V)-orbits of a set of valid pairs closed under the action.

    Each element is mapped to the least code over all r; returns one
    (act, f, orbit_size) per class, sorted by key.
    """
    N = act.shape[0]
    if N == 0:
        return []
    rg = grid(F.p, m * n)
    R = F.array(rg.reshape(rg.shape[0], m, n))
    Br = R.shape[0]
    length = n * m * m + n * n * m
    step = max(1, _BLOCK // max(1, Br * max(1, length)))
    canon = []
    best = []
    for s in range(0, N, step):
        a2, f2 = _transform(F, cA, mV, act[s:s + step], f[s:s + step], R)
        digits = np.concatenate([a2.reshape(a2.shape[0], Br, -1), f2.reshape(f2.shape[0], Br, -1)], axis=-1)
        codes = encode(digits, F.p)
        idx = np.argmin(codes, axis=1)
        canon.append(codes[np.arange(codes.shape[0]), idx])
        best.append(digits[np.arange(codes.shape[0]), idx])
    canon = np.concatenate(canon)
    best = np.concatenate(best)
    uniq, first, counts = np.unique(canon, return_index=True, return_counts=True)
    la = n * m * m
    out = []
    for u, i, c in zip(uniq, first, counts):
        d = best[i]
        out.append((d[:la].reshape(n, m, m), d[la:].reshape(n, n, m), int(c)))
    return out


def _stratum(A: Algebra, m: int, mV: np.ndarray) -> Stratum:
    F = A.field
    n = A.dim
    act, f = _valid_pairs(F, A.c, mV, n, m)
    classes = tuple(CohomologyClass(CrossedSystem(A, m, a, ff, mV), size)
                    for a, ff, size in _orbits(F, A.c, mV, act, f, n, m))
    return Stratum(mV, classes)


def _gh2_cost(F: Field, n: int, m: int, strata: int) -> int:
    per = F.p ** (n * m * m + n * (n + 1) // 2 * m)
    return strata * per * (1 + F.p ** (n * m) // max(1, per) + 1)


def h2_nab(A: Algebra, V_alg: Algebra, *, force: bool = False, budget: int = DEFAULT_BUDGET) -> CohomologyClassSet:
    """Classes of crossed systems with fixed multiplication on V."""
    F = A.field
    F.require_finite("h2_nab")
    if V_alg.field != F:
        raise ShapeError("A and V must live over the same field")
    n, m = A.dim, V_alg.dim
    cost = _gh2_cost(F, n, m, 1)
    if cost > budget and not force:
        raise SizeGuard("h2_nab", cost, budget)
    if not is_four_algebra(V_alg):
        return CohomologyClassSet(A, m, "multV", (Stratum(V_alg.c, ()),))
    return CohomologyClassSet(A, m, "multV", (_stratum(A, m, V_alg.c),))


def gh2(A: Algebra, m: int, *, force: bool = False, budget: int = DEFAULT_BUDGET,
        threads: int = 1) -> CohomologyClassSet:
    """Global non-abelian cohomology of A by an m-dimensional V over F_p.

    The candidate space is stratified by the 4-algebra structure on V, so the
    budget applies to the stratified work actually done: the tables on V plus,
    for each 4-algebra table, the (act, f) grid and its orbits.
    """
    F = A.field
    F.require_finite("gh2")
    n = A.dim
    tables = _four_algebra_tables(F, m, force=force, budget=budget)
    cost = F.p ** (m * m * (m + 1) // 2) + _gh2_cost(F, n, m, len(tables))
    if cost > budget and not force:
        raise SizeGuard("gh2", cost, budget)
    if threads > 1 and len(tables) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            strata = list(ex.map(lambda t: _stratum(A, m, t), tables))
    else:
        strata = [_stratum(A, m, t) for t in tables]
    return CohomologyClassSet(A, m, "multV", tuple(strata))


def gh2_orbit_oracle(A: Algebra, m: int) -> int:
    """Slow reference count: union-find over all valid systems using transform_by_r."""
    F = A.field
    F.require_finite("gh2_orbit_oracle")
    n = A.dim
    systems = []
    for mV in _four_algebra_tables(F, m, force=True, budget=0):
        act, f = _valid_pairs(F, A.c, mV, n, m)
        systems.extend(CrossedSystem(A, m, a, ff, mV) for a, ff in zip(act, f))
    index = {cs.key(): k for k, cs in enumerate(systems)}
    parent = list(range(len(systems)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    rs = [Matrix(F, F.array(v).reshape(m, n)) for v in itertools.product(range(F.p), repeat=m * n)]
    for k, cs in enumerate(systems):
        for r in rs:
            j = index[transform_by_r(cs, r).key()]
            a, b = find(k), find(j)
            if a != b:
                parent[max(a, b)] = min(a, b)
    return len({find(k) for k in range(len(systems))})


# -- abelian kernels: linear algebra ------------------------------------------

@dataclass(frozen=True)
class QuotientDescription:
    """Z / B for a linear cocycle space; representatives only over F_p."""

    field: Field
    ambient_dim: int
    Z: Subspace = dc_field(repr=False)
    B: Subspace = dc_field(repr=False)
    representatives: tuple | None = dc_field(default=None, repr=False)

    @property
    def dim_Z(self) -> int:
        return self.Z.dim

    @property
    def dim_B(self) -> int:
        return self.B.dim

    @property
    def dim_H(self) -> int:
        return self.Z.dim - self.B.dim

    @property
    def class_count(self) -> int | None:
        return self.field.p ** self.dim_H if self.field.p else None

    @property
    def coset_size(self) -> int | None:
        return self.field.p ** self.dim_B if self.field.p else None


def _linear_map_matrix(F: Field, fn, dim_in: int) -> Matrix:
    cols = []
    for j in range(dim_in):
        e = F.zeros(dim_in)
        e[j] = F.one()
        cols.append(np.asarray(fn(e)).ravel())
    if not cols:
        return Matrix(F, F.zeros((0, 0)))
    return Matrix(F, np.stack(cols, axis=1))


def _column_space(F: Field, M: Matrix, dim: int) -> Subspace:
    return Subspace.span(F, [M.data[:, j] for j in range(M.cols)], dim)


def _quotient(F: Field, dim: int, Z: Subspace, B: Subspace, *, force: bool, budget: int) -> QuotientDescription:
    if F.p:
        if not all(Z.contains(v) for v in B.basis):
            raise ValueError("coboundaries are not cocycles; the action is not a module")
        size = F.p ** (Z.dim - B.dim)
        if size > budget and not force:
            raise SizeGuard("quotient representatives", size, budget)
        reps = tuple(complement_representatives(Z, B))
        return QuotientDescription(F, dim, Z, B, reps)
    return QuotientDescription(F, dim, Z, B, None)


def _sym_dim(n: int, m: int) -> int:
    return n * (n + 1) // 2 * m


def h2_action(A: Algebra, v_dim: int, act, *, force: bool = False, budget: int = DEFAULT_BUDGET) -> QuotientDescription:
    """H^2 for an abelian kernel V with fixed module structure ``act``.

    Cocycles: symmetric f with the polarized f(a^2,a^2) + 2 a^2 > f(a,a) = 0.
    Coboundaries: a > r(b) + b > r(a) - r(ab).  Vectors are upper-triangular
    coordinates of f (pairs i <= j, then output index).
    """
    F = A.field
    n, m = A.dim, v_dim
    act = F.array(act).reshape(n, m, m)
    if not is_module(A, m, act):
        raise NotAModule("the action does not satisfy a^2 > (a > x) = 0")
    d = _sym_dim(n, m)
    cA = A.c

    def cocycle(v):
        return T.abelian_cocycle_defect(F, cA, act, F.array(sym_from_coords(v, n, m)))

    def cobound(v):
        r = v.reshape(m, n)
        return sym_coords(_delta(F, cA, act, r, with_product=True))

    Z = Subspace.span(F, kernel_basis(_linear_map_matrix(F, cocycle, d)), d)
    B = _column_space(F, _linear_map_matrix(F, cobound, m * n), d)
    return _quotient(F, d, Z, B, force=force, budget=budget)


def _delta(F: Field, cA, act, r, *, with_product: bool):
    """a > r(b) + b > r(a) (- r(ab)) as a symmetric n x n x m tensor."""
    g = F.einsum("itk,tj->ijk", act, r)
    out = g + np.swapaxes(g, 0, 1)
    if with_product:
        out = out - F.einsum("ijs,ks->ijk", cA, r)
    return F.reduce(out)


def metabelian_h2(n: int, m: int, act, field: Field, *, force: bool = False,
                  budget: int = DEFAULT_BUDGET) -> QuotientDescription:
    """Symmetric f: A x A -> V modulo a > r(b) + b > r(a), with A and V abelian."""
    F = field
    act = F.array(act)
    if act.shape != (n, m, m):
        raise ShapeError(f"act must have shape {(n, m, m)}, got {act.shape}")
    d = _sym_dim(n, m)
    cA = F.zeros((n, n, n))
    Z = Subspace.span(F, [row for row in F.identity(d)], d)

    def cobound(v):
        return sym_coords(_delta(F, cA, act, v.reshape(m, n), with_product=False))

    B = _column_space(F, _linear_map_matrix(F, cobound, m * n), d)
    return _quotient(F, d, Z, B, force=force, budget=budget)


def metabelian_product(n: int, m: int, act, f, field: Field) -> Algebra:
    """V # A with (x, a)(y, b) = (a > y + b > x + f(a, b), 0); basis V first, then A."""
    F = field
    cs = CrossedSystem(abelian(n, F), m, act, f, None)
    return Algebra(F, T.crossed_product_table(F, cs.A.c, cs.act, cs.f, cs.multV),
                   tuple(f"v{i + 1}" for i in range(m)) + tuple(cs.A.labels))


# -- one-dimensional kernel: the CF path --------------------------------------

@dataclass(frozen=True, eq=False)
class CFPair:
    lam: np.ndarray
    f: np.ndarray


def _cf_quartic(F: Field, cA, lam, f):
    """Polarized f(a^2, a^2) + 2 lam(a^2) f(a, a); batch axes allowed on lam and f."""
    y = F.einsum("...st,klt->...skl", f, cA)
    t = F.einsum("ijs,...skl->...ijkl", cA, y)
    ls = F.einsum("ijs,...s->...ij", cA, lam)
    t = F.reduce(t + 2 * ls[..., :, :, None, None] * f[..., None, None, :, :])
    b = t.ndim - 4
    return symmetrize(t, F, [range(b, b + 4)])


def _cf_cubic(F: Field, cA, lam):
    """lam(a) lam(bc) + lam(b) lam(ac) + lam(c) lam(ab)."""
    ls = F.einsum("ijs,...s->...ij", cA, lam)
    u = lam[..., :, None, None] * ls[..., None, :, :]
    return F.reduce(u + np.moveaxis(u, -2, -3) + np.moveaxis(u, -1, -3))


def lambda_ok(A: Algebra, lam) -> bool:
    F = A.field
    return not np.any(_cf_cubic(F, A.c, F.array(lam)) != 0)


def cf_pairs(A: Algebra, *, force: bool = False, budget: int = DEFAULT_BUDGET) -> list[CFPair]:
    """All (lam, f) with lam linear, f symmetric, satisfying both compatibility conditions."""
    F = A.field
    F.require_finite("cf_pairs")
    n = A.dim
    L = n + n * (n + 1) // 2
    cost = F.p ** L
    if cost > budget and not force:
        raise SizeGuard("cf_pairs", cost, budget)
    out = []
    lams = F.array(grid(F.p, n))
    lams = lams[~np.any(_cf_cubic(F, A.c, lams) != 0, axis=(-3, -2, -1))]
    for lam in lams:
        for d in grid_chunks(F.p, L - n):
            f = F.array(sym_from_coords(d, n, 1)[..., 0])
            ok = ~np.any(_cf_quartic(F, A.c, lam, f) != 0, axis=(-4, -3, -2, -1))
            out.extend(CFPair(lam, f_) for f_ in f[ok])
    return out


def build_A_lambda_f(A: Algebra, pair: CFPair) -> Algebra:
    """The (n+1)-dimensional algebra on g, e_1..e_n: g^2 = 0, e_i g = lam_i g,
    e_i e_j = e_i e_j + f_ij g."""
    F = A.field
    n = A.dim
    c = F.zeros((n + 1, n + 1, n + 1))
    lam, f = F.array(pair.lam), F.array(pair.f)
    c[1:, 0, 0] = lam
    c[0, 1:, 0] = lam
    c[1:, 1:, 0] = f
    c[1:, 1:, 1:] = A.c
    return Algebra(F, c, ("g",) + tuple(A.labels))


def h2_lambda(A: Algebra, lam, *, force: bool = False, budget: int = DEFAULT_BUDGET) -> QuotientDescription:
    """lam-cocycles modulo f ~ f + lam(a) r(b) + lam(b) r(a) - r(ab), r: A -> k."""
    F = A.field
    n = A.dim
    lam = F.array(lam).reshape(n)
    if not lambda_ok(A, lam):
        raise InvalidLambda("lam(a) lam(a^2) = 0 fails")
    d = n * (n + 1) // 2
    cA = A.c

    def cocycle(v):
        return _cf_quartic(F, cA, lam, F.array(sym_from_coords(v, n, 1)[..., 0]))

    def cobound(v):
        out = lam[:, None] * v[None, :] + v[:, None] * lam[None, :] - F.einsum("ijs,s->ij", cA, v)
        return sym_coords(F.reduce(out)[..., None])

    Z = Subspace.span(F, kernel_basis(_linear_map_matrix(F, cocycle, d)), d)
    B = _column_space(F, _linear_map_matrix(F, cobound, n), d)
    return _quotient(F, d, Z, B, force=force, budget=budget)


def gh2_A_k(A: Algebra, *, force: bool = False, budget: int = DEFAULT_BUDGET) -> CohomologyClassSet:
    """GH^2(A, k) assembled over lam from the quotients H^2_lam(A, k).

    Representatives are returned as crossed systems (act = lam, f, multV = 0)
    so they can be compared with :func:`gh2` directly.
    """
    F = A.field
    F.require_finite("gh2_A_k")
    n = A.dim
    if F.p ** n > budget and not force:
        raise SizeGuard("gh2_A_k", F.p ** n, budget)
    strata = []
    for lam in grid(F.p, n):
        lam = F.array(lam)
        if not lambda_ok(A, lam):
            continue
        q = h2_lambda(A, lam, force=force, budget=budget)
        act = lam.reshape(n, 1, 1)
        classes = tuple(CohomologyClass(CrossedSystem(A, 1, act, sym_from_coords(rep, n, 1), None), q.coset_size)
                        for rep in q.representatives)
        strata.append(Stratum(lam, classes))
    return CohomologyClassSet(A, 1, "lambda", tuple(strata))


# -- one-dimensional base: the CT path ----------------------------------------

@dataclass(frozen=True, eq=False)
class CTTriple:
    """theta (m x m, column i is theta(e_i)), F in V and the multiplication on V."""

    theta: np.ndarray
    F: np.ndarray
    multV: np.ndarray

    def crossed_system(self, field: Field) -> CrossedSystem:
        m = self.F.shape[0]
        return CrossedSystem(abelian(1, field), m, self.theta.T.reshape(1, m, m),
                             self.F.reshape(1, 1, m), self.multV)


def _ct_ok(Fd: Field, mV, theta, Fv) -> np.ndarray:
    """Batched check of the four conditions (polarized in x)."""
    ff = Fd.einsum("...t,stk->...sk", Fv, mV)
    ff = Fd.einsum("...s,...sk->...k", Fv, ff)
    bad = np.any(ff != 0, axis=-1)
    # theta(x).x^2 on basis triples, symmetrized
    sq = mV
    y = Fd.einsum("jkt,stu->jksu", sq, mV)
    cub = Fd.einsum("...si,jksu->...ijku", theta, y)
    b = cub.ndim - 4
    cub = symmetrize(cub, Fd, [range(b, b + 3)])
    bad |= np.any(cub != 0, axis=(-4, -3, -2, -1))
    # theta(x).F
    tf = Fd.einsum("...si,stu->...itu", theta, mV)
    tf = Fd.einsum("...itu,...t->...iu", tf, Fv)
    bad |= np.any(tf != 0, axis=(-2, -1))
    # 2 theta(x)^2 + x^2.F as a symmetric bilinear form
    tt = Fd.einsum("...si,stu->...itu", theta, mV)
    tt = Fd.einsum("...itu,...tj->...iju", tt, theta)
    xf = Fd.einsum("ijt,...s->...ijts", sq, Fv)
    xf = Fd.einsum("...ijts,tsu->...iju", xf, mV)
    quad = Fd.reduce(2 * tt + xf)
    bad |= np.any(quad != 0, axis=(-3, -2, -1))
    return ~bad


def ct_triples(V_alg: Algebra, *, force: bool = False, budget: int = DEFAULT_BUDGET) -> list[CTTriple]:
    """All (theta, F) compatible with the fixed 4-algebra structure of V."""
    Fd = V_alg.field
    Fd.require_finite("ct_triples")
    m = V_alg.dim
    cost = Fd.p ** (m * m + m)
    if cost > budget and not force:
        raise SizeGuard("ct_triples", cost, budget)
    th, Fv = _ct_candidates(Fd, V_alg.c, m)
    return [CTTriple(t, v, V_alg.c) for t, v in zip(th, Fv)]


def _ct_candidates(Fd: Field, mV, m: int):
    ths, fvs = [], []
    for d in grid_chunks(Fd.p, m * m + m):
        theta = Fd.array(d[:, :m * m].reshape(d.shape[0], m, m))
        Fv = Fd.array(d[:, m * m:])
        ok = _ct_ok(Fd, mV, theta, Fv)
        ths.append(theta[ok])
        fvs.append(Fv[ok])
    return np.concatenate(ths), np.concatenate(fvs)


def _ct_stratum(Fd: Field, m: int, mV) -> Stratum:
    th, Fv = _ct_candidates(Fd, mV, m)
    N = th.shape[0]
    A = abelian(1, Fd)
    if N == 0:
        return Stratum(mV, ())
    rs = Fd.array(grid(Fd.p, m))
    # theta(x) = theta'(x) + r.x ; F = F' + 2 theta'(r) + r^2
    Lr = Fd.einsum("rs,sxk->rkx", rs, mV)
    new_th = Fd.reduce(th[:, None] + Lr[None])
    tr = Fd.einsum("nkx,rx->nrk", th, rs)
    r2 = Fd.einsum("rs,stk->rtk", rs, mV)
    r2 = Fd.einsum("rtk,rt->rk", r2, rs)
    new_F = Fd.reduce(Fv[:, None] + 2 * tr + r2[None])
    # serialize as the crossed system (act = theta^T, f = F)
    act = np.swapaxes(new_th, -1, -2).reshape(N, rs.shape[0], -1)
    digits = np.concatenate([act, new_F], axis=-1)
    codes = encode(digits, Fd.p)
    idx = np.argmin(codes, axis=1)
    canon = codes[np.arange(N), idx]
    best = digits[np.arange(N), idx]
    uniq, first, counts = np.unique(canon, return_index=True, return_counts=True)
    classes = []
    for i, c in zip(first, counts):
        d = best[i]
        tri = CTTriple(d[:m * m].reshape(m, m).T, d[m * m:], mV)
        classes.append(CohomologyClass(tri.crossed_system(Fd), int(c)))
    return Stratum(mV, tuple(classes))


def gh2_k_V(m: int, field: Field, *, force: bool = False, budget: int = DEFAULT_BUDGET) -> CohomologyClassSet:
    """GH^2(k, V) assembled over the 4-algebra structures on V from (theta, F) pairs."""
    Fd = field
    Fd.require_finite("gh2_k_V")
    tables = _four_algebra_tables(Fd, m, force=force, budget=budget)
    cost = len(tables) * Fd.p ** (m * m + m) * (1 + Fd.p ** m)
    if cost > budget and not force:
        raise SizeGuard("gh2_k_V", cost, budget)
    strata = tuple(_ct_stratum(Fd, m, t) for t in tables)
    return CohomologyClassSet(abelian(1, Fd), m, "multV", strata)
