"""Crossed systems (act, f, multV) of a 4-algebra A by a space V and their products.

Conventions: ``act[i, j, :]`` is ``a_i > x_j`` (shape n x m x m), ``f[i, j, :]``
is ``f(a_i, a_j)`` (n x n x m), ``multV[i, j, :]`` is ``x_i . x_j`` (m x m x m).
The crossed product V # A uses the basis (x_1..x_m, a_1..a_n).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from . import _tensors as T
from ._batch import grid_chunks
from .algebra import Algebra, Check, abelian, is_algebra_morphism, is_four_algebra
from .errors import (
    InvalidCrossedSystem,
    InvalidPair,
    NotAbelianBase,
    NotMorphism,
    NotSection,
    NotSurjective,
    ShapeError,
    SizeGuard,
)
from .exactfield import Field, Matrix, Subspace, kernel_basis, rank, solve_affine
from .identities import first_nonzero, nonzero_batch

DEFAULT_BUDGET = 10**8


@dataclass(frozen=True, eq=False)
class CrossedSystem:
    """Crossed data of ``A`` by a space of dimension ``v_dim``.

    Construction only checks shapes; call :meth:`validate` (or any product
    constructor) to check (CS1)-(CS3).
    """

    A: Algebra
    v_dim: int
    act: np.ndarray = dc_field(default=None, repr=False)
    f: np.ndarray = dc_field(default=None, repr=False)
    multV: np.ndarray = dc_field(default=None, repr=False)

    def __post_init__(self):
        F, n, m = self.A.field, self.A.dim, self.v_dim
        for name, shape in (("act", (n, m, m)), ("f", (n, n, m)), ("multV", (m, m, m))):
            raw = getattr(self, name)
            arr = F.zeros(shape) if raw is None else F.array(raw)
            if arr.size == 0 and arr.shape != shape:
                arr = F.zeros(shape)
            if arr.shape != shape:
                raise ShapeError(f"{name} must have shape {shape}, got {arr.shape}")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def zero(cls, A: Algebra, v_dim: int) -> "CrossedSystem":
        return cls(A, v_dim, None, None, None)

    @property
    def field(self) -> Field:
        return self.A.field

    @property
    def a_dim(self) -> int:
        return self.A.dim

    def key(self) -> tuple:
        """Serialized (act, f, multV) triple; lexicographic order picks representatives."""
        F = self.field
        return F.key(self.act) + F.key(self.f) + F.key(self.multV)

    def __eq__(self, other):
        if not isinstance(other, CrossedSystem):
            return NotImplemented
        return self.A == other.A and self.v_dim == other.v_dim and self.key() == other.key()

    def __hash__(self):
        return hash((self.A, self.v_dim, self.key()))

    def __repr__(self):
        return f"CrossedSystem(A={self.A!r}, v_dim={self.v_dim}, key={self.key()})"

    def V(self) -> Algebra:
        return Algebra(self.field, self.multV, tuple(f"v{i + 1}" for i in range(self.v_dim)))

    def validate(self) -> "ValidationReport":
        return validate_crossed_system(self)

    def replace(self, **kw) -> "CrossedSystem":
        data = dict(A=self.A, v_dim=self.v_dim, act=self.act, f=self.f, multV=self.multV)
        data.update(kw)
        return CrossedSystem(**data)


@dataclass(frozen=True)
class ValidationReport:
    cs1: Check
    cs2: Check
    cs3: Check

    @property
    def ok(self) -> bool:
        return self.cs1.ok and self.cs2.ok and self.cs3.ok

    def __bool__(self):
        return self.ok

    def failed(self) -> list[str]:
        return [name for name in ("cs1", "cs2", "cs3") if not getattr(self, name).ok]

    def as_dict(self) -> dict:
        out = {}
        for name in ("cs1", "cs2", "cs3"):
            chk = getattr(self, name)
            wit = None
            if chk.witness is not None:
                wit = {"part": chk.witness[0], "tuple": [list(t) if isinstance(t, tuple) else t for t in chk.witness[1]]}
            out[name] = {"pass": chk.ok, "witness": wit}
        out["ok"] = self.ok
        return out


def validate_crossed_system(cs: CrossedSystem) -> ValidationReport:
    """Check (CS1)-(CS3) by polarization, with a witness for each failure.

    CS2 is homogeneous of degree 4 in a.  CS3 is split into its bidegree
    components (2,2), (1,3), (3,1) in (a, x), each polarized separately; the
    witness of a CS3 failure is ``(component, (a-indices, x-indices))``.
    """
    F = cs.field
    cA, act, f, mV = cs.A.c, cs.act, cs.f, cs.multV

    cs1 = Check(True)
    w = first_nonzero(F.reduce(f - np.swapaxes(f, 0, 1)))
    if w is not None:
        cs1 = Check(False, ("f_symmetric", (w[:2],)))
    else:
        w = first_nonzero(T.commutator(F, mV))
        if w is not None:
            cs1 = Check(False, ("multV_commutative", (w[:2],)))
        else:
            w = first_nonzero(T.pairing_defect(F, mV))
            if w is not None:
                cs1 = Check(False, ("multV_four", (w[:4],)))

    w = first_nonzero(T.cs2_defect(F, cA, act, f, mV))
    cs2 = Check(True) if w is None else Check(False, ("a^4", (w[:4],)))

    cs3 = Check(True)
    d3 = T.cs3_defects(F, cA, act, f, mV)
    split = {"22": 2, "13": 1, "31": 3}
    for name in ("22", "13", "31"):
        w = first_nonzero(d3[name])
        if w is not None:
            k = split[name]
            cs3 = Check(False, (name, (w[:k], w[k:4])))
            break
    return ValidationReport(cs1, cs2, cs3)


def validate_batch(F: Field, cA, act, f, mV) -> np.ndarray:
    """Vectorized (CS1)-(CS3) over leading batch axes; returns a boolean mask."""
    batch = np.broadcast_shapes(cA.shape[:-3], act.shape[:-3], f.shape[:-3], mV.shape[:-3])
    bnd = len(batch)
    bad = np.zeros(batch, dtype=bool)

    def acc(t, tb):
        return bad | np.broadcast_to(nonzero_batch(t, tb), batch)

    bad = acc(F.reduce(f - np.swapaxes(f, -3, -2)), f.ndim - 3)
    bad = acc(T.commutator(F, mV), mV.ndim - 3)
    pd = T.pairing_defect(F, mV)
    bad = acc(pd, pd.ndim - 5)
    d2 = T.cs2_defect(F, cA, act, f, mV)
    bad = acc(d2, d2.ndim - 5)
    for d in T.cs3_defects(F, cA, act, f, mV).values():
        bad = acc(d, d.ndim - 5)
    return ~bad


# -- constructions ------------------------------------------------------------

def _labels(cs: CrossedSystem) -> tuple:
    return tuple(f"v{i + 1}" for i in range(cs.v_dim)) + tuple(cs.A.labels)


def crossed_product(cs: CrossedSystem, *, validate: bool = True) -> Algebra:
    """V # A with (x,a)(y,b) = (x.y + a>y + b>x + f(a,b), ab)."""
    if validate:
        report = validate_crossed_system(cs)
        if not report.ok:
            raise InvalidCrossedSystem(report)
    F = cs.field
    c = T.crossed_product_table(F, cs.A.c, cs.act, cs.f, cs.multV)
    return Algebra(F, c, _labels(cs))


def canonical_projection(cs: CrossedSystem) -> Matrix:
    m, n = cs.v_dim, cs.a_dim
    F = cs.field
    data = F.zeros((n, m + n))
    data[:, m:] = F.identity(n)
    return Matrix(F, data)


def canonical_section(cs: CrossedSystem) -> Matrix:
    m, n = cs.v_dim, cs.a_dim
    F = cs.field
    data = F.zeros((m + n, n))
    data[m:, :] = F.identity(n)
    return Matrix(F, data)


def semidirect_product(A: Algebra, V_alg: Algebra, act, *, validate: bool = True) -> Algebra:
    """V x| A: the crossed product with f = 0."""
    cs = CrossedSystem(A, V_alg.dim, act, None, V_alg.c)
    return crossed_product(cs, validate=validate)


def twisted_product(V_alg: Algebra, A, act, f, *, validate: bool = True) -> Algebra:
    """Crossed product over an abelian base; ``A`` is its dimension or an abelian Algebra.

    Multiplication: e_i o e_j = e_i ._V e_j, e_i o f_l = f_l > e_i, f_l o f_m = f(f_l, f_m).
    """
    if isinstance(A, Algebra):
        if not A.field.is_zero(A.c):
            raise NotAbelianBase("twisted products need an abelian base algebra")
    else:
        A = abelian(int(A), V_alg.field)
    cs = CrossedSystem(A, V_alg.dim, act, f, V_alg.c)
    return crossed_product(cs, validate=validate)


@dataclass(frozen=True, eq=False)
class ExtensionData:
    """A surjective algebra map ``pi: E -> A`` with a linear section ``s``."""

    E: Algebra
    A: Algebra
    pi: Matrix
    s: Matrix

    def kernel_matrix(self) -> Matrix:
        """Columns form the echelon basis of Ker(pi) used to coordinatize V."""
        basis = kernel_basis(self.pi)
        F = self.E.field
        if not basis:
            return Matrix(F, F.zeros((self.E.dim, 0)))
        return Matrix(F, F.array(basis).T.copy())

    def reconstruction_map(self) -> Matrix:
        """phi(x, a) = x + s(a) as a matrix V (+) A -> E."""
        K = self.kernel_matrix()
        return Matrix(self.E.field, np.concatenate([K.data, self.s.data], axis=1))


def check_extension(ext: ExtensionData):
    E, A, pi, s = ext.E, ext.A, ext.pi, ext.s
    if pi.shape != (A.dim, E.dim) or s.shape != (E.dim, A.dim):
        raise ShapeError("pi must be dim A x dim E and s must be dim E x dim A")
    if rank(pi) != A.dim:
        raise NotSurjective("pi is not surjective")
    if pi @ s != Matrix.identity(E.field, A.dim):
        raise NotSection("pi o s is not the identity on A")
    if not is_algebra_morphism(E, A, pi):
        raise NotMorphism("pi is not an algebra morphism")


def _coords(K: Matrix, v) -> np.ndarray:
    sol = solve_affine(K, v)
    if not sol.consistent:
        raise NotMorphism("a product that should lie in Ker(pi) does not")
    return K.field.array(sol.particular)


def decompose(ext: ExtensionData) -> CrossedSystem:
    """Crossed system of ``E`` along ``pi`` and the section ``s``.

    a > x = s(a) x,  f(a, b) = s(a) s(b) - s(ab),  x ._V y = x y, all computed
    in E and written in the kernel basis of :meth:`ExtensionData.kernel_matrix`.
    """
    check_extension(ext)
    E, A = ext.E, ext.A
    F = E.field
    K = ext.kernel_matrix()
    S = ext.s.data
    m, n = K.cols, A.dim
    act = F.zeros((n, m, m))
    f = F.zeros((n, n, m))
    mV = F.zeros((m, m, m))
    for i in range(n):
        for j in range(m):
            act[i, j] = _coords(K, E.mul(S[:, i], K.data[:, j]))
        for j in range(n):
            sab = F.reduce(S @ A.c[i, j])
            f[i, j] = _coords(K, F.reduce(E.mul(S[:, i], S[:, j]) - sab))
    for i in range(m):
        for j in range(m):
            mV[i, j] = _coords(K, E.mul(K.data[:, i], K.data[:, j]))
    return CrossedSystem(A, m, act, f, mV)


def extension_from_projection(E: Algebra, pi: Matrix, s: Matrix | None = None) -> ExtensionData:
    """Extension data for a surjection ``pi`` out of E; A gets the induced product
    pi(s(a) s(b)).  Without ``s`` a section is solved for column by column."""
    F = E.field
    n = pi.rows
    if pi.cols != E.dim:
        raise ShapeError("pi must have dim E columns")
    if rank(pi) != n:
        raise NotSurjective("pi is not surjective")
    if s is None:
        cols = []
        for i in range(n):
            e = F.zeros(n)
            e[i] = F.one()
            cols.append(F.array(solve_affine(pi, e).particular))
        s = Matrix(F, np.stack(cols, axis=1) if cols else F.zeros((E.dim, 0)))
    c = F.zeros((n, n, n))
    for i in range(n):
        for j in range(n):
            c[i, j] = F.reduce(pi.data @ E.mul(s.data[:, i], s.data[:, j]))
    ext = ExtensionData(E, Algebra(F, c), pi, s)
    check_extension(ext)
    return ext


def quotient_extension(E: Algebra, ideal: Subspace) -> ExtensionData:
    """pi: E -> E/I on coordinates complementary to the echelon pivots of I.

    The coordinate section sends the j-th quotient basis vector to the
    corresponding standard basis vector of E.
    """
    F = E.field
    free = [j for j in range(E.dim) if j not in ideal.pivots]
    N, n = E.dim, len(free)
    pi = F.zeros((n, N))
    for col in range(N):
        red = ideal.reduce(E.basis_vector(col))
        pi[:, col] = red[free]
    s = F.zeros((N, n))
    for k, j in enumerate(free):
        s[j, k] = F.one()
    c = F.zeros((n, n, n))
    for a in range(n):
        for b in range(n):
            c[a, b] = F.reduce(pi @ E.mul(s[:, a], s[:, b]))
    A = Algebra(F, c, tuple(f"{E.labels[j]}_bar" for j in free))
    return ExtensionData(E, A, Matrix(F, pi), Matrix(F, s))


def derived_quotient_extension(E: Algebra) -> ExtensionData:
    """E -> E/E' with the coordinate section (E/E' is abelian)."""
    from .algebra import derived_algebra
    return quotient_extension(E, derived_algebra(E))


def verify_reconstruction(ext: ExtensionData, cs: CrossedSystem) -> dict:
    """Check that phi(x, a) = x + s(a) is an isomorphism V # A -> E over V and A."""
    F = ext.E.field
    prod = crossed_product(cs, validate=False)
    phi = ext.reconstruction_map()
    m, n = cs.v_dim, cs.a_dim
    K = ext.kernel_matrix()
    pi_A = canonical_projection(cs)
    return {
        "morphism": is_algebra_morphism(prod, ext.E, phi),
        "bijective": phi.rows == phi.cols and rank(phi) == phi.rows,
        "stabilizes_V": Matrix(F, phi.data[:, :m]) == K,
        "costabilizes_A": ext.pi @ phi == pi_A,
    }


# -- one-dimensional extensions ------------------------------------------------

@dataclass(frozen=True, eq=False)
class OneDimExtPair:
    """(F, xi) in V x End(V) describing an (m+1)-dimensional algebra over V."""

    V: Algebra
    F: np.ndarray
    xi: Matrix

    def crossed_system(self) -> CrossedSystem:
        fld = self.V.field
        m = self.V.dim
        act = fld.array(self.xi.data.T.reshape(1, m, m))
        f = fld.array(self.F).reshape(1, 1, m)
        return CrossedSystem(abelian(1, fld), m, act, f, self.V.c)

    def check(self) -> dict:
        """Both readings of the pair condition.

        ``"square_form"``: F^2 = 0 and x^2 F + 2 x^2 xi(x) + 2 xi(x)^2 + 2 xi(x) F = 0,
        the specialization of the abelian-base conditions (used for validation).
        ``"linear_form"``: F^2 = 0 and x F + 2 x^2 xi(x) + 2 xi(x)^2 + 2 xi(x) F = 0.
        """
        from .identities import multi_polarization_vanishes
        V, fld = self.V, self.V.field
        Fv = fld.array(self.F)
        xi = self.xi
        mul = V.mul
        f2 = fld.is_zero(mul(Fv, Fv))
        m = V.dim
        if m == 0:
            return {"square_form": True, "linear_form": True}

        def comp(expr, deg):
            ok, _ = multi_polarization_vanishes(expr, fld, [(m, deg)])
            return ok

        common3 = comp(lambda x: fld.reduce(2 * mul(mul(x, x), xi @ x)), 3)
        sq2 = comp(lambda x: fld.reduce(mul(mul(x, x), Fv) + 2 * mul(xi @ x, xi @ x)), 2)
        sq1 = comp(lambda x: fld.reduce(2 * mul(xi @ x, Fv)), 1)
        lin2 = comp(lambda x: fld.reduce(2 * mul(xi @ x, xi @ x)), 2)
        lin1 = comp(lambda x: fld.reduce(mul(x, Fv) + 2 * mul(xi @ x, Fv)), 1)
        return {"square_form": f2 and common3 and sq2 and sq1,
                "linear_form": f2 and common3 and lin2 and lin1}


def one_dim_extension(pair: OneDimExtPair) -> Algebra:
    """Basis (e_1..e_m, f_0) with e_i o e_j = e_i ._V e_j, e_i o f_0 = xi(e_i), f_0^2 = F."""
    if not pair.check()["square_form"]:
        raise InvalidPair("(F, xi) violates the pair conditions")
    cs = pair.crossed_system()
    alg = crossed_product(cs)
    return Algebra(alg.field, alg.c, tuple(pair.V.labels) + ("f0",))


# -- split sections ------------------------------------------------------------

def split_sections(cs: CrossedSystem, *, force: bool = False, budget: int = DEFAULT_BUDGET) -> list[Matrix]:
    """All sections a -> (sigma(a), a) of V # A -> A that are algebra maps."""
    F = cs.field
    F.require_finite("split_sections")
    m, n = cs.v_dim, cs.a_dim
    cost = F.p ** (n * m)
    if cost > budget and not force:
        raise SizeGuard("split_sections", cost, budget)
    prod = crossed_product(cs)
    from .algebra import _morphism_defect
    out = []
    for sig in grid_chunks(F.p, m * n):
        B = sig.shape[0]
        S = np.zeros((B, m + n, n), dtype=np.int64)
        S[:, :m, :] = sig.reshape(B, m, n)
        S[:, m:, :] = np.eye(n, dtype=np.int64)
        if F.dtype is object:
            S = S.astype(object)
        bad = np.any(_morphism_defect(F, cs.A.c, prod.c, S) != 0, axis=(-3, -2, -1))
        out.extend(Matrix(F, S[k]) for k in np.flatnonzero(~bad))
    return out


def is_split(cs: CrossedSystem, **kw) -> bool:
    return bool(split_sections(cs, **kw))


def oracle_agrees(cs: CrossedSystem) -> bool:
    """validate_crossed_system(cs) agrees with is_four_algebra of the raw product table."""
    return validate_crossed_system(cs).ok == is_four_algebra(crossed_product(cs, validate=False)).ok
