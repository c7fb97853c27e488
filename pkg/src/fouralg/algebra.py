"""Finite-dimensional commutative algebras given by structure constants.

An :class:`Algebra` stores ``c[i, j, k]`` with ``e_i e_j = sum_k c[i, j, k] e_k``.
Linear maps are :class:`~fouralg.exactfield.Matrix` objects of shape
``codomain x domain``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from typing import NamedTuple, Sequence

import numpy as np

from . import _tensors as T
from ._batch import gl_matrices
from .errors import FieldMismatch, NotSymmetric, ShapeError, SizeGuard, UnsupportedOverRationals
from .exactfield import Field, Matrix, Subspace
from .identities import first_nonzero, multi_polarization_vanishes, nonzero_batch

DEFAULT_BUDGET = 10**8


@dataclass(frozen=True, eq=False)
class Algebra:
    field: Field
    c: np.ndarray = dc_field(repr=False)
    labels: tuple = ()

    def __post_init__(self):
        arr = self.field.array(self.c)
        if arr.size == 0:
            n = arr.shape[0] if arr.ndim else 0
            arr = self.field.zeros((n, n, n))
        if arr.ndim != 3 or not (arr.shape[0] == arr.shape[1] == arr.shape[2]):
            raise ShapeError(f"structure tensor must be n x n x n, got {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "c", arr)
        labels = tuple(self.labels) if self.labels else tuple(f"e{i + 1}" for i in range(arr.shape[0]))
        if len(labels) != arr.shape[0]:
            raise ShapeError("one label per basis vector is required")
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_products(cls, field: Field, dim: int, products: dict, labels=()) -> "Algebra":
        """Build from ``{(i, j): {k: coeff}}``; each pair is completed symmetrically."""
        c = field.zeros((dim, dim, dim))
        for (i, j), coeffs in products.items():
            for k, v in coeffs.items():
                c[i, j, k] = field(v)
                c[j, i, k] = field(v)
        return cls(field, c, tuple(labels))

    @property
    def dim(self) -> int:
        return self.c.shape[0]

    def __eq__(self, other):
        if not isinstance(other, Algebra):
            return NotImplemented
        return self.field == other.field and self.c.shape == other.c.shape and not np.any(self.c != other.c)

    def __hash__(self):
        return hash((self.field, self.field.key(self.c)))

    def __repr__(self):
        rows = []
        for i, j in itertools.combinations_with_replacement(range(self.dim), 2):
            v = self.c[i, j]
            if np.any(v != 0):
                rows.append(f"{self.labels[i]}*{self.labels[j]}={_fmt_vec(v, self.labels)}")
        return f"Algebra({self.field!r}, dim={self.dim}, {', '.join(rows) or 'abelian'})"

    def mul(self, u, v) -> np.ndarray:
        F = self.field
        w = F.einsum("i,ijk->jk", F.array(u), self.c)
        return F.einsum("j,jk->k", F.array(v), w)

    def square(self, u) -> np.ndarray:
        return self.mul(u, u)

    def basis_vector(self, i: int) -> np.ndarray:
        v = self.field.zeros(self.dim)
        v[i] = self.field.one()
        return v

    def table_key(self) -> tuple:
        """Flattened upper-triangular table (pairs i <= j, then k), canonical order."""
        F = self.field
        return tuple(F(self.c[i, j, k]) for i, j in itertools.combinations_with_replacement(range(self.dim), 2)
                     for k in range(self.dim))


def _fmt_vec(v, labels):
    terms = []
    for k, x in enumerate(v):
        if x != 0:
            terms.append(labels[k] if x == 1 else f"{x}{labels[k]}")
    return "+".join(terms) or "0"


# -- axioms -----------------------------------------------------------------

def is_commutative(A: Algebra) -> bool:
    return A.field.is_zero(T.commutator(A.field, A.c))


class Check(NamedTuple):
    ok: bool
    witness: tuple | None = None

    def __bool__(self):
        return self.ok


def is_four_algebra(A: Algebra) -> Check:
    """Commutativity plus (a^2)^2 = 0 for all a.

    The witness is ``("commutative", (i, j, k))`` or ``("square", (i, j, k, l))``,
    the lexicographically first violating basis tuple.
    """
    F = A.field
    comm = T.commutator(F, A.c)
    w = first_nonzero(comm)
    if w is not None:
        return Check(False, ("commutative", w[:3]))
    w = first_nonzero(T.pairing_defect(F, A.c))
    if w is not None:
        return Check(False, ("square", w[:4]))
    return Check(True)


_GROUPS = {"a2(ab)": (3, 1), "a2b2": (2, 2), "a2(bc)": (2, 1, 1), "pairing": (1, 1, 1, 1)}


def linearized_identities(A: Algebra) -> dict[str, Check]:
    """The four identities every 4-algebra satisfies, checked by polarization.

    Keys: ``"a2(ab)"``: a^2(ab) = 0; ``"a2b2"``: a^2 b^2 + 2 (ab)^2 = 0;
    ``"a2(bc)"``: a^2 (bc) + 2 (ab)(ac) = 0;
    ``"pairing"``: (ab)(cd) + (ac)(bd) + (ad)(bc) = 0.

    A witness lists one non-decreasing tuple of basis indices per variable.
    """
    out = {}
    for name, d in T.linearized_defects(A.field, A.c).items():
        w = first_nonzero(d)
        if w is None:
            out[name] = Check(True)
            continue
        tuples, pos = [], 0
        for k in _GROUPS[name]:
            tuples.append(tuple(w[pos:pos + k]))
            pos += k
        out[name] = Check(False, tuple(tuples))
    return out


def linearized_identities_by_callback(A: Algebra) -> dict[str, Check]:
    """Same checks evaluated through the multiplication map (slower; used as
    a cross-check of the tensor route)."""
    F, n, m = A.field, A.dim, A.mul
    checks = {
        "a2(ab)": (lambda a, b: m(m(a, a), m(a, b)), [(n, 3), (n, 1)]),
        "a2b2": (lambda a, b: F.reduce(m(m(a, a), m(b, b)) + 2 * m(m(a, b), m(a, b))), [(n, 2), (n, 2)]),
        "a2(bc)": (lambda a, b, c: F.reduce(m(m(a, a), m(b, c)) + 2 * m(m(a, b), m(a, c))),
                   [(n, 2), (n, 1), (n, 1)]),
        "pairing": (lambda a, b, c, d: F.reduce(m(m(a, b), m(c, d)) + m(m(a, c), m(b, d)) + m(m(a, d), m(b, c))),
                    [(n, 1)] * 4),
    }
    out = {}
    for name, (Q, groups) in checks.items():
        if n == 0:
            out[name] = Check(True)
            continue
        ok, wit = multi_polarization_vanishes(Q, F, groups)
        out[name] = Check(ok, wit)
    return out


check_linearized_identities = linearized_identities


def linearized_identities_batch(F: Field, c: np.ndarray) -> dict[str, np.ndarray]:
    """Tensor-route version of :func:`linearized_identities` for a batch of
    tables (..., n, n, n); returns one boolean mask per identity."""
    out = {}
    for name, d in T.linearized_defects(F, c).items():
        out[name] = ~nonzero_batch(d, d.ndim - 5)
    return out


def derived_algebra(A: Algebra) -> Subspace:
    vecs = [A.c[i, j] for i in range(A.dim) for j in range(i, A.dim)]
    return Subspace.span(A.field, vecs, A.dim)


def is_metabelian(A: Algebra) -> bool:
    """(ab)(cd) = 0 for all a, b, c, d, checked on spanning products."""
    F = A.field
    x = F.einsum("ijs,stu->ijtu", A.c, A.c)
    p = F.einsum("klt,ijtu->ijklu", A.c, x)
    return F.is_zero(p)


def is_module(A: Algebra, v_dim: int, act) -> Check:
    """a^2 > (a > x) = 0; ``act`` has shape (dim A, v_dim, v_dim)."""
    F = A.field
    act = F.array(act)
    if act.shape != (A.dim, v_dim, v_dim):
        raise ShapeError(f"action must have shape {(A.dim, v_dim, v_dim)}, got {act.shape}")
    w = first_nonzero(T.module_defect(F, A.c, act))
    return Check(True) if w is None else Check(False, w[:4])


def is_algebra_morphism(A: Algebra, B: Algebra, phi: Matrix) -> bool:
    """phi(e_i e_j) == phi(e_i) phi(e_j) for all basis pairs."""
    if A.field != B.field or phi.field != A.field:
        raise FieldMismatch("algebras and map must share a field")
    if phi.shape != (B.dim, A.dim):
        raise ShapeError(f"map of shape {phi.shape} does not go from dim {A.dim} to dim {B.dim}")
    return not np.any(_morphism_defect(A.field, A.c, B.c, phi.data) != 0)


def _morphism_defect(F: Field, cA, cB, P):
    """phi(e_i e_j) - phi(e_i)phi(e_j); ``P`` may carry leading batch axes."""
    lhs = F.einsum("...ks,ijs->...ijk", P, cA)
    y = F.einsum("...si,stk->...itk", P, cB)
    rhs = F.einsum("...tj,...itk->...ijk", P, y)
    return F.reduce(lhs - rhs)


def find_isomorphism(A: Algebra, B: Algebra, *, max_dim: int = 3, force: bool = False,
                     budget: int = DEFAULT_BUDGET) -> Matrix | None:
    """First isomorphism A -> B in lexicographic (row-major) matrix order, or None."""
    F = A.field
    if F.p == 0:
        raise UnsupportedOverRationals("find_isomorphism enumerates GL_n(F_p)")
    if A.dim != B.dim:
        return None
    n = A.dim
    if n > max_dim and not force:
        raise SizeGuard(f"find_isomorphism in dimension {n}", F.p ** (n * n), F.p ** (max_dim * max_dim))
    if F.p ** (n * n) > budget and not force:
        raise SizeGuard("find_isomorphism", F.p ** (n * n), budget)
    if derived_algebra(A).dim != derived_algebra(B).dim or is_metabelian(A) != is_metabelian(B):
        return None
    for chunk in gl_matrices(F, n):
        bad = np.any(_morphism_defect(F, A.c, B.c, chunk) != 0, axis=(-3, -2, -1))
        hits = np.flatnonzero(~bad)
        if hits.size:
            return Matrix(F, chunk[hits[0]])
    return None


def transport(A: Algebra, P: np.ndarray) -> np.ndarray:
    """Table c' with P: (k^n, c') -> A an isomorphism, i.e. c'(x,y) = P^{-1}c(Px, Py)."""
    F = A.field
    Pinv = Matrix(F, P).inverse().data
    y = F.einsum("si,stk->itk", P, A.c)
    prod = F.einsum("tj,itk->ijk", P, y)
    return F.einsum("lk,ijk->ijl", Pinv, prod)


# -- builders ---------------------------------------------------------------

def _F(field):
    return field if field is not None else Field.Q()


def abelian(n: int, field: Field | None = None) -> Algebra:
    F = _F(field)
    return Algebra(F, F.zeros((n, n, n)))


def dim2_A1(field: Field | None = None) -> Algebra:
    """e1^2 = e2."""
    return Algebra.from_products(_F(field), 2, {(0, 0): {1: 1}})


def dim2_A2(field: Field | None = None) -> Algebra:
    """e1 e2 = e2."""
    return Algebra.from_products(_F(field), 2, {(0, 1): {1: 1}})


def heisenberg(n: int, field: Field | None = None) -> Algebra:
    """h(2n+1): basis e_1..e_n, f_1..f_n, z with e_i f_i = z."""
    F = _F(field)
    dim = 2 * n + 1
    prods = {(i, n + i): {dim - 1: 1} for i in range(n)}
    labels = [f"e{i + 1}" for i in range(n)] + [f"f{i + 1}" for i in range(n)] + ["z"]
    return Algebra.from_products(F, dim, prods, labels)


def met(n: int, m: int, act, f, field: Field | None = None) -> Algebra:
    """Met_n^m(act, f): basis e_1..e_n (of k^n), f_1..f_m (of k^m).

    ``act[j, i, :]`` is f_j > e_i in k^n (shape m x n x n); ``f[j, l, :]`` is
    f(f_j, f_l) in k^n (shape m x m x n) and must be symmetric.
    """
    F = _F(field)
    act = F.array(act).reshape(m, n, n)
    f = F.array(f).reshape(m, m, n)
    if np.any(f != np.swapaxes(f, 0, 1)):
        raise NotSymmetric("f must be symmetric")
    c = T.crossed_product_table(F, F.zeros((m, m, m)), act, f, F.zeros((n, n, n)))
    labels = [f"e{i + 1}" for i in range(n)] + [f"f{j + 1}" for j in range(m)]
    return Algebra(F, c, tuple(labels))


def example33(n: int, field: Field | None = None) -> Algebra:
    """Basis e_1..e_{n+1} with e_1 e_2 = e_{n+1}; for n = 1 this reads e_1 e_2 = e_2."""
    if n < 1:
        raise ValueError("example33 needs n >= 1")
    return Algebra.from_products(_F(field), n + 1, {(0, 1): {n: 1}})


def algebra_report(A: Algebra) -> dict:
    """Summary used by the ``validate`` command."""
    four = is_four_algebra(A)
    report = {
        "dim": A.dim,
        "is_commutative": is_commutative(A),
        "is_four_algebra": four.ok,
        "witness": list(four.witness[1]) if four.witness else None,
        "derived_dim": derived_algebra(A).dim,
        "metabelian": is_metabelian(A),
    }
    if four.ok:
        report["linearized_identities"] = {k: v.ok for k, v in linearized_identities(A).items()}
    return report
