"""Exact scalars over Q and F_p (p >= 5) and dense exact linear algebra.

Vectors, matrices and structure tensors are numpy arrays whose entries are
canonical scalars of a :class:`Field`: reduced ``Fraction`` objects for Q
(``dtype=object``) and residues ``0..p-1`` for F_p (``int64`` for moderate
primes, Python ints otherwise).  No floating point is ever involved.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import FieldMismatch, ShapeError, UnsupportedOverRationals

# int64 contractions stay exact while n * p**2 < 2**63
_INT64_PRIME_LIMIT = 1 << 20


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for q in small:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    # deterministic for n < 3.3e24
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class Field:
    """The rationals (``p == 0``) or the prime field F_p with p >= 5."""

    p: int = 0

    def __post_init__(self):
        if self.p != 0 and not (self.p >= 5 and is_prime(self.p)):
            raise ValueError(f"characteristic must be 0 or a prime >= 5, got {self.p}")

    @classmethod
    def Q(cls) -> "Field":
        return cls(0)

    @classmethod
    def Fp(cls, p: int) -> "Field":
        return cls(int(p))

    @property
    def kind(self) -> str:
        return "Q" if self.p == 0 else "Fp"

    @property
    def characteristic(self) -> int:
        return self.p

    @property
    def is_finite(self) -> bool:
        return self.p != 0

    @property
    def dtype(self):
        if self.p and self.p < _INT64_PRIME_LIMIT:
            return np.int64
        return object

    def __repr__(self):
        return "Q" if self.p == 0 else f"F_{self.p}"

    # -- scalars -------------------------------------------------------
    def __call__(self, x) -> int | Fraction:
        """Coerce ``x`` (int, Fraction, numpy integer or string) to a canonical scalar."""
        if isinstance(x, str):
            return self.parse(x)
        if self.p == 0:
            return Fraction(x)
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise ZeroDivisionError(f"{x} has no image in {self!r}")
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        return int(x) % self.p

    def parse(self, s: str):
        try:
            return self(Fraction(s.strip()))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"cannot parse {s!r} as an element of {self!r}") from exc

    def format(self, x) -> str:
        return str(self(x))

    def zero(self):
        return self(0)

    def one(self):
        return self(1)

    def inv(self, x):
        x = self(x)
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.p == 0:
            return 1 / x
        return pow(int(x), -1, self.p)

    def elements(self) -> range:
        if self.p == 0:
            raise UnsupportedOverRationals("Q is infinite; enumeration needs F_p")
        return range(self.p)

    def require_finite(self, what: str = "this operation"):
        if self.p == 0:
            raise UnsupportedOverRationals(f"{what} is only available over F_p")

    # -- arrays --------------------------------------------------------
    def array(self, data) -> np.ndarray:
        """Canonical exact array built from nested sequences or an ndarray."""
        if isinstance(data, np.ndarray) and data.dtype != object and self.p:
            return self.reduce(data.astype(self.dtype, copy=True))
        arr = np.array(data, dtype=object)
        flat = [self(x) for x in arr.ravel()]
        out = np.empty(arr.shape, dtype=object)
        out.ravel()[:] = flat if flat else []
        if self.dtype is not object:
            out = out.astype(self.dtype)
        return out

    def zeros(self, shape) -> np.ndarray:
        if self.dtype is object:
            out = np.empty(shape, dtype=object)
            out.fill(self.zero())
            return out
        return np.zeros(shape, dtype=self.dtype)

    def identity(self, n: int) -> np.ndarray:
        out = self.zeros((n, n))
        for i in range(n):
            out[i, i] = self.one()
        return out

    def reduce(self, arr):
        """Bring the result of integer arithmetic back to canonical residues."""
        if self.p == 0:
            return arr
        return arr % self.p

    def einsum(self, spec: str, *ops) -> np.ndarray:
        """Exact einsum of one or two operands (chain longer products by hand
        so that int64 intermediates never overflow)."""
        if len(ops) > 2:
            raise ValueError("contract at most two operands at a time")
        return self.reduce(np.einsum(spec, *ops))

    def is_zero(self, arr) -> bool:
        return not np.any(np.asarray(arr) != 0)

    def key(self, arr) -> tuple:
        """Hashable, order-preserving key of an exact array (row-major)."""
        return tuple(self(x) for x in np.asarray(arr).ravel())


def _check_same_field(*fields):
    first = fields[0]
    for other in fields[1:]:
        if other != first:
            raise FieldMismatch(f"operands live over {first!r} and {other!r}")


@dataclass(frozen=True, eq=False)
class Matrix:
    """Dense exact matrix; also used as the representation of linear maps
    (shape ``codomain_dim x domain_dim``, the image of basis vector ``j`` is
    column ``j``)."""

    field: Field
    data: np.ndarray = dc_field(repr=False)

    def __post_init__(self):
        arr = self.field.array(self.data)
        if arr.ndim != 2:
            if arr.size == 0:
                arr = arr.reshape(0, 0)
            else:
                raise ShapeError(f"matrix data must be 2-dimensional, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @classmethod
    def from_rows(cls, field: Field, rows: Sequence[Sequence], cols: int | None = None) -> "Matrix":
        rows = list(rows)
        if not rows:
            return cls(field, field.zeros((0, cols or 0)))
        return cls(field, field.array(rows))

    @classmethod
    def identity(cls, field: Field, n: int) -> "Matrix":
        return cls(field, field.identity(n))

    @classmethod
    def zero(cls, field: Field, rows: int, cols: int) -> "Matrix":
        return cls(field, field.zeros((rows, cols)))

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self):
        return self.data.shape

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.field == other.field and self.shape == other.shape and not np.any(self.data != other.data)

    def __hash__(self):
        return hash((self.field, self.shape, self.field.key(self.data)))

    def __repr__(self):
        body = [[str(x) for x in row] for row in self.data]
        return f"Matrix({self.field!r}, {body})"

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            _check_same_field(self.field, other.field)
            if self.cols != other.rows:
                raise ShapeError(f"cannot compose {self.shape} with {other.shape}")
            return Matrix(self.field, self.field.reduce(self.data.dot(other.data)))
        vec = self.field.array(other)
        if vec.shape != (self.cols,):
            raise ShapeError(f"vector of length {vec.shape} does not fit {self.shape}")
        return self.field.reduce(self.data.dot(vec))

    def __add__(self, other):
        _check_same_field(self.field, other.field)
        if self.shape != other.shape:
            raise ShapeError(f"cannot add {self.shape} and {other.shape}")
        return Matrix(self.field, self.field.reduce(self.data + other.data))

    def __neg__(self):
        return Matrix(self.field, self.field.reduce(-self.data))

    def __sub__(self, other):
        return self + (-other)

    def column(self, j: int) -> np.ndarray:
        return self.data[:, j]

    def transpose(self) -> "Matrix":
        return Matrix(self.field, self.data.T.copy())

    def inverse(self) -> "Matrix":
        if self.rows != self.cols:
            raise ShapeError("only square matrices are invertible")
        n = self.rows
        aug = np.concatenate([self.data, self.field.identity(n)], axis=1)
        red, piv = rref(self.field, aug)
        if piv != list(range(n)):
            raise ZeroDivisionError("matrix is singular")
        return Matrix(self.field, red[:n, n:].copy())

    def is_invertible(self) -> bool:
        return self.rows == self.cols and rank(self) == self.rows


def rref(field: Field, a: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    a = field.array(a).copy()
    if a.ndim != 2:
        raise ShapeError("rref needs a 2-d array")
    nrows, ncols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.flatnonzero(a[r:, c] != 0)
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            a[[r, k]] = a[[k, r]]
        a[r] = field.reduce(a[r] * field.inv(a[r, c]))
        col = a[:, c].copy()
        col[r] = 0
        if np.any(col != 0):
            a = field.reduce(a - np.outer(col, a[r]))
        pivots.append(c)
        r += 1
    return a[:r], pivots


def _as_matrix(m) -> Matrix:
    if not isinstance(m, Matrix):
        raise TypeError(f"expected Matrix, got {type(m).__name__}")
    return m


def rank(m: Matrix) -> int:
    m = _as_matrix(m)
    if m.rows == 0 or m.cols == 0:
        return 0
    return len(rref(m.field, m.data)[1])


def kernel_basis(m: Matrix) -> list[tuple]:
    """Basis of the right null space, one vector per free column.

    The vector for free column ``j`` has a 1 in position ``j``, zeros at the
    other free columns, and minus the reduced-echelon entries at the pivots.
    """
    m = _as_matrix(m)
    F = m.field
    if m.rows == 0:
        red, piv = F.zeros((0, m.cols)), []
    else:
        red, piv = rref(F, m.data)
    basis = []
    for j in range(m.cols):
        if j in piv:
            continue
        v = F.zeros(m.cols)
        v[j] = F.one()
        for k, pc in enumerate(piv):
            v[pc] = F(-red[k, j])
        basis.append(tuple(F(x) for x in v))
    return basis


@dataclass(frozen=True)
class AffineSolution:
    """Solution set of ``m x = b``: ``particular + span(kernel)``, or
    inconsistent when ``particular`` is None."""

    particular: tuple | None
    kernel: list = dc_field(default_factory=list)

    @property
    def consistent(self) -> bool:
        return self.particular is not None


def solve_affine(m: Matrix, b: Sequence) -> AffineSolution:
    m = _as_matrix(m)
    F = m.field
    if isinstance(b, Matrix):
        _check_same_field(F, b.field)
        b = b.data.ravel()
    bvec = F.array(list(b) if not isinstance(b, np.ndarray) else b)
    if bvec.shape != (m.rows,):
        raise ShapeError(f"right-hand side of length {bvec.shape} does not match {m.rows} rows")
    kern = kernel_basis(m)
    if m.rows == 0:
        return AffineSolution(tuple(F.zero() for _ in range(m.cols)), kern)
    aug = np.concatenate([m.data, bvec.reshape(-1, 1)], axis=1)
    red, piv = rref(F, aug)
    if piv and piv[-1] == m.cols:
        return AffineSolution(None, kern)
    x = F.zeros(m.cols)
    for k, pc in enumerate(piv):
        x[pc] = red[k, m.cols]
    return AffineSolution(tuple(F(v) for v in x), kern)


@dataclass(frozen=True, eq=False)
class Subspace:
    """Subspace of ``field^ambient_dim`` stored by its reduced echelon basis."""

    field: Field
    ambient_dim: int
    basis: np.ndarray = dc_field(repr=False)
    pivots: tuple = ()

    @classmethod
    def span(cls, field: Field, vectors: Iterable, ambient_dim: int) -> "Subspace":
        vecs = [field.array(v) for v in vectors]
        for v in vecs:
            if v.shape != (ambient_dim,):
                raise ShapeError(f"vector {v} is not in a {ambient_dim}-dimensional space")
        if vecs:
            red, piv = rref(field, np.stack(vecs))
        else:
            red, piv = field.zeros((0, ambient_dim)), []
        red.setflags(write=False)
        return cls(field, ambient_dim, red, tuple(piv))

    @property
    def dim(self) -> int:
        return len(self.pivots)

    def vectors(self) -> list[tuple]:
        return [tuple(self.field(x) for x in row) for row in self.basis]

    def reduce(self, v) -> np.ndarray:
        """Lexicographically least member of the coset ``v + self``."""
        F = self.field
        out = F.array(v).copy()
        for row, pc in zip(self.basis, self.pivots):
            if out[pc] != 0:
                out = F.reduce(out - out[pc] * row)
        return out

    def contains(self, v) -> bool:
        return F_is_zero(self.reduce(v))

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return (self.field == other.field and self.ambient_dim == other.ambient_dim
                and self.pivots == other.pivots and not np.any(self.basis != other.basis))

    def __hash__(self):
        return hash((self.field, self.ambient_dim, self.pivots))


def F_is_zero(v) -> bool:
    return not np.any(np.asarray(v) != 0)


def quotient_representatives(field: Field, subspace_basis: Iterable, ambient_dim: int) -> list[tuple]:
    """Canonical representatives of ``F_p^n / W``, in lexicographic order.

    Each representative is the lexicographically least member of its coset:
    it vanishes on the pivot coordinates of W's reduced echelon basis, and the
    remaining coordinates run over all of F_p.
    """
    field.require_finite("quotient_representatives")
    W = Subspace.span(field, subspace_basis, ambient_dim)
    free = [j for j in range(ambient_dim) if j not in W.pivots]
    reps = []
    for values in itertools.product(field.elements(), repeat=len(free)):
        v = [0] * ambient_dim
        for j, x in zip(free, values):
            v[j] = x
        reps.append(tuple(v))
    return reps


def complement_representatives(outer: Subspace, inner: Subspace) -> list[np.ndarray]:
    """Canonical representatives of ``outer / inner`` (inner must lie in outer).

    A complement of ``inner`` inside ``outer`` is enumerated and every element
    is reduced modulo ``inner``, which gives the lexicographically least member
    of each coset.  Returned sorted lexicographically.
    """
    F = outer.field
    F.require_finite("quotient enumeration")
    comp = []
    probe = inner
    for row in outer.basis:
        if not probe.contains(row):
            comp.append(row)
            probe = Subspace.span(F, list(probe.basis) + [row], outer.ambient_dim)
    reps = {}
    for coeffs in itertools.product(F.elements(), repeat=len(comp)):
        v = F.zeros(outer.ambient_dim)
        for c, row in zip(coeffs, comp):
            if c:
                v = F.reduce(v + c * row)
        r = inner.reduce(v)
        reps[F.key(r)] = r
    return [reps[k] for k in sorted(reps)]
