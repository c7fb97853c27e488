"""Polynomial identity checking by full polarization.

Two routes are provided and cross-checked in the tests:

* :func:`polarization_vanishes` / :func:`multi_polarization_vanishes` take a
  polynomial map as an evaluation callback and apply the inclusion-exclusion
  polarization on every non-decreasing tuple of basis indices.
* :func:`symmetrize` works on the multilinear coefficient tensor of an
  identity (built with einsum) and sums it over permutations of the slots of
  each variable; the result is exactly the inclusion-exclusion value on the
  corresponding basis tuple, for all tuples at once and for a whole batch of
  structures.

A homogeneous form of degree d <= 4 vanishes identically iff all its
polarizations vanish, provided d! is invertible; every supported field has
characteristic 0 or >= 5.
"""

from __future__ import annotations

import itertools
from typing import Callable, Sequence

import numpy as np

from .errors import UnsupportedDegree
from .exactfield import Field

MAX_DEGREE = 4


def _subset_sums(F: Field, dim: int, idx: tuple):
    """Yield (sign exponent, vector) for every subset S of the tuple positions."""
    d = len(idx)
    for mask in range(1 << d):
        v = F.zeros(dim)
        size = 0
        for pos in range(d):
            if mask >> pos & 1:
                v[idx[pos]] += 1
                size += 1
        yield d - size, F.reduce(v)


def polarization_value(Q: Callable, F: Field, groups: Sequence[tuple[int, int]], tuples: Sequence[tuple]):
    """Inclusion-exclusion polarization of ``Q`` at one tuple per variable group."""
    total = None
    per_group = [list(_subset_sums(F, n, idx)) for (n, _), idx in zip(groups, tuples)]
    for combo in itertools.product(*per_group):
        sign = sum(s for s, _ in combo) % 2
        val = F.array(Q(*[v for _, v in combo]))
        term = -val if sign else val
        total = term if total is None else total + term
    return F.reduce(total)


def multi_polarization_vanishes(Q: Callable, F: Field, groups: Sequence[tuple[int, int]]):
    """Check that a multi-homogeneous map vanishes on all arguments.

    ``groups`` lists ``(dim, degree)`` for each vector argument of ``Q``;
    ``Q(*vectors)`` must return an exact vector (or scalar).  Returns
    ``(True, None)`` or ``(False, witness)`` where the witness is the first
    violating tuple of non-decreasing basis indices per group, in
    lexicographic order.
    """
    for _, d in groups:
        if d > MAX_DEGREE:
            raise UnsupportedDegree(f"degree {d} > {MAX_DEGREE} is not supported")
    ranges = [list(itertools.combinations_with_replacement(range(n), d)) for n, d in groups]
    for tuples in itertools.product(*ranges):
        if not F.is_zero(polarization_value(Q, F, groups, tuples)):
            return False, tuples
    return True, None


def polarization_vanishes(Q: Callable, F: Field, dim: int, degree: int):
    """Single-variable form of :func:`multi_polarization_vanishes`."""
    ok, witness = multi_polarization_vanishes(Q, F, [(dim, degree)])
    return ok, (witness[0] if witness else None)


def exhaustive_vanishes(Q: Callable, F: Field, dims: Sequence[int]) -> bool:
    """Evaluate ``Q`` on every tuple of vectors of F_p^dims (test oracle)."""
    F.require_finite("exhaustive evaluation")
    spaces = [list(itertools.product(F.elements(), repeat=n)) for n in dims]
    for args in itertools.product(*spaces):
        if not F.is_zero(F.array(Q(*[F.array(a) for a in args]))):
            return False
    return True


# -- tensor route -------------------------------------------------------------

def symmetrize(T: np.ndarray, F: Field, groups: Sequence[Sequence[int]]) -> np.ndarray:
    """Sum ``T`` over all permutations of each group of axes.

    Axis numbers are absolute, so callers holding a batch of tensors offset
    them by the number of leading batch axes.
    """
    out = T
    for axes in groups:
        axes = list(axes)
        if len(axes) < 2:
            continue
        acc = None
        for perm in itertools.permutations(axes):
            order = list(range(T.ndim))
            for src, dst in zip(axes, perm):
                order[src] = dst
            term = np.transpose(out, order)
            acc = term if acc is None else acc + term
        out = F.reduce(acc)
    return out


def first_nonzero(T: np.ndarray):
    """Index tuple of the first nonzero entry in row-major order, or None."""
    nz = np.argwhere(np.asarray(T) != 0)
    if nz.size == 0:
        return None
    return tuple(int(i) for i in nz[0])


def nonzero_batch(T: np.ndarray, batch_ndim: int) -> np.ndarray:
    """Boolean array over the batch axes: does any core entry differ from 0?"""
    if batch_ndim == 0:
        return np.asarray(np.any(T != 0))
    core = tuple(range(batch_ndim, T.ndim))
    return np.any(T != 0, axis=core) if core else (T != 0)
