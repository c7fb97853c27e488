"""Vectorized enumeration helpers over F_p (batched elimination, GL_n, grids)."""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from .exactfield import Field

CHUNK = 1 << 16


@lru_cache(maxsize=None)
def _inverse_table(p: int) -> np.ndarray:
    tab = np.zeros(p, dtype=np.int64)
    for x in range(1, p):
        tab[x] = pow(x, -1, p)
    return tab


def batch_rref(M: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Row-reduce a batch of matrices mod p; returns (reduced, rank per matrix)."""
    M = np.array(M, dtype=np.int64) % p
    B, r, c = M.shape
    inv = _inverse_table(p)
    rank = np.zeros(B, dtype=np.int64)
    rows = np.arange(r)
    bidx = np.arange(B)
    for j in range(c):
        cand = (M[:, :, j] != 0) & (rows[None, :] >= rank[:, None])
        has = cand.any(axis=1)
        if not has.any():
            continue
        piv = np.argmax(cand, axis=1)
        tgt = np.minimum(rank, r - 1)
        sel = bidx[has]
        a, b = piv[sel], tgt[sel]
        row_a = M[sel, a].copy()
        M[sel, a] = M[sel, b]
        M[sel, b] = row_a
        pr = M[sel, b] * inv[M[sel, b, j]][:, None] % p
        M[sel, b] = pr
        factors = M[sel, :, j].copy()
        factors[np.arange(sel.size), b] = 0
        M[sel] = (M[sel] - factors[:, :, None] * pr[:, None, :]) % p
        rank[sel] += 1
    return M, rank


def batch_inverse(M: np.ndarray, p: int) -> np.ndarray:
    """Inverses of a batch of invertible n x n matrices mod p."""
    B, n, _ = M.shape
    eye = np.broadcast_to(np.eye(n, dtype=np.int64), (B, n, n))
    red, rk = batch_rref(np.concatenate([M, eye], axis=2), p)
    return red[:, :, n:]


def digits(codes: np.ndarray, p: int, length: int) -> np.ndarray:
    """Base-p expansion, most significant digit first."""
    out = np.empty((codes.size, length), dtype=np.int64)
    x = codes.astype(np.int64).copy()
    for pos in range(length - 1, -1, -1):
        out[:, pos] = x % p
        x //= p
    return out


def grid(p: int, length: int, start: int = 0, stop: int | None = None) -> np.ndarray:
    """All vectors of F_p^length with codes in [start, stop), lexicographic order."""
    total = p ** length
    stop = total if stop is None else min(stop, total)
    return digits(np.arange(start, stop, dtype=np.int64), p, length)


def grid_chunks(p: int, length: int, chunk: int = CHUNK):
    total = p ** length
    for start in range(0, total, chunk):
        yield grid(p, length, start, start + chunk)


def gl_matrices(F: Field, n: int, chunk: int = CHUNK):
    """Yield batches of GL_n(F_p) in lexicographic (row-major) order."""
    F.require_finite("GL_n enumeration")
    p = F.p
    if n == 0:
        yield np.zeros((1, 0, 0), dtype=np.int64)
        return
    for flat in grid_chunks(p, n * n, chunk):
        mats = flat.reshape(flat.shape[0], n, n)
        _, rk = batch_rref(mats, p)
        keep = mats[rk == n]
        if keep.size:
            yield keep


def gl_list(F: Field, n: int) -> np.ndarray:
    chunks = list(gl_matrices(F, n))
    return np.concatenate(chunks) if chunks else np.zeros((0, n, n), dtype=np.int64)


def gl_order(p: int, n: int) -> int:
    out = 1
    for k in range(n):
        out *= p ** n - p ** k
    return out


def sym_pairs(n: int) -> list[tuple[int, int]]:
    return list(itertools.combinations_with_replacement(range(n), 2))


def sym_from_coords(coords: np.ndarray, n: int, out_dim: int) -> np.ndarray:
    """Symmetric tensors (..., n, n, out_dim) from upper-triangular coordinates.

    Coordinates are ordered by pair (i <= j) and then output index.
    """
    pairs = sym_pairs(n)
    batch = coords.shape[:-1]
    coords = coords.reshape(batch + (len(pairs), out_dim))
    out = np.zeros(batch + (n, n, out_dim), dtype=coords.dtype)
    for k, (i, j) in enumerate(pairs):
        out[..., i, j, :] = coords[..., k, :]
        out[..., j, i, :] = coords[..., k, :]
    return out


def sym_coords(t: np.ndarray) -> np.ndarray:
    """Inverse of :func:`sym_from_coords`."""
    n = t.shape[-2]
    pairs = sym_pairs(n)
    parts = [t[..., i, j, :] for i, j in pairs]
    if not parts:
        return np.zeros(t.shape[:-3] + (0,), dtype=t.dtype)
    return np.stack(parts, axis=-2).reshape(t.shape[:-3] + (-1,))


def encode(rows: np.ndarray, p: int) -> np.ndarray:
    """Order-preserving integer codes of digit rows (as Python ints if needed)."""
    rows = np.asarray(rows)
    length = rows.shape[-1]
    if p ** length < 2 ** 62:
        weights = np.array([p ** (length - 1 - k) for k in range(length)], dtype=np.int64)
        return rows.astype(np.int64) @ weights
    out = np.zeros(rows.shape[:-1], dtype=object)
    for k in range(length):
        out = out * p + rows[..., k].astype(object)
    return out
