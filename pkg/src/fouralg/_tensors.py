"""Batched coefficient tensors of the identities checked in this package.

Every function accepts structure tensors with arbitrary leading batch axes
(``...``) and returns the polarized defect tensor; an identity holds for a
batch element iff its defect is zero.  Slot order of the returned tensors is
documented per function and is the order used for witnesses.
"""

from __future__ import annotations

import numpy as np

from .exactfield import Field
from .identities import symmetrize


def _b(t: np.ndarray, core_ndim: int) -> int:
    return t.ndim - core_ndim


def pairing_defect(F: Field, c: np.ndarray) -> np.ndarray:
    """(e_i e_j)(e_k e_l) + (e_i e_k)(e_j e_l) + (e_i e_l)(e_j e_k), slots (i, j, k, l, out).

    For a commutative table this is 1/8 of the full polarization of (a^2)^2.
    """
    x = F.einsum("...ijs,...stu->...ijtu", c, c)
    p = F.einsum("...klt,...ijtu->...ijklu", c, x)
    return F.reduce(p + np.einsum("...ikjlu->...ijklu", p) + np.einsum("...iljku->...ijklu", p))


def commutator(F: Field, c: np.ndarray) -> np.ndarray:
    return F.reduce(c - np.swapaxes(c, -3, -2))


def cs2_defect(F: Field, cA, act, f, mV) -> np.ndarray:
    """f(a^2,a^2) + f(a,a).f(a,a) + 2 a^2 > f(a,a), polarized; slots (a, a, a, a, out)."""
    y = F.einsum("...ijs,...stu->...ijtu", cA, f)
    t = F.einsum("...klt,...ijtu->...ijklu", cA, y)
    y = F.einsum("...ijs,...stu->...ijtu", f, mV)
    t = t + F.einsum("...klt,...ijtu->...ijklu", f, y)
    y = F.einsum("...ijs,...stu->...ijtu", cA, act)
    t = t + 2 * F.einsum("...klt,...ijtu->...ijklu", f, y)
    t = F.reduce(t)
    b = _b(t, 5)
    return symmetrize(t, F, [range(b, b + 4)])


def cs3_defects(F: Field, cA, act, f, mV) -> dict[str, np.ndarray]:
    """Bihomogeneous components of the twisted module condition.

    ``"22"``: a^2 > x^2 + x^2 . f(a,a) + 2 (a > x)^2, slots (a, a, x, x, out)
    ``"13"``: 2 x^2 . (a > x), slots (a, x, x, x, out)
    ``"31"``: 2 (a > x) . f(a,a) + 2 a^2 > (a > x), slots (a, a, a, x, out)
    """
    y = F.einsum("...ijs,...stu->...ijtu", cA, act)
    u = F.einsum("...klt,...ijtu->...ijklu", mV, y)
    mm = F.einsum("...kls,...stu->...kltu", mV, mV)
    u = u + F.einsum("...ijt,...kltu->...ijklu", f, mm)
    y2 = F.einsum("...iks,...stu->...iktu", act, mV)
    u = F.reduce(u + 2 * F.einsum("...jlt,...iktu->...ijklu", act, y2))
    b = _b(u, 5)
    d22 = symmetrize(u, F, [range(b, b + 2), range(b + 2, b + 4)])

    w = F.reduce(2 * F.einsum("...iqt,...kltu->...iklqu", act, mm))
    d13 = symmetrize(w, F, [range(b + 1, b + 4)])

    y3 = F.einsum("...ils,...stu->...iltu", act, mV)
    v = 2 * F.einsum("...jkt,...iltu->...ijklu", f, y3)
    v = F.reduce(v + 2 * F.einsum("...klt,...ijtu->...ijklu", act, y))
    d31 = symmetrize(v, F, [range(b, b + 3)])
    return {"22": d22, "13": d13, "31": d31}


def module_defect(F: Field, cA, act) -> np.ndarray:
    """a^2 > (a > x), polarized in a; slots (a, a, a, x, out)."""
    y = F.einsum("...ijs,...stu->...ijtu", cA, act)
    t = F.einsum("...klt,...ijtu->...ijklu", act, y)
    b = _b(t, 5)
    return symmetrize(t, F, [range(b, b + 3)])


def abelian_cocycle_defect(F: Field, cA, act, f) -> np.ndarray:
    """f(a^2,a^2) + 2 a^2 > f(a,a), polarized; slots (a, a, a, a, out)."""
    y = F.einsum("...ijs,...stu->...ijtu", cA, f)
    t = F.einsum("...klt,...ijtu->...ijklu", cA, y)
    y = F.einsum("...ijs,...stu->...ijtu", cA, act)
    t = F.reduce(t + 2 * F.einsum("...klt,...ijtu->...ijklu", f, y))
    b = _b(t, 5)
    return symmetrize(t, F, [range(b, b + 4)])


def crossed_product_table(F: Field, cA, act, f, mV) -> np.ndarray:
    """Structure tensor of V # A on the basis (V-basis, then A-basis)."""
    n = cA.shape[-1]
    m = mV.shape[-1]
    batch = np.broadcast_shapes(cA.shape[:-3], act.shape[:-3], f.shape[:-3], mV.shape[:-3])
    N = m + n
    out = F.zeros(batch + (N, N, N))
    out[..., :m, :m, :m] = mV
    out[..., m:, :m, :m] = act
    out[..., :m, m:, :m] = np.swapaxes(act, -3, -2)
    out[..., m:, m:, :m] = f
    out[..., m:, m:, m:] = cA
    return out


def linearized_defects(F: Field, c) -> dict[str, np.ndarray]:
    """Polarized defects of the four identities implied by (a^2)^2 = 0.

    ``"a2(ab)"`` slots (a, a, a, b); ``"a2b2"`` slots (a, a, b, b);
    ``"a2(bc)"`` slots (a, a, b, c); ``"pairing"`` slots (a, b, c, d).
    """
    x = F.einsum("...ijs,...stu->...ijtu", c, c)
    p = F.einsum("...klt,...ijtu->...ijklu", c, x)  # (e_i e_j)(e_k e_l)
    b = _b(p, 5)
    swapped = np.einsum("...ikjlu->...ijklu", p)  # (e_i e_k)(e_j e_l)
    mixed = F.reduce(p + 2 * swapped)
    return {
        "a2(ab)": symmetrize(p, F, [range(b, b + 3)]),
        "a2b2": symmetrize(mixed, F, [range(b, b + 2), range(b + 2, b + 4)]),
        "a2(bc)": symmetrize(mixed, F, [range(b, b + 2)]),
        "pairing": pairing_defect(F, c),
    }
