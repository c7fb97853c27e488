"""Independent brute-force oracles shared by the tests.

Everything here evaluates definitions directly on all vectors of F_p^n (or
on explicit basis loops) and never calls the polarization engine.
"""

import itertools

import numpy as np


def all_vectors(p, n):
    return np.array(list(itertools.product(range(p), repeat=n)), dtype=np.int64).reshape(-1, n)


def mul(c, u, v, p):
    """Rows of u times rows of v under table c."""
    return np.einsum("ni,nj,ijk->nk", u, v, c) % p


def four_algebra_by_evaluation(c, p):
    """Commutative and (a^2)^2 = 0 at every a in F_p^n."""
    c = np.asarray(c, dtype=np.int64)
    if np.any(c != np.swapaxes(c, 0, 1)):
        return False
    X = all_vectors(p, c.shape[0])
    a2 = mul(c, X, X, p)
    return not np.any(mul(c, a2, a2, p))


def identities_by_evaluation(c, p):
    """The four linearized identities evaluated on every tuple of vectors.

    Y[a, b, c, d] = (ab)(cd) is computed once for all 4-tuples of points of
    F_p^n; each identity is then a sum of index permutations of Y.
    """
    c = np.asarray(c, dtype=np.int64)
    n = c.shape[0]
    X = all_vectors(p, n)
    N = X.shape[0]
    ab = np.einsum("xi,yj,ijk->xyk", X, X, c) % p  # (N, N, n)
    P = ab.reshape(N * N, n)
    Y = (np.einsum("ui,vj,ijk->uvk", P, P, c) % p).reshape(N, N, N, N, n)
    i = np.arange(N)
    out = {}
    out["a2(ab)"] = not np.any(Y[i, i, i, :])
    aabb = Y[i[:, None], i[:, None], i[None, :], i[None, :]]
    abab = Y[i[:, None], i[None, :], i[:, None], i[None, :]]
    out["a2b2"] = not np.any((aabb + 2 * abab) % p)
    aabc = Y[i, i]  # (a^2)(bc): axes a, b, c
    abac = Y[i[:, None, None], i[None, :, None], i[:, None, None], i[None, None, :]]
    out["a2(bc)"] = not np.any((aabc + 2 * abac) % p)
    pairing = Y + np.transpose(Y, (0, 2, 1, 3, 4)) + np.transpose(Y, (0, 2, 3, 1, 4))
    out["pairing"] = not np.any(pairing % p)
    return out


def crossed_table_by_loops(A_c, act, f, mV, p):
    """(x,a)(y,b) = (x.y + a>y + b>x + f(a,b), ab) on basis pairs, V first."""
    n, m = A_c.shape[0], mV.shape[0]
    N = m + n
    c = np.zeros((N, N, N), dtype=np.int64)
    for u in range(N):
        for v in range(N):
            out = np.zeros(N, dtype=np.int64)
            if u < m and v < m:
                out[:m] += mV[u, v]
            elif u >= m and v < m:
                out[:m] += act[u - m, v]
            elif u < m and v >= m:
                out[:m] += act[v - m, u]
            else:
                out[:m] += f[u - m, v - m]
                out[m:] += A_c[u - m, v - m]
            c[u, v] = out % p
    return c
