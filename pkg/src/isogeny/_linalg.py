"""Dense linear algebra over prime fields F_p for small p.

Characteristic 2 packs matrix rows into Python ints and eliminates with
bit operations; odd characteristic uses vectorised int64 row reduction.
Matrix products go through BLAS on float64, which is exact here: entries
are < p <= 7 and inner dimensions stay far below the 2**53 limit.
"""

from __future__ import annotations

import numpy as np


class SingularMatrixError(ValueError):
    pass


def matmul_mod(a, b, p):
    """(a @ b) mod p, exact, via float64 BLAS."""
    af = np.ascontiguousarray(a, dtype=np.float64)
    bf = np.ascontiguousarray(b, dtype=np.float64)
    out = af @ bf
    return np.rint(out).astype(np.int64) % p


def matvec_mod(m, v, p):
    mf = np.ascontiguousarray(m, dtype=np.float64)
    vf = np.ascontiguousarray(v, dtype=np.float64)
    return np.rint(mf @ vf).astype(np.int64) % p


def _rows_to_bits(a):
    """Rows of a 0/1 matrix as Python ints, bit j = column j."""
    out = []
    for row in a:
        x = 0
        for j in np.nonzero(row)[0][::-1]:
            x |= 1 << int(j)
        out.append(x)
    return out


def _bits_to_rows(bits, ncols):
    out = np.zeros((len(bits), ncols), dtype=np.int64)
    for i, x in enumerate(bits):
        j = 0
        while x:
            if x & 1:
                out[i, j] = 1
            x >>= 1
            j += 1
    return out


def _rref_gf2(a, ncols_reduce):
    """Row-reduce over GF(2).  Returns (rows, transform, pivots): rows and
    transform are bit-packed ints with transform @ a == rows."""
    m = len(a)
    rows = list(a)
    trans = [1 << i for i in range(m)]
    pivots = []
    r = 0
    for c in range(ncols_reduce):
        bit = 1 << c
        pr = None
        for i in range(r, m):
            if rows[i] & bit:
                pr = i
                break
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        trans[r], trans[pr] = trans[pr], trans[r]
        for i in range(m):
            if i != r and (rows[i] & bit):
                rows[i] ^= rows[r]
                trans[i] ^= trans[r]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return rows, trans, pivots


def _rref_odd(a, p, ncols_reduce):
    """Row-reduce over F_p, p odd.  Returns (R, L, pivots), L @ a == R."""
    a = np.array(a, dtype=np.int64) % p
    m = a.shape[0]
    lmat = np.eye(m, dtype=np.int64)
    pivots = []
    r = 0
    for c in range(ncols_reduce):
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            a[[r, pr]] = a[[pr, r]]
            lmat[[r, pr]] = lmat[[pr, r]]
        inv = pow(int(a[r, c]), p - 2, p)
        a[r] = a[r] * inv % p
        lmat[r] = lmat[r] * inv % p
        col = a[:, c].copy()
        col[r] = 0
        sel = np.nonzero(col)[0]
        if sel.size:
            a[sel] = (a[sel] - np.outer(col[sel], a[r])) % p
            lmat[sel] = (lmat[sel] - np.outer(col[sel], lmat[r])) % p
        pivots.append(c)
        r += 1
        if r == m:
            break
    return a, lmat, pivots


def inv_mod(a, p):
    """Inverse of a square matrix over F_p; raises SingularMatrixError."""
    a = np.asarray(a, dtype=np.int64) % p
    n = a.shape[0]
    if n == 0:
        return a.copy()
    if p == 2:
        bits = _rows_to_bits(a)
        rows, trans, pivots = _rref_gf2(bits, n)
        if len(pivots) != n:
            raise SingularMatrixError("matrix not invertible mod 2")
        return _bits_to_rows(trans, n)
    r, lmat, pivots = _rref_odd(a, p, n)
    if len(pivots) != n:
        raise SingularMatrixError("matrix not invertible mod %d" % p)
    return lmat


class LinearSolver:
    """Cached row reduction of a fixed matrix, reusable on many rhs."""

    def __init__(self, a, p):
        a = np.asarray(a, dtype=np.int64) % p
        self.p = p
        self.shape = a.shape
        m, n = a.shape
        if p == 2:
            rows, trans, pivots = _rref_gf2(_rows_to_bits(a), n)
            self._l = _bits_to_rows(trans, m)
        else:
            _, self._l, pivots = _rref_odd(a, p, n)
            rows = None
        self.pivots = pivots
        self.rank = len(pivots)

    def solve(self, b):
        """One solution of a @ x = b (free variables set to 0), or None if
        the system is inconsistent."""
        p = self.p
        m, n = self.shape
        y = matvec_mod(self._l, np.asarray(b, dtype=np.int64) % p, p)
        if np.any(y[self.rank:] != 0):
            return None
        x = np.zeros(n, dtype=np.int64)
        for i, c in enumerate(self.pivots):
            x[c] = y[i]
        return x


def solve_mod(a, b, p):
    sol = LinearSolver(a, p).solve(b)
    if sol is None:
        raise SingularMatrixError("inconsistent linear system mod %d" % p)
    return sol


def left_inverse(e, p):
    """Left inverse of a full-column-rank (N, n) matrix over F_p.

    Returns L of shape (n, N) with L @ e == I_n.  Solves e^T y = unit
    vector for each unit vector of F_p^n; e^T has full row rank so every
    such system is consistent.
    """
    e = np.asarray(e, dtype=np.int64) % p
    big_n, n = e.shape
    solver = LinearSolver(e.T, p)
    if solver.rank != n:
        raise SingularMatrixError("embedding matrix not injective")
    eye = np.eye(n, dtype=np.int64)
    lt = np.zeros((big_n, n), dtype=np.int64)
    for j in range(n):
        y = solver.solve(eye[:, j])
        if y is None:
            raise SingularMatrixError("embedding matrix not injective")
        lt[:, j] = y
    return lt.T % p
