"""Small extended-precision linear algebra helpers shared across modules.

Everything here works on ``mpmath`` matrices at whatever precision is
currently active; callers wrap invocations in ``mp.workprec``.
"""

import mpmath as mp
import numpy as np


def mpmatrix(rows):
    """Build an mpmath matrix from a nested list (or another matrix)."""
    if isinstance(rows, mp.matrix):
        return rows.copy()
    return mp.matrix(rows)


def mpvector(entries):
    """Column vector from a flat iterable."""
    return mp.matrix([[mp.mpmathify(x)] for x in entries])


def identity(d):
    return mp.eye(d)


def zeros_vector(d):
    return mp.matrix(d, 1)


def to_numpy(m):
    """Convert an mpmath matrix/vector to a float64 numpy array."""
    a = np.empty((m.rows, m.cols), dtype=float)
    for i in range(m.rows):
        for j in range(m.cols):
            a[i, j] = float(m[i, j])
    if m.cols == 1:
        return a[:, 0]
    return a


def from_numpy(a):
    a = np.atleast_2d(a)
    return mp.matrix(a.tolist())


def operator_norm(m):
    """Spectral norm via singular values at the active precision."""
    if m.rows == 1 and m.cols == 1:
        return abs(m[0, 0])
    try:
        sv = mp.svd_r(m.copy(), compute_uv=False)
    except Exception:
        sv = mp.svd_c(m.copy(), compute_uv=False)
    return max(abs(s) for s in sv)


def frobenius_norm(m):
    return mp.sqrt(mp.fsum(abs(m[i, j]) ** 2 for i in range(m.rows) for j in range(m.cols)))


def solve(a, b):
    """Solve a x = b for a square mpmath matrix."""
    return mp.lu_solve(a, b)


def dot(u, v):
    """Hermitian inner product <u, v> = sum u_i conj(v_i) on column vectors."""
    return mp.fsum(u[i, 0] * mp.conj(v[i, 0]) for i in range(u.rows))


def vec_norm(u):
    return mp.sqrt(mp.fsum(abs(u[i, 0]) ** 2 for i in range(u.rows)))


def mat_vec(m, v):
    return m * v


def transpose(m):
    return m.T


def rotation_2d(angle):
    """Planar rotation by ``angle`` (mpf radians)."""
    c, s = mp.cos(angle), mp.sin(angle)
    return mp.matrix([[c, -s], [s, c]])


def block_diag(blocks):
    """Block-diagonal matrix from square mpmath blocks."""
    d = sum(b.rows for b in blocks)
    out = mp.matrix(d, d)
    at = 0
    for b in blocks:
        for i in range(b.rows):
            for j in range(b.cols):
                out[at + i, at + j] = b[i, j]
        at += b.rows
    return out


def orthogonality_defect(u):
    """max-entry deviation of u^T u from the identity."""
    g = u.T * u
    d = u.rows
    worst = mp.mpf(0)
    for i in range(d):
        for j in range(d):
            target = 1 if i == j else 0
            worst = max(worst, abs(g[i, j] - target))
    return worst


def matrix_power(m, n):
    """Integer matrix power (n may be negative for orthogonal-scalar inputs)."""
    d = m.rows
    if n == 0:
        return mp.eye(d)
    if n < 0:
        return matrix_power(mp.inverse(m), -n)
    result = None
    base = m.copy()
    while n:
        if n & 1:
            result = base if result is None else result * base
        base = base * base
        n >>= 1
    return result
