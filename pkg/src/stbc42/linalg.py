"""Small dense complex/real linear-algebra kernel.

Complex matrices are plain ``numpy`` arrays (``complex128``, row major), real
matrices are ``float64`` arrays.  Everything here is sized for the 4x2 MIMO
problem (nothing larger than 32x16), so the implementations favour exactness
and a fixed, testable convention over BLAS-level throughput.

Conventions
-----------
* ``realify(x)`` maps a complex scalar to ``[[Re, -Im], [Im, Re]]``.
* ``tilde_vec(x)`` interleaves real/imaginary parts:
  ``[x1.re, x1.im, x2.re, x2.im, ...]``.
* ``vec_stack(X)`` stacks columns (column-major flatten).

These fit together: ``realify_matrix(H) @ tilde_vec(x) == tilde_vec(H @ x)``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import RankDeficient

# Relative tolerances used by the factorization / identity checks.
FACTOR_TOL = 1e-10
IDENTITY_TOL = 1e-12
RANK_TOL = 1e-12


def realify(x: complex) -> np.ndarray:
    """2x2 real image of a complex scalar: ``[[Re, -Im], [Im, Re]]``."""
    x = complex(x)
    return np.array([[x.real, -x.imag], [x.imag, x.real]])


def realify_matrix(h: np.ndarray) -> np.ndarray:
    """Blockwise realification: entry (j, k) becomes its 2x2 real block.

    The output has shape ``(2*rows, 2*cols)`` and satisfies
    ``realify_matrix(H) @ tilde_vec(x) == tilde_vec(H @ x)``.
    """
    h = np.asarray(h, dtype=np.complex128)
    rows, cols = h.shape
    out = np.empty((2 * rows, 2 * cols))
    out[0::2, 0::2] = h.real
    out[0::2, 1::2] = -h.imag
    out[1::2, 0::2] = h.imag
    out[1::2, 1::2] = h.real
    return out


def tilde_vec(x: np.ndarray) -> np.ndarray:
    """Interleave real and imaginary parts of a complex vector."""
    x = np.asarray(x, dtype=np.complex128).ravel()
    out = np.empty(2 * x.size)
    out[0::2] = x.real
    out[1::2] = x.imag
    return out


def untilde_vec(x: np.ndarray) -> np.ndarray:
    """Inverse of :func:`tilde_vec`."""
    x = np.asarray(x, dtype=np.float64).ravel()
    if x.size % 2:
        raise ValueError("interleaved vector must have even length")
    return x[0::2] + 1j * x[1::2]


def vec_stack(x: np.ndarray) -> np.ndarray:
    """Stack the columns of a matrix one below another."""
    return np.asarray(x).T.reshape(-1)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product (thin wrapper, kept for a uniform surface)."""
    return np.kron(a, b)


@dataclass(frozen=True)
class QrFactorization:
    """Gram-Schmidt QR factorization of a tall real matrix.

    ``q`` has orthonormal columns, ``r`` is upper triangular with a
    nonnegative diagonal (the strict lower triangle is exactly zero by
    construction), and ``colnorms[j]`` is the norm of the j-th residual
    column, i.e. the diagonal entry ``r[j, j]``.
    """

    q: np.ndarray
    r: np.ndarray
    colnorms: np.ndarray


def qr_decompose(a: np.ndarray, rank_tol: float = RANK_TOL) -> QrFactorization:
    """Modified Gram-Schmidt QR with one reorthogonalization pass.

    The two-pass sweep keeps ``|Q^T Q - I|`` at rounding level even for
    ill-conditioned inputs while the entries of ``r`` remain the
    Gram-Schmidt inner products between the orthonormal columns and the
    original columns.

    Raises
    ------
    RankDeficient
        If some residual column norm falls below ``rank_tol`` times the
        original column norm.
    """
    a = np.asarray(a, dtype=np.float64)
    m, n = a.shape
    if m < n:
        raise ValueError(f"expected a tall or square matrix, got {m}x{n}")
    q = np.empty((m, n))
    r = np.zeros((n, n))
    colnorms = np.empty(n)
    for j in range(n):
        v = a[:, j].copy()
        norm_in = np.linalg.norm(v)
        for _ in range(2):
            for k in range(j):
                c = q[:, k] @ v
                r[k, j] += c
                v -= c * q[:, k]
        norm_v = np.linalg.norm(v)
        if norm_v < rank_tol * max(norm_in, np.finfo(np.float64).tiny):
            raise RankDeficient(
                f"column {j}: residual norm {norm_v:.3e} below "
                f"{rank_tol:.1e} * {norm_in:.3e}"
            )
        r[j, j] = norm_v
        colnorms[j] = norm_v
        q[:, j] = v / norm_v
    return QrFactorization(q=q, r=r, colnorms=colnorms)


def det_complex(a: np.ndarray) -> complex:
    """Determinant of a square complex matrix (LU with partial pivoting)."""
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("determinant requires a square matrix")
    return complex(np.linalg.det(a))
