"""Real/complex identifications and small batched matrix utilities.

Conventions fixed once for the whole package:

* real coordinates of C^n are ordered (x_1, y_1, ..., x_n, y_n);
* multiplication by i is the block-diagonal matrix with 2x2 blocks
  [[0, -1], [1, 0]] (``jst_matrix``);
* an anti-linear real map A (one with A J = -J A for J = jst) is identified
  with the complex n x n matrix Q through  A v = Q conj(v).

All helpers broadcast over arbitrary leading axes.
"""

from __future__ import annotations

import numpy as np


def jst_matrix(n: int) -> np.ndarray:
    """Multiplication by i on R^{2n} in interleaved coordinates."""
    J = np.zeros((2 * n, 2 * n))
    for k in range(n):
        J[2 * k, 2 * k + 1] = -1.0
        J[2 * k + 1, 2 * k] = 1.0
    return J


def conj_matrix(n: int) -> np.ndarray:
    """Complex conjugation on R^{2n} (flips the sign of every y-coordinate)."""
    d = np.ones(2 * n)
    d[1::2] = -1.0
    return np.diag(d)


def to_complex(u: np.ndarray) -> np.ndarray:
    """(..., 2n) real -> (..., n) complex."""
    return u[..., 0::2] + 1j * u[..., 1::2]


def to_real(v: np.ndarray) -> np.ndarray:
    """(..., n) complex -> (..., 2n) real."""
    out = np.empty(v.shape[:-1] + (2 * v.shape[-1],))
    out[..., 0::2] = v.real
    out[..., 1::2] = v.imag
    return out


def antilinear_to_complex(A: np.ndarray) -> np.ndarray:
    """Complex matrix Q of an anti-linear real map, A v = Q conj(v).

    ``A`` has shape (..., 2n, 2n).  The columns of Q are the complexified
    images of the real basis vectors e_{x_j}; anti-linearity is assumed,
    not checked here (see ``antilinearity_defect``).
    """
    cols = A[..., :, 0::2]
    return cols[..., 0::2, :] + 1j * cols[..., 1::2, :]


def complex_to_antilinear(Q: np.ndarray) -> np.ndarray:
    """Real 2n x 2n matrix of the anti-linear map v -> Q conj(v)."""
    n = Q.shape[-1]
    A = np.zeros(Q.shape[:-2] + (2 * n, 2 * n))
    re, im = Q.real, Q.imag
    # action on e_{x_j}: Q e_j;  on e_{y_j}: Q conj(i e_j) = -i Q e_j
    A[..., 0::2, 0::2] = re
    A[..., 1::2, 0::2] = im
    A[..., 0::2, 1::2] = im
    A[..., 1::2, 1::2] = -re
    return A


def antilinearity_defect(A: np.ndarray, n: int) -> float:
    """sup-norm of A J_st + J_st A over all batch entries."""
    J = jst_matrix(n)
    return float(np.max(np.abs(A @ J + J @ A)))


def apply_matrix(M: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Batched matrix-vector product (..., k, k) @ (..., k)."""
    return np.einsum("...ij,...j->...i", M, v)


def sup_norm(a: np.ndarray) -> float:
    return float(np.max(np.abs(a))) if a.size else 0.0
