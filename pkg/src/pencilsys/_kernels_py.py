"""Pure-Python versions of the history kernels (fallback for ``_kernels``).

Signatures and results match the compiled module exactly; arrays are
float64 and C-contiguous on output.
"""

import numpy as np


def nabla_coefficients(n, K):
    """c_0 = 1, c_{j+1} = c_j (j - n) / (j + 1), j = 0..K-1."""
    c = np.empty(K + 1)
    c[0] = 1.0
    for j in range(K):
        c[j + 1] = c[j] * (j - n) / (j + 1)
    return c


def history_sum(c, Y, k, start):
    """sum_{j=start}^{k} c[k - j] * Y[j]."""
    Y = np.asarray(Y, dtype=float)
    out = np.zeros(Y.shape[1])
    for j in range(start, k + 1):
        out += c[k - j] * Y[j]
    return out


def nabla_all(c, Y):
    """Row k is sum_{j<=k} c[k - j] Y[j], for every k."""
    Y = np.asarray(Y, dtype=float)
    out = np.zeros_like(Y)
    for k in range(Y.shape[0]):
        out[k] = history_sum(c, Y, k, 0)
    return out


def fractional_march(c, SinvF, W, Y0):
    """Y_k = W_k - SinvF @ sum_{j<k} c[k - j] Y_j for k >= 1, Y_0 given."""
    W = np.asarray(W, dtype=float)
    SinvF = np.asarray(SinvF, dtype=float)
    K = W.shape[0] - 1
    Y = np.zeros_like(W)
    Y[0] = Y0
    for k in range(1, K + 1):
        h = np.zeros(W.shape[1])
        for j in range(k):
            h += c[k - j] * Y[j]
        Y[k] = W[k] - SinvF @ h
    return Y


def telescope(A, U, Y0, K):
    """Y_k = sum_{j=1}^{k-1} (A - I) Y_j + A Y_0 + sum_{j<k} U_j, evaluated literally."""
    A = np.asarray(A, dtype=float)
    U = np.asarray(U, dtype=float)
    m = A.shape[0]
    D = A - np.eye(m)
    Y = np.zeros((K + 1, m))
    Y[0] = Y0
    for k in range(1, K + 1):
        acc = A @ Y[0]
        for j in range(1, k):
            acc = acc + D @ Y[j]
        for j in range(k):
            acc = acc + U[j]
        Y[k] = acc
    return Y
