"""Affinity construction and normalized-cut spectral clustering."""

import numpy as np

from .exceptions import InvalidInput
from .numerics import as_matrix, kmeans, sym_eig

DEGREE_EPS = 1e-12
ZERO_ROW_TOL = 1e-10


def affinity_from_w(W):
    """Symmetric nonnegative affinity ``(|W| + |W|^T) / 2`` with zero diagonal."""
    W = as_matrix(W, "W")
    if W.shape[0] != W.shape[1]:
        raise InvalidInput("coefficient matrix must be square")
    A = (np.abs(W) + np.abs(W).T) / 2
    np.fill_diagonal(A, 0.0)
    return A


def spectral_embedding(A, R):
    """Row-normalized eigenvectors of the R smallest eigenvalues of
    ``I - D^{-1/2} A D^{-1/2}``. Rows of isolated vertices stay zero."""
    A = as_matrix(A, "A")
    N = A.shape[0]
    deg = A.sum(axis=1) + DEGREE_EPS
    inv_sqrt = 1.0 / np.sqrt(deg)
    L = np.eye(N) - inv_sqrt[:, None] * A * inv_sqrt[None, :]
    _, vecs = sym_eig((L + L.T) / 2)
    E = vecs[:, :R]
    norms = np.linalg.norm(E, axis=1)
    zero = norms < ZERO_ROW_TOL
    E = np.where(zero[:, None], 0.0, E / np.where(zero, 1.0, norms)[:, None])
    return E, zero


def ncut(A, R, seed=0, restarts=10):
    """Cluster the graph with affinity `A` into `R` groups.

    Parameters
    ----------
    A : array_like, shape (N, N)
        Symmetric nonnegative affinity.
    R : int
        Number of clusters, ``1 <= R <= N``.
    seed : int
        Seed for the k-means step.

    Returns
    -------
    labels : ndarray of int, shape (N,)
    """
    A = as_matrix(A, "A")
    N = A.shape[0]
    if A.shape[1] != N:
        raise InvalidInput("affinity must be square")
    R = int(R)
    if R < 1 or R > N:
        raise InvalidInput(f"need 1 <= R <= N, got R={R}, N={N}")
    if np.any(A < 0) or np.abs(A - A.T).max() > 1e-12 * max(1.0, np.abs(A).max()):
        raise InvalidInput("affinity must be symmetric and nonnegative")
    if R == 1:
        return np.zeros(N, dtype=np.int64)
    E, zero = spectral_embedding(A, R)
    labels = np.zeros(N, dtype=np.int64)
    live = np.flatnonzero(~zero)
    if live.size >= R:
        labels[live] = kmeans(E[live], R, restarts=restarts, seed=seed)
        centroids = np.stack([E[live][labels[live] == c].mean(axis=0) for c in range(R)])
    else:
        labels[live] = np.arange(live.size)
        centroids = np.zeros((R, R))
        centroids[: live.size] = E[live]
    # isolated vertices sit at the origin; argmin picks the lowest cluster on ties
    dist0 = np.linalg.norm(centroids, axis=1)
    labels[zero] = int(np.argmin(dist0))
    return labels
