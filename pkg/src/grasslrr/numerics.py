"""Dense linear-algebra helpers backed by NumPy/LAPACK.

Every routine validates its input, then returns results with a deterministic
sign convention so that downstream code (and tests) never depend on which
LAPACK driver produced a factorization.
"""

from collections import namedtuple

import numpy as np
import scipy.linalg
from sklearn.cluster import KMeans

from .exceptions import InvalidInput, SingularMatrix

ThinSvd = namedtuple("ThinSvd", ["U", "S", "V"])

SYMMETRY_TOL = 1e-8
SINGULAR_RTOL = 1e-12


def as_matrix(A, name="A"):
    """Return `A` as a finite 2-D float64 array or raise InvalidInput."""
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise InvalidInput(f"{name} must be a non-empty 2-D matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidInput(f"{name} has non-finite entries")
    return A


def svd(A, compute_uv=True):
    """Economy SVD, retrying with the QR-iteration driver when the default
    divide-and-conquer driver fails to converge."""
    try:
        return np.linalg.svd(A, full_matrices=False, compute_uv=compute_uv)
    except np.linalg.LinAlgError:
        return scipy.linalg.svd(A, full_matrices=False, compute_uv=compute_uv, lapack_driver="gesvd")


def _fix_signs(U, V):
    # first nonzero entry of each U column made positive; V follows
    idx = np.argmax(np.abs(U) > 1e-14 * np.abs(U).max(axis=0, initial=0.0), axis=0)
    signs = np.sign(U[idx, np.arange(U.shape[1])])
    signs[signs == 0] = 1.0
    return U * signs, V * signs


def thin_svd(A):
    """Thin singular value decomposition ``A = U diag(S) V^T``.

    Parameters
    ----------
    A : array_like, shape (m, n)

    Returns
    -------
    ThinSvd
        ``U`` is (m, k), ``S`` has length k (nonincreasing), ``V`` is (n, k)
        with ``k = min(m, n)``. Each column of ``U`` has its first nonzero
        entry positive.
    """
    A = as_matrix(A)
    U, S, Vt = svd(A)
    U, V = _fix_signs(U, Vt.T)
    return ThinSvd(U, S, V)


def sym_eig(A):
    """Eigendecomposition of a symmetric matrix, eigenvalues ascending.

    Eigenvectors are columns, sign-normalized like `thin_svd`.
    """
    A = as_matrix(A)
    if A.shape[0] != A.shape[1]:
        raise InvalidInput(f"matrix must be square, got {A.shape}")
    scale = max(1.0, np.abs(A).max())
    if np.abs(A - A.T).max() > SYMMETRY_TOL * scale:
        raise InvalidInput("matrix is not symmetric")
    w, V = np.linalg.eigh((A + A.T) / 2)
    V, _ = _fix_signs(V, V)
    return w, V


def small_inverse(A):
    """Inverse of a small square matrix.

    Raises SingularMatrix when the smallest singular value is below
    ``1e-12`` times the largest.
    """
    A = as_matrix(A)
    if A.shape[0] != A.shape[1]:
        raise InvalidInput(f"matrix must be square, got {A.shape}")
    s = svd(A, compute_uv=False)
    if s[-1] < SINGULAR_RTOL * s[0] or s[0] == 0.0:
        raise SingularMatrix(f"matrix is numerically singular (sigma_min/sigma_max = {s[-1] / max(s[0], 1e-300):.3e})")
    return np.linalg.inv(A)


def kmeans(points, k, restarts=10, seed=0):
    """Cluster the rows of `points` into `k` groups.

    Uses k-means++ seeding and keeps the best of `restarts` runs by
    within-cluster sum of squares. Deterministic for a fixed `seed`.
    """
    points = as_matrix(points, "points")
    n = points.shape[0]
    k = int(k)
    if k < 1 or k > n:
        raise InvalidInput(f"need 1 <= k <= n, got k={k}, n={n}")
    if k == 1:
        return np.zeros(n, dtype=np.int64)
    n_distinct = len(np.unique(points, axis=0))
    if n_distinct < k:
        # KMeans cannot populate k clusters; fall back to grouping identical rows
        _, inverse = np.unique(points, axis=0, return_inverse=True)
        return _relabel(inverse.ravel())
    km = KMeans(n_clusters=k, init="k-means++", n_init=int(restarts), random_state=int(seed), algorithm="lloyd")
    return _relabel(km.fit_predict(points))


def _relabel(labels):
    # renumber clusters by first appearance so outputs are canonical
    labels = np.asarray(labels)
    _, first = np.unique(labels, return_index=True)
    order = labels[np.sort(first)]
    mapping = {old: new for new, old in enumerate(order)}
    return np.array([mapping[v] for v in labels], dtype=np.int64)
