"""Geometry of the Grassmann manifold G(p, d).

A point is stored through an orthonormal d x p representative ``X``; the
subspace it stands for is ``span(X)``. Tangent vectors at ``X`` are d x p
matrices ``H`` with ``X^T H = 0``.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import CutLocus, InvalidInput, RankDeficient
from .numerics import as_matrix, small_inverse, thin_svd

ORTHONORMAL_TOL = 1e-10
HORIZONTAL_TOL = 1e-8
RANK_RTOL = 1e-12
CUT_LOCUS_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class GrassmannPoint:
    """Orthonormal representative of a p-dimensional subspace of R^d."""

    X: np.ndarray

    def __post_init__(self):
        X = as_matrix(self.X, "X")
        d, p = X.shape
        if p > d:
            raise InvalidInput(f"subspace dimension {p} exceeds ambient dimension {d}")
        if np.abs(X.T @ X - np.eye(p)).max() > ORTHONORMAL_TOL:
            raise InvalidInput("representative columns are not orthonormal")
        X = X.copy()
        X.setflags(write=False)
        object.__setattr__(self, "X", X)

    @property
    def ambient_dim(self):
        return self.X.shape[0]

    @property
    def subspace_dim(self):
        return self.X.shape[1]

    @property
    def shape(self):
        return self.X.shape

    def projector(self):
        return self.X @ self.X.T


@dataclass(frozen=True, eq=False)
class TangentVector:
    """Horizontal lift ``H`` of a tangent vector at `base`."""

    base: GrassmannPoint
    H: np.ndarray

    def __post_init__(self):
        H = as_matrix(self.H, "H")
        if H.shape != self.base.shape:
            raise InvalidInput(f"tangent shape {H.shape} does not match base {self.base.shape}")
        if np.abs(self.base.X.T @ H).max() > HORIZONTAL_TOL * max(1.0, np.abs(H).max()):
            raise InvalidInput("tangent matrix is not horizontal (X^T H != 0)")
        H = H.copy()
        H.setflags(write=False)
        object.__setattr__(self, "H", H)

    def __mul__(self, t):
        return TangentVector(self.base, float(t) * self.H)

    __rmul__ = __mul__

    def norm(self):
        return float(np.sqrt(tangent_inner(self, self)))


def from_basis(A, p):
    """Point spanned by the top-`p` left singular vectors of `A`.

    Parameters
    ----------
    A : array_like, shape (d, n)
        Columns spanning (at least) the target subspace.
    p : int
        Subspace dimension, ``p <= min(d, n)``.

    Raises
    ------
    RankDeficient
        If the p-th singular value is below ``1e-12`` times the first.
    """
    A = as_matrix(A)
    p = int(p)
    if p < 1 or p > min(A.shape):
        raise InvalidInput(f"p={p} must lie in [1, {min(A.shape)}]")
    U, S, _ = thin_svd(A)
    if S[0] == 0.0 or S[p - 1] < RANK_RTOL * S[0]:
        raise RankDeficient(f"basis has rank < {p}")
    return GrassmannPoint(U[:, :p])


def _check_pair(X, Y):
    if X.shape != Y.shape:
        raise InvalidInput(f"points live on different Grassmannians: {X.shape} vs {Y.shape}")


def principal_cosines(X, Y):
    """Cosines of the principal angles between span(X) and span(Y), clamped to [0, 1]."""
    _check_pair(X, Y)
    s = np.linalg.svd(X.X.T @ Y.X, compute_uv=False)
    return np.clip(s, 0.0, 1.0)


def geodesic_distance_sq(X, Y):
    """Sum of squared principal angles between two points."""
    return float(np.sum(np.arccos(principal_cosines(X, Y)) ** 2))


def pairwise_distance_sq(points):
    """N x N matrix of squared geodesic distances, computed in one batch."""
    Xs = np.stack([q.X for q in points])
    if len({q.shape for q in points}) != 1:
        raise InvalidInput("points must share (d, p)")
    M = np.einsum("adp,bdq->abpq", Xs, Xs)
    s = np.clip(np.linalg.svd(M, compute_uv=False), 0.0, 1.0)
    D = np.sum(np.arccos(s) ** 2, axis=-1)
    D = (D + D.T) / 2
    np.fill_diagonal(D, 0.0)
    return D


def tangent_inner(H1, H2):
    """Canonical metric ``trace(H1^T H2)`` on the tangent space."""
    if H1.base is not H2.base and (
        H1.base.shape != H2.base.shape or not np.array_equal(H1.base.X, H2.base.X)
    ):
        raise InvalidInput("tangent vectors are based at different points")
    return float(np.sum(H1.H * H2.H))


def log_map(X, Y):
    """Tangent vector at `X` whose geodesic reaches `Y` at unit time.

    Computes the thin SVD ``U S V^T`` of ``(Y - X X^T Y)(X^T Y)^{-1}`` and
    returns ``U arctan(S) V^T``.

    Raises
    ------
    CutLocus
        If ``X^T Y`` has a singular value below ``1e-10`` (a principal angle
        of pi/2).
    """
    _check_pair(X, Y)
    XtY = X.X.T @ Y.X
    if np.linalg.svd(XtY, compute_uv=False)[-1] < CUT_LOCUS_TOL:
        raise CutLocus("X^T Y is singular: a principal angle equals pi/2")
    M = (Y.X - X.X @ XtY) @ small_inverse(XtY)
    U, S, V = thin_svd(M)
    H = (U * np.arctan(S)) @ V.T
    # the product above is horizontal only up to rounding
    H -= X.X @ (X.X.T @ H)
    return TangentVector(X, H)


def exp_map(X, H):
    """Follow the geodesic from `X` along tangent `H` for unit time."""
    if H.base is not X and not np.array_equal(H.base.X, X.X):
        raise InvalidInput("tangent vector is not based at X")
    U, S, V = thin_svd(H.H)
    Y = (X.X @ V) * np.cos(S) @ V.T + (U * np.sin(S)) @ V.T
    return from_basis(Y, X.subspace_dim)


def random_tangent(X, rng):
    """Unit-norm horizontal direction at `X` drawn from a Gaussian."""
    G = rng.standard_normal(X.shape)
    H = G - X.X @ (X.X.T @ G)
    return TangentVector(X, H / np.linalg.norm(H))


def random_point(d, p, rng):
    return from_basis(rng.standard_normal((d, p)), p)


def same_subspace(X, Y, tol=1e-12):
    return geodesic_distance_sq(X, Y) <= tol
