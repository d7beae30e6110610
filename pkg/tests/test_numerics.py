import itertools

import numpy as np
import pytest

from grasslrr.exceptions import InvalidInput, SingularMatrix
from grasslrr.numerics import kmeans, small_inverse, sym_eig, thin_svd


def check_svd(A, res):
    U, S, V = res
    k = min(A.shape)
    assert U.shape == (A.shape[0], k) and V.shape == (A.shape[1], k)
    assert np.abs(U.T @ U - np.eye(k)).max() <= 1e-10
    assert np.abs(V.T @ V - np.eye(k)).max() <= 1e-10
    assert np.all(S >= 0) and np.all(np.diff(S) <= 0)
    assert np.linalg.norm(U * S @ V.T - A) <= 1e-8 * max(1.0, np.linalg.norm(A))


def test_svd_identity():
    U, S, V = thin_svd(np.eye(3))
    np.testing.assert_allclose(S, [1, 1, 1])
    np.testing.assert_allclose(np.abs(U), np.eye(3), atol=1e-15)
    np.testing.assert_allclose(U @ V.T, np.eye(3), atol=1e-15)


def test_svd_diagonal():
    np.testing.assert_allclose(thin_svd(np.diag([3.0, 1.0])).S, [3, 1])


@pytest.mark.parametrize("shape", [(20, 5), (5, 20), (1000, 50), (1, 1), (7, 7)])
def test_svd_contract(rng, shape):
    A = rng.standard_normal(shape)
    check_svd(A, thin_svd(A))


def test_svd_sign_convention(rng):
    U, S, V = thin_svd(rng.standard_normal((6, 4)))
    for j in range(U.shape[1]):
        first = U[np.flatnonzero(np.abs(U[:, j]) > 1e-14)[0], j]
        assert first > 0


def test_svd_rejects_nan():
    with pytest.raises(InvalidInput):
        thin_svd(np.array([[1.0, np.nan]]))


def test_eig_small_cases():
    w, V = sym_eig(np.diag([2.0, 5.0]))
    np.testing.assert_allclose(w, [2, 5])
    np.testing.assert_allclose(np.abs(V), np.eye(2))
    w, _ = sym_eig(np.array([[0.0, 1.0], [1.0, 0.0]]))
    np.testing.assert_allclose(w, [-1, 1], atol=1e-15)


@pytest.mark.parametrize("seed", range(5))
def test_eig_residual(seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((8, 8))
    A = A + A.T
    w, V = sym_eig(A)
    assert np.all(np.diff(w) >= 0)
    assert np.linalg.norm(A @ V - V * w) <= 1e-8 * np.linalg.norm(A)
    assert np.abs(V.T @ V - np.eye(8)).max() <= 1e-10


def test_eig_rejects_asymmetric():
    with pytest.raises(InvalidInput):
        sym_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_inverse():
    np.testing.assert_allclose(small_inverse(np.eye(2)), np.eye(2))
    np.testing.assert_allclose(small_inverse(np.diag([2.0, 4.0])), np.diag([0.5, 0.25]))


def test_inverse_random(rng):
    A = rng.standard_normal((5, 5)) + 5 * np.eye(5)
    assert np.abs(A @ small_inverse(A) - np.eye(5)).max() <= 1e-8 * np.linalg.cond(A)


def test_inverse_singular():
    with pytest.raises(SingularMatrix):
        small_inverse(np.array([[1.0, 2.0], [2.0, 4.0]]))


def same_partition(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return all((a[i] == a[j]) == (b[i] == b[j]) for i in range(len(a)) for j in range(len(a)))


def test_kmeans_two_blobs():
    labels = kmeans(np.array([[0.0], [0.1], [10.0], [10.1]]), 2, seed=3)
    assert labels[0] == labels[1] != labels[2] == labels[3]


def test_kmeans_single_cluster(rng):
    assert np.all(kmeans(rng.standard_normal((6, 2)), 1) == 0)


def test_kmeans_k_too_large():
    with pytest.raises(InvalidInput):
        kmeans(np.zeros((2, 1)), 3)


def wcss(points, labels):
    return sum(((points[labels == c] - points[labels == c].mean(axis=0)) ** 2).sum() for c in np.unique(labels))


@pytest.mark.parametrize("seed", range(3))
def test_kmeans_matches_enumeration(seed):
    rng = np.random.default_rng(seed)
    centres = np.array([[0.0, 0.0], [20.0, 0.0], [0.0, 20.0]])
    sizes = [3, 3, 2]
    points = np.vstack([c + 0.3 * rng.standard_normal((s, 2)) for c, s in zip(centres, sizes)])
    best, best_cost = None, np.inf
    for assign in itertools.product(range(3), repeat=len(points)):
        assign = np.array(assign)
        if len(np.unique(assign)) < 3:
            continue
        cost = wcss(points, assign)
        if cost < best_cost:
            best, best_cost = assign, cost
    labels = kmeans(points, 3, restarts=10, seed=seed)
    assert same_partition(labels, best)


def test_kmeans_deterministic(rng):
    pts = rng.standard_normal((40, 3))
    assert np.array_equal(kmeans(pts, 4, seed=11), kmeans(pts, 4, seed=11))
