"""Clustering accuracy under the best matching of predicted to true labels."""

import itertools
import json

import numpy as np
from scipy.optimize import linear_sum_assignment

from .exceptions import InvalidInput

BRUTE_FORCE_MAX = 8


def confusion(predicted, truth):
    predicted = np.asarray(predicted)
    truth = np.asarray(truth)
    if predicted.shape != truth.shape or predicted.ndim != 1:
        raise InvalidInput(f"label vectors differ in length: {predicted.shape} vs {truth.shape}")
    p_vals, p_idx = np.unique(predicted, return_inverse=True)
    t_vals, t_idx = np.unique(truth, return_inverse=True)
    M = np.zeros((len(p_vals), len(t_vals)), dtype=np.int64)
    np.add.at(M, (p_idx.ravel(), t_idx.ravel()), 1)
    return M


def accuracy_bruteforce(predicted, truth):
    """Exhaustive search over injective label maps."""
    M = confusion(predicted, truth)
    if M.shape[0] > M.shape[1]:
        M = M.T
    n_small, n_big = M.shape
    best = 0
    for cols in itertools.permutations(range(n_big), n_small):
        best = max(best, int(M[np.arange(n_small), cols].sum()))
    return best / M.sum() if M.sum() else 1.0


def accuracy_hungarian(predicted, truth):
    M = confusion(predicted, truth)
    rows, cols = linear_sum_assignment(-M)
    return M[rows, cols].sum() / M.sum() if M.sum() else 1.0


def accuracy(predicted, truth):
    """Fraction of points correctly labelled under the best bijection
    between predicted and true cluster ids."""
    M = confusion(predicted, truth)
    if max(M.shape) <= BRUTE_FORCE_MAX:
        return float(accuracy_bruteforce(predicted, truth))
    return float(accuracy_hungarian(predicted, truth))


def run_report(accuracy=None, iterations=None, wall_time=None, converged=None, config=None, **extra):
    record = {
        "accuracy": accuracy,
        "iterations": iterations,
        "wall_time": wall_time,
        "converged": converged,
        "config": config or {},
    }
    record.update(extra)
    return record


def append_report(path, record):
    """Append one JSON-lines record."""
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(json.dumps(record, sort_keys=True) + "\n")
