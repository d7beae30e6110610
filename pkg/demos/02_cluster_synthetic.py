"""
Clustering synthetic subspace clusters
======================================

Generate four clusters of nearby subspaces, solve for the localized low-rank
coefficient matrix and cluster it with normalized cuts.
"""

import numpy as np

from grasslrr.data import SynthSpec, generate_synthetic
from grasslrr.evaluate import accuracy
from grasslrr.lglrr import SolverConfig, solve
from grasslrr.spectral import affinity_from_w, ncut

points, truth = generate_synthetic(SynthSpec(R=4, per_cluster=30, d=50, p=5, noise_sigma=0.05, seed=0))

W, state = solve(points, SolverConfig(lam=1.0, C=35))
print(f"iterations: {state.iter}  converged: {state.converged}  eta_W: {state.eta_w:.1f}")

# W is supported on each point's neighbourhood and its rows sum to one
print("row sums in [%.3g, %.3g]" % (W.sum(axis=1).min(), W.sum(axis=1).max()))

same = truth[:, None] == truth[None, :]
print("mean |W| within / across clusters: %.4f / %.4f" % (np.abs(W[same]).mean(), np.abs(W[~same]).mean()))

labels = ncut(affinity_from_w(W), 4, seed=0)
print("accuracy:", accuracy(labels, truth))

# the convergence trace: primal change and affine residual per iteration
for row in state.trace[:: max(1, len(state.trace) // 10)]:
    print(row)
