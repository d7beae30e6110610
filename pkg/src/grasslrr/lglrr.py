"""Localized low-rank representation of Grassmann points.

Each point ``X_i`` is written as an affine combination of the Log maps of its
``C`` nearest neighbours in the tangent space at ``X_i``. The coefficient
matrix ``W`` is found by a linearized augmented-Lagrangian iteration that
alternates a singular value thresholding step with multiplier updates:

    min_W  1/2 sum_i w_i B_i w_i^T + lam ||W||_*
    s.t.   W 1 = 1,  W_ij = 0 for (i, j) in Omega

where ``B_i`` is the Gram matrix of the Log maps at ``X_i`` and ``Omega``
holds the diagonal together with every non-neighbour pair.

Throughout this module ``P_Omega(M)`` keeps the entries of ``M`` on Omega
and zeroes the rest, so ``P_Omega(W) = 0`` is the localization constraint.
"""

import csv
import logging
import time
from dataclasses import dataclass, field, asdict
from typing import Optional

import numpy as np

from .exceptions import CutLocus, InvalidInput, PairAtCutLocus
from .grassmann import CUT_LOCUS_TOL, pairwise_distance_sq
from .numerics import svd

logger = logging.getLogger(__name__)


@dataclass
class NeighborhoodGraph:
    """KNN graph under geodesic distance.

    ``neighbors[i]`` lists the C nearest other points, nearest first (ties
    broken by index). ``omega`` is the N x N boolean mask of pairs whose
    coefficient must vanish.
    """

    C: int
    neighbors: np.ndarray
    omega: np.ndarray
    distances: np.ndarray
    warnings: list = field(default_factory=list)

    @property
    def n_points(self):
        return self.neighbors.shape[0]


@dataclass
class BTensor:
    """Per-point Gram matrices of tangent Log maps, stored on neighbour blocks.

    ``blocks[i, a, b] = <Log_i(X_{n_a}), Log_i(X_{n_b})>`` with
    ``n = neighbors[i]``. Entries of the full N x N matrix ``B_i`` outside
    the neighbour block are zero.
    """

    neighbors: np.ndarray
    blocks: np.ndarray

    @property
    def n_points(self):
        return self.neighbors.shape[0]

    def dense(self, i):
        N = self.n_points
        nb = self.neighbors[i]
        B = np.zeros((N, N))
        B[np.ix_(nb, nb)] = self.blocks[i]
        return B

    def to_dense(self):
        return np.stack([self.dense(i) for i in range(self.n_points)])

    def spectral_norms(self):
        if self.blocks.shape[1] == 0:
            return np.zeros(self.n_points)
        return np.linalg.norm(self.blocks, ord=2, axis=(1, 2))

    def row_products(self, W):
        """Matrix whose i-th row is ``w_i B_i``."""
        nb = self.neighbors
        Wn = np.take_along_axis(W, nb, axis=1)
        G = np.einsum("nc,ncd->nd", Wn, self.blocks)
        out = np.zeros_like(W)
        np.put_along_axis(out, nb, G, axis=1)
        return out

    def quadratic(self, W):
        """``sum_i w_i B_i w_i^T``."""
        Wn = np.take_along_axis(W, self.neighbors, axis=1)
        return float(np.einsum("nc,ncd,nd->", Wn, self.blocks, Wn))


@dataclass
class SolverConfig:
    lam: float = 1.0
    C: int = 10
    rho0: float = 1.9
    beta0: float = 0.1
    beta_max: float = 1e6
    eps1: float = 1e-4
    eps2: float = 1e-4
    max_iters: int = 500
    eta_w_override: Optional[float] = None

    def __post_init__(self):
        for name in ("lam", "rho0", "beta0", "beta_max", "eps1", "eps2"):
            if not getattr(self, name) > 0:
                raise InvalidInput(f"{name} must be positive")
        if self.C < 1 or self.max_iters < 1:
            raise InvalidInput("C and max_iters must be at least 1")
        if not self.beta0 < self.beta_max:
            raise InvalidInput("beta0 must be smaller than beta_max")
        if self.eta_w_override is not None and not self.eta_w_override > 0:
            raise InvalidInput("eta_w_override must be positive")

    def as_dict(self):
        return asdict(self)


@dataclass
class TraceRow:
    iter: int
    beta: float
    primal_change: float
    affine_residual: float


@dataclass
class SolverState:
    W: np.ndarray
    Y1: np.ndarray
    Y2: np.ndarray
    beta: float
    eta_w: float
    iter: int = 0
    converged: bool = False
    trace: list = field(default_factory=list)
    wall_time: float = 0.0
    warnings: list = field(default_factory=list)

    @property
    def not_converged(self):
        return not self.converged


def build_neighborhood(points, C):
    """Pick the `C` geodesically nearest neighbours of every point.

    A `C` of N or more is clamped to N - 1 with a logged warning, which is
    also kept on the returned graph.
    """
    N = len(points)
    if N < 2:
        raise InvalidInput("need at least two points")
    C = int(C)
    if C < 1:
        raise InvalidInput("neighbourhood size C must be at least 1")
    warnings = []
    if C > N - 1:
        msg = f"neighbourhood size C={C} clamped to N-1={N - 1}"
        logger.warning(msg)
        warnings.append(msg)
        C = N - 1
    D = pairwise_distance_sq(points)
    idx = np.arange(N)
    neighbors = np.empty((N, C), dtype=np.int64)
    for i in range(N):
        order = np.lexsort((idx, D[i]))
        neighbors[i] = order[order != i][:C]
    omega = np.ones((N, N), dtype=bool)
    np.put_along_axis(omega, neighbors, False, axis=1)
    return NeighborhoodGraph(C, neighbors, omega, D, warnings)


def _neighbour_logs(X, Ys):
    """Log maps at X of a stack of points Ys with shape (C, d, p)."""
    XtY = np.einsum("dp,cdq->cpq", X, Ys)
    smin = np.linalg.svd(XtY, compute_uv=False)[:, -1]
    bad = np.flatnonzero(smin < CUT_LOCUS_TOL)
    if bad.size:
        raise CutLocus(int(bad[0]))
    M = (Ys - X @ XtY) @ np.linalg.inv(XtY)
    U, S, Vt = np.linalg.svd(M, full_matrices=False)
    H = (U * np.arctan(S)[:, None, :]) @ Vt
    return H - X @ (X.T @ H)


def build_btensor(points, graph):
    """Gram matrices of neighbour Log maps, one block per point.

    Each Log map ``Log_{X_i}(X_j)`` with ``j`` a neighbour of ``i`` is
    computed once and reused for every entry of block ``i``.
    """
    nb = graph.neighbors
    N, C = nb.shape
    Xs = np.stack([q.X for q in points])
    blocks = np.empty((N, C, C))
    for i in range(N):
        try:
            H = _neighbour_logs(Xs[i], Xs[nb[i]])
        except CutLocus as exc:
            raise PairAtCutLocus(i, nb[i][exc.args[0]]) from None
        Hf = H.reshape(C, -1)
        G = Hf @ Hf.T
        blocks[i] = (G + G.T) / 2
    return BTensor(nb.copy(), blocks)


def project_omega(M, omega):
    """Keep the entries of `M` on Omega, zero elsewhere."""
    return np.where(omega, M, 0.0)


def smooth_objective(W, Y1, Y2, beta, B, omega):
    """Augmented Lagrangian without the nuclear-norm term."""
    r = W.sum(axis=1) - 1.0
    Wo = project_omega(W, omega)
    return (
        0.5 * B.quadratic(W)
        + float(Y1 @ r)
        + float(np.sum(project_omega(Y2, omega) * W))
        + 0.5 * beta * (float(r @ r) + float(np.sum(Wo * Wo)))
    )


def gradient_F(W, Y1, Y2, beta, B, omega):
    """Gradient of `smooth_objective` with respect to ``W``."""
    r = W.sum(axis=1) - 1.0
    return (
        B.row_products(W)
        + (Y1 + beta * r)[:, None]
        + project_omega(Y2, omega)
        + beta * project_omega(W, omega)
    )


def svt(M, tau):
    """Singular value thresholding: the proximal map of ``tau * ||.||_*``."""
    if tau < 0:
        raise InvalidInput("threshold must be nonnegative")
    U, s, Vt = svd(M)
    s = np.maximum(s - tau, 0.0)
    keep = s > 0
    return (U[:, keep] * s[keep]) @ Vt[keep]


def eta_w(B):
    N = B.n_points
    return float(np.max(B.spectral_norms()) ** 2 + N + 1)


def finalize(W, graph):
    """Zero the Omega entries of `W` and rescale rows to sum to one.

    A row whose neighbour weights sum to (numerically) zero falls back to
    uniform weights over the neighbours.
    """
    W = project_omega(W, ~graph.omega)
    sums = W.sum(axis=1)
    for i in np.flatnonzero(np.abs(sums) < 1e-12):
        W[i, graph.neighbors[i]] = 1.0 / graph.neighbors.shape[1]
        sums[i] = 1.0
    return W / sums[:, None]


def solve_btensor(B, graph, config):
    """Run the linearized iteration on a precomputed B tensor.

    Returns the final state; ``state.W`` is already finalized.
    """
    N = B.n_points
    omega = graph.omega
    eta = config.eta_w_override if config.eta_w_override is not None else eta_w(B)
    W = np.zeros((N, N))
    Y1 = np.zeros(N)
    Y2 = np.zeros((N, N))
    beta = config.beta0
    state = SolverState(W, Y1, Y2, beta, eta, warnings=list(graph.warnings))
    start = time.perf_counter()
    for k in range(config.max_iters):
        step = 1.0 / (eta * beta)
        W_new = svt(W - step * gradient_F(W, Y1, Y2, beta, B, omega), config.lam * step)
        change = beta * np.linalg.norm(W_new - W)
        residual = np.linalg.norm(W_new.sum(axis=1) - 1.0)
        # multipliers use the previous iterate
        Y1 = Y1 + beta * (W.sum(axis=1) - 1.0)
        Y2 = Y2 + beta * project_omega(W, omega)
        state.trace.append(TraceRow(k, beta, float(change), float(residual)))
        if change <= config.eps1:
            beta = min(config.beta_max, config.rho0 * beta)
        W = W_new
        state.iter = k + 1
        if change <= config.eps1 and residual <= config.eps2:
            state.converged = True
            break
    if not state.converged:
        logger.warning("solver stopped at max_iters=%d without converging", config.max_iters)
    state.W, state.Y1, state.Y2, state.beta = finalize(W, graph), Y1, Y2, beta
    state.wall_time = time.perf_counter() - start
    return state


def solve(points, config):
    """Compute the localized low-rank coefficient matrix of `points`.

    Returns
    -------
    W : ndarray, shape (N, N)
        Coefficients with zero diagonal, zeros off the KNN support, rows
        summing to one.
    state : SolverState
        Multipliers, penalty, iteration count, convergence flag and trace.
    """
    if len(points) < 2:
        raise InvalidInput("need at least two points")
    graph = build_neighborhood(points, config.C)
    B = build_btensor(points, graph)
    state = solve_btensor(B, graph, config)
    return state.W, state


def write_trace_csv(state, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iter", "beta", "primal_change", "affine_residual"])
        for row in state.trace:
            writer.writerow([row.iter, repr(row.beta), repr(row.primal_change), repr(row.affine_residual)])
