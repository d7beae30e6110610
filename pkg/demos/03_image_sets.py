"""
From image sets to Grassmann points
===================================

Each image set becomes the span of the top singular vectors of its stacked,
vectorized frames. Here the "frames" are noisy mixtures of a few templates per
class, so every class occupies its own low-dimensional subspace.
"""

import numpy as np

from grasslrr.data import ImageSet, image_set_to_point
from grasslrr.evaluate import accuracy
from grasslrr.lglrr import SolverConfig, solve
from grasslrr.spectral import affinity_from_w, ncut

rng = np.random.default_rng(3)
shape = (12, 10)
templates = [rng.standard_normal((4, *shape)) for _ in range(3)]

sets, truth = [], []
for label, basis in enumerate(templates):
    for k in range(15):
        frames = [np.tensordot(rng.standard_normal(4), basis, axes=1) + 0.05 * rng.standard_normal(shape)
                  for _ in range(20)]
        sets.append(ImageSet(frames, id=f"class{label}-{k}", label=label))
        truth.append(label)

points = [image_set_to_point(s, p=4, normalize=True) for s in sets]
W, state = solve(points, SolverConfig(lam=1.0, C=10))
labels = ncut(affinity_from_w(W), 3, seed=0)
print("iterations:", state.iter, "converged:", state.converged)
print("accuracy:", accuracy(labels, np.array(truth)))
