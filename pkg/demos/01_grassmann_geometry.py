"""
Geometry on the Grassmann manifold
==================================

Distances, Log and Exp maps between subspaces, checked against each other.
"""

import numpy as np

from grasslrr.grassmann import exp_map, geodesic_distance_sq, log_map, random_point, tangent_inner

rng = np.random.default_rng(0)

# two random 5-dimensional subspaces of R^50
X = random_point(50, 5, rng)
Y = random_point(50, 5, rng)

# squared geodesic distance = sum of squared principal angles
d2 = geodesic_distance_sq(X, Y)
print("squared distance:", d2)

# the Log map gives the tangent vector at X pointing to Y; its length is the distance
H = log_map(X, Y)
print("|Log|^2:", tangent_inner(H, H))
print("horizontality |X^T H|:", np.abs(X.X.T @ H.H).max())

# walking along H for unit time lands back on Y's subspace
print("distance after Exp(Log):", geodesic_distance_sq(exp_map(X, H), Y))

# half way along the geodesic is half the distance
mid = exp_map(X, 0.5 * H)
print("distance to midpoint / total:", np.sqrt(geodesic_distance_sq(X, mid) / d2))
