"""Clustering of image sets on the Grassmann manifold with a localized
low-rank representation followed by normalized-cut spectral clustering."""

from .exceptions import (
    CutLocus,
    InvalidInput,
    PairAtCutLocus,
    ParseError,
    RankDeficient,
    SingularMatrix,
    ValidationError,
)
from .grassmann import (
    GrassmannPoint,
    TangentVector,
    exp_map,
    from_basis,
    geodesic_distance_sq,
    log_map,
    tangent_inner,
)
from .lglrr import SolverConfig, build_btensor, build_neighborhood, solve, svt
from .spectral import affinity_from_w, ncut
from .evaluate import accuracy

__version__ = "0.1.0"
