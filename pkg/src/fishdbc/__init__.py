"""Flexible incremental scalable hierarchical density-based clustering.

Cluster arbitrary data under any symmetric, possibly non-metric distance
function, with cheap incremental updates as items arrive.

    from fishdbc import FISHDBC, distances

    engine = FISHDBC(distances.euclidean, minpts=10, ef=20, rng_seed=1)
    for point in points:
        engine.add(point)
    result = engine.cluster()
    result.labels       # -1 = noise
    result.condensed    # hierarchy with per-cluster stabilities
"""

from .engine import FISHDBC, ClusterResult, Config, setup
from .distances import DistanceError

__version__ = "0.1.0"

__all__ = [
    "FISHDBC",
    "ClusterResult",
    "Config",
    "setup",
    "DistanceError",
    "__version__",
]
