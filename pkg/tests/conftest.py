import numpy as np
import pytest


def canonical_labels(labels):
    """Relabel clusters by first occurrence so partitions compare directly;
    noise stays -1.
    """
    seen = {}
    out = []
    for lbl in labels:
        lbl = int(lbl)
        if lbl < 0:
            out.append(-1)
        else:
            if lbl not in seen:
                seen[lbl] = len(seen)
            out.append(seen[lbl])
    return out


def two_blob_points(rng, per_blob=100, sep=10.0, std=0.05):
    a = rng.normal(0.0, std, size=(per_blob, 2))
    b = rng.normal(0.0, std, size=(per_blob, 2)) + np.array([sep, 0.0])
    data = np.vstack([a, b])
    order = rng.permutation(2 * per_blob)
    return data[order]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
