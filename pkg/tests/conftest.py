"""Shared test helpers: small synthetic datasets and tiny random instances."""

import numpy as np

import zok


def make_blobs(m_per_class=20, sep=4.0, spread=0.5, seed=0, n=2):
    """Two well-separated gaussian blobs; trivially separable for sep >> spread."""
    rng = np.random.default_rng(seed)
    pos = rng.normal(loc=sep / 2, scale=spread, size=(m_per_class, n))
    neg = rng.normal(loc=-sep / 2, scale=spread, size=(m_per_class, n))
    X = np.vstack([pos, neg])
    y = np.concatenate([np.ones(m_per_class), -np.ones(m_per_class)])
    return zok.Dataset(X, y, name="blobs")


def make_xor_blobs(m_per_cluster=30, spread=0.25, seed=0):
    """Four clusters in XOR arrangement; linearly inseparable."""
    rng = np.random.default_rng(seed)
    centers = [(-1, -1, -1.0), (-1, 1, 1.0), (1, -1, 1.0), (1, 1, -1.0)]
    X, y = [], []
    for cx, cy, label in centers:
        X.append(rng.normal(loc=(cx, cy), scale=spread, size=(m_per_cluster, 2)))
        y.append(np.full(m_per_cluster, label))
    return zok.Dataset(np.vstack(X), np.concatenate(y), name="xorblobs")


def random_tiny(rng, m_lo=4, m_hi=9, n=2):
    """Random tiny instance with both classes present."""
    m = int(rng.integers(m_lo, m_hi))
    X = rng.standard_normal((m, n))
    y = np.where(rng.random(m) < 0.5, 1.0, -1.0)
    if len(set(y.tolist())) < 2:
        y[0] = -y[0]
    return zok.Dataset(X, y)


def two_point_instance():
    """1-D two-point instance x = -1, +1 with matching labels.

    Its exact P-stationary pair under the gaussian kernel (bandwidth 1,
    gamma = C = 1) is alpha = -e / (1 - exp(-2)), u = 0.
    """
    d = zok.Dataset(np.array([[-1.0], [1.0]]), np.array([-1.0, 1.0]))
    alpha = -np.ones(2) / (1.0 - np.exp(-2.0))
    u = np.zeros(2)
    return d, alpha, u
