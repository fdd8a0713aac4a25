"""Kernel evaluation and Gram-matrix construction.

Inputs are bias-augmented (a constant 1 coordinate is appended) so the
intercept is absorbed into the kernel expansion. The Gaussian kernel is
evaluated on raw inputs because the appended constant cancels in the
squared distance; polynomial, sigmoid, and linear kernels see the
augmented points.
"""

from __future__ import annotations

import hashlib
import json
import os
import struct
from dataclasses import dataclass

import numpy as np

from .data import Dataset

FAMILIES = ("gaussian", "polynomial", "sigmoid", "linear")


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family plus its parameters.

    gaussian: k(a,b) = exp(-|a-b|^2 / (2 sigma_k^2)), sigma_k > 0
    polynomial: k(a,b) = <a,b>^degree, integer degree >= 1 (no offset term)
    sigmoid: k(a,b) = tanh(beta <a,b> + theta), beta > 1, theta < 0
    linear: k(a,b) = <a,b>
    """

    family: str
    sigma_k: float = 1.0
    degree: int = 2
    beta: float = 2.0
    theta: float = -1.0
    augment_bias: bool = True

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown kernel family {self.family!r}")
        if self.family == "gaussian" and not self.sigma_k > 0:
            raise ValueError(f"gaussian bandwidth must be positive, got {self.sigma_k}")
        if self.family == "polynomial":
            if self.degree < 1 or int(self.degree) != self.degree:
                raise ValueError(f"polynomial degree must be an integer >= 1, got {self.degree}")
        if self.family == "sigmoid":
            if not self.beta > 1:
                raise ValueError(f"sigmoid beta must be > 1, got {self.beta}")
            if not self.theta < 0:
                raise ValueError(f"sigmoid theta must be < 0, got {self.theta}")

    def to_dict(self):
        d = {"family": self.family, "augment_bias": self.augment_bias}
        if self.family == "gaussian":
            d["sigma_k"] = self.sigma_k
        elif self.family == "polynomial":
            d["degree"] = int(self.degree)
        elif self.family == "sigmoid":
            d["beta"] = self.beta
            d["theta"] = self.theta
        return d

    @staticmethod
    def from_dict(d):
        return KernelSpec(**d)


@dataclass(frozen=True)
class GramMatrix:
    """Dense m x m kernel matrix; ``signed`` means entries are y_i y_j k_ij."""

    entries: np.ndarray
    spec: KernelSpec
    signed: bool = False

    @property
    def m(self):
        return self.entries.shape[0]


def _augment(X: np.ndarray) -> np.ndarray:
    return np.hstack([X, np.ones((X.shape[0], 1))])


def cross_gram(A: np.ndarray, B: np.ndarray, spec: KernelSpec) -> np.ndarray:
    """Kernel matrix k(a_i, b_j) between two point sets (rows are points)."""
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    B = np.atleast_2d(np.asarray(B, dtype=np.float64))
    if A.shape[1] != B.shape[1]:
        raise ValueError(f"dimension mismatch: {A.shape[1]} vs {B.shape[1]}")
    if spec.family == "gaussian":
        ra = np.einsum("ij,ij->i", A, A)
        rb = np.einsum("ij,ij->i", B, B)
        sq = np.maximum(ra[:, None] + rb[None, :] - 2.0 * (A @ B.T), 0.0)
        return np.exp(-sq / (2.0 * spec.sigma_k**2))
    if spec.augment_bias:
        A, B = _augment(A), _augment(B)
    G = A @ B.T
    if spec.family == "polynomial":
        return G ** int(spec.degree)
    if spec.family == "sigmoid":
        return np.tanh(spec.beta * G + spec.theta)
    return G


def eval_kernel(a, b, spec: KernelSpec) -> float:
    """Single kernel evaluation k(a~, b~) with bias augmentation applied."""
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ValueError("points must be finite")
    if spec.family == "gaussian":
        diff = a - b
        return float(np.exp(-(diff @ diff) / (2.0 * spec.sigma_k**2)))
    return float(cross_gram(a[None, :], b[None, :], spec)[0, 0])


def gram_matrix(d: Dataset, spec: KernelSpec) -> GramMatrix:
    """Unsigned Gram matrix, exactly symmetric (each pair computed once)."""
    M = cross_gram(d.features, d.features, spec)
    upper = np.triu(M, 1)
    K = upper + upper.T + np.diag(np.diag(M))
    if spec.family == "gaussian":
        np.fill_diagonal(K, 1.0)
    return GramMatrix(K, spec, signed=False)


def sign_gram(g: GramMatrix, labels: np.ndarray) -> GramMatrix:
    """Signed Gram K~_ij = y_i y_j K_ij."""
    if g.signed:
        raise ValueError("gram matrix is already signed")
    y = np.asarray(labels, dtype=np.float64)
    if y.shape != (g.m,):
        raise ValueError(f"labels length {y.shape} does not match gram size {g.m}")
    return GramMatrix(g.entries * np.outer(y, y), g.spec, signed=True)


def rows_submatrix(g: GramMatrix, idx) -> np.ndarray:
    """Rows of the Gram matrix in the order given by ``idx`` (0-based)."""
    idx = np.asarray(idx, dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= g.m):
        raise ValueError(f"index out of range for {g.m} rows")
    return g.entries[idx, :]


def _cache_key(d: Dataset, spec: KernelSpec) -> str:
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(d.features).tobytes())
    h.update(json.dumps(spec.to_dict(), sort_keys=True).encode())
    return h.hexdigest()[:32]


def gram_matrix_cached(d: Dataset, spec: KernelSpec, cache_dir=None) -> GramMatrix:
    """Gram matrix with an optional on-disk cache.

    The cache directory comes from the argument or the ZOK_CACHE_DIR
    environment variable; when neither is set this is plain gram_matrix.
    The file layout is a header (magic, version, m, spec JSON) followed by
    row-major float64 entries.
    """
    cache_dir = cache_dir or os.environ.get("ZOK_CACHE_DIR")
    if not cache_dir:
        return gram_matrix(d, spec)
    os.makedirs(cache_dir, exist_ok=True)
    path = os.path.join(cache_dir, _cache_key(d, spec) + ".gram")
    if os.path.exists(path):
        with open(path, "rb") as fh:
            magic, version, m, hdr_len = struct.unpack("<4sBII", fh.read(13))
            if magic == b"ZOKG" and version == 1:
                fh.read(hdr_len)  # spec JSON, informational
                entries = np.frombuffer(fh.read(8 * m * m), dtype=np.float64).reshape(m, m)
                return GramMatrix(entries.copy(), spec, signed=False)
    g = gram_matrix(d, spec)
    hdr = json.dumps(spec.to_dict(), sort_keys=True).encode()
    tmp = path + f".tmp{os.getpid()}"
    with open(tmp, "wb") as fh:
        fh.write(struct.pack("<4sBII", b"ZOKG", 1, g.m, len(hdr)))
        fh.write(hdr)
        fh.write(np.ascontiguousarray(g.entries).tobytes())
    os.replace(tmp, path)
    return g
