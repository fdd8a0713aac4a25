"""Trained-classifier representation, prediction, metrics, serialization.

A trained model keeps only the support-vector rows: the decision function

    f(x) = - sum_{i in T*} alpha_i y_i k(x_i, x)

depends on nothing else, and T* is typically small. Support vectors are
the training points whose shifted iterate u_i - gamma*alpha_i lands in
the hard-thresholding interval (0, sqrt(2*gamma*C)]; at a certified
solution they all sit on the surfaces f = +-1.
"""

from __future__ import annotations

import dataclasses
import json
import struct
from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .kernel import KernelSpec, cross_gram
from .prox import ProxParams, zero_set


@dataclass(frozen=True)
class TrainedModel:
    """Kernel expansion over the support vectors.

    ``alpha`` has full training length with exact zeros off ``sv_indices``
    (enforced at construction); at a certified solution the SV entries are
    negative, in [-sqrt(2C/gamma), 0).
    """

    alpha: np.ndarray
    sv_indices: np.ndarray
    sv_inputs: np.ndarray
    sv_labels: np.ndarray
    spec: KernelSpec
    config_snapshot: object

    @property
    def nsv(self):
        return int(self.sv_indices.size)


@dataclass(frozen=True)
class Metrics:
    """Per-run accuracy, support-vector count, and training wall time."""

    acc: float
    nsv: int
    cpu_seconds: float


def extract_svs(alpha, u, gamma: float, C: float) -> np.ndarray:
    """Support-vector index set T* = {i : u_i - gamma*alpha_i in (0, sqrt(2*gamma*C)]}."""
    alpha = np.asarray(alpha, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    return zero_set(u - gamma * alpha, ProxParams(gamma, C))


def build_model(alpha, u, d: Dataset, spec: KernelSpec, cfg) -> TrainedModel:
    """Assemble a TrainedModel from final solver iterates, zeroing non-SV alpha."""
    T = extract_svs(alpha, u, cfg.gamma, cfg.C)
    alpha_clean = np.zeros(d.m)
    alpha_clean[T] = np.asarray(alpha)[T]
    return TrainedModel(alpha_clean, T, d.features[T].copy(), d.labels[T].copy(),
                        spec, cfg)


def decision_values(model: TrainedModel, X) -> np.ndarray:
    """Decision function on a batch of points (rows); empty T* gives zeros."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != model.sv_inputs.shape[1]:
        raise ValueError(
            f"point dimension {X.shape[1]} does not match training dimension "
            f"{model.sv_inputs.shape[1]}")
    if model.nsv == 0:
        return np.zeros(X.shape[0])
    G = cross_gram(model.sv_inputs, X, model.spec)
    weights = model.alpha[model.sv_indices] * model.sv_labels
    return -(weights @ G)


def decision_value(model: TrainedModel, x) -> float:
    return float(decision_values(model, np.asarray(x, dtype=np.float64)[None, :])[0])


def predict(model: TrainedModel, X) -> np.ndarray:
    """Predicted labels: sign of the decision value, with sign(0) -> +1."""
    f = decision_values(model, X)
    return np.where(f >= 0.0, 1.0, -1.0)


def accuracy(model: TrainedModel, test: Dataset) -> float:
    """Fraction of correct predictions on a labeled test set."""
    if test.m == 0:
        raise ValueError("test set is empty")
    return float(np.mean(predict(model, test.features) == test.labels))


_MODEL_VERSION = 1


def save_model(model: TrainedModel, path) -> None:
    """Write version byte + JSON envelope + float64 blobs (SVs, alpha, labels)."""
    cfg = model.config_snapshot
    envelope = {
        "kernel": model.spec.to_dict(),
        "sv_count": model.nsv,
        "n": int(model.sv_inputs.shape[1]),
        "m": int(model.alpha.size),
        "sv_indices": [int(i) for i in model.sv_indices],
        "solver_config": dataclasses.asdict(cfg) if dataclasses.is_dataclass(cfg) else None,
    }
    hdr = json.dumps(envelope, sort_keys=True).encode()
    with open(path, "wb") as fh:
        fh.write(struct.pack("<BI", _MODEL_VERSION, len(hdr)))
        fh.write(hdr)
        fh.write(np.ascontiguousarray(model.sv_inputs, dtype=np.float64).tobytes())
        fh.write(np.ascontiguousarray(model.alpha[model.sv_indices]).tobytes())
        fh.write(np.ascontiguousarray(model.sv_labels, dtype=np.float64).tobytes())


def load_model(path) -> TrainedModel:
    with open(path, "rb") as fh:
        version, hdr_len = struct.unpack("<BI", fh.read(5))
        if version != _MODEL_VERSION:
            raise ValueError(f"unsupported model version {version}")
        envelope = json.loads(fh.read(hdr_len))
        k, n, m = envelope["sv_count"], envelope["n"], envelope["m"]
        sv_inputs = np.frombuffer(fh.read(8 * k * n), dtype=np.float64).reshape(k, n)
        alpha_sv = np.frombuffer(fh.read(8 * k), dtype=np.float64)
        sv_labels = np.frombuffer(fh.read(8 * k), dtype=np.float64)
    sv_indices = np.asarray(envelope["sv_indices"], dtype=np.int64)
    alpha = np.zeros(m)
    alpha[sv_indices] = alpha_sv
    cfg = None
    if envelope.get("solver_config") is not None:
        from .linalg import CgConfig
        from .solver import SolverConfig
        raw = dict(envelope["solver_config"])
        raw["cg"] = CgConfig(**raw["cg"])
        cfg = SolverConfig(**raw)
    return TrainedModel(alpha, sv_indices, sv_inputs.copy(), sv_labels.copy(),
                        KernelSpec.from_dict(envelope["kernel"]), cfg)
