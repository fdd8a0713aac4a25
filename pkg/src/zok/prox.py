"""Closed-form proximal operator of u -> gamma*C*|u_+|_0.

Hard thresholding on the positive part: entries in (0, sqrt(2*gamma*C)]
collapse to 0, everything else passes through unchanged. The right
endpoint belongs to the zeroed interval (at the tie both branches have
equal objective; the closed bracket decides). Comparisons are exact
floating point; no epsilon fudging here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ProxParams:
    """Proximal step gamma > 0, penalty C > 0, cached threshold sqrt(2*gamma*C)."""

    gamma: float
    C: float
    threshold: float = None

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if not self.C > 0:
            raise ValueError(f"C must be positive, got {self.C}")
        object.__setattr__(self, "threshold", np.sqrt(2.0 * self.gamma * self.C))


def prox_l01_scalar(z: float, p: ProxParams) -> float:
    return 0.0 if 0.0 < z <= p.threshold else z


def prox_l01_vector(z: np.ndarray, p: ProxParams) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    return np.where((z > 0.0) & (z <= p.threshold), 0.0, z)


def zero_set(z: np.ndarray, p: ProxParams) -> np.ndarray:
    """0-based indices where the prox zeroes z: {i : 0 < z_i <= sqrt(2*gamma*C)}."""
    z = np.asarray(z, dtype=np.float64)
    return np.flatnonzero((z > 0.0) & (z <= p.threshold))
