"""Independent oracles for the test suite.

These deliberately avoid the solver's code paths: the objective is
recomputed from its definition, the global minimizer on tiny instances
comes from exact enumeration, and the linear-kernel degeneracy identity
is expanded by hand. They exist so solver results can be checked against
something that shares no implementation with the solver.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .data import Dataset
from .kernel import GramMatrix, KernelSpec, gram_matrix, sign_gram


@dataclass(frozen=True)
class ObjectiveValue:
    """0.5 alpha' K~ alpha + C * |u_+|_0 split into its two terms."""

    quadratic: float
    loss_count: int
    total: float


def objective(alpha, signed_gram: GramMatrix, C: float) -> ObjectiveValue:
    """Objective at alpha with u recovered from the constraint u = e + K~ alpha.

    The loss term counts strictly positive entries of u. Note the count is
    knife-edged at u_i = 0: a minimizer typically parks margin points there
    exactly, and recovering u through K~ alpha perturbs them by rounding,
    so prefer objective_with_u when an explicit u iterate is available.
    """
    alpha = np.asarray(alpha, dtype=np.float64)
    K = signed_gram.entries
    u = 1.0 + K @ alpha
    quadratic = 0.5 * float(alpha @ (K @ alpha))
    loss = int(np.sum(u > 0.0))
    return ObjectiveValue(quadratic, loss, quadratic + C * loss)


def objective_with_u(alpha, u, signed_gram: GramMatrix, C: float) -> ObjectiveValue:
    """Objective at an explicit (alpha, u) pair, e.g. the solver's iterates.

    The solver's u-update writes exact zeros on the working set, so margin
    points do not get miscounted as violations the way they can when u is
    reconstituted from alpha in floating point.
    """
    alpha = np.asarray(alpha, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    quadratic = 0.5 * float(alpha @ (signed_gram.entries @ alpha))
    loss = int(np.sum(u > 0.0))
    return ObjectiveValue(quadratic, loss, quadratic + C * loss)


def global_bruteforce(signed_gram: GramMatrix, C: float, m_cap: int = 8):
    """Exact global minimizer of the training problem on a tiny instance.

    Works in u-space, where the objective is 0.5 (u-e)' Q (u-e) + C*|u_+|_0
    with Q = K~^{-1}. For every candidate active set W (the coordinates
    pinned at u_i = 0), the quadratic's stationary point over the free
    coordinates is a linear solve; the global minimizer is the stationary
    point of its own active set, so scanning all 2^m sets and recounting
    the loss from each achieved u finds it exactly. Requires K~ invertible.

    Returns (alpha, ObjectiveValue) for the best candidate.
    """
    K = signed_gram.entries
    m = K.shape[0]
    if m > m_cap:
        raise ValueError(f"instance size {m} exceeds m_cap={m_cap}")
    try:
        Q = np.linalg.inv(K)
    except np.linalg.LinAlgError as exc:
        raise ValueError("signed gram matrix must be invertible") from exc

    best_alpha = None
    best = None
    indices = range(m)
    for size in range(m + 1):
        for W in combinations(indices, size):
            Wl = list(W)
            F = [i for i in indices if i not in W]
            w = np.empty(m)
            w[Wl] = -1.0
            if F:
                rhs = Q[np.ix_(F, Wl)] @ np.ones(len(Wl)) if Wl else np.zeros(len(F))
                w[F] = np.linalg.solve(Q[np.ix_(F, F)], rhs)
            u = 1.0 + w
            u[Wl] = 0.0
            alpha = Q @ w
            quadratic = 0.5 * float(w @ alpha)
            loss = int(np.sum(u > 0.0))
            total = quadratic + C * loss
            if best is None or total < best.total:
                best = ObjectiveValue(quadratic, loss, total)
                best_alpha = alpha
    return best_alpha, best


def prox_grid_argmin(z, gamma, C, step=1e-4):
    """Argmin of h(u) = 0.5 (u-z)^2 + gamma*C*[u > 0] over the lattice step*Z.

    Vectorized over z; gamma and C broadcast against it. The full-lattice
    argmin is always attained at one of a handful of candidates: the lattice
    neighbors of z (the quadratic's minimum), their clamps to the u <= 0
    branch, 0 itself, and the first positive lattice point. Evaluating h on
    that candidate set is therefore exactly the naive full scan, at O(1) per
    case; ties resolve toward the smallest u, matching an ascending scan.
    Candidates are formed as k*step products so they match the naive scan's
    lattice points bit for bit.
    """
    z = np.atleast_1d(np.asarray(z, dtype=np.float64))
    k = np.floor(z / step)
    lo = k * step
    hi = (k + 1.0) * step
    cands = np.stack([
        np.minimum(lo, 0.0),          # best lattice point on the u <= 0 branch
        np.minimum(hi, 0.0),
        np.zeros_like(z),             # boundary of the free branch
        np.maximum(lo, step),         # best lattice point on the u > 0 branch
        np.maximum(hi, step),
    ])
    cost = 0.5 * (cands - z) ** 2 + np.asarray(gamma * C) * (cands > 0.0)
    order = np.argsort(cands, axis=0, kind="stable")
    cands = np.take_along_axis(cands, order, axis=0)
    cost = np.take_along_axis(cost, order, axis=0)
    return np.take_along_axis(cands, np.argmin(cost, axis=0)[None, :], axis=0)[0]


def prox_grid_argmin_naive(z, gamma, C, step=1e-4):
    """Scalar full-scan twin of prox_grid_argmin, for validating the reduction.

    Scans every lattice point in [min(z,0) - 1, max(z,0) + 1], which brackets
    all minimizers since h grows quadratically away from that interval.
    """
    lo = int(np.ceil((min(z, 0.0) - 1.0) / step))
    hi = int(np.floor((max(z, 0.0) + 1.0) / step))
    us = np.arange(lo, hi + 1, dtype=np.float64) * step
    cost = 0.5 * (us - z) ** 2 + gamma * C * (us > 0.0)
    return float(us[np.argmin(cost)])


def degeneracy_check(d: Dataset, alpha, spec: KernelSpec | None = None):
    """Both sides of the linear-kernel identity 0.5 a'K~a = 0.5|w|^2 + 0.5 b^2.

    The right side expands the kernel sum into the explicit primal pair
    (w', b)' = -sum_i alpha_i y_i (x_i', 1)'. Only defined for the linear
    kernel with bias augmentation.
    """
    if spec is None:
        spec = KernelSpec("linear")
    if spec.family != "linear" or not spec.augment_bias:
        raise ValueError("degeneracy check requires the bias-augmented linear kernel")
    alpha = np.asarray(alpha, dtype=np.float64)
    signed = sign_gram(gram_matrix(d, spec), d.labels)
    lhs = 0.5 * float(alpha @ (signed.entries @ alpha))
    coeff = alpha * d.labels
    w = -(coeff @ d.features)
    b = -float(np.sum(coeff))
    rhs = 0.5 * float(w @ w) + 0.5 * b * b
    return lhs, rhs
