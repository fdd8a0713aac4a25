"""Working-set proximal ADMM for the kernel SVM with exact 0/1 loss.

The training problem is

    min_alpha  0.5 alpha' K~ alpha + C |u_+|_0   s.t.  u - K~ alpha = e

with K~ the label-signed Gram matrix. Each iteration selects the working
set T_k from the shifted iterate z^k = e + K~ alpha^k - lambda^k / sigma,
zeroes u on T_k, solves a reduced positive-definite system for alpha by
matrix-free CG, and updates the multiplier on T_k only. Convergence is
declared when both scaled residuals (primal feasibility and the proximal
fixed-point gap) fall below tol; the returned Certificate records them.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .data import Dataset, validate
from .errors import IndefiniteOperatorError, SolverError
from .kernel import GramMatrix, KernelSpec, gram_matrix, rows_submatrix, sign_gram
from .linalg import CgConfig, cg_solve, smallest_eigenvalue
from .model import TrainedModel, build_model
from .prox import ProxParams, prox_l01_vector, zero_set


@dataclass(frozen=True)
class SolverConfig:
    """Training hyperparameters.

    The proximal step gamma is always 1/sigma_admm, never set separately.
    ridge_jitter=None means 1e-8 times the mean Gram diagonal, applied
    once if CG reports an indefinite operator.
    """

    C: float = 1.0
    sigma_admm: float = 1.0
    eta: float = 1.0
    max_iter: int = 100
    tol: float = 1e-3
    alpha0_scale: float = 0.01
    ridge_jitter: float | None = None
    cg: CgConfig = field(default_factory=CgConfig)
    compute_lambda_min: bool = False

    def __post_init__(self):
        for name in ("C", "sigma_admm", "eta", "tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")

    @property
    def gamma(self):
        return 1.0 / self.sigma_admm


@dataclass
class SolverState:
    """Iterates of the ADMM loop; ``lam`` is the multiplier vector."""

    alpha: np.ndarray
    u: np.ndarray
    lam: np.ndarray
    working_set_idx: np.ndarray
    iteration: int


@dataclass(frozen=True)
class Certificate:
    """Stopping-test outcome plus diagnostics for one training run."""

    theta1: float
    theta2: float
    converged: bool
    iterations_used: int
    lambda_min: float | None
    gamma: float
    jitter_used: float = 0.0

    def to_dict(self):
        return {
            "theta1": self.theta1,
            "theta2": self.theta2,
            "converged": self.converged,
            "iterations_used": self.iterations_used,
            "lambda_min": self.lambda_min,
            "gamma": self.gamma,
            "jitter_used": self.jitter_used,
        }


def working_set(alpha, lam, signed_gram: GramMatrix, cfg: SolverConfig):
    """Working set T_k and the shifted iterate z = e + K~ alpha - lambda/sigma."""
    z = 1.0 + signed_gram.entries @ alpha - lam / cfg.sigma_admm
    T = zero_set(z, ProxParams(cfg.gamma, cfg.C))
    return T, z


def update_u(z: np.ndarray, T: np.ndarray) -> np.ndarray:
    u = z.copy()
    u[T] = 0.0
    return u


def update_alpha(state: SolverState, u_next, signed_gram: GramMatrix, cfg: SolverConfig):
    """Solve (K~ + sigma K~_T' K~_T) alpha = sigma K~_T' v_T by matrix-free CG.

    Returns (alpha, jitter_used). An empty working set short-circuits to
    alpha = 0. Indefiniteness triggers one retry with a diagonal ridge.
    """
    T = state.working_set_idx
    K = signed_gram.entries
    m = K.shape[0]
    if T.size == 0:
        return np.zeros(m), 0.0
    Kt = rows_submatrix(signed_gram, T)
    v_T = (u_next - 1.0 + state.lam / cfg.sigma_admm)[T]
    b = cfg.sigma_admm * (Kt.T @ v_T)
    x0 = state.alpha if (cfg.cg.warm_start and state.iteration > 0) else None

    def run(jitter):
        def apply_A(w):
            out = K @ w + cfg.sigma_admm * (Kt.T @ (Kt @ w))
            return out + jitter * w if jitter else out
        x, _, _ = cg_solve(apply_A, b, x0=x0, cfg=cfg.cg)
        return x

    try:
        return run(0.0), 0.0
    except IndefiniteOperatorError:
        jitter = cfg.ridge_jitter
        if jitter is None:
            jitter = 1e-8 * float(np.trace(K)) / m
        try:
            return run(jitter), jitter
        except IndefiniteOperatorError as exc:
            raise SolverError(f"alpha update failed even with ridge {jitter:g}: {exc}") from exc


def update_lambda(state: SolverState, u_next, alpha_next, signed_gram: GramMatrix,
                  cfg: SolverConfig) -> np.ndarray:
    """Dual ascent on the working set; zero off it."""
    T = state.working_set_idx
    lam = np.zeros_like(state.lam)
    if T.size:
        varpi = u_next - 1.0 - signed_gram.entries @ alpha_next
        lam[T] = state.lam[T] + cfg.eta * cfg.sigma_admm * varpi[T]
    return lam


def residuals(alpha, u, signed_gram: GramMatrix, cfg: SolverConfig):
    """Scaled stopping residuals (theta1, theta2) with gamma = 1/sigma_admm."""
    m = signed_gram.m
    theta1 = float(np.linalg.norm(u - 1.0 - signed_gram.entries @ alpha)) / np.sqrt(m)
    p = ProxParams(cfg.gamma, cfg.C)
    gap = u - prox_l01_vector(u - cfg.gamma * alpha, p)
    theta2 = float(np.linalg.norm(gap)) / (1.0 + float(np.linalg.norm(u)))
    return theta1, theta2


def check_pstationary(alpha, u, signed_gram: GramMatrix, gamma: float, C: float,
                      tol: float) -> bool:
    """Both P-stationarity conditions within tol, scaled as in ``residuals``:

    feasibility u - K~ alpha = e and the fixed point
    Prox(u - gamma*alpha) = u of the hard-thresholding operator.
    """
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    m = signed_gram.m
    theta1 = float(np.linalg.norm(u - 1.0 - signed_gram.entries @ alpha)) / np.sqrt(m)
    p = ProxParams(gamma, C)
    gap = u - prox_l01_vector(u - gamma * alpha, p)
    theta2 = float(np.linalg.norm(gap)) / (1.0 + float(np.linalg.norm(u)))
    return max(theta1, theta2) < tol


def solve(d: Dataset, spec: KernelSpec, cfg: SolverConfig = SolverConfig(),
          gram: GramMatrix | None = None):
    """Run the ADMM loop; returns the final (SolverState, Certificate).

    The state carries the raw iterates (alpha, u, lambda): u has exact
    zeros on the last working set, which matters when counting margin
    violations, since the 0/1 loss counts strictly positive entries.
    ``gram`` may carry a precomputed unsigned Gram matrix for ``d`` so
    grid-search cells sharing a kernel parameter skip recomputation.
    Deterministic: no randomness anywhere in the loop.
    """
    validate(d)
    if gram is None:
        gram = gram_matrix(d, spec)
    if gram.signed or gram.m != d.m:
        raise ValueError("gram must be the unsigned Gram matrix of d")
    signed = sign_gram(gram, d.labels)

    m = d.m
    state = SolverState(
        alpha=np.full(m, cfg.alpha0_scale),
        u=np.zeros(m),
        lam=np.zeros(m),
        working_set_idx=np.arange(m),
        iteration=0,
    )
    theta1 = theta2 = np.inf
    converged = False
    jitter_used = 0.0
    iterations = 0
    for k in range(cfg.max_iter):
        T, z = working_set(state.alpha, state.lam, signed, cfg)
        state.working_set_idx = T
        u_next = update_u(z, T)
        assert not T.size or not np.any(u_next[T])
        alpha_next, jitter = update_alpha(state, u_next, signed, cfg)
        jitter_used = max(jitter_used, jitter)
        lam_next = update_lambda(state, u_next, alpha_next, signed, cfg)
        assert not np.any(np.delete(lam_next, T))
        state = SolverState(alpha_next, u_next, lam_next, T, k + 1)
        iterations = k + 1
        theta1, theta2 = residuals(state.alpha, state.u, signed, cfg)
        if max(theta1, theta2) < cfg.tol:
            converged = True
            break

    lam_min = None
    if cfg.compute_lambda_min:
        lam_min = smallest_eigenvalue(signed.entries, tol=1e-6)
    cert = Certificate(theta1, theta2, converged, iterations, lam_min, cfg.gamma,
                       jitter_used)
    return state, cert


def train(d: Dataset, spec: KernelSpec, cfg: SolverConfig = SolverConfig(),
          gram: GramMatrix | None = None):
    """Solve and package the result; returns (TrainedModel, Certificate)."""
    state, cert = solve(d, spec, cfg, gram=gram)
    model = build_model(state.alpha, state.u, d, spec, cfg)
    return model, cert
