"""Matrix-free conjugate gradients and symmetric eigenvalue diagnostics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IndefiniteOperatorError


@dataclass(frozen=True)
class CgConfig:
    """CG stopping controls; ``max_iter=None`` means the system size."""

    tol: float = 1e-8
    max_iter: int | None = None
    warm_start: bool = True

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError(f"cg tolerance must be positive, got {self.tol}")
        if self.max_iter is not None and self.max_iter < 1:
            raise ValueError(f"cg max_iter must be >= 1, got {self.max_iter}")


def cg_solve(apply_A, b, x0=None, cfg: CgConfig = CgConfig(), residual_history=None):
    """Solve A x = b for symmetric PSD A given only the matvec ``apply_A``.

    Stops when |A x - b| <= tol * max(1, |b|) or at max_iter. Returns
    (x, iterations, achieved residual norm). Negative curvature
    (p' A p < 0 beyond rounding) raises IndefiniteOperatorError so the
    caller can retry with a ridge term. ``residual_history``, if a list,
    receives the residual norm after every iteration.
    """
    b = np.asarray(b, dtype=np.float64)
    x = np.zeros_like(b) if x0 is None else np.array(x0, dtype=np.float64)
    max_iter = cfg.max_iter if cfg.max_iter is not None else b.size
    stop = cfg.tol * max(1.0, float(np.linalg.norm(b)))
    iters = 0
    while True:
        # true residual; restarting from it repairs recurrence drift
        r = b - apply_A(x)
        rnorm = float(np.linalg.norm(r))
        if rnorm <= stop or iters >= max_iter:
            return x, iters, rnorm
        p = r.copy()
        rs = rnorm * rnorm
        while iters < max_iter:
            Ap = apply_A(p)
            pAp = float(p @ Ap)
            if pAp <= 0.0:
                if pAp < -1e-12 * float(p @ p):
                    raise IndefiniteOperatorError(f"negative curvature p'Ap = {pAp:g}")
                # numerically null direction; cannot make progress
                return x, iters, float(np.linalg.norm(b - apply_A(x)))
            iters += 1
            alpha = rs / pAp
            x = x + alpha * p
            r = r - alpha * Ap
            rs_new = float(r @ r)
            rnorm = np.sqrt(rs_new)
            if residual_history is not None:
                residual_history.append(rnorm)
            if rnorm <= stop:
                break
            p = r + (rs_new / rs) * p
            rs = rs_new


def _check_symmetric(M: np.ndarray) -> np.ndarray:
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    scale = max(1.0, float(np.abs(M).max()))
    if float(np.abs(M - M.T).max()) > 1e-12 * scale:
        raise ValueError("matrix is not symmetric")
    return M


def _jacobi_eigenvalues(M: np.ndarray, tol: float, max_sweeps: int = 30) -> np.ndarray:
    A = M.copy()
    m = A.shape[0]
    target = tol * max(1.0, float(np.linalg.norm(M)))
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.tril(A, -1) ** 2) * 2.0)
        if off <= target:
            break
        for p in range(m - 1):
            for q in range(p + 1, m):
                apq = A[p, q]
                if abs(apq) <= 1e-300:
                    continue
                tau = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = np.sign(tau) / (abs(tau) + np.sqrt(1.0 + tau * tau)) if tau != 0 else 1.0
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                rp, rq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * rp - s * rq
                A[q, :] = s * rp + c * rq
                cp, cq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * cp - s * cq
                A[:, q] = s * cp + c * cq
                A[p, q] = A[q, p] = 0.0
    return np.sort(np.diag(A))


def smallest_eigenvalue(M: np.ndarray, tol: float = 1e-8) -> float:
    """Smallest eigenvalue of a symmetric matrix, within tol.

    Cyclic Jacobi for m <= 500; otherwise power iteration on s*I - M with
    a Gershgorin upper bound s >= lambda_max, stopped on the symmetric
    residual bound |Bv - rv| <= tol (which certifies an eigenvalue of B
    within tol of the Rayleigh quotient r).
    """
    M = _check_symmetric(M)
    m = M.shape[0]
    if m == 1:
        return float(M[0, 0])
    if m <= 500:
        return float(_jacobi_eigenvalues(M, tol)[0])
    diag = np.diag(M)
    radii = np.sum(np.abs(M), axis=1) - np.abs(diag)
    s = float(np.max(diag + radii)) + 1.0
    rng = np.random.default_rng(0)
    v = rng.standard_normal(m)
    v /= np.linalg.norm(v)
    r = 0.0
    for _ in range(100_000):
        w = s * v - M @ v
        r = float(v @ w)
        res = w - r * v
        if float(np.linalg.norm(res)) <= tol:
            break
        nw = float(np.linalg.norm(w))
        if nw == 0.0:
            break  # v is an exact null vector of B
        v = w / nw
    return s - r
