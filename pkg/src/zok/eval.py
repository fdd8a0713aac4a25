"""Cross-validation, grid search, kernel comparison, and noise experiments.

The protocol throughout is stratified k-fold cross-validation with
min-max scaling fitted on each training split (optionally on the whole
set), reporting the mean accuracy (mACC), mean support-vector count
(mNSV), and mean training wall time (mCPU) across folds. Grid search
scans (C, kernel parameter, sigma) cells and reuses each fold's Gram
matrix across every cell that shares its kernel parameter.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from time import perf_counter

from .data import (Dataset, FoldPlan, NoiseSpec, fit_scaling, apply_scaling,
                   flip_labels, stratified_kfold)
from .kernel import KernelSpec, gram_matrix_cached
from .model import Metrics, accuracy
from .solver import Certificate, SolverConfig, train


def _pow2_grid():
    return tuple(2.0**k for k in range(-8, 9))


@dataclass(frozen=True)
class GridSpec:
    """Hyperparameter grid; defaults cover powers of two from 2^-8 to 2^8."""

    c_values: tuple = field(default_factory=_pow2_grid)
    kernel_param_values: tuple = field(default_factory=_pow2_grid)
    sigma_admm_values: tuple = (1.0,)

    def __post_init__(self):
        for name in ("c_values", "kernel_param_values", "sigma_admm_values"):
            vals = getattr(self, name)
            if len(vals) == 0:
                raise ValueError(f"{name} must be nonempty")
            if any(not v > 0 for v in vals):
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class CvReport:
    """Per-fold metrics and certificates plus their exact arithmetic means."""

    per_fold: tuple
    mean_acc: float
    mean_nsv: float
    mean_cpu: float
    best_params: tuple  # (C, kernel param, sigma_admm)
    certificates: tuple
    kernel_family: str
    fold_count: int
    noise_rate: float | None = None


def kernel_param_of(spec: KernelSpec):
    if spec.family == "gaussian":
        return spec.sigma_k
    if spec.family == "polynomial":
        return spec.degree
    if spec.family == "sigmoid":
        return spec.beta
    return None


def spec_with_param(base: KernelSpec, p) -> KernelSpec:
    """Rebind the family's scanned parameter (bandwidth/degree/beta)."""
    if base.family == "gaussian":
        return replace(base, sigma_k=float(p))
    if base.family == "polynomial":
        return replace(base, degree=int(p))
    if base.family == "sigmoid":
        return replace(base, beta=float(p))
    return base


def _make_report(results, params, family, fold_count, noise_rate=None) -> CvReport:
    metrics = tuple(m for m, _ in results)
    certs = tuple(c for _, c in results)
    n = len(metrics)
    return CvReport(
        per_fold=metrics,
        mean_acc=sum(m.acc for m in metrics) / n,
        mean_nsv=sum(m.nsv for m in metrics) / n,
        mean_cpu=sum(m.cpu_seconds for m in metrics) / n,
        best_params=params,
        certificates=certs,
        kernel_family=family,
        fold_count=fold_count,
        noise_rate=noise_rate,
    )


def _scaled_folds(d: Dataset, plan: FoldPlan, scaling: str):
    """Per-fold (train, test) datasets after min-max scaling.

    Folds whose training split contains a single class are dropped with a
    warning; they cannot be trained on.
    """
    if scaling not in ("train", "whole"):
        raise ValueError(f"scaling mode must be 'train' or 'whole', got {scaling!r}")
    whole_map = fit_scaling(d) if scaling == "whole" else None
    folds = []
    for f in range(plan.fold_count):
        train_idx, test_idx = plan.split(f)
        train_d, test_d = d.subset(train_idx), d.subset(test_idx)
        if len(set(train_d.labels.tolist())) < 2:
            warnings.warn(f"fold {f}: single-class training split, skipping")
            continue
        smap = whole_map if whole_map is not None else fit_scaling(train_d)
        folds.append((apply_scaling(train_d, smap), apply_scaling(test_d, smap)))
    if not folds:
        raise ValueError("every fold was skipped; no trainable split")
    return folds


def _fit_and_score(train_d, test_d, spec, cfg, gram=None):
    t0 = perf_counter()
    model, cert = train(train_d, spec, cfg, gram=gram)
    elapsed = perf_counter() - t0
    return Metrics(accuracy(model, test_d), model.nsv, elapsed), cert


def _run_tasks(tasks, jobs):
    """Run callables preserving order; threads share read-only Gram data."""
    if jobs <= 1 or len(tasks) <= 1:
        return [t() for t in tasks]
    with ThreadPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(lambda t: t(), tasks))


def cross_validate(d: Dataset, spec: KernelSpec, cfg: SolverConfig, plan: FoldPlan,
                   scaling: str = "train", jobs: int = 1, cache_dir=None,
                   include_gram_time: bool = False) -> CvReport:
    """k-fold CV at fixed hyperparameters.

    Each fold fits scaling on its training split (mode "train") or on the
    full set (mode "whole"), trains, and scores the held-out split. Timing
    covers the train call; Gram construction is excluded unless
    ``include_gram_time`` is set.
    """
    folds = _scaled_folds(d, plan, scaling)
    grams = [None if include_gram_time
             else gram_matrix_cached(tr, spec, cache_dir) for tr, _ in folds]
    tasks = [
        (lambda tr=tr, te=te, g=g: _fit_and_score(tr, te, spec, cfg, gram=g))
        for (tr, te), g in zip(folds, grams)
    ]
    results = _run_tasks(tasks, jobs)
    params = (cfg.C, kernel_param_of(spec), cfg.sigma_admm)
    return _make_report(results, params, spec.family, plan.fold_count)


def _report_sort_key(r: CvReport):
    # higher accuracy, then fewer SVs, then smaller C, kernel param, sigma
    C, kp, sigma = r.best_params
    return (-r.mean_acc, r.mean_nsv, C, 0.0 if kp is None else kp, sigma)


def grid_search(d: Dataset, grid: GridSpec, cfg: SolverConfig, plan: FoldPlan,
                base_spec: KernelSpec = KernelSpec("gaussian"),
                scaling: str = "train", jobs: int = 1, cache_dir=None,
                include_gram_time: bool = False):
    """Scan the grid, cross-validating every cell; returns (best, all reports).

    The winner maximizes mean accuracy; ties break toward fewer support
    vectors, then smaller C, kernel parameter, and sigma. Gram matrices
    are computed once per (fold, kernel parameter) and shared across all
    C and sigma cells.
    """
    folds = _scaled_folds(d, plan, scaling)
    kp_values = (None,) if base_spec.family == "linear" else grid.kernel_param_values
    reports = []
    for kp in kp_values:
        spec = base_spec if kp is None else spec_with_param(base_spec, kp)
        grams = [None if include_gram_time
                 else gram_matrix_cached(tr, spec, cache_dir) for tr, _ in folds]
        cells = [replace(cfg, C=C, sigma_admm=s)
                 for C in grid.c_values for s in grid.sigma_admm_values]
        tasks = [
            (lambda tr=tr, te=te, g=g, cc=cell: _fit_and_score(tr, te, spec, cc, gram=g))
            for cell in cells for (tr, te), g in zip(folds, grams)
        ]
        results = _run_tasks(tasks, jobs)
        nf = len(folds)
        for i, cell in enumerate(cells):
            params = (cell.C, kernel_param_of(spec), cell.sigma_admm)
            reports.append(_make_report(results[i * nf:(i + 1) * nf], params,
                                        spec.family, plan.fold_count))
    best = min(reports, key=_report_sort_key)
    return best, reports


def compare_linear_nonlinear(d: Dataset, grid: GridSpec, cfg: SolverConfig,
                             plan: FoldPlan, scaling: str = "train", jobs: int = 1,
                             cache_dir=None):
    """Grid search with the linear kernel and with the gaussian kernel.

    Returns (linear best, gaussian best); the gap between the two is the
    payoff of kernelization on data a hyperplane cannot separate.
    """
    linear_best, _ = grid_search(d, grid, cfg, plan, base_spec=KernelSpec("linear"),
                                 scaling=scaling, jobs=jobs, cache_dir=cache_dir)
    gauss_best, _ = grid_search(d, grid, cfg, plan, base_spec=KernelSpec("gaussian"),
                                scaling=scaling, jobs=jobs, cache_dir=cache_dir)
    return linear_best, gauss_best


def noise_experiment(d: Dataset, rates, grid: GridSpec, cfg: SolverConfig,
                     seed: int, folds: int = 10, fold_seed: int = 0,
                     base_spec: KernelSpec = KernelSpec("gaussian"),
                     scaling: str = "train", jobs: int = 1, cache_dir=None,
                     retune: bool = True, stratified_noise: bool = True):
    """Label-noise robustness: flip round(r*m) labels, then grid-search.

    Noise is injected into the full set before fold splitting, so flipped
    labels land in both training and test splits. With ``retune`` (the
    default) every rate gets its own grid search; otherwise the clean-data
    winner's parameters are reused at every rate. Returns one CvReport per
    rate, tagged with it.
    """
    rates = list(rates)
    if any(not 0.0 <= r < 0.5 for r in rates):
        raise ValueError("noise rates must lie in [0, 0.5)")
    fixed = None
    if not retune:
        plan = stratified_kfold(d, folds, fold_seed)
        fixed, _ = grid_search(d, grid, cfg, plan, base_spec=base_spec,
                               scaling=scaling, jobs=jobs, cache_dir=cache_dir)
    out = []
    for r in rates:
        flipped = flip_labels(d, NoiseSpec(r, seed, stratified=stratified_noise))
        plan = stratified_kfold(flipped, folds, fold_seed)
        if retune:
            best, _ = grid_search(flipped, grid, cfg, plan, base_spec=base_spec,
                                  scaling=scaling, jobs=jobs, cache_dir=cache_dir)
        else:
            C, kp, sigma = fixed.best_params
            spec = base_spec if kp is None else spec_with_param(base_spec, kp)
            best = cross_validate(flipped, spec, replace(cfg, C=C, sigma_admm=sigma),
                                  plan, scaling=scaling, jobs=jobs, cache_dir=cache_dir)
        out.append(replace(best, noise_rate=r))
    return out


def report_to_dict(r: CvReport) -> dict:
    """JSON-ready view of a CvReport."""
    C, kp, sigma = r.best_params
    return {
        "kernel_family": r.kernel_family,
        "fold_count": r.fold_count,
        "noise_rate": r.noise_rate,
        "params": {"C": C, "kernel_param": kp, "sigma_admm": sigma},
        "mean_acc": r.mean_acc,
        "mean_nsv": r.mean_nsv,
        "mean_cpu": r.mean_cpu,
        "per_fold": [
            {"acc": m.acc, "nsv": m.nsv, "cpu_seconds": m.cpu_seconds,
             **c.to_dict()}
            for m, c in zip(r.per_fold, r.certificates)
        ],
    }


def report_csv_rows(r: CvReport):
    """One flat dict per fold, for table assembly."""
    rows = []
    for i, (m, c) in enumerate(zip(r.per_fold, r.certificates)):
        rows.append({
            "fold": i,
            "noise_rate": "" if r.noise_rate is None else r.noise_rate,
            "acc": m.acc,
            "nsv": m.nsv,
            "cpu_seconds": m.cpu_seconds,
            "theta1": c.theta1,
            "theta2": c.theta2,
            "converged": c.converged,
            "iterations_used": c.iterations_used,
        })
    return rows
