"""Command-line front end.

Subcommands: train, predict, cv, grid, compare, noise. Options resolve
with CLI flags taking precedence over a JSON config file (--config),
which takes precedence over built-in defaults. Reports embed the full
resolved configuration so a run can be reproduced from its output alone.

Exit codes: 0 success, 1 usage or data error, 2 non-convergence (the
artifacts are still written).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import asdict, dataclass, replace

from . import __version__
from .data import load_csv, load_features_csv, load_libsvm, stratified_kfold
from .errors import ParseError, ZokError
from .eval import (GridSpec, compare_linear_nonlinear, cross_validate, grid_search,
                   noise_experiment, report_csv_rows, report_to_dict)
from .kernel import KernelSpec
from .model import accuracy, decision_values, load_model, predict, save_model
from .solver import SolverConfig, train

_DEFAULTS = {
    "data": None,
    "format": "csv",
    "kernel": "gaussian",
    "kernel_param": None,
    "C": 1.0,
    "sigma_admm": 1.0,
    "eta": 1.0,
    "max_iter": 100,
    "tol": 1e-3,
    "folds": 10,
    "seed": 0,
    "noise_seed": 0,
    "noise_rates": "0.05,0.10",
    "grid_log2_range": "-8,8",
    "jobs": 1,
    "out": ".",
    "scaling": "train",
    "model": None,
    "retune": True,
    "include_gram_time": False,
    "gamma_bound": False,
}


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved options for one CLI invocation."""

    data: str | None
    format: str
    kernel: str
    kernel_param: str | None
    C: float
    sigma_admm: float
    eta: float
    max_iter: int
    tol: float
    folds: int
    seed: int
    noise_seed: int
    noise_rates: str
    grid_log2_range: str
    jobs: int
    out: str
    scaling: str
    model: str | None
    retune: bool
    include_gram_time: bool
    gamma_bound: bool


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="zok", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"zok {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("train", "train a model, write model.bin and certificate.json"),
        ("predict", "score a dataset with a trained model"),
        ("cv", "k-fold cross-validation at fixed hyperparameters"),
        ("grid", "grid search over C and the kernel parameter"),
        ("compare", "linear vs gaussian kernel grid search"),
        ("noise", "label-noise robustness experiment"),
    ]:
        p = sub.add_parser(name, help=help_text, parents=[], add_help=True)
        p.add_argument("--config", help="JSON config file; flags override its fields")
        p.add_argument("--data", help="input data file")
        p.add_argument("--format", choices=["csv", "libsvm"])
        p.add_argument("--kernel", choices=["gaussian", "poly", "sigmoid", "linear"])
        p.add_argument("--kernel-param", dest="kernel_param",
                       help="bandwidth / degree / 'beta,theta'")
        p.add_argument("--C", type=float, dest="C")
        p.add_argument("--sigma-admm", type=float, dest="sigma_admm")
        p.add_argument("--eta", type=float)
        p.add_argument("--max-iter", type=int, dest="max_iter")
        p.add_argument("--tol", type=float)
        p.add_argument("--folds", type=int)
        p.add_argument("--seed", type=int, help="fold-assignment seed")
        p.add_argument("--noise-seed", type=int, dest="noise_seed")
        p.add_argument("--noise-rates", dest="noise_rates",
                       help="comma-separated flip rates, e.g. 0.05,0.10")
        p.add_argument("--grid-log2-range", dest="grid_log2_range",
                       help="lo,hi exponents for the power-of-two grid")
        p.add_argument("--jobs", type=int)
        p.add_argument("--out", help="output directory")
        p.add_argument("--scaling", choices=["train", "whole"])
        p.add_argument("--model", help="model file (predict)")
        p.add_argument("--no-retune", dest="retune", action="store_false",
                       default=None, help="noise: reuse clean-data tuning")
        p.add_argument("--include-gram-time", dest="include_gram_time",
                       action="store_true", default=None,
                       help="count Gram construction in mCPU")
        p.add_argument("--gamma-bound", dest="gamma_bound", action="store_true",
                       default=None,
                       help="train: compute lambda_min for the certificate")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    file_cfg = {}
    if getattr(args, "config", None):
        with open(args.config, "r", encoding="utf-8") as fh:
            file_cfg = json.load(fh)
        unknown = set(file_cfg) - set(_DEFAULTS)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
    merged = {}
    for key, default in _DEFAULTS.items():
        cli_val = getattr(args, key, None)
        merged[key] = cli_val if cli_val is not None else file_cfg.get(key, default)
    return RunConfig(**merged)


def _kernel_spec(cfg: RunConfig) -> KernelSpec:
    family = {"poly": "polynomial"}.get(cfg.kernel, cfg.kernel)
    if cfg.kernel_param is None:
        return KernelSpec(family)
    parts = [float(t) for t in str(cfg.kernel_param).split(",")]
    if family == "gaussian":
        return KernelSpec(family, sigma_k=parts[0])
    if family == "polynomial":
        return KernelSpec(family, degree=int(parts[0]))
    if family == "sigmoid":
        theta = parts[1] if len(parts) > 1 else -1.0
        return KernelSpec(family, beta=parts[0], theta=theta)
    return KernelSpec(family)


def _solver_config(cfg: RunConfig) -> SolverConfig:
    return SolverConfig(C=cfg.C, sigma_admm=cfg.sigma_admm, eta=cfg.eta,
                        max_iter=cfg.max_iter, tol=cfg.tol,
                        compute_lambda_min=cfg.gamma_bound)


def _load_dataset(cfg: RunConfig, require_both_classes=True):
    if not cfg.data:
        raise ValueError("--data is required")
    name = os.path.splitext(os.path.basename(cfg.data))[0]
    loader = load_libsvm if cfg.format == "libsvm" else load_csv
    return loader(cfg.data, name=name,
                  require_both_classes=require_both_classes)


def _grid_spec(cfg: RunConfig) -> GridSpec:
    lo, hi = (int(t) for t in cfg.grid_log2_range.split(","))
    if lo > hi:
        raise ValueError(f"empty grid range {cfg.grid_log2_range!r}")
    vals = tuple(2.0**k for k in range(lo, hi + 1))
    return GridSpec(c_values=vals, kernel_param_values=vals,
                    sigma_admm_values=(cfg.sigma_admm,))


def _write_json(path, payload):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_csv(path, rows):
    if not rows:
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)


def _print_summary(tag, report):
    C, kp, sigma = report.best_params
    kp_text = "-" if kp is None else f"{kp:g}"
    print(f"{tag:<24} {report.kernel_family:<10} C={C:<10g} param={kp_text:<8} "
          f"mACC={report.mean_acc:.4f} mNSV={report.mean_nsv:.2f} "
          f"mCPU={report.mean_cpu:.3f}s")


def _resolved(cfg: RunConfig) -> dict:
    return asdict(cfg)


def cmd_train(cfg: RunConfig) -> int:
    d = _load_dataset(cfg)
    model, cert = train(d, _kernel_spec(cfg), _solver_config(cfg))
    os.makedirs(cfg.out, exist_ok=True)
    save_model(model, os.path.join(cfg.out, "model.bin"))
    _write_json(os.path.join(cfg.out, "certificate.json"),
                {"certificate": cert.to_dict(), "nsv": model.nsv,
                 "config": _resolved(cfg)})
    print(f"trained on {d.name}: m={d.m} nsv={model.nsv} "
          f"theta1={cert.theta1:.2e} theta2={cert.theta2:.2e} "
          f"converged={cert.converged}")
    return 0 if cert.converged else 2


def cmd_predict(cfg: RunConfig) -> int:
    if not cfg.model:
        raise ValueError("--model is required for predict")
    model = load_model(cfg.model)
    labels = None
    if cfg.format == "libsvm":
        d = load_libsvm(cfg.data, require_both_classes=False)
        X, labels = d.features, d.labels
    else:
        try:
            d = load_csv(cfg.data, require_both_classes=False)
            X, labels = d.features, d.labels
        except ParseError:
            X = load_features_csv(cfg.data)
    f = decision_values(model, X)
    preds = predict(model, X)
    os.makedirs(cfg.out, exist_ok=True)
    rows = [{"index": i, "decision_value": f[i], "label": int(preds[i])}
            for i in range(len(f))]
    _write_csv(os.path.join(cfg.out, "predictions.csv"), rows)
    if labels is not None:
        acc = float((preds == labels).mean())
        print(f"accuracy: {acc:.4f} ({int((preds == labels).sum())}/{len(labels)})")
    return 0


def _report_exit(report) -> int:
    return 0 if any(c.converged for c in report.certificates) else 2


def cmd_cv(cfg: RunConfig) -> int:
    d = _load_dataset(cfg)
    plan = stratified_kfold(d, cfg.folds, cfg.seed)
    report = cross_validate(d, _kernel_spec(cfg), _solver_config(cfg), plan,
                            scaling=cfg.scaling, jobs=cfg.jobs,
                            include_gram_time=cfg.include_gram_time)
    os.makedirs(cfg.out, exist_ok=True)
    _write_json(os.path.join(cfg.out, "report.json"),
                {"report": report_to_dict(report), "config": _resolved(cfg)})
    _write_csv(os.path.join(cfg.out, "report.csv"), report_csv_rows(report))
    _print_summary(d.name, report)
    return _report_exit(report)


def cmd_grid(cfg: RunConfig) -> int:
    d = _load_dataset(cfg)
    plan = stratified_kfold(d, cfg.folds, cfg.seed)
    best, cells = grid_search(d, _grid_spec(cfg), _solver_config(cfg), plan,
                              base_spec=_kernel_spec(cfg), scaling=cfg.scaling,
                              jobs=cfg.jobs,
                              include_gram_time=cfg.include_gram_time)
    os.makedirs(cfg.out, exist_ok=True)
    cell_summaries = [{"params": report_to_dict(r)["params"],
                       "mean_acc": r.mean_acc, "mean_nsv": r.mean_nsv,
                       "mean_cpu": r.mean_cpu} for r in cells]
    _write_json(os.path.join(cfg.out, "report.json"),
                {"best": report_to_dict(best), "cells": cell_summaries,
                 "config": _resolved(cfg)})
    _write_csv(os.path.join(cfg.out, "report.csv"), report_csv_rows(best))
    _print_summary(d.name, best)
    return _report_exit(best)


def cmd_compare(cfg: RunConfig) -> int:
    d = _load_dataset(cfg)
    plan = stratified_kfold(d, cfg.folds, cfg.seed)
    linear, gauss = compare_linear_nonlinear(d, _grid_spec(cfg), _solver_config(cfg),
                                             plan, scaling=cfg.scaling, jobs=cfg.jobs)
    os.makedirs(cfg.out, exist_ok=True)
    _write_json(os.path.join(cfg.out, "report.json"),
                {"linear": report_to_dict(linear), "gaussian": report_to_dict(gauss),
                 "config": _resolved(cfg)})
    rows = []
    for kernel, rep in (("linear", linear), ("gaussian", gauss)):
        for row in report_csv_rows(rep):
            rows.append({"kernel": kernel, **row})
    _write_csv(os.path.join(cfg.out, "report.csv"), rows)
    _print_summary(f"{d.name} (linear)", linear)
    _print_summary(f"{d.name} (gaussian)", gauss)
    return 0 if (_report_exit(linear) == 0 or _report_exit(gauss) == 0) else 2


def cmd_noise(cfg: RunConfig) -> int:
    d = _load_dataset(cfg)
    rates = [float(t) for t in cfg.noise_rates.split(",") if t.strip()]
    reports = noise_experiment(d, rates, _grid_spec(cfg), _solver_config(cfg),
                               seed=cfg.noise_seed, folds=cfg.folds,
                               fold_seed=cfg.seed, base_spec=_kernel_spec(cfg),
                               scaling=cfg.scaling, jobs=cfg.jobs,
                               retune=cfg.retune)
    os.makedirs(cfg.out, exist_ok=True)
    _write_json(os.path.join(cfg.out, "report.json"),
                {"reports": [report_to_dict(r) for r in reports],
                 "config": _resolved(cfg)})
    rows = [row for r in reports for row in report_csv_rows(r)]
    _write_csv(os.path.join(cfg.out, "report.csv"), rows)
    for r in reports:
        _print_summary(f"{d.name} (r={r.noise_rate:g})", r)
    return 0 if any(_report_exit(r) == 0 for r in reports) else 2


_COMMANDS = {
    "train": cmd_train,
    "predict": cmd_predict,
    "cv": cmd_cv,
    "grid": cmd_grid,
    "compare": cmd_compare,
    "noise": cmd_noise,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        return _COMMANDS[args.command](cfg)
    except (ZokError, OSError, ValueError, KeyError) as exc:
        print(f"zok: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
