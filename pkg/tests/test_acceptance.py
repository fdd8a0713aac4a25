"""Acceptance gate.

Eight numbered criteria, each printing one [PASS]/[FAIL]/[SKIP] line with
its pinned tolerance. Criteria over the fetched UCI datasets (bre, ech,
hea, wdb) skip with an explanation when the CSV files are absent; mon is
generated in-process and always runs. Run with plain ``pytest``; the
status lines bypass output capture so they always appear.
"""

import time

import numpy as np
import pytest

import zok
from zok import (
    GridSpec,
    KernelSpec,
    ProxParams,
    SolverConfig,
    check_pstationary,
    cross_validate,
    decision_values,
    find_dataset,
    grid_search,
    gram_matrix,
    monks3,
    noise_experiment,
    prox_l01_scalar,
    sign_gram,
    stratified_kfold,
)
from zok.model import build_model
from zok.oracle import degeneracy_check, global_bruteforce, objective_with_u, prox_grid_argmin

from conftest import random_tiny

GAUSS_HALF = KernelSpec("gaussian", sigma_k=0.5)
MON_SPEC = KernelSpec("gaussian", sigma_k=1.0)
MON_CFG = SolverConfig(C=16.0, sigma_admm=16.0)

# Table targets: name -> (mean accuracy, mean SV count or None)
TABLE_TARGETS = {
    "bre": (0.9677, 9.82),
    "ech": (0.9186, 7.76),
    "hea": (0.8374, None),
    "mon": (0.9723, 78.73),
    "wdb": (0.9744, 11.73),
}
# Tuned hyperparameters (C, sigma_k, sigma_admm) frozen for the generated set;
# fetched sets are tuned by grid search at test time.
TUNED = {"mon": (16.0, 1.0, 16.0)}

FETCH_HINT = "fetch it with scripts/fetch_uci.py on a networked machine"


def announce(capsys, ok: bool, line: str):
    with capsys.disabled():
        print(("[PASS] " if ok else "[FAIL] ") + line, flush=True)
    assert ok, line


def skip(capsys, line: str):
    with capsys.disabled():
        print("[SKIP] " + line, flush=True)
    pytest.skip(line)


@pytest.fixture(scope="module")
def tiny_corpus():
    """25 random tiny instances trained at fixed settings.

    Returns tuples (dataset, spec, C, cfg, state, cert, signed_gram).
    """
    rng = np.random.default_rng(42)
    runs = []
    for _ in range(25):
        d = random_tiny(rng)
        C = float(rng.choice([0.5, 1.0, 4.0]))
        cfg = SolverConfig(C=C, sigma_admm=1.0)
        state, cert = zok.solve(d, GAUSS_HALF, cfg)
        sg = sign_gram(gram_matrix(d, GAUSS_HALF), d.labels)
        runs.append((d, GAUSS_HALF, C, cfg, state, cert, sg))
    return runs


@pytest.fixture(scope="module")
def mon_fold_run():
    """One converged fold-train model on the generated set at tight tol."""
    mon = monks3()
    plan = stratified_kfold(mon, 10, seed=0)
    train_idx, _ = plan.split(0)
    fold = mon.subset(train_idx)
    cfg = SolverConfig(C=16.0, sigma_admm=16.0, tol=1e-4, max_iter=300)
    state, cert = zok.solve(fold, MON_SPEC, cfg)
    sg = sign_gram(gram_matrix(fold, MON_SPEC), fold.labels)
    return fold, MON_SPEC, 16.0, cfg, state, cert, sg


def test_criterion_1_prox_oracle_equivalence(capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    n = 10_000
    z = rng.uniform(-3.0, 3.0, n)
    gc = rng.uniform(0.01, 4.0, n)
    gamma = rng.uniform(0.1, 2.0, n)
    C = gc / gamma
    got = np.array([prox_l01_scalar(float(zi), ProxParams(float(g), float(c)))
                    for zi, g, c in zip(z, gamma, C)])
    want = prox_grid_argmin(z, gamma, C, step=1e-4)
    elapsed = time.perf_counter() - t0

    outside_tie_band = np.abs(z - np.sqrt(2.0 * gc)) > 1e-4
    checked = int(outside_tie_band.sum())
    agree = int((np.abs(got - want)[outside_tie_band] <= 1e-4).sum())
    ok = agree == checked and elapsed < 1.0
    announce(capsys, ok,
             f"criterion 1: prox vs grid-argmin oracle (step 1e-4) agrees on "
             f"{agree}/{checked} cases outside the +/-1e-4 tie band; "
             f"{elapsed:.2f}s < 1s")


def test_criterion_2_global_oracle_gap(capsys, tiny_corpus):
    t0 = time.perf_counter()
    within, converged, stationary = 0, 0, 0
    for d, spec, C, cfg, state, cert, sg in tiny_corpus:
        _, best = global_bruteforce(sg, C)
        val = objective_with_u(state.alpha, state.u, sg, C)
        rel = (val.total - best.total) / max(abs(best.total), 1e-12)
        if rel <= 0.10:
            within += 1
        if cert.converged:
            converged += 1
            if check_pstationary(state.alpha, state.u, sg, cfg.gamma, C, tol=1e-3):
                stationary += 1
    elapsed = time.perf_counter() - t0
    ok = within >= 20 and stationary == converged and elapsed < 60.0
    announce(capsys, ok,
             f"criterion 2: objective within 10% of exact global oracle on "
             f"{within}/25 tiny instances (need >= 20); {stationary}/{converged} "
             f"converged runs P-stationary at tol 1e-3; {elapsed:.1f}s < 60s")


def test_criterion_3_sign_pattern(capsys, tiny_corpus, mon_fold_run):
    tol = 1e-3
    models_checked, sv_checked = 0, 0
    worst = 0.0
    for d, spec, C, cfg, state, cert, sg in list(tiny_corpus) + [mon_fold_run]:
        if not cert.converged:
            continue
        assert check_pstationary(state.alpha, state.u, sg, cfg.gamma, C, tol=1e-3)
        T = state.working_set_idx
        off = np.setdiff1d(np.arange(d.m), T)
        bound = np.sqrt(2.0 * C / cfg.gamma)
        if T.size:
            assert np.all(state.alpha[T] < tol)
            assert np.all(state.alpha[T] >= -bound - tol)
            sv_checked += T.size
        if off.size:
            worst = max(worst, float(np.abs(state.alpha[off]).max()))
            assert np.all(np.abs(state.alpha[off]) <= tol)
        models_checked += 1
    ok = models_checked > 0
    announce(capsys, ok,
             f"criterion 3: {models_checked} converged runs P-stationary with "
             f"alpha in [-sqrt(2C/gamma), 0) on the working set and 0 off it "
             f"within 1e-3 ({sv_checked} SVs; max off-set |alpha| {worst:.1e})")


def test_criterion_4_sv_margin_geometry(capsys, tiny_corpus, mon_fold_run):
    models_checked, sv_checked = 0, 0
    worst = 0.0
    for d, spec, C, cfg, state, cert, sg in list(tiny_corpus) + [mon_fold_run]:
        if not cert.converged:
            continue
        model = build_model(state.alpha, state.u, d, spec, cfg)
        if model.nsv == 0:
            continue
        f = decision_values(model, d.features)
        err = np.abs(d.labels[model.sv_indices] * f[model.sv_indices] - 1.0)
        worst = max(worst, float(err.max()))
        assert np.all(err <= 1e-2)
        models_checked += 1
        sv_checked += model.nsv
    ok = models_checked > 0 and worst <= 1e-2
    announce(capsys, ok,
             f"criterion 4: |y_i f(x_i) - 1| <= 1e-2 for all {sv_checked} SVs "
             f"across {models_checked} converged models (worst {worst:.1e})")


def test_criterion_5_degeneracy_identity(capsys):
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(100):
        m = int(rng.integers(2, 30))
        n = int(rng.integers(1, 6))
        X = rng.normal(size=(m, n))
        y = np.where(rng.random(m) < 0.5, 1.0, -1.0)
        d = zok.Dataset(X, y, "deg")
        alpha = rng.normal(size=m)
        lhs, rhs = degeneracy_check(d, alpha)
        gap = abs(lhs - rhs)
        bound = 1e-10 * (1.0 + abs(lhs))
        worst = max(worst, gap / bound)
        assert gap <= bound
    announce(capsys, True,
             f"criterion 5: quadratic-form vs (|w|^2 + b^2)/2 identity within "
             f"1e-10*(1+|lhs|) on 100 linear-kernel instances "
             f"(worst ratio {worst:.2e})")


@pytest.mark.parametrize("name", ["bre", "ech", "hea", "mon", "wdb"])
def test_criterion_6_benchmark_tables(capsys, name):
    target_acc, target_nsv = TABLE_TARGETS[name]
    d = find_dataset(name)
    if d is None:
        skip(capsys, f"criterion 6 ({name}): dataset file not found; {FETCH_HINT}")
    if name in TUNED:
        C, sigma_k, sigma_admm = TUNED[name]
    else:
        grid = GridSpec(c_values=tuple(2.0**k for k in range(0, 9)),
                        kernel_param_values=tuple(2.0**k for k in range(-2, 3)),
                        sigma_admm_values=(1.0, 16.0))
        plan = stratified_kfold(d, 10, seed=0)
        best, _ = grid_search(d, grid, SolverConfig(C=1.0), plan)
        C, sigma_k, sigma_admm = best.best_params
    plan = stratified_kfold(d, 10, seed=0)
    t0 = time.perf_counter()
    rep = cross_validate(d, KernelSpec("gaussian", sigma_k=sigma_k),
                         SolverConfig(C=C, sigma_admm=sigma_admm), plan)
    elapsed = time.perf_counter() - t0
    acc_ok = abs(rep.mean_acc - target_acc) <= 0.02
    nsv_ok = (target_nsv is None or
              target_nsv / 2.0 <= rep.mean_nsv <= target_nsv * 2.0)
    ok = acc_ok and nsv_ok and elapsed < 60.0
    nsv_text = ("" if target_nsv is None else
                f", mNSV {rep.mean_nsv:.2f} within 2x of {target_nsv}")
    announce(capsys, ok,
             f"criterion 6 ({name}): mACC {rep.mean_acc:.4f} within +/-0.02 of "
             f"{target_acc}{nsv_text}; 10-fold CV {elapsed:.1f}s < 60s")


def test_criterion_7_nonlinear_gap_on_mon(capsys):
    mon = monks3()
    plan = stratified_kfold(mon, 10, seed=0)
    gauss = cross_validate(mon, MON_SPEC, MON_CFG, plan)
    grid = GridSpec(c_values=tuple(2.0**k for k in range(-8, 9)),
                    kernel_param_values=(1.0,), sigma_admm_values=(16.0,))
    linear, _ = grid_search(mon, grid, SolverConfig(C=1.0), plan,
                            base_spec=KernelSpec("linear"))
    ok = gauss.mean_acc >= 0.95 and linear.mean_acc <= 0.80
    announce(capsys, ok,
             f"criterion 7 (mon): gaussian mACC {gauss.mean_acc:.4f} >= 0.95, "
             f"best linear mACC {linear.mean_acc:.4f} <= 0.80 over the full C grid")


def test_criterion_8_noise_robustness_on_bre(capsys):
    d = find_dataset("bre")
    if d is None:
        skip(capsys, f"criterion 8 (bre): dataset file not found; {FETCH_HINT}")
    grid = GridSpec(c_values=tuple(2.0**k for k in range(0, 9)),
                    kernel_param_values=tuple(2.0**k for k in range(-2, 3)),
                    sigma_admm_values=(1.0, 16.0))
    r5, r10 = noise_experiment(d, (0.05, 0.10), grid, SolverConfig(C=1.0), seed=0)
    acc_ok = abs(r10.mean_acc - 0.8952) <= 0.02
    growth = r10.mean_nsv / max(r5.mean_nsv, 1e-12)
    ok = acc_ok and growth < 2.0
    announce(capsys, ok,
             f"criterion 8 (bre): mACC at r=10 {r10.mean_acc:.4f} within "
             f"+/-0.02 of 0.8952; mNSV growth r=5 -> r=10 is {growth:.2f}x < 2x")
