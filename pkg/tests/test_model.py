import numpy as np
import pytest

import zok
from zok.model import build_model

from conftest import make_blobs

GAUSS = zok.KernelSpec("gaussian", sigma_k=1.0)
GAUSS_HALF = zok.KernelSpec("gaussian", sigma_k=0.5)


def _hand_model(sv_inputs, sv_alpha, sv_labels, spec=GAUSS, m=None):
    """Model with chosen SV coefficients, bypassing training."""
    sv_inputs = np.asarray(sv_inputs, dtype=float)
    sv_alpha = np.asarray(sv_alpha, dtype=float)
    sv_labels = np.asarray(sv_labels, dtype=float)
    k = sv_alpha.size
    m = k if m is None else m
    alpha = np.zeros(m)
    alpha[:k] = sv_alpha
    return zok.TrainedModel(
        alpha=alpha,
        sv_indices=np.arange(k),
        sv_inputs=sv_inputs,
        sv_labels=sv_labels,
        spec=spec,
        config_snapshot=zok.SolverConfig(),
    )


# ---------------------------------------------------------------- extract_svs


def test_extract_empty_at_origin():
    assert zok.extract_svs(np.zeros(3), np.zeros(3), gamma=1.0, C=1.0).size == 0


def test_extract_unit_margin_point():
    alpha = np.array([-1.0, 0.0])
    u = np.zeros(2)
    T = zok.extract_svs(alpha, u, gamma=1.0, C=1.0)   # u - g*a = (1, 0)
    assert np.array_equal(T, [0])


def test_extract_threshold_boundary():
    gamma, C = 1.0, 1.0
    thr = np.sqrt(2.0 * gamma * C)
    alpha = np.array([-thr, -np.nextafter(thr, 2.0)])
    u = np.zeros(2)
    T = zok.extract_svs(alpha, u, gamma, C)
    assert np.array_equal(T, [0])                      # interval closed on the right


def test_extract_matches_zero_set():
    rng = np.random.default_rng(3)
    alpha = rng.standard_normal(20)
    u = rng.standard_normal(20)
    gamma, C = 0.5, 2.0
    want = zok.zero_set(u - gamma * alpha, zok.ProxParams(gamma, C))
    assert np.array_equal(zok.extract_svs(alpha, u, gamma, C), want)


# ---------------------------------------------------------------- build_model


def test_build_model_zeroes_non_sv_alpha():
    d = make_blobs(m_per_class=8, seed=20)
    cfg = zok.SolverConfig(C=1.0)
    state, _ = zok.solve(d, GAUSS_HALF, cfg)
    model = build_model(state.alpha, state.u, d, GAUSS_HALF, cfg)
    T = zok.extract_svs(state.alpha, state.u, cfg.gamma, cfg.C)
    assert np.array_equal(model.sv_indices, T)
    off = np.setdiff1d(np.arange(d.m), T)
    assert np.all(model.alpha[off] == 0.0)
    assert np.array_equal(model.alpha[T], state.alpha[T])
    assert np.array_equal(model.sv_inputs, d.features[T])
    assert np.array_equal(model.sv_labels, d.labels[T])
    assert model.nsv == T.size


# ---------------------------------------------------------------- decision values


def test_decision_empty_sv_set_is_zero():
    model = _hand_model(np.zeros((0, 2)), [], [], m=4)
    X = np.random.default_rng(0).standard_normal((5, 2))
    assert np.array_equal(zok.decision_values(model, X), np.zeros(5))
    assert zok.decision_value(model, X[0]) == 0.0


def test_decision_single_sv_at_itself():
    sv = np.array([[0.4, -0.2]])
    model = _hand_model(sv, [-1.0], [1.0])
    assert zok.decision_value(model, sv[0]) == pytest.approx(1.0, abs=1e-14)


def test_decision_matches_naive_sum():
    d = make_blobs(m_per_class=6, seed=21)
    model, _ = zok.train(d, GAUSS_HALF, zok.SolverConfig(C=1.0))
    X = np.random.default_rng(1).standard_normal((7, 2))
    got = zok.decision_values(model, X)
    for j in range(7):
        f = 0.0
        for i, idx in enumerate(model.sv_indices):
            k = zok.eval_kernel(model.sv_inputs[i], X[j], model.spec)
            f -= model.alpha[idx] * model.sv_labels[i] * k
        assert got[j] == pytest.approx(f, abs=1e-12)
        assert zok.decision_value(model, X[j]) == pytest.approx(f, abs=1e-12)


def test_decision_dimension_mismatch():
    model = _hand_model(np.array([[0.0, 0.0]]), [-1.0], [1.0])
    with pytest.raises(ValueError):
        zok.decision_values(model, np.zeros((2, 3)))


def test_sv_margin_geometry():
    d = make_blobs(m_per_class=10, seed=18)
    model, cert = zok.train(d, GAUSS_HALF, zok.SolverConfig(C=1.0))
    assert cert.converged
    assert model.nsv > 0
    f = zok.decision_values(model, model.sv_inputs)
    assert np.max(np.abs(model.sv_labels * f - 1.0)) <= 1e-2


# ---------------------------------------------------------------- predict


def test_predict_signs():
    sv = np.array([[1.0, 0.0]])
    plus = _hand_model(sv, [-0.3], [1.0])              # f(sv) = +0.3
    minus = _hand_model(sv, [0.3], [1.0])              # f(sv) = -0.3
    assert zok.predict(plus, sv)[0] == 1.0
    assert zok.predict(minus, sv)[0] == -1.0


def test_predict_zero_ties_to_plus_one():
    model = _hand_model(np.zeros((0, 2)), [], [], m=2)
    X = np.zeros((3, 2))
    assert np.array_equal(zok.predict(model, X), np.ones(3))


# ---------------------------------------------------------------- accuracy


def test_accuracy_all_correct_and_all_wrong():
    d = make_blobs(m_per_class=6, seed=22)
    model, cert = zok.train(d, GAUSS, zok.SolverConfig(C=1.0))
    assert zok.accuracy(model, d) == 1.0
    flipped = zok.Dataset(d.features, -d.labels)
    assert zok.accuracy(model, flipped) == 0.0


def test_accuracy_matches_sign_disagreement_formula():
    d = make_blobs(m_per_class=9, seed=23, sep=1.0, spread=1.0)
    model, _ = zok.train(d, GAUSS, zok.SolverConfig(C=1.0))
    f = zok.decision_values(model, d.features)
    signs = np.where(f >= 0.0, 1.0, -1.0)
    expected = 1.0 - np.sum(np.abs(signs - d.labels)) / (2.0 * d.m)
    assert zok.accuracy(model, d) == expected


def test_accuracy_rejects_empty_test():
    d = make_blobs(m_per_class=3, seed=0)
    model, _ = zok.train(d, GAUSS, zok.SolverConfig(C=1.0))
    empty = zok.Dataset(np.zeros((0, 2)), np.zeros(0))
    with pytest.raises(ValueError):
        zok.accuracy(model, empty)


def test_label_symmetry():
    d = make_blobs(m_per_class=7, seed=24)
    cfg = zok.SolverConfig(C=2.0)
    m_pos, _ = zok.train(d, GAUSS_HALF, cfg)
    m_neg, _ = zok.train(zok.Dataset(d.features, -d.labels), GAUSS_HALF, cfg)
    X = np.random.default_rng(5).standard_normal((11, 2))
    f_pos = zok.decision_values(m_pos, X)
    f_neg = zok.decision_values(m_neg, X)
    assert np.array_equal(f_pos, -f_neg)
    nonzero = f_pos != 0.0
    assert np.array_equal(zok.predict(m_pos, X)[nonzero], -zok.predict(m_neg, X)[nonzero])


# ---------------------------------------------------------------- serialization


def test_save_load_roundtrip(tmp_path):
    d = make_blobs(m_per_class=8, seed=25)
    model, _ = zok.train(d, GAUSS_HALF, zok.SolverConfig(C=4.0, sigma_admm=2.0))
    path = tmp_path / "model.bin"
    zok.save_model(model, path)
    loaded = zok.load_model(path)
    assert np.array_equal(loaded.alpha, model.alpha)
    assert np.array_equal(loaded.sv_indices, model.sv_indices)
    assert np.array_equal(loaded.sv_inputs, model.sv_inputs)
    assert np.array_equal(loaded.sv_labels, model.sv_labels)
    assert loaded.spec == model.spec
    assert loaded.config_snapshot == model.config_snapshot
    X = np.random.default_rng(6).standard_normal((9, 2))
    assert np.array_equal(zok.decision_values(loaded, X), zok.decision_values(model, X))


def test_save_load_empty_sv_model(tmp_path):
    model = _hand_model(np.zeros((0, 2)), [], [], m=3)
    path = tmp_path / "empty.bin"
    zok.save_model(model, path)
    loaded = zok.load_model(path)
    assert loaded.nsv == 0
    assert loaded.alpha.size == 3


def test_load_rejects_garbage(tmp_path):
    path = tmp_path / "junk.bin"
    path.write_bytes(b"not a model file at all")
    with pytest.raises(ValueError):
        zok.load_model(path)


def test_metrics_fields():
    m = zok.Metrics(acc=0.9, nsv=12, cpu_seconds=0.05)
    assert m.acc == 0.9 and m.nsv == 12 and m.cpu_seconds == 0.05
