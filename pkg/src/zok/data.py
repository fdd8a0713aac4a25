"""Dataset loading, validation, scaling, fold planning, and label noise.

Binary classification data lives in a :class:`Dataset`: a dense float matrix of
features plus labels in {+1, -1}. All operations here are pure functions of
their inputs and a seed, so they are safe to call from concurrent workers.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ParseError, ValidationError

_ACCEPTED_LABELS = {1.0: 1.0, -1.0: -1.0, 0.0: -1.0}


@dataclass(frozen=True)
class Dataset:
    """Feature matrix (m x n) with labels in {+1, -1}.

    Labels 0/1 found in input files are mapped to -1/+1 by the loaders;
    any other label value is rejected.
    """

    features: np.ndarray
    labels: np.ndarray
    name: str = "dataset"

    @property
    def m(self):
        return self.features.shape[0]

    @property
    def n(self):
        return self.features.shape[1]

    def subset(self, idx, name=None):
        idx = np.asarray(idx)
        return Dataset(self.features[idx], self.labels[idx],
                       name if name is not None else self.name)


def validate(d: Dataset, for_training: bool = True) -> Dataset:
    """Check dataset invariants; returns ``d`` unchanged on success.

    Training use additionally requires m >= 2 and both classes present.
    """
    if d.features.ndim != 2:
        raise ValidationError(f"features must be 2-D, got ndim={d.features.ndim}")
    if d.labels.shape != (d.features.shape[0],):
        raise ValidationError("labels length does not match feature rows")
    if not np.all(np.isfinite(d.features)):
        raise ValidationError("non-finite feature values")
    if not np.all(np.isin(d.labels, (-1.0, 1.0))):
        raise ValidationError("labels must be exactly +1 or -1")
    if for_training:
        if d.m < 2:
            raise ValidationError(f"need at least 2 samples for training, got {d.m}")
        if len(np.unique(d.labels)) < 2:
            raise ValidationError("both classes must be present for training")
    return d


def _map_label(raw: float) -> float:
    if raw in _ACCEPTED_LABELS:
        return _ACCEPTED_LABELS[raw]
    raise ValueError(f"label must be one of -1, 0, +1, got {raw!r}")


def _looks_numeric(token: str) -> bool:
    try:
        float(token)
        return True
    except ValueError:
        return False


def load_csv(path, label_column="last", name=None, require_both_classes=True) -> Dataset:
    """Load a comma-separated file with one label column.

    An optional single header row is auto-detected (first line with a
    non-numeric field). ``label_column`` is ``"last"`` or a 0-based column
    index. Labels may be -1/+1 or 0/1 (0 maps to -1).
    """
    rows = []
    labels = []
    arity = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            fields = [f.strip() for f in line.split(",")]
            if arity is None and not all(_looks_numeric(f) for f in fields):
                continue  # header row
            if arity is None:
                arity = len(fields)
            elif len(fields) != arity:
                raise ParseError(f"expected {arity} fields, got {len(fields)}", line=lineno)
            col = len(fields) - 1 if label_column == "last" else int(label_column)
            if not 0 <= col < len(fields):
                raise ParseError(f"label column {col} out of range", line=lineno)
            try:
                raw = [float(f) for f in fields]
            except ValueError as exc:
                raise ParseError(str(exc), line=lineno) from None
            try:
                labels.append(_map_label(raw[col]))
            except ValueError as exc:
                raise ParseError(str(exc), line=lineno) from None
            del raw[col]
            rows.append(raw)
    if not rows:
        raise ParseError("no data rows found", line=None)
    d = Dataset(np.asarray(rows, dtype=np.float64),
                np.asarray(labels, dtype=np.float64),
                name or str(path))
    return validate(d, for_training=require_both_classes)


def load_features_csv(path) -> np.ndarray:
    """Load an unlabeled CSV (all columns numeric features)."""
    rows = []
    arity = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            fields = [f.strip() for f in line.split(",")]
            if arity is None and not all(_looks_numeric(f) for f in fields):
                continue
            if arity is None:
                arity = len(fields)
            elif len(fields) != arity:
                raise ParseError(f"expected {arity} fields, got {len(fields)}", line=lineno)
            try:
                rows.append([float(f) for f in fields])
            except ValueError as exc:
                raise ParseError(str(exc), line=lineno) from None
    if not rows:
        raise ParseError("no data rows found", line=None)
    return np.asarray(rows, dtype=np.float64)


def load_libsvm(path, name=None, require_both_classes=True) -> Dataset:
    """Load a sparse "label idx:val ..." file into a dense Dataset.

    Indices are 1-based and must be strictly increasing within a line;
    absent indices are zero-filled and n is the largest index seen.
    """
    parsed = []
    labels = []
    n = 0
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            tokens = line.split()
            try:
                labels.append(_map_label(float(tokens[0])))
            except ValueError as exc:
                raise ParseError(str(exc), line=lineno) from None
            entries = []
            prev = 0
            for tok in tokens[1:]:
                try:
                    idx_s, val_s = tok.split(":", 1)
                    idx, val = int(idx_s), float(val_s)
                except ValueError:
                    raise ParseError(f"malformed feature token {tok!r}", line=lineno) from None
                if idx <= prev:
                    raise ParseError(f"feature index {idx} not strictly increasing", line=lineno)
                prev = idx
                entries.append((idx, val))
            n = max(n, prev)
            parsed.append(entries)
    if not parsed:
        raise ParseError("no data rows found", line=None)
    X = np.zeros((len(parsed), n), dtype=np.float64)
    for i, entries in enumerate(parsed):
        for idx, val in entries:
            X[i, idx - 1] = val
    d = Dataset(X, np.asarray(labels, dtype=np.float64), name or str(path))
    return validate(d, for_training=require_both_classes)


@dataclass(frozen=True)
class ScalingMap:
    """Per-column min/max fitted on training data; maps columns to [-1, 1].

    Columns with max == min map to the constant 0. Out-of-sample values may
    land outside [-1, 1]; no clamping is applied.
    """

    col_min: np.ndarray
    col_max: np.ndarray


def fit_scaling(train: Dataset) -> ScalingMap:
    X = train.features
    return ScalingMap(X.min(axis=0), X.max(axis=0))


def apply_scaling(d: Dataset, s: ScalingMap) -> Dataset:
    span = s.col_max - s.col_min
    safe = np.where(span > 0, span, 1.0)
    scaled = 2.0 * (d.features - s.col_min) / safe - 1.0
    scaled[:, span == 0] = 0.0
    return replace(d, features=scaled)


@dataclass(frozen=True)
class FoldPlan:
    """Assignment of each sample to one of ``fold_count`` folds."""

    fold_count: int
    assignments: np.ndarray
    seed: int

    def split(self, fold: int):
        """(train_idx, test_idx) for the given held-out fold."""
        test = np.flatnonzero(self.assignments == fold)
        train = np.flatnonzero(self.assignments != fold)
        return train, test


def stratified_kfold(d: Dataset, k: int = 10, seed: int = 0) -> FoldPlan:
    """Seed-deterministic stratified k-fold plan.

    Per-class indices are shuffled and dealt round-robin, continuing the
    fold cursor across classes so overall fold sizes differ by at most 1.
    """
    if k > d.m:
        raise ValueError(f"fold count {k} exceeds sample count {d.m}")
    if k < 2:
        raise ValueError("fold count must be at least 2")
    counts = [int(np.sum(d.labels == c)) for c in (1.0, -1.0)]
    if k > min(c for c in counts if c > 0):
        raise ValueError(f"fold count {k} exceeds smallest class count {min(counts)}")
    rng = np.random.default_rng(seed)
    assignments = np.empty(d.m, dtype=np.int64)
    cursor = 0
    for c in (1.0, -1.0):
        idx = np.flatnonzero(d.labels == c)
        if idx.size == 0:
            continue
        idx = rng.permutation(idx)
        for j, i in enumerate(idx):
            assignments[i] = (cursor + j) % k
        cursor = (cursor + idx.size) % k
    return FoldPlan(k, assignments, seed)


@dataclass(frozen=True)
class NoiseSpec:
    """Label-flipping spec: flip round(r*m) labels, seed-deterministic.

    With ``stratified`` the per-class flip counts are proportional to the
    class rates (largest-remainder rounding); without it, the flipped index
    set depends only on (m, seed), so flipping twice with the same seed
    restores the original labels.
    """

    flip_rate: float
    seed: int = 0
    stratified: bool = True


def flip_labels(d: Dataset, spec: NoiseSpec) -> Dataset:
    if not 0.0 <= spec.flip_rate < 1.0:
        raise ValueError(f"flip rate must be in [0, 1), got {spec.flip_rate}")
    total = int(np.floor(spec.flip_rate * d.m + 0.5))
    if total == 0:
        return d
    rng = np.random.default_rng(spec.seed)
    if spec.stratified:
        chosen = []
        quotas = []
        for c in (1.0, -1.0):
            idx = np.flatnonzero(d.labels == c)
            quotas.append((c, idx, total * idx.size / d.m))
        base = {c: int(np.floor(q)) for c, _, q in quotas}
        remainder = total - sum(base.values())
        # hand leftover flips to the classes with the largest fractional parts
        for c, _, q in sorted(quotas, key=lambda t: t[2] - np.floor(t[2]), reverse=True):
            if remainder <= 0:
                break
            base[c] += 1
            remainder -= 1
        for c, idx, _ in quotas:
            chosen.append(rng.choice(idx, size=base[c], replace=False))
        flip_idx = np.concatenate(chosen)
    else:
        flip_idx = rng.choice(d.m, size=total, replace=False)
    labels = d.labels.copy()
    labels[flip_idx] = -labels[flip_idx]
    return replace(d, labels=labels)
