"""Benchmark dataset access.

The MONK's third problem is a deterministic function of six categorical
attributes, so the full 432-row set is generated here rather than read
from disk. The UCI sets used in the experiment harness (breast cancer
original and diagnostic, echocardiogram, heart) must be fetched on a
networked machine with scripts/fetch_uci.py, which normalizes each to a
CSV with the label in the last column; ``find_dataset`` locates those
files.
"""

from __future__ import annotations

import os
from itertools import product

import numpy as np

from .data import Dataset, load_csv

MONKS3_RANGES = (3, 3, 2, 3, 4, 2)


def monks3() -> Dataset:
    """Full MONK-3 instance space: 432 rows, 6 integer attributes.

    The target concept is (a5 = 3 and a4 = 1) or (a5 != 4 and a2 != 3),
    giving 228 positive and 204 negative examples. The published train
    split adds 5% label noise; this is the clean exhaustive set.
    """
    rows = np.array(list(product(*(range(1, r + 1) for r in MONKS3_RANGES))),
                    dtype=np.float64)
    a2, a4, a5 = rows[:, 1], rows[:, 3], rows[:, 4]
    positive = ((a5 == 3) & (a4 == 1)) | ((a5 != 4) & (a2 != 3))
    labels = np.where(positive, 1.0, -1.0)
    return Dataset(rows, labels, name="mon")


def xor_dataset() -> Dataset:
    """The 4-point XOR pattern; linearly inseparable by construction."""
    X = np.array([[-1.0, -1.0], [-1.0, 1.0], [1.0, -1.0], [1.0, 1.0]])
    y = np.array([-1.0, 1.0, 1.0, -1.0])
    return Dataset(X, y, name="xor")


def find_dataset(name: str, data_dir=None) -> Dataset | None:
    """Load ``<data_dir>/<name>.csv`` if present; None when the file is absent.

    ``data_dir`` defaults to the ZOK_DATA_DIR environment variable, then
    ./data. The name "mon" is always available (generated in-process).
    """
    if name == "mon":
        return monks3()
    data_dir = data_dir or os.environ.get("ZOK_DATA_DIR", "data")
    path = os.path.join(data_dir, f"{name}.csv")
    if not os.path.exists(path):
        return None
    return load_csv(path, name=name)
