#!/usr/bin/env python3
"""Fetch the UCI benchmark sets and normalize them for the harness.

Each dataset is written to <out-dir>/<name>.csv as plain numeric rows
with the class label (+1/-1) in the last column, the format find_dataset
and the CLI expect. Missing values ('?') are imputed with the column
mean computed over the observed entries. Run this on a networked
machine; the package itself never touches the network.

  bre  Breast Cancer Wisconsin (original), 699 x 9, labels 2/4.
       The ID column is dropped; 16 rows have '?' in the bare-nuclei
       column and are mean-imputed rather than dropped.
  ech  Echocardiogram, 131 x 10, label = still-alive.
       The name and group columns are dropped; heavy '?' imputation.
  hea  Statlog Heart, 270 x 13, labels 1/2, space-separated.
  wdb  Breast Cancer Wisconsin (diagnostic), 569 x 30, labels M/B.
"""

from __future__ import annotations

import argparse
import os
import sys
import urllib.request

UCI = "https://archive.ics.uci.edu/ml/machine-learning-databases"

SOURCES = {
    "bre": f"{UCI}/breast-cancer-wisconsin/breast-cancer-wisconsin.data",
    "ech": f"{UCI}/echocardiogram/echocardiogram.data",
    "hea": f"{UCI}/statlog/heart/heart.dat",
    "wdb": f"{UCI}/breast-cancer-wisconsin/wdbc.data",
}


def fetch(url: str) -> str:
    with urllib.request.urlopen(url, timeout=60) as resp:
        return resp.read().decode("utf-8", errors="replace")


def impute_column_means(rows: list[list[float | None]]) -> list[list[float]]:
    """Replace None cells with the mean of the observed cells in the column."""
    n = len(rows[0])
    means = []
    for j in range(n):
        seen = [r[j] for r in rows if r[j] is not None]
        if not seen:
            raise ValueError(f"column {j} has no observed values")
        means.append(sum(seen) / len(seen))
    return [[means[j] if r[j] is None else r[j] for j in range(n)] for r in rows]


def _cell(token: str) -> float | None:
    token = token.strip()
    return None if token in ("?", "") else float(token)


def normalize_bre(text: str):
    """ID, 9 integer features, class 2 (benign) / 4 (malignant)."""
    feats, labels = [], []
    for line in text.splitlines():
        parts = line.strip().split(",")
        if len(parts) != 11:
            continue
        feats.append([_cell(t) for t in parts[1:10]])
        labels.append(1.0 if float(parts[10]) == 4.0 else -1.0)
    return impute_column_means(feats), labels


def normalize_ech(text: str):
    """13 comma-separated fields; name and group dropped, still-alive is
    the label, the other 10 numeric fields are the features."""
    feats, labels = [], []
    for line in text.splitlines():
        parts = [t.strip() for t in line.strip().rstrip(",").split(",")]
        if len(parts) != 13:
            continue
        label_cell = _cell(parts[1])
        if label_cell is None:
            continue
        keep = parts[0:1] + parts[2:10] + parts[12:13]  # drop name, group
        feats.append([_cell(t) for t in keep])
        labels.append(1.0 if label_cell == 1.0 else -1.0)
    return impute_column_means(feats), labels


def normalize_hea(text: str):
    """13 space-separated features then label 1 (absence) / 2 (presence)."""
    feats, labels = [], []
    for line in text.splitlines():
        parts = line.split()
        if len(parts) != 14:
            continue
        feats.append([float(t) for t in parts[:13]])
        labels.append(1.0 if float(parts[13]) == 2.0 else -1.0)
    return feats, labels


def normalize_wdb(text: str):
    """ID, diagnosis M/B, 30 real features."""
    feats, labels = [], []
    for line in text.splitlines():
        parts = line.strip().split(",")
        if len(parts) != 32:
            continue
        labels.append(1.0 if parts[1] == "M" else -1.0)
        feats.append([float(t) for t in parts[2:]])
    return feats, labels


NORMALIZERS = {
    "bre": normalize_bre,
    "ech": normalize_ech,
    "hea": normalize_hea,
    "wdb": normalize_wdb,
}


def write_csv(path: str, feats, labels):
    with open(path, "w", encoding="utf-8") as fh:
        for row, label in zip(feats, labels):
            cells = [f"{v:.10g}" for v in row] + [f"{int(label)}"]
            fh.write(",".join(cells) + "\n")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out-dir", default="data",
                        help="directory for the normalized CSVs (default ./data)")
    parser.add_argument("--only", choices=sorted(SOURCES),
                        help="fetch a single dataset")
    args = parser.parse_args(argv)

    names = [args.only] if args.only else sorted(SOURCES)
    os.makedirs(args.out_dir, exist_ok=True)
    failed = 0
    for name in names:
        try:
            text = fetch(SOURCES[name])
            feats, labels = NORMALIZERS[name](text)
        except Exception as exc:
            print(f"{name}: FAILED ({exc})", file=sys.stderr)
            failed += 1
            continue
        path = os.path.join(args.out_dir, f"{name}.csv")
        write_csv(path, feats, labels)
        pos = sum(1 for y in labels if y > 0)
        print(f"{name}: {len(labels)} rows x {len(feats[0])} features "
              f"({pos} positive / {len(labels) - pos} negative) -> {path}")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
