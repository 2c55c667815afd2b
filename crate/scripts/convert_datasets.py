#!/usr/bin/env python3
"""Convert public anomaly-detection benchmark sources into the CSV layout
this project ingests (feature columns followed by a normal/anomaly label).

The four benchmarks follow the constructions of Goldstein & Uchida's
unsupervised anomaly-detection benchmark (PLoS ONE 2016):

  breast_cancer.csv  WDBC, 367 x 30, 10 anomalies. Taken verbatim from the
                     DAMI/ADBench "WDBC" variant: all 357 benign records are
                     normal, 10 malignant records are anomalies.
  letter.csv         Letter, 1600 x 32, 100 anomalies. Taken verbatim from
                     the DAMI/ADBench "letter" variant.
  pen_global.csv     Pen-global, 809 x 16, 90 anomalies. Rebuilt from the UCI
                     pendigits training split: every digit-8 record (719) is
                     normal; 10 records are sampled (seed 7) from each other
                     digit class as anomalies. The published benchmark used
                     the same recipe with an unspecified sample.
  satellite.csv      Satellite, 5100 x 36, 75 anomalies. Rebuilt from UCI
                     Statlog (Landsat Satellite), train+test combined: the
                     four soil classes {1,3,4,7} (5025 records) are normal;
                     75 anomalies are sampled (seed 7) from classes {2,5}.
                     Same recipe as the published benchmark, unspecified
                     sample.

Raw inputs (place them in --raw-dir):
  43_WDBC.npz, 20_letter.npz   from github.com/Minqi824/ADBench
                               (adbench/datasets/Classical/)
  pendigits.arff               from github.com/renatopp/arff-datasets
                               (classification/pendigits.arff; rows keep the
                               original UCI order, training split first)
  satimage.tsv.gz              from github.com/EpistasisLab/pmlb
                               (datasets/satimage/satimage.tsv.gz)

Usage: python3 scripts/convert_datasets.py --raw-dir /path/to/raw --out-dir data
"""

import argparse
import gzip
import os

import numpy as np

PENDIGITS_TRAIN_ROWS = 7494  # size of the original UCI training split
SAMPLE_SEED = 7


def write_csv(path, X, y):
    with open(path, "w") as f:
        for row, lab in zip(X, y):
            cells = [repr(float(v)) for v in row]
            cells.append("anomaly" if lab else "normal")
            f.write(",".join(cells) + "\n")
    print(f"wrote {path}: {X.shape[0]} rows, {X.shape[1]} features, {int(np.sum(y))} anomalies")


def from_npz(raw_dir, name):
    d = np.load(os.path.join(raw_dir, name), allow_pickle=True)
    return d["X"].astype(float), d["y"].astype(int)


def build_pen_global(raw_dir):
    rows = []
    with open(os.path.join(raw_dir, "pendigits.arff")) as f:
        in_data = False
        for line in f:
            line = line.strip()
            if not in_data:
                if line.lower() == "@data":
                    in_data = True
                continue
            if line and not line.startswith("%"):
                rows.append([v.strip() for v in line.split(",")])
    train = rows[:PENDIGITS_TRAIN_ROWS]
    X = np.array([[float(v) for v in r[:-1]] for r in train])
    digit = np.array([int(r[-1]) for r in train])
    rng = np.random.default_rng(SAMPLE_SEED)
    normal = X[digit == 8]
    anomalies = []
    for d in range(10):
        if d == 8:
            continue
        idx = np.where(digit == d)[0]
        anomalies.append(X[rng.choice(idx, 10, replace=False)])
    anomalies = np.vstack(anomalies)
    Xout = np.vstack([normal, anomalies])
    yout = np.concatenate([np.zeros(len(normal), int), np.ones(len(anomalies), int)])
    return Xout, yout


def build_satellite(raw_dir):
    with gzip.open(os.path.join(raw_dir, "satimage.tsv.gz"), "rt") as f:
        lines = [l.rstrip("\n").split("\t") for l in f]
    header, body = lines[0], lines[1:]
    X = np.array([[float(v) for v in r[:-1]] for r in body])
    cls = np.array([int(r[-1]) for r in body])
    normal_mask = np.isin(cls, [1, 3, 4, 7])
    rng = np.random.default_rng(SAMPLE_SEED)
    anomaly_pool = np.where(np.isin(cls, [2, 5]))[0]
    anomaly_idx = rng.choice(anomaly_pool, 75, replace=False)
    Xout = np.vstack([X[normal_mask], X[anomaly_idx]])
    yout = np.concatenate([np.zeros(int(normal_mask.sum()), int), np.ones(75, int)])
    return Xout, yout


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--raw-dir", required=True)
    ap.add_argument("--out-dir", default="data")
    args = ap.parse_args()
    os.makedirs(args.out_dir, exist_ok=True)

    X, y = from_npz(args.raw_dir, "43_WDBC.npz")
    write_csv(os.path.join(args.out_dir, "breast_cancer.csv"), X, y)

    X, y = from_npz(args.raw_dir, "20_letter.npz")
    write_csv(os.path.join(args.out_dir, "letter.csv"), X, y)

    X, y = build_pen_global(args.raw_dir)
    write_csv(os.path.join(args.out_dir, "pen_global.csv"), X, y)

    X, y = build_satellite(args.raw_dir)
    write_csv(os.path.join(args.out_dir, "satellite.csv"), X, y)


if __name__ == "__main__":
    main()
