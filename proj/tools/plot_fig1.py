#!/usr/bin/env python3
"""Plot RMS tracking error curves from dgdtrack cell CSVs."""

import argparse
import csv
import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def load(path):
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    t = [int(r["t"]) for r in rows]
    te = [float(r["rms_te"]) for r in rows]
    return t, te


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("csv", nargs="+", type=pathlib.Path, help="cell CSV files")
    ap.add_argument("-o", "--output", type=pathlib.Path, default=pathlib.Path("tracking.png"))
    ap.add_argument("--logy", action="store_true")
    args = ap.parse_args()

    fig, ax = plt.subplots(figsize=(6, 4))
    for path in args.csv:
        t, te = load(path)
        ax.plot(t, te, label=path.stem)
    ax.set_xlabel("t")
    ax.set_ylabel("RMS tracking error")
    if args.logy:
        ax.set_yscale("log")
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.output, dpi=150)


if __name__ == "__main__":
    main()
