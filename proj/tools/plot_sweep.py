#!/usr/bin/env python3
"""Plot the period grid written by `enso sweep-period`.

Usage: plot_sweep.py OUTDIR/sweep.csv [--model voc] [--out sweep.png]

Produces one panel per swept axis: dimensional period against theta, A0,
and y_n, holding the other two knobs at the reference values (theta=3,
A0=0.2, y_n=2). Cells that do not oscillate are skipped.
"""

import argparse
import csv
import sys


def close(a, b):
    return abs(a - b) < 1e-9


def load(path, model):
    rows = []
    with open(path, newline="") as f:
        for r in csv.DictReader(f):
            if r["model"] != model or r["classification"] != "oscillating":
                continue
            rows.append(
                (
                    float(r["theta"]),
                    float(r["A0"]),
                    float(r["y_n"]),
                    float(r["period_years"]),
                )
            )
    return rows


def slice_axis(rows, axis):
    ref = {"theta": 3.0, "A0": 0.2, "y_n": 2.0}
    idx = {"theta": 0, "A0": 1, "y_n": 2}
    out = []
    for th, a0, yn, py in rows:
        vals = {"theta": th, "A0": a0, "y_n": yn}
        if all(close(vals[k], ref[k]) for k in ref if k != axis):
            out.append((vals[axis], py))
    return sorted(out)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("csv_path")
    ap.add_argument("--model", default="voc")
    ap.add_argument("--out", default="sweep.png")
    args = ap.parse_args()

    rows = load(args.csv_path, args.model)
    if not rows:
        sys.exit(f"no oscillating '{args.model}' cells in {args.csv_path}")

    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        sys.exit("matplotlib is required for plotting")

    fig, axes = plt.subplots(1, 3, figsize=(12, 3.5))
    for ax, axis in zip(axes, ("theta", "A0", "y_n")):
        pts = slice_axis(rows, axis)
        if pts:
            ax.plot([p[0] for p in pts], [p[1] for p in pts], "o-")
        ax.set_xlabel(axis)
        ax.set_ylabel("period [years]")
        ax.grid(True, alpha=0.3)
    fig.suptitle(f"model={args.model}: period along each axis at the "
                 "reference point")
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)
    periods = [p for *_, p in rows]
    print(f"wrote {args.out} ({len(rows)} oscillating cells, "
          f"{min(periods):.3g}..{max(periods):.3g} years)")


if __name__ == "__main__":
    main()
