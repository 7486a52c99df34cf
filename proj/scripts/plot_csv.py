#!/usr/bin/env python3
"""Plot the CSVs written by `acmtm`.

  plot_csv.py alpha_sweep.csv            ASJ and per-coordinate ACT against alpha
  plot_csv.py comparison.csv             ESS and ESS/s per coordinate, one bar group per label
  plot_csv.py trace.csv                  thinned trace, one panel per coordinate
  plot_csv.py selection.csv              selection frequency against log2 sigma

Writes <input>.png next to the input unless -o is given.
"""
import argparse
import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
import pandas as pd


def plot_alpha(df, fig):
    ax1, ax2 = fig.subplots(1, 2)
    ax1.plot(df["alpha"], df["asj"], marker="o")
    ax1.set_xlabel("alpha")
    ax1.set_ylabel("ASJ")
    for col in [c for c in df.columns if c.startswith("act_")]:
        ax2.plot(df["alpha"], df[col], marker="o", label=col)
    ax2.set_xlabel("alpha")
    ax2.set_ylabel("ACT")
    ax2.legend()


def plot_comparison(df, fig):
    ax1, ax2 = fig.subplots(1, 2)
    labels = list(dict.fromkeys(df["label"]))
    coords = sorted(df["coordinate"].unique())
    width = 0.8 / len(labels)
    for i, label in enumerate(labels):
        sub = df[df["label"] == label].set_index("coordinate").loc[coords]
        x = np.arange(len(coords)) + i * width
        ax1.bar(x, sub["ess"], width, label=label)
        ax2.bar(x, sub["ess_per_second"], width, label=label)
    for ax, name in ((ax1, "ESS"), (ax2, "ESS / second")):
        ax.set_xticks(np.arange(len(coords)) + 0.4 - width / 2)
        ax.set_xticklabels(coords)
        ax.set_xlabel("coordinate")
        ax.set_ylabel(name)
    ax1.legend()


def plot_trace(df, fig):
    cols = [c for c in df.columns if c != "iteration"]
    axes = np.atleast_1d(fig.subplots(len(cols), 1, sharex=True))
    for ax, col in zip(axes, cols):
        ax.plot(df["iteration"], df[col], lw=0.5)
        ax.set_ylabel(col)
    axes[-1].set_xlabel("iteration")


def plot_frequency(df, fig):
    ax = fig.subplots()
    for k, sub in df.groupby("coordinate"):
        ax.plot(np.log2(sub["sigma"]), sub["frequency"], marker=".", label=f"coordinate {k}")
    ax.set_xlabel("log2 sigma")
    ax.set_ylabel("frequency")
    ax.legend()


def main():
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("csv", type=pathlib.Path)
    p.add_argument("-o", "--output", type=pathlib.Path)
    args = p.parse_args()

    df = pd.read_csv(args.csv)
    fig = plt.figure(figsize=(10, 4 if "iteration" not in df.columns else 2 * (len(df.columns) - 1)))
    if "alpha" in df.columns:
        plot_alpha(df, fig)
    elif "label" in df.columns:
        plot_comparison(df, fig)
    elif "iteration" in df.columns and "branch" not in df.columns:
        plot_trace(df, fig)
    elif "frequency" in df.columns:
        plot_frequency(df, fig)
    else:
        raise SystemExit(f"don't know how to plot {args.csv}")
    fig.tight_layout()
    out = args.output or args.csv.with_suffix(".png")
    fig.savefig(out, dpi=120)
    print(out)


if __name__ == "__main__":
    main()
