#!/usr/bin/env python3
"""Plot fri CSV outputs.

    plot_sweep.py sweep  report.csv  out.png   # f_sd and CRB vs PSNR, one panel per delta
    plot_sweep.py scatter scatter.csv out.png  # t_hat vs PSNR per method
"""

import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def plot_sweep(path, out):
    df = pd.read_csv(path)
    deltas = sorted(df.delta_t.unique())
    fig, axes = plt.subplots(1, len(deltas), figsize=(4 * len(deltas), 3.5), squeeze=False)
    for ax, d in zip(axes[0], deltas):
        cell = df[(df.delta_t == d) & (df.k == 0)]
        for method, g in cell.groupby("method"):
            ax.semilogy(g.psnr_db, g.f_sd, marker="o", ms=3, label=method)
        crb = cell.drop_duplicates("psnr_db")
        ax.semilogy(crb.psnr_db, crb.crb_std, "k--", label="CRB")
        bd = crb.breakdown_psnr_db.iloc[0]
        if pd.notna(bd):
            ax.axvline(bd, color="grey", lw=0.8)
        ax.set_title(f"delta = {d:.3g}")
        ax.set_xlabel("PSNR [dB]")
    axes[0][0].set_ylabel("f_sd (k = 0)")
    axes[0][0].legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(out, dpi=150)


def plot_scatter(path, out):
    df = pd.read_csv(path)
    methods = sorted(df.method.unique())
    fig, axes = plt.subplots(1, len(methods), figsize=(4 * len(methods), 3.5), squeeze=False)
    for ax, method in zip(axes[0], methods):
        g = df[df.method == method]
        for k, gk in g.groupby("k"):
            ax.scatter(gk.psnr_db, gk.t_hat, s=2, label=f"t{k}")
        ax.set_title(method)
        ax.set_xlabel("PSNR [dB]")
    axes[0][0].set_ylabel("t_hat")
    axes[0][0].legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(out, dpi=150)


if __name__ == "__main__":
    if len(sys.argv) != 4 or sys.argv[1] not in ("sweep", "scatter"):
        sys.exit(__doc__)
    {"sweep": plot_sweep, "scatter": plot_scatter}[sys.argv[1]](sys.argv[2], sys.argv[3])
