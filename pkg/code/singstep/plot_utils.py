import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import pandas as pd
import seaborn as sns


def plot_kink_scan(data, out_dir, file_name="kinkscan.png"):
    """
    final-time error against N on log-log axes, one line per scheme and parameter set.
    data: the kink-scan frame (scheme, kappa, L, T, N, final_error, ...)
    """
    sns.set_theme(style="whitegrid")
    data = data[data["status"] == "ok"].copy()
    data["run"] = data.apply(
        lambda row: f"{row['scheme']} kappa={row['kappa']:g} T={row['T']:g}"
        + ("" if pd.isna(row["L"]) else f" L={row['L']:.3g}"),
        axis=1,
    )

    fig, ax = plt.subplots(figsize=(7, 4.5))
    sns.lineplot(data=data, x="N", y="final_error", hue="run", marker="o", ax=ax)
    ax.set_xscale("log", base=2)
    ax.set_yscale("log")
    ax.set_xlabel("N")
    ax.set_ylabel("final-time error")
    ax.legend(title="")

    path = os.path.join(out_dir, file_name)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
