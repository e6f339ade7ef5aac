"""Figure rendering for sweep reports (PNG next to the CSV)."""

from __future__ import annotations

import math
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

GOLDEN = (math.sqrt(5) - 1.0) / 2.0
FIG_WIDTH = 5.0

STYLE = {
    "figure.figsize": (FIG_WIDTH, FIG_WIDTH * GOLDEN * 1.2),
    "figure.dpi": 120,
    "font.size": 9,
    "axes.labelsize": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "legend.fontsize": 7,
    "lines.linewidth": 1.2,
    "lines.markersize": 3.5,
    "svg.hashsalt": "trsecure",
}


def _series(rows, key):
    groups = defaultdict(list)
    for r in rows:
        groups[getattr(r, key)].append(r)
    return groups


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)
    return path


def plot_ber_vs_ebn0(rows, path) -> Path:
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for k, (alpha, rs) in enumerate(sorted(_series(rows, "alpha").items(), reverse=True)):
            x = [r.ebn0_db for r in rs]
            color = f"C{k}"
            ax.semilogy(x, [max(r.bob_ber, 1e-7) for r in rs], "o-", color=color, label=f"Bob, α={alpha:g}")
            ax.semilogy(x, [max(r.eve_ber, 1e-7) for r in rs], "s--", color=color, label=f"Eve, α={alpha:g}")
        ax.set_xlabel("Eb/N0 [dB]")
        ax.set_ylabel("BER")
        ax.legend(ncol=2)
        return _save(fig, path)


def plot_ber_vs_alpha(rows, path) -> Path:
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for k, (bor, rs) in enumerate(sorted(_series(rows, "bor").items())):
            x = [100 * (1 - r.alpha) for r in rs]
            ax.semilogy(x, [max(r.bob_ber, 1e-7) for r in rs], "o-", color=f"C{k}", label=f"Bob, U={bor}")
            ax.semilogy(x, [max(r.eve_ber, 1e-7) for r in rs], "s--", color=f"C{k}", label=f"Eve, U={bor}")
        ax.set_xlabel("AN energy [% of total]")
        ax.set_ylabel("BER")
        ax.legend(ncol=2)
        return _save(fig, path)


def plot_sr_vs_alpha(rows, path) -> Path:
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for k, (bor, rs) in enumerate(sorted(_series(rows, "bor").items())):
            x = [100 * (1 - r.alpha) for r in rs]
            ax.plot(x, [r.sr_emp for r in rs], "o-", color=f"C{k}", label=f"simulated, U={bor}")
            ax.plot(x, [r.sr_bound for r in rs], "--", color=f"C{k}", label=f"analytic, U={bor}")
        ax.set_xlabel("AN energy [% of total]")
        ax.set_ylabel("secrecy rate [bit/s/Hz]")
        ax.legend(ncol=2)
        return _save(fig, path)


def plot_alpha_opt(results, path) -> Path:
    with plt.rc_context(STYLE):
        fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(FIG_WIDTH * 1.6, FIG_WIDTH * GOLDEN))
        bors = [r.bor for r in results]
        ax1.plot(bors, [100 * (1 - r.alpha_opt) for r in results], "o-", label="analytic")
        ax1.plot(bors, [100 * (1 - r.alpha_star_emp) for r in results], "s--", label="simulated")
        ax1.set_xlabel("BOR U")
        ax1.set_ylabel("optimal AN energy [%]")
        ax1.legend()
        ax2.plot(bors, [r.sr_emp_at_opt for r in results], "o-", label="simulated SR at analytic α")
        ax2.plot(bors, [r.sr_max_emp for r in results], "s--", label="max simulated SR")
        ax2.set_xlabel("BOR U")
        ax2.set_ylabel("secrecy rate [bit/s/Hz]")
        ax2.legend()
        return _save(fig, path)
