"""Figures for the report-producing CLI commands."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from . import capacity  # noqa: E402

BLUE = "#1f77b4"
ORANGE = "#ff7f0e"
GREEN = "#2ca02c"
GRAY = "#7f7f7f"


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return path


def plot_capacity_sweep(D: int, M: int, K_max: int, path, mark_K: int | None = None) -> Path:
    """Rate expressions against K for fixed demand and side-information sizes."""
    Ks = list(range(D + M, K_max + 1))
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.plot(Ks, [float(capacity.linear_capacity_bound(K, D, M)) for K in Ks],
            color=BLUE, label="linear capacity bound (D+M)/K")
    ax.plot(Ks, [float(capacity.conjectured_capacity(K, D, M)) for K in Ks],
            color=GRAY, ls="--", label="conjecture D/ceil(DK/(D+M))")
    ax.step(Ks, [float(capacity.prior_scheme_rate(K, D, M)) for K in Ks],
            where="mid", color=ORANGE, label="earlier scheme")
    ach = [(K, capacity.achievable_rate(K, D, M)) for K in Ks]
    ach = [(K, float(r)) for K, r in ach if r is not None]
    if ach:
        ax.scatter(*zip(*ach), color=GREEN, zorder=3, label="Group-and-Code")
    if mark_K is not None:
        ax.axvline(mark_K, color="k", lw=0.8, alpha=0.4)
    ax.set_xlabel("number of messages K")
    ax.set_ylabel("rate")
    ax.set_title(f"D={D}, M={M}")
    ax.set_ylim(0, 1.05)
    ax.legend(fontsize=8, frameon=False)
    return _save(fig, path)


def plot_posteriors(posteriors: dict, target, path, title: str = "") -> Path:
    """One dot per (query, index): P(i in W | Q) against the prior D/K."""
    fig, ax = plt.subplots(figsize=(6.4, 3.6))
    for values in posteriors.values():
        ax.scatter(range(1, len(values) + 1), [float(v) for v in values],
                   s=8, color=BLUE, alpha=0.3)
    ax.axhline(float(target), color=ORANGE, lw=1.2, label=f"D/K = {target}")
    ax.set_xlabel("message index i")
    ax.set_ylabel("P(i in W | Q)")
    ax.set_ylim(0, 1)
    ax.set_title(title or f"{len(posteriors)} queries")
    ax.legend(fontsize=8, frameon=False)
    return _save(fig, path)


def plot_marginals(alpha: Sequence, beta: Sequence, path) -> Path:
    """Posterior demand/side-information marginals of a single query."""
    idx = list(range(1, len(alpha) + 1))
    fig, ax = plt.subplots(figsize=(6.4, 3.6))
    w = 0.4
    ax.bar([i - w / 2 for i in idx], [float(a) for a in alpha], w, color=BLUE, label="alpha_i")
    ax.bar([i + w / 2 for i in idx], [float(b) for b in beta], w, color=GREEN, label="beta_i")
    ax.set_xlabel("message index i")
    ax.set_ylabel("posterior probability")
    ax.set_xticks(idx)
    ax.legend(fontsize=8, frameon=False)
    return _save(fig, path)
