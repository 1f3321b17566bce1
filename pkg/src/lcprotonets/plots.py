"""Figure rendering for reports. Files only; no interactive backends."""
from __future__ import annotations

from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

from .evaluation import EvaluationReport  # noqa: E402
from .scaling import ScalingRow  # noqa: E402


def plot_scaling(rows: Sequence[ScalingRow], path) -> None:
    """Prototype counts (left axis, log) and latency (right axis) versus N."""
    n = [r.n_way for r in rows]
    fig, ax_count = plt.subplots(figsize=(6.4, 4.2))
    ax_count.plot(n, [r.lcp_count for r in rows], "o-", color="tab:blue",
                  label="prototypes")
    ax_count.plot(n, [r.lcp_count_dedup for r in rows], "s--", color="tab:cyan",
                  label="prototypes (deduplicated)")
    ax_count.set_xlabel("N (active labels)")
    ax_count.set_ylabel("prototype count")
    ax_count.set_yscale("log")
    ax_time = ax_count.twinx()
    ms = [r.ms_per_item for r in rows]
    ax_time.plot(n, ms, "^-", color="tab:red", label="ms per query")
    err_low = [max(0.0, r.ms_per_item - r.ci_low) if np.isfinite(r.ci_low) else 0.0
               for r in rows]
    err_high = [max(0.0, r.ci_high - r.ms_per_item) if np.isfinite(r.ci_high) else 0.0
                for r in rows]
    ax_time.errorbar(n, ms, yerr=[err_low, err_high], fmt="none",
                     ecolor="tab:red", capsize=3)
    ax_time.set_ylabel("inference time (ms / query item)")
    handles1, labels1 = ax_count.get_legend_handles_labels()
    handles2, labels2 = ax_time.get_legend_handles_labels()
    ax_count.legend(handles1 + handles2, labels1 + labels2, loc="upper left")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_training(log_rows: Sequence[tuple[int, float, float]], path) -> None:
    """Training loss and validation macro-F1 over epochs, twin axes."""
    epochs = [r[0] for r in log_rows]
    fig, ax_loss = plt.subplots(figsize=(6.4, 4.2))
    ax_loss.plot(epochs, [r[1] for r in log_rows], "-", color="tab:blue",
                 label="mean episode loss")
    ax_loss.set_xlabel("epoch")
    ax_loss.set_ylabel("mean loss")
    ax_val = ax_loss.twinx()
    ax_val.plot(epochs, [r[2] for r in log_rows], "-", color="tab:green",
                label="validation macro-F1")
    ax_val.set_ylabel("validation macro-F1")
    ax_val.set_ylim(0.0, 1.0)
    handles1, labels1 = ax_loss.get_legend_handles_labels()
    handles2, labels2 = ax_val.get_legend_handles_labels()
    ax_loss.legend(handles1 + handles2, labels1 + labels2, loc="best")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_evaluation(report: EvaluationReport, path) -> None:
    """Macro/micro F1 bars with 95% intervals for one evaluated method."""
    s = report.summary
    means = [100 * s.macro_mean, 100 * s.micro_mean]
    errs = [100 * s.macro_half_width if np.isfinite(s.macro_half_width) else 0.0,
            100 * s.micro_half_width if np.isfinite(s.micro_half_width) else 0.0]
    fig, ax = plt.subplots(figsize=(4.8, 4.2))
    ax.bar(["Macro-F1", "Micro-F1"], means, yerr=errs, capsize=6,
           color=["tab:blue", "tab:orange"])
    ax.set_ylabel("score (%)")
    ax.set_ylim(0, 100)
    ax.set_title(f"{report.config.method}  {report.task_title}")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
