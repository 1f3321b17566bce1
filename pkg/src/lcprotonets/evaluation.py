"""Repeated-run episodic evaluation and the text report.

One run = a fresh stream of episodes scored with the chosen method; the
run's score is the mean of the per-episode F1 values. Runs differ only by
seed (run r uses seed + r), and the runs' scores feed the Student-t
confidence interval, which is how handfuls of repetitions are summarized.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .baselines import (
    DEFAULT_MLPN_THRESHOLD,
    build_mlpn,
    mlpn_classify,
    ovr_classify,
)
from .episodes import Episode, EpisodeSpec, LabelSplit, sample_episode, task_label_pool
from .items import EmbeddedItem, stack_embeddings
from .labels import LabelSet, LabelVocabulary
from .metrics import PredictionBatch, RunSummary, degenerate_labels, macro_f1, micro_f1
from .prototypes import DEFAULT_TIE_EPSILON, build_store, classify_batch
from .training import AdapterState

METHODS = ("lc-protonets", "ml-pn", "one-vs-rest")
MODES = ("base", "novel", "base_and_novel")
_MODE_TITLES = {"base": "Base", "novel": "Novel", "base_and_novel": "Base & Novel"}


@dataclass(frozen=True)
class EvaluationConfig:
    method: str = "lc-protonets"
    mode: str = "novel"
    n_way: int = 10
    k_shot: int = 3
    n_query: int = 3
    n_episodes: int = 50
    runs: int = 5
    seed: int = 0
    mlpn_threshold: float = DEFAULT_MLPN_THRESHOLD
    tie_epsilon: float = DEFAULT_TIE_EPSILON

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; choose from {METHODS}")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; choose from {MODES}")
        if self.n_episodes < 1 or self.runs < 1:
            raise ValueError("n_episodes and runs must be positive")


@dataclass(frozen=True)
class EvaluationReport:
    config: EvaluationConfig
    summary: RunSummary
    degenerate_episodes: int
    total_episodes: int

    @property
    def task_title(self) -> str:
        return (f"{self.config.n_way}-way {self.config.k_shot}-shot "
                f"{_MODE_TITLES[self.config.mode]}")


def predict_episode(episode: Episode, method: str,
                    mlpn_threshold: float = DEFAULT_MLPN_THRESHOLD,
                    tie_epsilon: float = DEFAULT_TIE_EPSILON) -> list[LabelSet]:
    """Predicted label set per query item under the chosen method."""
    queries = stack_embeddings(episode.query)
    if method == "lc-protonets":
        store = build_store(episode.support)
        return classify_batch(queries, store, tie_epsilon)
    if method == "ml-pn":
        protos = build_mlpn(episode.support, episode.active_labels)
        return [mlpn_classify(q, protos, mlpn_threshold) for q in queries]
    if method == "one-vs-rest":
        return [ovr_classify(q, episode.support, episode.active_labels)
                for q in queries]
    raise ValueError(f"unknown method {method!r}")


def _apply_adapter(episode: Episode, adapter: AdapterState) -> Episode:
    return Episode(
        active_labels=episode.active_labels,
        support=tuple(it.with_embedding(adapter.apply(it.embedding))
                      for it in episode.support),
        query=tuple(it.with_embedding(adapter.apply(it.embedding))
                    for it in episode.query),
    )


def episode_batch(episode: Episode, predicted: Sequence[LabelSet]) -> PredictionBatch:
    return PredictionBatch(
        pairs=tuple((it.labels, p) for it, p in zip(episode.query, predicted)),
        active=episode.active_labels,
    )


def evaluate(dataset: Sequence[EmbeddedItem], split: LabelSplit,
             vocabulary: LabelVocabulary, config: EvaluationConfig,
             adapter: AdapterState | None = None) -> EvaluationReport:
    """Run the full protocol; deterministic given inputs and config.seed."""
    pool = task_label_pool(split, config.mode, config.n_way)
    spec = EpisodeSpec(n_way=config.n_way, k_shot=config.k_shot,
                       n_query=config.n_query)
    macro_scores: list[float] = []
    micro_scores: list[float] = []
    degenerate = 0
    for r in range(config.runs):
        rng = np.random.default_rng(config.seed + r)
        ep_macros: list[float] = []
        ep_micros: list[float] = []
        for _ in range(config.n_episodes):
            ep = sample_episode(
                dataset, pool, vocabulary,
                dataclasses.replace(spec, seed=int(rng.integers(0, 2 ** 63))))
            if adapter is not None:
                ep = _apply_adapter(ep, adapter)
            predicted = predict_episode(ep, config.method,
                                        config.mlpn_threshold,
                                        config.tie_epsilon)
            batch = episode_batch(ep, predicted)
            if degenerate_labels(batch):
                degenerate += 1
            ep_macros.append(macro_f1(batch))
            ep_micros.append(micro_f1(batch))
        macro_scores.append(float(np.mean(ep_macros)))
        micro_scores.append(float(np.mean(ep_micros)))
    return EvaluationReport(
        config=config,
        summary=RunSummary.from_scores(macro_scores, micro_scores),
        degenerate_episodes=degenerate,
        total_episodes=config.runs * config.n_episodes,
    )


def _format_score(mean: float, half_width: float) -> str:
    """Percent with 2 decimals; the interval is clamped into [0, 100] for
    display when the raw half-width would cross a bound."""
    if not np.isfinite(half_width):
        return f"{100 * mean:.2f} ± n/a"
    text = f"{100 * mean:.2f} ± {100 * half_width:.2f}"
    low, high = mean - half_width, mean + half_width
    if low < 0.0 or high > 1.0:
        text += (f" (CI clamped to [{100 * max(0.0, low):.2f}, "
                 f"{100 * min(1.0, high):.2f}])")
    return text


def render_report(report: EvaluationReport, timestamp: str | None = None) -> str:
    """Fixed-width text table: percent scores, 2 decimals, ± half-widths."""
    lines = []
    if timestamp is not None:
        lines.append(f"generated: {timestamp}")
    lines.append(f"Task: {report.task_title}  "
                 f"({report.config.runs} runs x {report.config.n_episodes} episodes)")
    lines.append(f"{'Method':<16}{'Macro-F1':<28}{'Micro-F1':<28}")
    lines.append("-" * 72)
    s = report.summary
    lines.append(f"{report.config.method:<16}"
                 f"{_format_score(s.macro_mean, s.macro_half_width):<28}"
                 f"{_format_score(s.micro_mean, s.micro_half_width):<28}")
    if report.degenerate_episodes:
        lines.append(
            f"note: {report.degenerate_episodes}/{report.total_episodes} episodes "
            "had labels absent from both truth and prediction (scored F1=0 "
            "by convention)")
    return "\n".join(lines) + "\n"


def write_scores_csv(path, report: EvaluationReport) -> None:
    """Per-run scores as delimited output next to the rendered report."""
    import csv

    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["run", "macro_f1", "micro_f1"])
        for r, (ma, mi) in enumerate(zip(report.summary.macro_scores,
                                         report.summary.micro_scores)):
            writer.writerow([r, repr(ma), repr(mi)])
