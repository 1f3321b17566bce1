"""Multi-label F1 scores and small-sample confidence intervals."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import stats

from .labels import LabelSet


@dataclass(frozen=True)
class PredictionBatch:
    """Aligned (truth, prediction) label sets over one active-label universe.

    Both sides of every pair must be subsets of ``active``; predictions are
    allowed to be empty, truths are not required to be.
    """

    pairs: tuple[tuple[LabelSet, LabelSet], ...]
    active: LabelSet

    def __post_init__(self):
        if not self.pairs:
            raise ValueError("prediction batch must contain at least one item")
        if self.active.is_empty():
            raise ValueError("prediction batch needs at least one active label")
        for true, predicted in self.pairs:
            if not true.issubset(self.active) or not predicted.issubset(self.active):
                raise ValueError(
                    f"pair ({true!r}, {predicted!r}) leaves the active "
                    f"universe {self.active!r}"
                )

    def __len__(self) -> int:
        return len(self.pairs)


def label_confusion(batch: PredictionBatch) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-active-label (tp, fp, fn) counts, rows aligned with
    ``batch.active.positions()``."""
    positions = batch.active.positions()
    tp = np.zeros(len(positions), dtype=np.int64)
    fp = np.zeros(len(positions), dtype=np.int64)
    fn = np.zeros(len(positions), dtype=np.int64)
    for true, predicted in batch.pairs:
        for row, pos in enumerate(positions):
            t = pos in true
            p = pos in predicted
            if t and p:
                tp[row] += 1
            elif p:
                fp[row] += 1
            elif t:
                fn[row] += 1
    return tp, fp, fn


def _f1(tp: float, fp: float, fn: float) -> float:
    denom = 2.0 * tp + fp + fn
    if denom == 0.0:
        return 0.0
    return 2.0 * tp / denom


def per_label_f1(batch: PredictionBatch) -> np.ndarray:
    """F1 per active label. A label absent from every truth and every
    prediction has no defined F1; it scores 0 here (see degenerate_labels)."""
    tp, fp, fn = label_confusion(batch)
    return np.fromiter(
        (_f1(t, p, n) for t, p, n in zip(tp, fp, fn)),
        dtype=np.float64, count=len(tp),
    )


def degenerate_labels(batch: PredictionBatch) -> tuple[int, ...]:
    """Active-label positions that never occur in truth or prediction.

    These are the labels whose zero F1 is a convention, not a measurement;
    reports flag them so a depressed macro score can be read correctly.
    """
    tp, fp, fn = label_confusion(batch)
    positions = batch.active.positions()
    return tuple(pos for pos, t, p, n in zip(positions, tp, fp, fn)
                 if t == 0 and p == 0 and n == 0)


def macro_f1(batch: PredictionBatch) -> float:
    """Unweighted mean of the per-label F1 scores."""
    return float(per_label_f1(batch).mean())


def micro_f1(batch: PredictionBatch) -> float:
    """F1 of the TP/FP/FN counts pooled over every label and item."""
    tp, fp, fn = label_confusion(batch)
    return _f1(float(tp.sum()), float(fp.sum()), float(fn.sum()))


def confidence_interval(scores: Sequence[float]) -> tuple[float, float]:
    """Mean and 95% half-width via the Student-t quantile, ddof=1.

    Sized for handfuls of runs, where the normal approximation is too
    tight. Raises on fewer than two scores.
    """
    values = np.asarray(list(scores), dtype=np.float64)
    if values.size < 2:
        raise ValueError("confidence interval requires at least 2 scores")
    if not np.all(np.isfinite(values)):
        raise ValueError("confidence interval received non-finite scores")
    mean = float(values.mean())
    sd = float(values.std(ddof=1))
    quantile = float(stats.t.ppf(0.975, values.size - 1))
    return mean, quantile * sd / math.sqrt(values.size)


@dataclass(frozen=True)
class RunSummary:
    """Macro/micro F1 across repeated runs with 95% half-widths.

    Half-widths are NaN for a single run (no spread to estimate); report
    rendering shows those as n/a.
    """

    macro_scores: tuple[float, ...]
    micro_scores: tuple[float, ...]
    macro_mean: float
    macro_half_width: float
    micro_mean: float
    micro_half_width: float

    @classmethod
    def from_scores(cls, macro_scores: Sequence[float],
                    micro_scores: Sequence[float]) -> "RunSummary":
        macro = tuple(float(s) for s in macro_scores)
        micro = tuple(float(s) for s in micro_scores)
        if len(macro) != len(micro) or not macro:
            raise ValueError("need equal-length non-empty macro and micro score lists")
        if len(macro) == 1:
            return cls(macro, micro, macro[0], math.nan, micro[0], math.nan)
        m_mean, m_hw = confidence_interval(macro)
        u_mean, u_hw = confidence_interval(micro)
        return cls(macro, micro, m_mean, m_hw, u_mean, u_hw)
