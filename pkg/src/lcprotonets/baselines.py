"""Comparative methods: multi-label prototypical networks and one-vs-rest.

Both decompose the multi-label decision per label instead of enumerating
label combinations. ML-PN keeps one prototype per active label and scores
each independently through a sigmoid; one-vs-rest turns each label into a
binary choice between a positive and a negative prototype.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatchError, UncoveredLabelError
from .items import EmbeddedItem, stack_embeddings
from .labels import LabelSet
from .prototypes import cosine_distance, mlpn_scores

DEFAULT_MLPN_THRESHOLD = 0.5


@dataclass(frozen=True)
class SingletonPrototypeSet:
    """One prototype per active label, row-aligned with ``positions``."""

    positions: tuple[int, ...]
    prototypes: np.ndarray
    support_counts: tuple[int, ...]
    width: int

    def __len__(self) -> int:
        return len(self.positions)


def build_mlpn(support: Sequence[EmbeddedItem],
               active_labels: LabelSet) -> SingletonPrototypeSet:
    """Mean embedding per active label; multi-label items feed every label
    they carry. Raises :class:`UncoveredLabelError` for a label no support
    item covers."""
    if not support:
        raise ValueError("build_mlpn requires a non-empty support set")
    if active_labels.is_empty():
        raise ValueError("build_mlpn requires at least one active label")
    embeddings = stack_embeddings(support)
    positions = active_labels.positions()
    prototypes = np.empty((len(positions), embeddings.shape[1]), dtype=np.float64)
    counts = []
    for row, pos in enumerate(positions):
        members = [i for i, it in enumerate(support) if pos in it.labels]
        if not members:
            raise UncoveredLabelError(f"position {pos}")
        prototypes[row] = embeddings[members].mean(axis=0)
        counts.append(len(members))
    prototypes.setflags(write=False)
    return SingletonPrototypeSet(
        positions=positions,
        prototypes=prototypes,
        support_counts=tuple(counts),
        width=active_labels.width,
    )


def mlpn_classify(query: np.ndarray, protos: SingletonPrototypeSet,
                  threshold: float = DEFAULT_MLPN_THRESHOLD) -> LabelSet:
    """Predict every label whose score reaches the threshold.

    An empty prediction falls back to the single nearest label, so the
    method never abstains entirely. See ``mlpn_scores`` for the score.
    """
    scores = mlpn_scores(query, protos.prototypes)
    chosen = [pos for pos, s in zip(protos.positions, scores) if s >= threshold]
    if not chosen:
        chosen = [protos.positions[int(np.argmax(scores))]]
    return LabelSet.from_positions(chosen, protos.width)


def ovr_classify(query: np.ndarray, support: Sequence[EmbeddedItem],
                 active_labels: LabelSet) -> LabelSet:
    """Per-label binary decision against positive/negative prototype pairs.

    Label c is predicted iff the query is strictly closer to the mean of
    items carrying c than to the mean of items lacking it. A label every
    support item carries has no negative prototype and is always predicted.
    """
    if not support:
        raise ValueError("ovr_classify requires a non-empty support set")
    if active_labels.is_empty():
        raise ValueError("ovr_classify requires at least one active label")
    embeddings = stack_embeddings(support)
    q = np.asarray(query, dtype=np.float64)
    if q.ndim != 1 or q.shape[0] != embeddings.shape[1]:
        raise DimensionMismatchError(
            f"query has shape {q.shape}, support dimension is {embeddings.shape[1]}"
        )
    chosen = []
    for pos in active_labels.positions():
        has = np.fromiter((pos in it.labels for it in support),
                          dtype=bool, count=len(support))
        if not has.any():
            raise UncoveredLabelError(f"position {pos}")
        positive = embeddings[has].mean(axis=0)
        if has.all():
            chosen.append(pos)
            continue
        negative = embeddings[~has].mean(axis=0)
        if cosine_distance(q, positive) < cosine_distance(q, negative):
            chosen.append(pos)
    return LabelSet.from_positions(chosen, active_labels.width)
