"""Episode sampling for N-way K-shot multi-label tasks.

Support filling must respect that one item can serve several active labels
at once: every drawn item counts toward each active label it carries, and
drawing for a label stops as soon as that label has k_shot supporters.
Without this rule, frequently co-occurring labels would be oversampled.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InsufficientItemsError, InsufficientLabelsError, SplitSizeError
from .items import EmbeddedItem
from .labels import LabelSet, LabelVocabulary


@dataclass(frozen=True)
class EpisodeSpec:
    """Episode shape: active label count, support and query depth, seed."""

    n_way: int = 10
    k_shot: int = 3
    n_query: int = 3
    seed: int = 0

    def __post_init__(self):
        if self.n_way < 2:
            raise ValueError("n_way must be at least 2")
        if self.k_shot < 1:
            raise ValueError("k_shot must be at least 1")
        if self.n_query < 1:
            raise ValueError("n_query must be at least 1")


@dataclass(frozen=True)
class Episode:
    """A sampled task: active labels plus disjoint support and query items.

    Item labels are already masked to the active set; out-of-episode labels
    would otherwise leak into power-set enumeration.
    """

    active_labels: LabelSet
    support: tuple[EmbeddedItem, ...]
    query: tuple[EmbeddedItem, ...]

    def __post_init__(self):
        if self.active_labels.is_empty():
            raise ValueError("episode must have at least one active label")
        ids = [it.id for it in self.support] + [it.id for it in self.query]
        if len(set(ids)) != len(ids):
            raise ValueError("support and query items must be distinct by id")
        covered = LabelSet(0, self.active_labels.width)
        for it in self.support + self.query:
            if not it.labels.issubset(self.active_labels):
                raise ValueError(
                    f"item {it.id!r} carries labels outside the active set"
                )
            if it.labels.is_empty():
                raise ValueError(f"item {it.id!r} has an empty masked label set")
        for it in self.support:
            covered = covered | it.labels
        if covered.bits != self.active_labels.bits:
            raise ValueError("support does not cover every active label")


@dataclass(frozen=True)
class LabelSplit:
    """Disjoint label-name lists: training base, validation holdout, novel."""

    base: tuple[str, ...]
    validation_holdout: tuple[str, ...]
    novel: tuple[str, ...]

    def __post_init__(self):
        all_names = self.base + self.validation_holdout + self.novel
        if len(set(all_names)) != len(all_names):
            raise ValueError("split sections must be pairwise disjoint")


def split_labels(vocabulary: LabelVocabulary, base_count: int,
                 holdout_count: int, seed: int) -> LabelSplit:
    """Seeded partition of the vocabulary into base/holdout/novel sections."""
    if base_count < 0 or holdout_count < 0:
        raise SplitSizeError("split section sizes must be non-negative")
    if base_count + holdout_count > len(vocabulary):
        raise SplitSizeError(
            f"base ({base_count}) + holdout ({holdout_count}) exceeds the "
            f"vocabulary size ({len(vocabulary)})"
        )
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(vocabulary))
    shuffled = [vocabulary.names[i] for i in order]
    return LabelSplit(
        base=tuple(shuffled[:base_count]),
        validation_holdout=tuple(shuffled[base_count:base_count + holdout_count]),
        novel=tuple(shuffled[base_count + holdout_count:]),
    )


def task_label_pool(split: LabelSplit, mode: str, n_way: int) -> list[str]:
    """Candidate labels for episode sampling under an evaluation regime.

    ``base`` and ``novel`` return the whole section; ``base_and_novel``
    returns an equal mix, ceil(n_way/2) base labels plus floor(n_way/2)
    novel ones, so an episode drawn from it contains both kinds.
    """
    if mode == "base":
        pool = list(split.base)
    elif mode == "novel":
        pool = list(split.novel)
    elif mode == "base_and_novel":
        need_base = math.ceil(n_way / 2)
        need_novel = n_way // 2
        if len(split.base) < need_base or len(split.novel) < need_novel:
            raise InsufficientLabelsError(
                f"base_and_novel at n_way={n_way} needs {need_base} base and "
                f"{need_novel} novel labels; split has {len(split.base)} and "
                f"{len(split.novel)}"
            )
        return list(split.base[:need_base]) + list(split.novel[:need_novel])
    else:
        raise ValueError(f"unknown task mode {mode!r}")
    if len(pool) < n_way:
        raise InsufficientLabelsError(
            f"mode {mode!r} offers {len(pool)} labels, n_way={n_way} requested"
        )
    return pool


def sample_episode(dataset: Sequence[EmbeddedItem], labels_pool: Sequence[str],
                   vocabulary: LabelVocabulary, spec: EpisodeSpec) -> Episode:
    """Draw one episode: active labels, then support, then queries.

    Active labels come uniformly without replacement from the pool. Support
    visits active labels in a shuffled order, drawing uniformly among the
    still-unused items that carry the label until its count reaches k_shot;
    each draw also credits every other active label on that item. Queries
    repeat the procedure with the remaining items and the n_query target.
    """
    if len(set(labels_pool)) != len(labels_pool):
        raise ValueError("labels_pool contains duplicate names")
    if len(labels_pool) < spec.n_way:
        raise InsufficientLabelsError(
            f"pool of {len(labels_pool)} labels cannot support n_way={spec.n_way}"
        )
    rng = np.random.default_rng(spec.seed)
    pool_positions = [vocabulary.position(name) for name in labels_pool]
    chosen = rng.choice(len(labels_pool), size=spec.n_way, replace=False)
    active_positions = [pool_positions[int(i)] for i in chosen]
    active = LabelSet.from_positions(active_positions, len(vocabulary))

    # Items that share no label with the episode cannot appear in it.
    candidates = [i for i, it in enumerate(dataset)
                  if not (it.labels & active).is_empty()]
    per_label_total = {
        pos: sum(1 for i in candidates if pos in dataset[i].labels)
        for pos in active_positions
    }
    needed = spec.k_shot + spec.n_query
    for pos in active_positions:
        if per_label_total[pos] < needed:
            raise InsufficientItemsError(
                vocabulary.names[pos], needed, per_label_total[pos], "episode"
            )

    used: set[int] = set()
    support_idx = _fill(dataset, candidates, active_positions, used,
                        spec.k_shot, rng, vocabulary, "support")
    query_idx = _fill(dataset, candidates, active_positions, used,
                      spec.n_query, rng, vocabulary, "query")
    return Episode(
        active_labels=active,
        support=tuple(dataset[i].masked(active) for i in support_idx),
        query=tuple(dataset[i].masked(active) for i in query_idx),
    )


def _fill(dataset: Sequence[EmbeddedItem], candidates: list[int],
          active_positions: list[int], used: set[int], target: int,
          rng: np.random.Generator, vocabulary: LabelVocabulary,
          phase: str) -> list[int]:
    counts = {pos: 0 for pos in active_positions}
    drawn: list[int] = []
    visit_order = [active_positions[int(i)]
                   for i in rng.permutation(len(active_positions))]
    for pos in visit_order:
        while counts[pos] < target:
            eligible = [i for i in candidates
                        if i not in used and pos in dataset[i].labels]
            if not eligible:
                raise InsufficientItemsError(
                    vocabulary.names[pos], target, counts[pos], phase
                )
            pick = eligible[int(rng.integers(len(eligible)))]
            used.add(pick)
            drawn.append(pick)
            for p in active_positions:
                if p in dataset[pick].labels:
                    counts[p] += 1
    return drawn
