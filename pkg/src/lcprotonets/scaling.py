"""Scalability benchmark: prototype counts and per-query latency versus N.

For each requested N the harness samples several support sets, builds the
prototype store (optionally deduplicated), and times classification of one
fixed query batch with a monotonic clock. Timing covers distance
computation plus the argmin-style class pick only; embedding extraction is
out of scope here. A warm-up pass is excluded and the median over
repetitions is reported, so one-off jitter does not move the numbers.
"""
from __future__ import annotations

import dataclasses
import math
import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .episodes import EpisodeSpec, sample_episode
from .items import EmbeddedItem, stack_embeddings
from .labels import LabelVocabulary
from .metrics import confidence_interval
from .prototypes import build_store, classify, classify_batch, dedup_store


@dataclass(frozen=True)
class ScalingRow:
    """One benchmark line: counts and timing for a single N."""

    n_way: int
    lcp_count: float
    lcp_count_dedup: float
    ms_per_item: float
    ci_low: float
    ci_high: float
    subset_bound: float


def subset_count_bound(support: Sequence[EmbeddedItem]) -> int:
    """Sum over items of (2^|labels| - 1), an upper bound on the class count."""
    return sum((1 << len(it.labels)) - 1 for it in support)


def _time_batch(store, queries: np.ndarray, vectorized: bool) -> float:
    """Milliseconds per query item, one timed pass after one warm-up pass."""
    if vectorized:
        classify_batch(queries, store)
        start = time.perf_counter()
        classify_batch(queries, store)
        elapsed = time.perf_counter() - start
    else:
        classify(queries[0], store)
        start = time.perf_counter()
        for q in queries:
            classify(q, store)
        elapsed = time.perf_counter() - start
    return 1000.0 * elapsed / queries.shape[0]


def run_scaling(dataset: Sequence[EmbeddedItem], vocabulary: LabelVocabulary,
                n_values: Sequence[int], k_shot: int = 3, repetitions: int = 3,
                dedup: bool = False, query_count: int = 100, seed: int = 0,
                vectorized: bool = False) -> list[ScalingRow]:
    """Benchmark every N in ``n_values`` on one fixed query batch.

    With ``dedup`` the deduplicated store is what gets timed, and its
    predictions on the query batch are first verified identical to the
    full store's. Per-label prototype counts are averaged over
    repetitions; latency is the median with a Student-t interval around
    the repetition mean (NaN bounds for a single repetition).
    """
    if not n_values:
        raise ValueError("run_scaling needs at least one N value")
    if repetitions < 1 or query_count < 1:
        raise ValueError("repetitions and query_count must be positive")
    rng = np.random.default_rng(seed)
    picks = rng.choice(len(dataset), size=query_count,
                       replace=len(dataset) < query_count)
    queries = stack_embeddings([dataset[int(i)] for i in picks])

    pool = list(vocabulary.names)
    rows: list[ScalingRow] = []
    for n_way in n_values:
        spec = EpisodeSpec(n_way=n_way, k_shot=k_shot, n_query=1)
        counts, counts_dedup, ms_values, bounds = [], [], [], []
        for _ in range(repetitions):
            episode = sample_episode(
                dataset, pool, vocabulary,
                dataclasses.replace(spec, seed=int(rng.integers(0, 2 ** 63))))
            store = build_store(episode.support)
            bound = subset_count_bound(episode.support)
            if len(store) > bound:
                raise AssertionError(
                    f"class count {len(store)} exceeds its bound {bound}")
            small = dedup_store(store)
            counts.append(len(store))
            counts_dedup.append(len(small))
            bounds.append(bound)
            if dedup:
                full_pred = classify_batch(queries, store)
                small_pred = classify_batch(queries, small)
                mismatches = sum(f.bits != s.bits
                                 for f, s in zip(full_pred, small_pred))
                if mismatches:
                    raise AssertionError(
                        f"dedup changed {mismatches} predictions at N={n_way}")
            ms_values.append(_time_batch(small if dedup else store,
                                         queries, vectorized))
        if repetitions >= 2:
            mean_ms, half_width = confidence_interval(ms_values)
            ci_low, ci_high = mean_ms - half_width, mean_ms + half_width
        else:
            ci_low = ci_high = math.nan
        rows.append(ScalingRow(
            n_way=n_way,
            lcp_count=float(np.mean(counts)),
            lcp_count_dedup=float(np.mean(counts_dedup)),
            ms_per_item=float(np.median(ms_values)),
            ci_low=ci_low,
            ci_high=ci_high,
            subset_bound=float(np.mean(bounds)),
        ))
    return rows


def write_scaling_csv(path, rows: Sequence[ScalingRow]) -> None:
    import csv

    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["N", "lcp_count", "lcp_count_dedup", "ms_per_item",
                         "ci_low", "ci_high"])
        for row in rows:
            writer.writerow([row.n_way, repr(row.lcp_count),
                             repr(row.lcp_count_dedup), repr(row.ms_per_item),
                             repr(row.ci_low), repr(row.ci_high)])


def write_scaling_gnuplot(path, rows: Sequence[ScalingRow]) -> None:
    """Whitespace-delimited columns with a comment header, plottable as-is."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# N lcp_count lcp_count_dedup ms_per_item ci_low ci_high\n")
        for row in rows:
            fh.write(f"{row.n_way} {row.lcp_count!r} {row.lcp_count_dedup!r} "
                     f"{row.ms_per_item!r} {row.ci_low!r} {row.ci_high!r}\n")
