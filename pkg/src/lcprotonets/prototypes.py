"""Label-combination prototypes: construction, distance, and classification.

A prototype store holds one mean embedding per label combination found in
the support set. Classification returns the combination whose prototype is
nearest in cosine distance; near-ties resolve toward the combination with
the most labels, which is what lets hierarchically related combinations
(sharing the exact same supporting items, hence the exact same prototype)
collapse onto the most specific one.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    EmptyStoreError,
    LabelCardinalityError,
    NonFiniteError,
    ZeroVectorError,
)
from .items import EmbeddedItem, stack_embeddings
from .labels import DEFAULT_CARDINALITY_CAP, LabelSet, LCClassSet, lc_classes

# Distances are compared within an absolute epsilon: prototypes built from
# identical member sets are bitwise equal, so their distances agree exactly,
# while genuinely different prototypes practically never land this close.
DEFAULT_TIE_EPSILON = 1e-9


@dataclass(frozen=True)
class LCPrototypeStore:
    """Enumerated label combinations with their supports and mean embeddings.

    ``representations`` row j is the arithmetic mean of the member
    embeddings of class j. Rows of classes with identical memberships are
    computed once and copied, so they stay bitwise identical; that exact
    equality is what the tie-break and the dedup optimization rely on.
    """

    classes: LCClassSet
    memberships: tuple[tuple[int, ...], ...]
    representations: np.ndarray
    dedup_groups: tuple[tuple[int, ...], ...]
    row_norms: np.ndarray
    cardinalities: np.ndarray

    def __len__(self) -> int:
        return len(self.classes)

    @property
    def dimension(self) -> int:
        return self.representations.shape[1]


def class_memberships(classes: LCClassSet,
                      labels: Sequence[LabelSet]) -> list[tuple[int, ...]]:
    """For each class, the indices of items whose label set contains it."""
    return [
        tuple(i for i, ls in enumerate(labels) if c.issubset(ls))
        for c in classes
    ]


def group_by_membership(memberships: Sequence[tuple[int, ...]]
                        ) -> tuple[tuple[int, ...], ...]:
    """Partition class indices by identical membership, first-seen order."""
    groups: dict[tuple[int, ...], list[int]] = {}
    for j, members in enumerate(memberships):
        groups.setdefault(members, []).append(j)
    return tuple(tuple(g) for g in groups.values())


def build_store(support: Sequence[EmbeddedItem],
                cap: int = DEFAULT_CARDINALITY_CAP) -> LCPrototypeStore:
    """Enumerate LC-classes over the support set and average their members.

    Raises :class:`LabelCardinalityError` naming the offending item if any
    label set exceeds the cap, and :class:`DimensionMismatchError` if the
    embeddings do not share one dimension.
    """
    if not support:
        raise ValueError("build_store requires a non-empty support set")
    for it in support:
        if len(it.labels) > cap:
            raise LabelCardinalityError(len(it.labels), cap, item_id=it.id)
    embeddings = stack_embeddings(support)
    labels = [it.labels for it in support]
    classes = lc_classes(labels, cap)
    memberships = class_memberships(classes, labels)
    groups = group_by_membership(memberships)
    representations = np.empty((len(classes), embeddings.shape[1]), dtype=np.float64)
    for group in groups:
        members = memberships[group[0]]
        mean = embeddings[list(members)].mean(axis=0)
        for j in group:
            representations[j] = mean
    representations.setflags(write=False)
    return _finish_store(classes, tuple(memberships), representations, groups)


def _finish_store(classes, memberships, representations, groups) -> LCPrototypeStore:
    norms = np.linalg.norm(representations, axis=1)
    norms.setflags(write=False)
    return LCPrototypeStore(
        classes=classes,
        memberships=memberships,
        representations=representations,
        dedup_groups=groups,
        row_norms=norms,
        cardinalities=classes.cardinalities(),
    )


def cosine_distance(u: np.ndarray, v: np.ndarray) -> float:
    """1 - cos(u, v), in [0, 2]. Errors on zero-norm or non-finite input."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape or u.ndim != 1:
        raise DimensionMismatchError(
            f"cosine_distance needs two vectors of one shape, got {u.shape} and {v.shape}"
        )
    if not (np.all(np.isfinite(u)) and np.all(np.isfinite(v))):
        raise NonFiniteError("cosine_distance received non-finite input")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise ZeroVectorError("cosine distance is undefined for a zero-norm vector")
    cos = float(np.dot(u, v)) / (nu * nv)
    return 1.0 - min(1.0, max(-1.0, cos))


def distances_to_prototypes(query: np.ndarray, store: LCPrototypeStore) -> np.ndarray:
    """Cosine distances from one query vector to every prototype row."""
    if len(store) == 0:
        raise EmptyStoreError("store holds no prototypes")
    q = np.asarray(query, dtype=np.float64)
    if q.ndim != 1 or q.shape[0] != store.dimension:
        raise DimensionMismatchError(
            f"query has shape {q.shape}, store dimension is {store.dimension}"
        )
    if not np.all(np.isfinite(q)):
        raise NonFiniteError("query vector contains non-finite values")
    qn = float(np.linalg.norm(q))
    if qn == 0.0:
        raise ZeroVectorError("query vector has zero norm")
    if np.any(store.row_norms == 0.0):
        raise ZeroVectorError("store contains a zero-norm prototype")
    cos = (store.representations @ q) / (store.row_norms * qn)
    return 1.0 - np.clip(cos, -1.0, 1.0)


def _pick_class(distances: np.ndarray, store: LCPrototypeStore,
                tie_epsilon: float) -> LabelSet:
    # Among everything within tie_epsilon of the minimum distance, take the
    # class with the most labels; canonical order puts the smallest bit
    # pattern first within equal cardinality, so the first hit wins ties.
    dmin = distances.min()
    candidates = np.flatnonzero(distances <= dmin + tie_epsilon)
    cards = store.cardinalities[candidates]
    winner = candidates[cards == cards.max()][0]
    return store.classes[int(winner)]


def classify(query: np.ndarray, store: LCPrototypeStore,
             tie_epsilon: float = DEFAULT_TIE_EPSILON) -> LabelSet:
    """Assign the query to the label combination of the nearest prototype."""
    return _pick_class(distances_to_prototypes(query, store), store, tie_epsilon)


def distance_matrix(queries: np.ndarray, store: LCPrototypeStore) -> np.ndarray:
    """Cosine distances, shape (n_queries, n_prototypes)."""
    if len(store) == 0:
        raise EmptyStoreError("store holds no prototypes")
    Q = np.asarray(queries, dtype=np.float64)
    if Q.ndim != 2 or Q.shape[1] != store.dimension:
        raise DimensionMismatchError(
            f"query batch has shape {Q.shape}, store dimension is {store.dimension}"
        )
    if not np.all(np.isfinite(Q)):
        raise NonFiniteError("query batch contains non-finite values")
    qn = np.linalg.norm(Q, axis=1)
    if np.any(qn == 0.0):
        raise ZeroVectorError("query batch contains a zero-norm vector")
    if np.any(store.row_norms == 0.0):
        raise ZeroVectorError("store contains a zero-norm prototype")
    cos = (Q @ store.representations.T) / np.outer(qn, store.row_norms)
    return 1.0 - np.clip(cos, -1.0, 1.0)


def classify_batch(queries: np.ndarray, store: LCPrototypeStore,
                   tie_epsilon: float = DEFAULT_TIE_EPSILON) -> list[LabelSet]:
    """Classify a (n, D) batch with one matrix product instead of n loops."""
    distances = distance_matrix(queries, store)
    return [_pick_class(row, store, tie_epsilon) for row in distances]


def dedup_store(store: LCPrototypeStore) -> LCPrototypeStore:
    """Drop prototypes that can never win.

    Classes with identical memberships share one representation, so they
    are always tied; the tie-break keeps the one with maximum cardinality
    (then smallest canonical pattern). Retaining only that one per group
    leaves every classification result unchanged while skipping the
    redundant distance computations.
    """
    keep: list[int] = []
    for group in store.dedup_groups:
        best_card = max(int(store.cardinalities[j]) for j in group)
        # group indices are canonically ordered, so the first index at the
        # best cardinality has the smallest bit pattern
        keep.append(next(j for j in group
                         if int(store.cardinalities[j]) == best_card))
    keep.sort()
    classes = LCClassSet(tuple(store.classes[j] for j in keep))
    memberships = tuple(store.memberships[j] for j in keep)
    representations = store.representations[keep].copy()
    representations.setflags(write=False)
    groups = group_by_membership(memberships)
    return _finish_store(classes, memberships, representations, groups)


def mlpn_scores(query: np.ndarray, singleton_prototypes: np.ndarray) -> np.ndarray:
    """Per-class probabilities sigma(-d) against singleton prototypes.

    The sigmoid of the negated distance is the multi-label analogue of the
    softmax assignment: each class is scored independently so a query can
    receive several labels.
    """
    P = np.asarray(singleton_prototypes, dtype=np.float64)
    if P.ndim != 2 or P.shape[0] == 0:
        raise ValueError("mlpn_scores requires a non-empty (n, D) prototype matrix")
    q = np.asarray(query, dtype=np.float64)
    if q.ndim != 1 or q.shape[0] != P.shape[1]:
        raise DimensionMismatchError(
            f"query has shape {q.shape}, prototypes have dimension {P.shape[1]}"
        )
    if not (np.all(np.isfinite(q)) and np.all(np.isfinite(P))):
        raise NonFiniteError("mlpn_scores received non-finite input")
    qn = float(np.linalg.norm(q))
    pn = np.linalg.norm(P, axis=1)
    if qn == 0.0 or np.any(pn == 0.0):
        raise ZeroVectorError("mlpn_scores received a zero-norm vector")
    cos = (P @ q) / (pn * qn)
    d = 1.0 - np.clip(cos, -1.0, 1.0)
    return 1.0 / (1.0 + np.exp(d))
