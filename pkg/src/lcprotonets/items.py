"""Embedded items: an id, a label set, and a dense feature vector."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatchError, NonFiniteError
from .labels import LabelSet


@dataclass(frozen=True, eq=False)
class EmbeddedItem:
    """One dataset instance in the embedding space.

    The embedding is coerced to a read-only float64 vector on
    construction; items never change after that.
    """

    id: str
    labels: LabelSet
    embedding: np.ndarray

    def __post_init__(self):
        emb = np.asarray(self.embedding, dtype=np.float64)
        if emb.ndim != 1 or emb.size == 0:
            raise ValueError(f"item {self.id!r} embedding must be a non-empty vector")
        if not np.all(np.isfinite(emb)):
            raise NonFiniteError(f"item {self.id!r} embedding contains non-finite values")
        if len(self.labels) == 0:
            raise ValueError(f"item {self.id!r} must carry at least one label")
        emb = emb.copy()
        emb.setflags(write=False)
        object.__setattr__(self, "embedding", emb)

    @property
    def dimension(self) -> int:
        return self.embedding.shape[0]

    def masked(self, active: LabelSet) -> "EmbeddedItem":
        """Same item with labels restricted to ``active``.

        Raises if the intersection is empty: an item with no active label
        has no LC-class and must not enter an episode.
        """
        return EmbeddedItem(self.id, self.labels & active, self.embedding)

    def with_embedding(self, embedding: np.ndarray) -> "EmbeddedItem":
        return EmbeddedItem(self.id, self.labels, embedding)


def stack_embeddings(items: Sequence[EmbeddedItem]) -> np.ndarray:
    """Stack item embeddings into an (n, D) matrix, checking D is uniform."""
    if not items:
        raise ValueError("cannot stack embeddings of an empty item list")
    dim = items[0].dimension
    for it in items:
        if it.dimension != dim:
            raise DimensionMismatchError(
                f"item {it.id!r} has dimension {it.dimension}, expected {dim}"
            )
    return np.stack([it.embedding for it in items])
