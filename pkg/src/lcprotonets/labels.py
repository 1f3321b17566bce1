"""Label vocabulary and label-combination algebra.

A label set is a fixed-width bitmask over a vocabulary. All power-set
work enumerates over the positions actually present in a set, so cost
scales with 2^|labels| and never with the vocabulary width. Everything
here is immutable and safe to share across workers.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import LabelCardinalityError

# Practical ceiling on per-item label cardinality: 2^20 subsets is where
# the expansion stops being a desk-scale object. Exceeding it raises,
# never truncates.
DEFAULT_CARDINALITY_CAP = 20


@dataclass(frozen=True)
class LabelSet:
    """Immutable set of label positions, packed into an int bitmask."""

    bits: int
    width: int

    def __post_init__(self):
        if self.width < 1:
            raise ValueError("label set width must be at least 1")
        if self.bits < 0 or self.bits.bit_length() > self.width:
            raise ValueError(
                f"bit pattern {self.bits:#x} does not fit in width {self.width}"
            )

    @classmethod
    def from_positions(cls, positions: Iterable[int], width: int) -> "LabelSet":
        bits = 0
        for p in positions:
            if not 0 <= p < width:
                raise ValueError(f"label position {p} outside [0, {width})")
            bits |= 1 << p
        return cls(bits, width)

    def positions(self) -> tuple[int, ...]:
        """Set bit positions in ascending order."""
        out = []
        bits = self.bits
        while bits:
            low = bits & -bits
            out.append(low.bit_length() - 1)
            bits ^= low
        return tuple(out)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __contains__(self, position: int) -> bool:
        return 0 <= position < self.width and bool(self.bits >> position & 1)

    def __iter__(self) -> Iterator[int]:
        return iter(self.positions())

    def __and__(self, other: "LabelSet") -> "LabelSet":
        self._check_width(other)
        return LabelSet(self.bits & other.bits, self.width)

    def __or__(self, other: "LabelSet") -> "LabelSet":
        self._check_width(other)
        return LabelSet(self.bits | other.bits, self.width)

    def issubset(self, other: "LabelSet") -> bool:
        self._check_width(other)
        return self.bits & other.bits == self.bits

    def is_empty(self) -> bool:
        return self.bits == 0

    def canonical_key(self) -> tuple[int, int]:
        """Sort key: ascending cardinality, then ascending bit pattern."""
        return (self.bits.bit_count(), self.bits)

    def _check_width(self, other: "LabelSet") -> None:
        if self.width != other.width:
            raise ValueError(
                f"label sets live in different spaces (width {self.width} "
                f"vs {other.width})"
            )

    def __repr__(self) -> str:
        return f"LabelSet({{{', '.join(map(str, self.positions()))}}}, width={self.width})"


class LabelVocabulary:
    """Ordered, unique label names with exact name -> position lookup."""

    __slots__ = ("names", "_index")

    def __init__(self, names: Iterable[str]):
        self.names: tuple[str, ...] = tuple(names)
        if not self.names:
            raise ValueError("vocabulary must contain at least one label")
        for name in self.names:
            if not isinstance(name, str) or not name:
                raise ValueError(f"label names must be non-empty strings, got {name!r}")
        self._index = {name: i for i, name in enumerate(self.names)}
        if len(self._index) != len(self.names):
            seen: set[str] = set()
            dupes = sorted({n for n in self.names if n in seen or seen.add(n)})
            raise ValueError(f"duplicate label names: {dupes}")

    def __len__(self) -> int:
        return len(self.names)

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def position(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ValueError(f"unknown label {name!r}") from None

    def encode(self, names: Iterable[str]) -> LabelSet:
        return LabelSet.from_positions((self.position(n) for n in names), len(self))

    def decode(self, labels: LabelSet) -> list[str]:
        if labels.width != len(self):
            raise ValueError(
                f"label set width {labels.width} does not match vocabulary "
                f"size {len(self)}"
            )
        return [self.names[p] for p in labels.positions()]

    def full_set(self) -> LabelSet:
        return LabelSet((1 << len(self)) - 1, len(self))

    def __repr__(self) -> str:
        return f"LabelVocabulary({len(self.names)} labels)"


@dataclass(frozen=True)
class LCClassSet:
    """Deduplicated label combinations in canonical order.

    Canonical order is ascending cardinality, then ascending bit pattern;
    it makes loss vectors and file outputs reproducible regardless of the
    order support items arrived in.
    """

    classes: tuple[LabelSet, ...]

    def __post_init__(self):
        if len({c.bits for c in self.classes}) != len(self.classes):
            raise ValueError("LC-class set contains duplicates")
        widths = {c.width for c in self.classes}
        if len(widths) > 1:
            raise ValueError(f"LC-classes span multiple widths: {sorted(widths)}")

    @classmethod
    def canonical(cls, classes: Iterable[LabelSet]) -> "LCClassSet":
        unique = {c.bits: c for c in classes}
        ordered = sorted(unique.values(), key=LabelSet.canonical_key)
        return cls(tuple(ordered))

    def __len__(self) -> int:
        return len(self.classes)

    def __iter__(self) -> Iterator[LabelSet]:
        return iter(self.classes)

    def __getitem__(self, j: int) -> LabelSet:
        return self.classes[j]

    @property
    def width(self) -> int:
        if not self.classes:
            raise ValueError("empty LC-class set has no width")
        return self.classes[0].width

    def cardinalities(self) -> np.ndarray:
        return np.fromiter((len(c) for c in self.classes), dtype=np.int64,
                           count=len(self.classes))


def power_set(labels: LabelSet, cap: int = DEFAULT_CARDINALITY_CAP) -> list[LabelSet]:
    """All non-empty subsets of ``labels``, canonically ordered.

    Raises :class:`LabelCardinalityError` when the cardinality exceeds
    ``cap``; the result would hold 2^|labels| - 1 sets and silently
    materializing that is how memory blows up.
    """
    k = len(labels)
    if k == 0:
        raise ValueError("power_set requires a non-empty label set")
    if k > cap:
        raise LabelCardinalityError(k, cap)
    position_bits = [1 << p for p in labels.positions()]
    # masks[m] reuses masks[m with lowest bit cleared]; O(1) per subset.
    masks = [0] * (1 << k)
    for m in range(1, 1 << k):
        low = (m & -m).bit_length() - 1
        masks[m] = masks[m & (m - 1)] | position_bits[low]
    subsets = [LabelSet(bits, labels.width) for bits in masks[1:]]
    subsets.sort(key=LabelSet.canonical_key)
    return subsets


def lc_classes(support_labels: Sequence[LabelSet],
               cap: int = DEFAULT_CARDINALITY_CAP) -> LCClassSet:
    """Union of the per-item power sets, deduplicated and canonically ordered.

    The result is closed under the defining union: every non-empty subset
    of every input set appears exactly once.
    """
    if not support_labels:
        raise ValueError("lc_classes requires at least one support label set")
    width = support_labels[0].width
    collected: dict[int, LabelSet] = {}
    for ls in support_labels:
        if ls.width != width:
            raise ValueError(
                f"support label sets span multiple widths ({width} vs {ls.width})"
            )
        if ls.is_empty():
            raise ValueError("support label sets must be non-empty")
        for sub in power_set(ls, cap):
            collected[sub.bits] = sub
    return LCClassSet.canonical(collected.values())


def expand_multi_hot(item_labels: LabelSet, classes: LCClassSet) -> np.ndarray:
    """Binary target over LC-classes: 1 where the class is a subset of the labels.

    A query item sharing no class with the support yields the zero vector;
    that is permitted.
    """
    if len(classes) == 0:
        raise ValueError("expand_multi_hot requires a non-empty LC-class set")
    if classes.width != item_labels.width:
        raise ValueError(
            f"label set width {item_labels.width} does not match class "
            f"width {classes.width}"
        )
    return np.fromiter((c.issubset(item_labels) for c in classes),
                       dtype=np.bool_, count=len(classes))
