"""Exception types shared across the package.

Everything raised for a domain-level reason (bad data, exhausted items,
combinatorial blowup) derives from :class:`LCProtoError` so the CLI can
catch one base class and exit non-zero with a message.
"""
from __future__ import annotations


class LCProtoError(Exception):
    """Base class for all domain errors raised by this package."""


class LabelCardinalityError(LCProtoError):
    """An item's label set is too large to enumerate its power set."""

    def __init__(self, cardinality: int, cap: int, item_id: str | None = None):
        self.cardinality = cardinality
        self.cap = cap
        self.item_id = item_id
        where = f" (item {item_id!r})" if item_id is not None else ""
        super().__init__(
            f"label set with {cardinality} labels exceeds the power-set "
            f"cardinality cap of {cap}{where}; the expansion would hold "
            f"2^{cardinality} - 1 subsets"
        )


class DimensionMismatchError(LCProtoError):
    """Embedding dimensions disagree where they must be uniform."""


class ZeroVectorError(LCProtoError):
    """A vector with zero norm has no direction; cosine distance is undefined."""


class NonFiniteError(LCProtoError):
    """NaN or infinity showed up where only finite values are valid."""


class EmptyStoreError(LCProtoError):
    """Classification was requested against a store with no prototypes."""


class UncoveredLabelError(LCProtoError):
    """An active label has no supporting item."""

    def __init__(self, label: str):
        self.label = label
        super().__init__(f"no support item carries label {label}")


class InsufficientItemsError(LCProtoError):
    """A label ran out of items while filling a support or query set."""

    def __init__(self, label: str, needed: int, available: int, phase: str):
        self.label = label
        super().__init__(
            f"label {label} has {available} usable item(s) but {needed} are "
            f"needed for the {phase} set"
        )


class InsufficientLabelsError(LCProtoError):
    """The label pool is too small for the requested task."""


class SplitSizeError(LCProtoError):
    """base_count + holdout_count exceeds the vocabulary size."""


class ManifestError(LCProtoError):
    """A manifest file violates the format; carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")
