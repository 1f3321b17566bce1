"""File formats: embedding manifests, label splits, adapters, training logs.

The manifest is line-oriented JSON so it can be streamed, inspected, and
diffed: line 1 is a header {"dimension": D, "vocabulary": [...]}, every
further line one record {"id", "labels", "embedding"}. Floats are written
with repr-level precision, so write -> load round-trips bit-exactly.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import ManifestError, NonFiniteError
from .items import EmbeddedItem
from .labels import LabelVocabulary
from .episodes import LabelSplit
from .training import AdapterState


@dataclass(frozen=True)
class ManifestData:
    items: tuple[EmbeddedItem, ...]
    vocabulary: LabelVocabulary

    @property
    def dimension(self) -> int:
        return self.items[0].dimension if self.items else 0


def write_manifest(path: str | Path, items: Iterable[EmbeddedItem],
                   vocabulary: LabelVocabulary) -> None:
    items = list(items)
    dimension = items[0].dimension if items else 0
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(
            {"dimension": dimension, "vocabulary": list(vocabulary.names)}) + "\n")
        for it in items:
            fh.write(json.dumps({
                "id": it.id,
                "labels": vocabulary.decode(it.labels),
                "embedding": [float(x) for x in it.embedding],
            }) + "\n")


def _parse_header(line: str) -> tuple[int, LabelVocabulary]:
    try:
        header = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ManifestError(f"header is not valid JSON ({exc.msg})", line=1) from exc
    if not isinstance(header, dict) or set(header) != {"dimension", "vocabulary"}:
        raise ManifestError(
            'header must be {"dimension": ..., "vocabulary": [...]}', line=1)
    dimension = header["dimension"]
    if not isinstance(dimension, int) or dimension < 1:
        raise ManifestError("dimension must be a positive integer", line=1)
    vocab = header["vocabulary"]
    if not isinstance(vocab, list):
        raise ManifestError("vocabulary must be a list of label names", line=1)
    try:
        vocabulary = LabelVocabulary(vocab)
    except ValueError as exc:
        raise ManifestError(str(exc), line=1) from exc
    return dimension, vocabulary


def _parse_record(line: str, line_no: int, dimension: int,
                  vocabulary: LabelVocabulary,
                  seen_ids: set[str]) -> EmbeddedItem:
    try:
        record = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ManifestError(f"record is not valid JSON ({exc.msg})",
                            line=line_no) from exc
    if not isinstance(record, dict) or set(record) != {"id", "labels", "embedding"}:
        raise ManifestError(
            'record must be {"id": ..., "labels": [...], "embedding": [...]}',
            line=line_no)
    item_id = record["id"]
    if not isinstance(item_id, str) or not item_id:
        raise ManifestError("id must be a non-empty string", line=line_no)
    if item_id in seen_ids:
        raise ManifestError(f"duplicate id {item_id!r}", line=line_no)
    labels = record["labels"]
    if (not isinstance(labels, list) or not labels
            or not all(isinstance(l, str) for l in labels)):
        raise ManifestError(
            f"labels of {item_id!r} must be a non-empty list of strings",
            line=line_no)
    embedding = record["embedding"]
    if (not isinstance(embedding, list)
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool)
                       for x in embedding)):
        raise ManifestError(
            f"embedding of {item_id!r} must be a list of numbers", line=line_no)
    if len(embedding) != dimension:
        raise ManifestError(
            f"embedding of {item_id!r} has {len(embedding)} values, "
            f"header dimension is {dimension}", line=line_no)
    try:
        label_set = vocabulary.encode(labels)
    except ValueError as exc:
        raise ManifestError(str(exc), line=line_no) from exc
    if len(label_set) != len(labels):
        raise ManifestError(
            f"labels of {item_id!r} contain duplicates", line=line_no)
    try:
        item = EmbeddedItem(id=item_id, labels=label_set,
                            embedding=np.asarray(embedding, dtype=np.float64))
    except NonFiniteError as exc:
        raise ManifestError(str(exc), line=line_no) from exc
    seen_ids.add(item_id)
    return item


def load_manifest(path: str | Path) -> ManifestData:
    """Streaming, validating parse. Errors carry the 1-based line number."""
    items: list[EmbeddedItem] = []
    seen_ids: set[str] = set()
    dimension = 0
    vocabulary = None
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            if vocabulary is None:
                dimension, vocabulary = _parse_header(line)
                continue
            items.append(_parse_record(line, line_no, dimension,
                                       vocabulary, seen_ids))
    if vocabulary is None:
        raise ManifestError("manifest is empty; expected a header line", line=1)
    return ManifestData(items=tuple(items), vocabulary=vocabulary)


# Split files: three bracketed sections, one label per line.
_SPLIT_SECTIONS = ("base", "validation_holdout", "novel")


def write_split(path: str | Path, split: LabelSplit) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for section in _SPLIT_SECTIONS:
            fh.write(f"[{section}]\n")
            for name in getattr(split, section):
                fh.write(name + "\n")


def load_split(path: str | Path) -> LabelSplit:
    sections: dict[str, list[str]] = {s: [] for s in _SPLIT_SECTIONS}
    current: list[str] | None = None
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("[") and line.endswith("]"):
                name = line[1:-1]
                if name not in sections:
                    raise ManifestError(f"unknown split section {name!r}",
                                        line=line_no)
                current = sections[name]
            elif current is None:
                raise ManifestError("label before any [section] header",
                                    line=line_no)
            else:
                current.append(line)
    try:
        return LabelSplit(
            base=tuple(sections["base"]),
            validation_holdout=tuple(sections["validation_holdout"]),
            novel=tuple(sections["novel"]),
        )
    except ValueError as exc:
        raise ManifestError(str(exc)) from exc


def save_adapter(path: str | Path, adapter: AdapterState) -> None:
    """Adapter weights as one JSON object with an explicit dimension header."""
    payload = {
        "d_in": adapter.d_in,
        "d_out": adapter.d_out,
        "weight": [[float(x) for x in row] for row in adapter.weight],
        "bias": [float(x) for x in adapter.bias],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh)
        fh.write("\n")


def load_adapter(path: str | Path) -> AdapterState:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ManifestError(f"adapter file is not valid JSON ({exc.msg})") from exc
    for key in ("d_in", "d_out", "weight", "bias"):
        if key not in payload:
            raise ManifestError(f"adapter file lacks the {key!r} field")
    weight = np.asarray(payload["weight"], dtype=np.float64)
    bias = np.asarray(payload["bias"], dtype=np.float64)
    if weight.shape != (payload["d_in"], payload["d_out"]):
        raise ManifestError(
            f"weight shape {weight.shape} does not match the declared "
            f"{payload['d_in']}x{payload['d_out']}")
    if bias.shape != (payload["d_out"],):
        raise ManifestError(
            f"bias length {bias.shape[0]} does not match d_out {payload['d_out']}")
    return AdapterState(weight=weight, bias=bias)


def write_training_log(path: str | Path,
                       rows: Sequence[tuple[int, float, float]]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "mean_loss", "val_macro_f1"])
        for epoch, mean_loss, val_macro in rows:
            writer.writerow([epoch, repr(float(mean_loss)), repr(float(val_macro))])


def read_training_log(path: str | Path) -> list[tuple[int, float, float]]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["epoch", "mean_loss", "val_macro_f1"]:
            raise ManifestError(f"unexpected training log header: {header}")
        return [(int(e), float(l), float(v)) for e, l, v in reader]
