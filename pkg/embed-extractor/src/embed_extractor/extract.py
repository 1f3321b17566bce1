"""End-to-end extraction: annotated audio folder to embedding manifest.

The manifest is line-oriented JSON: line 1 a header {"dimension": D,
"vocabulary": [...]}, every further line one record {"id", "labels",
"embedding"}. That is the interchange format the downstream few-shot
tools read; this module writes it directly and stays dependency-free
of them.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from embed_extractor.audio import load_waveform, pad_to_length
from embed_extractor.backbone import MelCNN, load_backbone
from embed_extractor.config import ExtractionConfig
from embed_extractor.melspec import chunk_spectrogram, log_mel_spectrogram

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExtractionResult:
    """What one run produced: record count, skip count, vocabulary."""

    written: int
    skipped: int
    vocabulary: tuple[str, ...]
    output_path: Path


def read_annotations(path: Path) -> list[tuple[str, tuple[str, ...]]]:
    """Parse the annotation CSV into (file, tags) rows.

    Expected columns are ``file`` and ``tags``; tags are pipe-separated
    within the field. Duplicate file entries are rejected because the
    manifest needs unique ids.
    """
    rows: list[tuple[str, tuple[str, ...]]] = []
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames or []
        if "file" not in fields or "tags" not in fields:
            raise ValueError(
                f"annotation file {path} needs 'file' and 'tags' columns, got {fields}"
            )
        for line_no, row in enumerate(reader, start=2):
            name = (row["file"] or "").strip()
            if not name:
                raise ValueError(f"{path}:{line_no}: empty file field")
            if name in seen:
                raise ValueError(f"{path}:{line_no}: duplicate file entry {name!r}")
            seen.add(name)
            raw_tags = (row["tags"] or "").strip()
            tags = tuple(dict.fromkeys(t.strip() for t in raw_tags.split("|") if t.strip()))
            rows.append((name, tags))
    return rows


def embed_recording(
    wave: np.ndarray, config: ExtractionConfig, backbone: MelCNN
) -> np.ndarray:
    """Average of the backbone's per-chunk embeddings, float64.

    The waveform is zero-padded so even a short clip yields one full
    chunk; all chunks are embedded in a single forward pass.
    """
    wave = pad_to_length(wave, config.min_samples)
    spec = log_mel_spectrogram(
        wave, config.sample_rate, config.n_fft, config.hop_length, config.mel_bands
    )
    chunks = chunk_spectrogram(spec, config.frames_per_chunk)
    with torch.no_grad():
        embedded = backbone.embed(torch.from_numpy(chunks).to(torch.float32))
    return embedded.numpy().astype(np.float64).mean(axis=0)


def run_extraction(config: ExtractionConfig) -> ExtractionResult:
    """Embed every annotated recording and write the manifest.

    Files that cannot be decoded (or have no tags) are skipped with a
    warning and counted; the run fails only if nothing at all could be
    embedded. The vocabulary is the sorted set of all annotated tags,
    so it does not shift when individual files drop out.
    """
    annotations = read_annotations(config.annotation_file)
    if not annotations:
        raise ValueError(f"annotation file {config.annotation_file} has no rows")
    backbone = load_backbone(config.backbone_path, mel_bands=config.mel_bands)
    vocabulary = tuple(sorted({t for _, tags in annotations for t in tags}))

    records: list[tuple[str, tuple[str, ...], np.ndarray]] = []
    skipped = 0
    for name, tags in annotations:
        if not tags:
            logger.warning("skipping %s: no tags", name)
            skipped += 1
            continue
        try:
            wave = load_waveform(config.audio_root / name, config.sample_rate)
        except (ValueError, OSError) as exc:
            logger.warning("skipping %s: %s", name, exc)
            skipped += 1
            continue
        records.append((name, tags, embed_recording(wave, config, backbone)))
    if not records:
        raise ValueError(
            f"no recordings could be embedded ({skipped} skipped); nothing to write"
        )
    if skipped:
        logger.warning("skipped %d of %d annotated files", skipped, len(annotations))

    config.output_path.parent.mkdir(parents=True, exist_ok=True)
    with open(config.output_path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({
            "dimension": int(records[0][2].shape[0]),
            "vocabulary": list(vocabulary),
        }) + "\n")
        for name, tags, embedding in records:
            fh.write(json.dumps({
                "id": name,
                "labels": list(tags),
                "embedding": [float(x) for x in embedding],
            }) + "\n")
    return ExtractionResult(
        written=len(records),
        skipped=skipped,
        vocabulary=vocabulary,
        output_path=config.output_path,
    )
