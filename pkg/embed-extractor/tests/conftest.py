"""Shared fixtures: tiny WAV corpus plus a small backbone checkpoint.

Audio is written with the stdlib wave module so the tests exercise the
real decoder. The corpus keeps clips at 1 second and the front end at
64 mel bands / 0.25 second chunks so the whole suite stays fast.
"""

from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from wavgen import sine, write_wav  # noqa: E402

from embed_extractor.backbone import init_backbone, save_backbone  # noqa: E402
from embed_extractor.config import ExtractionConfig  # noqa: E402

MEL_BANDS = 64
CHUNK_SECONDS = 0.25

# (frequency, band tag) per group; every third clip adds a 550 Hz tone
# and the extra "mixture" tag so multi-label items exist.
BANDS = ((220.0, "low"), (880.0, "mid"), (3520.0, "high"))
REPS = 8


@pytest.fixture(scope="session")
def toy_corpus(tmp_path_factory) -> Path:
    """24 tagged sine clips plus annotations.csv and a backbone checkpoint."""
    root = tmp_path_factory.mktemp("toy_corpus")
    rows = ["file,tags"]
    idx = 0
    for rep in range(REPS):
        for freq, tag in BANDS:
            name = f"clip_{idx:02d}.wav"
            extra = 550.0 if idx % 3 == 0 else None
            tags = tag + ("|mixture" if extra is not None else "")
            write_wav(root / name, sine(freq, amp=0.4 + 0.02 * rep, extra_freq=extra))
            rows.append(f"{name},{tags}")
            idx += 1
    (root / "annotations.csv").write_text("\n".join(rows) + "\n", encoding="utf-8")
    save_backbone(init_backbone(MEL_BANDS, seed=1), root / "backbone.pt")
    return root


@pytest.fixture(scope="session")
def toy_config(toy_corpus: Path) -> ExtractionConfig:
    return ExtractionConfig(
        audio_root=toy_corpus,
        annotation_file=toy_corpus / "annotations.csv",
        backbone_path=toy_corpus / "backbone.pt",
        output_path=toy_corpus / "manifest.jsonl",
        mel_bands=MEL_BANDS,
        chunk_seconds=CHUNK_SECONDS,
    )
