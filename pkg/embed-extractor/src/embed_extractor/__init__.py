"""Turn folders of tagged audio into embedding manifests.

Each recording is resampled, converted to a log mel-spectrogram, cut
into fixed-length chunks, pushed through the penultimate layer of a
frozen CNN backbone, and averaged into a single embedding vector. The
output is a JSON-lines manifest that downstream few-shot tooling can
load directly.
"""

from embed_extractor.audio import load_waveform
from embed_extractor.backbone import (
    BackboneError,
    MelCNN,
    init_backbone,
    load_backbone,
    save_backbone,
)
from embed_extractor.config import ExtractionConfig
from embed_extractor.extract import ExtractionResult, read_annotations, run_extraction
from embed_extractor.melspec import chunk_spectrogram, log_mel_spectrogram, mel_filterbank

__all__ = [
    "BackboneError",
    "ExtractionConfig",
    "ExtractionResult",
    "MelCNN",
    "chunk_spectrogram",
    "init_backbone",
    "load_backbone",
    "load_waveform",
    "log_mel_spectrogram",
    "mel_filterbank",
    "read_annotations",
    "run_extraction",
    "save_backbone",
]
