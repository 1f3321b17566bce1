"""Extraction settings shared by the pipeline stages."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path


@dataclass(frozen=True)
class ExtractionConfig:
    """Everything one extraction run needs.

    The spectrogram parameters must match whatever front end the
    backbone was trained with; ``load_backbone`` checks ``mel_bands``
    against the checkpoint and refuses mismatches.

    Attributes:
        audio_root: Directory that annotation file paths are relative to.
        annotation_file: CSV with columns ``file,tags`` where tags are
            pipe-separated.
        backbone_path: Checkpoint produced by ``save_backbone``.
        output_path: Where the manifest is written.
        sample_rate: Target rate in Hz; inputs are resampled to this.
        n_fft: STFT window size in samples.
        hop_length: STFT hop in samples.
        mel_bands: Number of mel filterbank channels.
        chunk_seconds: Length of one spectrogram chunk. Recordings
            shorter than this are zero-padded up to a single chunk.
    """

    audio_root: Path
    annotation_file: Path
    backbone_path: Path
    output_path: Path
    sample_rate: int = 16000
    n_fft: int = 512
    hop_length: int = 256
    mel_bands: int = 128
    chunk_seconds: float = 3.0

    def __post_init__(self) -> None:
        if self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        if self.n_fft <= 0:
            raise ValueError(f"n_fft must be positive, got {self.n_fft}")
        if not 0 < self.hop_length <= self.n_fft:
            raise ValueError(
                f"hop_length must be in (0, n_fft], got {self.hop_length} with n_fft {self.n_fft}"
            )
        if self.mel_bands <= 0:
            raise ValueError(f"mel_bands must be positive, got {self.mel_bands}")
        if self.chunk_seconds <= 0:
            raise ValueError(f"chunk_seconds must be positive, got {self.chunk_seconds}")
        if self.frames_per_chunk < 1:
            raise ValueError(
                f"chunk_seconds {self.chunk_seconds} is shorter than one hop "
                f"at {self.sample_rate} Hz"
            )

    @property
    def frames_per_chunk(self) -> int:
        """Spectrogram frames that make up one chunk."""
        return int(self.chunk_seconds * self.sample_rate) // self.hop_length

    @property
    def min_samples(self) -> int:
        """Fewest waveform samples that still yield one full chunk."""
        return self.n_fft + (self.frames_per_chunk - 1) * self.hop_length
