"""Log mel-spectrograms and fixed-length chunking."""

from __future__ import annotations

import numpy as np
from scipy.signal import get_window

# Floor added before the log so silence maps to a finite value.
LOG_FLOOR = 1e-10


def hz_to_mel(hz: np.ndarray | float) -> np.ndarray | float:
    return 2595.0 * np.log10(1.0 + np.asarray(hz, dtype=np.float64) / 700.0)


def mel_to_hz(mel: np.ndarray | float) -> np.ndarray | float:
    return 700.0 * (10.0 ** (np.asarray(mel, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(sample_rate: int, n_fft: int, n_mels: int) -> np.ndarray:
    """Triangular mel filterbank, shape (n_mels, n_fft // 2 + 1).

    Triangles are spaced evenly on the mel scale between 0 Hz and the
    Nyquist frequency and overlap so adjacent filters cross at their
    edges.
    """
    if n_mels <= 0:
        raise ValueError(f"n_mels must be positive, got {n_mels}")
    nyquist = sample_rate / 2.0
    mel_points = np.linspace(hz_to_mel(0.0), hz_to_mel(nyquist), n_mels + 2)
    hz_points = np.asarray(mel_to_hz(mel_points))
    bin_freqs = np.fft.rfftfreq(n_fft, d=1.0 / sample_rate)

    weights = np.zeros((n_mels, bin_freqs.shape[0]))
    for m in range(n_mels):
        left, center, right = hz_points[m], hz_points[m + 1], hz_points[m + 2]
        rising = (bin_freqs - left) / max(center - left, 1e-12)
        falling = (right - bin_freqs) / max(right - center, 1e-12)
        weights[m] = np.clip(np.minimum(rising, falling), 0.0, None)
    return weights


def stft_power(wave: np.ndarray, n_fft: int, hop_length: int) -> np.ndarray:
    """Power spectrogram over consecutive full hann windows.

    Shape (n_fft // 2 + 1, n_frames). No implicit padding: a waveform
    shorter than n_fft yields zero frames.
    """
    if wave.ndim != 1:
        raise ValueError(f"expected mono waveform, got shape {wave.shape}")
    if wave.shape[0] < n_fft:
        return np.zeros((n_fft // 2 + 1, 0))
    window = get_window("hann", n_fft, fftbins=True)
    frames = np.lib.stride_tricks.sliding_window_view(wave, n_fft)[::hop_length]
    spectrum = np.fft.rfft(frames * window, axis=1)
    return (spectrum.real**2 + spectrum.imag**2).T


def log_mel_spectrogram(
    wave: np.ndarray,
    sample_rate: int,
    n_fft: int,
    hop_length: int,
    n_mels: int,
) -> np.ndarray:
    """log10 mel power spectrogram, shape (n_mels, n_frames)."""
    power = stft_power(wave, n_fft, hop_length)
    mel = mel_filterbank(sample_rate, n_fft, n_mels) @ power
    return np.log10(mel + LOG_FLOOR)


def chunk_spectrogram(spec: np.ndarray, frames_per_chunk: int) -> np.ndarray:
    """Split along time into full chunks, shape (n_chunks, n_mels, frames_per_chunk).

    Trailing frames that do not fill a chunk are dropped.
    """
    if frames_per_chunk <= 0:
        raise ValueError(f"frames_per_chunk must be positive, got {frames_per_chunk}")
    n_mels, n_frames = spec.shape
    n_chunks = n_frames // frames_per_chunk
    trimmed = spec[:, : n_chunks * frames_per_chunk]
    return trimmed.T.reshape(n_chunks, frames_per_chunk, n_mels).transpose(0, 2, 1)
