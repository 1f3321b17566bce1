"""WAV decoding, mono mixdown, and resampling."""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy.io import wavfile
from scipy.signal import resample_poly

# Peak magnitude per integer PCM dtype, for scaling into [-1, 1].
_INT_PEAK = {
    np.dtype(np.uint8): 128.0,
    np.dtype(np.int16): 32768.0,
    np.dtype(np.int32): 2147483648.0,
}


def _to_float(data: np.ndarray) -> np.ndarray:
    if data.dtype in _INT_PEAK:
        scaled = data.astype(np.float64)
        if data.dtype == np.dtype(np.uint8):
            # 8-bit WAV is unsigned with midpoint 128.
            scaled -= 128.0
        return scaled / _INT_PEAK[data.dtype]
    if np.issubdtype(data.dtype, np.floating):
        return data.astype(np.float64)
    raise ValueError(f"unsupported sample dtype {data.dtype}")


def load_waveform(path: Path, target_rate: int) -> np.ndarray:
    """Decode a WAV file to a mono float64 waveform at target_rate.

    Multi-channel input is averaged across channels. Sample values are
    scaled to [-1, 1] for integer PCM. Raises ValueError for anything
    that cannot be decoded; callers decide whether to skip or abort.
    """
    try:
        rate, data = wavfile.read(path)
    except FileNotFoundError:
        raise
    except Exception as exc:  # wavfile raises several unrelated types
        raise ValueError(f"cannot decode {path}: {exc}") from exc
    if data.size == 0:
        raise ValueError(f"cannot decode {path}: no samples")
    wave = _to_float(data)
    if wave.ndim == 2:
        wave = wave.mean(axis=1)
    elif wave.ndim != 1:
        raise ValueError(f"cannot decode {path}: unexpected shape {data.shape}")
    if not np.all(np.isfinite(wave)):
        raise ValueError(f"cannot decode {path}: non-finite samples")
    if rate != target_rate:
        ratio = Fraction(target_rate, rate)
        wave = resample_poly(wave, ratio.numerator, ratio.denominator)
    return np.asarray(wave, dtype=np.float64)


def pad_to_length(wave: np.ndarray, n_samples: int) -> np.ndarray:
    """Zero-pad the tail so the waveform has at least n_samples."""
    if wave.shape[0] >= n_samples:
        return wave
    return np.pad(wave, (0, n_samples - wave.shape[0]))
