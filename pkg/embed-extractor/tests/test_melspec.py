"""Spectrogram front end: STFT, mel filterbank, log scaling, chunking."""

from __future__ import annotations

import numpy as np
import pytest

from embed_extractor.melspec import (
    LOG_FLOOR,
    chunk_spectrogram,
    hz_to_mel,
    log_mel_spectrogram,
    mel_filterbank,
    mel_to_hz,
    stft_power,
)

from wavgen import sine


class TestMelScale:
    def test_round_trip(self):
        hz = np.array([0.0, 100.0, 440.0, 4000.0, 8000.0])
        assert np.allclose(mel_to_hz(hz_to_mel(hz)), hz, atol=1e-9)

    def test_known_anchor(self):
        # 1000 Hz sits near 1000 mel on this scale.
        assert abs(float(hz_to_mel(1000.0)) - 999.99) < 0.1

    def test_monotonic(self):
        hz = np.linspace(0.0, 8000.0, 200)
        assert np.all(np.diff(np.asarray(hz_to_mel(hz))) > 0)


class TestMelFilterbank:
    def test_shape_and_range(self):
        bank = mel_filterbank(16000, 512, 64)
        assert bank.shape == (64, 257)
        assert np.all(bank >= 0.0)
        assert np.all(bank <= 1.0 + 1e-12)

    def test_filter_peaks_ascend(self):
        bank = mel_filterbank(16000, 512, 32)
        peaks = np.argmax(bank, axis=1)
        assert np.all(np.diff(peaks) >= 0)
        assert np.all(bank.max(axis=1) > 0.0)

    def test_rejects_zero_filters(self):
        with pytest.raises(ValueError):
            mel_filterbank(16000, 512, 0)


class TestStftPower:
    def test_sine_hits_matching_bin(self):
        # Frequency 10 * 16000 / 512 lands exactly on FFT bin 10.
        freq = 10 * 16000 / 512
        wave = np.asarray(sine(freq, seconds=0.5))
        power = stft_power(wave, 512, 256)
        assert power.shape[0] == 257
        assert np.all(np.argmax(power, axis=0) == 10)

    def test_frame_count(self):
        n_fft, hop = 512, 256
        for extra in (0, 1, 5):
            wave = np.zeros(n_fft + extra * hop)
            assert stft_power(wave, n_fft, hop).shape[1] == 1 + extra

    def test_too_short_means_no_frames(self):
        assert stft_power(np.zeros(511), 512, 256).shape == (257, 0)

    def test_rejects_stereo(self):
        with pytest.raises(ValueError, match="mono"):
            stft_power(np.zeros((100, 2)), 64, 32)

    def test_silence_is_zero_power(self):
        assert np.all(stft_power(np.zeros(2048), 512, 256) == 0.0)


class TestLogMel:
    def test_silence_hits_log_floor(self):
        spec = log_mel_spectrogram(np.zeros(4096), 16000, 512, 256, 32)
        assert np.all(spec == np.log10(LOG_FLOOR))

    def test_shape(self):
        wave = np.asarray(sine(440.0, seconds=1.0))
        spec = log_mel_spectrogram(wave, 16000, 512, 256, 64)
        assert spec.shape == (64, 1 + (16000 - 512) // 256)

    def test_tone_energy_lands_in_matching_band(self):
        # A 3.5 kHz tone must peak in a higher mel band than a 200 Hz tone.
        low = log_mel_spectrogram(np.asarray(sine(200.0)), 16000, 512, 256, 64)
        high = log_mel_spectrogram(np.asarray(sine(3500.0)), 16000, 512, 256, 64)
        assert np.argmax(low.mean(axis=1)) < np.argmax(high.mean(axis=1))


class TestChunking:
    def test_shape_and_content(self):
        rng = np.random.default_rng(0)
        spec = rng.normal(size=(8, 50))
        chunks = chunk_spectrogram(spec, 15)
        assert chunks.shape == (3, 8, 15)
        for c in range(3):
            assert np.array_equal(chunks[c], spec[:, c * 15:(c + 1) * 15])

    def test_remainder_dropped(self):
        spec = np.ones((4, 29))
        assert chunk_spectrogram(spec, 10).shape == (2, 4, 10)

    def test_exact_fit(self):
        spec = np.ones((4, 30))
        assert chunk_spectrogram(spec, 10).shape == (3, 4, 10)

    def test_too_few_frames_means_no_chunks(self):
        assert chunk_spectrogram(np.ones((4, 9)), 10).shape == (0, 4, 10)

    def test_concatenation_recovers_trimmed_spectrogram(self):
        rng = np.random.default_rng(1)
        spec = rng.normal(size=(6, 47))
        chunks = chunk_spectrogram(spec, 9)
        rebuilt = np.concatenate(list(chunks), axis=1)
        assert np.array_equal(rebuilt, spec[:, :45])

    def test_rejects_nonpositive_chunk(self):
        with pytest.raises(ValueError):
            chunk_spectrogram(np.ones((4, 20)), 0)
