"""Waveform route: synthesize an N0S_psi stimulus and read the cues back
from its analytic signal."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import hilbert

from .stimulus import ParameterError, StimulusParams

__all__ = [
    "WaveformStimulus",
    "CueTrace",
    "synthesize_waveform",
    "analytic_signal",
    "extract_cues",
    "write_wav",
]

# spawn key reserved for waveform noise; keeps it apart from the i.i.d. blocks
_WAVEFORM_STREAM = 2 ** 31 - 1


@dataclass
class WaveformStimulus:
    sample_rate_hz: float
    center_freq_hz: float
    noise_bandwidth_hz: float
    duration_s: float
    left: np.ndarray
    right: np.ndarray
    params: StimulusParams


@dataclass
class CueTrace:
    time_s: np.ndarray
    ipd_rad: np.ndarray
    ild_db: np.ndarray
    power_p: np.ndarray


def synthesize_waveform(params: StimulusParams, sample_rate_hz: float = 48000.0,
                        center_freq_hz: float = 500.0,
                        noise_bandwidth_hz: float = 500.0,
                        duration_s: float = 1.0, seed: int = 0,
                        noise_gain: float = 1.0) -> WaveformStimulus:
    """Diotic band-limited noise plus a tone at ``center_freq_hz``.

    Noise: independent complex Gaussian FFT bins, flat inside
    ``f0 +- B/2`` and zero elsewhere, rescaled so its sample variance is
    exactly ``noise_variance`` (times ``noise_gain**2``). The tone has phase
    ``+psi/2`` in the left ear and ``-psi/2`` in the right.
    """
    fs, f0, bw = float(sample_rate_hz), float(center_freq_hz), float(noise_bandwidth_hz)
    if duration_s <= 0:
        raise ParameterError("duration must be positive")
    if bw <= 0 or f0 - bw / 2 <= 0 or f0 + bw / 2 >= fs / 2:
        raise ParameterError("noise band must lie inside (0, fs/2)")
    n = int(round(duration_s * fs))
    freqs = np.fft.rfftfreq(n, 1.0 / fs)
    band = np.abs(freqs - f0) <= bw / 2
    if not band.any():
        raise ParameterError("noise band contains no frequency bins")

    ss = np.random.SeedSequence(seed, spawn_key=(_WAVEFORM_STREAM,))
    rng = np.random.Generator(np.random.PCG64(ss))
    k = int(band.sum())
    spectrum = np.zeros(freqs.size, dtype=complex)
    spectrum[band] = rng.standard_normal(k) + 1j * rng.standard_normal(k)
    noise = np.fft.irfft(spectrum, n)
    noise *= math.sqrt(params.noise_variance / np.mean(noise ** 2)) * noise_gain

    t = np.arange(n) / fs
    c, half = params.tone_amplitude_c, params.tone_ipd_psi / 2.0
    w = 2.0 * math.pi * f0 * t
    left = noise + c * np.cos(w + half)
    right = noise + c * np.cos(w - half)
    return WaveformStimulus(fs, f0, bw, float(duration_s), left, right, params)


def analytic_signal(x) -> np.ndarray:
    """FFT-based analytic signal (negative frequencies removed, positive doubled)."""
    return hilbert(np.asarray(x, dtype=float))


def extract_cues(stim: WaveformStimulus, edge_fraction: float = 0.05) -> CueTrace:
    """Instantaneous IPD, ILD and envelope product of a stimulus.

    Both ears are converted to complex basebands at the tone frequency; the
    first and last ``edge_fraction`` of samples are dropped.
    """
    left = np.asarray(stim.left, dtype=float)
    right = np.asarray(stim.right, dtype=float)
    if not np.any(left) or not np.any(right):
        raise ParameterError("cannot extract cues from an all-zero channel")
    n = left.size
    t = np.arange(n) / stim.sample_rate_hz
    mix = np.exp(-2j * math.pi * stim.center_freq_hz * t)
    zl = analytic_signal(left) * mix
    zr = analytic_signal(right) * mix
    cut = int(round(edge_fraction * n))
    sl = slice(cut, n - cut)
    zl, zr, t = zl[sl], zr[sl], t[sl]
    al, ar = np.abs(zl), np.abs(zr)
    with np.errstate(divide="ignore"):
        ild = 20.0 * np.log10(al / ar)
    return CueTrace(t, np.angle(zl * np.conj(zr)), ild, al * ar)


def write_wav(path, stim: WaveformStimulus) -> None:
    """Two-channel (left, right) 32-bit float RIFF/WAVE file."""
    from scipy.io import wavfile
    data = np.column_stack([stim.left, stim.right]).astype(np.float32)
    wavfile.write(path, int(round(stim.sample_rate_hz)), data)
