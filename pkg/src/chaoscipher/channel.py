"""Additive Gaussian noise channel and bit-error-rate sweeps."""
from dataclasses import dataclass

import numpy as np

from chaoscipher._validation import check_count
from chaoscipher.cipher import (DEFAULT_THRESHOLDS, CipherParams, SecretKey, block_values,
                                decide, encode_with_stream)
from chaoscipher.detectors import DETECTORS
from chaoscipher.dynamics import from_grid, truncate14


@dataclass(frozen=True)
class NoiseConfig:
    sigma: float
    seed: int = 0

    def __post_init__(self):
        if not np.isfinite(self.sigma) or self.sigma < 0:
            raise ValueError("sigma must be finite and >= 0")


def draw_noise(shape, cfg):
    """Zero-mean Gaussian perturbations, before any clipping."""
    return np.random.default_rng(cfg.seed).normal(0.0, cfg.sigma, size=shape)


def add_noise(ct, cfg):
    """Perturb every sample, clip to [0, 1] and re-truncate."""
    if cfg.sigma == 0:
        return ct.replace_blocks(ct.blocks.copy())
    noisy = np.clip(ct.blocks + draw_noise(ct.blocks.shape, cfg), 0.0, 1.0)
    return ct.replace_blocks(truncate14(noisy))


def signal_amplitude(ct):
    return float(np.std(ct.blocks))


def snr_of(ct, cfg):
    """``(A_signal / A_noise)**2`` with both amplitudes as standard deviations."""
    if cfg.sigma == 0:
        raise ValueError("SNR undefined for a noiseless channel (sigma=0)")
    return (signal_amplitude(ct) / cfg.sigma) ** 2


@dataclass(frozen=True)
class BerRow:
    detector: str
    sigma: float
    snr: float
    ber: float
    trials: int


class BerCurve:
    """BER rows for every detector over a sigma grid."""

    def __init__(self, rows):
        self.rows = list(rows)

    def for_detector(self, detector):
        """Rows of one detector ordered by increasing SNR."""
        return sorted((r for r in self.rows if r.detector == detector), key=lambda r: r.snr)

    def snr_star(self, detector, level=0.05):
        """Smallest grid SNR from which BER stays below ``level``."""
        star = None
        for r in reversed(self.for_detector(detector)):
            if r.ber >= level:
                break
            star = r.snr
        return star

    def __iter__(self):
        return iter(self.rows)

    def __len__(self):
        return len(self.rows)


def _trial_seed(seed, *path):
    return np.random.SeedSequence([seed, *path])


def _sigma_words(sigma):
    bits = int(np.float64(sigma).view(np.uint64))
    return bits >> 32, bits & 0xFFFFFFFF


def ber_sweep(message_len, trials, sigmas, params=CipherParams(), thr=DEFAULT_THRESHOLDS,
              seed=0):
    """Monte-Carlo BER per detector as a function of the noise level.

    Trial ``t`` draws its key, message and starting states from
    ``(seed, 0, t)`` and is reused at every sigma; its noise at a given sigma
    is seeded from ``(seed, 1, bits(sigma), t)``.  Each point therefore
    depends only on its own sigma, never on the rest of the grid.
    """
    message_len = check_count(message_len, "message_len", 10)
    trials = check_count(trials, "trials", 10)
    sigmas = [float(s) for s in sigmas]
    if not sigmas:
        raise ValueError("sigmas must not be empty")

    errors = np.zeros((len(sigmas), len(DETECTORS)), dtype=np.int64)
    amplitude = np.zeros(len(sigmas))
    for t in range(trials):
        rng = np.random.default_rng(_trial_seed(seed, 0, t))
        key = SecretKey.random(rng)
        bits = rng.integers(0, 2, size=message_len).astype(np.uint8)
        ct, e_grid = encode_with_stream(bits, key, params, rng)
        e_blocks = from_grid(e_grid)
        for i, sigma in enumerate(sigmas):
            noise_seed = int(_trial_seed(seed, 1, *_sigma_words(sigma), t).generate_state(1)[0])
            noisy = add_noise(ct, NoiseConfig(sigma, noise_seed))
            decided = decide(block_values(noisy.blocks, e_blocks, params.transient), thr)
            for j, d in enumerate(DETECTORS):
                errors[i, j] += int(np.sum(decided[d] != bits))
            amplitude[i] += signal_amplitude(ct)
    total = trials * message_len
    rows = []
    for j, d in enumerate(DETECTORS):
        for i, sigma in enumerate(sigmas):
            a_signal = amplitude[i] / trials
            snr = float("inf") if sigma == 0 else (a_signal / sigma) ** 2
            rows.append(BerRow(d, sigma, float(snr), float(errors[i, j] / total), trials))
    return BerCurve(rows)
