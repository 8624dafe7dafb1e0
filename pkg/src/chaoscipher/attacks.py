"""Ciphertext-only histogram distinguisher and brute-force key search."""
import math
import time
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from chaoscipher import _kernels
from chaoscipher._kernels import SCALE
from chaoscipher._validation import check_count
from chaoscipher.cipher import CipherParams, as_key, simulate_pairs
from chaoscipher.detectors import DETECTORS, correlation, mutual_information, transfer_entropy
from chaoscipher.dynamics import from_grid

MIN_BLOCK = 100
FULL_KEY_SPACE = SCALE


class InsufficientDataError(ValueError):
    pass


def _edges(n_bins):
    return np.linspace(0.0, 1.0, n_bins + 1)


def _density(block, edges):
    counts, _ = np.histogram(block, bins=edges)
    return counts / counts.sum()


def total_variation(p, q):
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())


@dataclass
class HistogramModel:
    """Reference sample-value distributions of m=0 and m=1 ciphertext."""

    edges: np.ndarray
    p0: np.ndarray
    p1: np.ndarray

    def distance(self, block):
        h = _density(block, self.edges)
        return total_variation(h, self.p0), total_variation(h, self.p1)


class HistogramDistinguisher(ClassifierMixin, BaseEstimator):
    """Nearest-reference classifier under total-variation distance.

    ``fit`` takes ciphertext blocks (rows of ``X``) labelled with their bit
    and pools each class into one normalized histogram.
    """

    def __init__(self, n_bins=100):
        self.n_bins = n_bins

    def fit(self, X, y):
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y).ravel()
        if X.ndim != 2 or X.shape[0] != y.shape[0]:
            raise ValueError("X must be (n_blocks, block_len) with one label per block")
        if set(np.unique(y)) != {0, 1}:
            raise ValueError("fit needs blocks of both classes")
        edges = _edges(self.n_bins)
        pools = [np.histogram(X[y == c].ravel(), bins=edges)[0] for c in (0, 1)]
        self.model_ = HistogramModel(edges, *(p / p.sum() for p in pools))
        self.classes_ = np.array([0, 1])
        return self

    def decision_function(self, X):
        """``d(block, m=0) - d(block, m=1)``; positive favours m=1."""
        check_is_fitted(self)
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] < MIN_BLOCK:
            raise InsufficientDataError(f"blocks need at least {MIN_BLOCK} samples")
        return np.array([d0 - d1 for d0, d1 in map(self.model_.distance, X)])

    def predict(self, X):
        return (self.decision_function(X) > 0).astype(np.uint8)


def build_histogram_model(samples_per_class=1_000_000, params=CipherParams(),
                          key_source=None, n_bins=100):
    """Simulate ciphertexts of both classes and pool their histograms."""
    samples_per_class = check_count(samples_per_class, "samples_per_class", 10_000)
    n_blocks = math.ceil(samples_per_class / params.block_len)
    bits = np.repeat(np.array([0, 1], dtype=np.uint8), n_blocks)
    s_blocks, _ = simulate_pairs(bits, params, key_source)
    return HistogramDistinguisher(n_bins).fit(s_blocks, bits).model_


def coa_classify(block, model):
    """Return ``(bit, confidence)`` where confidence is the distance gap."""
    block = np.asarray(block, dtype=np.float64)
    if block.ndim != 1 or block.size < MIN_BLOCK:
        raise InsufficientDataError(f"block needs at least {MIN_BLOCK} samples")
    d0, d1 = model.distance(block)
    return (1 if d1 < d0 else 0), abs(d0 - d1)


def coa_confusion(model, params=CipherParams(), n_trials=1000, random_state=None):
    """2x2 counts ``[true][predicted]`` on a balanced fresh test set."""
    n_trials = check_count(n_trials, "n_trials", 2)
    bits = np.arange(n_trials, dtype=np.uint8) % 2
    s_blocks, _ = simulate_pairs(bits, params, random_state)
    confusion = np.zeros((2, 2), dtype=np.int64)
    for block, bit in zip(s_blocks, bits):
        confusion[bit, coa_classify(block, model)[0]] += 1
    return confusion


# --- brute force ------------------------------------------------------------

_DETECTOR_FN = {
    "cc": correlation,
    "mi": mutual_information,
    "te": transfer_entropy,
}


@dataclass(frozen=True)
class BfaConfig:
    """Key window and decision rule for a brute-force scan.

    ``target`` is ciphertext block number ``block_index`` and is assumed to
    carry a 1 bit.  Keys are first screened by correlating ``prefix_len``
    key-stream samples, starting ``prefix_offset`` samples into the block,
    against the same stretch of the target; a key passes above
    ``screen_level``.  The offset skips the opening samples, which all keys
    of a narrow window share.  Survivors are scored with ``detector`` on the
    whole block.  ``prefix_len=None`` scores every key on the whole block.
    """

    key_low: int
    key_high: int
    target: np.ndarray
    detector: str = "cc"
    threshold: float = 0.2
    block_index: int = 0
    budget: int = 10_000_000
    prefix_len: int = 512
    prefix_offset: int = 64
    screen_level: float = 0.15

    def __post_init__(self):
        if self.detector not in DETECTORS:
            raise ValueError(f"detector must be one of {DETECTORS}")
        if not 1 <= self.key_low <= self.key_high < SCALE:
            if self.key_low > self.key_high:
                raise ValueError("empty key range")
            raise ValueError(f"keys must lie in [1, {SCALE - 1}]")
        if self.key_high - self.key_low + 1 > self.budget:
            raise ValueError(f"key range exceeds the budget of {self.budget} keys")


@dataclass
class BfaResult:
    """Ranked ``(key, value)`` candidates of a scan.

    ``merged`` holds the last key-stream grid value of each candidate on the
    target block.  The truncated map is many-to-one, so neighbouring keys'
    orbits can merge; keys with the same last value share their stream from
    the merge point on, score equally up to rounding and share a rank.
    """

    candidates: list
    keys_scanned: int
    elapsed: float
    screened: int
    merged: list = None

    @property
    def keys_per_second(self):
        return self.keys_scanned / self.elapsed if self.elapsed > 0 else float("inf")

    def ranks(self):
        """Competition ranks; equal scores and equivalent keys share a rank."""
        merged = self.merged or [None] * len(self.candidates)
        out, by_orbit = [], {}
        for i, ((_, value), end) in enumerate(zip(self.candidates, merged)):
            if end is not None and end in by_orbit:
                rank = by_orbit[end]
            elif i and value == self.candidates[i - 1][1]:
                rank = out[-1]
            else:
                rank = i + 1
            if end is not None:
                by_orbit.setdefault(end, rank)
            out.append(rank)
        return out

    def rank_of(self, key):
        for rank, (k, _) in zip(self.ranks(), self.candidates):
            if k == key:
                return rank
        return None

    def extrapolated_seconds(self, key_space=FULL_KEY_SPACE):
        return key_space / self.keys_per_second

    def summary(self):
        secs = self.extrapolated_seconds()
        return (f"scanned {self.keys_scanned} keys in {self.elapsed:.2f} s "
                f"({self.keys_per_second:,.0f} keys/s); full 1e14 key space "
                f"extrapolates to {secs:.3g} s = {secs / 86400 / 365.25:.3g} CPU-years")


def _stream_block(key, A, block_index, L):
    """Key-stream block ``block_index`` on the integer grid."""
    orbit = _kernels.free_orbit(np.uint64(key), A, (block_index + 1) * L - 1)
    return orbit[block_index * L:]


def brute_force_key(cfg, params=CipherParams()):
    """Scan ``[key_low, key_high]`` and rank keys whose detector clears the threshold."""
    target = np.asarray(cfg.target, dtype=np.float64)
    L = target.shape[0]
    if L != params.block_len:
        raise ValueError("target length differs from params.block_len")
    A, _ = params.scaled
    score = _DETECTOR_FN[cfg.detector]
    n = cfg.key_high - cfg.key_low + 1

    start = time.perf_counter()
    if cfg.prefix_len is None or cfg.prefix_offset + cfg.prefix_len > L:
        survivors = np.arange(cfg.key_low, cfg.key_high + 1)
    else:
        lo = cfg.prefix_offset
        prefix = np.ascontiguousarray(target[lo:lo + cfg.prefix_len])
        screen = _kernels.screen_keys(np.uint64(cfg.key_low), n, A, prefix,
                                      cfg.block_index * L + lo, 1024)
        survivors = cfg.key_low + np.flatnonzero(screen > cfg.screen_level)
    hits = []
    for key in survivors:
        stream = _stream_block(int(key), A, cfg.block_index, L)
        value = score(from_grid(stream), target)
        if value > cfg.threshold:
            hits.append((as_key(int(key)), float(value), int(stream[-1])))
    elapsed = time.perf_counter() - start
    hits.sort(key=lambda h: (-h[1], h[0].digits))
    return BfaResult(candidates=[(k, v) for k, v, _ in hits], keys_scanned=n, elapsed=elapsed,
                     screened=len(survivors), merged=[end for _, _, end in hits])
