"""Coupled-map cipher: one chaotic block per message bit.

A bit ``m`` is sent as a block of the response map

    s[n+1] = (1 - delta*m) f(s[n]) + delta*m f(e[n])

driven by the key stream ``e`` started from the secret key.  The key stream
runs on continuously from block to block; every block restarts ``s`` from a
fresh random state.  The receiver regenerates ``e`` and decides each bit by
whether a coupling detector exceeds its threshold.
"""
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from chaoscipher import _kernels
from chaoscipher._kernels import SCALE
from chaoscipher._validation import check_count, scaled_decimal
from chaoscipher.detectors import DETECTORS, DetectorValues, SymbolizationConfig, detect_all
from chaoscipher.dynamics import DEFAULT_A, MapParams, from_grid

KEY_DIGITS = 14


class CipherFormatError(ValueError):
    """Ciphertext does not match the parameters it is decoded with."""


@dataclass(frozen=True, order=True)
class SecretKey:
    """A 14-digit decimal key; the key stream starts at ``digits / 1e14``."""

    digits: int

    def __post_init__(self):
        if isinstance(self.digits, bool) or not isinstance(self.digits, (int, np.integer)):
            raise TypeError("key digits must be an integer")
        if not 1 <= self.digits < SCALE:
            raise ValueError(f"key must lie in [1, {SCALE - 1}], got {self.digits}")

    @classmethod
    def parse(cls, text):
        text = str(text).strip()
        if len(text) != KEY_DIGITS or not text.isdigit():
            raise ValueError(f"key must be exactly {KEY_DIGITS} decimal digits, got {text!r}")
        return cls(int(text))

    @classmethod
    def random(cls, rng):
        return cls(int(rng.integers(1, SCALE)))

    @property
    def e0(self):
        return self.digits / SCALE

    def __str__(self):
        return f"{self.digits:0{KEY_DIGITS}d}"


def as_key(key):
    if isinstance(key, SecretKey):
        return key
    if isinstance(key, str):
        return SecretKey.parse(key)
    return SecretKey(key)


@dataclass(frozen=True)
class CipherParams:
    a: float = DEFAULT_A
    delta: float = 0.2
    block_len: int = 10000
    transient: int = 0

    def __post_init__(self):
        MapParams(self.a)
        if scaled_decimal(self.delta, "delta", 0, 1, lo_open=True) >= 10**7:
            raise ValueError("delta must be < 1")
        check_count(self.block_len, "block_len", 100)
        check_count(self.transient, "transient", 0)
        if self.block_len - self.transient < 3:
            raise ValueError("transient leaves fewer than 3 samples per block")

    @property
    def scaled(self):
        return (np.uint64(scaled_decimal(self.a, "a", 0, 4, lo_open=True)),
                np.uint64(scaled_decimal(self.delta, "delta", 0, 1)))


@dataclass(frozen=True)
class Thresholds:
    te: float = 0.1
    mi: float = 0.015
    cc: float = 0.2

    def __post_init__(self):
        for name in DETECTORS:
            if not getattr(self, name) > 0:
                raise ValueError(f"threshold {name} must be > 0")

    def __getitem__(self, name):
        return getattr(self, name)


DEFAULT_THRESHOLDS = Thresholds()


@dataclass
class CipherText:
    """Transmitted blocks, shape ``(n_blocks, block_len)``."""

    blocks: np.ndarray
    a: float = DEFAULT_A
    delta: float = 0.2

    def __post_init__(self):
        blocks = np.asarray(self.blocks, dtype=np.float64)
        if blocks.ndim == 1 and blocks.size == 0:
            blocks = blocks.reshape(0, 0)
        if blocks.ndim != 2:
            raise CipherFormatError("blocks must be a 2-D array")
        if blocks.size and (np.any(blocks < 0) or np.any(blocks > 1)):
            raise CipherFormatError("ciphertext samples must lie in [0, 1]")
        self.blocks = blocks

    @property
    def n_blocks(self):
        return self.blocks.shape[0]

    @property
    def block_len(self):
        return self.blocks.shape[1]

    def replace_blocks(self, blocks):
        return CipherText(blocks, self.a, self.delta)


def _bits(message):
    bits = np.asarray(message, dtype=np.int64).ravel()
    if np.any((bits != 0) & (bits != 1)):
        raise ValueError("message must contain only 0 and 1")
    return bits.astype(np.uint8)


def _random_s0(rng, n):
    return rng.integers(1, SCALE, size=n).astype(np.uint64)


def encode_with_stream(message, key, params=CipherParams(), random_state=None):
    """Encode and also return the key-stream blocks, as grid indices."""
    key = as_key(key)
    bits = _bits(message)
    rng = np.random.default_rng(random_state)
    A, d = params.scaled
    es, ss = _kernels.drive_blocks(np.uint64(key.digits), _random_s0(rng, bits.size),
                                   bits, A, d, params.block_len)
    return CipherText(from_grid(ss), params.a, params.delta), es


def encode(message, key, params=CipherParams(), random_state=None):
    """Encrypt a bit sequence into one block per bit.

    ``random_state`` seeds the per-block random starting states.
    """
    message = _bits(message)
    if message.size == 0:
        raise ValueError("message must not be empty")
    return encode_with_stream(message, key, params, random_state)[0]


def key_stream_blocks(key, params, n_blocks):
    """The receiver's regenerated key stream, cut into blocks."""
    key = as_key(key)
    A, _ = params.scaled
    return from_grid(_kernels.key_blocks(np.uint64(key.digits), A, n_blocks, params.block_len))


@dataclass
class DetectorReport:
    values: list
    bits: dict
    thresholds: Thresholds = DEFAULT_THRESHOLDS
    errors: dict = field(default=None)

    @property
    def n_bits(self):
        return len(self.values)

    def majority(self):
        """Per-bit majority vote over the three detectors."""
        if not self.values:
            return np.zeros(0, dtype=np.uint8)
        stacked = np.vstack([self.bits[d] for d in DETECTORS])
        return (stacked.sum(axis=0) >= 2).astype(np.uint8)

    def to_dict(self):
        return {
            "thresholds": {d: self.thresholds[d] for d in DETECTORS},
            "values": [{d: v[d] for d in DETECTORS} for v in self.values],
            "bits": {d: [int(b) for b in self.bits[d]] for d in DETECTORS},
            "errors": self.errors,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            values=[DetectorValues(**v) for v in data["values"]],
            bits={d: np.asarray(data["bits"][d], dtype=np.uint8) for d in DETECTORS},
            thresholds=Thresholds(**data["thresholds"]),
            errors=data.get("errors"),
        )


def decide(values, thr=DEFAULT_THRESHOLDS):
    """Bit decisions per detector: 1 strictly above threshold."""
    return {d: np.array([1 if v[d] > thr[d] else 0 for v in values], dtype=np.uint8)
            for d in DETECTORS}


def decode(ct, key, params=CipherParams(), thr=DEFAULT_THRESHOLDS, truth=None, sym=None):
    """Recover the bits of ``ct`` with every detector.

    ``truth`` (the sent bits) is optional; when given, the report carries a
    per-detector error count.
    """
    if ct.n_blocks and ct.block_len != params.block_len:
        raise CipherFormatError(
            f"block length {ct.block_len} does not match params.block_len={params.block_len}")
    e_blocks = key_stream_blocks(key, params, ct.n_blocks)
    values = block_values(ct.blocks, e_blocks, params.transient, sym)
    bits = decide(values, thr)
    errors = None
    if truth is not None:
        truth = _bits(truth)
        if truth.size != ct.n_blocks:
            raise ValueError("truth length differs from the number of blocks")
        errors = {d: int(np.sum(bits[d] != truth)) for d in DETECTORS}
    return DetectorReport(values=values, bits=bits, thresholds=thr, errors=errors)


def block_values(s_blocks, e_blocks, transient=0, sym=None):
    sym = sym or SymbolizationConfig()
    return [detect_all(e[transient:], s[transient:], sym) for s, e in zip(s_blocks, e_blocks)]


@dataclass(frozen=True)
class EnsembleStats:
    mean: DetectorValues
    std: DetectorValues
    size: int


@dataclass(frozen=True)
class Calibration:
    """Detector statistics over an ensemble of random single-bit messages.

    ``proposed`` is the standard deviation of each detector over the whole
    (mixed) ensemble; ``null`` and ``coupled`` summarize its m=0 and m=1
    members separately.
    """

    proposed: Thresholds
    mixed: EnsembleStats
    null: EnsembleStats
    coupled: EnsembleStats


def _stats(rows):
    arr = np.array([v.as_tuple() for v in rows]) if rows else np.full((0, 3), np.nan)
    with np.errstate(invalid="ignore"):
        mean = arr.mean(axis=0) if rows else np.full(3, np.nan)
        std = arr.std(axis=0) if rows else np.full(3, np.nan)
    return EnsembleStats(DetectorValues(*map(float, mean)), DetectorValues(*map(float, std)),
                         len(rows))


def simulate_pairs(bits, params=CipherParams(), random_state=None):
    """Independent single-bit transmissions, each with a fresh random key.

    Returns ``(s_blocks, e_blocks)`` as float arrays.
    """
    rng = np.random.default_rng(random_state)
    bits = _bits(bits)
    A, d = params.scaled
    L = params.block_len
    s_out = np.empty((bits.size, L))
    e_out = np.empty((bits.size, L))
    for i, m in enumerate(bits):
        e0 = np.uint64(rng.integers(1, SCALE))
        es, ss = _kernels.drive_blocks(e0, _random_s0(rng, 1), bits[i:i + 1], A, d, L)
        s_out[i] = from_grid(ss[0])
        e_out[i] = from_grid(es[0])
    return s_out, e_out


def calibrate_thresholds(params=CipherParams(), ensemble_size=1000, key_source=None,
                         p_one=0.5):
    """Ensemble statistics behind the decision thresholds.

    Each ensemble member is a one-bit message drawn with ``P(m=1) = p_one``
    under a random key and random starting state.
    """
    ensemble_size = check_count(ensemble_size, "ensemble_size", 100)
    rng = np.random.default_rng(key_source)
    bits = (rng.random(ensemble_size) < p_one).astype(np.uint8)
    s_blocks, e_blocks = simulate_pairs(bits, params, rng)
    values = block_values(s_blocks, e_blocks, params.transient)
    mixed = _stats(values)
    return Calibration(
        proposed=Thresholds(*(mixed.std[d] for d in ("te", "mi", "cc"))),
        mixed=mixed,
        null=_stats([v for v, m in zip(values, bits) if m == 0]),
        coupled=_stats([v for v, m in zip(values, bits) if m == 1]),
    )


class CouplingDecoder(ClassifierMixin, BaseEstimator):
    """Bit classifier over the consecutive blocks of one ciphertext.

    ``X`` is a ``(n_blocks, block_len)`` array whose row ``i`` is block ``i``
    of a message sent under ``key``.  With ``threshold_rule="std"``, ``fit``
    sets each threshold to the standard deviation of the detector over the
    labelled training blocks; ``"fixed"`` keeps ``thresholds`` as given.
    """

    def __init__(self, key, a=DEFAULT_A, delta=0.2, detector="cc", thresholds=None,
                 threshold_rule="fixed", transient=0):
        self.key = key
        self.a = a
        self.delta = delta
        self.detector = detector
        self.thresholds = thresholds
        self.threshold_rule = threshold_rule
        self.transient = transient

    def _params(self, X):
        return CipherParams(self.a, self.delta, X.shape[1], self.transient)

    def _values(self, X):
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2:
            raise ValueError("X must have shape (n_blocks, block_len)")
        params = self._params(X)
        e_blocks = key_stream_blocks(self.key, params, X.shape[0])
        return block_values(X, e_blocks, params.transient)

    def fit(self, X, y=None):
        if self.detector not in DETECTORS + ("majority",):
            raise ValueError(f"unknown detector {self.detector!r}")
        if self.threshold_rule == "std":
            if y is None:
                raise ValueError("threshold_rule='std' needs labelled blocks")
            values = self._values(X)
            self.thresholds_ = Thresholds(*(_stats(values).std[d] for d in ("te", "mi", "cc")))
        elif self.threshold_rule == "fixed":
            self.thresholds_ = self.thresholds or DEFAULT_THRESHOLDS
        else:
            raise ValueError(f"unknown threshold_rule {self.threshold_rule!r}")
        self.classes_ = np.array([0, 1])
        return self

    def decision_function(self, X):
        """Detector value minus threshold, one column set per block."""
        check_is_fitted(self)
        values = self._values(X)
        if self.detector == "majority":
            return np.array([sum(np.sign(v[d] - self.thresholds_[d]) for d in DETECTORS)
                             for v in values], dtype=np.float64)
        return np.array([v[self.detector] - self.thresholds_[self.detector] for v in values])

    def predict(self, X):
        return (self.decision_function(X) > 0).astype(np.uint8)
