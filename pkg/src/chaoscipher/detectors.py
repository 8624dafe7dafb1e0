"""Coupling detectors: Pearson correlation, mutual information, transfer entropy.

Probabilities are plug-in histogram estimates over a symbolization of each
series.  The default partition is a single fixed edge at 0.5, the critical
point of the logistic map.  Mutual information is reported in nats and
transfer entropy in bits; both bases can be overridden per call.
"""
from dataclasses import astuple, dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from chaoscipher._validation import DegenerateInputError, check_paired, check_series

PARTITION_RULES = ("fixed-edges", "median-split")
DETECTORS = ("te", "mi", "cc")
MI_BASE = np.e
TE_BASE = 2.0


@dataclass(frozen=True)
class SymbolizationConfig:
    """Partition of sample values into ``bin_count`` cells.

    ``fixed-edges`` splits [0, 1] into equal-width cells unless explicit
    interior ``edges`` are supplied; ``median-split`` places the cuts at the
    empirical quantiles of each series, giving near-equiprobable cells.
    """

    bin_count: int = 2
    partition_rule: str = "fixed-edges"
    edges: tuple = None

    def __post_init__(self):
        if self.bin_count < 2:
            raise ValueError("bin_count must be >= 2")
        if self.partition_rule not in PARTITION_RULES:
            raise ValueError(f"partition_rule must be one of {PARTITION_RULES}")
        if self.edges is not None:
            if self.partition_rule != "fixed-edges":
                raise ValueError("explicit edges only apply to fixed-edges")
            if len(self.edges) != self.bin_count - 1 or list(self.edges) != sorted(self.edges):
                raise ValueError("edges must be bin_count - 1 ascending cut points")

    def interior_edges(self):
        if self.edges is not None:
            return np.asarray(self.edges, dtype=np.float64)
        return np.arange(1, self.bin_count) / self.bin_count


@dataclass(frozen=True)
class DetectorValues:
    cc: float
    mi: float
    te: float

    def __getitem__(self, name):
        return getattr(self, name)

    def as_tuple(self):
        return astuple(self)


def correlation(x, y):
    """Pearson product-moment correlation."""
    x, y = check_paired(x, y, min_length=2)
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise DegenerateInputError("correlation undefined for a constant series")
    return float(float(dx @ dy) / np.sqrt(sxx * syy))


def symbolize(x, cfg=None):
    """Map each sample to a cell index in ``[0, bin_count)``.

    A sample sitting exactly on a cut goes to the upper cell.
    """
    cfg = cfg or SymbolizationConfig()
    x = check_series(x, min_length=cfg.bin_count)
    if cfg.partition_rule == "median-split":
        if np.all(x == x[0]):
            raise DegenerateInputError("cannot median-split a constant series")
        cuts = np.quantile(x, np.arange(1, cfg.bin_count) / cfg.bin_count)
    else:
        cuts = cfg.interior_edges()
    return np.searchsorted(cuts, x, side="right").astype(np.intp)


def _batched_counts(index, n_cells):
    """Histogram of ``index`` along the last axis, batched over the rest."""
    index = np.asarray(index)
    lead = index.shape[:-1]
    flat = index.reshape(-1, index.shape[-1])
    offsets = (np.arange(flat.shape[0]) * n_cells)[:, None]
    counts = np.bincount((flat + offsets).ravel(), minlength=flat.shape[0] * n_cells)
    return counts.reshape(lead + (n_cells,))


def _plogp_ratio(p, num, den):
    """Sum of p * log(num / den) over cells with p > 0 (last axes summed)."""
    safe = p > 0
    ratio = np.where(safe, num, 1.0) / np.where(safe, den, 1.0)
    return np.where(safe, p * np.log(ratio), 0.0)


def mi_from_symbols(a, b, n_symbols=2, base=MI_BASE, clamp=True):
    """Plug-in mutual information between symbol arrays (batched on leading axes)."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError("symbol arrays must share a shape")
    n = a.shape[-1]
    counts = _batched_counts(a * n_symbols + b, n_symbols * n_symbols)
    p = counts.reshape(counts.shape[:-1] + (n_symbols, n_symbols)) / n
    pa = p.sum(axis=-1, keepdims=True)
    pb = p.sum(axis=-2, keepdims=True)
    mi = _plogp_ratio(p, p, pa * pb).sum(axis=(-2, -1)) / np.log(base)
    return np.maximum(mi, 0.0) if clamp else mi


def te_from_symbols(src, dst, n_symbols=2, base=TE_BASE, clamp=True):
    """Plug-in transfer entropy ``src -> dst`` with history length one."""
    src = np.asarray(src)
    dst = np.asarray(dst)
    if src.shape != dst.shape:
        raise ValueError("symbol arrays must share a shape")
    if src.shape[-1] < 2:
        raise ValueError("transfer entropy needs at least 2 samples")
    ns = n_symbols
    y1 = dst[..., 1:]
    y0 = dst[..., :-1]
    x0 = src[..., :-1]
    counts = _batched_counts((y1 * ns + y0) * ns + x0, ns**3)
    p = counts.reshape(counts.shape[:-1] + (ns, ns, ns)) / y1.shape[-1]
    p_y0x0 = p.sum(axis=-3, keepdims=True)
    p_y1y0 = p.sum(axis=-1, keepdims=True)
    p_y0 = p.sum(axis=(-3, -1), keepdims=True)
    te = _plogp_ratio(p, p * p_y0, p_y0x0 * p_y1y0).sum(axis=(-3, -2, -1)) / np.log(base)
    return np.maximum(te, 0.0) if clamp else te


def mutual_information(x, y, cfg=None, base=MI_BASE):
    cfg = cfg or SymbolizationConfig()
    x, y = check_paired(x, y, min_length=1)
    return float(mi_from_symbols(symbolize(x, cfg), symbolize(y, cfg), cfg.bin_count, base))


def transfer_entropy(source, dest, cfg=None, base=TE_BASE):
    """Information flow from ``source`` into ``dest``; bits by default."""
    cfg = cfg or SymbolizationConfig()
    source, dest = check_paired(source, dest, min_length=2)
    return float(te_from_symbols(symbolize(source, cfg), symbolize(dest, cfg),
                                 cfg.bin_count, base))


def detect_all(x, y, cfg=None):
    """All three detectors on one pair; ``x`` is the transfer-entropy source."""
    cfg = cfg or SymbolizationConfig()
    x, y = check_paired(x, y, min_length=2)
    values = {}
    for name, fn in (("cc", lambda: correlation(x, y)),
                     ("mi", lambda: mutual_information(x, y, cfg)),
                     ("te", lambda: transfer_entropy(x, y, cfg))):
        try:
            values[name] = fn()
        except ValueError as exc:
            raise type(exc)(f"{name}: {exc}") from exc
    return DetectorValues(**values)


class CouplingFeatures(TransformerMixin, BaseEstimator):
    """Turn stacked series pairs into ``[cc, mi, te]`` feature rows.

    ``X`` has shape ``(n_pairs, 2, n_samples)``; ``X[:, 0]`` is the driver
    (transfer-entropy source) and ``X[:, 1]`` the response.
    """

    def __init__(self, bin_count=2, partition_rule="fixed-edges"):
        self.bin_count = bin_count
        self.partition_rule = partition_rule

    def fit(self, X, y=None):
        self._check(X)
        self.n_features_in_ = 3
        return self

    def transform(self, X):
        X = self._check(X)
        cfg = SymbolizationConfig(self.bin_count, self.partition_rule)
        return np.array([detect_all(pair[0], pair[1], cfg).as_tuple() for pair in X])

    def get_feature_names_out(self, input_features=None):
        return np.array(["cc", "mi", "te"], dtype=object)

    @staticmethod
    def _check(X):
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 3 or X.shape[1] != 2:
            raise ValueError(f"expected shape (n_pairs, 2, n_samples), got {X.shape}")
        return X
