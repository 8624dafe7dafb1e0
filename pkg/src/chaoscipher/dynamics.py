"""Truncated logistic-map dynamics and master-slave synchronization.

Every state lives on the grid ``k / 10**14``.  Iteration is carried out in
exact integer arithmetic, so the emitted orbits equal what an
arbitrary-precision evaluation of ``a*x*(1-x)`` followed by truncation to 14
decimals would produce, independent of platform floating-point details.
"""
from dataclasses import dataclass
from decimal import ROUND_DOWN, Decimal

import numpy as np

from chaoscipher import _kernels
from chaoscipher._kernels import SCALE
from chaoscipher._validation import (DegenerateInputError, check_count, check_unit_interval,
                                     scaled_decimal)
from chaoscipher.detectors import (SymbolizationConfig, correlation, mutual_information,
                                   transfer_entropy)

DEFAULT_A = 3.987986
_QUANTUM = Decimal(1).scaleb(-14)


@dataclass(frozen=True)
class MapParams:
    """Logistic map ``x -> a x (1 - x)`` with ``0 < a <= 4``."""

    a: float = DEFAULT_A

    def __post_init__(self):
        scaled_decimal(self.a, "a", 0, 4, lo_open=True)

    @property
    def scaled(self):
        return np.uint64(scaled_decimal(self.a, "a", 0, 4, lo_open=True))


@dataclass(frozen=True)
class CouplingConfig:
    delta: float

    def __post_init__(self):
        scaled_decimal(self.delta, "delta", 0, 1)

    @property
    def scaled(self):
        return np.uint64(scaled_decimal(self.delta, "delta", 0, 1))


def _as_params(p):
    return p if isinstance(p, MapParams) else MapParams(p)


def _as_coupling(c):
    return c if isinstance(c, CouplingConfig) else CouplingConfig(c)


def truncate14(x):
    """Truncate toward zero to 14 decimal places.

    Floats (and arrays) map to the largest grid value ``fl(k / 1e14)`` not
    exceeding ``|x|``, which makes the operation idempotent.  Strings and
    ``Decimal`` inputs are truncated exactly before conversion, so
    ``truncate14("0.99999999999999999")`` gives ``0.99999999999999`` while the
    float literal of the same digits is already ``1.0``.
    """
    if isinstance(x, (str, Decimal)):
        return float(Decimal(x).quantize(_QUANTUM, rounding=ROUND_DOWN))
    arr = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValueError("truncate14 requires finite input")
    mag = np.abs(arr)
    k = np.rint(mag * 1e14)
    k -= k / 1e14 > mag
    out = np.copysign(k / 1e14, arr)
    if np.ndim(x) == 0:
        return float(out)
    return out


def to_grid(x):
    """Grid indices ``k`` (uint64) of samples in [0, 1]."""
    arr = np.asarray(x, dtype=np.float64)
    check_unit_interval(arr)
    k = np.rint(arr * 1e14)
    k -= k / 1e14 > arr
    return k.astype(np.uint64)


def from_grid(k):
    return np.asarray(k, dtype=np.uint64) / float(SCALE)


def logistic_step(x, p=DEFAULT_A):
    """One truncated step ``truncate14(a x (1 - x))``."""
    p = _as_params(p)
    check_unit_interval(x)
    k = to_grid(x)
    return float(from_grid(_kernels.logistic_int(np.uint64(k), p.scaled)))


def iterate_free(x0, p=DEFAULT_A, n=1):
    """Orbit of length ``n + 1`` starting at ``truncate14(x0)``."""
    p = _as_params(p)
    n = check_count(n, "n", 1)
    check_unit_interval(x0)
    return from_grid(_kernels.free_orbit(np.uint64(to_grid(x0)), p.scaled, n))


def iterate_coupled(x0, y0, p=DEFAULT_A, c=0.0, n=1):
    """Master-slave pair ``y' = (1 - delta) f(y) + delta f(x)``.

    Returns ``(x, y)``, each of length ``n + 1``.
    """
    p = _as_params(p)
    c = _as_coupling(c)
    n = check_count(n, "n", 1)
    check_unit_interval(x0, "x0")
    check_unit_interval(y0, "y0")
    xs, ys = _kernels.coupled_orbit(
        np.uint64(to_grid(x0)), np.uint64(to_grid(y0)), p.scaled, c.scaled, n
    )
    return from_grid(xs), from_grid(ys)


@dataclass(frozen=True)
class SyncSweepRow:
    delta: float
    mean_abs_diff: float
    cc: float
    mi: float
    te: float


def random_state_on_grid(rng):
    """Uniform draw from the open grid (0, 1)."""
    return int(rng.integers(1, SCALE)) / SCALE


def sync_sweep(p=DEFAULT_A, deltas=(), series_len=11000, transient=1000,
               x0=None, y0=None, random_state=0, sym=None):
    """Master-slave coupling sweep: mean |x - y| and detectors per ``delta``.

    ``series_len`` counts all samples including the discarded ``transient``.
    Unless given, the two initial conditions are drawn once from
    ``random_state`` and reused for every ``delta``.  Detector values are
    measured on the post-transient segment with ``x`` as the source.
    """
    deltas = list(deltas)
    if not deltas:
        raise ValueError("deltas must not be empty")
    series_len = check_count(series_len, "series_len", 2)
    transient = check_count(transient, "transient", 0)
    if series_len <= transient + 2:
        raise ValueError("series_len must exceed transient by at least 3")
    rng = np.random.default_rng(random_state)
    if x0 is None:
        x0 = random_state_on_grid(rng)
    if y0 is None:
        y0 = random_state_on_grid(rng)
    sym = sym or SymbolizationConfig()

    rows = []
    for delta in deltas:
        x, y = iterate_coupled(x0, y0, p, delta, series_len - 1)
        x, y = x[transient:], y[transient:]
        diff = float(np.mean(np.abs(x - y)))
        try:
            cc = correlation(x, y)
        except DegenerateInputError:
            cc = float("nan")
        rows.append(SyncSweepRow(
            delta=float(delta),
            mean_abs_diff=diff,
            cc=cc,
            mi=mutual_information(x, y, sym),
            te=transfer_entropy(x, y, sym),
        ))
    return rows


def critical_coupling(rows, tol=1e-6):
    """Smallest swept delta whose mean |x - y| falls below ``tol``."""
    hits = [r.delta for r in rows if r.mean_abs_diff < tol]
    return min(hits) if hits else None
