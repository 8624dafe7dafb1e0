"""Input validation helpers shared across modules."""
from decimal import Decimal, InvalidOperation
from numbers import Integral

import numpy as np
from sklearn.utils.validation import check_array

from chaoscipher._kernels import PARAM_SCALE


class DegenerateInputError(ValueError):
    """A series carries no variation, so the requested statistic is undefined."""


def check_series(x, name="x", min_length=1):
    """Return ``x`` as a 1-D float64 array of finite samples."""
    arr = check_array(x, ensure_2d=False, dtype=np.float64, ensure_min_samples=0)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.shape[0] < min_length:
        raise ValueError(f"{name} needs at least {min_length} samples, got {arr.shape[0]}")
    return arr


def check_unit_interval(x, name="x"):
    arr = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ValueError(f"{name} must lie in [0, 1]")
    return x


def check_paired(x, y, min_length=2):
    x = check_series(x, "x", min_length)
    y = check_series(y, "y", min_length)
    if x.shape[0] != y.shape[0]:
        raise ValueError(f"series lengths differ: {x.shape[0]} != {y.shape[0]}")
    return x, y


def check_count(n, name, minimum=0):
    if isinstance(n, bool) or not isinstance(n, Integral):
        raise TypeError(f"{name} must be an integer, got {type(n).__name__}")
    if n < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {n}")
    return int(n)


def scaled_decimal(value, name, lo, hi, lo_open=False):
    """Return ``value * 10**7`` as an exact integer.

    ``value`` must have at most seven decimal places once written out in
    shortest round-trip form (``repr`` for floats).
    """
    try:
        if isinstance(value, (float, np.floating)):
            dec = Decimal(repr(float(value)))
        elif isinstance(value, np.integer):
            dec = Decimal(int(value))
        else:
            dec = Decimal(str(value))
    except InvalidOperation:
        raise ValueError(f"{name} is not a decimal number: {value!r}") from None
    if not dec.is_finite():
        raise ValueError(f"{name} must be finite")
    if dec < lo or dec > hi or (lo_open and dec == lo):
        bracket = "(" if lo_open else "["
        raise ValueError(f"{name}={value} outside {bracket}{lo}, {hi}]")
    scaled = dec * PARAM_SCALE
    if scaled != scaled.to_integral_value():
        raise ValueError(f"{name}={value} has more than 7 decimal places")
    return int(scaled)
