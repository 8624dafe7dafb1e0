"""Reference ciphers: one-time pad, toy RSA and Baptista's chaotic cipher."""
import math
import string
from dataclasses import dataclass, field

import numpy as np

from chaoscipher import _kernels
from chaoscipher.dynamics import MapParams, to_grid


class AlphabetTable:
    """Symbols with 1-based codes; the default is A=1 ... Z=26."""

    def __init__(self, symbols=string.ascii_uppercase):
        symbols = list(symbols)
        if len(set(symbols)) != len(symbols) or not symbols:
            raise ValueError("alphabet symbols must be unique and non-empty")
        self.symbols = symbols
        self._codes = {s: i + 1 for i, s in enumerate(symbols)}

    def __len__(self):
        return len(self.symbols)

    def code(self, symbol):
        try:
            return self._codes[symbol]
        except KeyError:
            raise ValueError(f"symbol {symbol!r} not in alphabet") from None

    def symbol(self, code):
        return self.symbols[code - 1]

    def wrap(self, value):
        """Reduce into [1, N]; a residue of 0 maps to N."""
        return (value - 1) % len(self) + 1


ENGLISH = AlphabetTable()


def _otp(text, key, tbl, sign):
    if len(text) != len(key):
        raise ValueError(f"message and key lengths differ ({len(text)} != {len(key)})")
    return "".join(tbl.symbol(tbl.wrap(tbl.code(m) + sign * tbl.code(k)))
                   for m, k in zip(text, key))


def otp_encrypt(m, k, tbl=ENGLISH):
    """Position-wise code addition modulo the table size."""
    return _otp(m, k, tbl, +1)


def otp_decrypt(c, k, tbl=ENGLISH):
    return _otp(c, k, tbl, -1)


# --- RSA -------------------------------------------------------------------

class InvalidExponentError(ValueError):
    pass


def is_prime(n):
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def mod_inverse(a, m):
    """Inverse of ``a`` modulo ``m`` by the extended Euclidean algorithm."""
    old_r, r = a % m, m
    old_s, s = 1, 0
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
    if old_r != 1:
        raise InvalidExponentError(f"{a} has no inverse modulo {m}")
    return old_s % m


def mod_pow(base, exp, mod):
    """Left-to-right square-and-multiply."""
    result = 1 % mod
    base %= mod
    for bit in bin(exp)[2:]:
        result = result * result % mod
        if bit == "1":
            result = result * base % mod
    return result


@dataclass(frozen=True)
class RsaKeyPair:
    n: int
    e: int
    d: int
    p: int = field(default=None, repr=False)
    q: int = field(default=None, repr=False)

    @property
    def public(self):
        return (self.e, self.n)

    @property
    def private(self):
        return (self.d, self.n)


def rsa_keygen(p, q, d):
    """Key pair from primes ``p``, ``q`` and a private exponent ``d``."""
    for name, v in (("p", p), ("q", q)):
        if not is_prime(v):
            raise ValueError(f"{name}={v} is not prime")
    if p == q:
        raise ValueError("p and q must be distinct")
    phi = (p - 1) * (q - 1)
    if math.gcd(d, phi) != 1:
        raise InvalidExponentError(f"gcd({d}, {phi}) = {math.gcd(d, phi)} != 1")
    return RsaKeyPair(n=p * q, e=mod_inverse(d, phi), d=d, p=p, q=q)


def _rsa_apply(m, key):
    exp, n = key
    if not 0 <= m < n:
        raise ValueError(f"block {m} outside [0, {n - 1}]")
    return mod_pow(m, exp, n)


def rsa_encrypt(m, key):
    """``key`` is the public pair ``(e, n)``."""
    return _rsa_apply(m, key)


def rsa_decrypt(c, key):
    """``key`` is the private pair ``(d, n)``."""
    return _rsa_apply(c, key)


# --- Baptista ----------------------------------------------------------------

class BaptistaError(ValueError):
    pass


@dataclass(frozen=True)
class BaptistaConfig:
    """Orbit, alphabet order and transient handling for Baptista's cipher.

    With ``skip_per_letter`` (the default) each letter's count includes a
    fresh ``transient`` skip, so every count exceeds ``transient``.  Otherwise
    the transient is skipped once before the first letter and counts start
    at 1.  Bin extremes come from ``reference_len`` post-transient samples.
    """

    a: float = 3.987986
    x0: float = 0.01010101010101
    transient: int = 250
    ordering: str = string.ascii_uppercase
    skip_per_letter: bool = True
    reference_len: int = 100_000
    max_iterations: int = 1_000_000

    def __post_init__(self):
        if sorted(self.ordering) != sorted(set(self.ordering)) or len(self.ordering) != 26:
            raise ValueError("ordering must be a permutation of 26 letters")


class _Orbit:
    """Lazily extended orbit on the integer grid."""

    def __init__(self, cfg):
        self._A = MapParams(cfg.a).scaled
        self.points = _kernels.free_orbit(to_grid(cfg.x0), self._A,
                                          cfg.transient + cfg.reference_len)

    def __getitem__(self, i):
        while i >= self.points.size:
            more = _kernels.free_orbit(self.points[-1], self._A, self.points.size)
            self.points = np.concatenate([self.points, more[1:]])
        return self.points[i]


class _Bins:
    """26 equal cells over [x_min, x_max], in grid units; the last is closed."""

    def __init__(self, lo, hi):
        self.lo = lo
        self.span = hi - lo
        self.eps = self.span / 26.0

    def __call__(self, k):
        offset = int(k) - self.lo
        if offset < 0 or offset > self.span:
            return -1
        return min(int(offset / self.eps), 25)


def baptista_bins(cfg):
    """Bin lookup and orbit, rebuilt identically by sender and receiver."""
    orbit = _Orbit(cfg)
    ref = orbit.points[cfg.transient:]
    return _Bins(int(ref.min()), int(ref.max())), orbit


def _positions(cfg):
    return {c: i for i, c in enumerate(cfg.ordering)}


def baptista_encrypt(message, cfg=BaptistaConfig()):
    """Iteration counts that land the orbit in each letter's bin."""
    bin_of, orbit = baptista_bins(cfg)
    pos = _positions(cfg)
    counts = []
    start = 0 if cfg.skip_per_letter else cfg.transient
    first = cfg.transient + 1 if cfg.skip_per_letter else 1
    for ch in message.upper():
        if ch not in pos:
            raise ValueError(f"letter {ch!r} not in the alphabet")
        target = pos[ch]
        n = first
        while bin_of(orbit[start + n]) != target:
            n += 1
            if n > cfg.max_iterations:
                raise BaptistaError(f"bin for {ch!r} not reached within {cfg.max_iterations}")
        counts.append(n)
        start += n
    return counts


def baptista_decrypt(counts, cfg=BaptistaConfig()):
    bin_of, orbit = baptista_bins(cfg)
    start = 0 if cfg.skip_per_letter else cfg.transient
    out = []
    for n in counts:
        if n < 1:
            raise BaptistaError("iteration counts must be positive")
        start += int(n)
        idx = bin_of(orbit[start])
        if idx < 0:
            raise BaptistaError(f"state at iteration {start} lies outside the alphabet bins")
        out.append(cfg.ordering[idx])
    return "".join(out)
