"""Exact fixed-point kernels for the truncated logistic map.

A state ``x`` on the 1e-14 grid is held as the integer ``k = x * 10**14``.
The bifurcation parameter and coupling strength are held as integers scaled
by ``10**7``.  With those scalings one truncated step is

    floor(A * k * (10**14 - k) / 10**21)

which is evaluated exactly with base-10**7 limbs so every intermediate fits
in an unsigned 64-bit word.
"""
import numba
import numpy as np

SCALE = 10**14
PARAM_SCALE = 10**7

_B = np.uint64(PARAM_SCALE)
_N = np.uint64(SCALE)
_ZERO = np.uint64(0)


@numba.njit(cache=True, inline="always")
def logistic_int(k, A):
    j = _N - k
    k1 = k // _B
    k0 = k - k1 * _B
    j1 = j // _B
    j0 = j - j1 * _B
    p0 = k0 * j0
    p1 = k1 * j0 + k0 * j1
    p2 = k1 * j1
    q = p0 // _B
    c0 = p0 - q * _B
    t = p1 + q
    q1 = t // _B
    c1 = t - q1 * _B
    t = p2 + q1
    c3 = t // _B
    c2 = t - c3 * _B
    # k*j = c3 c2 c1 c0 in base B; multiply by A and keep limbs >= B**3
    t = A * c0
    t = A * c1 + t // _B
    t = A * c2 + t // _B
    t = A * c3 + t // _B
    return t


@numba.njit(cache=True, inline="always")
def mix_int(fy, fx, d):
    """floor(((B - d) * fy + d * fx) / B) without overflow."""
    w = _B - d
    y1 = fy // _B
    y0 = fy - y1 * _B
    x1 = fx // _B
    x0 = fx - x1 * _B
    return w * y1 + d * x1 + (w * y0 + d * x0) // _B


@numba.njit(cache=True)
def free_orbit(k0, A, n):
    out = np.empty(n + 1, dtype=np.uint64)
    out[0] = k0
    k = k0
    for i in range(n):
        k = logistic_int(k, A)
        out[i + 1] = k
    return out


@numba.njit(cache=True)
def coupled_orbit(kx0, ky0, A, d, n):
    xs = np.empty(n + 1, dtype=np.uint64)
    ys = np.empty(n + 1, dtype=np.uint64)
    xs[0] = kx0
    ys[0] = ky0
    x = kx0
    y = ky0
    for i in range(n):
        fx = logistic_int(x, A)
        fy = logistic_int(y, A)
        x = fx
        y = mix_int(fy, fx, d)
        xs[i + 1] = x
        ys[i + 1] = y
    return xs, ys


@numba.njit(cache=True)
def drive_blocks(e0, s0s, bits, A, d, L):
    """Key stream runs on across blocks; each block restarts s from s0s[b]."""
    nb = bits.shape[0]
    es = np.empty((nb, L), dtype=np.uint64)
    ss = np.empty((nb, L), dtype=np.uint64)
    e = e0
    for b in range(nb):
        s = s0s[b]
        for i in range(L):
            es[b, i] = e
            ss[b, i] = s
            fe = logistic_int(e, A)
            fs = logistic_int(s, A)
            if bits[b] != 0:
                s = mix_int(fs, fe, d)
            else:
                s = fs
            e = fe
    return es, ss


@numba.njit(cache=True)
def key_blocks(e0, A, nb, L):
    es = np.empty((nb, L), dtype=np.uint64)
    e = e0
    for b in range(nb):
        for i in range(L):
            es[b, i] = e
            e = logistic_int(e, A)
    return es


@numba.njit(cache=True)
def screen_keys(lo, n, A, target, skip, chunk):
    """Prefix Pearson correlation of each key's stream against ``target``.

    Key ``lo + i`` is iterated ``skip`` steps, then its next ``len(target)``
    samples are correlated with ``target``.
    """
    P = target.shape[0]
    out = np.empty(n)
    tm = 0.0
    for i in range(P):
        tm += target[i]
    tm /= P
    tc = target - tm
    tv = 0.0
    for i in range(P):
        tv += tc[i] * tc[i]
    st = np.empty(chunk, dtype=np.uint64)
    se = np.empty(chunk)
    see = np.empty(chunk)
    sxe = np.empty(chunk)
    for c0 in range(0, n, chunk):
        m = min(chunk, n - c0)
        for j in range(m):
            st[j] = lo + np.uint64(c0 + j)
            se[j] = 0.0
            see[j] = 0.0
            sxe[j] = 0.0
        for i in range(skip):
            for j in range(m):
                st[j] = logistic_int(st[j], A)
        for i in range(P):
            ti = tc[i]
            for j in range(m):
                x = st[j] * 1e-14
                se[j] += x
                see[j] += x * x
                sxe[j] += x * ti
                st[j] = logistic_int(st[j], A)
        for j in range(m):
            ve = see[j] - se[j] * se[j] / P
            if ve > 0.0 and tv > 0.0:
                out[c0 + j] = sxe[j] / np.sqrt(ve * tv)
            else:
                out[c0 + j] = 0.0
    return out
