"""Polygonal paths traced by partial sums of the normalised quadratic Gauss sum.

For a modulus c in the family, g_j = c^{-1/2} sum_{m <= j} (m/c) e(m/c) for
0 <= j < c, and G(.; c) is the polygon through the nodes (j/(c-1), g_j).

The inner loop is compiled with numba.  The Jacobi symbol (m/c) is read off
per-prime Legendre tables (c is squarefree) and e(m/c) is advanced by a unit
rotation that is re-anchored to the exact value every 2**16 steps.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

import numba
import numpy as np
from numba import njit, prange

from .arith import is_squarefree

REANCHOR = 1 << 16
WORKERS_ENV = "GAUSSPATHS_WORKERS"


def configure_workers() -> int:
    """Apply the worker count from $GAUSSPATHS_WORKERS (default: all cores)."""
    raw = os.environ.get(WORKERS_ENV)
    n = numba.config.NUMBA_NUM_THREADS
    if raw:
        n = max(1, min(int(raw), numba.config.NUMBA_NUM_THREADS))
    numba.set_num_threads(n)
    return n


@dataclass
class PathSample:
    """A path sampled at t = i/R for i = 0..R."""

    grid: int
    values: np.ndarray
    c: int | None = None
    label: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.complex128)
        if self.values.shape != (self.grid + 1,):
            raise ValueError(f"expected {self.grid + 1} values, got {self.values.shape}")

    @property
    def t(self) -> np.ndarray:
        return np.arange(self.grid + 1) / self.grid


# ---------------------------------------------------------------- kernels


@njit(cache=True)
def _odd_prime_factors(c):
    out = np.zeros(20, dtype=np.int64)
    k = 0
    n = c
    p = 3
    while p * p <= n:
        if n % p == 0:
            out[k] = p
            k += 1
            while n % p == 0:
                n //= p
        p += 2
    if n > 1:
        out[k] = n
        k += 1
    return out[:k]


@njit(cache=True)
def _walk(c, idx, kahan):
    """Partial sums sum_{m <= idx[k]} (m/c) e(m/c) for a sorted index array."""
    primes = _odd_prime_factors(c)
    nf = primes.size
    offs = np.zeros(nf + 1, dtype=np.int64)
    for i in range(nf):
        offs[i + 1] = offs[i] + primes[i]
    tab = np.empty(offs[nf], dtype=np.int8)
    for i in range(nf):
        p = primes[i]
        o = offs[i]
        tab[o] = 0
        for r in range(1, p):
            tab[o + r] = -1
        for x in range(1, (p - 1) // 2 + 1):
            tab[o + (x * x) % p] = 1
    res = np.zeros(nf, dtype=np.int64)

    out = np.zeros(idx.size, dtype=np.complex128)
    k = 0
    while k < idx.size and idx[k] == 0:
        k += 1
    top = idx[idx.size - 1] if idx.size else 0
    step = 2.0 * np.pi / c
    w = complex(np.cos(step), np.sin(step))
    z = complex(1.0, 0.0)
    sr = 0.0
    si = 0.0
    cr = 0.0
    ci = 0.0
    for m in range(1, top + 1):
        if m % REANCHOR == 0:
            ang = step * m
            z = complex(np.cos(ang), np.sin(ang))
        else:
            z = z * w
        chi = 1
        for i in range(nf):
            r = res[i] + 1
            if r == primes[i]:
                r = 0
            res[i] = r
            chi *= tab[offs[i] + r]
        if chi != 0:
            xr = chi * z.real
            xi = chi * z.imag
            if kahan:
                y = xr - cr
                t = sr + y
                cr = (t - sr) - y
                sr = t
                y = xi - ci
                t = si + y
                ci = (t - si) - y
                si = t
            else:
                sr += xr
                si += xi
        while k < idx.size and idx[k] == m:
            out[k] = complex(sr, si)
            k += 1
    return out


@njit(cache=True, parallel=True)
def _walk_many(cs, idx_flat, offsets, kahan):
    out = np.zeros(idx_flat.size, dtype=np.complex128)
    for n in prange(cs.size):
        lo = offsets[n]
        hi = offsets[n + 1]
        out[lo:hi] = _walk(cs[n], idx_flat[lo:hi], kahan)
    return out


# ---------------------------------------------------------------- helpers


def _check_modulus(c: int) -> int:
    c = int(c)
    if c < 5 or c % 4 != 1 or not is_squarefree(c):
        raise ValueError(f"{c} is not a squarefree modulus = 1 mod 4 (c >= 5)")
    return c


def _split_position(c: int, t) -> tuple[int, float]:
    """Node index j and interpolation weight for t in [0, 1]."""
    if isinstance(t, Rational):
        t = Fraction(t)
        if not 0 <= t <= 1:
            raise ValueError(f"t = {t} outside [0, 1]")
        x = t * (c - 1)
        j = math.floor(x)
        return j, float(x - j)
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t = {t} outside [0, 1]")
    x = t * (c - 1)
    j = min(int(math.floor(x)), c - 1)
    return j, x - j


def _grid_nodes(c: int, R: int) -> tuple[np.ndarray, np.ndarray]:
    i = np.arange(R + 1, dtype=np.int64)
    num = i * (c - 1)
    return num // R, (num % R) / R


def _interp(c, j, frac, lookup):
    lo = lookup(j)
    hi = lookup(np.minimum(j + 1, c - 1))
    return (1.0 - frac) * lo + frac * hi


def _partial_sums_at(c: int, needed: np.ndarray, kahan: bool = False) -> dict[int, complex]:
    idx = np.unique(np.asarray(needed, dtype=np.int64))
    sums = _walk(c, idx, kahan) / math.sqrt(c)
    return dict(zip(idx.tolist(), sums.tolist()))


# ---------------------------------------------------------------- public API


def gauss_path(c: int, kahan: bool = False) -> np.ndarray:
    """All nodes g_0, ..., g_{c-1} of the path."""
    c = _check_modulus(c)
    return _walk(c, np.arange(c, dtype=np.int64), kahan) / math.sqrt(c)


def path_eval(c: int, t, kahan: bool = False) -> complex:
    """G(t; c) by linear interpolation between consecutive nodes.

    Rational t (``fractions.Fraction``) is handled exactly.
    """
    c = _check_modulus(c)
    j, frac = _split_position(c, t)
    nodes = [j] if frac == 0 else [j, j + 1]
    sums = _partial_sums_at(c, np.array(nodes), kahan)
    if frac == 0:
        return sums[j]
    return (1.0 - frac) * sums[j] + frac * sums[j + 1]


def path_grid(c: int, R: int, kahan: bool = False) -> PathSample:
    """G(i/R; c) for i = 0..R in a single pass over the sum."""
    c = _check_modulus(c)
    if R < 1:
        raise ValueError("grid must be positive")
    j, frac = _grid_nodes(c, R)
    idx = np.unique(np.concatenate([j, np.minimum(j + 1, c - 1)]))
    sums = _walk(c, idx, kahan) / math.sqrt(c)
    pos = np.searchsorted(idx, j)
    pos_hi = np.searchsorted(idx, np.minimum(j + 1, c - 1))
    values = (1.0 - frac) * sums[pos] + frac * sums[pos_hi]
    return PathSample(R, values, c=c, label=f"c={c}")


def tilde_path_eval(c: int, t) -> complex:
    """Sharp-cutoff path c^{-1/2} sum_{x <= floor((c-1)t)} (x/c) e(x/c).

    For float t the floor snaps to the nearest integer when (c-1)t lies within
    1e-9 of it, so that t = j/(c-1) computed in floating point selects node j.
    """
    c = _check_modulus(c)
    if isinstance(t, Rational):
        j = math.floor(Fraction(t) * (c - 1))
    else:
        x = float(t) * (c - 1)
        r = round(x)
        j = r if abs(x - r) <= 1e-9 * max(1.0, x) else math.floor(x)
    if not 0 <= j <= c - 1:
        raise ValueError(f"t = {t} outside [0, 1]")
    return _partial_sums_at(c, np.array([j]))[j]


def family_values(cs: np.ndarray, ts: np.ndarray, kahan: bool = False) -> np.ndarray:
    """G(t; c) for every c in ``cs`` and every t in ``ts``; shape (len(cs), len(ts)).

    Moduli are processed in parallel (see :func:`configure_workers`); each row
    depends only on its own modulus so the result does not depend on the
    thread count.
    """
    cs = np.asarray(cs, dtype=np.int64)
    ts = np.asarray(ts, dtype=np.float64)
    if cs.size == 0:
        return np.zeros((0, ts.size), dtype=np.complex128)
    if np.any(ts < 0) or np.any(ts > 1):
        raise ValueError("t values must lie in [0, 1]")
    x = np.outer(cs - 1, ts)
    j = np.minimum(np.floor(x).astype(np.int64), (cs - 1)[:, None])
    frac = x - j
    hi = np.minimum(j + 1, (cs - 1)[:, None])
    per_c = []
    for row in range(cs.size):
        per_c.append(np.unique(np.concatenate([j[row], hi[row]])))
    offsets = np.zeros(cs.size + 1, dtype=np.int64)
    offsets[1:] = np.cumsum([a.size for a in per_c])
    flat = np.concatenate(per_c)
    configure_workers()
    sums = _walk_many(cs, flat, offsets, kahan)
    out = np.empty((cs.size, ts.size), dtype=np.complex128)
    for row in range(cs.size):
        idx = flat[offsets[row] : offsets[row + 1]]
        s = sums[offsets[row] : offsets[row + 1]] / math.sqrt(cs[row])
        lo = s[np.searchsorted(idx, j[row])]
        up = s[np.searchsorted(idx, hi[row])]
        out[row] = (1.0 - frac[row]) * lo + frac[row] * up
    return out


def family_grids(cs: np.ndarray, R: int) -> np.ndarray:
    """Grid samples G(i/R; c) for each c; shape (len(cs), R + 1)."""
    cs = np.asarray(cs, dtype=np.int64)
    per_c, fracs, js = [], [], []
    for c in cs:
        j, frac = _grid_nodes(int(c), R)
        per_c.append(np.unique(np.concatenate([j, np.minimum(j + 1, c - 1)])))
        js.append(j)
        fracs.append(frac)
    offsets = np.zeros(cs.size + 1, dtype=np.int64)
    offsets[1:] = np.cumsum([a.size for a in per_c])
    flat = np.concatenate(per_c) if per_c else np.zeros(0, dtype=np.int64)
    configure_workers()
    sums = _walk_many(cs, flat, offsets, False)
    out = np.empty((cs.size, R + 1), dtype=np.complex128)
    for row, c in enumerate(cs):
        idx = flat[offsets[row] : offsets[row + 1]]
        s = sums[offsets[row] : offsets[row + 1]] / math.sqrt(c)
        j = js[row]
        lo = s[np.searchsorted(idx, j)]
        up = s[np.searchsorted(idx, np.minimum(j + 1, c - 1))]
        out[row] = (1.0 - fracs[row]) * lo + fracs[row] * up
    return out


def sup_distance(a: PathSample, b: PathSample) -> float:
    """max_i |a(t_i) - b(t_i)| over a shared grid."""
    if a.grid != b.grid:
        raise ValueError(f"grid mismatch: {a.grid} vs {b.grid}")
    return float(np.max(np.abs(a.values - b.values)))


# ---------------------------------------------------------------- completion


def gauss_sum_table(c: int) -> np.ndarray:
    """Unnormalised sums sum_{x mod c} (x/c) e(n x / c) for n = 0..c-1, by direct summation."""
    from .arith import jacobi_array

    x = np.arange(c, dtype=np.int64)
    chi = jacobi_array(x, np.full(c, c, dtype=np.int64)).astype(np.float64)
    n = np.arange(c, dtype=np.int64)
    phase = np.outer(n, x) % c
    return np.exp(2j * np.pi * phase / c) @ chi


def completed_tilde(c: int, t) -> complex:
    """Sharp-cutoff path via completion: c^{-3/2} sum_h G(1-h, c) sum_{x <= j} e(hx/c).

    Shares no code with the partial-sum walk; used to cross-check it.
    """
    c = _check_modulus(c)
    if isinstance(t, Rational):
        j = math.floor(Fraction(t) * (c - 1))
    else:
        x = float(t) * (c - 1)
        r = round(x)
        j = r if abs(x - r) <= 1e-9 * max(1.0, x) else math.floor(x)
    G = gauss_sum_table(c)
    h = np.arange(c, dtype=np.int64)
    weights = G[(1 - h) % c]
    xs = np.arange(1, j + 1, dtype=np.int64)
    inner = np.exp(2j * np.pi * (np.outer(h, xs) % c) / c).sum(axis=1) if j else np.zeros(c)
    return complex(np.sum(weights * inner) / c**1.5)
