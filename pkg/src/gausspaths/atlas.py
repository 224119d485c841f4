"""Limit paths attached to a signature and their certified evaluation.

For a signature eps at level Z the limit path is

    G#(t) = t + sum_n eps_n g_n(t),   g_n(t) = (e((n+1)t) - 1) / (2 pi i (n+1)),

summed over n != -1, 0 whose prime factors all lie in the support of eps,
with both signs of n.  The series is cut at |n| <= B where B is the smallest
power of two whose tail bound meets the requested tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._fourier import direct_sum, fold_grid
from .arith import EpsilonSignature, enumerate_signatures, smooth_numbers
from .paths import PathSample

MAX_CUTOFF = 1 << 53
DEFAULT_TOL = 1e-4


@dataclass(frozen=True)
class LimitSeries:
    """Truncated series: frequencies n+1, coefficients eps_n/(2 pi i (n+1)), and the tail bound."""

    sig: EpsilonSignature
    cutoff: int
    tolerance: float
    tail_bound: float
    freqs: np.ndarray
    coefs: np.ndarray

    @property
    def n_terms(self) -> int:
        return int(self.freqs.size)


def euler_factor(primes) -> float:
    """sum of 1/k over k composed of the given primes."""
    return math.prod(1.0 / (1.0 - 1.0 / p) for p in primes)


def tail_bound(primes, cutoff: int, smooth: list[int] | None = None) -> float:
    """Bound on sum_{|n| > cutoff} |g_n(t)| over smooth n of both signs, uniformly in t.

    |g_n| <= 1/(pi |n+1|); pairing n = k and n = -k gives 2k/(pi (k^2 - 1)),
    which is at most (2/pi) (B+1)^2/((B+1)^2 - 1) / k for k > B.
    """
    if smooth is None:
        smooth = smooth_numbers(primes, cutoff)
    E = euler_factor(primes)
    head = math.fsum(1.0 / k for k in smooth if k <= cutoff)
    rest = max(E - head, 0.0) + 4e-16 * E
    b1 = (cutoff + 1) ** 2
    return 2.0 / math.pi * b1 / (b1 - 1) * rest


def choose_cutoff(primes, tol: float) -> tuple[int, float, list[int]]:
    """Smallest B = 2^k with tail_bound(B) <= tol, with the smooth numbers up to B."""
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    E = euler_factor(primes)
    cap = 1 << 16
    while True:
        smooth = smooth_numbers(primes, cap)
        inv = np.array([1.0 / k for k in smooth])
        csum = np.cumsum(inv)
        for k in range(1, cap.bit_length()):
            B = 1 << k
            if B > cap:
                break
            head = csum[np.searchsorted(smooth, B, side="right") - 1]
            b1 = (B + 1) ** 2
            approx = 2.0 / math.pi * b1 / (b1 - 1) * (max(E - head, 0.0) + 4e-16 * E)
            if approx <= tol:
                keep = smooth[: np.searchsorted(smooth, B, side="right")]
                return B, tail_bound(primes, B, keep), keep
        if cap >= MAX_CUTOFF:
            raise ValueError(f"tolerance {tol} needs a cutoff beyond 2^53")
        cap = min(cap << 8, MAX_CUTOFF)


@lru_cache(maxsize=64)
def limit_series(sig: EpsilonSignature, tol: float = DEFAULT_TOL) -> LimitSeries:
    primes = sig.support
    B, bound, smooth = choose_cutoff(primes, tol)
    k = np.array(smooth, dtype=np.int64)
    eps = np.array([sig.eps_of(int(v)) for v in smooth], dtype=np.float64)
    # n = +k (k >= 1) and n = -k (k >= 2); n = -1 is the drift t
    freqs = np.concatenate([k + 1, 1 - k[1:]])
    signs = np.concatenate([eps, eps[1:]])
    coefs = signs / (2j * np.pi * freqs)
    return LimitSeries(sig, B, tol, bound, freqs, coefs)


def gsharp_eval(sig: EpsilonSignature, t: float, tol: float = DEFAULT_TOL) -> complex:
    """Limit path at a single t in [0, 1], accurate to the tail bound."""
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t = {t} outside [0, 1]")
    s = limit_series(sig, tol)
    return direct_sum(s.freqs, s.coefs, t) + t


def gsharp_grid(sig: EpsilonSignature, R: int, tol: float = DEFAULT_TOL) -> PathSample:
    """Limit path at t = i/R for i = 0..R."""
    s = limit_series(sig, tol)
    values = fold_grid(s.freqs, s.coefs, R) + np.arange(R + 1) / R
    return PathSample(
        R,
        values,
        label=str(sig),
        meta={"cutoff": s.cutoff, "tail_bound": s.tail_bound, "tolerance": tol, "terms": s.n_terms},
    )


def gsharp_increment(sig: EpsilonSignature, a: int, q: int, h: float, tol: float = DEFAULT_TOL) -> complex:
    """G#(a/q + h) - G#(a/q), using exact residues for the base point."""
    s = limit_series(sig, tol)
    f = s.freqs
    base = np.exp(2j * np.pi * (np.mod(f, q) * (a % q) % q) / q)
    y = np.mod(f.astype(np.float64) * h, 2.0)
    step = 2j * np.sin(np.pi * y) * np.exp(1j * np.pi * y)
    return complex(np.sum(s.coefs * base * step)) + h


def local_slope_probe(
    sig: EpsilonSignature, a: int, q: int, offsets, tol: float = 1e-7
) -> np.ndarray:
    """(G#(t0+h) - G#(t0)) / (e(t0) h L^{|P|-1}) with t0 = a/q and L = |log |h||."""
    n = len(sig.support)
    e0 = np.exp(2j * np.pi * (a % q) / q)
    out = []
    for h in offsets:
        h = float(h)
        if h == 0 or abs(h) >= 1:
            raise ValueError("offsets must satisfy 0 < |h| < 1")
        ell = abs(math.log(abs(h)))
        out.append(gsharp_increment(sig, a, q, h, tol) / (e0 * h * ell ** (n - 1)))
    return np.array(out)


def atlas(Z: int, R: int = 512, tol: float = DEFAULT_TOL) -> list[tuple[EpsilonSignature, PathSample]]:
    """Limit path on the grid for every signature at level Z, in lexicographic order."""
    return [(sig, gsharp_grid(sig, R, tol)) for sig in enumerate_signatures(Z)]


def signature_count(Z: int) -> int:
    from .arith import primes_up_to

    return 2 * 3 ** (len(primes_up_to(Z)) - 1)
