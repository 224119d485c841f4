"""Evaluation of sums  sum_f a_f (e(f t) - 1)  on the grid t = i/R."""

from __future__ import annotations

import numpy as np


def fold_grid(freqs: np.ndarray, coefs: np.ndarray, R: int) -> np.ndarray:
    """Values at t = i/R, i = 0..R, of sum_f a_f (e(f t) - 1).

    On the grid e(f i/R) only depends on f mod R, so the coefficients are
    folded into R bins and a single inverse FFT does the rest.  Every term
    vanishes identically at t = 0 and t = 1, and those two nodes are set to 0.
    """
    freqs = np.asarray(freqs, dtype=np.int64)
    coefs = np.asarray(coefs, dtype=np.complex128)
    bins = np.zeros(R, dtype=np.complex128)
    np.add.at(bins, np.mod(freqs, R), coefs)
    out = np.empty(R + 1, dtype=np.complex128)
    out[:R] = np.fft.ifft(bins) * R - coefs.sum()
    out[0] = 0.0
    out[R] = 0.0
    return out


def direct_sum(freqs: np.ndarray, coefs: np.ndarray, t: float, chunk: int = 1 << 20) -> complex:
    """sum_f a_f (e(f t) - 1) at a single t, with the phase reduced mod 1."""
    total = 0j
    for lo in range(0, len(freqs), chunk):
        f = np.asarray(freqs[lo : lo + chunk], dtype=np.float64)
        ph = np.mod(f * t, 1.0)
        total += complex(np.sum(coefs[lo : lo + chunk] * np.expm1(2j * np.pi * ph)))
    return total
