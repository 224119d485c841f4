"""Random completely multiplicative model for the limit path.

X_2 = +-1 with probability 1/2 each; for odd p, X_p = +-1 with probability
p/(2(p+1)) each and 0 with probability 1/(p+1).  X extends to all integers by
complete multiplicativity on |n|.  The random path is

    G*(t) = t + sum_{n != -1, 0} X_n (e((n+1)t) - 1) / (2 pi i (n+1)),

truncated to |n+1| <= N.  Uniform draws come from a counter-based Philox
stream keyed by (seed, stream); the j-th draw always belongs to the j-th
prime, so changing y or the prescribed primes never shifts other draws.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from ._fourier import direct_sum, fold_grid
from .arith import EpsilonSignature, primes_up_to, smallest_prime_factor
from .atlas import DEFAULT_TOL, gsharp_grid
from .paths import PathSample

DEFAULT_N = 100_000


@dataclass
class MultiplicativeSample:
    """One realisation of X_p for primes p <= y (prescribed values for p <= Z)."""

    y: int
    primes: np.ndarray
    values: np.ndarray
    seed: tuple[int, int] = (0, 0)
    sig: EpsilonSignature | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    def X(self, n: int) -> int:
        """X_n for 1 <= |n| <= y (complete multiplicativity, sign of n ignored)."""
        n = abs(int(n))
        if n == 0:
            return 0
        return int(self.table(n)[n])

    def table(self, upto: int) -> np.ndarray:
        """X_n for n = 0..upto."""
        if upto > self.y:
            raise ValueError(f"sample only covers primes up to {self.y}")
        cached = self._cache.get("table")
        if cached is None or cached.size <= upto:
            limit = max(upto, self.y)
            by_value = np.zeros(limit + 1, dtype=np.int8)
            by_value[self.primes] = self.values
            cached = _completely_multiplicative(by_value, smallest_prime_factor(limit))
            self._cache["table"] = cached
        return cached[: upto + 1]


@njit(cache=True)
def _completely_multiplicative(at_primes, spf):
    n_max = at_primes.size - 1
    out = np.zeros(n_max + 1, dtype=np.int8)
    if n_max >= 1:
        out[1] = 1
    for n in range(2, n_max + 1):
        p = spf[n]
        out[n] = at_primes[p] * out[n // p]
    return out


def draw_primes(primes: np.ndarray, seed: int, stream: int = 0) -> np.ndarray:
    """Independent X_p for the given primes from the Philox stream (seed, stream)."""
    gen = np.random.Generator(np.random.Philox(key=np.array([seed, stream], dtype=np.uint64)))
    u = gen.random(primes.size)
    p = primes.astype(np.float64)
    zero = 1.0 / (p + 1.0)
    plus = zero + p / (2.0 * (p + 1.0))
    x = np.where(u < zero, 0, np.where(u < plus, 1, -1)).astype(np.int8)
    is_two = primes == 2
    x[is_two] = np.where(u[is_two] < 0.5, 1, -1)
    return x


def sample_multiplicative(
    y: int, sig: EpsilonSignature | None = None, seed: int = 0, stream: int = 0
) -> MultiplicativeSample:
    """Draw X_p for p <= y; primes p <= Z take the prescribed eps_p."""
    primes = primes_up_to(y)
    values = draw_primes(primes, seed, stream)
    if sig is not None:
        for i, p in enumerate(primes):
            if p > sig.Z:
                break
            values[i] = sig[int(p)]
    return MultiplicativeSample(int(y), primes, values, (seed, stream), sig)


def _series(sample: MultiplicativeSample, N: int) -> tuple[np.ndarray, np.ndarray]:
    if N + 1 > sample.y:
        raise ValueError(f"truncation N = {N} needs primes up to {N + 1}, sample has y = {sample.y}")
    X = sample.table(N + 1)
    h = np.concatenate([np.arange(-N, 0), np.arange(2, N + 1)]).astype(np.int64)
    coefs = X[np.abs(h - 1)].astype(np.float64) / (2j * np.pi * h)
    nz = coefs != 0
    return h[nz], coefs[nz]


def sample_limit_path(sample: MultiplicativeSample, N: int = DEFAULT_N, R: int = 1024) -> PathSample:
    """The random path truncated at |n+1| <= N, on the grid t = i/R."""
    h, coefs = _series(sample, N)
    values = fold_grid(h, coefs, R) + np.arange(R + 1) / R
    return PathSample(R, values, label=f"seed={sample.seed}", meta={"N": N})


def sample_limit_value(sample: MultiplicativeSample, t: float, N: int = DEFAULT_N) -> complex:
    h, coefs = _series(sample, N)
    return direct_sum(h, coefs, t) + t


def truncation_diagnostic(sample: MultiplicativeSample, N: int, R: int = 1024) -> float:
    """sup-distance between the truncations at N and 2N on the grid."""
    a = sample_limit_path(sample, N, R)
    b = sample_limit_path(sample, 2 * N, R)
    return float(np.max(np.abs(a.values - b.values)))


@dataclass
class DeviationReport:
    Z: int
    signature: str
    delta: float
    trials: int
    N: int
    R: int
    seed: int
    estimate: float
    stderr: float
    sup_distances: list[float]

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def estimate_deviation_prob(
    sig: EpsilonSignature,
    delta: float,
    trials: int = 200,
    N: int = DEFAULT_N,
    R: int = 4096,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
) -> DeviationReport:
    """Fraction of trials with sup_t |G*(t) - G#(t)| >= delta, conditioned on the signature.

    Trial k uses the Philox stream (seed, k), so runs at different Z share all
    draws for primes above the larger Z.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    target = gsharp_grid(sig, R, tol).values
    sups = []
    for k in range(trials):
        sample = sample_multiplicative(N + 1, sig, seed, k)
        path = sample_limit_path(sample, N, R)
        sups.append(float(np.max(np.abs(path.values - target))))
    hits = np.array(sups) >= delta
    p = float(hits.mean())
    return DeviationReport(
        sig.Z, str(sig), delta, trials, N, R, seed, p, math.sqrt(p * (1 - p) / trials), sups
    )
