"""Mixed moments of path values: empirical averages over the family and their limits.

For times t_1..t_k and exponents (m_i, n_i), the empirical moment is the
average over c in the family of prod_i conj(G(t_i; c))^{m_i} G(t_i; c)^{n_i}.
Its limit is

    sum over h-tuples with |H| a square of  prod beta(h; t) * eta(H),
    H = prod (1 - h),  beta(h; t) = (e(ht) - 1)/(2 pi i h),  beta(0; t) = t,

with conj(beta) in the m-slots.  Tuples are enumerated through the
squarefree kernel of each factor 1 - h: the product is a square exactly when
the kernels multiply to a square.  Conditioning on a signature replaces eta by
eps_{H_Z} eta(H^Z) and only asks the Z-rough part of H to be a square.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numba import njit

from .arith import EpsilonSignature, enumerate_family, primes_up_to, smallest_prime_factor
from .expsums import BudgetExceeded
from .paths import family_values

DEGREE_CAP = 6
TERM_BUDGET = 100_000_000
CHUNK = 2_000_000
EULER_PRIME_LIMIT = 10_000_000


@dataclass(frozen=True)
class MomentOrder:
    t: tuple[float, ...]
    m: tuple[int, ...]
    n: tuple[int, ...]

    def __post_init__(self) -> None:
        if not (len(self.t) == len(self.m) == len(self.n)) or not self.t:
            raise ValueError("t, m and n must be non-empty and of equal length")
        if any(not 0.0 <= x <= 1.0 for x in self.t):
            raise ValueError("times must lie in [0, 1]")
        if any(v < 0 for v in self.m + self.n):
            raise ValueError("exponents must be non-negative")
        if self.degree > DEGREE_CAP:
            raise ValueError(f"total degree {self.degree} exceeds the cap {DEGREE_CAP}")

    @classmethod
    def single(cls, t: float, m: int, n: int) -> "MomentOrder":
        return cls((float(t),), (int(m),), (int(n),))

    @property
    def degree(self) -> int:
        return sum(self.m) + sum(self.n)

    def slots(self) -> list[tuple[float, bool]]:
        """(t, conjugated) for each factor of the product."""
        out = []
        for t, m, n in zip(self.t, self.m, self.n):
            out += [(t, False)] * n + [(t, True)] * m
        return out


@dataclass
class MomentResult:
    value: complex
    error_bound: float
    roundoff: float
    terms: int
    Hmax: int


def default_hmax(degree: int) -> int:
    if degree <= 2:
        return 10_000
    if degree == 3:
        return 1_000
    H = 1
    while (2 * (H + 1) + 1) ** (degree - 1) <= 10_000_000:
        H += 1
    return H


def beta(h: np.ndarray, t: float) -> np.ndarray:
    """(e(ht) - 1)/(2 pi i h), and t at h = 0."""
    h = np.asarray(h, dtype=np.float64)
    safe = np.where(h == 0, 1.0, h)
    ph = np.mod(h * t, 1.0)
    val = np.expm1(2j * np.pi * ph) / (2j * np.pi * safe)
    return np.where(h == 0, t + 0j, val)


# ---------------------------------------------------------------- value tables


@njit(cache=True)
def _tables(limit, spf, eps_by_prime, Z):
    """Per |v| <= limit: kernel of the counted part, radical of the eta primes, eta, sign."""
    kern = np.ones(limit + 1, dtype=np.int64)
    rad = np.ones(limit + 1, dtype=np.int64)
    eta = np.ones(limit + 1, dtype=np.float64)
    sign = np.ones(limit + 1, dtype=np.int64)
    for v in range(2, limit + 1):
        n = v
        while n > 1:
            p = spf[n]
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            if p <= Z:
                # prescribed prime: contributes eps_p^e, no square condition
                s = eps_by_prime[p]
                if e % 2 == 1:
                    sign[v] *= s
                elif s == 0:
                    sign[v] = 0
            else:
                if e % 2 == 1:
                    kern[v] *= p
                if p > 2:
                    rad[v] *= p
                    eta[v] *= p / (p + 1.0)
    return kern, rad, eta, sign


@lru_cache(maxsize=32)
def _value_tables(H: int, sig: EpsilonSignature | None):
    limit = H + 1
    spf = smallest_prime_factor(max(limit, 2))
    if sig is None:
        eps_by_prime = np.zeros(2, dtype=np.int64)
        Z = 1
    else:
        eps_by_prime = np.zeros(sig.Z + 1, dtype=np.int64)
        for p, e in sig.values:
            eps_by_prime[p] = e
        Z = sig.Z
    return _tables(limit, spf, eps_by_prime, Z)


# ---------------------------------------------------------------- enumeration


def _tuple_sums(order: MomentOrder, H: int, sig: EpsilonSignature | None, budget: int):
    """Yield chunks of (term, majorant) over admissible tuples with |h_i| <= H.

    term is prod beta * sign * eta; majorant is prod majorant_weight(1 - h).
    """
    slots = order.slots()
    u = len(slots)
    kern_t, rad_t, eta_t, sign_t = _value_tables(H, sig)
    h = np.arange(-H, H + 1, dtype=np.int64)
    h = h[h != 1]
    v = 1 - h
    av = np.abs(v)
    vk, vr, ve, vs = kern_t[av], rad_t[av], eta_t[av], sign_t[av]
    live = vs != 0
    h, v, vk, vr, ve, vs = h[live], v[live], vk[live], vr[live], ve[live], vs[live]
    vw = majorant_weight(v)

    def slot_beta(k: int) -> np.ndarray:
        t, conj = slots[k]
        b = beta(h, t)
        return np.conj(b) if conj else b

    if (h.size) ** (u - 1) > budget:
        raise BudgetExceeded(f"about {h.size ** (u - 1)} partial tuples exceed the budget {budget}")
    if float(H + 1) ** (u - 1) >= 2.0**62:
        raise BudgetExceeded("kernel products would overflow 64-bit integers")

    sb = np.ones(1, dtype=np.complex128)
    sk = np.ones(1, dtype=np.int64)
    sr = np.ones(1, dtype=np.int64)
    se = np.ones(1, dtype=np.float64)
    ss = np.ones(1, dtype=np.int64)
    sw = np.ones(1, dtype=np.float64)
    for k in range(u - 1):
        b = slot_beta(k)
        g = np.gcd(sr[:, None], vr[None, :])
        gk = np.gcd(sk[:, None], vk[None, :])
        sk = (sk[:, None] // gk * (vk[None, :] // gk)).ravel()
        se = (se[:, None] * ve[None, :] / eta_t[g]).ravel()
        sr = (sr[:, None] // g * vr[None, :]).ravel()
        sb = (sb[:, None] * b[None, :]).ravel()
        ss = (ss[:, None] * vs[None, :]).ravel()
        sw = (sw[:, None] * vw[None, :]).ravel()
        # a kernel larger than what the remaining slots can cancel is dead
        room = (H + 1) ** (u - 1 - k)
        keep = sk <= room
        sb, sk, sr, se, ss, sw = sb[keep], sk[keep], sr[keep], se[keep], ss[keep], sw[keep]

    # final slot: join on equal kernels
    b_last = slot_beta(u - 1)
    order_v = np.argsort(vk, kind="stable")
    sorted_k = vk[order_v]
    lo = np.searchsorted(sorted_k, sk, side="left")
    hi = np.searchsorted(sorted_k, sk, side="right")
    counts = hi - lo
    total = int(counts.sum())
    if total > budget:
        raise BudgetExceeded(f"{total} tuples exceed the budget {budget}")
    cum = np.cumsum(counts)
    cuts = np.searchsorted(cum, np.arange(CHUNK, total + CHUNK, CHUNK), side="right")
    edges = np.unique(np.concatenate([[0], np.minimum(cuts, sk.size), [sk.size]]))
    for start, stop in zip(edges[:-1], edges[1:]):
        c = counts[start:stop]
        acc = int(c.sum())
        if acc:
            rep = np.repeat(np.arange(start, stop), c)
            offs = np.repeat(lo[start:stop] - np.cumsum(c) + c, c) + np.arange(acc)
            vi = order_v[offs]
            g = np.gcd(sr[rep], vr[vi])
            eta_fin = se[rep] * ve[vi] / eta_t[g]
            term = sb[rep] * b_last[vi] * (ss[rep] * vs[vi]) * eta_fin
            wt = sw[rep] * vw[vi]
            yield term, wt


@lru_cache(maxsize=1)
def _euler_primes() -> np.ndarray:
    return primes_up_to(EULER_PRIME_LIMIT).astype(np.float64)


KAPPA = 8.0 / (3.0 * math.pi)
UNIT_PAIR = 1.0 + 1.0 / (2.0 * math.pi)


def majorant_weight(v: np.ndarray) -> np.ndarray:
    """Pointwise upper bound for |beta(1 - v; t)|, uniform in t.

    For |v| = n >= 2 the two signs get kappa (n +- 1)/(2 n^2), which dominate
    1/(pi (n -+ 1)) and add up to kappa/n.
    """
    v = np.asarray(v, dtype=np.float64)
    n = np.abs(v)
    out = KAPPA * (n + np.sign(v)) / (2.0 * n * n)
    out = np.where(v == 1, 1.0, out)
    return np.where(v == -1, 1.0 / (2.0 * math.pi), out)


def _euler_constant(i: int, sig: EpsilonSignature | None) -> float:
    """Sum of prod 1/n_j over i-tuples of positive integers with admissible product.

    Euler product: the even part of (1 - 1/p)^{-i} at primes with the square
    condition, the full factor at prescribed primes; primes beyond the sieve
    are covered by an explicit bound on log(local factor).
    """
    if i == 0:
        return 1.0
    ps = _euler_primes()
    x = 1.0 / ps
    full = -i * np.log1p(-x)
    even = np.log(0.5 * ((1 - x) ** (-i) + (1 + x) ** (-i)))
    logs = even if sig is None else np.where(ps <= sig.Z, full, even)
    P = float(EULER_PRIME_LIMIT)
    tail = i * (i + 1) / 2 * (1 - 1 / P) ** (-i - 2) / P
    return math.exp(math.fsum(logs.tolist()) + tail)


def majorant_total(u: int, sig: EpsilonSignature | None) -> float:
    """Sum of prod majorant_weight(v_j) over all admissible u-tuples of nonzero integers.

    Summing the two signs of each |v| = n gives UNIT_PAIR at n = 1 and kappa/n
    for n >= 2; splitting by which slots have n >= 2 and using inclusion and
    exclusion on the Euler constants gives a closed form.
    """
    C = [_euler_constant(i, sig) for i in range(u + 1)]
    total = 0.0
    for j in range(u + 1):
        D = math.fsum((-1) ** (j - i) * math.comb(j, i) * C[i] for i in range(j + 1))
        total += math.comb(u, j) * UNIT_PAIR ** (u - j) * KAPPA**j * D
    return total


def limit_moment(
    order: MomentOrder,
    Hmax: int | None = None,
    sig: EpsilonSignature | None = None,
    budget: int = TERM_BUDGET,
) -> MomentResult:
    """Limit of the mixed moment, optionally conditioned on a signature.

    The error bound covers every tuple with some |h_i| > Hmax: it is the
    majorant over all tuples minus the majorant over the enumerated ones.
    """
    u = order.degree
    if u == 0:
        return MomentResult(1.0 + 0j, 0.0, 0.0, 1, 0)
    H = default_hmax(u) if Hmax is None else int(Hmax)
    if H < 1:
        raise ValueError("Hmax must be positive")
    re_parts, im_parts, w_parts = [], [], []
    count = 0
    mag = 0.0
    for term, wt in _tuple_sums(order, H, sig, budget):
        re_parts.append(math.fsum(term.real.tolist()))
        im_parts.append(math.fsum(term.imag.tolist()))
        w_parts.append(math.fsum(wt.tolist()))
        mag += float(np.abs(term).sum())
        count += term.size
    value = complex(math.fsum(re_parts), math.fsum(im_parts))
    inner = math.fsum(w_parts)
    bound = max(majorant_total(u, sig) - inner, 0.0)
    roundoff = (u + 4) * np.finfo(float).eps * mag
    return MomentResult(value, bound, roundoff, count, H)


def empirical_moment(order: MomentOrder, Q: int, sig: EpsilonSignature | None = None) -> complex:
    """Average of the product of path values over the family on [Q, 2Q]."""
    cs = enumerate_family(Q, sig)
    if cs.size == 0:
        raise ValueError(f"no moduli in [{Q}, {2 * Q}] for this signature")
    vals = family_values(cs, np.array(order.t))
    prod = np.ones(cs.size, dtype=np.complex128)
    for i, (m, n) in enumerate(zip(order.m, order.n)):
        prod *= np.conj(vals[:, i]) ** m * vals[:, i] ** n
    return complex(math.fsum(prod.real.tolist()), math.fsum(prod.imag.tolist())) / cs.size
