"""Elementary arithmetic: Jacobi symbols, sieves, the modulus family, signatures.

Everything here is exact integer or rational arithmetic except the numpy
sieves, which only ever hold integers or booleans.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Mapping

import numpy as np


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd positive n, by the binary reciprocity algorithm."""
    if n <= 0 or n % 2 == 0:
        raise ValueError(f"jacobi needs an odd positive modulus, got {n}")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def jacobi_array(a: int | np.ndarray, n: np.ndarray) -> np.ndarray:
    """Vectorised Jacobi symbol; same algorithm as :func:`jacobi`, run lane-wise."""
    n = np.asarray(n, dtype=np.int64).copy()
    if np.any(n <= 0) or np.any(n % 2 == 0):
        raise ValueError("jacobi_array needs odd positive moduli")
    a = np.broadcast_to(np.asarray(a, dtype=np.int64), n.shape) % n
    result = np.ones(n.shape, dtype=np.int64)
    while np.any(a != 0):
        while True:
            even = (a != 0) & (a % 2 == 0)
            if not even.any():
                break
            a = np.where(even, a // 2, a)
            r8 = n % 8
            result = np.where(even & ((r8 == 3) | (r8 == 5)), -result, result)
        live = a != 0
        a, n = np.where(live, n, a), np.where(live, a, n)
        flip = live & (a % 4 == 3) & (n % 4 == 3)
        result = np.where(flip, -result, result)
        a = np.where(live, a % n, a)
    return np.where(n == 1, result, 0)


@lru_cache(maxsize=16)
def _prime_sieve(limit: int) -> np.ndarray:
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    flags.setflags(write=False)
    return flags


def primes_up_to(limit: int) -> np.ndarray:
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    return np.flatnonzero(_prime_sieve(int(limit))).astype(np.int64)


@lru_cache(maxsize=8)
def smallest_prime_factor(limit: int) -> np.ndarray:
    """spf[n] for 0 <= n <= limit (spf[0] = spf[1] = 0)."""
    spf = np.zeros(limit + 1, dtype=np.int64)
    for p in range(2, limit + 1):
        if p * p > limit:
            break
        if spf[p] == 0:
            block = spf[p * p :: p]
            block[block == 0] = p
    rest = spf == 0
    rest[:2] = False
    spf[rest] = np.flatnonzero(rest)
    spf.setflags(write=False)
    return spf


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    # deterministic Miller-Rabin for 64-bit inputs
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def factorize(n: int) -> dict[int, int]:
    """Prime factorisation of |n| by trial division (n != 0)."""
    n = abs(int(n))
    if n == 0:
        raise ValueError("cannot factor 0")
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def is_squarefree(n: int) -> bool:
    return all(e == 1 for e in factorize(n).values())


def is_square(n: int) -> bool:
    if n < 0:
        return False
    r = math.isqrt(n)
    return r * r == n


def euler_phi(n: int) -> int:
    result = n
    for p in factorize(n):
        result = result // p * (p - 1)
    return result


def multiplicative_order(a: int, m: int) -> int:
    """Order of a in (Z/m)^x; raises if gcd(a, m) != 1."""
    a %= m
    if math.gcd(a, m) != 1:
        raise ValueError(f"{a} is not a unit mod {m}")
    if m == 1:
        return 1
    order = euler_phi(m)
    for p in factorize(order):
        while order % p == 0 and pow(a, order // p, m) == 1:
            order //= p
    return order


def primitive_root(m: int) -> int:
    """Smallest generator of (Z/m)^x for m an odd prime power (or 2, 4)."""
    phi = euler_phi(m)
    fac = list(factorize(phi))
    for g in range(1, m):
        if math.gcd(g, m) == 1 and all(pow(g, phi // q, m) != 1 for q in fac):
            return g
    raise ValueError(f"(Z/{m})^x is not cyclic")


def squarefree_kernel(n: int) -> int:
    """Product of the primes dividing |n| to an odd power."""
    out = 1
    for p, e in factorize(n).items():
        if e % 2:
            out *= p
    return out


# ---------------------------------------------------------------- eta weights


def eta(h: int) -> Fraction:
    """prod_{p | h, p > 2} p/(p+1), with eta(0) = 0."""
    if h == 0:
        return Fraction(0)
    out = Fraction(1)
    for p in factorize(h):
        if p > 2:
            out *= Fraction(p, p + 1)
    return out


def split_smooth(h: int, Z: int) -> tuple[int, int]:
    """Write |h| = smooth * rough with smooth Z-smooth and rough Z-rough."""
    h = abs(h)
    smooth = 1
    for p, e in factorize(h).items():
        if p <= Z:
            smooth *= p**e
    return smooth, h // smooth


def eta_Z(h: int, sig: "EpsilonSignature") -> Fraction:
    """Conditioned weight: eps_{h_Z} * eta(h^Z) when the Z-rough part is a square, else 0."""
    if h == 0:
        return Fraction(0)
    smooth, rough = split_smooth(h, sig.Z)
    if not is_square(rough):
        return Fraction(0)
    return sig.eps_of(smooth) * eta(rough)


# ---------------------------------------------------------------- signatures


@dataclass(frozen=True)
class EpsilonSignature:
    """Prescribed values eps_p in {-1, 0, 1} for every prime p <= Z."""

    Z: int
    values: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if self.Z < 2:
            raise ValueError("Z must be at least 2")
        expected = [int(p) for p in primes_up_to(self.Z)]
        got = [p for p, _ in self.values]
        if got != expected:
            raise ValueError(f"signature must list exactly the primes <= {self.Z}: {expected}")
        for p, e in self.values:
            if e not in (-1, 0, 1):
                raise ValueError(f"eps_{p} = {e} is not in {{-1, 0, 1}}")
        if self.values[0][1] == 0:
            raise ValueError("eps_2 must be +1 or -1")

    @classmethod
    def from_list(cls, eps: Iterable[int], Z: int | None = None) -> "EpsilonSignature":
        eps = [int(e) for e in eps]
        if Z is None:
            if not eps:
                raise ValueError("empty signature")
            Z = int(_nth_prime(len(eps)))
        primes = [int(p) for p in primes_up_to(Z)]
        if len(primes) != len(eps):
            raise ValueError(f"expected {len(primes)} entries for Z = {Z}, got {len(eps)}")
        return cls(Z, tuple(zip(primes, eps)))

    @classmethod
    def from_mapping(cls, Z: int, eps: Mapping[int | str, int]) -> "EpsilonSignature":
        table = {int(k): int(v) for k, v in eps.items()}
        primes = [int(p) for p in primes_up_to(Z)]
        missing = [p for p in primes if p not in table]
        if missing:
            raise ValueError(f"signature omits primes {missing}")
        extra = sorted(set(table) - set(primes))
        if extra:
            raise ValueError(f"signature lists keys that are not primes <= {Z}: {extra}")
        return cls(Z, tuple((p, table[p]) for p in primes))

    @classmethod
    def from_json(cls, text: str) -> "EpsilonSignature":
        data = json.loads(text)
        if not isinstance(data, dict) or "Z" not in data or "eps" not in data:
            raise ValueError('signature JSON must look like {"Z": 5, "eps": {"2": 1, ...}}')
        return cls.from_mapping(int(data["Z"]), data["eps"])

    def to_json(self) -> str:
        return json.dumps({"Z": self.Z, "eps": {str(p): e for p, e in self.values}}, sort_keys=False)

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.values)

    @property
    def eps(self) -> tuple[int, ...]:
        return tuple(e for _, e in self.values)

    @property
    def support(self) -> tuple[int, ...]:
        """Primes p <= Z with eps_p != 0."""
        return tuple(p for p, e in self.values if e != 0)

    def __getitem__(self, p: int) -> int:
        for q, e in self.values:
            if q == p:
                return e
        raise KeyError(p)

    def eps_of(self, n: int) -> int:
        """eps_n for a Z-smooth n (sign of n ignored); 0 if n is not Z-smooth."""
        n = abs(n)
        if n == 0:
            return 0
        out = 1
        for p, e in self.values:
            while n % p == 0:
                n //= p
                out *= e
        return out if n == 1 else 0

    def label(self) -> str:
        """File-name stem such as ``eps_p1_m1_p0``."""
        tok = {1: "p1", -1: "m1", 0: "p0"}
        return "eps_" + "_".join(tok[e] for e in self.eps)

    def __str__(self) -> str:
        return "(" + ",".join(f"{e:+d}" if e else "0" for e in self.eps) + ")"


def _nth_prime(k: int) -> int:
    limit = 16
    while True:
        ps = primes_up_to(limit)
        if len(ps) >= k:
            return int(ps[k - 1])
        limit *= 2


def enumerate_signatures(Z: int) -> Iterator[EpsilonSignature]:
    """All admissible signatures at level Z in lexicographic order (-1 < 0 < 1)."""
    primes = [int(p) for p in primes_up_to(Z)]

    def rec(prefix: list[int]) -> Iterator[list[int]]:
        if len(prefix) == len(primes):
            yield prefix
            return
        choices = (-1, 1) if not prefix else (-1, 0, 1)
        for e in choices:
            yield from rec(prefix + [e])

    for eps in rec([]):
        yield EpsilonSignature(Z, tuple(zip(primes, eps)))


def eps_signature(c: int, Z: int) -> EpsilonSignature:
    """The signature (p/c)_{p <= Z} of an odd modulus c."""
    return EpsilonSignature(Z, tuple((int(p), jacobi(int(p), c)) for p in primes_up_to(Z)))


# ---------------------------------------------------------------- the family


def squarefree_one_mod_four(lo: int, hi: int) -> np.ndarray:
    """Squarefree c with c = 1 mod 4 in [lo, hi], sorted."""
    lo = max(lo, 1)
    if hi < lo:
        return np.zeros(0, dtype=np.int64)
    first = lo + ((1 - lo) % 4)
    cand = np.arange(first, hi + 1, 4, dtype=np.int64)
    keep = np.ones(cand.size, dtype=bool)
    # odd candidates: only odd prime squares can divide them
    for p in primes_up_to(math.isqrt(hi))[1:]:
        q = int(p) * int(p)
        # index of the first candidate divisible by q: first + 4k = 0 mod q
        k0 = (-first * pow(4, -1, q)) % q
        keep[k0::q] = False
    return cand[keep]


def enumerate_family(Q: int, sig: EpsilonSignature | None = None) -> np.ndarray:
    """Members of the family on [Q, 2Q], optionally restricted to a signature.

    With a signature, c is kept when (p/c) = eps_p for every p <= Z; eps_p = 0
    therefore means p | c.
    """
    cs = squarefree_one_mod_four(Q, 2 * Q)
    if sig is None:
        return cs
    keep = np.ones(cs.size, dtype=bool)
    for p, e in sig.values:
        keep &= jacobi_array(p, cs) == e
    return cs[keep]


def family_density_constant() -> float:
    """Limit of |family on [Q, 2Q]| / Q, namely 1/(3 zeta(2)) = 2/pi^2."""
    return 2.0 / math.pi**2


# ---------------------------------------------------------------- smooth numbers


def smooth_numbers(primes: Iterable[int], bound: int) -> list[int]:
    """Sorted positive integers <= bound whose prime factors all lie in ``primes``."""
    ps = sorted(set(int(p) for p in primes))
    out: list[int] = []

    def dfs(i: int, n: int) -> None:
        out.append(n)
        for j in range(i, len(ps)):
            m = n * ps[j]
            if m > bound:
                break
            dfs(j, m)

    if bound >= 1:
        dfs(0, 1)
    out.sort()
    return out
