"""Exponential sums over multiplicative semigroups and the local constants built from them.

The central object is the average

    s*(a/m; eps) = (2 phi(m))^{-|P|} sum_{0 <= m_p < 2 phi(m)} e(a prod p^{m_p} / m) prod eps_p^{m_p}

over the support primes p of the signature that do not divide m.  Three
routes compute it: brute-force enumeration of exponent tuples, a period
reduced convolution over residues, and a closed form in terms of twisted
power sums that is valid for odd prime power moduli.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from functools import reduce

import numpy as np

from .arith import (
    EpsilonSignature,
    euler_phi,
    factorize,
    is_prime,
    jacobi,
    multiplicative_order,
    primes_up_to,
    primitive_root,
)

EULER_GAMMA = 0.57721566490153286061
DIRECT_BUDGET = 30_000_000
ZERO_TOL = 1e-12


class BudgetExceeded(RuntimeError):
    """Raised when a requested enumeration is larger than the configured budget."""


def _e(x: np.ndarray) -> np.ndarray:
    return np.exp(2j * np.pi * x)


def active_primes(sig: EpsilonSignature, m: int) -> list[tuple[int, int]]:
    """(p, eps_p) for support primes p with p not dividing m."""
    return [(p, e) for p, e in sig.values if e != 0 and m % p != 0]


def _lcm(*xs: int) -> int:
    return reduce(lambda u, v: u * v // math.gcd(u, v), xs, 1)


# ---------------------------------------------------------------- brute force


def _tuple_residues(m: int, bases: list[tuple[int, int]], length: int) -> tuple[np.ndarray, np.ndarray]:
    """Residues prod b^{k_b} mod m and signs prod eps^{k_b} over all k in [0, length)^|bases|."""
    total = length ** len(bases)
    if total > DIRECT_BUDGET:
        raise BudgetExceeded(f"{total} exponent tuples exceed the direct budget {DIRECT_BUDGET}")
    res = np.ones(1, dtype=np.int64)
    sgn = np.ones(1, dtype=np.int64)
    k = np.arange(length, dtype=np.int64)
    for b, e in bases:
        powers = np.array([pow(b, int(j), m) for j in k], dtype=np.int64)
        signs = np.where(k % 2 == 1, e, 1).astype(np.int64)
        res = (res[:, None] * powers[None, :] % m).ravel()
        sgn = (sgn[:, None] * signs[None, :]).ravel()
    return res, sgn


def s_general(
    a: int,
    m: int,
    sig: EpsilonSignature,
    delta_exp: int = 1,
    m_prime: int | None = None,
    absolute: bool = False,
) -> complex:
    """Unnormalised sum over 0 <= m_p < 2 phi(m) of e(a prod p^{delta m_p}/m) prod eps_p^{m_p}.

    The primes are the support primes not dividing ``m_prime`` (default m);
    ``absolute`` replaces every sign by +1.
    """
    mp = m if m_prime is None else m_prime
    if mp % m:
        raise ValueError("m must divide m_prime")
    bases = [(pow(p, delta_exp, m), 1 if absolute else e) for p, e in active_primes(sig, mp)]
    res, sgn = _tuple_residues(m, bases, 2 * euler_phi(m))
    return complex(np.sum(sgn * _e((a % m) * res / m)))


def s_star_direct(a: int, m: int, sig: EpsilonSignature) -> complex:
    """Reference value: plain enumeration of every exponent tuple."""
    bases = active_primes(sig, m)
    res, sgn = _tuple_residues(m, bases, 2 * euler_phi(m))
    return complex(np.mean(sgn * _e((a % m) * res / m)))


# ---------------------------------------------------------------- period reduced


def residue_distribution(m: int, sig: EpsilonSignature, skip: int | None = None) -> np.ndarray:
    """Signed weights w_r with s*(a/m) = sum_r w_r e(a r / m).

    Each exponent m_p only matters modulo lcm(ord_m p, 2) (or ord_m p when
    eps_p = 1), a divisor of 2 phi(m), so averaging over one period is exact.
    """
    w = np.zeros(m, dtype=np.float64)
    w[1 % m] = 1.0
    r = np.arange(m, dtype=np.int64)
    for p, e in active_primes(sig, m):
        if p == skip:
            continue
        order = multiplicative_order(p, m)
        period = order if e == 1 else _lcm(order, 2)
        new = np.zeros(m, dtype=np.float64)
        for j in range(period):
            np.add.at(new, r * pow(p, j, m) % m, w * (e**j) / period)
        w = new
    return w


def s_star(a: int, m: int, sig: EpsilonSignature) -> complex:
    """s*(a/m; eps) via the period-reduced residue distribution."""
    w = residue_distribution(m, sig)
    r = np.arange(m)
    return complex(np.sum(w * _e((a % m) * r / m)))


def s_star_all(m: int, sig: EpsilonSignature) -> np.ndarray:
    """s*(a/m; eps) for a = 0..m-1 at once."""
    w = residue_distribution(m, sig)
    return np.fft.ifft(w) * m


# ---------------------------------------------------------------- closed form


def sigma(d: int, iota: int, a: int, q: int, character: str = "jacobi") -> complex:
    """Twisted power sum sum*_{x mod q} chi(x)^iota e(a x^d / q).

    chi is the Jacobi symbol (x/q) by default; ``character="quadratic"`` uses
    the quadratic character of (Z/q)^x, which differs from (x/q) when q is an
    even power of a prime.
    """
    x = np.array([v for v in range(1, q) if math.gcd(v, q) == 1], dtype=np.int64)
    if iota:
        if character == "jacobi":
            chi = np.array([jacobi(int(v), q) for v in x], dtype=np.float64)
        elif character == "quadratic":
            ell = next(iter(factorize(q)))
            chi = np.array([jacobi(int(v), ell) for v in x], dtype=np.float64)
        else:
            raise ValueError(f"unknown character {character!r}")
    else:
        chi = np.ones(x.size)
    xd = np.array([pow(int(v), d, q) for v in x], dtype=np.int64)
    return complex(np.sum(chi * _e((a % q) * xd / q)))


def sigma_nonvanishing_predicted(d: int, iota: int, q: int) -> bool:
    """Divisibility criterion for sigma_d^iota(a/q) != 0 (q = p^k odd, p not dividing a)."""
    (p, k), = factorize(q).items()
    iota_eff = 1 if (iota == 1 and k % 2 == 1) else 0
    phi = euler_phi(q)
    return d % p ** (k - 1) == 0 and (phi // (1 + iota_eff)) % d == 0


def reduced_data(q: int, sig: EpsilonSignature) -> dict:
    """d_q, and the split of the active primes into high-power residues and the rest."""
    fac = factorize(q)
    if len(fac) != 1 or 2 in fac:
        raise ValueError(f"{q} is not an odd prime power")
    phi = euler_phi(q)
    act = active_primes(sig, q)
    L = _lcm(*(multiplicative_order(p, q) for p, _ in act))
    d_q = phi // L
    g = math.gcd(phi, 2 * d_q)
    plus = [(p, e) for p, e in act if pow(p, phi // g, q) == 1]
    minus = [(p, e) for p, e in act if pow(p, phi // g, q) != 1]
    return {"d_q": d_q, "plus": plus, "minus": minus}


def s_star_reduced(a: int, q: int, sig: EpsilonSignature) -> complex:
    """s*(a/q; eps) for an odd prime power q from the case table on high-power residues."""
    data = reduced_data(q, sig)
    plus, minus, d_q = data["plus"], data["minus"], data["d_q"]
    phi = euler_phi(q)
    if any(e != 1 for _, e in plus):
        return 0j
    if not minus:
        return sigma(d_q, 0, a, q) / phi
    signs = {e for _, e in minus}
    if len(signs) != 1:
        return 0j
    iota = 0 if signs == {1} else 1
    return sigma(d_q, iota, a, q, character="quadratic") / phi


def vanishes_by_order(m: int, sig: EpsilonSignature) -> bool:
    """True when some active prime with eps_p = -1 has odd order mod m (forcing s* = 0)."""
    return any(e == -1 and multiplicative_order(p, m) % 2 == 1 for p, e in active_primes(sig, m))


def vanishes_prime_power(q: int, sig: EpsilonSignature) -> bool:
    """For q = ell^k, k >= 2: s* = 0 when some active prime has order not dividing ell - 1."""
    (ell, k), = factorize(q).items()
    if k < 2:
        return False
    return any((ell - 1) % multiplicative_order(p, q) != 0 for p, _ in active_primes(sig, q))


# ---------------------------------------------------------------- multiplicativity


def crt_split(
    a: int, m1: int, m2: int, sig: EpsilonSignature, delta_exp: int = 1, m_prime: int | None = None
) -> complex:
    """Evaluate s(a/(m1 m2))[delta_exp, m_prime] through sums modulo m1 and m2 separately.

    With d = gcd(phi(m1), phi(m2)) and P the active primes,

        (4d)^{-|P|} sum_{0 <= mu_p < 2d} eps^mu s(a m2^{-1} p^{delta mu}/m1)[2 d delta] s(a m1^{-1} p^{delta mu}/m2)[2 d delta]

    where the inner sums carry no signs.
    """
    if math.gcd(m1, m2) != 1:
        raise ValueError("moduli must be coprime")
    m = m1 * m2
    mp = m if m_prime is None else m_prime
    d = math.gcd(euler_phi(m1), euler_phi(m2))
    act = active_primes(sig, mp)
    inv2 = pow(m2, -1, m1) if m1 > 1 else 0
    inv1 = pow(m1, -1, m2) if m2 > 1 else 0
    bases = [(p, e) for p, e in act]
    res1, sgn = _tuple_residues(m1, [(pow(p, delta_exp, m1), e) for p, e in bases], 2 * d)
    res2, _ = _tuple_residues(m2, [(pow(p, delta_exp, m2), e) for p, e in bases], 2 * d)
    total = 0j
    for r1, r2, s in zip(res1.tolist(), res2.tolist(), sgn.tolist()):
        left = s_general(a * inv2 * r1, m1, sig, 2 * d * delta_exp, mp, absolute=True)
        right = s_general(a * inv1 * r2, m2, sig, 2 * d * delta_exp, mp, absolute=True)
        total += s * left * right
    return total / (4 * d) ** len(act)


# ---------------------------------------------------------------- characters


def character_side(a: int, b: int, sig: EpsilonSignature, parity: int) -> complex:
    """(2/phi(b)) sum over characters chi mod prime b with chi(-1) = parity, chi(p) = eps_p,
    of conj(tau(chi)) chi(-a), where tau(chi) = sum_x chi(x) e(x/b)."""
    if not is_prime(b) or b == 2:
        raise ValueError("character table is built for odd prime moduli only")
    phi = b - 1
    g = primitive_root(b)
    log = np.zeros(b, dtype=np.int64)
    x = 1
    for j in range(phi):
        log[x] = j
        x = x * g % b
    units = np.arange(1, b, dtype=np.int64)
    ks = np.arange(phi, dtype=np.int64)
    # chi_k(g^j) = e(kj/phi)
    table = _e(np.outer(ks, log[units]) / phi)
    taus = table @ _e(units / b)
    keep = (ks % 2 == 0) if parity == 1 else (ks % 2 == 1)
    for p, e in active_primes(sig, b):
        keep &= np.abs(table[:, p % b - 1] - e) < 1e-9
    col = (-a) % b - 1
    return complex(2.0 / phi * np.sum(np.conj(taus[keep]) * table[keep, col]))


# ---------------------------------------------------------------- sawtooth sums


def sawtooth(x: np.ndarray) -> np.ndarray:
    return x - np.floor(x) - 0.5


def s_tilde(prime: int, a: int, b: int, sig: EpsilonSignature) -> complex:
    """Sawtooth-weighted companion of s* attached to one active prime.

    -phi(b) (2 phi(b))^{-|P|} sum_{m_p} saw((m_prime + 1/2)/phi(b)) e(a prod p^{m_p}/b) prod eps_p^{m_p}
    """
    act = dict(active_primes(sig, b))
    if prime not in act:
        raise ValueError(f"{prime} is not an active prime for modulus {b}")
    phi = euler_phi(b)
    w = residue_distribution(b, sig, skip=prime)
    r = np.arange(b, dtype=np.int64)
    k = np.arange(2 * phi, dtype=np.int64)
    weights = sawtooth((k + 0.5) / phi) * np.where(k % 2 == 1, act[prime], 1)
    mult = np.array([pow(prime, int(j), b) for j in k], dtype=np.int64)
    inner = np.array([np.sum(w * _e((a % b) * (r * u % b) / b)) for u in mult])
    return complex(-phi * np.sum(weights * inner) / (2 * phi))


def s_tilde_direct(prime: int, a: int, b: int, sig: EpsilonSignature) -> complex:
    """Reference enumeration of :func:`s_tilde`."""
    act = active_primes(sig, b)
    phi = euler_phi(b)
    L = 2 * phi
    res, sgn = _tuple_residues(b, act, L)
    pos = [p for p, _ in act].index(prime)
    k = (np.arange(res.size) // L ** (len(act) - 1 - pos)) % L
    vals = sawtooth((k + 0.5) / phi) * sgn * _e((a % b) * res / b)
    return complex(-phi * np.sum(vals) / L ** len(act))


# ---------------------------------------------------------------- cusp constants


def c_prime_plus(sig: EpsilonSignature) -> float:
    return -(math.log(2 * math.pi) + EULER_GAMMA - 1.0) + 0.5 * sum(math.log(p) for p in sig.support)


def c_eps(sig: EpsilonSignature) -> float:
    P = sig.support
    return 1.0 / (math.factorial(len(P)) * math.prod(math.log(p) for p in P))


def generates_all_squares(q: int, gens: list[int]) -> bool:
    """Whether the given quadratic residues generate every quadratic residue mod prime q."""
    if not gens:
        return q == 3
    return _lcm(*(multiplicative_order(g, q) for g in gens)) == (q - 1) // 2


@dataclass
class CuspReport:
    q: int
    a: int
    signature: str
    s_star: complex
    c_eps: float
    c_prime_plus: float
    c_plus: float
    c_minus: float
    c_prime: float
    slope_plus: float
    slope_minus: float
    all_qrs: bool
    classification: str
    delta: float | None = None
    s_tilde: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["s_star"] = [self.s_star.real, self.s_star.imag]
        out["s_tilde"] = {str(k): [v.real, v.imag] for k, v in self.s_tilde.items()}
        return out


def cusp_constants(a: int, q: int, sig: EpsilonSignature) -> CuspReport:
    """Leading constants of the local expansion of the limit path at t0 = a/q.

    Requires q prime, q > Z and gcd(a, q) = 1.  The increment behaves like
    e(t0)[c+ h L^|P| + (c' h + c- |h|) L^{|P|-1}] with L = |log |h||, so the
    one-sided slopes at the lower order are c' + c- (h > 0) and c' - c- (h < 0).
    """
    if not is_prime(q) or q <= sig.Z:
        raise ValueError(f"q = {q} must be a prime larger than Z = {sig.Z}")
    if a % q == 0:
        raise ValueError("a must be a unit mod q")
    P = list(sig.support)
    n = len(P)
    s = s_star(a, q, sig)
    tildes = {p: s_tilde(p, a, q, sig) for p in P}
    ce = c_eps(sig)
    cpp = c_prime_plus(sig)
    c_plus = ce * 2 * s.real
    c_minus = -ce * n * math.pi * s.imag
    c_prime = ce * n * 2 * (cpp * s + sum(math.log(p) * tildes[p] for p in P)).real
    slope_plus, slope_minus = c_prime + c_minus, c_prime - c_minus

    negatives = [p for p in P if sig[p] == -1]
    positives = [p for p in P if sig[p] == 1]
    all_qrs = all(jacobi(p, q) == 1 for p in positives) and generates_all_squares(q, positives)
    delta = c_prime / c_minus if len(negatives) == 1 and abs(c_minus) > ZERO_TOL else None

    if abs(s.real) > ZERO_TOL:
        cls = "smooth-through"
    elif len(negatives) == 1 and not all_qrs:
        cls = "undetermined"
    elif slope_plus * slope_minus < 0:
        cls = "cusp"
    elif slope_plus * slope_minus > 0:
        cls = "log-singularity"
    else:
        cls = "undetermined"
    return CuspReport(
        q=q,
        a=a % q,
        signature=str(sig),
        s_star=s,
        c_eps=ce,
        c_prime_plus=cpp,
        c_plus=c_plus,
        c_minus=c_minus,
        c_prime=c_prime,
        slope_plus=slope_plus,
        slope_minus=slope_minus,
        all_qrs=all_qrs,
        classification=cls,
        delta=delta,
        s_tilde=tildes,
    )


def find_cusp_points(sig: EpsilonSignature, qmax: int) -> list[tuple[int, bool]]:
    """Primes Z < q <= qmax, q = 3 mod 4, with (p/q) = eps_p on the support.

    Each hit comes with a flag telling whether the primes of sign +1 generate
    all quadratic residues mod q.
    """
    out = []
    positives = [p for p in sig.support if sig[p] == 1]
    for q in primes_up_to(qmax):
        q = int(q)
        if q <= sig.Z or q % 4 != 3:
            continue
        if all(jacobi(p, q) == e for p, e in sig.values if e != 0):
            out.append((q, generates_all_squares(q, positives)))
    return out
