import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gausspaths.arith import EpsilonSignature, eta, eta_Z, is_square
from gausspaths.expsums import BudgetExceeded
from gausspaths.moments import (
    MomentOrder,
    beta,
    empirical_moment,
    limit_moment,
    majorant_total,
    majorant_weight,
)


def b(h, t):
    if h == 0:
        return t
    return (np.exp(2j * np.pi * h * t) - 1) / (2j * np.pi * h)


def brute_moment(order, H, weight):
    """Sum over every h-tuple in [-H, H]^u, weight(H) decides admissibility."""
    slots = order.slots()
    total = 0j
    for hs in itertools.product(range(-H, H + 1), repeat=len(slots)):
        prod_v = math.prod(1 - h for h in hs)
        w = weight(prod_v)
        if w == 0:
            continue
        term = float(w)
        for h, (t, conj) in zip(hs, slots):
            term *= np.conj(b(h, t)) if conj else b(h, t)
        total += term
    return total


def unconditioned(v):
    return eta(v) if v != 0 and is_square(abs(v)) else 0


def test_first_moment_against_brute_force():
    order = MomentOrder.single(0.37, 0, 1)
    assert abs(limit_moment(order, Hmax=400).value - brute_moment(order, 400, unconditioned)) < 1e-13


@pytest.mark.parametrize("order", [MomentOrder.single(0.3, 1, 1), MomentOrder((0.2, 0.7), (1, 0), (0, 1)), MomentOrder.single(0.6, 0, 2)])
def test_second_moments_against_brute_force(order):
    assert abs(limit_moment(order, Hmax=40).value - brute_moment(order, 40, unconditioned)) < 1e-12


def test_third_moment_against_brute_force():
    order = MomentOrder((0.25, 0.5), (1, 0), (1, 1))
    assert abs(limit_moment(order, Hmax=9).value - brute_moment(order, 9, unconditioned)) < 1e-12


def test_conditioned_against_brute_force():
    sig = EpsilonSignature.from_list([-1, 0, 1])
    order = MomentOrder.single(0.3, 1, 1)
    got = limit_moment(order, Hmax=30, sig=sig).value
    expected = brute_moment(order, 30, lambda v: eta_Z(v, sig))
    assert abs(got - expected) < 1e-12


def test_averaging_over_eps2_recovers_unconditioned():
    order = MomentOrder.single(0.3, 1, 1)
    plain = limit_moment(order, Hmax=3000).value
    split = [limit_moment(order, Hmax=3000, sig=EpsilonSignature.from_list([e])).value for e in (1, -1)]
    assert abs(plain - sum(split) / 2) < 1e-13


def test_hermitian_symmetry():
    a = limit_moment(MomentOrder.single(0.4, 0, 1), Hmax=2000).value
    c = limit_moment(MomentOrder.single(0.4, 1, 0), Hmax=2000).value
    assert abs(a - np.conj(c)) < 1e-14
    m = limit_moment(MomentOrder.single(0.4, 1, 1), Hmax=2000).value
    assert abs(m.imag) < 1e-14 and m.real > 0


def test_degree_zero_and_validation():
    assert limit_moment(MomentOrder.single(0.5, 0, 0)).value == 1
    with pytest.raises(ValueError):
        MomentOrder.single(0.5, 4, 3)
    with pytest.raises(ValueError):
        MomentOrder((0.1, 0.2), (1,), (1, 1))
    with pytest.raises(BudgetExceeded):
        limit_moment(MomentOrder.single(0.5, 2, 2), Hmax=1000)


def test_error_bound_covers_truncation_and_shrinks():
    order = MomentOrder.single(0.3, 1, 1)
    coarse = limit_moment(order, Hmax=300)
    fine = limit_moment(order, Hmax=30000)
    assert abs(coarse.value - fine.value) <= coarse.error_bound
    assert fine.error_bound < coarse.error_bound / 5


@settings(max_examples=80)
@given(st.integers(-10**6, 10**6), st.floats(0, 1))
def test_majorant_dominates_beta(v, t):
    if v == 0:
        return
    assert abs(beta(np.array([1 - v]), t)[0]) <= majorant_weight(np.array([v]))[0] + 1e-15


def test_majorant_total_one_slot():
    # one slot: v = +-f^2, pair weights 1 + 1/(2 pi) at f = 1 and kappa/f^2 beyond
    kappa = 8 / (3 * math.pi)
    expected = 1 + 1 / (2 * math.pi) + kappa * (math.pi**2 / 6 - 1)
    assert majorant_total(1, None) == pytest.approx(expected, rel=1e-6)


def test_empirical_close_to_limit():
    order = MomentOrder.single(0.3, 1, 1)
    lim = limit_moment(order).value
    assert abs(empirical_moment(order, 2000) - lim) < 0.01
