import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gausspaths.arith import EpsilonSignature, enumerate_signatures, smooth_numbers
from gausspaths.atlas import (
    atlas,
    choose_cutoff,
    gsharp_eval,
    gsharp_grid,
    gsharp_increment,
    limit_series,
    local_slope_probe,
    signature_count,
    tail_bound,
)

SIG = EpsilonSignature.from_list([1, 1, -1])


def g(n, t):
    return (np.exp(2j * np.pi * (n + 1) * t) - 1) / (2j * np.pi * (n + 1))


def slow_gsharp(sig, t, bound):
    """Straight sum over smooth n of both signs with |n| <= bound."""
    total = t + 0j
    for k in smooth_numbers(sig.support, bound):
        e = sig.eps_of(k)
        total += e * g(k, t)
        if k > 1:
            total += e * g(-k, t)
    return total


def test_matches_straight_summation():
    s = limit_series(SIG, 1e-4)
    for t in (0.0, 0.1, 1 / 3, 0.5, 0.9, 1.0):
        assert abs(gsharp_eval(SIG, t) - slow_gsharp(SIG, t, s.cutoff)) < 1e-11


def test_tail_bound_is_certified_and_honest():
    for tol in (1e-3, 1e-5, 1e-7):
        s = limit_series(SIG, tol)
        assert s.tail_bound <= tol
        assert tail_bound(SIG.support, s.cutoff // 2) > tol
        # the actual truncation error is within the bound
        far = slow_gsharp(SIG, 0.3, s.cutoff * 64)
        near = slow_gsharp(SIG, 0.3, s.cutoff)
        assert abs(far - near) <= s.tail_bound


def test_single_prime_tail():
    sig = EpsilonSignature.from_list([1])
    B, bound, smooth = choose_cutoff(sig.support, 1e-3)
    assert smooth == [2**k for k in range(B.bit_length())]
    b1 = (B + 1) ** 2
    assert bound == pytest.approx(2 / math.pi * b1 / (b1 - 1) / B, rel=1e-9)


def test_endpoints_and_reflection():
    for sig in list(enumerate_signatures(5))[:6]:
        s = gsharp_grid(sig, 256)
        assert s.values[0] == 0 and s.values[-1] == 1
        assert np.allclose(s.values[::-1], 1 - np.conj(s.values), atol=1e-12)


def test_grid_agrees_with_pointwise():
    s = gsharp_grid(SIG, 64, 1e-6)
    pts = [gsharp_eval(SIG, i / 64, 1e-6) for i in range(65)]
    assert np.allclose(s.values, pts, atol=1e-10)


@settings(max_examples=60)
@given(st.integers(-10**6, 10**6), st.floats(0, 1), st.floats(0, 1))
def test_term_increment_bound(n, t, t0):
    if n in (-1,):
        return
    d = abs(g(n, t) - g(n, t0))
    assert d <= min(abs(t - t0), 1 / (math.pi * abs(n + 1))) + 1e-12


@pytest.mark.parametrize("h", [1e-3, -1e-3, 1e-6, -2.5e-5])
def test_increment_matches_difference(h):
    t0 = 1 / 23
    diff = gsharp_eval(SIG, t0 + h, 1e-7) - gsharp_eval(SIG, t0, 1e-7)
    assert abs(gsharp_increment(SIG, 1, 23, h, 1e-7) - diff) < 1e-9


def test_probe_rejects_bad_offsets():
    with pytest.raises(ValueError):
        local_slope_probe(SIG, 1, 23, [0.0])


def test_atlas_count():
    assert signature_count(5) == 18 == len(atlas(5, 32))
    assert signature_count(7) == 54
