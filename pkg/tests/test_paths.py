import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gausspaths.arith import enumerate_family, eps_signature, jacobi, squarefree_one_mod_four
from gausspaths.atlas import gsharp_grid
from gausspaths.paths import (
    completed_tilde,
    family_values,
    gauss_path,
    path_eval,
    path_grid,
    sup_distance,
    tilde_path_eval,
)

MODULI = squarefree_one_mod_four(5, 3000).tolist()


def naive_nodes(c):
    """Partial sums straight from the definition, one exp per term."""
    m = np.arange(1, c)
    chi = np.array([jacobi(int(k), c) for k in m])
    return np.concatenate([[0], np.cumsum(chi * np.exp(2j * np.pi * m / c))]) / math.sqrt(c)


@pytest.mark.parametrize("c", [5, 13, 21, 105, 1001, 2021])
def test_nodes_match_definition(c):
    assert np.allclose(gauss_path(c), naive_nodes(c), atol=1e-12)


def test_small_examples():
    g = gauss_path(13)
    assert path_eval(13, 0.0) == 0
    assert abs(path_eval(13, 1.0) - 1) < 1e-12
    assert abs(path_eval(13, Fraction(1, 24)) - (g[0] + g[1]) / 2) < 1e-15
    for j in range(13):
        assert tilde_path_eval(13, j / 12) == pytest.approx(g[j], abs=1e-15)


def test_grid_matches_pointwise():
    s = path_grid(13, 12)
    assert np.allclose(s.values, gauss_path(13), atol=1e-14)
    s = path_grid(2021, 37)
    pts = [path_eval(2021, Fraction(i, 37)) for i in range(38)]
    assert np.allclose(s.values, pts, atol=1e-13)


def test_family_values_match_single_evaluation():
    cs = enumerate_family(500)[:25]
    ts = np.array([0.0, 0.1, 0.3, 0.77, 1.0])
    vals = family_values(cs, ts)
    for row, c in enumerate(cs):
        assert np.allclose(vals[row], [path_eval(int(c), t) for t in ts], atol=1e-13)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(MODULI))
def test_endpoint_is_one(c):
    assert abs(gauss_path(c)[-1] - 1) < 1e-9


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(MODULI), st.floats(0, 1))
def test_reflection(c, t):
    assert abs(path_eval(c, 1 - t) - (1 - np.conj(path_eval(c, t)))) < 1e-9


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([c for c in MODULI if c < 400]), st.floats(0, 1))
def test_completion_identity(c, t):
    assert abs(tilde_path_eval(c, t) - completed_tilde(c, t)) < 1e-9


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(MODULI), st.floats(0, 1))
def test_sharp_cutoff_close_to_polygon(c, t):
    assert abs(path_eval(c, t) - tilde_path_eval(c, t)) <= c**-0.5 + 1e-12


@pytest.mark.parametrize("c", [1001, 65541, 163841])
def test_sharp_cutoff_is_logarithmically_bounded(c):
    assert np.max(np.abs(gauss_path(c))) <= 5 * math.log(c)


def test_compensated_summation_agrees():
    c = 1_000_001
    idx = np.array([c // 3, c - 1])
    from gausspaths.paths import _walk

    plain = _walk(c, idx, False)
    comp = _walk(c, idx, True)
    assert np.max(np.abs(plain - comp)) / math.sqrt(c) < 1e-9


def test_rejects_bad_moduli():
    for c in (12, 9 * 5 * 5, 7, 1):
        with pytest.raises(ValueError):
            gauss_path(c)
    with pytest.raises(ValueError):
        path_eval(13, 1.5)


def test_sup_distance_regression_baseline():
    # frozen from one run of this code; guards against silent changes
    sig = eps_signature(17393, 7)
    d = sup_distance(path_grid(17393, 4096), gsharp_grid(sig, 4096))
    assert d == pytest.approx(0.18818975209091832, rel=1e-9)
    with pytest.raises(ValueError):
        sup_distance(path_grid(13, 4), path_grid(13, 8))
