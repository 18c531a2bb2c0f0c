import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import logsumexp

from fluctuon import convex, ising


def enumerate_chain(beta, J, h, N):
    """Oracle: log-weights and magnetizations of all 2^N free-boundary configurations."""
    spins = np.array(list(itertools.product((1, -1), repeat=N)), dtype=float)
    logw = beta * J * np.sum(spins[:, :-1] * spins[:, 1:], axis=1) + beta * h * spins.sum(axis=1)
    return logw, spins.sum(axis=1)


params = st.tuples(st.floats(0.1, 2.0), st.floats(0.1, 2.0), st.floats(-1.5, 1.5))


def test_small_volume_examples():
    b, J, h = 0.7, 1.1, 0.3
    # N = 2: four configurations written out
    z2 = (np.exp(b * J + 2 * b * h) + np.exp(b * J - 2 * b * h) + 2 * np.exp(-b * J))
    assert abs(ising.log_partition(b, J, h, 2) - np.log(z2)) < 1e-14
    logw, _ = enumerate_chain(b, J, h, 3)
    assert abs(ising.log_partition(b, J, h, 3) - logsumexp(logw)) < 1e-14


@settings(max_examples=30, deadline=None)
@given(params, st.integers(2, 12))
def test_transfer_matrix_matches_enumeration(p, N):
    b, J, h = p
    logw, _ = enumerate_chain(b, J, h, N)
    assert abs(ising.log_partition(b, J, h, N) - logsumexp(logw)) < 1e-11 * max(1.0, N)


@settings(max_examples=30, deadline=None)
@given(params)
def test_pressure_even_in_field(p):
    b, J, h = p
    assert ising.pressure_closed(b, J, h) == pytest.approx(ising.pressure_closed(b, J, -h), abs=1e-14)
    assert abs(ising.magnetization(b, J, h) + ising.magnetization(b, J, -h)) < 1e-14


def test_zero_field_closed_form():
    b, J = 0.9, 1.3
    want = np.log(2 * np.cosh(b * J)) / b
    assert abs(ising.pressure_closed(b, J, 0.0) - want) < 1e-14


@pytest.mark.parametrize("b,J,h", [(1.0, 1.0, 0.5), (0.3, 2.0, -1.2), (2.0, 0.5, 0.05)])
def test_closed_form_vs_transfer(b, J, h):
    assert abs(ising.pressure_closed(b, J, h) - ising.pressure_finite(b, J, h, 100_000)) < 1e-4
    # the free-boundary error decays like 1/N
    e1 = abs(ising.pressure_closed(b, J, h) - ising.pressure_finite(b, J, h, 1000))
    e2 = abs(ising.pressure_closed(b, J, h) - ising.pressure_finite(b, J, h, 10_000))
    assert 8 < e1 / e2 < 12


def test_large_field_no_overflow():
    v = ising.pressure_closed(5.0, 3.0, 400.0)
    assert np.isfinite(v) and abs(v - (3.0 + 400.0)) < 1e-9
    assert np.isfinite(ising.log_partition(5.0, 3.0, 400.0, 1_000_000))


@pytest.mark.parametrize("N", [2, 7, 12, 18])
def test_jarzynski_by_enumeration(N):
    b, J, h = 0.8, 1.0, 0.4
    logw, m = enumerate_chain(b, J, h, N)
    logw = logw - logsumexp(logw)
    assert abs(np.exp(logsumexp(logw - 2 * b * h * m)) - 1) < 1e-12


@pytest.mark.parametrize("N", [100, 1000, 10_000])
def test_jarzynski_by_transfer(N):
    assert abs(ising.finite_volume_renyi(0.8, 1.0, 0.4, N, 1.0)) < 1e-12


def test_finite_renyi_by_enumeration():
    b, J, h, N = 0.6, 0.9, -0.7, 10
    logw, m = enumerate_chain(b, J, h, N)
    logw = logw - logsumexp(logw)
    for a in (-0.8, 0.35, 1.6):
        want = logsumexp(logw - a * 2 * b * h * m)
        assert abs(ising.finite_volume_renyi(b, J, h, N, a) - want) < 1e-12


@settings(max_examples=25, deadline=None)
@given(params)
def test_entropic_pressure_convex_and_symmetric(p):
    b, J, h = p
    a = np.linspace(-1, 2, 301)
    e = ising.entropic_pressure(b, J, h, a)
    assert np.max(np.abs(e - e[::-1])) < 1e-12
    if abs(b * h) > 1e-2:
        assert np.all(np.diff(e, 2) > 0)
    assert np.all(e[(a >= 0) & (a <= 1)] <= 1e-15)


def test_mean_ep_rate_is_slope():
    b, J, h = 1.2, 0.7, 0.3
    d = 1e-6
    slope = (ising.entropic_pressure(b, J, h, d) - ising.entropic_pressure(b, J, h, -d)) / (2 * d)
    assert abs(-slope - ising.mean_ep_rate(b, J, h)) < 1e-8
    hh = 1e-6
    num = (ising.pressure_closed(b, J, h + hh) - ising.pressure_closed(b, J, h - hh)) / (2 * hh)
    assert abs(num - ising.magnetization(b, J, h)) < 1e-8


def test_rate_function():
    b, J, h = 1.0, 1.0, 0.5
    s = np.linspace(-1.5, 1.5, 301)
    I = ising.rate_function(b, J, h, (s[0], s[-1], s.size))
    fr = I.with_values(I.values + I.x)
    # I_hat(s) = I(-s) on the symmetric grid
    assert np.max(np.abs(fr.values - I.values[::-1])) < 1e-6
    k = np.argmin(I.values)
    assert abs(I.x[k] - ising.mean_ep_rate(b, J, h)) <= I.spacing
    assert 0 <= I.values[k] < I.spacing ** 2  # zero falls between nodes
    with pytest.raises(ValueError):
        ising.rate_function(b, J, 0.0, (-1.0, 1.0, 11))


def test_rate_transform_is_convex():
    I = ising.rate_function(0.5, 2.0, -0.4, (-1.0, 1.0, 401))
    assert convex.is_discretely_convex(I, tol=1e-9)


def test_parameter_validation():
    with pytest.raises(ValueError):
        ising.IsingParams(1.0, -1.0, 0.5)
    with pytest.raises(ValueError):
        ising.log_partition(1.0, 1.0, 0.5, 1)
    with pytest.raises(ValueError):
        ising.log_partition(1.0, 1.0, 0.5, ising.MAX_SPINS + 1)
