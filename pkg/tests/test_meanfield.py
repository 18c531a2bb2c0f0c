import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import logsumexp

from fluctuon import convex, meanfield
from fluctuon.grid import GridFunction


def brute_log_partition(beta, mu, V):
    """Oracle: sum over all occupation vectors with the pair energy written out."""
    terms = []
    for occ in itertools.product((0, 1), repeat=V):
        pairs = sum(occ[i] * occ[j] for i in range(V) for j in range(i + 1, V))
        energy = -4.0 * pairs / (V - 1)
        terms.append(beta * (-energy + mu * sum(occ)))
    return float(logsumexp(terms))


def brute_pressure(beta, mu, n=1_000_001):
    r = np.linspace(0.0, 1.0, n)
    return float(np.max(meanfield.F(beta, mu, r)) / beta)


betas = st.floats(0.2, 3.0)
mus = st.floats(-5.0, 1.0)


def test_F_examples():
    assert meanfield.F(1.0, -2.0, 0.5) == pytest.approx(np.log(2) - 0.5, abs=1e-15)
    assert meanfield.F(1.3, 0.4, 0.0) == 0.0
    assert meanfield.F(1.3, 0.4, 1.0) == pytest.approx(1.3 * 2.4, abs=1e-15)


@settings(max_examples=40, deadline=None)
@given(betas, st.floats(0.0, 1.0))
def test_F_particle_hole_symmetry(beta, r):
    # particle-hole: F(beta, -2 - nu, 1 - r) = F(beta, -2 + nu, r) - beta nu
    nu = 0.7
    lhs = meanfield.F(beta, -2.0 - nu, 1 - r)
    rhs = meanfield.F(beta, -2.0 + nu, r) - beta * nu
    assert abs(lhs - rhs) < 1e-12


@settings(max_examples=30, deadline=None)
@given(betas, mus)
def test_pressure_matches_dense_scan(beta, mu):
    # the scan is a lower bound; near r = 1 its node spacing limits accuracy
    gap = meanfield.pressure(beta, mu) - brute_pressure(beta, mu, 200_001)
    assert -1e-12 <= gap < 1e-6


def test_pressure_dense_oracle_million():
    for mu in (-3.0, -2.0, -1.2):
        assert abs(meanfield.pressure(0.5, mu) - brute_pressure(0.5, mu)) < 1e-11


@settings(max_examples=40, deadline=None)
@given(betas, st.floats(0.0, 3.0))
def test_pressure_identity(beta, nu):
    lhs = meanfield.pressure(beta, -2.0 + nu) - meanfield.pressure(beta, -2.0 - nu)
    assert abs(lhs - nu) < 1e-10


def test_critical_counts_and_g_curve():
    assert len(meanfield.critical_set(0.9, -2.0)) == 1
    assert len(meanfield.critical_set(1.8, -2.0)) == 3
    assert meanfield.g_curve(0.8) == 0.0
    beta = 2.0
    g = meanfield.g_curve(beta)
    assert g > 0
    # three roots strictly inside the window |1 + mu / 2| < g, one outside
    for sign in (1, -1):
        assert len(meanfield.critical_set(beta, -2.0 + sign * 1.98 * g)) == 3
        assert len(meanfield.critical_set(beta, -2.0 + sign * 2.02 * g)) == 1


@settings(max_examples=40, deadline=None)
@given(betas, mus)
def test_critical_points_are_stationary(beta, mu):
    for r in meanfield.critical_set(beta, mu):
        assert 0 < r < 1
        grad = beta * (4 * r + mu) - np.log(r / (1 - r))
        assert abs(grad) < 1e-9 * max(1.0, beta * 6)


def test_rho_symmetry_and_limits():
    beta = 1.7
    for nu in (0.05, 0.3, 1.5):
        assert abs(meanfield.rho(beta, -2 + nu) + meanfield.rho(beta, -2 - nu) - 1) < 1e-12
    lo, hi = meanfield.rho_limits(beta)
    assert lo < 0.5 < hi and abs(lo + hi - 1) < 1e-12
    assert abs(meanfield.rho(beta, -2 - 1e-9) - lo) < 1e-6
    assert abs(meanfield.rho(beta, -2 + 1e-9) - hi) < 1e-6
    assert meanfield.rho(beta, -2.0) == 0.5
    lo, hi = meanfield.rho_limits(0.8)
    assert lo == pytest.approx(0.5) and hi == pytest.approx(0.5)


@pytest.mark.parametrize("V", [3, 5, 8, 12])
def test_log_partition_matches_enumeration(V):
    for beta, mu in ((0.7, -2.3), (1.6, -1.5), (2.2, 0.4)):
        assert abs(meanfield.log_partition(beta, mu, V) - brute_log_partition(beta, mu, V)) < 1e-11


def test_volume_validation():
    with pytest.raises(ValueError):
        meanfield.log_partition(1.0, -2.0, 1)
    with pytest.raises(ValueError, match="cap"):
        meanfield.log_partition(1.0, -2.0, meanfield.MAX_VOLUME + 1)
    with pytest.raises(ValueError):
        meanfield.GasParams(0.0, 1.0)


def test_finite_volume_convergence():
    beta, mu = 0.7, -1.3
    p = meanfield.pressure(beta, mu)
    errs = [abs(meanfield.pressure_finite(beta, mu, V) - p) for V in (1000, 10_000, 100_000)]
    assert errs[1] < errs[0] and errs[2] < errs[1]
    # the error scales like log(V) / V
    assert errs[2] < 2e-4


@settings(max_examples=25, deadline=None)
@given(betas, mus, st.floats(-1.0, 2.0))
def test_finite_volume_renyi_fr_and_jarzynski(beta, mu, alpha):
    V = 40
    a = meanfield.finite_volume_renyi(beta, mu, V, alpha)
    b = meanfield.finite_volume_renyi(beta, mu, V, 1 - alpha)
    assert abs(a - b) < 1e-8 * max(1.0, abs(a))
    assert meanfield.finite_volume_renyi(beta, mu, V, 1.0) == 0.0


def test_finite_volume_renyi_by_enumeration():
    beta, mu, V = 1.4, -1.1, 9
    logw = []
    sig = []
    for occ in itertools.product((0, 1), repeat=V):
        N = sum(occ)
        logw.append(beta * (2 * N * (N - 1) / (V - 1) + mu * N))
        sig.append(beta * (mu + 2) * (2 * N - V))
    logw = np.array(logw) - logsumexp(logw)
    sig = np.array(sig)
    for a in (-0.5, 0.3, 1.2):
        want = float(logsumexp(logw - a * sig))
        assert abs(meanfield.finite_volume_renyi(beta, mu, V, a) - want) < 1e-11


def test_entropic_pressure_limit_and_symmetry():
    beta, mu = 0.8, -1.4
    for a in (-0.6, 0.25, 1.4):
        e = meanfield.entropic_pressure(beta, mu, a)
        assert abs(e - meanfield.entropic_pressure(beta, mu, 1 - a)) < 1e-10
        assert abs(meanfield.finite_volume_renyi(beta, mu, 100_000, a) / 100_000 - e) < 1e-3
    assert meanfield.entropic_pressure(beta, -2.0, 0.4) == 0.0


def test_kink_in_pressure_at_coexistence():
    beta = 1.8
    h = 1e-7
    left = (meanfield.pressure(beta, -2.0) - meanfield.pressure(beta, -2.0 - h)) / h
    right = (meanfield.pressure(beta, -2.0 + h) - meanfield.pressure(beta, -2.0)) / h
    lo, hi = meanfield.rho_limits(beta)
    assert abs(left - lo) < 1e-5 and abs(right - hi) < 1e-5
    assert right - left > 0.5


def test_rate_zero_and_fr():
    beta, mu = 1.3, -1.2
    r = meanfield.rho(beta, mu)
    s0 = beta * (mu + 2) * (2 * r - 1)
    assert meanfield.rate_function(beta, mu, s0) < 1e-12
    s = np.linspace(0, abs(beta * (mu + 2)), 41)
    fr = meanfield.rate_function(beta, mu, -s) - meanfield.rate_function(beta, mu, s) - s
    assert np.max(np.abs(fr)) < 1e-12
    assert np.isinf(meanfield.rate_function(beta, mu, 1.01 * beta * (mu + 2)))
    with pytest.raises(ValueError, match="degenerate"):
        meanfield.rate_function(beta, -2.0, 0.1)
    assert np.all(np.isfinite(meanfield.rate_function_shat(beta, -2.0, np.linspace(-1, 1, 11))))


def test_rate_reproduces_pressure_after_transform():
    beta, mu = 0.7, -1.5
    smax = beta * (mu + 2)
    I = GridFunction.sample(lambda s: meanfield.rate_function(beta, mu, s), -smax, smax, 4001)
    e = convex.pressure_from_rate(I, -1.0, 2.0, 61)
    want = np.array([meanfield.entropic_pressure(beta, mu, a) for a in e.x])
    assert np.max(np.abs(e.values - want)) < 1e-5


def test_concave_window():
    assert meanfield.concave_window(0.9, -1.0) == 0.0
    beta, mu = 1.8, -1.8
    w = meanfield.concave_window(beta, mu)
    assert w == pytest.approx(0.2 * np.sqrt(1.8 * 0.8))
    s = np.linspace(-0.95 * w, 0.95 * w, 201)
    I = meanfield.rate_function(beta, mu, s)
    assert np.all(np.diff(I, 2) < 0)
    s_out = np.linspace(1.05 * w, 0.99 * beta * (mu + 2), 101)
    assert np.all(np.diff(meanfield.rate_function(beta, mu, s_out), 2) > 0)
