import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fluctuon import convex, ising
from fluctuon.grid import GridFunction


def brute_conjugate(x, fx, y):
    # independent oracle: explicit double loop
    out = []
    for yy in y:
        best = -np.inf
        for xi, fi in zip(x, fx):
            if np.isfinite(fi):
                best = max(best, xi * yy - fi)
        out.append(best)
    return np.array(out)


def test_self_dual_quadratic():
    f = GridFunction.sample(lambda x: x * x / 2, -5.0, 5.0, 2001)
    g = convex.legendre(f, -3.0, 3.0, 601)
    assert np.max(np.abs(g.values - g.x ** 2 / 2)) < 5e-3


def test_support_function_of_interval():
    f = GridFunction.sample(np.zeros_like, -1.0, 1.0, 201)
    g = convex.legendre(f, -2.0, 2.0, 81)
    assert np.allclose(g.values, np.abs(g.x), atol=1e-15)


def test_ising_biconjugate():
    e = ising.pressure_grid(1.0, 1.0, 0.5, -1.0, 2.0, 3001)
    slope = float(np.max(np.abs(convex.secant_slopes(e))))
    rate = convex.legendre(e, -slope, slope, 20001)
    back = convex.legendre(rate, -1.0, 2.0, 3001)
    assert np.max(np.abs(back.values - e.values)) < 1e-6


def test_all_infinite_rejected():
    with pytest.raises(ValueError, match="empty effective domain"):
        GridFunction(0.0, 1.0, np.array([np.inf, np.inf]))


def test_infinite_nodes_skipped():
    vals = np.array([np.inf, 1.0, 0.0, 1.0, np.inf])
    f = GridFunction(-2.0, 2.0, vals)
    g = convex.legendre(f, -1.0, 1.0, 3)
    assert np.allclose(g.values, [0.0, 0.0, 0.0])


def test_first_index_tie_break():
    f = GridFunction.sample(np.zeros_like, -1.0, 1.0, 5)
    assert convex.legendre_argmax(f, [0.0])[0] == -1.0


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=3, max_size=30), st.floats(-3, 3))
def test_transform_matches_brute_force(vals, y0):
    f = GridFunction(-1.0, 1.0, np.array(vals))
    y = np.linspace(y0 - 1, y0 + 1, 7)
    g = convex.legendre(f, y[0], y[-1], 7)
    assert np.allclose(g.values, brute_conjugate(f.x, f.values, y), atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=3, max_size=40))
def test_transform_is_convex_and_fenchel_young(vals):
    f = GridFunction(-1.0, 1.0, np.array(vals))
    g = convex.legendre(f, -4.0, 4.0, 161)
    assert convex.is_discretely_convex(g)
    # f(x) + g(y) >= x y at every pair of nodes
    assert np.all(f.values[:, None] + g.values[None, :] >= np.outer(f.x, g.x) - 1e-12)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=3, max_size=40))
def test_hull_is_largest_convex_minorant(vals):
    f = GridFunction(-1.0, 1.0, np.array(vals))
    h = convex.convex_hull(f)
    assert np.all(h.values <= f.values + 1e-12)
    assert convex.is_discretely_convex(h, tol=1e-9)
    # biconjugate on the same nodes, with a dual grid wide enough to cover every chord slope
    slope = 2 * 6 / f.spacing
    ff = convex.legendre(convex.legendre(f, -slope, slope, 200001), -1.0, 1.0, f.n)
    assert np.max(np.abs(ff.values - h.values)) <= 2 * (2 * slope / 200000) * 1.0 + 1e-9


def test_hull_of_convex_is_identity():
    f = GridFunction.sample(lambda x: np.exp(x), -1.0, 1.0, 101)
    assert np.max(np.abs(convex.convex_hull(f).values - f.values)) < 1e-12


def test_hull_of_double_well_bridges():
    f = GridFunction.sample(lambda x: (x * x - 1) ** 2, -2.0, 2.0, 401)
    h = convex.convex_hull(f)
    inside = np.abs(f.x) <= 1
    assert np.max(np.abs(h.values[inside])) < 1e-12


def test_structure_data_zero_pressure():
    e = GridFunction.sample(np.zeros_like, -1.0, 2.0, 301)
    sd = convex.structure_data(e)
    assert sd.s_star == 0 and sd.s0_lower == 0 and sd.s1_lower == 0


def test_structure_data_ising_and_swap():
    e = ising.pressure_grid(1.0, 1.0, 0.5, -1.0, 2.0, 3001)
    sd = convex.structure_data(e)
    assert abs(sd.s_star + ising.entropic_pressure(1.0, 1.0, 0.5, 0.5)) < 1e-12
    assert abs(sd.s0_lower - sd.s1_lower) < 1e-12
    assert sd.s_star <= min(sd.s0_lower, sd.s1_lower)
    assert sd.s0_lower <= sd.s0_upper and sd.s1_lower <= sd.s1_upper
    # swapping alpha -> 1 - alpha exchanges the pairs
    g = GridFunction.sample(lambda a: 0.3 * a * (a - 1) + 0.1 * a ** 2 * (a - 1), -1.0, 2.0, 3001)
    gs = GridFunction.sample(lambda a: 0.3 * (1 - a) * (-a) + 0.1 * (1 - a) ** 2 * (-a), -1.0, 2.0, 3001)
    s1, s2 = convex.structure_data(g), convex.structure_data(gs)
    assert abs(s1.s0_lower - s2.s1_lower) < 1e-9 and abs(s1.s1_upper - s2.s0_upper) < 1e-9


def test_structure_data_gate():
    e = GridFunction.sample(lambda a: a * (a - 1), 0.05, 2.0, 100)
    with pytest.raises(ValueError):
        convex.structure_data(e)
    with pytest.raises(ValueError):
        convex.structure_data(GridFunction.sample(lambda a: a * (a - 1) + 1e-3, -1.0, 2.0, 301))


def test_hoeffding_f_values():
    e = ising.pressure_grid(1.0, 1.0, 0.5, -1.0, 2.0, 3001)
    sd = convex.structure_data(e)
    assert abs(convex.hoeffding_f(e, sd.s_star) - sd.s_star) < 1e-9
    assert convex.hoeffding_f(e, sd.s1_lower * 1.01) == pytest.approx(0.0, abs=1e-12)
    assert convex.hoeffding_f(e, -0.1) == np.inf
    u = np.linspace(0, 0.9 * sd.s0_lower, 50)
    f = convex.hoeffding_f(e, u)
    assert np.all(np.diff(f) <= 1e-12) and np.all(f >= 0)
    # involution: f(f(u)) = u
    ff = convex.hoeffding_f(e, f)
    assert np.max(np.abs(ff - u)) < 5e-3
    assert np.allclose(convex.hoeffding_g(e, u), f - u)


def test_check_fr_rates():
    I = GridFunction.sample(lambda s: (s - 0.3) ** 2, -1.0, 1.0, 11)
    assert convex.check_fr_rates(I, I.with_values(I.values + I.x)) == 0.0
    with pytest.raises(ValueError):
        convex.check_fr_rates(I, GridFunction.sample(lambda s: s, -1.0, 1.0, 12))


def test_gartner_ellis_parabola():
    e = GridFunction.sample(lambda a: a * (a - 1), -1.0, 2.0, 3001)
    I, I_hat, (lo, hi) = convex.gartner_ellis_rate(e, (-1.0, 1.0, 201))
    s = I.x
    assert np.max(np.abs(I.values - (s - 1) ** 2 / 4)) < 1e-6
    assert np.allclose(I_hat.values, I.values + s)
    # extreme slopes of alpha (alpha - 1) on [-1, 2] are -3 and 3
    assert lo == pytest.approx(-3.0, abs=2e-3) and hi == pytest.approx(3.0, abs=2e-3)


def test_gartner_ellis_degenerate():
    e = GridFunction.sample(np.zeros_like, -1.0, 2.0, 301)
    I, _, _ = convex.gartner_ellis_rate(e, (-1.0, 1.0, 21))
    assert I.values[10] == 0.0
    assert np.all(np.isinf(np.delete(I.values, 10)))


def test_gartner_ellis_rejects_kink_and_infinite():
    kinked = GridFunction.sample(lambda a: np.abs(a - 0.5) - 0.5, -1.0, 2.0, 301)
    with pytest.raises(ValueError):
        convex.gartner_ellis_rate(kinked, (-1.0, 1.0, 21))
    vals = np.where(np.linspace(-1, 2, 301) < 0, np.inf, 0.0)
    with pytest.raises(ValueError):
        convex.gartner_ellis_rate(GridFunction(-1.0, 2.0, vals), (-1.0, 1.0, 21))


def test_csv_roundtrip(tmp_path):
    vals = np.array([0.1, np.inf, -3.3333333333333335e-7, 1e300])
    f = GridFunction(-1.0, 2.0, vals)
    path = tmp_path / "f.csv"
    f.to_csv(path)
    assert path.read_text().splitlines()[0] == "x,value,is_finite"
    g = GridFunction.from_csv(path)
    assert g.same_grid(f) and np.array_equal(g.values, f.values)


def test_find_kinks():
    f = GridFunction.sample(lambda a: np.abs(a - 0.5) + 0.1 * a * a, -1.0, 2.0, 301)
    assert [round(f.x[k], 6) for k in convex.find_kinks(f)] == [0.5]
    assert convex.find_kinks(GridFunction.sample(np.cosh, -1.0, 2.0, 301)) == []
