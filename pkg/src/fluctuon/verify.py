"""Quick invariant suites, one per module, used by ``fluctuon verify``."""

import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import convex, exponents, ising, markov, meanfield
from . import tent as tm
from .grid import GridFunction


@dataclass
class CheckResult:
    suite: str
    name: str
    ok: bool
    detail: str
    seconds: float


def _convex(rng):
    e = GridFunction.sample(lambda a: a * (a - 1.0), -1.0, 2.0, 3001)
    I = convex.rate_from_pressure(e, -1.0, 1.0, 401)
    I_hat = convex.legendre(e, -1.0, 1.0, 401)
    exact = (I.x - 1.0) ** 2 / 4.0
    yield "parabola transform", np.max(np.abs(I.values - exact)) < 1e-6, f"{np.max(np.abs(I.values - exact)):.2e}"
    yield "FR on symmetric pressure", convex.check_fr_rates(I, I_hat) < 1e-12, f"{convex.check_fr_rates(I, I_hat):.2e}"
    f = GridFunction.sample(lambda x: np.abs(x) + 0.1 * rng.standard_normal(x.shape), -1.0, 1.0, 201)
    ff = convex.legendre(convex.legendre(f, -3.0, 3.0, 2001), -1.0, 1.0, 201)
    gap = float(np.max(np.abs(ff.values - convex.convex_hull(f).values)))
    yield "biconjugate equals hull", gap < 1e-2, f"{gap:.2e}"


def _markov(rng):
    worst_j = worst_r = 0.0
    for _ in range(5):
        m = markov.random_chain(int(rng.integers(2, 5)), rng)
        law, law_hat = markov.path_laws(m, 6)
        worst_j = max(worst_j, abs(np.sum(law.probs * np.exp(-law.values)) - 1.0))
        a = float(rng.uniform(-1, 2))
        worst_r = max(worst_r, abs(markov.renyi_entropy(m, 6, a) - markov.renyi_entropy(m, 6, 1 - a)))
    yield "Jarzynski identity t=6", worst_j < 1e-12, f"{worst_j:.2e}"
    yield "transient FR e_t(a)=e_t(1-a)", worst_r < 1e-12, f"{worst_r:.2e}"
    m = markov.biased_cycle()
    gap = max(abs(markov.renyi_entropy(m, 200, a) / 200 - markov.entropic_pressure(m, a))
              for a in np.linspace(-1, 2, 13))
    yield "spectral vs Renyi/t at t=200", gap < 0.01, f"{gap:.2e}"


def _gas(rng):
    nu = rng.uniform(0.01, 1.0, 10)
    err = max(abs(meanfield.pressure(1.5, -2 + v) - meanfield.pressure(1.5, -2 - v) - v) for v in nu)
    yield "pressure identity", err < 1e-10, f"{err:.2e}"
    counts = (len(meanfield.critical_set(0.9, -2.0)), len(meanfield.critical_set(1.8, -2.0)))
    yield "critical set 1 -> 3 across beta=1", counts == (1, 3), str(counts)
    fr = float(np.max(np.abs(meanfield.rate_function(1.8, -1.8, -np.linspace(0, 0.3, 7))
                             - meanfield.rate_function(1.8, -1.8, np.linspace(0, 0.3, 7))
                             - np.linspace(0, 0.3, 7))))
    yield "rate FR", fr < 1e-12, f"{fr:.2e}"


def _ising(rng):
    gap = abs(ising.pressure_closed(1.0, 1.0, 0.5) - ising.pressure_finite(1.0, 1.0, 0.5, 10_000))
    yield "closed form vs transfer matrix", gap < 1e-3, f"{gap:.2e}"
    jz = abs(ising.finite_volume_renyi(1.0, 1.0, 0.5, 1000, 1.0))
    yield "Jarzynski N=1000", jz < 1e-12, f"{jz:.2e}"


def _tent(rng):
    ok = all(tm.fixed_points(t).verify() for t in range(1, 13))
    yield "Fix(phi^t) exact for t<=12", ok, ""
    yield "phi^3(2/7) = 2/7", tm.tent_iter(Fraction(2, 7), 3) == Fraction(2, 7), ""
    err = 0.0
    for x in rng.random(200):
        err = max(err, abs(float(tm.induce_X(tm.induce_T(x, 40))) - x))
    yield "X(T(x)) = x", err <= 2.0 ** -38, f"{err:.2e}"
    p13 = tm.pressure_approx(tm.TentPotential(0.7), 0.0, 13)
    yield "p_13(0) near log 2", abs(p13 - np.log(2)) < 0.06, f"{p13 - np.log(2):.2e}"
    km, kp = tm.critical_brackets(0.5)
    yield "kappa_minus <= kappa_plus", km <= kp, f"{km:.4f} {kp:.4f}"


def _square(rng):
    a = np.linspace(-1, 2, 61)
    e = tm.square_entropic_pressure(0.9, 0.1, 1.2, 0.7, a, t=11)
    sym = float(np.max(np.abs(e - e[::-1])))
    yield "e(a) = e(1-a)", sym < 1e-10, f"{sym:.2e}"
    inside = e[(a >= 0) & (a <= 1)]
    yield "e <= 0 on [0, 1]", bool(np.all(inside <= 1e-12)), f"{inside.max():.2e}"


def _exponents(rng):
    worst = 0.0
    for _ in range(5):
        law = markov.sigma_law(markov.random_chain(3, rng), 2)
        d = exponents.optimal_test(law)
        worst = max(worst, abs(d - exponents.exhaustive_search(law)),
                    abs(d + exponents.total_variation(law) - 1.0))
    yield "optimal test = exhaustive = 1 - tv", worst < 1e-12, f"{worst:.2e}"


SUITES = {
    "convex": _convex,
    "markov": _markov,
    "gas": _gas,
    "ising": _ising,
    "tent": _tent,
    "square": _square,
    "exponents": _exponents,
}


def run_suites(names=None, seed=0):
    """Run the named suites (all by default); returns a list of :class:`CheckResult`."""
    names = list(SUITES) if not names else names
    out = []
    for name in names:
        if name not in SUITES:
            raise KeyError(f"unknown suite {name!r}")
        rng = np.random.default_rng(seed)
        t0 = time.perf_counter()
        for check, ok, detail in SUITES[name](rng):
            t1 = time.perf_counter()
            out.append(CheckResult(name, check, bool(ok), detail, t1 - t0))
            t0 = t1
    return out
