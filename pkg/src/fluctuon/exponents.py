"""Binary hypothesis testing between a chain and its reference process.

All finite-time quantities are computed from the exact law of ``sigma_t``.
Since ``dP_hat / dP = exp(-sigma)`` on every path, the reference law of an
atom is its forward weight times ``exp(-value)``, and tests may be taken
measurable with respect to ``sigma``.
"""

import itertools
from dataclasses import dataclass, field

import numpy as np

from .convex import hoeffding_f, structure_data
from .markov import as_pair, mean_ep_rate, path_laws, pressure_grid

EXHAUSTIVE_ATOMS = 16
EXHAUSTIVE_PATHS = 16


def _reference_weights(law):
    return law.probs * np.exp(-law.values)


def optimal_test(law):
    """Minimal total error ``P(G^c) + P_hat(G)``, attained by ``G = {sigma < 0}`` complement: ``E_P[min(1, exp(-sigma))]``."""
    return float(np.sum(law.probs * np.minimum(1.0, np.exp(-law.values))))


def total_variation(law):
    """``sup_A |P(A) - P_hat(A)| = (1/2) sum |dP - dP_hat|`` over atoms."""
    return float(0.5 * np.sum(np.abs(law.probs - _reference_weights(law))))


def np_split(law, c):
    """``P(sigma < c) + exp(c) P_hat(sigma >= c)``."""
    lo = law.values < c
    return float(np.sum(law.probs[lo]) + np.exp(c) * np.sum(_reference_weights(law)[~lo]))


def monotone_search(law, c=0.0):
    """Minimum of ``P(G^c) + exp(c) P_hat(G)`` over upper sets ``G = {sigma >= v}`` in the atom values."""
    p = law.probs
    q = np.exp(c) * _reference_weights(law)
    # G = atoms with index >= k, k = 0 .. n
    miss = np.concatenate([[0.0], np.cumsum(p)])
    false = np.concatenate([np.cumsum(q[::-1])[::-1], [0.0]])
    return float(np.min(miss + false))


def exhaustive_search(law, c=0.0):
    """Minimum of ``P(G^c) + exp(c) P_hat(G)`` over every subset ``G`` of atoms."""
    n = law.values.size
    if n > EXHAUSTIVE_ATOMS:
        raise ValueError(f"exhaustive search is capped at {EXHAUSTIVE_ATOMS} atoms")
    masks = (np.arange(2 ** n)[:, None] >> np.arange(n)[None, :]) & 1
    q = np.exp(c) * _reference_weights(law)
    cost = (1 - masks) @ law.probs + masks @ q
    return float(np.min(cost))


def _path_probabilities(pair, t):
    f, r = pair.forward, pair.reference
    n = f.n
    out_f, out_r = [], []
    for path in itertools.product(range(n), repeat=t):
        a = f.p[path[0]]
        b = r.p[path[0]]
        for x, y in zip(path[:-1], path[1:]):
            a *= f.P[x, y]
            b *= r.P[x, y]
        out_f.append(a)
        out_r.append(b)
    return np.array(out_f), np.array(out_r)


def exhaustive_path_test(model, t):
    """Minimal total error over all subsets of the path space (``n**t <= 16``)."""
    pair = as_pair(model)
    if pair.forward.n ** t > EXHAUSTIVE_PATHS:
        raise ValueError(f"path space larger than {EXHAUSTIVE_PATHS}")
    pf, pr = _path_probabilities(pair, t)
    m = pf.size
    masks = (np.arange(2 ** m)[:, None] >> np.arange(m)[None, :]) & 1
    return float(np.min((1 - masks) @ pf + masks @ pr))


@dataclass
class ExponentEstimate:
    """Finite-``t`` values of an exponent, their ``a + b / t`` fit and the limit they target."""

    quantity: str
    ts: list
    values: list
    extrapolated: float
    target: float
    monotone: bool

    @property
    def gap(self):
        return abs(self.extrapolated - self.target)

    def rows(self):
        out = [(t, self.quantity, v, self.target) for t, v in zip(self.ts, self.values)]
        out.append((np.inf, self.quantity + "_extrapolated", self.extrapolated, self.target))
        return out


def _extrapolate(ts, values):
    ts = np.asarray(ts, dtype=float)
    A = np.stack([np.ones_like(ts), 1.0 / ts], axis=1)
    coef, *_ = np.linalg.lstsq(A, np.asarray(values, dtype=float), rcond=None)
    return float(coef[0])


def _is_monotone(values):
    d = np.diff(values)
    return bool(np.all(d >= 0) or np.all(d <= 0))


def stein_exponent(model, t_list=(8, 10, 12), s_frac=0.99):
    """``(1/t) log P_hat(sigma_t >= s t)`` at ``s = s_frac * epr``; the limit is ``-epr``."""
    if len(t_list) < 3:
        raise ValueError("at least three values of t are needed for the 1/t trend")
    epr = mean_ep_rate(model)
    s = s_frac * epr
    vals = []
    for t in t_list:
        law = path_laws(model, t)[0]
        tail = np.sum(_reference_weights(law)[law.values >= s * t])
        vals.append(float(np.log(tail) / t))
    return ExponentEstimate("stein", list(t_list), vals, _extrapolate(t_list, vals), -epr,
                            _is_monotone(vals))


def chernoff_exponent(model, t_list=(4, 8, 12), alpha_grid=(-1.0, 2.0, 3001)):
    """``(1/t) log(1 - tv_t)``; the limit is ``inf_{[0,1]} e``, which equals ``e(1/2)`` for reversal pairs."""
    if len(t_list) < 3:
        raise ValueError("at least three values of t are needed for the 1/t trend")
    e = pressure_grid(model, *alpha_grid)
    inside = (e.x >= 0) & (e.x <= 1)
    target = float(np.min(e.values[inside]))
    vals = []
    for t in t_list:
        law = path_laws(model, t)[0]
        vals.append(float(np.log(1.0 - total_variation(law)) / t))
    return ExponentEstimate("chernoff", list(t_list), vals, _extrapolate(t_list, vals), target,
                            _is_monotone(vals))


def hoeffding_empirical(law, t, u):
    """Best ``(1/t) log P_hat(sigma_t >= c)`` over thresholds ``c`` with ``P(sigma_t < c) < exp(-u t)``."""
    if u < 0:
        return -np.inf
    p = law.probs
    q = _reference_weights(law)
    miss = np.concatenate([[0.0], np.cumsum(p)])[:-1]  # P(sigma < v_k)
    false = np.cumsum(q[::-1])[::-1]  # P_hat(sigma >= v_k)
    with np.errstate(divide="ignore"):
        ok = np.log(miss) / t < -u
    if not ok.any():
        return -np.inf
    return float(np.log(np.min(false[ok])) / t)


def hoeffding_curve(model, t, u_grid, alpha_grid=(-1.0, 2.0, 3001)):
    """Rows ``(u, empirical, target)`` with target ``-f(u)``; ``u < 0`` gives ``-inf`` in both."""
    e = pressure_grid(model, *alpha_grid)
    law = path_laws(model, t)[0]
    rows = []
    for u in np.atleast_1d(u_grid):
        u = float(u)
        if u < 0:
            rows.append((u, -np.inf, -np.inf))
            continue
        rows.append((u, hoeffding_empirical(law, t, u), -float(hoeffding_f(e, u))))
    return rows


@dataclass
class TestReport:
    d_opt: float
    tv: float
    stein: float
    chernoff_lower: float
    chernoff_upper: float
    hoeffding_samples: list = field(default_factory=list)


def build_report(model, t=12, t_list=(8, 10, 12), n_u=5, alpha_grid=(-1.0, 2.0, 3001)):
    """Collect the finite-``t`` testing quantities of a chain into a :class:`TestReport`."""
    law = path_laws(model, t)[0]
    st = stein_exponent(model, t_list)
    ch = chernoff_exponent(model, t_list, alpha_grid)
    sd = structure_data(pressure_grid(model, *alpha_grid))
    u_grid = np.linspace(0.1 * sd.s_star, 0.9 * sd.s1_lower, n_u) if sd.s1_lower > 0 else [0.0]
    hs = [(u, emp) for u, emp, _ in hoeffding_curve(model, t, u_grid, alpha_grid)]
    return TestReport(d_opt=optimal_test(law), tv=total_variation(law), stein=st.extrapolated,
                      chernoff_lower=min(ch.values), chernoff_upper=max(ch.values),
                      hoeffding_samples=hs)
