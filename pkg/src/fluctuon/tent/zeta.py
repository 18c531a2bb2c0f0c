"""Grand-canonical bounds for the tent-map pressure.

On the inducing interval ``I_t`` the induced potential ``v#`` is squeezed
between the envelopes

    v_lo(t) = -sum_{n=1}^{t+1} n^(-p),     v_hi(t) = 1 - sum_{n=1}^{t+2} n^(-p),

so the series ``D(kappa, mu) = sum_{t>=0} exp(-mu (t + 1) + kappa v(t)) - 1``
built on either envelope brackets the pressure and the critical coupling.
Only finite sums ``sum_{k<=m} k^(-p)`` are ever evaluated.
"""

import math

import numpy as np
from scipy.special import gammaincc, gammaln

from ..numerics import NumericalError, bisect

TAIL_RTOL = 1e-14
TERM_CAP = 400_000_000
XI_CAP = 10_000_000
_FIRST_CHUNK = 1 << 12
_MAX_CHUNK = 1 << 22


def _check(p, kappa, mu):
    if not 0 < p < 1:
        raise ValueError("p must lie in ]0, 1[")
    if kappa < 0 or mu < 0:
        raise ValueError("kappa and mu must be >= 0")
    if kappa == 0 and mu == 0:
        raise NumericalError("the series diverges at kappa = mu = 0")


def _log_tail(p, kappa, mu, m, h_m):
    """Log of an upper bound on ``sum_{n >= m} exp(-mu (n + 1) - kappa H(n + 1))``.

    Uses ``H(n + 1) >= H(m)`` with a geometric tail when ``mu > 0``, and
    ``H(x) >= ((x + 1)^(1-p) - 1) / (1 - p)`` with an incomplete-gamma integral
    when ``mu = 0``.
    """
    if mu > 0:
        return -mu * (m + 1) - kappa * h_m - math.log1p(-math.exp(-mu))
    q = 1.0 - p
    a = 1.0 / q
    c = kappa / q
    y = c * (m + 1.0) ** q
    Q = gammaincc(a, y)
    if Q == 0.0:
        return -np.inf if y > 1e3 else np.inf
    return c - math.log(q) + gammaln(a) - a * math.log(c) + math.log(Q)


def _series(p, kappa, mu, shift, sign_only=False):
    """``sum_{n>=0} exp(-mu (n + 1) - kappa (H(n + 1 + shift) - shift)) - 1``.

    ``shift = 0`` gives the lower envelope, ``shift = 1`` the upper one. With
    ``sign_only`` the summation stops as soon as the sign is certain.
    """
    _check(p, kappa, mu)
    total = 0.0
    h_prev = 1.0 if shift else 0.0  # H(shift)
    n0 = 0
    chunk = _FIRST_CHUNK
    while True:
        n = np.arange(n0, n0 + chunk, dtype=float)
        h = h_prev + np.cumsum((n + 1.0 + shift) ** (-p))
        terms = np.exp(-mu * (n + 1.0) - kappa * (h - shift))
        total += math.fsum(terms.tolist()) if chunk <= _FIRST_CHUNK else float(np.sum(terms))
        h_prev = float(h[-1])
        n0 += chunk
        log_tail = _log_tail(p, kappa, mu, n0, h_prev - shift)
        if shift and mu == 0:
            # H(n + 2) - 1 >= H(n + 1) - 1
            log_tail += kappa
        tail = math.exp(log_tail) if log_tail < 700 else np.inf
        if sign_only and (total > 1.0 or total + tail < 1.0):
            return total - 1.0
        if tail <= TAIL_RTOL * total:
            return total + tail / 2 - 1.0
        if n0 >= TERM_CAP:
            raise NumericalError(
                f"series did not converge after {n0} terms (p={p}, kappa={kappa}, mu={mu}); "
                f"tail bound {tail:.3g} vs partial sum {total:.3g}")
        chunk = min(2 * chunk, _MAX_CHUNK)


def D_lower(p, kappa, mu=0.0):
    """Series on the lower envelope ``v_lo``; decreasing in ``kappa`` and ``mu``."""
    return _series(p, kappa, mu, 0)


def D_upper(p, kappa, mu=0.0):
    """Series on the upper envelope ``v_hi``; ``D_lower <= D_upper``."""
    return _series(p, kappa, mu, 1)


def zeta_bounds(p, kappa):
    """``(D_lower(kappa, 0), D_upper(kappa, 0))``."""
    return D_lower(p, kappa), D_upper(p, kappa)


def _zero(fun, lo, hi):
    while fun(hi) > 0:
        lo, hi = hi, 2 * hi
        if hi > 1e4:
            raise NumericalError("no sign change found below 1e4")
    return bisect(fun, lo, hi, tol=1e-12)


def critical_brackets(p):
    """``(kappa_minus, kappa_plus)``: zeros in ``kappa`` of the lower and upper series at ``mu = 0``.

    They bound the critical coupling: ``kappa_minus <= kappa_c <= kappa_plus``.
    """
    lo = 1e-3
    out = []
    for shift in (0, 1):
        f = lambda k, s=shift: _series(p, k, 0.0, s, sign_only=True)
        if f(lo) <= 0:
            raise NumericalError(f"series already negative at kappa={lo}")
        out.append(_zero(f, lo, 4.0))
    return tuple(out)


def pressure_brackets(p, kappa):
    """``(mu_minus, mu_plus)``, the zeros in ``mu`` of the two series; 0 where the series is <= 0 at ``mu = 0``.

    For ``kappa`` below ``kappa_minus`` the pressure of ``kappa v`` lies between them.
    """
    out = []
    for shift in (0, 1):
        f = lambda m, s=shift: _series(p, kappa, m, s, sign_only=True)
        if kappa > 0 and f(0.0) <= 0:
            out.append(0.0)
            continue
        out.append(_zero(f, 0.0, 1.0))
    return tuple(out)


def _periodic_points(codes):
    """Float ``X`` of purely periodic codes, one row per code."""
    cum = np.cumsum(codes, axis=1).astype(float)
    s = codes.shape[1]
    r = np.arange(s)
    sign = (-0.5) ** r
    num = np.sum(2.0 ** (-cum) * sign, axis=1)
    den = 1.0 - 2.0 ** (-cum[:, -1]) * (-0.5) ** s
    return num / den


def grand_canonical_Xi(pot, kappa, mu, s, t_cap):
    """Truncated ``Xi_s = sum exp(-mu (t_0 + ... + t_(s-1)) + kappa S_s v#)`` over ``t_i <= t_cap``."""
    if not 1 <= s <= 3:
        raise ValueError("s must lie in {1, 2, 3}")
    if not 0 <= t_cap <= 40:
        raise ValueError("t_cap must lie in [0, 40]")
    if (t_cap + 1) ** s > XI_CAP:
        raise ValueError(f"{(t_cap + 1) ** s} tuples exceed the cap {XI_CAP}")
    grids = np.meshgrid(*[np.arange(t_cap + 1)] * s, indexing="ij")
    codes = np.stack([g.ravel() for g in grids], axis=1)
    total = np.zeros(codes.shape[0])
    for i in range(s):
        rot = np.roll(codes, -i, axis=1)
        x = _periodic_points(rot)
        t0 = rot[:, 0]
        for r in range(t_cap + 1):
            sel = t0 >= r
            total[sel] += pot(x[sel] * 2.0 ** r)
    expo = -mu * codes.sum(axis=1) + kappa * total
    top = expo.max()
    return float(np.exp(top) * np.sum(np.exp(expo - top)))


def envelope_sum(pot, kappa, mu, t_cap, upper):
    """``sum_{t <= t_cap} exp(-mu (t + 1) + kappa v_env(t))`` for the chosen envelope."""
    env = pot.upper_sum if upper else pot.lower_sum
    t = np.arange(t_cap + 1)
    vals = np.array([env(k) for k in t])
    return float(np.sum(np.exp(-mu * (t + 1) + kappa * vals)))

