"""Mean-field lattice gas under the particle-hole involution.

With ``N`` particles on ``V`` sites the energy is ``-2 N (N - 1) / (V - 1)``,
so the finite-volume pressure is

    p_V(beta, mu) = log sum_N C(V, N) exp(beta (2 N (N - 1) / (V - 1) + mu N)) / (V beta)

and the thermodynamic pressure is ``sup_r F(beta, mu, r) / beta`` with
``F = beta r (2 r + mu) - r log r - (1 - r) log(1 - r)``.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import expit, gammaln, logsumexp, xlogy

from .numerics import bisect

MAX_VOLUME = 1_000_000
BETA_C = 1.0


@dataclass(frozen=True)
class GasParams:
    beta: float
    mu: float
    volume: int = None

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError("beta must be positive")
        if self.volume is not None and self.volume < 2:
            raise ValueError("volume must be >= 2")


def F(beta, mu, r):
    """Variational functional; the endpoints use ``0 log 0 = 0``."""
    r = np.asarray(r, dtype=float)
    out = beta * r * (2 * r + mu) - xlogy(r, r) - xlogy(1 - r, 1 - r)
    return float(out) if out.ndim == 0 else out


def _F_logit(beta, mu, x):
    # F at r = expit(x), with the entropy written through softplus for accuracy
    r = expit(x)
    ent = r * np.logaddexp(0.0, -x) + (1 - r) * np.logaddexp(0.0, x)
    return beta * r * (2 * r + mu) + ent


def g_curve(beta):
    """Boundary of the three-root region: ``sqrt(1 - 1/beta) - artanh(sqrt(1 - 1/beta)) / beta``."""
    if beta <= BETA_C:
        return 0.0
    m = np.sqrt(1.0 - BETA_C / beta)
    return float(m - np.arctanh(m) / beta)


def _critical_logits(beta, mu):
    """Roots ``x`` of ``beta (4 expit(x) + mu) - x``, i.e. critical points in logit scale.

    The roots lie in ``[beta mu, beta (mu + 4)]``. The derivative of the
    equation vanishes where ``r (1 - r) = 1 / (4 beta)``, which splits that
    interval into at most three monotone pieces, each holding at most one root.
    """
    def G(x):
        return beta * (4 * expit(x) + mu) - x

    lo, hi = beta * mu - 1.0, beta * (mu + 4) + 1.0
    cuts = [lo]
    if beta > BETA_C:
        d = np.sqrt(1.0 - 1.0 / beta)
        for r in ((1 - d) / 2, (1 + d) / 2):
            x = np.log(r / (1 - r))
            if lo < x < hi:
                cuts.append(x)
    cuts.append(hi)
    cuts = sorted(cuts)
    roots = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        ga, gb = G(a), G(b)
        if ga == 0.0:
            roots.append(a)
        elif ga * gb < 0:
            roots.append(bisect(G, a, b, tol=1e-14))
    if G(cuts[-1]) == 0.0:
        roots.append(cuts[-1])
    out = []
    for x in sorted(roots):
        if not out or abs(x - out[-1]) > 1e-12 * max(1.0, abs(x)):
            out.append(x)
    return out


def critical_set(beta, mu):
    """All critical points of ``r -> F(beta, mu, r)`` in ``]0, 1[``, ascending."""
    return [float(expit(x)) for x in _critical_logits(beta, mu)]


def pressure(beta, mu):
    """``p(beta, mu) = sup_r F(beta, mu, r) / beta``."""
    xs = _critical_logits(beta, mu)
    cand = [_F_logit(beta, mu, x) for x in xs] + [0.0, beta * (2.0 + mu)]
    return float(max(cand) / beta)


def rho(beta, mu):
    """Maximizing density: the largest critical point for ``mu > -2``, the smallest for ``mu < -2``.

    At ``mu = -2`` the value 1/2 is returned by convention (the two one-sided
    limits differ when ``beta > 1``; see :func:`rho_limits`).
    """
    if mu == -2.0:
        return 0.5
    roots = critical_set(beta, mu)
    return roots[-1] if mu > -2.0 else roots[0]


def rho_limits(beta):
    """``(lim_{mu -> -2-} rho, lim_{mu -> -2+} rho)``."""
    roots = critical_set(beta, -2.0)
    return roots[0], roots[-1]


def log_partition(beta, mu, volume):
    """``log sum_N C(V, N) exp(beta (2 N (N - 1) / (V - 1) + mu N))``."""
    V = int(volume)
    if V < 2:
        raise ValueError("volume must be >= 2")
    if V > MAX_VOLUME:
        raise ValueError(f"volume {V} exceeds the cap {MAX_VOLUME}")
    N = np.arange(V + 1, dtype=float)
    logc = gammaln(V + 1.0) - gammaln(N + 1.0) - gammaln(V - N + 1.0)
    return float(logsumexp(logc + beta * (2.0 * N * (N - 1.0) / (V - 1.0) + mu * N)))


def pressure_finite(beta, mu, volume):
    return log_partition(beta, mu, volume) / (volume * beta)


def finite_volume_renyi(beta, mu, volume, alpha):
    """``e_V(alpha) = log E[exp(-alpha sigma_V)]`` with ``sigma_V = beta (mu + 2)(2 N - V)``."""
    if alpha == 0 or alpha == 1 or mu == -2.0:
        log_partition(beta, mu, volume)  # still validates the volume
        return 0.0
    shifted = (1 - 2 * alpha) * (mu + 2) - 2
    return (log_partition(beta, shifted, volume) - log_partition(beta, mu, volume)
            + volume * beta * alpha * (mu + 2))


def entropic_pressure(beta, mu, alpha):
    """``beta (p(beta, (1 - 2 alpha)(mu + 2) - 2) - p(beta, mu) + alpha (mu + 2))``."""
    if alpha == 0 or alpha == 1 or mu == -2.0:
        return 0.0
    shifted = (1 - 2 * alpha) * (mu + 2) - 2
    return beta * (pressure(beta, shifted) - pressure(beta, mu) + alpha * (mu + 2))


def rate_function(beta, mu, s):
    """``I(s) = beta p - F(beta, mu, r)`` at ``r = (1 + s / (beta (mu + 2))) / 2``; +inf off ``[0, 1]``."""
    if mu == -2.0:
        raise ValueError("degenerate direction: sigma vanishes identically at mu = -2")
    s = np.asarray(s, dtype=float)
    r = 0.5 * (1.0 + s / (beta * (mu + 2.0)))
    return _density_rate(beta, mu, r)


def rate_function_shat(beta, mu, s_hat):
    """Rate in the reduced variable ``s_hat = 2 r - 1``; defined for every ``mu``."""
    r = 0.5 * (1.0 + np.asarray(s_hat, dtype=float))
    return _density_rate(beta, mu, r)


def _density_rate(beta, mu, r):
    inside = (r >= 0) & (r <= 1)
    rc = np.clip(r, 0.0, 1.0)
    val = beta * pressure(beta, mu) - F(beta, mu, rc)
    val = np.where(inside, np.maximum(val, 0.0), np.inf)
    return float(val) if np.ndim(val) == 0 else val


def concave_window(beta, mu):
    """Half-width in ``s`` of the interval on which ``I`` is concave (0 if ``beta <= 1``)."""
    if beta <= BETA_C:
        return 0.0
    return abs(mu + 2.0) * np.sqrt(beta * (beta / BETA_C - 1.0))
