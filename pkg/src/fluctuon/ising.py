"""One-dimensional Ising chain with free boundary conditions under spin flip.

Weights are ``exp(beta J sum s_i s_{i+1} + beta h sum s_i)``; ``p_N = log Z_N / (N beta)``.
"""

from dataclasses import dataclass

import numpy as np

from .convex import rate_from_pressure
from .grid import DEFAULT_POINTS, GridFunction

MAX_SPINS = 1_000_000


@dataclass(frozen=True)
class IsingParams:
    beta: float
    J: float
    h: float
    volume: int = None

    def __post_init__(self):
        if not (self.beta > 0 and self.J > 0):
            raise ValueError("beta and J must be positive")
        if self.volume is not None and not 2 <= self.volume <= MAX_SPINS:
            raise ValueError(f"volume must lie in [2, {MAX_SPINS}]")


def _log_closed(beta, J, h):
    # log(cosh(bh) + sqrt(sinh(bh)^2 + exp(-4 bJ))) without overflow
    b = abs(beta * h)
    em = np.exp(-2 * b)
    c = 0.5 * (1 + em)
    s = 0.5 * (1 - em)
    return b + np.log(c + np.sqrt(s * s + np.exp(-4 * beta * J - 2 * b)))


def pressure_closed(beta, J, h):
    """``J + log(cosh(beta h) + sqrt(sinh(beta h)^2 + exp(-4 beta J))) / beta``."""
    return float(J + _log_closed(beta, J, h) / beta)


def _mul(a, b):
    # product of log-scaled matrices/vectors (array, log scale)
    m = a[0] @ b[0]
    top = np.max(m)
    return m / top, a[1] + b[1] + np.log(top)


def log_partition(beta, J, h, volume):
    """``log Z_N`` by a 2x2 transfer-matrix power, all factors kept with a log scale."""
    N = int(volume)
    if not 2 <= N <= MAX_SPINS:
        raise ValueError(f"volume must lie in [2, {MAX_SPINS}]")
    spins = np.array([1.0, -1.0])
    expo = beta * J * np.outer(spins, spins) + beta * h * spins[None, :]
    top = expo.max()
    base = (np.exp(expo - top), top)
    v0 = beta * h * spins
    vtop = v0.max()
    vec = (np.exp(v0 - vtop)[None, :], vtop)
    k = N - 1
    while k:
        if k & 1:
            vec = _mul(vec, base)
        k >>= 1
        if k:
            base = _mul(base, base)
    return float(vec[1] + np.log(vec[0].sum()))


def pressure_finite(beta, J, h, volume):
    return log_partition(beta, J, h, volume) / (volume * beta)


def finite_volume_renyi(beta, J, h, volume, alpha):
    """``N beta (p_N((1 - 2 alpha) h) - p_N(h))``, the log-moment of ``-alpha sigma_N``."""
    if alpha == 0 or h == 0:
        log_partition(beta, J, h, volume)
        return 0.0
    return log_partition(beta, J, (1 - 2 * alpha) * h, volume) - log_partition(beta, J, h, volume)


def entropic_pressure(beta, J, h, alpha):
    """``beta (p((1 - 2 alpha) h) - p(h))`` from the closed-form pressure."""
    alpha = np.asarray(alpha, dtype=float)
    out = _log_closed(beta, J, (1 - 2 * alpha) * h) - _log_closed(beta, J, h)
    out = np.where((alpha == 0) | (alpha == 1), 0.0, out)
    return float(out) if out.ndim == 0 else out


def magnetization(beta, J, h):
    """``d p / d h`` of the closed-form pressure."""
    bh = beta * h
    sh, ch = np.sinh(bh), np.cosh(bh)
    root = np.sqrt(sh * sh + np.exp(-4 * beta * J))
    return float(sh * (1 + ch / root) / (ch + root))


def mean_ep_rate(beta, J, h):
    """``-e'(0) = 2 beta h m(beta, h)``."""
    return 2 * beta * h * magnetization(beta, J, h)


def pressure_grid(beta, J, h, lo=-1.0, hi=2.0, n=DEFAULT_POINTS):
    return GridFunction.sample(lambda a: entropic_pressure(beta, J, h, a), lo, hi, n)


def rate_function(beta, J, h, s_grid, alpha_grid=(-2.0, 3.0, DEFAULT_POINTS)):
    """Rate of ``sigma_N / N`` as the transform of ``alpha -> e(-alpha)``."""
    if h == 0:
        raise ValueError("h must be nonzero")
    e = pressure_grid(beta, J, h, *alpha_grid)
    return rate_from_pressure(e, *s_grid)
