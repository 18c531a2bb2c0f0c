"""Product of two tent maps on the unit square under the coordinate swap.

With potentials ``k1 v1(x) + k2 v2(y)`` the reference process swaps the two
factors, and the entropic pressure splits into one-dimensional pressures:

    e(a) = P((1 - a) k1 v1 + a k2 v2) + P(a k1 v1 + (1 - a) k2 v2) - P(k1 v1) - P(k2 v2).

Each ``P`` mixes both potentials on the same orbit set, so the estimate at
prime period ``t`` uses :func:`combined_pressure`.
"""

import numpy as np

from ..convex import legendre, rate_from_pressure
from ..grid import DEFAULT_POINTS, GridFunction
from .orbits import TentPotential, combined_pressure, critical_coupling

SQUARE_T_CAP = 23


def _couplings(pots, kappas, t):
    return tuple(critical_coupling(pot, t) if k is None else float(k) for pot, k in zip(pots, kappas))


def _checked(p1, p2, t):
    if t > SQUARE_T_CAP:
        raise ValueError(f"t must be <= {SQUARE_T_CAP}")
    return TentPotential(p1), TentPotential(p2)


def square_entropic_pressure(p1, p2, kappa1=None, kappa2=None, alpha=0.0, t=19):
    """Entropic pressure of the swap pair at ``alpha`` (scalar or array).

    Missing couplings default to the critical couplings at period ``t``.
    """
    v1, v2 = _checked(p1, p2, t)
    k1, k2 = _couplings((v1, v2), (kappa1, kappa2), t)
    pots = (v1, v2)
    base = combined_pressure(pots, (k1, 0.0), t) + combined_pressure(pots, (0.0, k2), t)

    def one(a):
        if a == 0 or a == 1:
            return 0.0
        return (combined_pressure(pots, ((1 - a) * k1, a * k2), t)
                + combined_pressure(pots, (a * k1, (1 - a) * k2), t) - base)

    alpha = np.asarray(alpha, dtype=float)
    out = np.array([one(a) for a in alpha.ravel()]).reshape(alpha.shape)
    return float(out) if out.ndim == 0 else out


def square_pressure_grid(p1, p2, kappa1=None, kappa2=None, lo=-1.0, hi=2.0, n=DEFAULT_POINTS, t=19):
    alpha = np.linspace(lo, hi, n)
    vals = square_entropic_pressure(p1, p2, kappa1, kappa2, alpha, t)
    return GridFunction(lo, hi, vals)


def square_rate(p1, p2, kappa1=None, kappa2=None, s_grid=None,
                alpha_grid=(-1.0, 2.0, 1201), t=19):
    """``(I, I_hat, e)``: rate of ``sigma / t`` under the forward and the swapped process, and the pressure grid."""
    v1, v2 = _checked(p1, p2, t)
    k1, k2 = _couplings((v1, v2), (kappa1, kappa2), t)
    e = square_pressure_grid(p1, p2, k1, k2, *alpha_grid, t=t)
    e_hat = square_pressure_grid(p2, p1, k2, k1, *alpha_grid, t=t)
    if s_grid is None:
        slope = np.max(np.abs(np.diff(e.values))) / e.spacing
        s_grid = (-slope, slope, 801)
    return rate_from_pressure(e, *s_grid), legendre(e_hat, *s_grid), e
