"""Grid-based convex analysis for entropic pressures and rate functions.

Conventions: the entropic pressure ``e(alpha)`` and the rate ``I(s)`` are
related by ``e(alpha) = sup_s (alpha s - I(-s))`` and, dually,
``I(s) = sup_alpha (-alpha s - e(alpha))``.
"""

from dataclasses import dataclass

import numpy as np

from .grid import DEFAULT_POINTS, GridFunction

GATE_TOL = 1e-8
_CHUNK = 1 << 22


@dataclass(frozen=True)
class StructureData:
    """``s_star = -min e`` and the one-sided slope data of ``e`` at 0 and 1.

    ``de(0) = [-s0_upper, -s0_lower]`` and ``de(1) = [s1_lower, s1_upper]``.
    """

    s_star: float
    s0_lower: float
    s0_upper: float
    s1_lower: float
    s1_upper: float


def _conjugate(x, fx, y):
    """max_i (x_i y_j - f_i) and the first maximizing index, chunked over y."""
    out = np.empty(y.size)
    arg = np.empty(y.size, dtype=np.int64)
    step = max(1, _CHUNK // max(1, x.size))
    for a in range(0, y.size, step):
        yy = y[a:a + step]
        m = np.outer(yy, x) - fx
        k = np.argmax(m, axis=1)
        arg[a:a + step] = k
        out[a:a + step] = m[np.arange(yy.size), k]
    return out, arg


def legendre(f, out_lo, out_hi, out_n=DEFAULT_POINTS):
    """Discrete Legendre-Fenchel transform ``g(y) = sup_x (x y - f(x))``.

    The supremum runs over the finite nodes of ``f``; ties go to the first
    maximal index.
    """
    mask = f.finite
    if mask.sum() < 2:
        raise ValueError("empty effective domain")
    y = np.linspace(out_lo, out_hi, out_n)
    g, _ = _conjugate(f.x[mask], f.values[mask], y)
    return GridFunction(out_lo, out_hi, g)


def legendre_at(f, y):
    """Transform ``sup_x (x y - f(x))`` evaluated at arbitrary points ``y``."""
    mask = f.finite
    if mask.sum() < 2:
        raise ValueError("empty effective domain")
    g, _ = _conjugate(f.x[mask], f.values[mask], np.atleast_1d(np.asarray(y, float)))
    return g


def legendre_argmax(f, y):
    """Maximizing node abscissae of the transform at the points ``y``."""
    mask = f.finite
    x = f.x[mask]
    _, k = _conjugate(x, f.values[mask], np.atleast_1d(np.asarray(y, float)))
    return x[k]


def rate_from_pressure(e, s_lo, s_hi, s_n=DEFAULT_POINTS):
    """``I(s) = sup_alpha (-alpha s - e(alpha))``, the transform of ``alpha -> e(-alpha)``."""
    return legendre(e.reflect(), s_lo, s_hi, s_n)


def pressure_from_rate(rate, a_lo, a_hi, a_n=DEFAULT_POINTS):
    """``e(alpha) = sup_s (alpha s - I(-s))``."""
    return legendre(rate.reflect(), a_lo, a_hi, a_n)


def _lower_hull(x, y):
    hull = []
    for xi, yi in zip(x, y):
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop the middle point if it lies on or above the chord
            if (y2 - y1) * (xi - x1) >= (yi - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append((xi, yi))
    return np.array(hull)


def convex_hull(f):
    """Largest convex minorant of ``f``, sampled on the same grid."""
    mask = f.finite
    if mask.sum() < 2:
        raise ValueError("empty effective domain")
    x = f.x
    h = _lower_hull(x[mask], f.values[mask])
    out = np.full(f.n, np.inf)
    lo, hi = np.flatnonzero(mask)[[0, -1]]
    inside = np.arange(f.n)
    inside = (inside >= lo) & (inside <= hi)
    out[inside] = np.interp(x[inside], h[:, 0], h[:, 1])
    # keep exact input values where the hull touches them
    out = np.where(inside & mask, np.minimum(out, f.values), out)
    return f.with_values(out)


def secant_slopes(f):
    """Slopes over each grid interval; +inf where either end is infinite."""
    v = f.values
    with np.errstate(invalid="ignore"):
        s = np.diff(v) / f.spacing
    s[~(np.isfinite(v[:-1]) & np.isfinite(v[1:]))] = np.nan
    return s


def one_sided_slopes(f, i):
    """(left, right) secant slopes at node ``i``.

    A missing or infinite neighbour gives -inf on the left and +inf on the
    right, which is the subdifferential of a function that is +inf there.
    """
    v = f.values
    h = f.spacing
    left = (v[i] - v[i - 1]) / h if i > 0 and np.isfinite(v[i - 1]) else -np.inf
    right = (v[i + 1] - v[i]) / h if i + 1 < f.n and np.isfinite(v[i + 1]) else np.inf
    return float(left), float(right)


def _check_gate(e):
    i0 = e.node(0.0)
    i1 = e.node(1.0)
    v0, v1 = e.values[i0], e.values[i1]
    if not (np.isfinite(v0) and np.isfinite(v1)):
        raise ValueError("e must be finite at 0 and 1")
    if abs(v0) > GATE_TOL or abs(v1) > GATE_TOL:
        raise ValueError(f"e(0)={v0!r}, e(1)={v1!r} are not within {GATE_TOL} of 0")
    return i0, i1


def structure_data(e):
    """Structure constants of an entropic pressure sampled on a grid containing 0 and 1."""
    i0, i1 = _check_gate(e)
    s_star = -float(np.min(e.values[e.finite]))
    l0, r0 = one_sided_slopes(e, i0)
    l1, r1 = one_sided_slopes(e, i1)
    return StructureData(s_star=s_star, s0_lower=-r0, s0_upper=-l0,
                         s1_lower=l1, s1_upper=r1)


def hoeffding_f(e, u):
    """``f(u) = sup_{alpha in ]0,1]} (-(1-alpha) u - e(alpha)) / alpha`` over grid nodes.

    Returns +inf for ``u < 0``. Accepts scalar or array ``u``.
    """
    a = e.x
    sel = (a > 0.5 * e.spacing) & (a <= 1.0 + 1e-9 * e.spacing) & e.finite
    a = a[sel]
    ev = e.values[sel]
    if a.size == 0:
        raise ValueError("grid has no finite nodes in ]0,1]")
    u_arr = np.atleast_1d(np.asarray(u, dtype=float))
    vals = np.max((-(1.0 - a)[None, :] * u_arr[:, None] - ev[None, :]) / a[None, :], axis=1)
    vals = np.where(u_arr < 0, np.inf, vals)
    return float(vals[0]) if np.ndim(u) == 0 else vals


def hoeffding_g(e, u):
    """``g(u) = f(u) - u``."""
    return hoeffding_f(e, u) - np.asarray(u)


def check_fr_rates(rate, rate_hat):
    """Largest deviation ``|I_hat(s) - I(s) - s|`` over nodes where both are finite."""
    if not rate.same_grid(rate_hat):
        raise ValueError("rates must share a grid")
    mask = rate.finite & rate_hat.finite
    if not mask.any():
        return 0.0
    s = rate.x[mask]
    return float(np.max(np.abs(rate_hat.values[mask] - rate.values[mask] - s)))


def find_kinks(f, ratio=10.0, floor=None):
    """Interior nodes where the secant slope jumps far above its neighbourhood.

    For a smooth function consecutive slope increments vary slowly; a corner
    gives an isolated increment of order one regardless of the spacing.
    """
    s = secant_slopes(f)
    d2 = np.diff(s)
    if floor is None:
        fin = s[np.isfinite(s)]
        floor = 1e-7 * (1.0 + (np.max(np.abs(fin)) if fin.size else 0.0))
    kinks = []
    n = d2.size
    for j in range(n):
        if not np.isfinite(d2[j]) or d2[j] <= floor:
            continue
        nb = [d2[k] for k in (j - 3, j - 2, j + 2, j + 3) if 0 <= k < n and np.isfinite(d2[k])]
        background = max(np.abs(nb)) if nb else 0.0
        if d2[j] > ratio * background:
            kinks.append(j + 1)
    return kinks


def _differentiable_window(e):
    i0, i1 = _check_gate(e)
    if i0 == 0 or i1 == e.n - 1:
        raise ValueError("e must be sampled on a neighbourhood of [0, 1]")
    fin = e.finite
    if not fin[i0 - 1:i1 + 2].all():
        raise ValueError("e must be finite on a neighbourhood of [0, 1]")
    kinks = set(find_kinks(e))
    if any(i0 <= k <= i1 for k in kinks):
        raise ValueError("e is not differentiable on [0, 1]")
    a = i0
    while a - 1 >= 0 and fin[a - 1] and a not in kinks:
        a -= 1
    b = i1
    while b + 1 < e.n and fin[b + 1] and b not in kinks:
        b += 1
    return a, b


def gartner_ellis_rate(e, s_grid):
    """Rates from the restriction of ``e`` to its differentiable window around [0, 1].

    Returns ``(I, I_hat, local_interval)`` with ``I_hat(s) = s + I(s)``. Nodes
    whose maximizer would sit outside the window (``-s`` beyond the range of
    slopes of ``e`` there) are not determined by the samples and are flagged +inf.
    The local interval is ``]max(a_-, -a_+), min(-a_-, a_+)[`` where ``a_-``,
    ``a_+`` are the extreme slopes of ``e`` on the window.
    """
    s_lo, s_hi, s_n = s_grid
    a, b = _differentiable_window(e)
    window = GridFunction(e.x[a], e.x[b], e.values[a:b + 1].copy())
    sl = secant_slopes(window)
    a_minus, a_plus = float(np.nanmin(sl)), float(np.nanmax(sl))
    rate = rate_from_pressure(window, s_lo, s_hi, s_n)
    s = rate.x
    tol = 1e-9 * (1.0 + max(abs(a_minus), abs(a_plus)))
    inside = (-s >= a_minus - tol) & (-s <= a_plus + tol)
    vals = np.where(inside, rate.values, np.inf)
    rate = rate.with_values(vals)
    rate_hat = rate.with_values(np.where(inside, vals + s, np.inf))
    interval = (max(a_minus, -a_plus), min(-a_minus, a_plus))
    return rate, rate_hat, interval


def is_discretely_convex(f, tol=1e-9):
    """Second differences of the finite run of samples are all >= -tol."""
    v = f.values[f.finite]
    if v.size < 3:
        return True
    return bool(np.all(np.diff(v, 2) >= -tol * max(1.0, np.max(np.abs(v)))))
