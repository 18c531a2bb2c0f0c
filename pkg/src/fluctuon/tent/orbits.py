"""The tent map, its periodic points and periodic-orbit pressures.

Periodic points of period ``t`` are the rationals ``2 (j - 1) / (2^t - 1)`` and
``2 j / (2^t + 1)``, ``j = 1 .. 2^(t-1)``. The map keeps the denominator fixed,
so orbits are followed exactly on integer numerators.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.special import logsumexp

from ..numerics import KahanAccumulator, bisect

FIXED_POINT_CAP = 30
ORBIT_CAP = 29
_CHUNK = 1 << 20


def tent(x):
    """``phi(x) = 1 - |1 - 2x|``; exact for Fractions, vectorized for arrays."""
    if isinstance(x, Fraction):
        return 2 * x if x <= Fraction(1, 2) else 2 - 2 * x
    return 1.0 - np.abs(1.0 - 2.0 * np.asarray(x, dtype=float))


def tent_iter(x, t):
    for _ in range(t):
        x = tent(x)
    return x


def _step(a, d):
    # numerator of phi(a / d) over the same denominator
    return np.where(2 * a <= d, 2 * a, 2 * (d - a))


def _families(t):
    """(denominator, first numerator, count) of the two periodic-point families."""
    half = 1 << (t - 1)
    return ((2 ** t - 1, 0, half), (2 ** t + 1, 2, half))


@dataclass(frozen=True)
class FixedPointSet:
    """``Fix(phi^t)`` as two arithmetic progressions of numerators over ``2^t -+ 1``."""

    t: int

    def __post_init__(self):
        if not 1 <= self.t <= FIXED_POINT_CAP:
            raise ValueError(f"t must lie in [1, {FIXED_POINT_CAP}]")

    def __len__(self):
        return 2 ** self.t

    def numerators(self):
        for d, first, count in _families(self.t):
            yield d, first + 2 * np.arange(count, dtype=np.int64)

    def __iter__(self):
        for d, nums in self.numerators():
            for a in nums.tolist():
                yield Fraction(a, d)

    def verify(self):
        """True if every point returns to itself after ``t`` exact steps."""
        for d, nums in self.numerators():
            for s in range(0, nums.size, _CHUNK):
                a = nums[s:s + _CHUNK]
                cur = a.copy()
                for _ in range(self.t):
                    cur = _step(cur, d)
                if not np.array_equal(cur, a):
                    return False
        return True


def fixed_points(t):
    return FixedPointSet(t)


def is_prime(n):
    if n < 2:
        return False
    k = 2
    while k * k <= n:
        if n % k == 0:
            return False
        k += 1
    return True


@dataclass(frozen=True)
class TentPotential:
    """``v(x) = -(1 - log2 x)^(-p)`` with ``v(0) = 0`` by continuity."""

    p: float

    def __post_init__(self):
        if not 0 < self.p < 1:
            raise ValueError("p must lie in ]0, 1[")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            out = -(1.0 - np.log2(x)) ** (-self.p)
        out = np.where(x > 0, out, 0.0)
        return float(out) if out.ndim == 0 else out

    def ratio(self, a, d):
        """``v(a / d)`` for integer numerators, with the logarithm split for accuracy."""
        a = np.asarray(a)
        with np.errstate(divide="ignore"):
            lg = np.log2(a.astype(float)) - np.log2(np.asarray(d, dtype=float))
        out = -(1.0 - lg) ** (-self.p)
        return np.where(a > 0, out, 0.0)

    def inf_on(self, t):
        """``inf`` of ``v`` over ``I_t = ]2^(-t-1), 2^(-t)]``."""
        return -(np.asarray(t, dtype=float) + 1.0) ** (-self.p)

    def sup_on(self, t):
        return -(np.asarray(t, dtype=float) + 2.0) ** (-self.p)

    def lower_sum(self, t):
        """``sum_{s <= t} inf_{I_s} v = -sum_{n=1}^{t+1} n^(-p)``."""
        n = np.arange(1, int(t) + 2, dtype=float)
        return float(-np.sum(n ** (-self.p)))

    def upper_sum(self, t):
        """``sum_{s <= t} sup_{I_s} v = 1 - sum_{n=1}^{t+2} n^(-p)``."""
        n = np.arange(1, int(t) + 3, dtype=float)
        return float(1.0 - np.sum(n ** (-self.p)))


class OrbitTable:
    """Orbits of primitive prime period ``t``, one representative per orbit.

    The representative is the smallest numerator in the orbit. Potential sums
    along orbits are computed on demand and cached per potential.
    """

    def __init__(self, t):
        if not is_prime(t):
            raise ValueError("prime periods only")
        if t > ORBIT_CAP:
            raise ValueError(f"t must be <= {ORBIT_CAP}")
        self.period = t
        reps, dens = [], []
        for d, first, count in _families(t):
            for s in range(0, count, _CHUNK):
                a = first + 2 * np.arange(s, min(count, s + _CHUNK), dtype=np.int64)
                low = a.copy()
                nxt = _step(a, d)
                cur = nxt
                for _ in range(t - 2):
                    low = np.minimum(low, cur)
                    cur = _step(cur, d)
                low = np.minimum(low, cur)
                keep = (low == a) & (nxt != a)
                reps.append(a[keep])
                dens.append(np.full(int(keep.sum()), d, dtype=np.int64))
        self.numerators = np.concatenate(reps)
        self.denominators = np.concatenate(dens)
        self._sums = {}

    def __len__(self):
        return self.numerators.size

    @property
    def representatives(self):
        return self.numerators / self.denominators

    def orbit(self, i):
        """Exact points of the ``i``-th orbit."""
        a, d = int(self.numerators[i]), int(self.denominators[i])
        pts = []
        for _ in range(self.period):
            pts.append(Fraction(a, d))
            a = 2 * a if 2 * a <= d else 2 * (d - a)
        return pts

    def potential_sums(self, pot):
        """``v(o) = sum_{x in o} v(x)`` for each orbit, compensated summation."""
        key = pot.p
        if key not in self._sums:
            out = np.empty(len(self))
            for s in range(0, len(self), _CHUNK):
                cur = self.numerators[s:s + _CHUNK].copy()
                den = self.denominators[s:s + _CHUNK]
                acc = KahanAccumulator(cur.size)
                for _ in range(self.period):
                    acc.add(pot.ratio(cur, den))
                    cur = np.where(2 * cur <= den, 2 * cur, 2 * (den - cur))
                out[s:s + _CHUNK] = acc.total
            out.setflags(write=False)
            self._sums[key] = out
        return self._sums[key]


@lru_cache(maxsize=8)
def primitive_orbits(t):
    """Orbit table for prime ``t`` (cached)."""
    return OrbitTable(t)


def fixed_point_values(pot):
    """``(v(0), v(2/3))``, the two period-one contributions."""
    return 0.0, pot(2.0 / 3.0)


def pressure_approx(pot, kappa, t):
    """``p_t(kappa) = log(t sum_o exp(kappa v(o))) / t`` over primitive orbits of prime period ``t``."""
    sums = primitive_orbits(t).potential_sums(pot)
    return float((np.log(t) + logsumexp(kappa * sums)) / t)


def pressure_estimate(pot, kappa, t):
    """``max(kappa v(0), kappa v(2/3), p_t(kappa))``."""
    v0, v23 = fixed_point_values(pot)
    return max(kappa * v0, kappa * v23, pressure_approx(pot, kappa, t))


def combined_pressure(pots, coeffs, t):
    """Periodic-orbit pressure estimate of ``sum_i c_i v_i`` at prime period ``t``."""
    table = primitive_orbits(t)
    total = np.zeros(len(table))
    fix0 = 0.0
    fix23 = 0.0
    for pot, c in zip(pots, coeffs):
        total = total + c * table.potential_sums(pot)
        v0, v23 = fixed_point_values(pot)
        fix0 += c * v0
        fix23 += c * v23
    pt = float((np.log(t) + logsumexp(total)) / t)
    return max(fix0, fix23, pt)


def critical_coupling(pot, t=23, kappa_max=50.0):
    """Where ``p_t(kappa)`` crosses ``kappa v(0) = 0``; +inf if not below ``kappa_max``."""
    f = lambda k: pressure_approx(pot, k, t)
    if f(kappa_max) > 0:
        return np.inf
    return bisect(f, 0.0, kappa_max, tol=1e-12)
