"""Small numerical helpers shared across the model modules."""

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np


class NumericalError(RuntimeError):
    """Raised when an iterative or summation routine fails to converge."""


class KahanAccumulator:
    """Elementwise compensated summation over a stream of arrays.

    Used for orbit potential sums, where a few dozen terms of similar
    magnitude are added per orbit for millions of orbits at once.
    """

    def __init__(self, shape):
        self.total = np.zeros(shape)
        self._carry = np.zeros(shape)

    def add(self, values):
        y = values - self._carry
        t = self.total + y
        self._carry = (t - self.total) - y
        self.total = t
        return self


def bisect(fun, lo, hi, tol=1e-14, max_iter=400):
    """Bisection for a sign change of ``fun`` on ``[lo, hi]``.

    Stops when the bracket is below ``tol`` relative to ``max(1, |x|)`` or when
    the midpoint no longer moves in floating point.
    """
    flo = fun(lo)
    fhi = fun(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if np.sign(flo) == np.sign(fhi):
        raise NumericalError(f"no sign change on [{lo}, {hi}]")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = fun(mid)
        if fm == 0.0:
            return mid
        if np.sign(fm) == np.sign(flo):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo <= tol * max(1.0, abs(mid)):
            break
    return 0.5 * (lo + hi)


def thread_count():
    """Worker count, capped by the ``FLUCTUON_THREADS`` environment variable."""
    cap = os.environ.get("FLUCTUON_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = max(1, min(n, int(cap)))
        except ValueError:
            pass
    return n


def parallel_map(fun, items):
    """Map ``fun`` over ``items`` with a thread pool; results keep input order."""
    items = list(items)
    workers = thread_count()
    if workers <= 1 or len(items) < 2:
        return [fun(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fun, items))
