"""Uniformly sampled functions of one real variable, with +inf allowed."""

from dataclasses import dataclass

import numpy as np

DEFAULT_POINTS = 2001


@dataclass(frozen=True)
class GridFunction:
    """Samples of a function on ``linspace(lo, hi, len(values))``.

    Infinite samples are stored as ``+inf``; ``finite`` is the per-sample flag
    that every transform consults, so infinite nodes are skipped exactly.
    """

    lo: float
    hi: float
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.size < 2:
            raise ValueError("need at least two samples")
        if not self.hi > self.lo:
            raise ValueError("hi must exceed lo")
        if np.any(np.isnan(vals)) or np.any(vals == -np.inf):
            raise ValueError("samples must be real or +inf")
        if not np.any(np.isfinite(vals)):
            raise ValueError("empty effective domain")
        vals.setflags(write=False)
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))
        object.__setattr__(self, "values", vals)

    @classmethod
    def sample(cls, fun, lo, hi, n=DEFAULT_POINTS):
        """Evaluate a vectorized ``fun`` on the uniform grid."""
        x = np.linspace(lo, hi, n)
        return cls(lo, hi, np.asarray(fun(x), dtype=float))

    @property
    def n(self):
        return self.values.size

    @property
    def x(self):
        return np.linspace(self.lo, self.hi, self.n)

    @property
    def spacing(self):
        return (self.hi - self.lo) / (self.n - 1)

    @property
    def finite(self):
        return np.isfinite(self.values)

    def same_grid(self, other):
        return self.lo == other.lo and self.hi == other.hi and self.n == other.n

    def node(self, x0, rtol=1e-6):
        """Index of the grid node at ``x0``; raises if ``x0`` is not a node."""
        k = (x0 - self.lo) / self.spacing
        i = int(round(k))
        if i < 0 or i >= self.n or abs(k - i) > rtol:
            raise ValueError(f"{x0} is not a grid node")
        return i

    def reflect(self):
        """The function ``x -> f(-x)`` on ``[-hi, -lo]``."""
        return GridFunction(-self.hi, -self.lo, self.values[::-1].copy())

    def with_values(self, values):
        return GridFunction(self.lo, self.hi, values)

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write(format_csv(self))

    @classmethod
    def from_csv(cls, path):
        with open(path) as fh:
            return parse_csv(fh.read())


def _fmt(v):
    if v == np.inf:
        return "inf"
    return "%.17g" % v


def format_csv(f):
    lines = ["x,value,is_finite"]
    for xi, vi, fi in zip(f.x, f.values, f.finite):
        lines.append(f"{_fmt(xi)},{_fmt(vi)},{int(fi)}")
    return "\n".join(lines) + "\n"


def parse_csv(text):
    rows = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    if rows[0].strip() != "x,value,is_finite":
        raise ValueError("expected header x,value,is_finite")
    xs, vals = [], []
    for ln in rows[1:]:
        xs_, v, flag = ln.split(",")
        xs.append(float(xs_))
        vals.append(float(v) if int(flag) else np.inf)
    return GridFunction(xs[0], xs[-1], np.array(vals))
