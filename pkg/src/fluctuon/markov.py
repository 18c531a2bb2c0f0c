"""Stationary finite-state Markov chains and their entropy production.

A chain is compared with a reference chain, by default its time reversal
``P_hat[x, y] = p[y] P[y, x] / p[x]``. The path entropy production is

    sigma_t(x) = log(p[x_1] / p_hat[x_1]) + sum_k log(P[x_k, x_k+1] / P_hat[x_k, x_k+1]).
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .convex import legendre, rate_from_pressure
from .grid import DEFAULT_POINTS, GridFunction
from .numerics import NumericalError

ENUMERATION_CAP = 20_000_000
MERGE_RTOL = 1e-12
POWER_TOL = 1e-13
POWER_MAX_ITER = 1_000_000


def _is_irreducible(P):
    n = P.shape[0]
    reach = (P > 0) | np.eye(n, dtype=bool)
    # boolean closure by repeated squaring
    for _ in range(max(1, int(np.ceil(np.log2(n))) + 1)):
        reach = reach | ((reach.astype(np.int64) @ reach.astype(np.int64)) > 0)
    return bool(reach.all())


def stationary(P):
    """Stationary row vector of an irreducible stochastic matrix."""
    P = np.asarray(P, dtype=float)
    if not _is_irreducible(P):
        raise ValueError("not irreducible")
    n = P.shape[0]
    # p (P - I) = 0 together with sum(p) = 1, solved in least squares
    A = np.vstack([(P - np.eye(n)).T, np.ones(n)])
    b = np.zeros(n + 1)
    b[-1] = 1.0
    p, *_ = np.linalg.lstsq(A, b, rcond=None)
    # one step of refinement through the chain keeps positivity exact
    p = np.clip(p, 0.0, None)
    p = p @ P
    p /= p.sum()
    if np.any(p <= 0):
        raise ValueError("not irreducible")
    return p


@dataclass(frozen=True)
class MarkovModel:
    """Row-stochastic matrix ``P`` with its (computed) stationary vector ``p``."""

    P: np.ndarray
    p: np.ndarray = field(default=None)
    labels: tuple = field(default=None)

    def __post_init__(self):
        P = np.array(self.P, dtype=float)
        if P.ndim != 2 or P.shape[0] != P.shape[1] or P.shape[0] < 2:
            raise ValueError("P must be a square matrix of size >= 2")
        if np.any(P < 0) or np.any(np.abs(P.sum(axis=1) - 1.0) > 1e-12):
            raise ValueError("P must be row-stochastic")
        p = stationary(P) if self.p is None else np.array(self.p, dtype=float)
        if np.any(np.abs(p @ P - p) > 1e-10) or np.any(p <= 0):
            raise ValueError("p is not a positive stationary vector of P")
        labels = tuple(range(P.shape[0])) if self.labels is None else tuple(self.labels)
        if len(labels) != P.shape[0]:
            raise ValueError("labels do not match the alphabet size")
        P.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self):
        return self.P.shape[0]

    @classmethod
    def from_json(cls, text):
        """Parse ``{"P": [[...]], "labels": [...]}``; the stationary vector is always recomputed."""
        data = json.loads(text)
        if "P" not in data:
            raise ValueError("model JSON needs a 'P' matrix")
        return cls(np.array(data["P"], dtype=float), labels=data.get("labels"))

    def to_json(self):
        return json.dumps({"P": self.P.tolist(), "labels": list(self.labels)})


@dataclass(frozen=True)
class MarkovPair:
    """A chain together with the reference chain that ``sigma`` compares it to."""

    forward: MarkovModel
    reference: MarkovModel
    involution: bool = False

    def __post_init__(self):
        if self.forward.n != self.reference.n:
            raise ValueError("alphabet sizes differ")
        if np.any((self.forward.P > 0) != (self.reference.P > 0)):
            raise ValueError("forward and reference supports differ")

    def swapped(self):
        return MarkovPair(self.reference, self.forward, self.involution)


def time_reverse(m):
    """Time-reversed chain ``P_hat[x, y] = p[y] P[y, x] / p[x]``."""
    P = m.P
    if np.any((P > 0) != (P.T > 0)):
        raise ValueError("support is not symmetric: P[x,y] = 0 must imply P[y,x] = 0")
    Ph = (m.p[None, :] * P.T) / m.p[:, None]
    # rows sum to one up to rounding; renormalize to keep exact stochasticity
    Ph = Ph / Ph.sum(axis=1, keepdims=True)
    return MarkovModel(Ph, p=m.p.copy(), labels=m.labels)


def reversal_pair(m):
    return MarkovPair(m, time_reverse(m), involution=True)


def as_pair(obj):
    if isinstance(obj, MarkovPair):
        return obj
    if isinstance(obj, MarkovModel):
        return reversal_pair(obj)
    raise TypeError("expected MarkovModel or MarkovPair")


def is_detailed_balance(m, tol=1e-12):
    flux = m.p[:, None] * m.P
    return bool(np.max(np.abs(flux - flux.T)) <= tol)


@dataclass(frozen=True)
class PathLaw:
    """Finite law of ``sigma_t``: sorted distinct values with their probabilities."""

    values: np.ndarray
    probs: np.ndarray

    @property
    def atoms(self):
        return list(zip(self.values.tolist(), self.probs.tolist()))

    def moment(self, alpha):
        """``log E[exp(-alpha sigma)]``."""
        w = np.log(self.probs) - alpha * self.values
        m = np.max(w)
        return float(m + np.log(np.sum(np.exp(w - m))))

    def mean(self):
        return float(np.dot(self.probs, self.values))


def merge_atoms(values, probs, rtol=MERGE_RTOL):
    """Sort and merge atoms whose values agree within ``rtol`` relative."""
    order = np.argsort(values, kind="stable")
    v = np.asarray(values)[order]
    w = np.asarray(probs)[order]
    keep = w > 0
    v, w = v[keep], w[keep]
    if v.size == 0:
        return np.empty(0), np.empty(0)
    # a new atom starts wherever consecutive sorted values separate
    gap = np.diff(v) > rtol * np.maximum(1.0, np.abs(v[1:]))
    starts = np.concatenate([[0], np.flatnonzero(gap) + 1])
    merged_w = np.add.reduceat(w, starts)
    merged_v = np.add.reduceat(v * w, starts) / merged_w
    return merged_v, merged_w


def _log(a):
    with np.errstate(divide="ignore"):
        return np.log(a)


def _suffix_tables(logP, logQ, length):
    """Log-weights of all ``length``-step continuations from each start state."""
    n = logP.shape[0]
    tab_a, tab_b = [], []
    for s in range(n):
        a = np.zeros(1)
        b = np.zeros(1)
        last = np.array([s])
        for _ in range(length):
            a = (a[:, None] + logP[last]).ravel()
            b = (b[:, None] + logQ[last]).ravel()
            last = np.tile(np.arange(n), last.size)
        tab_a.append(a)
        tab_b.append(b)
    return tab_a, tab_b


def path_laws(model, t, cap=ENUMERATION_CAP):
    """Exact laws of ``sigma_t`` under the forward and the reference path measures.

    All ``n**t`` paths are enumerated lexicographically with running
    log-weights; paths outside the common support are dropped.
    """
    pair = as_pair(model)
    f, r = pair.forward, pair.reference
    n = f.n
    if t < 1:
        raise ValueError("t must be >= 1")
    if float(n) ** t > cap:
        t_max = int(np.floor(np.log(cap) / np.log(n)))
        raise ValueError(f"{n}**{t} paths exceed the enumeration cap {cap}; use t <= {t_max}")
    logP, logQ = _log(f.P), _log(r.P)
    init_a, init_b = np.log(f.p), np.log(r.p)

    # split into a prefix handled in a loop and a vectorized suffix
    suffix_len = t - 1
    while suffix_len > 0 and float(n) ** suffix_len > 1 << 20:
        suffix_len -= 1
    prefix_len = t - 1 - suffix_len
    tab_a, tab_b = _suffix_tables(logP, logQ, suffix_len)

    vals = []
    for x0 in range(n):
        stack = [(x0, init_a[x0], init_b[x0], 0)]
        while stack:
            x, la, lb, depth = stack.pop()
            if depth == prefix_len:
                a = la + tab_a[x]
                b = lb + tab_b[x]
                ok = np.isfinite(a)
                sig = a[ok] - b[ok]
                v, w = merge_atoms(sig, np.exp(a[ok]))
                v2, w2 = merge_atoms(sig, np.exp(b[ok]))
                vals.append((v, w, v2, w2))
                continue
            # push in reverse so that paths are visited in lexicographic order
            for y in range(n - 1, -1, -1):
                if f.P[x, y] > 0:
                    stack.append((y, la + logP[x, y], lb + logQ[x, y], depth + 1))
    v = np.concatenate([c[0] for c in vals])
    w = np.concatenate([c[1] for c in vals])
    v2 = np.concatenate([c[2] for c in vals])
    w2 = np.concatenate([c[3] for c in vals])
    return PathLaw(*merge_atoms(v, w)), PathLaw(*merge_atoms(v2, w2))


def sigma_law(model, t, cap=ENUMERATION_CAP):
    """Exact law of ``sigma_t`` under the forward path measure."""
    return path_laws(model, t, cap)[0]


def tilted(pair, alpha):
    """``q(alpha)`` and ``Q(alpha)`` with entries ``P^(1-alpha) P_hat^alpha`` (zero off support)."""
    f, r = pair.forward, pair.reference
    with np.errstate(divide="ignore", invalid="ignore"):
        Q = np.where(f.P > 0, np.exp((1 - alpha) * _log(f.P) + alpha * _log(r.P)), 0.0)
    q = np.exp((1 - alpha) * np.log(f.p) + alpha * np.log(r.p))
    return q, Q


def renyi_entropy(model, t, alpha):
    """``e_t(alpha) = log(q(alpha) Q(alpha)^(t-1) 1)``, accumulated in log scale."""
    if t < 1:
        raise ValueError("t must be >= 1")
    if alpha == 0 or alpha == 1:
        return 0.0
    q, Q = tilted(as_pair(model), alpha)
    v = q.copy()
    scale = 0.0
    for _ in range(t - 1):
        v = v @ Q
        s = v.sum()
        v /= s
        scale += np.log(s)
    return float(scale + np.log(v.sum()))


def perron_root(A, tol=POWER_TOL, max_iter=POWER_MAX_ITER):
    """Perron eigenvalue of an irreducible nonnegative matrix by power iteration.

    Convergence is judged by the Collatz-Wielandt bounds
    ``min (Ax)_i / x_i <= r <= max (Ax)_i / x_i``. A diagonal shift makes
    periodic matrices primitive without moving the Perron vector.
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    shift = 0.0 if np.any(np.diag(A) > 0) else float(np.mean(A.sum(axis=1)))
    B = A + shift * np.eye(n)
    x = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        y = B @ x
        ratio = y / x
        lo, hi = ratio.min(), ratio.max()
        x = y / y.sum()
        if hi - lo <= tol * hi:
            return 0.5 * (lo + hi) - shift
    raise NumericalError("power iteration did not converge")


def entropic_pressure(model, alpha):
    """``e(alpha) = log r(Q(alpha))``."""
    if alpha == 0 or alpha == 1:
        return 0.0
    _, Q = tilted(as_pair(model), alpha)
    return float(np.log(perron_root(Q)))


def pressure_grid(model, lo=-1.0, hi=2.0, n=DEFAULT_POINTS):
    a = np.linspace(lo, hi, n)
    return GridFunction(lo, hi, np.array([entropic_pressure(model, x) for x in a]))


def mean_ep_rate(model):
    """``sum_x p_x sum_y P_xy log(P_xy / P_hat_xy)``, the per-step mean of ``sigma``.

    For a time-reversal pair this equals the symmetric form
    ``(1/2) sum p_x (P_xy - P_hat_xy) log(P_xy / P_hat_xy)``.
    """
    pair = as_pair(model)
    f, r = pair.forward, pair.reference
    mask = f.P > 0
    terms = np.zeros_like(f.P)
    terms[mask] = f.P[mask] * np.log(f.P[mask] / r.P[mask])
    return float(np.sum(f.p[:, None] * terms))


def mean_ep(model, t):
    """``ep_t = Ent(p | p_hat) + (t - 1) * mean_ep_rate``."""
    pair = as_pair(model)
    f, r = pair.forward, pair.reference
    ent = float(np.sum(f.p * np.log(f.p / r.p)))
    return ent + (t - 1) * mean_ep_rate(pair)


@dataclass(frozen=True)
class Level3Report:
    I: float
    I_hat: float
    varsigma: float
    residual: float


def level3_fr_check(model, R, q=None):
    """Process-level relative entropies of a Markov measure ``(q, R)``.

    ``I = sum q R log(R/P)``, ``I_hat = sum q R log(R/P_hat)`` and
    ``varsigma = sum q R log(P/P_hat)``; the residual is ``|I_hat - I - varsigma|``.
    """
    pair = as_pair(model)
    P, Ph = pair.forward.P, pair.reference.P
    R = np.asarray(R, dtype=float)
    if np.any((R > 0) & (P == 0)):
        raise ValueError("R is not supported inside the support of P")
    q = stationary(R) if q is None else np.asarray(q, dtype=float)
    m = R > 0
    flow = q[:, None] * R
    I = float(np.sum(flow[m] * np.log(R[m] / P[m])))
    I_hat = float(np.sum(flow[m] * np.log(R[m] / Ph[m])))
    vs = float(np.sum(flow[m] * np.log(P[m] / Ph[m])))
    return Level3Report(I, I_hat, vs, abs(I_hat - I - vs))


def rate_functions(model, alpha_grid=(-1.0, 2.0, DEFAULT_POINTS), s_grid=None):
    """Rates ``I`` and ``I_hat`` of ``sigma_t / t`` under the forward and reference measures.

    ``I(s) = sup_alpha(-alpha s - e(alpha))`` from the chain's pressure and
    ``I_hat(s) = sup_alpha(alpha s - e_hat(alpha))`` from the pressure of the
    swapped pair, computed independently.
    """
    pair = as_pair(model)
    lo, hi, n = alpha_grid
    e = pressure_grid(pair, lo, hi, n)
    e_hat = pressure_grid(pair.swapped(), lo, hi, n)
    if s_grid is None:
        slope = np.max(np.abs(np.diff(e.values))) / e.spacing
        s_grid = (-slope, slope, DEFAULT_POINTS)
    I = rate_from_pressure(e, *s_grid)
    I_hat = legendre(e_hat, *s_grid)
    return I, I_hat


def biased_cycle(forward=0.7, backward=0.2):
    """Three-state cycle stepping forward, backward or staying put."""
    stay = 1.0 - forward - backward
    P = np.array([[stay, forward, backward],
                  [backward, stay, forward],
                  [forward, backward, stay]])
    return MarkovModel(P)


def random_chain(n, rng, sparsity=0.0):
    """Random irreducible chain with symmetric support (for property checks)."""
    while True:
        W = rng.random((n, n)) + 1e-3
        if sparsity > 0:
            keep = rng.random((n, n)) >= sparsity
            keep = keep & keep.T
            np.fill_diagonal(keep, True)
            W = W * keep
        P = W / W.sum(axis=1, keepdims=True)
        if _is_irreducible(P):
            return MarkovModel(P)
