"""Gray coding of the tent map and the first-return (inducing) coding.

The inducing intervals are ``I_t = ]2^(-t-1), 2^(-t)]``; a point of ``I_t``
returns after ``t + 1`` steps and ``psi(x) = 2 - 2^(t+1) x``. Codes are
sequences over ``{0, 1, 2, ...} U {inf}``, ``inf`` standing for the point 0.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

INF = math.inf


def gray_decode(symbols):
    """Point coded by a finite binary prefix: ``b_0 = s_0``, ``b_k = s_k xor b_(k-1)``, ``x = sum b_k 2^(-k-1)``."""
    x = Fraction(0)
    b = 0
    for k, s in enumerate(symbols):
        if s not in (0, 1):
            raise ValueError("symbols must be 0 or 1")
        b = s if k == 0 else s ^ b
        if b:
            x += Fraction(1, 2 ** (k + 1))
    return float(x)


def gray_encode(x, length):
    """Itinerary ``s_k = 1 if phi^k(x) > 1/2`` for ``k < length``, computed exactly."""
    y = Fraction(x)
    if not 0 <= y <= 1:
        raise ValueError("x must lie in [0, 1]")
    half = Fraction(1, 2)
    out = []
    for _ in range(length):
        if y == half:
            raise ValueError("critical preimage: the orbit hits 1/2")
        out.append(1 if y > half else 0)
        y = 2 * y if y <= half else 2 - 2 * y
    return tuple(out)


def _admissible(a, b):
    # 0 -> finite, n >= 1 -> anything, inf -> inf
    if a == INF:
        return b == INF
    if a == 0:
        return b != INF
    return True


@dataclass(frozen=True)
class CodeWord:
    """Eventually periodic code ``prefix + period period ...``.

    An empty ``period`` means a truncated finite prefix.
    """

    prefix: tuple = ()
    period: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(self.prefix))
        object.__setattr__(self, "period", tuple(self.period))
        for s in self.prefix + self.period:
            if not (s == INF or (isinstance(s, (int, np.integer)) and s >= 0)):
                raise ValueError(f"invalid symbol {s!r}")
        seq = self.prefix + self.period + self.period[:1]
        for a, b in zip(seq[:-1], seq[1:]):
            if not _admissible(a, b):
                raise ValueError(f"inadmissible transition {a} -> {b}")

    def symbols(self, k):
        """First ``k`` symbols (requires a period or a long enough prefix)."""
        out = list(self.prefix[:k])
        if len(out) < k and not self.period:
            raise ValueError("truncated code is too short")
        i = 0
        while len(out) < k:
            out.append(self.period[i % len(self.period)])
            i += 1
        return tuple(out)

    def shift(self):
        if self.prefix:
            return CodeWord(self.prefix[1:], self.period)
        if not self.period:
            raise ValueError("empty code")
        return CodeWord((), self.period[1:] + self.period[:1])


def interval_index(x):
    """``t`` with ``x`` in ``I_t``; ``inf`` for ``x = 0``."""
    x = Fraction(x)
    if not 0 <= x <= 1:
        raise ValueError("x must lie in [0, 1]")
    if x == 0:
        return INF
    t = max(0, int(math.floor(-math.log2(float(x)))) - 1) if float(x) > 0 else 0
    while Fraction(1, 2 ** t) < x:
        t -= 1
    while Fraction(1, 2 ** (t + 1)) >= x:
        t += 1
    return t


def psi(x):
    """First-return map ``2 - 2^(t+1) x`` on ``I_t``; exact on Fractions."""
    t = interval_index(x)
    if t == INF:
        return Fraction(0) if isinstance(x, Fraction) else 0.0
    return 2 - 2 ** (t + 1) * x


def induce_T(x, k_max):
    """First ``k_max`` symbols of the inducing code of ``x`` in ``]0, 1[``.

    Iterates exactly on the rational value of ``x``; when the orbit reaches 0
    the code ends in ``inf`` repeated.
    """
    y = Fraction(x)
    if not 0 < y < 1:
        raise ValueError("x must lie in ]0, 1[")
    out = []
    while len(out) < k_max:
        t = interval_index(y)
        if t == INF:
            return CodeWord(tuple(out), (INF,))
        out.append(t)
        y = 2 - 2 ** (t + 1) * y
    return CodeWord(tuple(out), ())


def _pow2(t):
    return Fraction(0) if t == INF else Fraction(1, 2 ** t)


def periodic_value(period):
    """Closed form of ``X`` on a purely periodic code ``(t_0 ... t_(s-1))`` repeated."""
    if all(t == INF for t in period):
        return Fraction(0)
    if any(t == INF for t in period):
        raise ValueError("inf may only appear as the tail inf inf ...")
    num = Fraction(0)
    cum = 0
    for r, t in enumerate(period):
        cum += t
        num += Fraction(1, 2 ** cum) * Fraction(-1, 2) ** r
    den = 1 - Fraction(1, 2 ** cum) * Fraction(-1, 2) ** len(period)
    return num / den


def induce_X(code):
    """Point with inducing code ``code``, as an exact Fraction.

    Periodic parts use the closed form; each prefix symbol ``u`` applies
    ``X(u w) = 2^(-u) (1 - X(w) / 2)``. A truncated code is summed as the
    finite series ``sum_k 2^(-(t_0 + ... + t_k)) (-2)^(-k)``.
    """
    if not isinstance(code, CodeWord):
        code = CodeWord(tuple(code), ())
    x = periodic_value(code.period) if code.period else Fraction(0)
    if not code.period:
        total = Fraction(0)
        cum = 0
        for k, t in enumerate(code.prefix):
            cum += t
            total += _pow2(cum) * Fraction(-1, 2) ** k
        return total
    for u in reversed(code.prefix):
        x = _pow2(u) * (1 - x / 2)
    return x


def psi_periodic_point(period, iters=200):
    """Float periodic point of ``psi`` with the given code, by iterating inverse branches.

    The inverse branch on ``I_t`` is ``y -> 2^(-t) (1 - y / 2)``, a contraction.
    """
    y = 0.5
    for _ in range(iters):
        for t in reversed(period):
            y = 2.0 ** (-t) * (1.0 - y / 2.0)
    return y


def induced_potential(pot, code):
    """``v#(t) = sum_{r=0}^{t_0} v(phi^r(X(t)))``; on ``I_(t_0)`` the first ``t_0`` steps just double."""
    if not isinstance(code, CodeWord):
        code = CodeWord(tuple(code), ())
    t0 = code.symbols(1)[0]
    if t0 == INF:
        raise ValueError("t_0 = inf has no return")
    x = induce_X(code)
    pts = [float(x * 2 ** r) for r in range(t0 + 1)]
    return math.fsum(np.atleast_1d(pot(np.array(pts))).tolist())
