"""Rotation numbers of circle homeomorphisms.

Every estimate carries a rigorous enclosure. For a degree-one lift ``g``
with displacement ``D_n(x) = g^n(x) - x`` the rotation number satisfies

    min_x D_n(x) <= n * rho <= max_x D_n(x)   and   |D_n(x) - n * rho| < 1,

and monotonicity of ``g^n`` turns samples on a grid of spacing ``h`` into
bounds on the extrema: ``D_n(x) >= g^n(x_i) - x_{i+1}`` on ``[x_i, x_{i+1}]``.
A rational ``p/q`` is certified exactly when ``g^q(x) - x - p`` changes sign.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import numpy as np
from scipy.optimize import bisect, minimize_scalar

from .cover import CircleLift, is_strictly_monotone
from .errors import BudgetExceeded, NonMonotoneDetected, TongueMissed

GRID_PER_PERIOD = 64
DEFAULT_CAP = 10**8


@dataclass(frozen=True)
class RotationEstimate:
    value: float
    halfwidth: float
    iterations: int
    seed: float = 0.0
    exact: Optional[tuple] = None  # (p, q) when certified by a periodic point

    @property
    def lo(self) -> float:
        return self.value - self.halfwidth

    @property
    def hi(self) -> float:
        return self.value + self.halfwidth

    def contains(self, v: float, slack: float = 0.0) -> bool:
        return self.lo - slack <= v <= self.hi + slack

    def overlaps(self, other: "RotationEstimate") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi


@dataclass(frozen=True)
class LockingInterval:
    p: int
    q: int
    t_lo: float
    t_hi: float
    tol: float

    @property
    def width(self) -> float:
        return self.t_hi - self.t_lo


def _power(g: CircleLift, x, q: int):
    for _ in range(q):
        x = g.eval(x)
    return x


def _advance(g: CircleLift, frac, count, steps: int):
    f = g.eval
    for _ in range(steps):
        y = f(frac)
        k = np.floor(y)
        frac = y - k
        count = count + k
    return frac, count


def _locally_monotone(g: CircleLift, x: float, sep: float = 1e-7) -> bool:
    a, b, c = g.eval(np.array([x - sep, x, x + sep]))
    return a < b < c


def rotation_number(g: CircleLift, x0: float, n: int) -> RotationEstimate:
    """Single-orbit estimate ``(g^n(x0) - x0) / n`` with halfwidth ``1/n`` plus slack."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not is_strictly_monotone(g, np.concatenate([np.linspace(0.0, 1.0, 65), [x0 % 1.0]])):
        raise NonMonotoneDetected(f"{g.label} is not increasing on the sample grid")
    f = g.eval
    base = math.floor(x0)
    frac0 = x0 - base
    frac, count = frac0, 0.0
    next_check = 1
    for k in range(1, n + 1):
        y = float(f(frac))
        c = math.floor(y)
        frac = y - c
        count += c
        if k == next_check:
            if not _locally_monotone(g, frac):
                raise NonMonotoneDetected(f"{g.label} fails monotonicity near x={frac!r}")
            next_check *= 2
    disp = count + (frac - frac0)
    return RotationEstimate(float(disp) / n, 1.0 / n + g.eps_eq, n, float(x0))


def simplest_rational(lo: float, hi: float, q_max: int) -> Optional[Fraction]:
    """Fraction with the smallest denominator in ``[lo, hi]``, or None if it exceeds ``q_max``."""
    lo_f, hi_f = Fraction(lo), Fraction(hi)
    if lo_f > hi_f:
        return None
    # continued-fraction walk; h/k convergent bookkeeping keeps the denominator in reach
    h0, h1, k0, k1 = 0, 1, 1, 0
    a, b = lo_f, hi_f
    for _ in range(64):
        fa = math.floor(a)
        if Fraction(fa) == a or fa + 1 <= b:
            t = fa if Fraction(fa) == a else fa + 1
            num, den = t * h1 + h0, t * k1 + k0
            return Fraction(num, den) if den <= q_max else None
        h0, h1 = h1, fa * h1 + h0
        k0, k1 = k1, fa * k1 + k0
        if k1 > q_max:
            return None
        a, b = 1 / (b - fa), 1 / (a - fa)
    return None


def _periodic_residual(g: CircleLift, p: int, q: int):
    def h(x):
        return _power(g, x, q) - x - p

    return h


def find_periodic_point(
    g: CircleLift,
    p: int,
    q: int,
    tol: float = 1e-12,
    grid_factor: int = GRID_PER_PERIOD,
    x0: float = 0.0,
) -> Optional[float]:
    """A zero of ``h(x) = g^q(x) - x - p`` in ``[x0, x0 + 1)``, or None.

    Sign changes on a grid of ``grid_factor * q`` points are bisected; shallow
    local extrema of ``h`` are refined with a bounded scalar minimisation so
    that near-tangent crossings at tongue boundaries are not missed.
    """
    h = _periodic_residual(g, p, q)
    m = grid_factor * q
    xs = x0 + np.arange(m + 1) / m
    hs = h(xs)
    zero = np.flatnonzero(np.abs(hs) <= tol)
    if zero.size:
        return float(xs[zero[0]])
    change = np.flatnonzero(np.sign(hs[:-1]) != np.sign(hs[1:]))
    if change.size:
        i = change[0]
        return float(bisect(h, xs[i], xs[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps))
    # no sign change: look for a dip below (or a bump above) zero between grid points
    sgn = np.sign(hs[0])
    vals = sgn * hs[:-1]  # positive everywhere; a zero would be a dip to <= 0
    prev, nxt = np.roll(vals, 1), np.roll(vals, -1)
    step = np.maximum(np.abs(nxt - vals), np.abs(vals - prev))
    cand = np.flatnonzero((vals <= prev) & (vals <= nxt) & (vals <= 2.0 * step + tol))
    width = 1.0 / m
    for i in cand:
        lo, hi = xs[i] - width, xs[i] + width
        res = minimize_scalar(lambda x: sgn * h(x), bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-13})
        xm = float(res.x)
        hm = h(xm)
        if abs(hm) <= tol:
            return xm
        if sgn * hm < 0:
            return float(bisect(h, xs[i], xm, xtol=1e-15, rtol=4 * np.finfo(float).eps))
    return None


def _sign_class(g: CircleLift, p: int, q: int, grid_factor: int = GRID_PER_PERIOD) -> int:
    """-1 if rho(g) < p/q, +1 if rho(g) > p/q, 0 if a periodic point of type p/q exists."""
    if find_periodic_point(g, p, q, grid_factor=grid_factor) is not None:
        return 0
    m = grid_factor * q
    hs = _periodic_residual(g, p, q)(np.arange(m) / m)
    return -1 if hs[0] < 0 else 1


def _grid_bounds(g: CircleLift, m: int, n: int, x0: float = 0.0):
    xs = x0 + np.arange(m) / m
    base = np.floor(xs)
    frac0 = xs - base
    frac, count = _advance(g, frac0.copy(), np.zeros(m), n)
    return frac0, frac, count


def _enclosure(D: np.ndarray, n: int, m: int, eps: float):
    spacing = 1.0 / m
    lower = max(D.min() - spacing, D.max() - 1.0)
    upper = min(D.max() + spacing, D.min() + 1.0)
    return float(lower) / n - eps, float(upper) / n + eps


def rotation_number_adaptive(
    g: CircleLift,
    tol: float,
    *,
    seeds: int = 256,
    x0: float = 0.0,
    growth: float = 2.0,
    max_iterations: int = DEFAULT_CAP,
    certify_q: int = 32,
) -> RotationEstimate:
    """Rotation number to halfwidth ``tol``.

    Iterates a grid of ``seeds`` starting points with n = 1, 2, 4, ... and
    returns the first enclosure narrower than ``2 * tol``. Whenever the
    enclosure admits a rational with denominator at most ``certify_q``, a
    periodic point of that type is searched for; if one exists the rotation
    number is that rational exactly and the estimate has zero halfwidth.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if not is_strictly_monotone(g):
        raise NonMonotoneDetected(f"{g.label} is not increasing on the sample grid")
    m = seeds
    xs = x0 + np.arange(m) / m
    base = np.floor(xs)
    frac0 = xs - base
    frac, count = frac0.copy(), np.zeros(m)
    n, target = 0, 1
    tried: set = set()
    while True:
        frac, count = _advance(g, frac, count, target - n)
        n = target
        D = count + (frac - frac0)
        lo, hi = _enclosure(D, n, m, g.eps_eq)
        r = simplest_rational(lo, hi, certify_q)
        if r is not None and r not in tried:
            tried.add(r)
            if find_periodic_point(g, r.numerator, r.denominator) is not None:
                return RotationEstimate(float(r), 0.0, n, float(x0), (r.numerator, r.denominator))
        if (hi - lo) / 2.0 <= tol:
            return RotationEstimate(float(lo + hi) / 2.0, float(hi - lo) / 2.0, n, float(x0))
        nxt = max(n + 1, math.ceil(n * growth))
        if nxt > max_iterations:
            raise BudgetExceeded(
                f"halfwidth {(hi - lo) / 2:.3g} > tol {tol:.3g} at n={n} (cap {max_iterations})"
            )
        target = nxt


def coarse_enclosure(g: CircleLift, n: int = 64, seeds: int = 64) -> tuple:
    frac0, frac, count = _grid_bounds(g, seeds, n)
    return _enclosure(count + (frac - frac0), n, seeds, g.eps_eq)


def detect_rational(
    g: CircleLift, q_max: int, tol: float = 1e-12, grid_factor: int = GRID_PER_PERIOD
) -> Optional[tuple]:
    """Lowest-terms ``(p, q)`` with ``q <= q_max`` for which a periodic point exists."""
    if q_max < 1 or tol <= 0:
        raise ValueError("q_max >= 1 and tol > 0 required")
    lo, hi = coarse_enclosure(g)
    for q in range(1, q_max + 1):
        for p in range(math.ceil(q * lo - 1e-9), math.floor(q * hi + 1e-9) + 1):
            if math.gcd(p, q) != 1:
                continue
            if find_periodic_point(g, p, q, tol=tol, grid_factor=grid_factor) is not None:
                return p, q
    return None


def locking_interval(
    family: Callable[[float], CircleLift],
    p: int,
    q: int,
    t_range: tuple,
    tol: float,
    *,
    grid_factor: int = GRID_PER_PERIOD,
) -> LockingInterval:
    """Maximal parameter interval on which ``family(t)`` has rotation number ``p/q``.

    ``family`` must increase pointwise in ``t``, so rho is monotone in ``t`` and
    each endpoint is found by bisecting the predicates rho < p/q and rho > p/q.
    """
    a, b = map(float, t_range)
    if not a < b or tol <= 0:
        raise ValueError("need t_range[0] < t_range[1] and tol > 0")
    xs = np.linspace(0.0, 1.0, 17)
    if np.any(family(a).eval(xs) > family(b).eval(xs)):
        raise ValueError("family is not increasing in t on the spot-check grid")

    def cls(t):
        return _sign_class(family(t), p, q, grid_factor)

    ca, cb = cls(a), cls(b)
    if ca > 0 or cb < 0:
        raise TongueMissed(f"rho({a}) > {p}/{q} or rho({b}) < {p}/{q}; range misses the tongue")

    def boundary(lo, hi, pred):
        # pred(lo) true, pred(hi) false; returns midpoint of final bracket
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if pred(mid):
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    t_lo = a if ca == 0 else boundary(a, b, lambda t: cls(t) < 0)
    t_hi = b if cb == 0 else boundary(a, b, lambda t: cls(t) <= 0)
    if t_lo > t_hi:
        t_lo = t_hi = 0.5 * (t_lo + t_hi)
    return LockingInterval(p, q, t_lo, t_hi, tol)
