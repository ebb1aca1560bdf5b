"""Built-in example systems with ground-truth metadata.

Circle families return :class:`CircleLift`; annulus families return
:class:`AnnulusLift`. :func:`make_family` builds any of them by name and
attaches a :class:`Truth` record used by the verification harness.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from . import billiard as _billiard
from .circle import locking_interval
from .cover import (
    AnnulusLift,
    CircleLift,
    boundary_restriction,
    check_equivariance,
    is_strictly_monotone,
    sample_points,
)
from .errors import InvalidFamily, NotLocked, TongueMissed

PROFILES: dict = {
    "identity": lambda y: y,
    "square": lambda y: y * y,
    "sqrt": np.sqrt,
    "half_sine": lambda y: 0.5 * (1.0 + np.sin(0.5 * np.pi * y)),
    "constant": lambda y: 0.5 + 0.0 * y,
}


@dataclass(frozen=True)
class Truth:
    twist_interval: tuple
    rotation_set: str
    non_wandering: bool
    rotation_points: tuple = ()


@dataclass(frozen=True)
class FamilySpec:
    kind: str
    params: dict
    lift: object
    truth: Optional[Truth] = None
    extra: dict = field(default_factory=dict)


def profile(name_or_fn) -> Callable:
    if callable(name_or_fn):
        return name_or_fn
    try:
        return PROFILES[name_or_fn]
    except KeyError:
        raise InvalidFamily(f"unknown profile {name_or_fn!r}; known: {sorted(PROFILES)}") from None


def _check_nondecreasing(fn, name: str, strict: bool = False) -> None:
    ys = np.linspace(0.0, 1.0, 513)
    d = np.diff(fn(ys))
    if np.any(d < 0.0) or (strict and np.any(d <= 0.0)):
        raise InvalidFamily(f"{name} is not {'strictly ' if strict else ''}increasing on [0, 1]")


def validate(F: AnnulusLift, tol: Optional[float] = None) -> None:
    """Registration check: equivariance, boundary preservation, monotone boundary maps."""
    tol = F.eps_eq if tol is None else tol
    rep = check_equivariance(F, sample_points(16, 9), max(tol, 1e-12))
    if not rep.passed:
        raise InvalidFamily(
            f"{F.label}: equivariance residual {rep.equivariance_residual:.3g}, "
            f"boundary residual {rep.boundary_residual:.3g}"
        )
    for i in (0, 1):
        if not is_strictly_monotone(boundary_restriction(F, i)):
            raise InvalidFamily(f"{F.label}: boundary {i} restriction is not increasing")


def rigid(alpha: float) -> CircleLift:
    return CircleLift(lambda x: x + alpha, f"rigid({alpha:g})")


def arnold_circle(omega: float, eps: float) -> CircleLift:
    """``x -> x + omega + eps/(2 pi) sin(2 pi x)``; a homeomorphism for ``0 <= eps < 1``."""
    if not 0.0 <= eps < 1.0:
        raise InvalidFamily(f"eps must lie in [0, 1), got {eps}")
    k = eps / (2.0 * np.pi)
    return CircleLift(lambda x: x + omega + k * np.sin(2.0 * np.pi * x), f"arnold({omega:g},{eps:g})")


def shear(phi) -> AnnulusLift:
    """``(x, y) -> (x + phi(y), y)``."""
    phi = profile(phi)
    _check_nondecreasing(phi, "phi")

    def F(x, y):
        return x + phi(y), y

    lift = AnnulusLift(F, "shear", meta={"kind": "shear"})
    validate(lift)
    return lift


def float_map(phi, psi) -> AnnulusLift:
    """``(x, y) -> (x + phi(y), psi(y))`` with ``psi`` an increasing homeomorphism of [0, 1]."""
    phi, psi = profile(phi), profile(psi)
    _check_nondecreasing(phi, "phi")
    _check_nondecreasing(psi, "psi", strict=True)
    if psi(0.0) != 0.0 or psi(1.0) != 1.0:
        raise InvalidFamily("psi must fix both endpoints")

    def F(x, y):
        return x + phi(y), psi(y)

    lift = AnnulusLift(F, "float", meta={"kind": "float"})
    validate(lift)
    return lift


def locked_suspension(
    g0: CircleLift, eps0: float, p: int, q: int, tol: float = 1e-10
) -> AnnulusLift:
    """``(x, y) -> (g0(x) + eps0 * y, y)``: the family ``g0 + t``, ``t`` in [0, eps0], stacked.

    Locking of every member at ``p/q`` is certified first.
    """
    if eps0 <= 0:
        raise InvalidFamily("eps0 must be positive")
    try:
        lock = locking_interval(lambda t: g0.shifted(t), p, q, (-1.0, 1.0), tol)
    except TongueMissed as exc:
        raise NotLocked(str(exc)) from None
    if not (lock.t_lo <= tol and eps0 <= lock.t_hi - tol):
        raise NotLocked(
            f"rho(g0 + t) = {p}/{q} only for t in [{lock.t_lo:.6g}, {lock.t_hi:.6g}], "
            f"not on [0, {eps0:g}]"
        )
    f = g0.eval

    def F(x, y):
        return f(x) + eps0 * y, y

    lift = AnnulusLift(F, f"locked[{g0.label}]", meta={"kind": "locked_suspension", "lock": lock})
    validate(lift)
    return lift


def eye_circle_map(depth: float = 0.03, slope: float = 0.5) -> CircleLift:
    """Circle lift with ``f0(x) = x + 1/2`` on [1/6, 1/3] and [2/3, 5/6].

    The gap (1/3, 2/3) is filled by a C^1 cubic Hermite spline through
    ``x + 1/2 + d`` with ``d = -depth, 0, +depth`` at 5/12, 1/2, 7/12 (slope
    ``1 + slope`` at 1/2, slope 1 elsewhere); the arc (5/6, 7/6) is the
    translation ``x + 1/2``. Off the two flat bands the only other
    2-periodic orbit is the repelling one through 1/2.
    """
    kx = np.array([1 / 6, 1 / 3, 5 / 12, 1 / 2, 7 / 12, 2 / 3, 7 / 6])
    kv = kx + 0.5 + np.array([0.0, 0.0, -depth, 0.0, depth, 0.0, 0.0])
    kd = np.array([1.0, 1.0, 1.0, 1.0 + slope, 1.0, 1.0, 1.0])
    spline = CubicHermiteSpline(kx, kv, kd)

    def f0(x):
        u = np.asarray(x, dtype=float) - 1 / 6
        k = np.floor(u)
        out = spline(u - k + 1 / 6) + k
        return out if out.ndim else float(out)

    g = CircleLift(f0, f"eye_f0({depth:g},{slope:g})")
    if not is_strictly_monotone(g, np.linspace(0.0, 1.0, 4097)):
        raise InvalidFamily("eye-map completion is not a circle homeomorphism")
    return g


EYE_BANDS = ((1 / 6, 1 / 3), (2 / 3, 5 / 6))


def eye_map(eps0: float = 0.01, depth: float = 0.03, slope: float = 0.5, tol: float = 1e-10) -> AnnulusLift:
    """``(x, y) -> (f0(x) + s, y)`` with ``s = eps0 (2y - 1)`` in [-eps0, eps0].

    In the unscaled coordinate ``s`` the twist is exactly 1; in ``y`` it is
    ``2 * eps0``. Locking of ``f0 + s`` at 1/2 is certified on [-eps0, eps0].
    """
    if eps0 <= 0:
        raise InvalidFamily("eps0 must be positive")
    g0 = eye_circle_map(depth, slope)
    try:
        lock = locking_interval(lambda t: g0.shifted(t), 1, 2, (-0.25, 0.25), tol)
    except TongueMissed as exc:
        raise NotLocked(str(exc)) from None
    if not (lock.t_lo <= -eps0 + tol and eps0 <= lock.t_hi - tol):
        raise NotLocked(f"f0 + s is locked at 1/2 only for s in [{lock.t_lo:.6g}, {lock.t_hi:.6g}]")
    f = g0.eval

    def F(x, y):
        return f(x) + eps0 * (2.0 * y - 1.0), y

    lift = AnnulusLift(F, "eye", meta={"kind": "eye_map", "lock": lock, "eps0": eps0})
    validate(lift)
    return lift


def make_family(kind: str, **params) -> FamilySpec:
    """Build a named family together with its ground-truth record."""
    kind = kind.replace("-", "_")
    if kind == "rigid":
        alpha = float(params.get("alpha", 0.0))
        return FamilySpec(kind, {"alpha": alpha}, rigid(alpha))
    if kind in ("arnold", "arnold_circle"):
        omega, eps = float(params.get("omega", 0.5)), float(params.get("eps", 0.25))
        return FamilySpec("arnold_circle", {"omega": omega, "eps": eps}, arnold_circle(omega, eps))
    if kind == "shear":
        name = params.get("phi", "identity")
        phi = profile(name)
        lo, hi = float(phi(0.0)), float(phi(1.0))
        return FamilySpec(kind, {"phi": name}, shear(phi),
                          Truth((lo, hi), f"[{lo:g}, {hi:g}]", True))
    if kind == "float":
        pn, sn = params.get("phi", "identity"), params.get("psi", "square")
        phi, psi = profile(pn), profile(sn)
        ys = np.linspace(0.0, 1.0, 1025)
        fixed = ys[np.abs(psi(ys) - ys) <= 1e-12]
        lo, hi = float(phi(0.0)), float(phi(1.0))
        nonwandering = fixed.size == ys.size
        pts = () if nonwandering else tuple(float(v) for v in np.unique(phi(fixed)))
        desc = f"[{lo:g}, {hi:g}]" if nonwandering else "{" + ", ".join(f"{v:g}" for v in pts) + "}"
        return FamilySpec(kind, {"phi": pn, "psi": sn}, float_map(phi, psi),
                          Truth((lo, hi), desc, nonwandering, pts))
    if kind == "locked_suspension":
        omega, eps = float(params.get("omega", 0.5)), float(params.get("eps", 0.25))
        p, q = int(params.get("p", 1)), int(params.get("q", 2))
        eps0 = float(params.get("eps0", 0.002))
        F = locked_suspension(arnold_circle(omega, eps), eps0, p, q)
        r = p / q
        return FamilySpec(kind, {"omega": omega, "eps": eps, "p": p, "q": q, "eps0": eps0}, F,
                          Truth((r, r), f"{{{p}/{q}}}", False, (r,)))
    if kind == "eye_map":
        eps0 = float(params.get("eps0", 0.01))
        F = eye_map(eps0)
        return FamilySpec(kind, {"eps0": eps0}, F, Truth((0.5, 0.5), "contains 1/2", False))
    if kind == "billiard":
        a, b = float(params.get("a", 2.0)), float(params.get("b", 1.0))
        e = _billiard.Ellipse(a, b)
        F = _billiard.as_annulus_lift(e)
        validate(F)
        return FamilySpec(kind, {"a": a, "b": b}, F, Truth((0.0, 1.0), "[0, 1]", True), {"ellipse": e})
    raise InvalidFamily(f"unknown family kind {kind!r}")


ANNULUS_KINDS = ("shear", "float", "locked_suspension", "eye_map", "billiard")
CIRCLE_KINDS = ("rigid", "arnold_circle")
