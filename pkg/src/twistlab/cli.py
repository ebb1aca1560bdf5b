"""Command-line interface: ``twistlab <command> [options]``.

Commands: rotnum, twist-interval, rotation-set, phase-portrait, tongue,
curves, recurrence, verify.

Options may also come from a configuration file (``--config``) with two
sections::

    [family]
    kind = shear
    phi = square

    [run]
    tol = 1e-6

Flags given on the command line override file values. Unknown sections or
keys are rejected.

Exit codes: 0 success, 1 a verify claim failed, 2 configuration error,
3 iteration budget exceeded, 4 requested tongue not in range.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field, fields
from typing import Optional

import numpy as np

from . import annulus, billiard, circle, curves, families
from .cover import AnnulusLift, CircleLift, advance_reduced, boundary_restriction
from .errors import (
    BudgetExceeded,
    ConfigError,
    InsufficientDensity,
    InvalidFamily,
    NotDisjoint,
    NotInvariant,
    NotLocked,
    TongueMissed,
    TwistlabError,
)

EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2
EXIT_BUDGET = 3
EXIT_TONGUE = 4

FAMILY_KEYS = ("kind", "alpha", "omega", "eps", "a", "b", "phi", "psi", "eps0", "p", "q")
FLOAT_KEYS = {"alpha", "omega", "eps", "a", "b", "eps0"}
INT_KEYS = {"p", "q"}


@dataclass
class RunConfig:
    """Everything a command needs; family parameters live in ``family``."""

    family: dict = field(default_factory=dict)
    tol: float = 1e-6
    boundary: Optional[int] = None
    nx: int = 64
    ny: int = 64
    n: int = 10**5
    bins: int = 64
    window: int = 3
    seeds: int = 40
    steps: int = 2000
    x0: float = 0.0
    t_lo: float = 0.0
    t_hi: float = 1.0
    y1: float = 0.2
    y2: float = 0.7
    curve_seeds: int = 1
    curve_steps: int = 2000
    ball: float = 1e-3
    horizon: int = 10**4
    max_iterations: int = 10**8
    seed: Optional[int] = None
    threads: Optional[int] = None
    out: Optional[str] = None
    csv: Optional[str] = None
    negative_control: bool = False

    def validate(self) -> None:
        for name in ("tol", "ball"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        for name in ("nx", "ny", "n", "bins", "window", "seeds", "steps", "curve_seeds",
                     "curve_steps", "horizon", "max_iterations"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.boundary not in (None, 0, 1):
            raise ConfigError("boundary must be 0 or 1")
        if self.threads is not None and self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if not self.t_lo < self.t_hi:
            raise ConfigError("need t_lo < t_hi")


RUN_TYPES = {f.name: f.type for f in fields(RunConfig) if f.name != "family"}


def _coerce(key: str, raw: str, kind: str):
    try:
        if kind in ("float", "Optional[float]"):
            return float(raw)
        if kind in ("int", "Optional[int]"):
            return int(raw)
        if kind == "bool":
            low = raw.strip().lower()
            if low not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(raw)
            return low in ("true", "1", "yes")
        return raw
    except ValueError:
        raise ConfigError(f"bad value for {key}: {raw!r}") from None


def read_config(path: str) -> RunConfig:
    """Parse a ``[family]`` / ``[run]`` file strictly."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    cfg = RunConfig()
    for section in parser.sections():
        if section not in ("family", "run"):
            raise ConfigError(f"unknown section [{section}]")
    if parser.has_section("family"):
        for key, raw in parser.items("family"):
            if key not in FAMILY_KEYS:
                raise ConfigError(f"unknown key {key!r} in [family]")
            if key in FLOAT_KEYS:
                cfg.family[key] = _coerce(key, raw, "float")
            elif key in INT_KEYS:
                cfg.family[key] = _coerce(key, raw, "int")
            else:
                cfg.family[key] = raw.strip()
    if parser.has_section("run"):
        for key, raw in parser.items("run"):
            if key not in RUN_TYPES:
                raise ConfigError(f"unknown key {key!r} in [run]")
            setattr(cfg, key, _coerce(key, raw, RUN_TYPES[key]))
    return cfg


def _fmt(x: float) -> str:
    return format(x, ".17g")


def dumps(obj) -> str:
    """JSON text with every float written to 17 significant digits; non-finite floats become null."""
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt(float(obj)) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{dumps(str(k))}: {dumps(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(dumps(v) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def _emit(text: str, path: Optional[str]) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _family_params(cfg: RunConfig) -> tuple:
    params = dict(cfg.family)
    kind = params.pop("kind", None)
    if kind is None:
        raise ConfigError("no family given (use --family or kind = ... in [family])")
    return kind, params


def build_family(cfg: RunConfig) -> families.FamilySpec:
    kind, params = _family_params(cfg)
    try:
        return families.make_family(kind, **params)
    except (InvalidFamily, NotLocked, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def _rng(cfg: RunConfig) -> np.random.Generator:
    return np.random.default_rng(cfg.seed)


def _estimate(r: circle.RotationEstimate) -> dict:
    return {
        "value": r.value,
        "halfwidth": r.halfwidth,
        "iterations": r.iterations,
        "seed_x": r.seed,
        "exact": list(r.exact) if r.exact else None,
    }


def cmd_rotnum(cfg: RunConfig) -> int:
    spec = build_family(cfg)
    if isinstance(spec.lift, CircleLift):
        g = spec.lift
    else:
        if cfg.boundary is None:
            raise ConfigError(f"{spec.kind} is an annulus family; pass --boundary 0 or 1")
        g = boundary_restriction(spec.lift, cfg.boundary)
    x0 = float(_rng(cfg).random()) if cfg.seed is not None else cfg.x0
    r = circle.rotation_number_adaptive(g, cfg.tol, x0=x0, max_iterations=cfg.max_iterations)
    _emit(dumps(_estimate(r)) + "\n", cfg.out)
    return 0


def _annulus(cfg: RunConfig) -> families.FamilySpec:
    spec = build_family(cfg)
    if not isinstance(spec.lift, AnnulusLift):
        raise ConfigError(f"{spec.kind} is a circle family; this command needs an annulus family")
    return spec


def _verdict(v: Optional[bool]):
    return "undecided" if v is None else v


def twist_summary(F: AnnulusLift, tol: float, max_iterations: int = 10**8) -> dict:
    ti = annulus.twist_interval(F, tol, max_iterations=max_iterations)
    if ti.rho0.hi < ti.rho1.lo:
        sep = True
    elif ti.rho0.lo > ti.rho1.hi:
        sep = False
    else:
        sep = None
    return {"rho0": _estimate(ti.rho0), "rho1": _estimate(ti.rho1), "separated": _verdict(sep)}


def cmd_twist_interval(cfg: RunConfig) -> int:
    spec = _annulus(cfg)
    _emit(dumps(twist_summary(spec.lift, cfg.tol, cfg.max_iterations)) + "\n", cfg.out)
    return 0


def cmd_rotation_set(cfg: RunConfig) -> int:
    spec = _annulus(cfg)
    est = annulus.rotation_set(
        spec.lift, (cfg.nx, cfg.ny), cfg.n, cfg.bins, window=cfg.window,
        twist_tol=cfg.tol, threads=cfg.threads,
    )
    if cfg.csv:
        rows = ((p[0], p[1], lo, up, est.n) for p, lo, up in zip(est.points, est.lower, est.upper))
        _emit(csv_text(["x", "y", "lower", "upper", "n"], rows), cfg.csv)
    summary = {
        "family": spec.kind,
        "grid": [cfg.nx, cfg.ny],
        "n": est.n,
        "hull": list(est.hull),
        "histogram": {"edges": est.edges, "counts": est.counts},
        "twist_interval": [est.twist.rho0.value, est.twist.rho1.value],
        "slack": est.slack,
        "contained": est.contained,
    }
    _emit(dumps(summary) + "\n", cfg.out)
    return 0


def phase_portrait(F: AnnulusLift, seeds: np.ndarray, steps: int) -> list:
    """Rows ``(orbit_id, step, x mod 1, y)`` for every seed, vectorised over seeds."""
    frac = np.mod(seeds[:, 0], 1.0)
    count = np.zeros(len(seeds))
    y = seeds[:, 1].copy()
    xs = np.empty((steps + 1, len(seeds)))
    ys = np.empty_like(xs)
    xs[0], ys[0] = frac, y
    for k in range(1, steps + 1):
        frac, count, y = advance_reduced(F, frac, count, y, 1)
        xs[k], ys[k] = frac, y
    return [(i, k, float(xs[k, i]), float(ys[k, i])) for i in range(len(seeds)) for k in range(steps + 1)]


def cmd_phase_portrait(cfg: RunConfig) -> int:
    spec = _annulus(cfg)
    ys = (np.arange(cfg.seeds) + 0.5) / cfg.seeds
    seeds = np.column_stack([np.full(cfg.seeds, cfg.x0), ys])
    rows = phase_portrait(spec.lift, seeds, cfg.steps)
    _emit(csv_text(["orbit_id", "step", "x", "y"], rows), cfg.csv or cfg.out)
    return 0


def tongue_family(cfg: RunConfig):
    """Circle family indexed by its translation parameter (``alpha`` or ``omega``)."""
    kind, params = _family_params(cfg)
    kind = kind.replace("-", "_")
    if kind == "rigid":
        return lambda t: families.rigid(t)
    if kind in ("arnold", "arnold_circle"):
        eps = float(params.get("eps", 0.25))
        try:
            families.arnold_circle(0.0, eps)
        except InvalidFamily as exc:
            raise ConfigError(str(exc)) from None
        return lambda t: families.arnold_circle(t, eps)
    raise ConfigError(f"tongue needs a circle family (rigid or arnold), got {kind!r}")


def cmd_tongue(cfg: RunConfig) -> int:
    fam = tongue_family(cfg)
    p, q = int(cfg.family.get("p", 1)), int(cfg.family.get("q", 2))
    if q < 1:
        raise ConfigError("q must be >= 1")
    lock = circle.locking_interval(fam, p, q, (cfg.t_lo, cfg.t_hi), cfg.tol)
    out = {"p": lock.p, "q": lock.q, "t_lo": lock.t_lo, "t_hi": lock.t_hi, "tol": lock.tol, "width": lock.width}
    _emit(dumps(out) + "\n", cfg.out)
    return 0


def _curve_seeds(cfg: RunConfig, y: float) -> np.ndarray:
    xs = cfg.x0 + np.arange(cfg.curve_seeds) / cfg.curve_seeds
    return np.column_stack([xs, np.full(cfg.curve_seeds, y)])


def _curve_record(F: AnnulusLift, c: curves.CurveCandidate, L: float) -> dict:
    rec = {"source": c.source, "points": len(c.points), "gap_max": c.gap_max}
    try:
        g = curves.birkhoff_graph_check(F, c, L)
    except InsufficientDensity as exc:
        rec["graph"] = str(exc)
        return rec
    rec["graph"] = {
        "is_graph": g.is_graph,
        "lipschitz_estimate": g.lipschitz_estimate,
        "lipschitz_bound_used": g.lipschitz_bound_used,
        "invariance_residual": g.invariance_residual,
    }
    return rec


def cmd_curves(cfg: RunConfig) -> int:
    spec = _annulus(cfg)
    F = spec.lift
    c1 = curves.trace_curve(F, _curve_seeds(cfg, cfg.y1), cfg.curve_steps)
    c2 = curves.trace_curve(F, _curve_seeds(cfg, cfg.y2), cfg.curve_steps)
    L = curves.lipschitz_bound(F)
    out = {"curves": [_curve_record(F, c, L) for c in (c1, c2)]}
    # invariance is judged at the candidates' own interpolation accuracy
    inv_tol = max(cfg.tol, 1e3 * F.eps_eq)
    try:
        out["verdict"] = curves.distinct_rotation_check(F, c1, c2, cfg.tol, L=L, invariance_tol=inv_tol)
        out["rotation"] = [_estimate(curves.curve_rotation_number(F, c, cfg.tol, inv_tol)) for c in (c1, c2)]
    except InsufficientDensity:
        out["verdict"] = "insufficient_density"
    except NotInvariant:
        out["verdict"] = "not_invariant"
    except NotDisjoint:
        out["verdict"] = "not_disjoint"
    _emit(dumps(out) + "\n", cfg.out)
    return 0


def cmd_recurrence(cfg: RunConfig) -> int:
    spec = _annulus(cfg)
    X, Y = np.meshgrid((np.arange(cfg.nx) + 0.5) / cfg.nx, np.linspace(0.0, 1.0, cfg.ny))
    pts = np.column_stack([X.ravel(), Y.ravel()])
    R = curves.recurrence_scan(spec.lift, pts, cfg.horizon, cfg.ball)
    if cfg.csv:
        rows = ((p[0], p[1], int(r), int(k)) for p, r, k in zip(R.points, R.returned, R.first_return))
        _emit(csv_text(["x", "y", "returned", "first_return"], rows), cfg.csv)
    out = {"family": spec.kind, "eps": R.eps, "N": R.N, "points": len(pts),
           "returned": int(R.returned.sum()), "fraction": R.fraction}
    _emit(dumps(out) + "\n", cfg.out)
    return 0


# verify ---------------------------------------------------------------------

VERIFY_GRID = (16, 16)
VERIFY_N = 2000
VERIFY_TOL = 1e-5
CONTAINMENT_SLACK = 1e-4


def _row(claim: str, family: str, expected, verdict, passed: bool, **measured) -> dict:
    return {"claim": claim, "family": family, "expected": expected, "verdict": verdict,
            "pass": bool(passed), "measured": measured}


def verify_claims(cfg: RunConfig) -> list:
    """The claims table. Deterministic for a fixed ``cfg.seed``."""
    rng = _rng(cfg if cfg.seed is not None else RunConfig(seed=0))
    specs = [
        families.make_family("shear", phi="identity"),
        families.make_family("shear", phi="square"),
        families.make_family("shear", phi="half_sine"),
        families.make_family("float", phi="identity", psi="square"),
        families.make_family("locked_suspension"),
        families.make_family("eye_map"),
        families.make_family("billiard", a=2.0, b=1.0),
    ]
    names = ["shear(identity)", "shear(square)", "shear(half_sine)", "float(identity,square)",
             "locked_suspension", "eye_map", "billiard(2,1)"]
    if cfg.negative_control:
        # degenerate twist interval, deliberately mislabelled non-wandering
        bad = families.make_family("locked_suspension")
        bad = families.FamilySpec(bad.kind, bad.params, bad.lift,
                                  families.Truth(bad.truth.twist_interval, bad.truth.rotation_set, True),
                                  bad.extra)
        specs.append(bad)
        names.append("locked_suspension[marked non-wandering]")
    rows = []
    for name, spec in zip(names, specs):
        F, truth = spec.lift, spec.truth
        est = annulus.rotation_set(F, VERIFY_GRID, VERIFY_N, 16, twist_tol=VERIFY_TOL,
                                   slack=CONTAINMENT_SLACK + 1.0 / annulus.checkpoints(VERIFY_N, 3)[0],
                                   threads=cfg.threads)
        ti = est.twist
        lo_t, hi_t = truth.twist_interval
        ok = abs(ti.rho0.value - lo_t) <= ti.rho0.halfwidth + 1e-6 and abs(ti.rho1.value - hi_t) <= ti.rho1.halfwidth + 1e-6
        rows.append(_row("truth.twist_interval", name, [lo_t, hi_t], [ti.rho0.value, ti.rho1.value], ok,
                         halfwidths=[ti.rho0.halfwidth, ti.rho1.halfwidth]))
        rows.append(_row("containment", name, True, est.contained, est.contained,
                         hull=list(est.hull), slack=est.slack))
        sep = annulus.boundary_twist_condition(F, VERIFY_TOL)
        if truth.non_wandering:
            rows.append(_row("separation(non-wandering)", name, True, _verdict(sep), sep is True))
        elif lo_t == hi_t:
            rows.append(_row("separation(degenerate)", name, "undecided", _verdict(sep), sep is None))
    F = specs[0].lift
    xs = np.arange(32) / 32
    c1 = curves.trace_curve(F, np.column_stack([xs, np.full(32, 0.2)]), 200)
    c2 = curves.trace_curve(F, np.column_stack([xs, np.full(32, 0.7)]), 200)
    v = curves.distinct_rotation_check(F, c1, c2, 1e-6)
    rows.append(_row("distinct_curves", names[0], "distinct", v, v == "distinct", y=[0.2, 0.7]))
    e = specs[6].extra["ellipse"]
    res = []
    for _ in range(100):
        st = billiard.BilliardState(float(rng.uniform(0.0, e.perimeter)), float(rng.uniform(0.05, np.pi - 0.05)))
        res.append(billiard.twist_derivative_check(e, st).rel_residual)
    worst = max(res)
    rows.append(_row("billiard_twist_derivative", names[6], "<= 1e-4", worst, worst <= 1e-4, states=100))
    return rows


def cmd_verify(cfg: RunConfig) -> int:
    rows = verify_claims(cfg)
    ok = all(r["pass"] for r in rows)
    _emit(dumps({"all_pass": ok, "claims": rows}) + "\n", cfg.out)
    return 0 if ok else EXIT_VERIFY_FAILED


COMMANDS = {
    "rotnum": cmd_rotnum,
    "twist-interval": cmd_twist_interval,
    "rotation-set": cmd_rotation_set,
    "phase-portrait": cmd_phase_portrait,
    "tongue": cmd_tongue,
    "curves": cmd_curves,
    "recurrence": cmd_recurrence,
    "verify": cmd_verify,
}


def get_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("global")
    g.add_argument("--config", metavar="PATH", help="configuration file with [family] and [run] sections")
    g.add_argument("--seed", type=int, help="random seed")
    g.add_argument("--threads", type=int, help="worker threads (default: $TWISTLAB_THREADS or 1)")
    g.add_argument("--out", metavar="PATH", help="write the main output here instead of stdout")
    f = common.add_argument_group("family")
    f.add_argument("--family", dest="kind", help="rigid, arnold, shear, float, locked_suspension, eye_map, billiard")
    for name in ("alpha", "omega", "eps", "a", "b", "eps0"):
        f.add_argument(f"--{name}", type=float)
    f.add_argument("--phi", help="profile name: identity, square, sqrt, half_sine, constant")
    f.add_argument("--psi", help="profile name for the float family")
    f.add_argument("--p", type=int)
    f.add_argument("--q", type=int)
    r = common.add_argument_group("run")
    r.add_argument("--tol", type=float)
    r.add_argument("--boundary", type=int, choices=(0, 1))
    r.add_argument("--nx", type=int)
    r.add_argument("--ny", type=int)
    r.add_argument("--n", type=int, help="iterations per rotation sample")
    r.add_argument("--bins", type=int)
    r.add_argument("--window", type=int)
    r.add_argument("--seeds", type=int, help="phase-portrait orbit count")
    r.add_argument("--steps", type=int, help="phase-portrait steps per orbit")
    r.add_argument("--x0", type=float)
    r.add_argument("--t-lo", dest="t_lo", type=float)
    r.add_argument("--t-hi", dest="t_hi", type=float)
    r.add_argument("--y1", type=float)
    r.add_argument("--y2", type=float)
    r.add_argument("--curve-seeds", dest="curve_seeds", type=int)
    r.add_argument("--curve-steps", dest="curve_steps", type=int)
    r.add_argument("--ball", type=float, help="recurrence ball radius")
    r.add_argument("--horizon", type=int, help="recurrence iteration budget")
    r.add_argument("--max-iterations", dest="max_iterations", type=int)
    r.add_argument("--csv", metavar="PATH", help="per-point CSV output")
    r.add_argument("--negative-control", dest="negative_control", action="store_true", default=None,
                   help="verify: add a degenerate family wrongly marked non-wandering")
    parser = argparse.ArgumentParser(prog="twistlab", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = read_config(args.config) if args.config else RunConfig()
    for key in FAMILY_KEYS:
        v = getattr(args, key, None)
        if v is not None:
            cfg.family[key] = v
    for key in RUN_TYPES:
        v = getattr(args, key, None)
        if v is not None:
            setattr(cfg, key, v)
    if cfg.threads is None:
        cfg.threads = annulus.default_threads()
    cfg.validate()
    return cfg


def main(argv=None) -> int:
    args = get_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"twistlab: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BudgetExceeded as exc:
        print(f"twistlab: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except TongueMissed as exc:
        print(f"twistlab: tongue missed: {exc}", file=sys.stderr)
        return EXIT_TONGUE
    except TwistlabError as exc:
        print(f"twistlab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
