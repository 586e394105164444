"""Multistart coordinate ascent over measurement angles, threshold bisection,
and parameter sweeps."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .steering import SteeringSettings

N_ANGLES = 10
TWO_PI = 2 * np.pi
_GOLDEN = (np.sqrt(5) - 1) / 2


class BracketError(ValueError):
    pass


@dataclass(frozen=True)
class OptimizerConfig:
    multistarts: int = 32
    max_iters: int = 200
    angle_tol: float = 1e-6
    value_tol: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if self.multistarts < 1 or self.max_iters < 1:
            raise ValueError("multistarts and max_iters must be >= 1")
        if self.angle_tol <= 0 or self.value_tol <= 0:
            raise ValueError("tolerances must be positive")

    def derive(self, stream: int) -> "OptimizerConfig":
        """Independent config for a sub-task, seeded from (seed, stream)."""
        ss = np.random.SeedSequence(self.seed, spawn_key=(int(stream),))
        return replace(self, seed=int(ss.generate_state(1, dtype=np.uint64)[0]))


@dataclass(frozen=True)
class OptResult:
    value: float
    settings: SteeringSettings | None
    iterations: int
    converged: bool
    history: tuple = field(default=(), repr=False)
    angles: np.ndarray | None = field(default=None, repr=False)


def _frame(theta, phi, psi):
    """Orthonormal pair: a direction and a unit vector perpendicular to it."""
    ct, st, cp, sp = math.cos(theta), math.sin(theta), math.cos(phi), math.sin(phi)
    c, s = math.cos(psi), math.sin(psi)
    return ((st * cp, st * sp, ct),
            (c * ct * cp - s * sp, c * ct * sp + s * cp, -c * st))


def _direction(theta, phi):
    st = math.sin(theta)
    return (st * math.cos(phi), st * math.sin(phi), math.cos(theta))


def decode_angles(x):
    """Ten angles -> (first pair, second pair, untrusted pair) as 2x3 arrays.

    Trusted pairs are orthogonal by construction.
    """
    v = np.array((*_frame(x[0], x[1], x[2]), *_frame(x[3], x[4], x[5]),
                  _direction(x[6], x[7]), _direction(x[8], x[9])))
    return v[0:2], v[2:4], v[4:6]


def settings_from_angles(x) -> SteeringSettings:
    P, Q, Z = decode_angles(x)
    return SteeringSettings(tuple(P), tuple(Q), tuple(Z))


def _line_max(g, t0, f0, angle_tol):
    """Maximize a 2pi-periodic g along one coordinate, starting at t0."""
    ts = t0 + np.array([0.0, TWO_PI / 3, 2 * TWO_PI / 3])
    fs = np.array([f0, g(ts[1]), g(ts[2])])
    # Exact if g = A cos t + B sin t + C, which holds for every angle here.
    c = fs.mean()
    a = 2 / 3 * np.sum(fs * np.cos(ts))
    b = 2 / 3 * np.sum(fs * np.sin(ts))
    t_fit = math.atan2(b, a)
    f_fit = g(t_fit)
    if abs(f_fit - (c + math.hypot(a, b))) <= 1e-10:
        best = int(np.argmax(fs))
        return (t_fit, f_fit) if f_fit >= fs[best] else (ts[best], fs[best])
    # Not sinusoidal: golden-section around the best sample.
    best = int(np.argmax(fs))
    lo, hi = ts[best] - TWO_PI / 3, ts[best] + TWO_PI / 3
    x1, x2 = hi - _GOLDEN * (hi - lo), lo + _GOLDEN * (hi - lo)
    g1, g2 = g(x1), g(x2)
    while hi - lo > angle_tol:
        if g1 < g2:
            lo, x1, g1 = x1, x2, g2
            x2 = lo + _GOLDEN * (hi - lo)
            g2 = g(x2)
        else:
            hi, x2, g2 = x2, x1, g1
            x1 = hi - _GOLDEN * (hi - lo)
            g1 = g(x1)
    cand = [(ts[best], fs[best]), (x1, g1), (x2, g2)]
    return max(cand, key=lambda tf: tf[1])


def coordinate_ascent(f, x0, max_iters=200, angle_tol=1e-6, value_tol=1e-8):
    """Cyclic exact line maximization over each angle in turn.

    Returns ``(x, value, passes, converged, history)``; ``history`` holds the
    best value after each pass and never decreases.
    """
    x = np.array(x0, dtype=float)
    fx = f(x)
    history = [fx]
    converged = False
    passes = 0
    for passes in range(1, max_iters + 1):
        start = fx
        for i in range(len(x)):
            def g(t, i=i):
                y = x.copy()
                y[i] = t
                return f(y)
            t, ft = _line_max(g, x[i], fx, angle_tol)
            if ft > fx:
                x[i] = math.remainder(t, TWO_PI)
                fx = ft
        history.append(fx)
        if fx - start < value_tol:
            converged = True
            break
    return x, fx, passes, converged, tuple(history)


def maximize_angles(f, n_angles, cfg: OptimizerConfig):
    """Multistart maximization of ``f`` over ``n_angles`` periodic angles."""
    best = None
    for k in range(cfg.multistarts):
        rng = np.random.default_rng([cfg.seed, k])
        x0 = rng.uniform(0, TWO_PI, n_angles)
        run = coordinate_ascent(f, x0, cfg.max_iters, cfg.angle_tol, cfg.value_tol)
        if best is None or run[1] > best[1]:
            best = run
    return best


def maximize_settings(objective, cfg: OptimizerConfig | None = None) -> OptResult:
    """Maximize ``objective(SteeringSettings)`` over all admissible settings.

    Objectives exposing ``value_vectors(P, Q, Z)`` are evaluated on raw
    arrays, skipping settings construction.
    """
    cfg = cfg or OptimizerConfig()
    fast = getattr(objective, "value_vectors", None)
    if fast is not None:
        def f(x):
            return fast(*decode_angles(x))
    else:
        def f(x):
            return objective(settings_from_angles(x))
    x, value, passes, converged, history = maximize_angles(f, N_ANGLES, cfg)
    return OptResult(float(value), settings_from_angles(x), passes, converged, history, x)


def bisect_threshold(f, lo: float, hi: float, tol: float) -> float:
    """Smallest t in [lo, hi] with f(t) true, to within ``tol``.

    ``f`` must be monotone: false below the threshold, true above it. The
    returned point always satisfies f.
    """
    if tol <= 0 or hi <= lo:
        raise ValueError("need lo < hi and tol > 0")
    if f(lo):
        raise BracketError(f"predicate already true at lower end {lo}")
    if not f(hi):
        raise BracketError(f"predicate false at upper end {hi}")
    for _ in range(bisection_steps(lo, hi, tol)):
        mid = 0.5 * (lo + hi)
        if f(mid):
            hi = mid
        else:
            lo = mid
    return hi


def bisection_steps(lo, hi, tol) -> int:
    return max(0, math.ceil(math.log2((hi - lo) / tol)))


def expand_grid(axes: dict) -> list[dict]:
    """Cartesian product of named axes; the last axis varies fastest."""
    names = list(axes)
    return [dict(zip(names, vals)) for vals in itertools.product(*(axes[n] for n in names))]


def grid_sweep(points, evaluator) -> list[dict]:
    """Evaluate every grid point, recording per-row errors instead of raising."""
    if isinstance(points, dict):
        points = expand_grid(points)
    rows = []
    for point in points:
        row = dict(point)
        try:
            row.update(evaluator(point))
            row.setdefault("error", "")
        except (ValueError, ZeroDivisionError, ArithmeticError) as exc:
            row["error"] = f"{type(exc).__name__}: {exc}"
        rows.append(row)
    return rows
