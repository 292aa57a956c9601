"""Named pairs of initial value problems used by the demo command and the test suite."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .fode import IVProblem


@dataclass(frozen=True)
class ProblemPair:
    name: str
    alpha: float
    rhs: Callable[[float, float], float]
    lipschitz: float
    horizon: float
    first: tuple[float, float]
    second: tuple[float, float]
    kind: str  # linear | nonlinear | shifted
    coeff: Callable[[float], float] | None = None  # a(t) for linear pairs
    x_domain: tuple[float, float] = (-20.0, 20.0)

    def problems(self) -> tuple[IVProblem, IVProblem]:
        p = IVProblem(self.alpha, self.rhs, self.first[0], self.first[1], self.horizon, self.lipschitz)
        return p, p.with_initial(*self.second)


def _linear(a):
    return lambda t, y: a(t) * y


def _neg_one(t):
    return -1.0


def _ramp(t):
    return -1.0 + t / 4.0


def _fast(t):
    return -2.0


REGISTRY: dict[str, ProblemPair] = {
    p.name: p
    for p in [
        # the crossing example: zero solution against the unit-value solution of D^1.5 y = -y
        ProblemPair("example1", 1.5, _linear(_neg_one), 1.0, 3.0, (0.0, 0.0), (1.0, 0.0), "linear", _neg_one),
        ProblemPair("linear_decay", 1.5, _linear(_neg_one), 1.0, 1.5, (0.0, 0.0), (1.0, 0.0), "linear", _neg_one),
        ProblemPair("linear_ramp", 1.5, _linear(_ramp), 1.0, 1.0, (0.0, 0.0), (1.0, 0.0), "linear", _ramp),
        ProblemPair("linear_slopes", 1.7, _linear(_fast), 2.0, 0.9, (0.0, 0.0), (0.5, 1.0), "linear", _fast),
        ProblemPair("equal_values", 1.5, _linear(_neg_one), 1.0, 2.5, (1.0, 0.0), (1.0, 0.5), "linear", _neg_one),
        ProblemPair("sine", 1.5, lambda t, y: -math.sin(y), 1.0, 1.5, (0.0, 0.0), (0.5, 0.0), "nonlinear"),
        ProblemPair("sine_shifted", 1.5, lambda t, y: -math.sin(y), 1.0, 1.5, (0.2, 0.0), (0.5, 0.1), "shifted"),
        ProblemPair("tanh_growing", 1.6, lambda t, y: -(1.0 + t / 2.0) * math.tanh(y), 1.5, 1.0,
                    (0.0, 0.0), (0.4, 0.2), "nonlinear", x_domain=(-10.0, 10.0)),
        ProblemPair("identical", 1.5, _linear(_neg_one), 1.0, 1.5, (1.0, 0.0), (1.0, 0.0), "linear", _neg_one),
    ]
}


def get(name: str) -> ProblemPair:
    try:
        return REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown problem {name!r}; known: {', '.join(sorted(REGISTRY))}") from None


@dataclass
class PairReport:
    pair: ProblemPair
    times: np.ndarray
    diff: np.ndarray  # |y2 - y1|
    gronwall: np.ndarray
    lower: np.ndarray  # nan beyond the horizon
    upper: np.ndarray
    t_star: float
    eps: float
    sandwich_ok: bool
    dominance_ok: bool
    separation: object
    envelope: object = None

    def verdict(self) -> str:
        lines = [f"problem: {self.pair.name} ({self.pair.kind})", f"T* = {self.t_star!r}",
                 f"tolerance band = {self.eps:.3e}",
                 f"sandwich: {'PASS' if self.sandwich_ok else 'FAIL'}",
                 f"gronwall dominance: {'PASS' if self.dominance_ok else 'FAIL'}"]
        sep = self.separation
        if sep.configuration == "identical":
            lines.append(f"identical data: max |diff| = {float(np.max(self.diff)):.3e}")
        else:
            lines.append(f"ordered on (0, T*]: {'PASS' if sep.separated else 'FAIL'}")
            if sep.first_crossing is not None:
                where = "after" if sep.crossing_after_tstar else "before"
                lines.append(f"first crossing at t = {sep.first_crossing:.6f} ({where} T*)")
            else:
                lines.append("no crossing on [0, T]")
        return "\n".join(lines) + "\n"


def evaluate_pair(pair: ProblemPair, n_steps: int = 1024, stride: int = 16) -> PairReport:
    """Solve a registered pair and compare |y2 - y1| with the Gronwall and refined envelopes.

    The envelope is evaluated on every ``stride``-th solver node up to
    min(T*, T); the tolerance band is the one used by separation_check.
    """
    from . import bounds

    p1, p2 = pair.problems()
    sep = bounds.separation_check(p1, p2, n_steps)
    times = sep.times
    diff = np.abs(sep.diff)
    d0, d1 = abs(pair.second[0] - pair.first[0]), abs(pair.second[1] - pair.first[1])
    gron = np.array([bounds.gronwall_envelope(pair.alpha, pair.lipschitz, d0, d1, t) for t in times])
    lower = np.full(times.size, np.nan)
    upper = np.full(times.size, np.nan)
    env = None
    if sep.configuration == "identical":
        lower[:] = upper[:] = 0.0
        t_star = pair.horizon
    else:
        t_star = sep.t_star
        idx = np.arange(0, times.size, stride)
        idx = idx[times[idx] <= t_star * (1 + 1e-12)]
        ts = times[idx]
        if pair.kind == "linear":
            env = bounds.linear_envelope(pair.alpha, pair.coeff, d0, d1, ts)
        elif pair.kind == "nonlinear":
            if pair.first != (0.0, 0.0):
                raise ValueError("nonlinear pairs compare against the zero solution")
            env = bounds.nonlinear_envelope(p2, ts, x_domain=pair.x_domain, check_horizon=False)
        else:
            env = bounds.shifted_envelope(p1, p2, ts, y_domain=pair.x_domain, n_steps=n_steps,
                                          check_horizon=False)
        lower[idx], upper[idx] = env.lower, env.upper
    have = ~np.isnan(lower)
    eps = sep.band
    sandwich = bool(np.all((lower[have] - eps <= diff[have]) & (diff[have] <= upper[have] + eps)))
    dominance = bool(np.all(upper[have] <= gron[have] * (1 + 1e-12) + 1e-15))
    return PairReport(pair, times, diff, gron, lower, upper, t_star, eps, sandwich, dominance, sep, env)
