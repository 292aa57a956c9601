"""Caputo initial value problems of order 1 < alpha < 2.

The IVP D^a y = f(t, y), y(0) = y0, y'(0) = y1 is solved in its Volterra
form

    y(t) = y0 + y1 t + 1/Gamma(a) int_0^t (t - s)^(a-1) f(s, y(s)) ds

by the fractional Adams-Bashforth-Moulton (PECE) scheme with product
rectangle (predictor) and product trapezoidal (corrector) weights. The
full history is kept, so a solve on n steps costs O(n^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .ml_core import DEFAULT_ACCURACY, MLAccuracy, mittag_leffler

Rhs = Callable[[float, float], float]


class SolverError(RuntimeError):
    """The right-hand side raised; ``t`` is the time at which it failed."""

    def __init__(self, message, t):
        super().__init__(f"{message} at t={t}")
        self.t = t


class DivergenceError(SolverError):
    pass


class ShapeError(ValueError):
    pass


@dataclass(frozen=True)
class IVProblem:
    alpha: float
    rhs: Rhs
    y0: float
    y1: float
    horizon: float
    lipschitz: float = 0.0

    def __post_init__(self):
        if not 1.0 < self.alpha < 2.0:
            raise ValueError(f"alpha={self.alpha} outside (1, 2)")
        if not self.horizon > 0:
            raise ValueError("horizon must be positive")
        if self.lipschitz < 0:
            raise ValueError("lipschitz constant must be nonnegative")

    def with_initial(self, y0: float, y1: float) -> "IVProblem":
        return IVProblem(self.alpha, self.rhs, y0, y1, self.horizon, self.lipschitz)


@dataclass(frozen=True)
class SolutionGrid:
    times: np.ndarray
    values: np.ndarray
    step: float

    def __post_init__(self):
        if len(self.times) != len(self.values):
            raise ShapeError("times and values differ in length")

    def __call__(self, t):
        """Linear interpolation; raises outside the grid."""
        t_arr = np.asarray(t, dtype=float)
        if np.any(t_arr < self.times[0] - 1e-12) or np.any(t_arr > self.times[-1] + 1e-12):
            raise ValueError(f"t outside [{self.times[0]}, {self.times[-1]}]")
        out = np.interp(t_arr, self.times, self.values)
        return float(out) if out.ndim == 0 else out


def uniform_times(horizon: float, n_steps: int) -> np.ndarray:
    return horizon * np.arange(n_steps + 1) / n_steps


def _trapezoid_weights(alpha: float, n_max: int):
    """Lag-indexed corrector weights (without the h^a / Gamma(a+2) factor)."""
    m = np.arange(n_max + 2, dtype=float)
    p = m ** (alpha + 1.0)
    lag = np.zeros(n_max + 1)
    # a_{j,n} for 1 <= j <= n-1 at lag l = n - j >= 1
    lag[1:] = p[2:] + p[:-2] - 2.0 * p[1:-1]
    return lag


def _start_weight(alpha: float, n: int) -> float:
    # a_{0,n}
    return (n - 1.0) ** (alpha + 1.0) - (n - 1.0 - alpha) * n**alpha


def solve_ivp(p: IVProblem, n_steps: int, corrector_iterations: int = 1) -> SolutionGrid:
    """Fractional Adams PECE on a uniform grid of ``n_steps`` steps."""
    if n_steps < 1:
        raise ValueError("n_steps must be positive")
    if not 1 <= corrector_iterations <= 3:
        raise ValueError("corrector_iterations must be 1, 2 or 3")
    a = p.alpha
    h = p.horizon / n_steps
    t = uniform_times(p.horizon, n_steps)
    y = np.empty(n_steps + 1)
    f = np.empty(n_steps + 1)
    y[0] = p.y0

    def rhs(tk, yk):
        try:
            v = float(p.rhs(tk, yk))
        except Exception as exc:  # noqa: BLE001 - re-raised with the failure time
            raise SolverError(f"rhs failed: {exc!r}", tk) from exc
        if not math.isfinite(v):
            raise DivergenceError("non-finite right-hand side", tk)
        return v

    f[0] = rhs(t[0], y[0])
    k = np.arange(n_steps + 1, dtype=float)
    rect = k[1:] ** a - k[:-1] ** a  # rect[l-1] is the predictor weight at lag l
    trap = _trapezoid_weights(a, n_steps)
    c_pred = h**a / math.gamma(a + 1.0)
    c_corr = h**a / math.gamma(a + 2.0)
    for n in range(1, n_steps + 1):
        poly = p.y0 + t[n] * p.y1
        # history j = 0..n-1 at lags n..1
        pred = poly + c_pred * np.dot(rect[n - 1::-1], f[:n])
        hist = _start_weight(a, n) * f[0]
        if n > 1:
            hist += np.dot(trap[n - 1:0:-1], f[1:n])
        yn = pred
        for _ in range(corrector_iterations):
            yn = poly + c_corr * (hist + rhs(t[n], yn))
        if not math.isfinite(yn) or abs(yn) > 1e300:
            raise DivergenceError("solution blew up", t[n])
        y[n] = yn
        f[n] = rhs(t[n], yn)
    return SolutionGrid(t, y, h)


def richardson_error(p: IVProblem, n_steps: int, corrector_iterations: int = 1) -> float:
    """max |y_n - y_{n/2}| over the coarse grid; a conservative error estimate for y_n."""
    if n_steps < 2 or n_steps % 2:
        raise ValueError("n_steps must be even")
    fine = solve_ivp(p, n_steps, corrector_iterations)
    coarse = solve_ivp(p, n_steps // 2, corrector_iterations)
    return float(np.max(np.abs(fine.values[::2] - coarse.values)))


def linear_closed_form(alpha: float, lam: float, y0: float, y1: float, t: float,
                       acc: MLAccuracy = DEFAULT_ACCURACY) -> float:
    """Solution of D^a y = lam y: y0 E_{a,1}(lam t^a) + y1 t E_{a,2}(lam t^a)."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    x = lam * t**alpha
    out = y0 * mittag_leffler(alpha, 1.0, x, acc)
    if y1 != 0.0:
        out += y1 * t * mittag_leffler(alpha, 2.0, x, acc)
    return out


def voc_eval(alpha: float, m_coef: float, y0: float, y1: float, g: Rhs, sol: SolutionGrid,
             acc: MLAccuracy = DEFAULT_ACCURACY) -> SolutionGrid:
    """Right-hand side of the variation-of-constants formula along ``sol``.

    For D^a y = M y + g(t, y) with the given initial data the returned
    values should reproduce ``sol.values`` up to discretisation error.
    The convolution with (t - s)^(a-1) E_{a,a}(M (t - s)^a) is done by
    product trapezoidal quadrature on the grid of ``sol``.
    """
    t = np.asarray(sol.times, dtype=float)
    yv = np.asarray(sol.values, dtype=float)
    if t.ndim != 1 or t.shape != yv.shape or t.size < 2:
        raise ShapeError("solution grid must be two equal-length 1-d arrays")
    h = sol.step
    if np.max(np.abs(np.diff(t) - h)) > 1e-12 * max(1.0, t[-1]) or abs(t[0]) > 1e-14:
        raise ShapeError("solution grid must be uniform and start at 0")
    n_max = t.size - 1
    gv = np.array([float(g(ti, yi)) for ti, yi in zip(t, yv)])
    kern = np.array([mittag_leffler(alpha, alpha, m_coef * (l * h) ** alpha, acc)
                     for l in range(n_max + 1)])
    trap = _trapezoid_weights(alpha, n_max)
    scale = h**alpha / (alpha * (alpha + 1.0))
    out = np.empty_like(yv)
    for n in range(n_max + 1):
        base = linear_closed_form(alpha, m_coef, y0, y1, t[n], acc)
        if n == 0:
            out[n] = base
            continue
        # weights at nodes j = 0..n: start, interior lags n-1..1, endpoint 1
        acc_sum = _start_weight(alpha, n) * kern[n] * gv[0] + kern[0] * gv[n]
        if n > 1:
            acc_sum += np.dot(trap[n - 1:0:-1] * kern[n - 1:0:-1], gv[1:n])
        out[n] = base + scale * acc_sum
    return SolutionGrid(t.copy(), out, h)
