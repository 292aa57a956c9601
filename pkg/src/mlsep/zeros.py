"""Smallest positive zeros of z -> E_{a,b}(-z^a) and their dependence on a.

``beta`` arguments accept either a number or the string ``"alpha"``,
which ties the second parameter to the first (b = a).
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Sequence, Union

import numpy as np

from .ml_core import DEFAULT_ACCURACY, MLAccuracy, ml_deriv_neg_axis, ml_neg_axis, ml_neg_axis_grid

BetaSpec = Union[float, str]

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class ZeroSearchError(RuntimeError):
    pass


class NoZeroError(ZeroSearchError):
    """No sign change of the target function inside the scan range."""


class NonConvergenceError(ZeroSearchError):
    pass


class ScanError(ZeroSearchError):
    """No local minimum inside the scan range."""


class BracketError(ZeroSearchError):
    pass


class FitError(ValueError):
    pass


def resolve_beta(beta: BetaSpec, alpha: float) -> float:
    if isinstance(beta, str):
        if beta != "alpha":
            raise ValueError(f"unknown beta spec {beta!r}")
        return float(alpha)
    return float(beta)


@dataclass(frozen=True)
class NewtonOptions:
    z0: float = math.pi / 2
    abs_tol: float = 1e-12
    max_iter: int = 60
    bracket_fallback: bool = True
    scan_max: float = 40.0
    scan_step: float = 0.05
    # step of the sign scan that certifies the zero is the smallest one;
    # 0 disables the check
    verify_step: float = 1e-3
    accuracy: MLAccuracy = DEFAULT_ACCURACY

    def __post_init__(self):
        if not (self.z0 > 0 and self.abs_tol > 0 and self.max_iter >= 1):
            raise ValueError("need z0 > 0, abs_tol > 0, max_iter >= 1")


@dataclass(frozen=True)
class ZeroRecord:
    alpha: float
    beta: float
    z_min: float
    iterations: int
    converged: bool
    residual: float
    status: str = "ok"  # ok | fallback | no_zero | not_converged

    @property
    def found(self) -> bool:
        return self.status in ("ok", "fallback")


@dataclass
class AsymptoteFit:
    regime: str
    coefficients: dict
    fit_window: tuple
    rms_residual: float
    n_points: int
    anchor: dict = field(default_factory=dict)

    def evaluate(self, alpha):
        """The fitted model at ``alpha`` (scalar or array)."""
        a = np.asarray(alpha, dtype=float)
        c = self.coefficients["c"]
        if self.regime == "alpha_to_1":
            return c * np.log(a - 1.0) + self.coefficients["d"]
        if self.regime == "alpha_to_2":
            return self.anchor["Z2"] + c * (2.0 - a)
        gap = np.clip(a - self.anchor["alpha0"], 0.0, None)
        return self.anchor["Z0"] + c * gap ** self.coefficients["b"]


# -- one-dimensional helpers ---------------------------------------------------


def golden_min(f, a, b, tol=1e-10):
    """Golden-section minimisation of a unimodal f on [a, b]."""
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def _bisect(f, lo, hi, flo, n=200, tol=1e-13):
    for _ in range(n):
        if hi - lo <= tol * max(1.0, hi):
            break
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _first_bracket(f, z_hi, step):
    """First interval on which f changes sign, scanning from 0.

    Narrow dips between two positive samples are caught by refining every
    discrete local minimum with golden-section search.
    """
    zs = [0.0]
    fs = [f(0.0)]
    n = int(math.ceil(z_hi / step))
    for i in range(1, n + 1):
        z = i * step
        v = f(z)
        if (v > 0) != (fs[-1] > 0) or v == 0.0:
            return zs[-1], z
        zs.append(z)
        fs.append(v)
        if len(fs) >= 3 and fs[-2] < fs[-3] and fs[-2] <= fs[-1]:
            m, fm = golden_min(f, zs[-3], zs[-1])
            if (fm > 0) != (fs[0] > 0) or fm == 0.0:
                return zs[-3], m
    return None


def _newton(f, df, z, opts):
    for it in range(1, opts.max_iter + 1):
        d = df(z)
        if d == 0.0 or not math.isfinite(d):
            return z, it, False
        step = f(z) / d
        z -= step
        if not (z > 0.0 and math.isfinite(z)):
            return z, it, False
        if abs(step) <= opts.abs_tol:
            return z, it, True
    return z, opts.max_iter, False


def first_sign_change(alpha, beta, z_end, step, acc=DEFAULT_ACCURACY):
    """First grid point in (0, z_end] where E_{a,b}(-z^a) is <= 0, or None."""
    zs = np.arange(1, int(math.floor(z_end / step)) + 1) * step
    zs = zs[zs <= z_end]
    if zs.size == 0:
        return None
    vals = ml_neg_axis_grid(alpha, beta, zs, acc)
    bad = np.flatnonzero(vals <= 0.0)
    return float(zs[bad[0]]) if bad.size else None


# -- operations ----------------------------------------------------------------


def smallest_zero(alpha: float, beta: BetaSpec, opts: NewtonOptions = NewtonOptions()) -> ZeroRecord:
    """Z_beta(alpha): Newton from ``opts.z0`` with a bracketing safety net."""
    b = resolve_beta(beta, alpha)
    acc = opts.accuracy
    f = partial(ml_neg_axis, alpha, b, acc=acc)
    df = partial(ml_deriv_neg_axis, alpha, b, acc=acc)
    z, iters, ok = _newton(f, df, opts.z0, opts)
    status = "ok"
    if ok and opts.verify_step > 0:
        bad = first_sign_change(alpha, b, z - 1e-6, opts.verify_step, acc)
        if bad is not None:
            # Newton landed on a later zero
            ok = False
    if not ok:
        if not opts.bracket_fallback:
            raise NonConvergenceError(f"Newton failed for alpha={alpha}, beta={b}")
        br = _first_bracket(f, opts.scan_max, opts.scan_step)
        if br is None:
            raise NoZeroError(f"no zero of E_{{{alpha},{b}}}(-z^a) in (0, {opts.scan_max}]")
        lo, hi = br
        z = _bisect(f, lo, hi, f(lo))
        z, more, ok = _newton(f, df, z, opts)
        iters += more
        status = "fallback"
        if not ok or not lo - 1e-9 <= z <= hi + 1e-9:
            raise NonConvergenceError(f"polish failed for alpha={alpha}, beta={b}")
    return ZeroRecord(alpha, b, z, iters, True, abs(f(z)), status)


def has_real_zero(alpha: float, beta: BetaSpec = 2.0, z_max: float = 40.0, step: float = 0.05,
                  acc: MLAccuracy = DEFAULT_ACCURACY):
    """(has_zero, location, value) of the first local minimum of E_{a,b}(-z^a).

    A zero before the first minimum forces a nonpositive minimum value, so
    the flag is simply ``value <= 0``.
    """
    b = resolve_beta(beta, alpha)
    f = partial(ml_neg_axis, alpha, b, acc=acc)
    zs, fs = [0.0], [f(0.0)]
    n = int(math.ceil(z_max / step))
    for i in range(1, n + 1):
        z = i * step
        zs.append(z)
        fs.append(f(z))
        if len(fs) >= 3 and fs[-2] < fs[-3] and fs[-2] <= fs[-1]:
            m, v = golden_min(f, zs[-3], zs[-1])
            return v <= 0.0, m, v
    raise ScanError(f"no local minimum of E_{{{alpha},{b}}}(-z^a) in (0, {z_max}]")


def threshold_alpha0(tol: float = 1e-6, bracket=(1.59, 1.61)) -> float:
    """Smallest alpha for which E_{a,2}(-z^a) has a real zero, by bisection."""
    if tol < 1e-10:
        raise ValueError("tol must be >= 1e-10")
    lo, hi = bracket
    flag_lo, flag_hi = has_real_zero(lo)[0], has_real_zero(hi)[0]
    if flag_lo == flag_hi:
        raise BracketError(f"has_real_zero is {flag_lo} at both ends of {bracket}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if has_real_zero(mid)[0] == flag_hi:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _sweep_point(alpha, beta, opts):
    b = resolve_beta(beta, alpha)
    try:
        return smallest_zero(alpha, beta, opts)
    except NoZeroError:
        return ZeroRecord(alpha, b, math.nan, 0, False, math.nan, "no_zero")
    except ZeroSearchError:
        return ZeroRecord(alpha, b, math.nan, 0, False, math.nan, "not_converged")


def sweep(beta: BetaSpec, alpha_grid: Sequence[float], opts: NewtonOptions = NewtonOptions(),
          workers: int = 1) -> list[ZeroRecord]:
    """One record per grid point, in grid order; failures are flagged, not dropped."""
    alphas = [float(a) for a in alpha_grid]
    job = partial(_sweep_point, beta=beta, opts=opts)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(job, alphas, chunksize=16))
    return [job(a) for a in alphas]


def alpha_grid(lo: float = 1.001, hi: float = 2.0, step: float = 1e-3) -> np.ndarray:
    """Uniform grid from lo in steps of ``step``, never past hi; hi is appended if the step misses it."""
    n = int(math.floor((hi - lo) / step + 1e-9))
    g = np.round(lo + step * np.arange(n + 1), 12)
    if hi - g[-1] > 1e-9 * step:
        g = np.append(g, hi)
    return g


def refine_minimum(beta: BetaSpec, records: Sequence[ZeroRecord], step: float = 1e-5,
                   halfwidth: float | None = None, opts: NewtonOptions | None = None):
    """Refine the coarse argmin of Z over alpha on a local grid.

    The local grid spans one coarse spacing either side of the coarse
    argmin (at least 2e-3) unless ``halfwidth`` is given.
    Returns (alpha_argmin, z_min, local_records).
    """
    opts = opts or NewtonOptions(verify_step=0.0)
    good = [r for r in records if r.found]
    if not good:
        raise FitError("no converged records")
    i = int(np.argmin([r.z_min for r in good]))
    a0 = good[i].alpha
    if halfwidth is None:
        near = [abs(r.alpha - a0) for r in good[max(i - 1, 0):i + 2] if r.alpha != a0]
        halfwidth = max([2e-3] + near)
    n = int(round(halfwidth / step))
    grid = [a for a in np.round(a0 + step * np.arange(-n, n + 1), 12) if 1.0 < a <= 2.0]
    local = sweep(beta, grid, opts)
    local = [r for r in local if r.found]
    j = int(np.argmin([r.z_min for r in local]))
    return local[j].alpha, local[j].z_min, local


def _limit_at_two(beta: float) -> float:
    return math.pi / 2 if beta == 1.0 else math.pi


def fit_asymptote(records: Sequence[ZeroRecord], regime: str, window=None, anchor=None) -> AsymptoteFit:
    """Least-squares fit of the conjectured behaviour of Z near an end of the alpha range.

    Regimes and models:
      alpha_to_1       Z = c ln(alpha - 1) + d
      alpha_to_2       Z = Z(2) + c (2 - alpha), Z(2) exact (pi/2 for beta = 1, else pi)
      alpha_to_alpha0  Z = Z0 + c (alpha - alpha0)^b, fitted as a line in log-log
                       coordinates; ``anchor`` = (alpha0, Z0), computed if omitted.
    """
    if regime == "alpha_to_alpha0" and anchor is None:
        a0 = threshold_alpha0(1e-10)
        anchor = (a0, has_real_zero(a0 + 1e-10)[1])
    if window is None:
        window = DEFAULT_WINDOWS[regime]
        if regime == "alpha_to_alpha0":
            window = (anchor[0] + window[0], anchor[0] + window[1])
    lo, hi = window
    pts = [r for r in records if r.found and lo <= r.alpha <= hi]
    if len(pts) < 8:
        raise FitError(f"{len(pts)} converged records in window {window}; need 8")
    a = np.array([r.alpha for r in pts])
    z = np.array([r.z_min for r in pts])
    if regime == "alpha_to_1":
        design = np.column_stack([np.log(a - 1.0), np.ones_like(a)])
        (c, d), *_ = np.linalg.lstsq(design, z, rcond=None)
        model = c * np.log(a - 1.0) + d
        coeffs = {"c": float(c), "d": float(d)}
        extra = {}
    elif regime == "alpha_to_2":
        tied = all(r.beta == r.alpha for r in pts)
        z2 = math.pi if tied else _limit_at_two(pts[0].beta)
        s = 2.0 - a
        c = float(np.dot(z - z2, s) / np.dot(s, s))
        model = z2 + c * s
        coeffs = {"c": c}
        extra = {"Z2": z2}
    elif regime == "alpha_to_alpha0":
        a0, z0 = anchor
        gap = z0 - z
        if np.any(a <= a0) or np.any(gap <= 0):
            raise FitError("records must lie strictly above the anchor")
        b, logc = np.polyfit(np.log(a - a0), np.log(gap), 1)
        c = -math.exp(logc)
        model = z0 + c * (a - a0) ** b
        coeffs = {"b": float(b), "c": c}
        extra = {"alpha0": a0, "Z0": z0}
    else:
        raise ValueError(f"unknown regime {regime!r}")
    rms = float(np.sqrt(np.mean((z - model) ** 2)))
    return AsymptoteFit(regime, coeffs, (lo, hi), rms, len(pts), extra)


# fit windows; the alpha_to_alpha0 entry is an offset from alpha0
DEFAULT_WINDOWS = {
    "alpha_to_1": (1.001, 1.05),
    "alpha_to_2": (1.99, 1.999),
    "alpha_to_alpha0": (1e-6, 1e-3),
}
