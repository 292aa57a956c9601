"""Separation horizons and two-sided envelopes for |y2(t) - y1(t)|.

Envelopes are built from the secant slopes f(t, x)/x of the right-hand side
(or of its shift along a known solution). Their running extrema over
[0, t] feed E_{a,1} and E_{a,2}; the horizon T* comes from the smallest
positive zeros of E_{a,b}(-z^a) rescaled by L^(1/a).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np

from .fode import IVProblem, SolutionGrid, richardson_error, solve_ivp
from .ml_core import DEFAULT_ACCURACY, MLAccuracy, mittag_leffler
from .zeros import ScanError, ZeroRecord, golden_min, has_real_zero, smallest_zero

CONDITION_BETAS = ("beta_1", "beta_alpha", "beta_2")
# which positivity requirement each condition stands for
CONDITION_LABELS = {
    "beta_1": "E_{a,1}(-L t^a) > 0",
    "beta_alpha": "E_{a,a}(-L t^a) > 0",
    "beta_2": "E_{a,2}(-L t^a) > 0",
}

LIMIT_OFFSETS = (1e-4, 1e-6, 1e-8)


class CaseError(ValueError):
    """Initial data outside the configuration a bound is stated for."""


class PreconditionError(ValueError):
    pass


class RangeError(ValueError):
    pass


@dataclass(frozen=True)
class CoeffPair:
    a_lower: float
    a_upper: float
    domain_used: str = ""


@dataclass
class Envelope:
    """Bounds lower <= |y2(t) - y1(t)| <= upper on ``times``.

    ``sign`` is the sign of y2 - y1 on the validity horizon, so the signed
    difference lies between sign*lower and sign*upper.
    """

    times: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    a_lower: np.ndarray
    a_upper: np.ndarray
    kind: str
    sign: int = 1
    domain_used: str = ""

    def contains(self, diff, eps: float = 0.0) -> np.ndarray:
        d = np.abs(np.asarray(diff, dtype=float))
        return (self.lower - eps <= d) & (d <= self.upper + eps)


@dataclass
class HorizonReport:
    t_star: float
    binding_condition: str | None
    zero_inputs: dict = field(default_factory=dict)
    alpha: float = math.nan
    lipschitz: float = math.nan

    @property
    def finite(self) -> bool:
        return math.isfinite(self.t_star)

    def as_text(self) -> str:
        lines = [f"alpha = {self.alpha!r}", f"lipschitz = {self.lipschitz!r}",
                 f"t_star = {self.t_star!r}", f"binding_condition = {self.binding_condition}"]
        for cond, rec in self.zero_inputs.items():
            z = rec.z_min if rec is not None else math.inf
            lines.append(f"Z[{cond}] = {z!r}")
        return "\n".join(lines) + "\n"


# -- Gronwall bound ------------------------------------------------------------


def gronwall_envelope(alpha: float, L: float, d0: float, d1: float, t: float,
                      acc: MLAccuracy = DEFAULT_ACCURACY) -> float:
    """(d0 + t d1) E_{a,1}(L t^a), the Lipschitz/Gronwall upper bound."""
    if L < 0 or d0 < 0 or d1 < 0 or t < 0:
        raise ValueError("L, d0, d1, t must be nonnegative")
    return (d0 + t * d1) * mittag_leffler(alpha, 1.0, L * t**alpha, acc)


# -- horizon ------------------------------------------------------------------


@lru_cache(maxsize=512)
def _zero_for(alpha: float, cond: str):
    if cond == "beta_2" and alpha < 2.0:
        try:
            if not has_real_zero(alpha, 2.0)[0]:
                return None
        except ScanError:  # monotone on the scan range, hence positive
            return None
    beta = {"beta_1": 1.0, "beta_alpha": alpha, "beta_2": 2.0}[cond]
    return smallest_zero(alpha, beta)


def horizon_Tstar(alpha: float, L: float, conditions: Iterable[str] = CONDITION_BETAS) -> HorizonReport:
    """Largest T* such that every requested E_{a,b}(-L t^a) stays positive on [0, T*).

    Positivity on [0, T*) is the same as T* <= Z_b(a) / L^(1/a). A condition
    whose function never vanishes contributes T* = inf.
    """
    conditions = tuple(conditions)
    if not L > 0:
        raise ValueError("L must be positive")
    if not conditions or any(c not in CONDITION_BETAS for c in conditions):
        raise ValueError(f"conditions must be a nonempty subset of {CONDITION_BETAS}")
    scale = L ** (1.0 / alpha)
    zeros: dict[str, ZeroRecord | None] = {}
    best, binding = math.inf, None
    for cond in CONDITION_BETAS:
        if cond not in conditions:
            continue
        rec = _zero_for(float(alpha), cond)
        zeros[cond] = rec
        if rec is not None and rec.z_min / scale < best:
            best, binding = rec.z_min / scale, cond
    return HorizonReport(best, binding, zeros, alpha, L)


def conditions_for(y10: float, y11: float, y20: float, y21: float) -> tuple[str, ...]:
    """Sufficient positivity conditions for ordered initial data."""
    if y10 < y20 and y11 <= y21:
        return CONDITION_BETAS
    if y10 == y20 and y11 < y21:
        return ("beta_alpha", "beta_2")
    if y10 < y20:
        return ("beta_alpha",)
    raise CaseError("initial data are not ordered")


# -- secant-slope extrema -----------------------------------------------------


def _call_vec(fn, *args):
    try:
        out = np.asarray(fn(*args), dtype=float)
        if out.shape == np.broadcast(*args).shape:
            return out
    except Exception:  # noqa: BLE001 - fall back to scalar calls
        pass
    return np.vectorize(lambda *a: float(fn(*a)), otypes=[float])(*args)


def _limit_at_zero(ratio) -> list[float]:
    """x -> 0 limit of ratio(x) from each side by polynomial extrapolation."""
    out = []
    xs = np.array(LIMIT_OFFSETS)
    for side in (1.0, -1.0):
        r = np.array([ratio(side * x) for x in xs])
        # Lagrange extrapolation to x = 0 through the three offsets
        w = np.array([np.prod([xs[j] / (xs[j] - xs[i]) for j in range(3) if j != i]) for i in range(3)])
        out.append(float(np.dot(w, r)))
    return out


def _slope_extremes(ratio, x_domain, x_samples):
    """(min, argmin, max, argmax) of ratio(x) over x_domain minus 0, plus the x -> 0 limit."""
    lo, hi = x_domain
    xs = np.linspace(lo, hi, x_samples)
    xs = xs[np.abs(xs) > 0.5 * LIMIT_OFFSETS[0]]
    r = _call_vec(ratio, xs)
    cand_min, cand_max = [], []
    for sgn, cands in ((1.0, cand_min), (-1.0, cand_max)):
        i = int(np.argmin(sgn * r))
        a = xs[max(i - 1, 0)]
        b = xs[min(i + 1, xs.size - 1)]
        if a < 0 < b:  # don't refine across the excluded origin
            a, b = (a, -0.5 * LIMIT_OFFSETS[0]) if xs[i] < 0 else (0.5 * LIMIT_OFFSETS[0], b)
        x_ref, v_ref = golden_min(lambda x: sgn * ratio(x), a, b, tol=1e-9 * max(1.0, abs(b - a)))
        if v_ref > sgn * r[i]:  # keep the grid point if refinement did worse
            x_ref, v_ref = xs[i], sgn * r[i]
        cands.append((sgn * v_ref, x_ref))
    if lo < 0 < hi or lo == 0 or hi == 0:
        sides = _limit_at_zero(ratio)
        if lo >= 0:
            sides = sides[:1]
        elif hi <= 0:
            sides = sides[1:]
        for v in sides:
            cand_min.append((v, 0.0))
            cand_max.append((v, 0.0))
    vmin, xmin = min(cand_min, key=lambda c: c[0])
    vmax, xmax = max(cand_max, key=lambda c: c[0])
    return vmin, xmin, vmax, xmax


def _check_zero_fixed(f, taus):
    for tau in taus:
        v = float(f(float(tau), 0.0))
        if abs(v) > 1e-12:
            raise PreconditionError(f"f(tau, 0) = {v} != 0 at tau = {tau}")


def _coeffs_over_tau(f, taus, x_domain, x_samples, refine_tau=True):
    per_tau = [_slope_extremes(lambda x, tau=tau: f(tau, x) / x, x_domain, x_samples) for tau in taus]
    mins = np.array([p[0] for p in per_tau])
    maxs = np.array([p[2] for p in per_tau])
    lo, hi = float(np.min(mins)), float(np.max(maxs))
    if refine_tau and len(taus) > 2:
        for arr, sgn in ((mins, 1.0), (maxs, -1.0)):
            k = int(np.argmin(sgn * arr))
            x_best = per_tau[k][1] if sgn > 0 else per_tau[k][3]
            if x_best == 0.0:
                continue
            a, b = taus[max(k - 1, 0)], taus[min(k + 1, len(taus) - 1)]
            _, v = golden_min(lambda tau: sgn * f(tau, x_best) / x_best, a, b, tol=1e-9)
            if sgn > 0:
                lo = min(lo, v)
            else:
                hi = max(hi, -v)
    return lo, hi, mins, maxs


def _domain_text(t, x_domain, what="x"):
    return (f"tau in [0, {t!r}], {what} in [{x_domain[0]!r}, {x_domain[1]!r}] minus 0, "
            f"{what} -> 0 limit extrapolated from |{what}| = {', '.join(map(str, LIMIT_OFFSETS))}")


def nonlinear_coeffs(f: Callable[[float, float], float], t: float, x_domain=(-20.0, 20.0),
                     tau_samples: int = 33, x_samples: int = 801) -> CoeffPair:
    """inf and sup of f(tau, x)/x over tau in [0, t] and x in x_domain minus 0."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    taus = np.linspace(0.0, t, tau_samples) if t > 0 else np.array([0.0])
    _check_zero_fixed(f, taus)
    lo, hi, _, _ = _coeffs_over_tau(f, taus, x_domain, x_samples)
    return CoeffPair(lo, hi, _domain_text(t, x_domain))


def running_coeffs(f, times: Sequence[float], x_domain, x_samples: int = 801, per_step: int = 2):
    """Running (inf, sup) of f(tau, x)/x over tau in [0, t_i] for every grid time t_i.

    Per-tau extremes are taken at the grid times and ``per_step - 1``
    interior points of each step, then accumulated.
    """
    times = np.asarray(times, dtype=float)
    nodes = [times[0]]
    owner = [0]
    for i in range(1, times.size):
        for k in range(1, per_step + 1):
            nodes.append(times[i - 1] + (times[i] - times[i - 1]) * k / per_step)
            owner.append(i)
    nodes = np.array(nodes)
    _check_zero_fixed(f, nodes[:: max(1, nodes.size // 64)])
    per = [_slope_extremes(lambda x, tau=tau: f(tau, x) / x, x_domain, x_samples) for tau in nodes]
    mins = np.array([p[0] for p in per])
    maxs = np.array([p[2] for p in per])
    lo = np.full(times.size, np.inf)
    hi = np.full(times.size, -np.inf)
    for m, M, i in zip(mins, maxs, owner):
        lo[i] = min(lo[i], m)
        hi[i] = max(hi[i], M)
    return np.minimum.accumulate(lo), np.maximum.accumulate(hi)


def _ml_pair(alpha, coeff, t, acc):
    x = coeff * t**alpha
    return mittag_leffler(alpha, 1.0, x, acc), mittag_leffler(alpha, 2.0, x, acc)


def _envelope_from_coeffs(alpha, d0, d1, times, a_lo, a_hi, kind, sign=1, domain="", acc=DEFAULT_ACCURACY):
    lower = np.empty(times.size)
    upper = np.empty(times.size)
    for i, (t, lo, hi) in enumerate(zip(times, a_lo, a_hi)):
        e1, e2 = _ml_pair(alpha, lo, t, acc)
        lower[i] = d0 * e1 + d1 * t * e2
        e1, e2 = _ml_pair(alpha, hi, t, acc)
        upper[i] = d0 * e1 + d1 * t * e2
    return Envelope(times, lower, upper, np.asarray(a_lo, float), np.asarray(a_hi, float), kind, sign, domain)


# -- envelopes ----------------------------------------------------------------


def linear_envelope(alpha: float, a: Callable[[float], float], d0: float, d1: float,
                    times: Sequence[float], samples: int = 2048,
                    acc: MLAccuracy = DEFAULT_ACCURACY) -> Envelope:
    """Bounds for f(t, y) = a(t) y with a_* / a^* the running min / max of a.

    The running extrema over [0, t_i] use ``samples`` equal steps plus the
    exact endpoints.
    """
    times = np.asarray(times, dtype=float)
    a_lo = np.empty(times.size)
    a_hi = np.empty(times.size)
    for i, t in enumerate(times):
        vals = _call_vec(a, np.linspace(0.0, t, samples + 1)) if t > 0 else _call_vec(a, np.array([0.0]))
        a_lo[i], a_hi[i] = float(np.min(vals)), float(np.max(vals))
    return _envelope_from_coeffs(alpha, d0, d1, times, a_lo, a_hi, "linear", acc=acc,
                                 domain=f"a sampled with {samples} steps on [0, t]")


def _check_within(times, report: HorizonReport):
    if times.size and times[-1] > report.t_star * (1 + 1e-12):
        raise RangeError(f"grid end {times[-1]} exceeds T* = {report.t_star}")


def nonlinear_envelope(p: IVProblem, times: Sequence[float], sign_case: str = "auto", *,
                       x_domain=(-20.0, 20.0), x_samples: int = 801, check_horizon: bool = True,
                       acc: MLAccuracy = DEFAULT_ACCURACY) -> Envelope:
    """Bounds on |y2(t)| for D^a y = f(t, y) with f(t, 0) = 0, compared to y1 = 0.

    Case a (y2(0), y2'(0) >= 0) and case b (both <= 0) give the same bounds
    on the absolute value; the case fixes ``Envelope.sign``.
    """
    times = np.asarray(times, dtype=float)
    y0, y1 = p.y0, p.y1
    case = sign_case
    if case == "auto":
        if y0 >= 0 and y1 >= 0:
            case = "a"
        elif y0 <= 0 and y1 <= 0:
            case = "b"
        else:
            raise CaseError("initial value and slope have opposite signs")
    if case == "a" and not (y0 >= 0 and y1 >= 0) or case == "b" and not (y0 <= 0 and y1 <= 0):
        raise CaseError(f"initial data ({y0}, {y1}) do not fit case {case}")
    if case not in ("a", "b"):
        raise ValueError(f"unknown sign_case {sign_case!r}")
    if check_horizon and (y0 != 0 or y1 != 0):
        conds = CONDITION_BETAS if y0 != 0 else ("beta_alpha", "beta_2")
        _check_within(times, horizon_Tstar(p.alpha, max(p.lipschitz, 1e-300), conds))
    a_lo, a_hi = running_coeffs(p.rhs, times, x_domain, x_samples)
    return _envelope_from_coeffs(p.alpha, abs(y0), abs(y1), times, a_lo, a_hi, "nonlinear",
                                 1 if case == "a" else -1, _domain_text(times[-1], x_domain), acc)


def _shifted(f, y1_sol: SolutionGrid):
    def g(tau, y):
        base = y1_sol(tau)
        return f(tau, y + base) - f(tau, base)
    return g


def shifted_coeffs(f: Callable[[float, float], float], y1_sol: SolutionGrid, t: float,
                   y_domain=(-20.0, 20.0), samples: int = 801, tau_samples: int = 33) -> CoeffPair:
    """inf / sup over tau in [0, t], y != 0 of (f(tau, y + y1(tau)) - f(tau, y1(tau))) / y."""
    if t < 0 or t > y1_sol.times[-1] * (1 + 1e-12):
        raise RangeError(f"t = {t} outside the reference solution's range")
    taus = np.linspace(0.0, t, tau_samples) if t > 0 else np.array([0.0])
    lo, hi, _, _ = _coeffs_over_tau(_shifted(f, y1_sol), taus, y_domain, samples)
    return CoeffPair(lo, hi, _domain_text(t, y_domain, "y"))


def shifted_envelope(p1: IVProblem, p2: IVProblem, times: Sequence[float], *, y_domain=(-20.0, 20.0),
                     samples: int = 801, n_steps: int = 2048, check_horizon: bool = True,
                     acc: MLAccuracy = DEFAULT_ACCURACY) -> Envelope:
    """Bounds on y2 - y1 from slopes of f shifted along the numerical y1."""
    times = np.asarray(times, dtype=float)
    d0, d1 = p2.y0 - p1.y0, p2.y1 - p1.y1
    if d0 < 0 or d1 < 0:
        raise CaseError("need y1(0) <= y2(0) and y1'(0) <= y2'(0)")
    if d0 == 0 and d1 == 0:
        z = np.zeros(times.size)
        return Envelope(times, z, z.copy(), z.copy(), z.copy(), "shifted")
    if check_horizon:
        conds = CONDITION_BETAS if d0 > 0 else ("beta_alpha", "beta_2")
        _check_within(times, horizon_Tstar(p1.alpha, max(p1.lipschitz, 1e-300), conds))
    horizon = max(p1.horizon, float(times[-1]))
    ref = solve_ivp(IVProblem(p1.alpha, p1.rhs, p1.y0, p1.y1, horizon, p1.lipschitz), n_steps)
    a_lo, a_hi = running_coeffs(_shifted(p1.rhs, ref), times, y_domain, samples)
    return _envelope_from_coeffs(p1.alpha, d0, d1, times, a_lo, a_hi, "shifted",
                                 domain=_domain_text(times[-1], y_domain, "y"), acc=acc)


# -- qualitative separation ------------------------------------------------------


@dataclass
class SeparationReport:
    configuration: str  # ordered_values | equal_values | identical
    t_star: float
    horizon: HorizonReport | None
    band: float
    separated: bool
    min_gap: float
    first_crossing: float | None
    crossing_after_tstar: bool
    times: np.ndarray = field(repr=False, default=None)
    diff: np.ndarray = field(repr=False, default=None)


def _first_crossing(times, diff, start_index=1):
    """First time after t_0 at which diff reaches zero (linear interpolation)."""
    for i in range(max(start_index, 1), times.size):
        if diff[i] <= 0.0 < diff[i - 1]:
            return float(times[i - 1] + diff[i - 1] * (times[i] - times[i - 1]) / (diff[i - 1] - diff[i]))
    return None


def _sharp_horizon(alpha, L, d0, d1, times, acc):
    """Largest t such that d0 E_{a,1}(-L s^a) + d1 s E_{a,2}(-L s^a) > 0 on (0, t].

    Scans the grid for the first nonpositive value and bisects the last
    step; returns the left end of the final bracket, or inf.
    """
    def g(t):
        e1, e2 = _ml_pair(alpha, -L, t, acc)
        return d0 * e1 + d1 * t * e2

    for i in range(1, times.size):
        if g(times[i]) <= 0:
            lo, hi = float(times[i - 1]), float(times[i])
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                if g(mid) > 0:
                    lo = mid
                else:
                    hi = mid
            return lo
    return math.inf


def separation_check(p1: IVProblem, p2: IVProblem, n_steps: int = 1024, parallel: bool = False,
                     acc: MLAccuracy = DEFAULT_ACCURACY) -> SeparationReport:
    """Solve both problems and test y1 < y2 on (0, T*] up to a solver tolerance band.

    The band is ten times the sum of the two Richardson error estimates.
    The first crossing of the solutions anywhere on [0, T] is reported too;
    crossings beyond T* are allowed.
    """
    if p1.alpha != p2.alpha or p1.horizon != p2.horizon:
        raise ValueError("problems must share alpha and horizon")
    d0, d1 = p2.y0 - p1.y0, p2.y1 - p1.y1
    if n_steps % 2:
        raise ValueError("n_steps must be even")

    def run(p):
        fine = solve_ivp(p, n_steps)
        coarse = solve_ivp(p, n_steps // 2)
        return fine, float(np.max(np.abs(fine.values[::2] - coarse.values)))

    if parallel:
        with ThreadPoolExecutor(max_workers=2) as ex:
            (s1, e1), (s2, e2) = ex.map(run, (p1, p2))
    else:
        (s1, e1), (s2, e2) = run(p1), run(p2)
    times = s1.times
    diff = s2.values - s1.values
    band = 10.0 * (e1 + e2) + 1e-14
    if d0 == 0 and d1 == 0:
        return SeparationReport("identical", 0.0, None, band, False, float(np.min(diff)),
                                None, False, times, diff)
    if d0 > 0:
        config = "ordered_values"
    elif d0 == 0 and d1 > 0:
        config = "equal_values"
    else:
        raise CaseError("initial data must satisfy y1(0) < y2(0), or equal values and y1'(0) < y2'(0)")
    L = max(p1.lipschitz, 1e-300)
    conds = conditions_for(p1.y0, p1.y1, p2.y0, p2.y1)
    report = horizon_Tstar(p1.alpha, L, conds)
    t_star = min(report.t_star, p1.horizon)
    if conds == ("beta_alpha",):
        t_star = min(t_star, _sharp_horizon(p1.alpha, L, d0, d1, times, acc))
    inside = (times > 0) & (times <= t_star * (1 + 1e-12))
    min_gap = float(np.min(diff[inside])) if np.any(inside) else math.inf
    separated = bool(min_gap > -band)
    crossing = _first_crossing(times, diff)
    return SeparationReport(config, t_star, report, band, separated, min_gap, crossing,
                            crossing is not None and crossing >= t_star - band, times, diff)


# -- comparison lemma, brute force -------------------------------------------------


def volterra_fixed_point(alpha: float, g, forcing: np.ndarray, times: np.ndarray,
                         tol: float = 1e-14, max_iter: int = 500) -> np.ndarray:
    """Solve v = forcing + 1/Gamma(a) int_0^t (t-s)^(a-1) g(s, v(s)) ds on ``times`` by Picard iteration.

    Product-trapezoidal weights; meant for small grids only (O(n^2) per sweep).
    """
    n = times.size - 1
    h = times[1] - times[0]
    k = np.arange(n + 2, dtype=float)
    p = k ** (alpha + 1.0)
    interior = np.zeros(n + 1)
    interior[1:] = p[2:] + p[:-2] - 2.0 * p[1:-1]
    scale = h**alpha / math.gamma(alpha + 2.0)
    w = np.zeros((n + 1, n + 1))
    for i in range(1, n + 1):
        w[i, 0] = (i - 1.0) ** (alpha + 1.0) - (i - 1.0 - alpha) * i**alpha
        for j in range(1, i):
            w[i, j] = interior[i - j]
        w[i, i] = 1.0
    w *= scale
    v = forcing.astype(float).copy()
    for _ in range(max_iter):
        gv = np.array([g(t, x) for t, x in zip(times, v)])
        nv = forcing + w @ gv
        if np.max(np.abs(nv - v)) <= tol:
            return nv
        v = nv
    return v


def comparison_check(alpha: float, g, v_forcing, w_forcing, horizon: float, n: int = 64):
    """Brute-force the comparison lemma: with g nondecreasing in x and v1 < w1, expect v < w.

    Returns (all_ordered, v, w, times).
    """
    times = horizon * np.arange(n + 1) / n
    v1 = np.array([v_forcing(t) for t in times])
    w1 = np.array([w_forcing(t) for t in times])
    if not np.all(v1 < w1):
        raise CaseError("forcing terms must satisfy v1 < w1")
    v = volterra_fixed_point(alpha, g, v1, times)
    w = volterra_fixed_point(alpha, g, w1, times)
    return bool(np.all(v < w)), v, w, times
