"""Two-parameter Mittag-Leffler function on the real axis.

E_{a,b}(x) = sum_k x^k / Gamma(a k + b) is evaluated by one of three
regimes, chosen per argument:

* Taylor series for small |x|;
* inversion of the Laplace transform s^(a-b) / (s^a - x) on an optimal
  parabolic contour, plus the residues of the poles the contour leaves
  to its right (Garrappa's scheme, restricted to real arguments);
* the exponential + algebraic asymptotic expansion for large negative x,
  used only when its truncation error is provably below the tolerance.

Everything here is a pure function of its inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "MLQuery",
    "MLAccuracy",
    "MLDomainError",
    "MLEvaluationError",
    "DEFAULT_ACCURACY",
    "rgamma",
    "mittag_leffler",
    "ml_eval",
    "ml_neg_axis",
    "ml_deriv_neg_axis",
    "ml_neg_axis_grid",
]

_LOG_EPS = math.log(np.finfo(float).eps)  # -36.04...


class MLDomainError(ValueError):
    """Argument outside the supported domain."""


class MLEvaluationError(ArithmeticError):
    """An evaluation regime exhausted its budget without reaching tolerance."""

    def __init__(self, message, estimate, error_bound):
        super().__init__(f"{message} (estimate={estimate!r}, bound={error_bound!r})")
        self.estimate = estimate
        self.error_bound = error_bound


@dataclass(frozen=True)
class MLQuery:
    alpha: float
    beta: float
    x: float

    def __post_init__(self):
        for name in ("alpha", "beta", "x"):
            if not math.isfinite(getattr(self, name)):
                raise MLDomainError(f"{name} must be finite")
        if not 0.0 < self.alpha <= 2.0:
            raise MLDomainError(f"alpha={self.alpha} outside (0, 2]")
        if self.beta <= 0.0:
            raise MLDomainError(f"beta={self.beta} must be positive")


@dataclass(frozen=True)
class MLAccuracy:
    """Accuracy target and regime crossovers.

    ``series_radius`` bounds |x| (and |x|^(1/alpha)) for the Taylor
    regime; ``asymptotic_threshold`` is the smallest |x| at which the
    asymptotic expansion is even tried.
    """

    abs_tol: float = 1e-12
    series_radius: float = 5.0
    asymptotic_threshold: float = 50.0
    max_series_terms: int = 2000

    def __post_init__(self):
        if not 0.0 < self.abs_tol < 1.0:
            raise ValueError("abs_tol must lie in (0, 1)")
        if not 0.0 < self.series_radius < self.asymptotic_threshold:
            raise ValueError("need 0 < series_radius < asymptotic_threshold")


DEFAULT_ACCURACY = MLAccuracy()


def rgamma(z: float) -> float:
    """Reciprocal Gamma function 1/Gamma(z), entire, exact zeros at 0, -1, -2, ..."""
    if z > 0.0:
        if z < 170.0:
            return 1.0 / math.gamma(z)
        return math.exp(-math.lgamma(z))
    if z == math.floor(z):
        return 0.0
    # reflection: 1/Gamma(z) = Gamma(1 - z) sin(pi z) / pi
    s = math.sin(math.pi * math.fmod(z, 2.0))
    w = 1.0 - z
    if w < 170.0:
        return math.gamma(w) * s / math.pi
    return math.copysign(math.exp(math.lgamma(w) - math.log(math.pi)), s) * (abs(s) > 0)


# -- regime 1: Taylor series -------------------------------------------------


def _series(alpha, beta, x, acc):
    if x == 0.0:
        return rgamma(beta)
    lx = math.log(abs(x))
    neg = x < 0.0
    # terms grow until alpha*k ~ |x|^(1/alpha); only stop after the peak
    k_peak = abs(x) ** (1.0 / alpha) / alpha
    terms = []
    big = 0.0
    for k in range(acc.max_series_terms):
        arg = alpha * k + beta
        if arg < 170.0:
            mag = math.exp(k * lx) * rgamma(arg)
        else:
            mag = math.exp(k * lx - math.lgamma(arg))
        t = -mag if (neg and k % 2) else mag
        terms.append(t)
        big = max(big, mag)
        if k > k_peak + 2 and mag < 1e-17 * max(big, 1e-300):
            return math.fsum(terms)
    total = math.fsum(terms)
    raise MLEvaluationError("series did not converge", total, abs(terms[-1]))


# -- regime 2: Laplace-transform inversion on a parabolic contour -------------


def _param_bounded(t, phi_j, phi_j1, pj, qj, log_epsilon):
    """Optimal (mu, h, N) between two singularities phi_j < phi_j1."""
    fac = 1.01
    f_max = math.exp(log_epsilon - _LOG_EPS)
    sq_phi_j = math.sqrt(phi_j)
    threshold = 2.0 * math.sqrt((log_epsilon - _LOG_EPS) / t)
    sq_phi_j1 = min(math.sqrt(phi_j1), threshold - sq_phi_j)
    f_bar = None
    if pj < 1e-14 and qj < 1e-14:
        sq_bar_j, sq_bar_j1 = sq_phi_j, sq_phi_j1
        f_bar = 1.0
    elif pj < 1e-14:
        sq_bar_j = sq_phi_j
        f_min = fac * (sq_phi_j / (sq_phi_j1 - sq_phi_j)) ** qj if sq_phi_j > 0 else fac
        if f_min >= f_max:
            return 0.0, 0.0, math.inf
        f_bar = f_min + f_min / f_max * (f_max - f_min)
        fq = f_bar ** (-1.0 / qj)
        sq_bar_j1 = (2.0 * sq_phi_j1 - fq * sq_phi_j) / (2.0 + fq)
    elif qj < 1e-14:
        sq_bar_j1 = sq_phi_j1
        f_min = fac * (sq_phi_j1 / (sq_phi_j1 - sq_phi_j)) ** pj
        if f_min >= f_max:
            return 0.0, 0.0, math.inf
        f_bar = f_min + f_min / f_max * (f_max - f_min)
        fp = f_bar ** (-1.0 / pj)
        sq_bar_j = (2.0 * sq_phi_j + fp * sq_phi_j1) / (2.0 - fp)
    else:
        f_min = fac * (sq_phi_j + sq_phi_j1) / (sq_phi_j1 - sq_phi_j) ** max(pj, qj)
        if f_min >= f_max:
            return 0.0, 0.0, math.inf
        f_min = max(f_min, 1.5)
        f_bar = f_min + f_min / f_max * (f_max - f_min)
        fp = f_bar ** (-1.0 / pj)
        fq = f_bar ** (-1.0 / qj)
        w = -phi_j1 * t / log_epsilon
        den = 2.0 + w - (1.0 + w) * fp + fq
        sq_bar_j = ((2.0 + w + fq) * sq_phi_j + fp * sq_phi_j1) / den
        sq_bar_j1 = (-(1.0 + w) * fq * sq_phi_j + (2.0 + w - (1.0 + w) * fp) * sq_phi_j1) / den
    log_epsilon = log_epsilon - math.log(f_bar)
    w = -sq_bar_j1**2 * t / log_epsilon
    mu = (((1.0 + w) * sq_bar_j + sq_bar_j1) / (2.0 + w)) ** 2
    h = (-2.0 * math.pi / log_epsilon * (sq_bar_j1 - sq_bar_j)
         / ((1.0 + w) * sq_bar_j + sq_bar_j1))
    if mu <= 0.0 or h <= 0.0:
        return 0.0, 0.0, math.inf
    n = math.ceil(math.sqrt(1.0 - log_epsilon / t / mu) / h)
    return mu, h, n


def _param_unbounded(t, phi_j, pj, log_epsilon):
    """Optimal (mu, h, N) to the right of the last singularity phi_j."""
    sq_phi_j = math.sqrt(phi_j)
    phibar = phi_j * 1.01 if phi_j > 0 else 0.01
    sq_phibar = math.sqrt(phibar)
    f_min, f_max, f_tar = 1.0, 10.0, 5.0
    for _ in range(100):
        phi_t = phibar * t
        lep = log_epsilon / phi_t
        n = math.ceil(phi_t / math.pi * (1.0 - 1.5 * lep + math.sqrt(1.0 - 2.0 * lep)))
        a = math.pi * n / phi_t
        sq_mu = sq_phibar * abs(4.0 - a) / abs(7.0 - math.sqrt(1.0 + 12.0 * a))
        fbar = ((sq_phibar - sq_phi_j) / sq_mu) ** (-pj)
        if pj < 1e-14 or f_min < fbar < f_max:
            break
        sq_phibar = f_tar ** (-1.0 / pj) * sq_mu + sq_phi_j
        phibar = sq_phibar**2
    mu = sq_mu**2
    h = (-3.0 * a - 2.0 + 2.0 * math.sqrt(1.0 + 12.0 * a)) / (4.0 - a) / n
    threshold = (log_epsilon - _LOG_EPS) / t
    if mu > threshold:
        q = 0.0 if abs(pj) < 1e-14 else f_tar ** (-1.0 / pj) * math.sqrt(mu)
        phibar = (q + sq_phi_j) ** 2
        if phibar < threshold:
            w = math.sqrt(_LOG_EPS / (_LOG_EPS - log_epsilon))
            u = math.sqrt(-phibar * t / _LOG_EPS)
            mu = threshold
            n = math.ceil(w * log_epsilon / 2.0 / math.pi / (u * w - 1.0))
            h = math.sqrt(_LOG_EPS / (_LOG_EPS - log_epsilon)) / n
        else:
            return 0.0, 0.0, math.inf
    return mu, h, n


def _poles(alpha, x):
    """Poles of s^(a-b)/(s^a - x) on the principal sheet, as complex numbers."""
    theta = 0.0 if x > 0 else math.pi
    kmin = math.ceil(-alpha / 2.0 - theta / (2.0 * math.pi))
    kmax = math.floor(alpha / 2.0 - theta / (2.0 * math.pi))
    r = abs(x) ** (1.0 / alpha)
    return [r * complex(math.cos(a), math.sin(a))
            for a in ((theta + 2.0 * k * math.pi) / alpha for k in range(kmin, kmax + 1))]


def _contour_params(alpha, beta, x, log_epsilon=math.log(1e-15)):
    """Pick the parabola (mu, h, N) and the poles whose residues must be added."""
    t = 1.0
    poles = []
    for s in _poles(alpha, x):
        phi = 0.5 * (s.real + abs(s))
        if phi > 1e-15:
            poles.append((phi, s))
    poles.sort(key=lambda p: (p[0], p[1].imag))
    s_star = [0j] + [s for _, s in poles]
    phi = [0.0] + [p for p, _ in poles] + [math.inf]
    j1_count = len(s_star)
    p = [max(0.0, -2.0 * (alpha - beta + 1.0))] + [1.0] * (j1_count - 1)
    q = [1.0] * (j1_count - 1) + [math.inf]
    regions = [j for j in range(j1_count)
               if phi[j] < (log_epsilon - _LOG_EPS) / t and phi[j] < phi[j + 1]]
    while True:
        best = (math.inf, 0.0, 0.0, -1)
        for j in regions:
            if j < j1_count - 1:
                mu, h, n = _param_bounded(t, phi[j], phi[j + 1], p[j], q[j], log_epsilon)
            else:
                mu, h, n = _param_unbounded(t, phi[j], p[j], log_epsilon)
            if n < best[0]:
                best = (n, mu, h, j)
        if best[0] <= 200:
            break
        if log_epsilon > -2.0:
            raise MLEvaluationError("no admissible contour", math.nan, math.inf)
        log_epsilon += math.log(10.0)
    n, mu, h, j = best
    return mu, h, n, s_star[j + 1:]


def _residues(alpha, beta, poles):
    return sum((s ** (1.0 - beta) * np.exp(s)).real for s in poles) / alpha


def _contour(alpha, beta, x):
    mu, h, n, poles = _contour_params(alpha, beta, x)
    u = h * np.arange(-n, n + 1)
    z = mu * (1j * u + 1.0) ** 2
    zd = 2.0 * mu * (1j - u)
    f = np.exp(z) * z ** (alpha - beta) / (z**alpha - x) * zd
    integral = h * np.sum(f).imag / (2.0 * math.pi)
    return float(integral + _residues(alpha, beta, poles))


# -- regime 3: asymptotic expansion for large negative arguments -------------


def _asymptotic(alpha, beta, x, tol):
    """Returns None when the optimally truncated expansion cannot meet ``tol``."""
    r = -x
    lr = math.log(r)
    total = []
    best = math.inf
    for k in range(1, 400):
        # |1/Gamma(beta - alpha k)| <= Gamma(alpha k + 1 - beta)/pi for beta - alpha k < 0
        arg = alpha * k + 1.0 - beta
        bound = math.exp(math.lgamma(arg) - k * lr) / math.pi if arg > 0 else 1.0 / r**k
        if bound < 0.01 * tol:
            break
        if bound > best:
            return None
        best = bound
        total.append(-((-1.0) ** k) * r ** (-k) * rgamma(beta - alpha * k))
    else:
        return None
    value = math.fsum(total)
    for s in _poles(alpha, x):
        # only poles strictly inside the principal sheet contribute
        if abs(math.atan2(s.imag, s.real)) < math.pi - 1e-12:
            value += (s ** (1.0 - beta) * np.exp(s)).real / alpha
    return value


def _ml(alpha, beta, x, acc):
    if x == 0.0:
        return rgamma(beta)
    ax = abs(x)
    if ax <= acc.series_radius and ax ** (1.0 / alpha) <= acc.series_radius:
        return _series(alpha, beta, x, acc)
    if x < 0.0 and ax >= acc.asymptotic_threshold:
        v = _asymptotic(alpha, beta, x, acc.abs_tol)
        if v is not None:
            return v
    return _contour(alpha, beta, x)


def mittag_leffler(alpha: float, beta: float, x: float,
                   acc: MLAccuracy = DEFAULT_ACCURACY) -> float:
    """E_{alpha,beta}(x) for real x; beta may be any real (beta <= 0 used internally)."""
    if not (math.isfinite(alpha) and math.isfinite(beta) and math.isfinite(x)):
        raise MLDomainError("non-finite input")
    if not 0.0 < alpha <= 2.0:
        raise MLDomainError(f"alpha={alpha} outside (0, 2]")
    return _ml(float(alpha), float(beta), float(x), acc)


def ml_eval(q: MLQuery, acc: MLAccuracy = DEFAULT_ACCURACY) -> float:
    return _ml(q.alpha, q.beta, q.x, acc)


def ml_neg_axis(alpha: float, beta: float, z: float,
                acc: MLAccuracy = DEFAULT_ACCURACY) -> float:
    """E_{alpha,beta}(-z^alpha) for z >= 0."""
    if not z >= 0.0:
        raise MLDomainError(f"z={z} must be nonnegative")
    return mittag_leffler(alpha, beta, -(z**alpha), acc)


def ml_deriv_neg_axis(alpha: float, beta: float, z: float,
                      acc: MLAccuracy = DEFAULT_ACCURACY) -> float:
    """d/dz E_{alpha,beta}(-z^alpha) for z > 0.

    Uses (E_{a,b-1}(x) - (b-1) E_{a,b}(x)) / z at x = -z^a, which for
    b = a is the familiar (E_{a,a-1} + (1-a) E_{a,a}) / z. Near z = 0
    the division is ill-conditioned and a central secant is used instead.
    """
    if not z > 0.0:
        raise MLDomainError(f"z={z} must be positive")
    x = -(z**alpha)
    if abs(x) < 1e-6:
        h = 0.5 * z
        return (ml_neg_axis(alpha, beta, z + h, acc) - ml_neg_axis(alpha, beta, z - h, acc)) / (2 * h)
    e_b = mittag_leffler(alpha, beta, x, acc)
    e_bm1 = mittag_leffler(alpha, beta - 1.0, x, acc)
    return (e_bm1 - (beta - 1.0) * e_b) / z


def _series_grid(alpha, beta, x):
    ax = np.abs(x)
    k_max = int(np.max(ax) ** (1.0 / alpha) / alpha) + 2
    lmax = 0.0
    k = 0
    logs = []
    while True:
        lg = -math.lgamma(alpha * k + beta) if alpha * k + beta > 0 else -math.inf
        logs.append(lg)
        if k > k_max and k * math.log(max(np.max(ax), 1e-300)) + lg < math.log(1e-17) + lmax:
            break
        lmax = max(lmax, k * math.log(max(np.max(ax), 1e-300)) + lg)
        k += 1
    ks = np.arange(len(logs))
    with np.errstate(divide="ignore", invalid="ignore"):
        mag = np.exp(ks[None, :] * np.log(ax)[:, None] + np.array(logs)[None, :])
    mag[:, 0] = rgamma(beta)
    sign = np.where((x[:, None] < 0) & (ks[None, :] % 2 == 1), -1.0, 1.0)
    return np.sum(sign * mag, axis=1)


def ml_neg_axis_grid(alpha: float, beta: float, zs, acc: MLAccuracy = DEFAULT_ACCURACY) -> np.ndarray:
    """Batched E_{alpha,beta}(-z^alpha) over an array of z >= 0.

    Meant for dense sign scans; agrees with :func:`ml_neg_axis` to
    roughly 1e-14 but is not bit-identical to it.
    """
    zs = np.asarray(zs, dtype=float)
    if np.any(~(zs >= 0.0)):
        raise MLDomainError("z must be nonnegative")
    x = -(zs**alpha)
    out = np.empty_like(x)
    small = np.abs(x) ** (1.0 / alpha) <= acc.series_radius
    small &= np.abs(x) <= acc.series_radius
    if np.any(small):
        out[small] = _series_grid(alpha, beta, x[small])
    idx = np.flatnonzero(~small)
    if idx.size:
        params = [_contour_params(alpha, beta, float(x[i])) for i in idx]
        ns = np.array([p[2] for p in params])
        for n in np.unique(ns):
            sel = np.flatnonzero(ns == n)
            mu = np.array([params[i][0] for i in sel])[:, None]
            h = np.array([params[i][1] for i in sel])[:, None]
            u = h * np.arange(-n, n + 1)[None, :]
            z = mu * (1j * u + 1.0) ** 2
            zd = 2.0 * mu * (1j - u)
            f = np.exp(z) * z ** (alpha - beta) / (z**alpha - x[idx[sel]][:, None]) * zd
            integral = h[:, 0] * np.sum(f, axis=1).imag / (2.0 * math.pi)
            res = np.array([_residues(alpha, beta, params[i][3]) for i in sel])
            out[idx[sel]] = integral + res
    return out
