"""Data behind the plots and the table of headline constants.

Every figure is a CSV table plus a gnuplot script that plots it; nothing
here renders images.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fode import linear_closed_form
from .ml_core import ml_neg_axis_grid
from .zeros import (
    NewtonOptions,
    alpha_grid,
    fit_asymptote,
    has_real_zero,
    refine_minimum,
    smallest_zero,
    sweep,
    threshold_alpha0,
)


@dataclass
class FigureData:
    name: str
    columns: list[str]
    rows: np.ndarray
    script: str


def _gp(name, title, xlabel, ylabel, series, extra=""):
    lines = [
        "set datafile separator ','",
        f"set title '{title}'",
        f"set xlabel '{xlabel}'",
        f"set ylabel '{ylabel}'",
        "set key outside",
    ]
    if extra:
        lines.append(extra)
    plots = [f"'{name}.csv' using {u} with lines {style} title '{t}'" for u, style, t in series]
    lines.append("plot " + ", \\\n     ".join(plots))
    return "\n".join(lines) + "\n"


def fig_meet(n: int = 601) -> FigureData:
    t = np.linspace(0.0, 3.0, n)
    y2 = np.array([linear_closed_form(1.5, -1.0, 1.0, 0.0, ti) for ti in t])
    rows = np.column_stack([t, np.zeros(n), y2])
    script = _gp("meet", "y1 = 0 and y2 = E_{1.5,1}(-t^{1.5})", "t", "y",
                 [("1:2", "lt 1", "y1"), ("1:3", "lt 2", "y2")])
    return FigureData("meet", ["t", "y1", "y2"], rows, script)


def _zeros_with_fits(name, beta, regimes, grid, title, opts):
    recs = sweep(beta, grid, opts)
    alphas = np.array([r.alpha for r in recs])
    cols = [np.array([r.z_min for r in recs])]
    for regime in regimes:
        cols.append(np.asarray(fit_asymptote(recs, regime).evaluate(alphas), dtype=float))
    rows = np.column_stack([alphas, *cols])
    series = [("1:2", "lt 1", "Z")] + [(f"1:{k + 3}", "dt 3", f"fit {reg}") for k, reg in enumerate(regimes)]
    script = _gp(name, title, "alpha", "smallest positive zero", series, "set yrange [0:12]")
    return FigureData(name, ["alpha", "z_min"] + [f"fit_{reg}" for reg in regimes], rows, script)


def fig_alpha_zeros(step: float = 1e-3, opts: NewtonOptions = NewtonOptions()) -> FigureData:
    return _zeros_with_fits("alpha_zeros", "alpha", ["alpha_to_1", "alpha_to_2"], alpha_grid(step=step),
                            "Z_alpha(alpha), zero of E_{alpha,alpha}(-z^alpha)", opts)


def fig_beta1_zeros(step: float = 1e-3, opts: NewtonOptions = NewtonOptions()) -> FigureData:
    return _zeros_with_fits("beta1_zeros", 1.0, ["alpha_to_1", "alpha_to_2"], alpha_grid(step=step),
                            "Z_1(alpha), zero of E_{alpha,1}(-z^alpha)", opts)


def beta2_grid(alpha0: float, step: float = 1e-3, n_near: int = 40) -> np.ndarray:
    """Geometric offsets above alpha0 joined to a uniform grid up to 2."""
    near = alpha0 + np.geomspace(1e-7, 1e-3, n_near)
    far = alpha_grid(math.ceil((alpha0 + 1e-3) / step) * step, 2.0, step)
    return np.concatenate([near, far])


def fig_beta2_zeros(step: float = 1e-3, opts: NewtonOptions = NewtonOptions()) -> FigureData:
    a0 = threshold_alpha0(1e-10)
    return _zeros_with_fits("beta2_zeros", 2.0, ["alpha_to_2", "alpha_to_alpha0"], beta2_grid(a0, step),
                            "Z_2(alpha), zero of E_{alpha,2}(-z^alpha)", opts)


def fig_beta1_functions(n: int = 801) -> FigureData:
    z = np.linspace(0.0, 8.0, n)
    alphas = (1.05, 1.35, 1.65, 1.95)
    cols = [ml_neg_axis_grid(a, 1.0, z) for a in alphas]
    names = [f"E_{a}" for a in alphas]
    series = [(f"1:{k + 2}", f"lt {k + 1}", f"alpha = {a}") for k, a in enumerate(alphas)]
    script = _gp("beta1_functions", "E_{alpha,1}(-z^alpha)", "z", "value", series)
    return FigureData("beta1_functions", ["z"] + names, np.column_stack([z, *cols]), script)


# the zoom uses the same two orders as the threshold discussion; see the ledger
# about which of them has the zero
THRESHOLD_WIDE = (1.599, 1.6)
THRESHOLD_ZOOM = (1.59911520635, 1.5991152064)


def fig_beta2_threshold(n: int = 401) -> FigureData:
    blocks = []
    for panel, alphas, z in (("wide", THRESHOLD_WIDE, np.geomspace(4.0, 150.0, n)),
                             ("zoom", THRESHOLD_ZOOM, np.linspace(5.2106, 5.21075, n))):
        for a in alphas:
            blocks.append(np.column_stack([np.full(n, 0 if panel == "wide" else 1), np.full(n, a), z,
                                           ml_neg_axis_grid(a, 2.0, z)]))
    rows = np.vstack(blocks)
    script = "\n".join([
        "set datafile separator ','",
        "set multiplot layout 1,2",
        "set logscale x",
        "set title 'E_{alpha,2}(-z^alpha), z in [4, 150]'",
        f"plot 'beta2_threshold.csv' using ($1==0 && $2=={THRESHOLD_WIDE[0]} ? $3 : 1/0):4 with lines dt 2 "
        f"title 'alpha = {THRESHOLD_WIDE[0]}', \\",
        f"     '' using ($1==0 && $2=={THRESHOLD_WIDE[1]} ? $3 : 1/0):4 with lines title 'alpha = {THRESHOLD_WIDE[1]}'",
        "unset logscale x",
        "set title 'zoom, z in [5.2106, 5.21075]'",
        f"plot 'beta2_threshold.csv' using ($1==1 && $2=={THRESHOLD_ZOOM[0]} ? $3 : 1/0):4 with lines dt 2 "
        f"title 'alpha = {THRESHOLD_ZOOM[0]}', \\",
        f"     '' using ($1==1 && $2=={THRESHOLD_ZOOM[1]} ? $3 : 1/0):4 with lines title 'alpha = {THRESHOLD_ZOOM[1]}'",
        "unset multiplot",
    ]) + "\n"
    return FigureData("beta2_threshold", ["panel", "alpha", "z", "value"], rows, script)


FIGURES = {
    "meet": fig_meet,
    "alpha_zeros": fig_alpha_zeros,
    "beta2_threshold": fig_beta2_threshold,
    "beta2_zeros": fig_beta2_zeros,
    "beta1_functions": fig_beta1_functions,
    "beta1_zeros": fig_beta1_zeros,
}


# -- headline constants --------------------------------------------------------


@dataclass(frozen=True)
class ConstantRow:
    name: str
    reference: float
    computed: float
    tol: float

    @property
    def diff(self) -> float:
        return abs(self.computed - self.reference)

    @property
    def ok(self) -> bool:
        return self.diff <= self.tol


def constants_table(tol_scale: float = 1.0, opts: NewtonOptions = NewtonOptions()) -> list[ConstantRow]:
    """Recompute the headline numbers of the zero study next to their published values."""
    rows = []
    recs = sweep("alpha", alpha_grid(), opts)
    a_min, z_min, _ = refine_minimum("alpha", recs)
    rows.append(ConstantRow("min Z_alpha(alpha)", 2.9378538, z_min, 1e-5))
    rows.append(ConstantRow("argmin alpha of Z_alpha", 1.586, a_min, 2e-3))
    a0 = threshold_alpha0(1e-10)
    rows.append(ConstantRow("alpha0", 1.599115206, a0, 1e-6))
    rows.append(ConstantRow("Z_2(alpha0)", 5.21066, has_real_zero(a0 + 1e-10)[1], 1e-3))
    recs1 = sweep(1.0, alpha_grid(), opts)
    a1, z1, _ = refine_minimum(1.0, recs1)
    rows.append(ConstantRow("min Z_1(alpha)", 1.559, z1, 2e-3))
    rows.append(ConstantRow("argmin alpha of Z_1", 1.833, a1, 2e-3))
    rows.append(ConstantRow("Z_1(2)", math.pi / 2, smallest_zero(2.0, 1.0).z_min, 1e-10))
    rows.append(ConstantRow("Z_2(2)", math.pi, smallest_zero(2.0, 2.0).z_min, 1e-10))
    rows.append(ConstantRow("first zero of E_{1.5,1}(-t^1.5)", 1.645, smallest_zero(1.5, 1.0).z_min, 5e-3))
    return [ConstantRow(r.name, r.reference, r.computed, r.tol * tol_scale) for r in rows]
