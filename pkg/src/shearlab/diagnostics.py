"""
Norm time series, rate fitting, trend tests, and weak-convergence pairings.

Fit results always carry the residual RMS and a 95% confidence half-width;
nothing is reported as a bare point estimate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .core import (Grid, SpectralField, from_function, l2_inner,
                   project_nonzero_x, sobolev_norm)


# ---------------------------------------------------------------------------
# Series containers
# ---------------------------------------------------------------------------

@dataclass
class NormSeries:
    """Time series of H^s norms of one evolving field."""
    times: np.ndarray
    values: dict[str, np.ndarray]        # str(s) -> norms
    frame: str = "eulerian"
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        t = np.asarray(self.times, dtype=float)
        if t.size >= 2 and not np.all(np.diff(t) > 0):
            raise ValueError("times must be strictly increasing")
        for key, v in self.values.items():
            v = np.asarray(v, dtype=float)
            if v.shape != t.shape:
                raise ValueError(f"series {key!r} length mismatch")
            if np.any(v < 0):
                raise ValueError(f"series {key!r} contains negative norms")
            self.values[key] = v
        self.times = t

    def series(self, s: float) -> np.ndarray:
        return self.values[format_index(s)]


def format_index(s: float) -> str:
    return f"{float(s):g}"


def record_norms(times, fields, s_list, frame: str = "eulerian",
                 meta: dict | None = None) -> NormSeries:
    values = {format_index(s): np.array([sobolev_norm(f, s) for f in fields])
              for s in s_list}
    return NormSeries(np.asarray(times, float), values, frame, meta or {})


# ---------------------------------------------------------------------------
# Rate fits
# ---------------------------------------------------------------------------

@dataclass
class RateFit:
    model: str                  # "power_law" | "exp_poly" | "linear"
    params: dict[str, float]
    window: tuple[float, float]
    residual_rms: float
    half_width_95: float        # on the leading parameter

    def as_dict(self) -> dict:
        return {"model": self.model, "params": dict(self.params),
                "window": list(self.window),
                "residual_rms": self.residual_rms,
                "half_width_95": self.half_width_95}


def _window_mask(times: np.ndarray, window) -> np.ndarray:
    lo, hi = window
    return (times >= lo) & (times <= hi)


def _ols_line(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float, float]:
    """Slope, intercept, residual RMS, and 95% half-width of the slope."""
    n = x.size
    A = np.vstack([x, np.ones_like(x)]).T
    sol, *_ = np.linalg.lstsq(A, y, rcond=None)
    slope, intercept = float(sol[0]), float(sol[1])
    resid = y - A @ sol
    rms = float(np.sqrt(np.mean(resid ** 2)))
    if n > 2:
        sxx = float(np.sum((x - x.mean()) ** 2))
        se = np.sqrt(np.sum(resid ** 2) / (n - 2) / max(sxx, 1e-300))
        half = float(stats.t.ppf(0.975, n - 2) * se)
    else:
        half = np.inf
    return slope, intercept, rms, half


def fit_power_law(times, values, window=None) -> RateFit:
    """Least squares of log(value) against log(t): value ~ C * t^alpha."""
    t = np.asarray(times, float)
    v = np.asarray(values, float)
    if window is None:
        window = default_window(t)
    m = _window_mask(t, window) & (t > 0)
    if np.count_nonzero(m) < 5:
        raise ValueError("need at least 5 samples in the fit window")
    if np.any(v[m] <= 0):
        raise ValueError("power-law fit requires positive samples")
    slope, intercept, rms, half = _ols_line(np.log(t[m]), np.log(v[m]))
    return RateFit("power_law", {"alpha": slope, "log_c": intercept},
                   tuple(window), rms, half)


def fit_exp_poly(times, values, degree: float | None = None,
                 window=None) -> RateFit:
    """
    Fit value ~ exp(a - b * t^d).  With a fixed degree this is linear least
    squares on (t^d, log value); a free degree runs a coarse grid over
    {1, 2, 3} followed by golden-section refinement of the residual.
    """
    t = np.asarray(times, float)
    v = np.asarray(values, float)
    if window is None:
        window = default_window(t)
    m = _window_mask(t, window)
    if np.count_nonzero(m) < 6:
        raise ValueError("need at least 6 samples in the fit window")
    if np.any(v[m] <= 0):
        raise ValueError("exp-poly fit requires positive samples")
    tw, lw = t[m], np.log(v[m])

    def sse(d: float) -> float:
        slope, intercept, rms, _ = _ols_line(tw ** d, lw)
        return rms

    if degree is None:
        coarse = min((1.0, 2.0, 3.0), key=sse)
        lo, hi = max(0.3, coarse - 1.0), coarse + 1.0
        gr = (np.sqrt(5.0) - 1.0) / 2.0
        x1, x2 = hi - gr * (hi - lo), lo + gr * (hi - lo)
        f1, f2 = sse(x1), sse(x2)
        for _ in range(80):
            if f1 < f2:
                hi, x2, f2 = x2, x1, f1
                x1 = hi - gr * (hi - lo)
                f1 = sse(x1)
            else:
                lo, x1, f1 = x1, x2, f2
                x2 = lo + gr * (hi - lo)
                f2 = sse(x2)
        degree = 0.5 * (lo + hi)
    slope, intercept, rms, half = _ols_line(tw ** degree, lw)
    return RateFit("exp_poly", {"b": -slope, "d": float(degree),
                                "a": intercept}, tuple(window), rms, half)


def fit_linear(times, values, window=None) -> RateFit:
    t = np.asarray(times, float)
    v = np.asarray(values, float)
    if window is None:
        window = (float(t[0]), float(t[-1]))
    m = _window_mask(t, window)
    slope, intercept, rms, half = _ols_line(t[m], v[m])
    return RateFit("linear", {"slope": slope, "intercept": intercept},
                   tuple(window), rms, half)


def default_window(times: np.ndarray) -> tuple[float, float]:
    """Last two thirds of the run (skips transients)."""
    t = np.asarray(times, float)
    return (float(t[0] + (t[-1] - t[0]) / 3.0), float(t[-1]))


def trend_report(times, values, window=None) -> dict:
    """
    OLS slope of a series with its 95% confidence interval.  A positive
    trend is "detected" only when the whole interval lies above zero.
    """
    fitted = fit_linear(times, values, window)
    slope = fitted.params["slope"]
    lo, hi = slope - fitted.half_width_95, slope + fitted.half_width_95
    return {"slope": slope, "ci95": [lo, hi],
            "positive_trend_detected": bool(lo > 0.0),
            "window": list(fitted.window)}


def bounded_trend_report(times, values, window=None,
                         rel_tol: float = 0.05) -> dict:
    """
    Growth test suited to smooth deterministic series that saturate from
    below (where the OLS interval is vanishingly tight): a positive trend
    counts only if the 95% interval excludes zero AND the fitted growth
    across the window exceeds ``rel_tol`` of the series median.
    """
    t = np.asarray(times, float)
    if window is None:
        window = default_window(t)
    rep = trend_report(t, values, window)
    span = window[1] - window[0]
    m = _window_mask(t, window)
    level = float(np.median(np.asarray(values, float)[m]))
    growth = rep["slope"] * span
    rep.update(window_growth=growth, series_level=level,
               relative_growth=growth / max(abs(level), 1e-300),
               positive_trend_detected=bool(
                   rep["positive_trend_detected"]
                   and growth > rel_tol * abs(level)))
    return rep


# ---------------------------------------------------------------------------
# Weak-convergence machinery
# ---------------------------------------------------------------------------

def pairing_basket(grid: Grid, seed: int = 7) -> list[SpectralField]:
    """
    Five fixed smooth mean-free fields, H1-normalized: three tensor bumps
    at different centers/widths and two low-mode trigonometric packets.
    """
    rng = np.random.default_rng(seed)
    y = grid.y
    ymid = 0.5 * (y[0] + y[-1])
    yspan = y[-1] - y[0]

    def bump(c, w):
        return lambda X, Y: np.cos(X) * np.exp(-((Y - c) / w) ** 2)

    makers = [
        bump(ymid, 0.18 * yspan),
        bump(ymid - 0.15 * yspan, 0.12 * yspan),
        bump(ymid + 0.2 * yspan, 0.15 * yspan),
        lambda X, Y: (np.sin(X) + 0.5 * np.cos(2 * X)) *
                     np.sin(np.pi * (Y - y[0] + grid.dy) /
                            (yspan + 2 * grid.dy)),
        lambda X, Y: np.cos(X + rng.uniform(0, 2 * np.pi)) *
                     np.sin(2 * np.pi * (Y - y[0] + grid.dy) /
                            (yspan + 2 * grid.dy)),
    ]
    basket = []
    for make in makers:
        f = project_nonzero_x(from_function(grid, make))
        n = sobolev_norm(f, 1.0)
        basket.append(f * (1.0 / n))
    return basket


def weak_pairing_series(times, fields, basket) -> dict:
    """
    L2 pairings of a trajectory against each basket member, plus a Cauchy
    report: the max over members of the pairing oscillation on the last
    third of the window.
    """
    pairings = np.array([[l2_inner(u, psi) for u in fields]
                         for psi in basket])
    t = np.asarray(times, float)
    t0 = t[0] + 2.0 * (t[-1] - t[0]) / 3.0
    tail_mask = t >= t0
    tails = [float(np.max(p[tail_mask]) - np.min(p[tail_mask]))
             for p in pairings]
    return {"times": t, "pairings": pairings,
            "cauchy_tail": float(max(tails)), "tail_start": float(t0)}


def cauchy_tail(times, values, t_start: float) -> float:
    """sup_{t,t' >= t_start} |v(t) - v(t')| for a scalar series."""
    t = np.asarray(times, float)
    v = np.asarray(values, float)
    m = t >= t_start
    if np.count_nonzero(m) < 2:
        raise ValueError("need at least two samples beyond t_start")
    return float(np.max(v[m]) - np.min(v[m]))
