"""
Named analytic fields, forcings, and default grids for the scenario
runner and the test suite.  Every preset is deterministic in its
parameters; scenario configs reference them by name.
"""

from __future__ import annotations

import numpy as np

from .core import Grid, SpectralField, from_function, zero_field


def channel_default(nx: int = 256, ny: int = 512) -> Grid:
    """The |y| >= 1 channel used by the transport-at-linear-shear runs."""
    return Grid.channel(nx, ny, a=1.0, b=2.0)


def consistency_box(n: int = 256) -> Grid:
    """Offset periodic box [0,2pi) x [1, 1+2pi) (keeps 1/y well away from
    the stationary streamline while staying fully spectral)."""
    return Grid.periodic(n, n, lx=2.0 * np.pi, ly=2.0 * np.pi, y0=1.0)


def viscous_box(nx: int = 64, ny: int = 256, ly: float = 8.0 * np.pi) -> Grid:
    """Centered periodic truncation of the unbounded channel."""
    return Grid.periodic(nx, ny, lx=2.0 * np.pi, ly=ly)


def _gauss(c: float, w: float):
    return lambda Y: np.exp(-((Y - c) / w) ** 2)


def make_field(grid: Grid, name: str, amplitude: float = 1.0,
               k: int = 1, phase: float = 0.0, center: float | None = None,
               width: float | None = None) -> SpectralField:
    """
    Build a named analytic field on the grid.

    Names: "zero", "cos_bump" (cos(kx+phase) * gaussian(y)),
    "sin_bump", "cos_wave" (no y-localization), "mode" (single Fourier
    mode at (k, eta-index 0)).
    """
    y = grid.y
    ymid = 0.5 * (y[0] + y[-1])
    span = y[-1] - y[0]
    c = ymid if center is None else center
    w = 0.22 * span if width is None else width
    if name == "zero":
        return zero_field(grid)
    if name == "cos_bump":
        return from_function(grid, lambda X, Y: amplitude *
                             np.cos(k * X + phase) * _gauss(c, w)(Y))
    if name == "sin_bump":
        return from_function(grid, lambda X, Y: amplitude *
                             np.sin(k * X + phase) * _gauss(c, w)(Y))
    if name == "cos_wave":
        return from_function(grid, lambda X, Y: amplitude *
                             np.cos(k * X + phase) + 0.0 * Y)
    if name == "mode":
        f = zero_field(grid)
        f.coeffs[k % grid.nx, 0] = amplitude / 2.0
        f.coeffs[(-k) % grid.nx, 0] = amplitude / 2.0
        return f
    raise ValueError(f"unknown field preset {name!r}")


# Scenario-level defaults tuned so the acceptance tolerances hold with
# margin at the default resolutions; widths are in y-units.

def couette_resonant_fields(grid: Grid) -> tuple[SpectralField, SpectralField]:
    """Initial data orthogonal in x to the forcing (keeps the growth
    exponent clean of cross terms)."""
    w0 = make_field(grid, "sin_bump", amplitude=0.6, center=1.5, width=0.22)
    f0 = make_field(grid, "cos_bump", amplitude=1.0, center=1.45, width=0.2)
    return w0, f0


def couette_stationary_fields(grid: Grid) -> tuple[SpectralField, SpectralField]:
    w0 = make_field(grid, "cos_bump", amplitude=0.8, phase=1.1,
                    center=1.55, width=0.3)
    f0 = make_field(grid, "cos_bump", amplitude=1.0, center=1.45, width=0.2)
    return w0, f0


def consistency_parts(grid: Grid, amplitude: float = 0.25
                      ) -> tuple[SpectralField, SpectralField]:
    ymid = 0.5 * (grid.y[0] + grid.y[-1])
    w1 = from_function(grid, lambda X, Y: amplitude * np.cos(X)
                       * np.exp(-((Y - ymid) / 0.8) ** 2))
    w2 = from_function(grid, lambda X, Y: amplitude * np.sin(X)
                       * np.exp(-((Y - ymid - 0.3) / 0.7) ** 2))
    return w1, w2


def ns_forcing(grid: Grid, nu: float, fraction: float = 1.0) -> SpectralField:
    """Stationary forcing scaled to ||f||_H1 = fraction * nu^2 / 40."""
    from .core import h1_norm
    raw = from_function(grid, lambda X, Y: np.cos(X) * np.exp(-Y ** 2 / 2.0))
    return raw * (fraction * nu ** 2 / 40.0 / h1_norm(raw))


def ns_perturbation(grid: Grid, amplitude: float = 0.01) -> SpectralField:
    return from_function(grid, lambda X, Y: amplitude * np.cos(X)
                         * np.exp(-Y ** 2 / 2.0))


def viscous_fields(grid: Grid) -> tuple[SpectralField, SpectralField]:
    w0 = from_function(grid, lambda X, Y: np.cos(X) * np.exp(-Y ** 2 / 2.0))
    f0 = from_function(grid, lambda X, Y: np.cos(X + 0.3)
                       * np.exp(-Y ** 2 / 3.0))
    return w0, f0
