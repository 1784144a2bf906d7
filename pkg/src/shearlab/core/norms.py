"""
Sobolev norms under the mean-normalized measure (||sin x||_L2 = 1/sqrt 2).

Periodic grids weight coefficients with (1 + k^2 + eta^2)^s.  Channel
grids expand the y-dependence in the Dirichlet sine basis and weight with
(1 + k^2 + mu_m)^s, mu_m the Dirichlet-Laplacian eigenvalues; this is the
dual-space characterization of the negative-index scale on an interval.
"""

from __future__ import annotations

import numpy as np

from .field import SpectralField, inverse_transform
from .grid import Grid
from .operators import sine_coefficients


def _check_index(s: float) -> None:
    if not -2.0 <= s <= 2.0:
        raise ValueError("Sobolev index must lie in [-2, 2]")


def sobolev_weights(grid: Grid, s: float) -> np.ndarray:
    """(1 + |xi|^2)^s over the stored coefficient lattice."""
    _check_index(s)
    if grid.y_kind == "periodic":
        base = 1.0 + grid.kmesh() ** 2 + grid.etamesh() ** 2
    else:
        base = 1.0 + grid.k[:, None] ** 2 + grid.dirichlet_eigenvalues[None, :]
    return base ** s


def _mode_amplitudes(u: SpectralField) -> np.ndarray:
    """|coefficients|^2 in the basis matching sobolev_weights."""
    g = u.grid
    if g.y_kind == "periodic":
        return np.abs(u.coeffs) ** 2
    d = sine_coefficients(u.coeffs, g.ny) * np.sqrt((g.ny + 1) / (2.0 * g.ny))
    return np.abs(d) ** 2


def sobolev_norm(u: SpectralField, s: float) -> float:
    """
    H^s norm ( sum (1+|xi|^2)^s |u_hat|^2 )^(1/2); s = 0 recovers the L2
    norm under the normalized measure.
    """
    w = sobolev_weights(u.grid, s)
    return float(np.sqrt(np.sum(w * _mode_amplitudes(u))))


def l2_norm(u: SpectralField) -> float:
    return sobolev_norm(u, 0.0)


def h1_norm(u: SpectralField) -> float:
    return sobolev_norm(u, 1.0)


def l2_inner(u: SpectralField, v: SpectralField) -> float:
    """Real L2 pairing <u, v> under the normalized measure."""
    g = u.grid
    if g != v.grid:
        raise ValueError("fields live on different grids")
    if g.y_kind == "periodic":
        val = np.sum(u.coeffs * np.conj(v.coeffs))
    else:
        scale = (g.ny + 1) / (2.0 * g.ny)
        du = sine_coefficients(u.coeffs, g.ny)
        dv = sine_coefficients(v.coeffs, g.ny)
        val = scale * np.sum(du * np.conj(dv))
    return float(np.real(val))


def linf_norm(u: SpectralField) -> float:
    return float(np.max(np.abs(inverse_transform(u).real)))


def parseval_defect(u: SpectralField) -> float:
    """Relative gap between the physical and spectral L2 norms."""
    g = u.grid
    phys = inverse_transform(u)
    phys_sq = float(np.mean(np.abs(phys) ** 2))
    if g.y_kind == "periodic":
        spec_sq = float(np.sum(np.abs(u.coeffs) ** 2))
    else:
        spec_sq = float(np.sum(np.abs(u.coeffs) ** 2) / g.ny)
    scale = max(phys_sq, spec_sq, 1e-300)
    return abs(phys_sq - spec_sq) / scale
