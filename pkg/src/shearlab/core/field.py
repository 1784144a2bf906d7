"""
Spectral fields and transforms.

Coefficients follow the mean-normalized convention: on a periodic grid

    coeffs = fft2(samples) / (nx * ny)

so the (0, 0) coefficient is the mean and Parseval reads

    mean(|u|^2) = sum |coeffs|^2,

which makes ``||sin x||_L2 = 1/sqrt(2)``.  Channel grids transform in x
only; ``coeffs[m, j]`` is the x-coefficient of mode ``k_m`` at node ``y_j``.

The ``frame`` tag records whether y-indices refer to Eulerian frequencies
or to the sheared (Lagrangian) lattice at ``frame_time``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
import scipy.fft as _fft

from .grid import Grid


@dataclass
class SpectralField:
    grid: Grid
    coeffs: np.ndarray
    frame: str = "eulerian"           # "eulerian" | "lagrangian"
    frame_time: float = 0.0

    def __post_init__(self) -> None:
        expected = (self.grid.nx, self.grid.ny)
        if self.coeffs.shape != expected:
            raise ValueError(f"coefficient shape {self.coeffs.shape} does not "
                             f"match grid {expected}")
        if self.coeffs.dtype != np.complex128:
            self.coeffs = self.coeffs.astype(np.complex128)

    def copy(self) -> "SpectralField":
        return replace(self, coeffs=self.coeffs.copy())

    def zeros_like(self) -> "SpectralField":
        return replace(self, coeffs=np.zeros_like(self.coeffs))

    def __add__(self, other: "SpectralField") -> "SpectralField":
        self._check_compatible(other)
        return replace(self, coeffs=self.coeffs + other.coeffs)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        self._check_compatible(other)
        return replace(self, coeffs=self.coeffs - other.coeffs)

    def __mul__(self, scalar: complex) -> "SpectralField":
        return replace(self, coeffs=self.coeffs * scalar)

    __rmul__ = __mul__

    def _check_compatible(self, other: "SpectralField") -> None:
        if self.grid != other.grid:
            raise ValueError("fields live on different grids")
        if self.frame != other.frame or self.frame_time != other.frame_time:
            raise ValueError("fields carry different frames "
                             f"({self.frame}@{self.frame_time} vs "
                             f"{other.frame}@{other.frame_time})")

    @property
    def is_mean_free_in_x(self) -> bool:
        k0 = np.max(np.abs(self.coeffs[0, :]))
        scale = max(np.max(np.abs(self.coeffs)), 1.0)
        return bool(k0 <= 1e-13 * scale)


def zero_field(grid: Grid, frame: str = "eulerian",
               frame_time: float = 0.0) -> SpectralField:
    return SpectralField(grid, np.zeros((grid.nx, grid.ny), dtype=np.complex128),
                         frame, frame_time)


def transform(grid: Grid, samples: np.ndarray) -> SpectralField:
    """
    Physical samples (nx, ny) -> SpectralField.

    Raises on shape mismatch or non-finite input.
    """
    samples = np.asarray(samples)
    if samples.shape != (grid.nx, grid.ny):
        raise ValueError(f"sample shape {samples.shape} does not match grid "
                         f"({grid.nx}, {grid.ny})")
    if not np.all(np.isfinite(samples)):
        raise ValueError("input samples contain NaN or Inf")
    if grid.y_kind == "periodic":
        coeffs = _fft.fft2(samples) / (grid.nx * grid.ny)
    else:
        coeffs = _fft.fft(samples, axis=0) / grid.nx
    return SpectralField(grid, coeffs)


def inverse_transform(field: SpectralField) -> np.ndarray:
    """SpectralField -> physical samples (complex; take .real for real fields)."""
    g = field.grid
    if g.y_kind == "periodic":
        return _fft.ifft2(field.coeffs * (g.nx * g.ny))
    return _fft.ifft(field.coeffs * g.nx, axis=0)


def physical(field: SpectralField) -> np.ndarray:
    """Real part of the physical samples (for fields known to be real)."""
    return inverse_transform(field).real


def from_function(grid: Grid, fn) -> SpectralField:
    """Sample ``fn(X, Y)`` on the grid and transform."""
    X, Y = np.meshgrid(grid.x, grid.y, indexing="ij")
    return transform(grid, np.asarray(fn(X, Y), dtype=float))


def reality_defect(field: SpectralField) -> float:
    """
    Max deviation from the reality condition coeffs(-k,-eta)=conj(coeffs).
    On channel grids only the x-direction is checked.
    """
    c = field.coeffs
    flipped = np.conj(c[(-np.arange(field.grid.nx)) % field.grid.nx, :])
    if field.grid.y_kind == "periodic":
        flipped = flipped[:, (-np.arange(field.grid.ny)) % field.grid.ny]
    return float(np.max(np.abs(c - flipped)))
