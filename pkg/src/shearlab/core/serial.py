"""Field persistence: flat little-endian complex doubles + JSON sidecar."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .field import SpectralField
from .grid import Grid

SCHEMA = "shearlab-field-v1"


def save_field(u: SpectralField, path: str | Path) -> None:
    path = Path(path)
    u.coeffs.astype("<c16").tofile(path)
    sidecar = {
        "schema": SCHEMA,
        "grid": u.grid.describe(),
        "frame": u.frame,
        "frame_time": u.frame_time,
        "shape": [u.grid.nx, u.grid.ny],
    }
    path.with_suffix(path.suffix + ".json").write_text(
        json.dumps(sidecar, sort_keys=True, indent=2) + "\n")


def load_field(path: str | Path) -> SpectralField:
    path = Path(path)
    sidecar = json.loads(path.with_suffix(path.suffix + ".json").read_text())
    if sidecar.get("schema") != SCHEMA:
        raise ValueError(f"unknown field schema: {sidecar.get('schema')!r}")
    grid = Grid.from_description(sidecar["grid"])
    coeffs = np.fromfile(path, dtype="<c16").reshape(grid.nx, grid.ny)
    return SpectralField(grid, coeffs.astype(np.complex128),
                         sidecar["frame"], sidecar["frame_time"])
