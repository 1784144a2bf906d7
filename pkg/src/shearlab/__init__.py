"""
shearlab: a spectral laboratory for forced shear-flow experiments.

The package cross-validates closed-form solutions of forced transport
problems at linear shear, quadrature of their Duhamel integrals, a
general-shear solution operator, viscous Fourier-multiplier solutions with
enhanced dissipation, and a small nonlinear fixed-point / relaxation
study, with norm-series diagnostics and a deterministic scenario runner.
"""

__version__ = "0.1.0"

from . import (consistency, core, couette, diagnostics, nonlinear, presets,
               report, scenarios, shear, viscous)

__all__ = ["core", "couette", "consistency", "shear", "viscous", "nonlinear",
           "diagnostics", "presets", "report", "scenarios", "__version__"]
