"""Simulator for coupled condensate/pair-kernel dynamics of dilute Bose gases.

Core layers:

* :mod:`tdhfb.grids`       periodic grids, Fourier multipliers, propagators
* :mod:`tdhfb.kernels`     kernel composition and the sh/ch calculus (Takagi)
* :mod:`tdhfb.model`       parameters, scaled potential, states, initial data
* :mod:`tdhfb.rhs`         forcing terms of both flow representations
* :mod:`tdhfb.integrate`   Lawson-RK4 / RK4 stepping with error control
* :mod:`tdhfb.diagnostics` conserved quantities and Sobolev monitors
* :mod:`tdhfb.fock`        exact truncated-Fock-space cross-check
* :mod:`tdhfb.cli`         configuration, scenarios, result files
"""

__version__ = "0.1.0"

from .grids import Field, Grid, Kernel, fourier_multiplier, frac_sobolev_norm, free_propagator
from .kernels import TakagiFactors, compose, double_angle, hyperbolic_calculus, k_from_sh2, takagi
from .model import (GaussianProfile, KInit, PairState, PhiInit, PhysParams, Potential,
                    State, initial_data, reconstruct_state, scale_potential)

__all__ = [
    "Field", "Grid", "Kernel", "fourier_multiplier", "frac_sobolev_norm", "free_propagator",
    "TakagiFactors", "compose", "double_angle", "hyperbolic_calculus", "k_from_sh2", "takagi",
    "GaussianProfile", "KInit", "PairState", "PhiInit", "PhysParams", "Potential",
    "State", "initial_data", "reconstruct_state", "scale_potential",
    "__version__",
]
