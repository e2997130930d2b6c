"""Pseudospectral laboratory for the intermediate long wave (ILW) and
Benjamin-Ono equations on the torus.

Typical use::

    from ilwlab import make_grid, from_modes, EquationSpec, SolveConfig, solve

    grid = make_grid(1.0, 256)
    u0 = from_modes(grid, {1: 0.05, 2: -0.025j})
    traj = solve(EquationSpec.ilw(2.0), u0, SolveConfig(dt=1e-3, t_final=1.0))
"""

from ilwlab.diagnostics import (
    conservation_report,
    hamiltonian,
    hs_error,
    mass,
    spacetime_l4,
    spacetime_norm,
    strichartz_ratio,
)
from ilwlab.evolution import (
    BlowUpError,
    EquationSpec,
    SolveConfig,
    Trajectory,
    Variant,
    galilean_tau,
    gamma_inverse,
    gamma_transform,
    scale_field,
    scale_transform,
    solve,
)
from ilwlab.fourier import (
    SpectralField,
    TorusGrid,
    from_modes,
    inverse_transform,
    lp_project,
    lp_symbol,
    make_grid,
    sharp_project,
    smooth_project,
    sobolev_norm,
    transform,
)
from ilwlab.gauge import (
    GaugeConsistencyError,
    ResolutionError,
    gauge_W,
    gauge_w,
    gauged_residual,
    nonlinearity_Ndelta,
    reconstruct_check,
)
from ilwlab.multipliers import MultiplierSpec, apply, smoothing_sup, symbol
from ilwlab.spacetime import SpaceTimeField, build_spacetime

__version__ = "0.1.0"

__all__ = [
    "apply",
    "BlowUpError",
    "build_spacetime",
    "conservation_report",
    "EquationSpec",
    "from_modes",
    "galilean_tau",
    "gamma_inverse",
    "gamma_transform",
    "gauge_w",
    "gauge_W",
    "GaugeConsistencyError",
    "gauged_residual",
    "hamiltonian",
    "hs_error",
    "inverse_transform",
    "lp_project",
    "lp_symbol",
    "make_grid",
    "mass",
    "MultiplierSpec",
    "nonlinearity_Ndelta",
    "reconstruct_check",
    "ResolutionError",
    "scale_field",
    "scale_transform",
    "sharp_project",
    "smooth_project",
    "smoothing_sup",
    "sobolev_norm",
    "solve",
    "SolveConfig",
    "spacetime_l4",
    "spacetime_norm",
    "SpaceTimeField",
    "SpectralField",
    "strichartz_ratio",
    "symbol",
    "TorusGrid",
    "Trajectory",
    "transform",
    "Variant",
]
