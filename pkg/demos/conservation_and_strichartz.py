"""Invariants of BO and an L^4 Strichartz-type ratio on the torus.

First, the mean, the mass and the Hamiltonian are tracked along an ILW
solution.  Then the linear BO flow of a random datum is windowed in time and
the ratio ||chi(t) e^{tH d_x^2} u0||_{L^4} / ||u0||_{L^2} is computed.
"""

import numpy as np

from ilwlab import (
    EquationSpec,
    SolveConfig,
    TorusGrid,
    Trajectory,
    Variant,
    build_spacetime,
    conservation_report,
    solve,
    strichartz_ratio,
    transform,
)
from ilwlab.experiments import initial_datum
from ilwlab.multipliers import BOPropagator, apply

grid = TorusGrid(1.0, 128)
u0 = initial_datum(grid)
traj = solve(EquationSpec(Variant.ILW, 1.0), u0, SolveConfig(dt=1e-3, t_final=1.0, snapshot_stride=50))
rep = conservation_report(traj)
for key, value in rep.summary().items():
    print(f"{key}: {value:.3e}")

rng = np.random.default_rng(7)
small = TorusGrid(1.0, 32)
x = small.nodes
u = sum(rng.normal() * np.cos(n * x) + rng.normal() * np.sin(n * x) for n in range(1, 9))
datum = transform(u, small)
times = np.arange(101) * 0.01
# the linear flow is a Fourier multiplier, so no time stepping is needed
linear = Trajectory(EquationSpec.bo(), small, times, tuple(apply(BOPropagator(t), datum) for t in times))
print("L4 / L2 ratio:", strichartz_ratio(build_spacetime(linear)))
