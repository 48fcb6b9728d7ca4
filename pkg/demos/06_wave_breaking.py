"""Slope monitor on steep data.

A negative-slope profile steepens under the quadratic transport until the
monitor stops the run at the configured slope floor.
"""

import numpy as np

from fwlab import SolverConfig, bump_profile, derivative, integrate, make_grid

grid = make_grid(4096, 64)
d = derivative(bump_profile(grid).psi, 1)
u0 = d * (-2.0 / np.abs(d.samples).max())

traj = integrate(u0, SolverConfig(end_time=5.0, slope_floor=-10.0, store_every=10))
for t, slope in zip(traj.times, traj.diagnostics["min_slope"]):
    print(f"t = {t:6.3f}   min u_x = {slope:8.3f}")
print("status:", traj.status)
