"""Picard iteration over linear transport problems.

Starting from u^0 = 0, each iterate solves
    u^{n+1}_t + (3/2) u^n u^{n+1}_x = (1 - d_xx)^{-1} d_x u^n.
Inside the smallness horizon the successive differences shrink
geometrically and the limit agrees with the direct nonlinear solve.
"""

from fwlab import BesovParams, SolverConfig, bump_profile, make_grid, picard_differences, picard_horizon, picard_solve

grid = make_grid(4096, 64)
u0 = bump_profile(grid).psi * 2.0
bs = BesovParams(2, 2, 2)
cfg = SolverConfig(end_time=1.0, besov=bs)
print(f"horizon 1/(4||u0||) = {picard_horizon(u0, cfg):.3f}, running to T = {cfg.end_time}")

iterates = picard_solve(u0, cfg, max_iters=8)
d = picard_differences(iterates, BesovParams(1, 2, 2))
for n in range(len(d)):
    ratio = "" if n == 0 else f"   ratio {d[n] / d[n - 1]:.3f}"
    print(f"d_{n} = {d[n]:.3e}{ratio}")
