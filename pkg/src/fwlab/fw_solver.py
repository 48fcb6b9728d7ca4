"""
Pseudospectral time integration of the nonlocal Fornberg-Whitham equation

    u_t + (3/2) u u_x = (1 - d_xx)^{-1} d_x u,

its Picard iteration over linear transport problems, and trajectory
diagnostics.  Time stepping is classical RK4 in spectral space (real FFTs);
the quadratic term is dealiased with the 2/3 rule.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from typing import Literal, Optional

import numpy as np
import scipy.fft as sfft

from .errors import (
    DivergenceDetectedError,
    InvalidArgumentError,
    NumericFaultError,
)
from .littlewood_paley import BesovParams, besov_norm
from .spectral_core import Field, Grid, _lp, spectral_tail_fraction

__all__ = [
    "SolverConfig",
    "Trajectory",
    "rhs_eval",
    "integrate",
    "linear_transport_solve",
    "picard_horizon",
    "picard_solve",
    "picard_differences",
    "diagnostics",
]


@dataclass(frozen=True)
class SolverConfig:
    """Time-stepping options.

    ``dt_mode='cfl'`` picks dt = cfl_number * dx / (1.5 max|u0| + 0.5), then
    shrinks it so that an integer number of strides lands exactly on
    ``end_time``.  ``besov`` (optional) adds a Besov column to the stored
    diagnostics and sets the norm used by the Picard horizon.
    """

    end_time: float
    dt_mode: Literal["fixed", "cfl"] = "cfl"
    dt: Optional[float] = None
    cfl_number: float = 0.4
    dealias_on: bool = True
    store_every: int = 1
    slope_floor: float = -50.0
    besov: Optional[BesovParams] = None
    horizon_constant: float = 1.0

    def __post_init__(self):
        if not self.end_time > 0:
            raise InvalidArgumentError("end_time must be positive")
        if self.dt_mode == "fixed":
            if self.dt is None or not self.dt > 0:
                raise InvalidArgumentError("fixed stepping needs dt > 0")
        elif self.dt_mode == "cfl":
            if not 0.0 < self.cfl_number < 1.0:
                raise InvalidArgumentError("cfl_number must lie in (0, 1)")
        else:
            raise InvalidArgumentError(f"unknown dt_mode {self.dt_mode!r}")
        if int(self.store_every) != self.store_every or self.store_every < 1:
            raise InvalidArgumentError("store_every must be a positive integer")

    def step_plan(self, u0_max: float, dx: float) -> tuple:
        """Return ``(dt, n_steps)`` with n_steps a multiple of store_every."""
        if self.dt_mode == "fixed":
            dt0 = self.dt
        else:
            dt0 = self.cfl_number * dx / (1.5 * u0_max + 0.5)
        stride = int(self.store_every)
        n = max(1, math.ceil(self.end_time / dt0 - 1e-9))
        n = stride * math.ceil(n / stride)
        return self.end_time / n, n


@dataclass
class Trajectory:
    """Stored states of one time integration.

    ``data`` holds samples row-wise (one row per stored time).  ``status`` is
    ``'complete'`` or ``'breaking'``; on breaking the trajectory stops at the
    first stored step whose minimum slope fell below the configured floor.
    """

    grid: Grid
    times: np.ndarray
    data: np.ndarray
    dt: float
    status: str = "complete"
    resolved: bool = True
    diagnostics: dict = dc_field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.times)

    def state(self, i: int) -> Field:
        return Field(self.grid, samples=self.data[i])

    @property
    def states(self) -> list:
        return [self.state(i) for i in range(len(self))]

    @property
    def final(self) -> Field:
        return self.state(len(self) - 1)

    @property
    def breaking(self) -> bool:
        return self.status == "breaking"


class _Kernel:
    """Real-FFT operators for one grid."""

    def __init__(self, grid: Grid):
        n = grid.num_points
        k = np.arange(n // 2 + 1)
        xi = k / grid.half_length
        self.n = n
        self.ik = 1j * xi
        self.ik[-1] = 0.0
        self.nonlocal_symbol = 1j * xi / (1.0 + xi * xi)
        self.nonlocal_symbol[-1] = 0.0
        self.mask = (3 * k <= n).astype(np.float64)
        self.mask[-1] = 0.0
        self.nyq = np.ones(k.size)
        self.nyq[-1] = 0.0

    def fwd(self, u):
        return sfft.rfft(u)

    def inv(self, uh):
        return sfft.irfft(uh, n=self.n)

    def advect(self, v, fh, dealias_on=True):
        """Spectrum of v * d_x f."""
        ph = sfft.rfft(v * self.inv(self.ik * fh))
        return ph * (self.mask if dealias_on else self.nyq)

    def rhs(self, uh, dealias_on=True):
        return -1.5 * self.advect(self.inv(uh), uh, dealias_on) + self.nonlocal_symbol * uh

    def slope_min(self, uh) -> float:
        return float(self.inv(self.ik * uh).min())


@lru_cache(maxsize=8)
def _kernel(grid: Grid) -> _Kernel:
    return _Kernel(grid)


def rhs_eval(u: Field, dealias_on: bool = True) -> Field:
    """-(3/2) dealias(u u_x) + (1 - d_xx)^{-1} d_x u."""
    ker = _kernel(u.grid)
    out = ker.inv(ker.rhs(ker.fwd(u.samples), dealias_on))
    if not np.all(np.isfinite(out)):
        raise NumericFaultError("non-finite right-hand side")
    return Field(u.grid, samples=out)


def _rk4(f, y, dt):
    k1 = f(y, 0)
    k2 = f(y + 0.5 * dt * k1, 1)
    k3 = f(y + 0.5 * dt * k2, 1)
    k4 = f(y + dt * k3, 2)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _stored_diagnostics(grid, data, ker, besov):
    diag = {
        "l2_norm": np.array([_lp(row, grid.dx, 2.0) for row in data]),
        "min_slope": np.array([ker.slope_min(ker.fwd(row)) for row in data]),
    }
    if besov is not None:
        diag["besov_norm"] = np.array(
            [besov_norm(Field(grid, samples=row), besov) for row in data]
        )
    return diag


_quiet = np.errstate(over="ignore", invalid="ignore")  # blow-up is checked explicitly


@_quiet
def integrate(u0: Field, config: SolverConfig) -> Trajectory:
    """RK4 solve of the nonlocal equation from u0 up to ``config.end_time``."""
    grid = u0.grid
    ker = _kernel(grid)
    resolved = spectral_tail_fraction(u0, 0.9) < 1e-6
    if not resolved:
        warnings.warn("initial data not resolved (spectral tail >= 1e-6)", stacklevel=2)
    dt, n_steps = config.step_plan(float(np.abs(u0.samples).max()), grid.dx)
    stride = int(config.store_every)
    uh = ker.fwd(u0.samples)
    rows = [np.array(u0.samples)]
    status = "complete"

    def f(y, _stage):
        return ker.rhs(y, config.dealias_on)

    for step in range(1, n_steps + 1):
        uh = _rk4(f, uh, dt)
        if not np.all(np.isfinite(uh)):
            raise NumericFaultError(f"non-finite state at step {step}")
        broke = ker.slope_min(uh) < config.slope_floor
        if step % stride == 0 or broke:
            rows.append(ker.inv(uh))
        if broke:
            status = "breaking"
            break
    data = np.array(rows)
    times = np.arange(len(rows)) * stride * dt
    if status == "breaking":
        times[-1] = step * dt
    traj = Trajectory(grid, times, data, dt, status, resolved)
    traj.diagnostics = _stored_diagnostics(grid, data, ker, config.besov)
    return traj


def _check_aligned(velocity: Trajectory, forcing: Trajectory, f0: Field) -> None:
    if velocity.grid != f0.grid or forcing.grid != f0.grid:
        raise InvalidArgumentError("trajectories and initial field must share a grid")
    if len(velocity) != len(forcing) or not np.array_equal(velocity.times, forcing.times):
        raise InvalidArgumentError("velocity and forcing must share their time samples")
    if len(velocity) < 2:
        raise InvalidArgumentError("need at least two stored times")
    steps = np.diff(velocity.times)
    if not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
        raise InvalidArgumentError("time samples must be uniform")


@_quiet
def linear_transport_solve(
    velocity: Trajectory, forcing: Trajectory, f0: Field, config: SolverConfig | None = None
) -> Trajectory:
    """Solve f_t + (3/2) v f_x = g on the stored time grid of ``velocity``.

    One RK4 step per stored interval; v and g at the half step are linear
    interpolants of the neighbouring stored states.
    """
    _check_aligned(velocity, forcing, f0)
    grid = f0.grid
    ker = _kernel(grid)
    dealias_on = True if config is None else config.dealias_on
    dt = float(velocity.times[1] - velocity.times[0])
    gh_all = sfft.rfft(forcing.data, axis=1) * ker.nyq
    fh = ker.fwd(f0.samples)
    rows = [np.array(f0.samples)]
    for i in range(len(velocity) - 1):
        vs = (velocity.data[i], 0.5 * (velocity.data[i] + velocity.data[i + 1]), velocity.data[i + 1])
        gs = (gh_all[i], 0.5 * (gh_all[i] + gh_all[i + 1]), gh_all[i + 1])

        def f(y, stage):
            return -1.5 * ker.advect(vs[stage], y, dealias_on) + gs[stage]

        fh = _rk4(f, fh, dt)
        if not np.all(np.isfinite(fh)):
            raise NumericFaultError(f"non-finite transport state at step {i + 1}")
        rows.append(ker.inv(fh))
    data = np.array(rows)
    traj = Trajectory(grid, np.array(velocity.times, dtype=float), data, dt)
    traj.diagnostics = _stored_diagnostics(grid, data, ker, None if config is None else config.besov)
    return traj


def picard_horizon(u0: Field, config: SolverConfig) -> float:
    """Largest admissible end time 1 / (4 C ||u0||) for the Picard scheme."""
    params = config.besov or BesovParams(2.0, 2.0, 2.0)
    norm = besov_norm(u0, params)
    if norm == 0.0:
        return math.inf
    return 1.0 / (4.0 * config.horizon_constant * norm)


def _zero_trajectory(grid: Grid, times: np.ndarray, dt: float) -> Trajectory:
    return Trajectory(grid, times, np.zeros((len(times), grid.num_points)), dt)


def picard_differences(iterates: list, params: BesovParams | None = None) -> np.ndarray:
    """sup_t ||u^{n+1}(t) - u^n(t)|| for consecutive iterates.

    With ``params`` the norm is that Besov norm, otherwise the L^2 norm.
    """
    out = []
    for a, b in zip(iterates[:-1], iterates[1:]):
        diff = b.data - a.data
        if params is None:
            vals = [_lp(row, a.grid.dx, 2.0) for row in diff]
        else:
            vals = [besov_norm(Field(a.grid, samples=row), params) for row in diff]
        out.append(max(vals))
    return np.array(out)


def picard_solve(u0: Field, config: SolverConfig, max_iters: int) -> list:
    """Iterates u^0 = 0, u^{n+1}_t + (3/2) u^n u^{n+1}_x = (1 - d_xx)^{-1} d_x u^n.

    Returns ``[u^0, ..., u^max_iters]`` as trajectories on one time grid.
    Raises :class:`DivergenceDetectedError` when the L^2 distance between
    successive iterates grows three times in a row.
    """
    if int(max_iters) != max_iters or max_iters < 1:
        raise InvalidArgumentError("max_iters must be a positive integer")
    horizon = picard_horizon(u0, config)
    if config.end_time > horizon:
        raise InvalidArgumentError(
            f"end_time {config.end_time:g} exceeds the smallness horizon {horizon:g}"
        )
    grid = u0.grid
    ker = _kernel(grid)
    dt, n_steps = config.step_plan(float(np.abs(u0.samples).max()), grid.dx)
    times = np.arange(n_steps + 1) * dt
    iterates = [_zero_trajectory(grid, times, dt)]
    scale = max(_lp(u0.samples, grid.dx, 2.0), 1e-300)
    growth, prev = 0, None
    for _ in range(int(max_iters)):
        u = iterates[-1]
        forcing_data = sfft.irfft(sfft.rfft(u.data, axis=1) * ker.nonlocal_symbol, n=grid.num_points, axis=1)
        forcing = Trajectory(grid, times, forcing_data, dt)
        nxt = linear_transport_solve(u, forcing, u0, config)
        iterates.append(nxt)
        d = max(_lp(row, grid.dx, 2.0) for row in nxt.data - u.data)
        if prev is not None and d > prev and d > 1e-10 * scale:
            growth += 1
            if growth >= 3:
                raise DivergenceDetectedError("Picard differences grew three times in a row")
        else:
            growth = 0
        prev = d
    return iterates


def diagnostics(traj: Trajectory, besov: BesovParams) -> dict:
    """Per stored time: l2_norm, besov_norm, min_slope, tail_fraction (column arrays)."""
    if len(traj) == 0:
        raise InvalidArgumentError("empty trajectory")
    ker = _kernel(traj.grid)
    states = traj.states
    return {
        "time": np.array(traj.times, dtype=float),
        "l2_norm": np.array([_lp(row, traj.grid.dx, 2.0) for row in traj.data]),
        "besov_norm": np.array([besov_norm(s, besov) for s in states]),
        "min_slope": np.array([ker.slope_min(ker.fwd(row)) for row in traj.data]),
        "tail_fraction": np.array([spectral_tail_fraction(s, 0.9) for s in states]),
    }
