"""
Initial-data families used to probe well-posedness, non-uniform dependence
and norm inflation.

All carriers use the angular frequency (33/24) * 2^n, which sits in the
middle of the dyadic annulus of block n.  The envelope psi has a compactly
supported, even, non-negative transform (1 on |xi| <= 1/4, 0 on |xi| >= 1/2),
so every modulated bump has spectrum within 1/2 of its carrier.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Any

import numpy as np

from .errors import (
    FrequencyOverflowError,
    InsufficientResolutionError,
    InvalidArgumentError,
    OutOfWindowError,
)
from .littlewood_paley import smooth_step
from .spectral_core import Field, Grid, dealias, derivative, nonlocal_velocity

__all__ = [
    "CARRIER",
    "PSI_PLATEAU",
    "PSI_SUPPORT",
    "PEAKON_AMPLITUDE",
    "PEAKON_SPEED",
    "psi_hat",
    "BumpProfile",
    "DataFamily",
    "bump_profile",
    "carrier_frequency",
    "high_freq_data",
    "low_freq_data",
    "combined_data",
    "localized_wave",
    "cross_wave",
    "lacunary_data",
    "peakon_profile",
    "peakon_field",
    "quadratic_drift",
    "build_family",
]

CARRIER = 33.0 / 24.0
PSI_PLATEAU = 0.25
PSI_SUPPORT = 0.5
PEAKON_AMPLITUDE = 8.0 / 9.0
PEAKON_SPEED = 4.0 / 3.0


def psi_hat(xi) -> np.ndarray:
    """Transform of the bump: 1 on |xi| <= 1/4, 0 on |xi| >= 1/2."""
    r = np.abs(np.asarray(xi, dtype=np.float64))
    return 1.0 - smooth_step((r - PSI_PLATEAU) / (PSI_SUPPORT - PSI_PLATEAU))


def carrier_frequency(n: int) -> float:
    return CARRIER * 2.0**n


@dataclass(frozen=True)
class BumpProfile:
    grid: Grid
    psi: Field

    def psi_hat(self, xi):
        return psi_hat(xi)

    @property
    def peak(self) -> float:
        """psi(0) = (1/2pi) * integral of psi_hat, via the grid Riemann sum."""
        g = self.grid
        return float(np.sum(psi_hat(g.xi)) / g.length)


@dataclass(frozen=True)
class DataFamily:
    """A constructed initial datum with the metadata needed to rebuild it."""

    kind: str
    params: dict = dc_field(default_factory=dict)
    field: Any = None

    def regenerate(self, grid: Grid | None = None) -> "DataFamily":
        return build_family(self.kind, grid or self.field.grid, **self.params)


def _require_bump_resolution(grid: Grid) -> None:
    if grid.half_length < 32:
        raise InsufficientResolutionError(
            f"psi needs M >= 32 to place 16 bins inside |xi| <= 1/2, got M={grid.half_length}"
        )


def _require_fits(grid: Grid, xi_top: float) -> None:
    if not xi_top < grid.nyquist:
        raise FrequencyOverflowError(
            f"frequency {xi_top:g} does not fit below Nyquist {grid.nyquist:g}"
        )


def _psi(grid: Grid) -> Field:
    return Field(grid, coeffs=psi_hat(grid.xi) / grid.length)


def bump_profile(grid: Grid) -> BumpProfile:
    _require_bump_resolution(grid)
    return BumpProfile(grid, _psi(grid))


def _modulated(grid: Grid, amplitude: float, freq: float, kind: str) -> Field:
    _require_bump_resolution(grid)
    _require_fits(grid, freq + PSI_SUPPORT)
    x = np.asarray(grid.x)
    wave = np.sin(freq * x) if kind == "sin" else np.cos(freq * x)
    return Field(grid, samples=amplitude * _psi(grid).samples * wave)


def high_freq_data(grid: Grid, n: int, s: float) -> DataFamily:
    """2^{-ns} psi(x) sin((33/24) 2^n x); n >= 2 so the datum sits in block n."""
    if int(n) != n or n < 2:
        raise InvalidArgumentError(f"high-frequency data needs integer n >= 2, got {n}")
    n = int(n)
    f = _modulated(grid, 2.0 ** (-n * s), carrier_frequency(n), "sin")
    return DataFamily("high_freq", {"n": n, "s": float(s)}, f)


def low_freq_data(grid: Grid, n: int) -> DataFamily:
    """(24/33) 2^{-n} psi(x)."""
    _require_bump_resolution(grid)
    n = int(n)
    f = Field(grid, coeffs=(2.0**-n / CARRIER) * psi_hat(grid.xi) / grid.length)
    return DataFamily("low_freq", {"n": n}, f)


def combined_data(grid: Grid, n: int, s: float) -> DataFamily:
    """High plus low frequency datum w^n_0 + v^n_0."""
    w = high_freq_data(grid, n, s).field
    v = low_freq_data(grid, n).field
    return DataFamily("combined", {"n": int(n), "s": float(s)}, w + v)


def localized_wave(grid: Grid, n: int) -> DataFamily:
    """g_n = psi(x) cos((33/24) 2^n x)."""
    n = int(n)
    f = _modulated(grid, 1.0, carrier_frequency(n), "cos")
    return DataFamily("localized", {"n": n}, f)


def cross_wave(grid: Grid, l: int, m: int, n: int, sign: int = 1) -> DataFamily:
    """psi(x) cos((33/24)(2^{ln} + sign * 2^{lm}) x), with 0 <= m < n."""
    if not 0 <= m < n:
        raise InvalidArgumentError("cross wave needs 0 <= m < n")
    if sign not in (1, -1):
        raise InvalidArgumentError("sign must be +1 or -1")
    freq = CARRIER * (2.0 ** (l * n) + sign * 2.0 ** (l * m))
    f = _modulated(grid, 1.0, freq, "cos")
    return DataFamily("cross", {"l": int(l), "m": int(m), "n": int(n), "sign": int(sign)}, f)


def lacunary_data(grid: Grid, l: int, sigma: float, n_terms: int, p: float = np.inf) -> DataFamily:
    """Truncated lacunary series sum_{n < n_terms} 2^{-ln sigma} psi(x) cos((33/24) 2^{ln} x).

    Every omitted term has B^theta_{p,inf} size of order 2^{-l n (sigma - theta)}
    (theta <= sigma), so the tail beyond ``n_terms`` is geometric.
    """
    if int(l) != l or l < 4:
        raise InvalidArgumentError(f"lacunary data needs integer l >= 4, got {l}")
    if int(n_terms) != n_terms or n_terms < 1:
        raise InvalidArgumentError("n_terms must be a positive integer")
    if not sigma > 3.0 + 1.0 / p:
        raise InvalidArgumentError(f"sigma must exceed 3 + 1/p = {3.0 + 1.0 / p:g}")
    l, n_terms = int(l), int(n_terms)
    _require_bump_resolution(grid)
    _require_fits(grid, carrier_frequency(l * (n_terms - 1)) + PSI_SUPPORT)
    x = np.asarray(grid.x)
    psi = _psi(grid).samples
    total = np.zeros(grid.num_points)
    for n in range(n_terms):
        total += 2.0 ** (-l * n * sigma) * np.cos(carrier_frequency(l * n) * x)
    f = Field(grid, samples=psi * total)
    params = {"l": l, "sigma": float(sigma), "n_terms": n_terms, "p": float(p)}
    return DataFamily("lacunary", params, f)


def peakon_profile(grid: Grid, center: float) -> np.ndarray:
    """Periodized e^{-|x - center|/2} on the grid torus (closed form)."""
    L = grid.length
    y = np.mod(np.asarray(grid.x) - center + L / 2.0, L) - L / 2.0
    return np.cosh((L / 2.0 - np.abs(y)) / 2.0) / np.sinh(L / 4.0)


def peakon_field(grid: Grid, t: float) -> DataFamily:
    """Exact peaked travelling wave of u_t + (3/2) u u_x = d_x (1 - d_xx)^{-1} u.

    For this sign of the nonlocal term the wave is a trough of depth 8/9
    moving left at speed 4/3,

        u(t, x) = -(8/9) exp(-|x + (4/3) t| / 2),

    the reflection u -> -u(t, -x) of the classical right-moving crest
    (8/9) exp(-|x - (4/3) t| / 2), which solves the equation with the
    opposite sign on the nonlocal term.
    """
    t = float(t)
    if not abs(PEAKON_SPEED * t) < np.pi * grid.half_length / 2.0:
        raise OutOfWindowError("peakon crest would leave the central half of the torus")
    f = Field(grid, samples=-PEAKON_AMPLITUDE * peakon_profile(grid, -PEAKON_SPEED * t))
    return DataFamily("peakon", {"t": t}, f)


def quadratic_drift(u0: Field, full: bool = False) -> Field:
    """-(3/2) u0 d_x u0 (dealiased); with ``full`` also add the nonlocal term.

    ``full=True`` gives the first-order tendency -(3/2) u0 u0_x +
    (1 - d_xx)^{-1} d_x u0, which equals the solver right-hand side at u0.
    """
    z = dealias(u0 * derivative(u0, 1)) * -1.5
    if full:
        return z + nonlocal_velocity(u0)
    return z


_BUILDERS = {
    "high_freq": high_freq_data,
    "low_freq": low_freq_data,
    "combined": combined_data,
    "localized": localized_wave,
    "cross": cross_wave,
    "lacunary": lacunary_data,
    "peakon": peakon_field,
}


def build_family(kind: str, grid: Grid, **params) -> DataFamily:
    try:
        builder = _BUILDERS[kind]
    except KeyError:
        raise InvalidArgumentError(f"unknown data family {kind!r}") from None
    return builder(grid, **params)
