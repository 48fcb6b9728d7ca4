"""
Dyadic Littlewood-Paley decomposition and Besov/Sobolev norms on a Grid.

The low-frequency cutoff chi is an even C-infinity profile equal to 1 on
|xi| <= 3/4 and to 0 from |xi| >= 5/4 on (hence also on |xi| >= 4/3).  It is
glued with the bridge

    theta(t) = exp(-1/t) for t > 0, 0 otherwise,
    b(t)     = theta(t) / (theta(t) + theta(1 - t)),

so the plateau and the exterior are exact ones and zeros, which is what makes
frequency-localized test functions land in exactly one block.  The annulus
cutoff is phi(xi) = chi(xi/2) - chi(xi), supported in 3/4 <= |xi| <= 5/2.

Blocks: Delta_{-1} multiplies by chi, Delta_j (j >= 0) by phi(2^-j xi),
Delta_j = 0 for j <= -2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Literal

import numpy as np
import scipy.fft as sfft

from .errors import InvalidArgumentError
from .spectral_core import Field, Grid, _lp, apply_multiplier

__all__ = [
    "CHI_INNER",
    "CHI_OUTER",
    "smooth_step",
    "chi",
    "phi",
    "cutoff_eval",
    "CutoffPair",
    "BesovParams",
    "max_block_index",
    "block_multiplier",
    "dyadic_block",
    "low_freq_sum",
    "block_norms",
    "besov_norm",
    "sobolev_norm",
]

CHI_INNER = 0.75
CHI_OUTER = 1.25


def _theta(t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def smooth_step(t) -> np.ndarray:
    """C-infinity step: 0 for t <= 0, 1 for t >= 1, monotone in between."""
    t = np.asarray(t, dtype=np.float64)
    a = _theta(t)
    b = _theta(1.0 - t)
    return a / (a + b)


def chi(xi) -> np.ndarray:
    """Low-frequency cutoff: 1 on |xi| <= 3/4, 0 on |xi| >= 5/4."""
    r = np.abs(np.asarray(xi, dtype=np.float64))
    return 1.0 - smooth_step((r - CHI_INNER) / (CHI_OUTER - CHI_INNER))


def phi(xi) -> np.ndarray:
    """Annulus cutoff chi(xi/2) - chi(xi)."""
    xi = np.asarray(xi, dtype=np.float64)
    return chi(0.5 * xi) - chi(xi)


def cutoff_eval(kind: Literal["chi", "phi"], xi):
    """Evaluate ``chi`` or ``phi``; scalar in, float out."""
    if kind == "chi":
        val = chi(xi)
    elif kind == "phi":
        val = phi(xi)
    else:
        raise InvalidArgumentError(f"unknown cutoff kind {kind!r}")
    return float(val) if np.ndim(val) == 0 else val


@dataclass(frozen=True)
class CutoffPair:
    """The (chi, phi) pair with its ball/annulus supports."""

    ball_radius: float = CHI_OUTER
    annulus: tuple = (CHI_INNER, 2.0 * CHI_OUTER)

    @staticmethod
    def chi(xi):
        return chi(xi)

    @staticmethod
    def phi(xi):
        return phi(xi)


@dataclass(frozen=True)
class BesovParams:
    s: float
    p: float = 2.0
    r: float = 2.0

    def __post_init__(self):
        for name in ("p", "r"):
            v = float(getattr(self, name))
            if not v >= 1.0:
                raise InvalidArgumentError(f"{name} must be >= 1, got {v}")
            object.__setattr__(self, name, v)
        object.__setattr__(self, "s", float(self.s))


def max_block_index(grid: Grid) -> int:
    """Largest j whose annulus can meet the grid spectrum."""
    return max(0, math.ceil(math.log2(grid.nyquist / CHI_INNER)))


@lru_cache(maxsize=16)
def _block_table(grid: Grid) -> dict:
    xi = np.asarray(grid.xi)
    table = {-1: chi(xi)}
    for j in range(0, max_block_index(grid) + 1):
        table[j] = phi(xi / 2.0**j)
    for m in table.values():
        m.flags.writeable = False
    return table


def block_multiplier(grid: Grid, j: int) -> np.ndarray:
    """Cutoff values on the grid frequencies for block ``j`` (FFT order)."""
    if j <= -2:
        return np.zeros(grid.num_points)
    table = _block_table(grid)
    if j in table:
        return table[j]
    return phi(np.asarray(grid.xi) / 2.0**j)


def dyadic_block(u: Field, j: int) -> Field:
    """Delta_j u."""
    return apply_multiplier(u, block_multiplier(u.grid, int(j)))


def low_freq_sum(u: Field, j: int) -> Field:
    """S_j u = sum of Delta_j' u over j' < j, i.e. multiplication by chi(2^-j xi)."""
    j = int(j)
    if j <= -1:
        return Field.zeros(u.grid)
    return apply_multiplier(u, chi(np.asarray(u.grid.xi) / 2.0**j))


def block_norms(u: Field, p: float) -> tuple:
    """Return ``(js, norms)`` with norms[i] = ||Delta_js[i] u||_{L^p}."""
    g = u.grid
    c = u.coeffs
    nyq = g.nyquist_index
    scale = g._phase * g.num_points
    js = np.arange(-1, max_block_index(g) + 1)
    out = np.empty(js.size)
    for i, j in enumerate(js):
        m = block_multiplier(g, int(j))
        if not m.any():
            out[i] = 0.0
            continue
        bc = c * m
        bc[nyq] = 0.0
        out[i] = _lp(sfft.ifft(bc * scale).real, g.dx, p)
    return js, out


def _lr(a: np.ndarray, r: float) -> float:
    if np.isinf(r):
        return float(a.max(initial=0.0))
    top = a.max(initial=0.0)
    if top == 0.0:
        return 0.0
    return float(top * np.sum((a / top) ** r) ** (1.0 / r))


def besov_norm(u: Field, params: BesovParams) -> float:
    """|| (2^{js} ||Delta_j u||_{L^p})_j ||_{l^r} over the blocks the grid supports."""
    js, norms = block_norms(u, params.p)
    return _lr(2.0 ** (js * params.s) * norms, params.r)


def sobolev_norm(u: Field, s: float) -> float:
    """H^s norm (L * sum (1 + xi^2)^s |c_k|^2)^(1/2)."""
    g = u.grid
    w = (1.0 + np.asarray(g.xi) ** 2) ** float(s)
    return float(np.sqrt(g.length * np.sum(w * np.abs(u.coeffs) ** 2)))
