"""
Periodic 1-D grids, Fourier analysis/synthesis and Fourier multipliers.

The real line is replaced by the torus [-pi*M, pi*M) of length L = 2*pi*M,
sampled at N equispaced points.  Spectral index k corresponds to the
angular frequency xi_k = k / M, so ``exp(1j * xi_k * x)`` is periodic on the
torus.  Coefficients follow the Fourier-series convention

    c_k = (1/L) * integral u(x) exp(-1j * xi_k * x) dx,
    u(x) = sum_k c_k exp(1j * xi_k * x),

which makes a continuum multiplier m(xi) act on ``c_k`` as ``m(xi_k) * c_k``
and gives ``c_k ~= u_hat(xi_k) / L`` for well-localized u.

Coefficient arrays are stored in FFT order (k = 0, 1, ..., N/2-1, -N/2, ..., -1);
``Grid.k`` and ``Grid.xi`` use the same order.  ``Grid.frequencies`` is the
ascending view.  After every multiplier application the k = -N/2 (Nyquist)
bin is set to zero so real fields stay real and odd multipliers stay odd.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Literal

import numpy as np
import scipy.fft as sfft

from .errors import InvalidArgumentError, NumericFaultError

__all__ = [
    "Grid",
    "Field",
    "make_grid",
    "transform",
    "derivative",
    "apply_multiplier",
    "nonlocal_multiplier",
    "nonlocal_velocity",
    "lp_norm",
    "dealias",
    "spectral_tail_fraction",
    "translate",
]


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on [-pi*M, pi*M) with N points.

    Attributes
    ----------
    num_points : int
        N, a power of two.
    half_length : float
        M; the period is L = 2*pi*M and xi_k = k/M.
    """

    num_points: int
    half_length: float

    @property
    def length(self) -> float:
        return 2.0 * np.pi * self.half_length

    @property
    def dx(self) -> float:
        return self.length / self.num_points

    @property
    def nyquist(self) -> float:
        """Largest representable angular frequency N/(2M)."""
        return self.num_points / (2.0 * self.half_length)

    @cached_property
    def x(self) -> np.ndarray:
        return _readonly(-np.pi * self.half_length + self.dx * np.arange(self.num_points))

    @cached_property
    def k(self) -> np.ndarray:
        """Integer spectral indices in FFT order."""
        n = self.num_points
        return _readonly(np.fft.fftfreq(n, d=1.0 / n).astype(np.int64))

    @cached_property
    def xi(self) -> np.ndarray:
        """Angular frequencies k/M in FFT order."""
        return _readonly(self.k / self.half_length)

    @cached_property
    def frequencies(self) -> np.ndarray:
        """Angular frequencies in ascending order, k = -N/2 ... N/2-1."""
        return _readonly(np.fft.fftshift(self.xi))

    @cached_property
    def nyquist_index(self) -> int:
        return self.num_points // 2

    @cached_property
    def _phase(self) -> np.ndarray:
        # exp(-1j*xi_k*x_0) with x_0 = -pi*M equals (-1)^k
        return _readonly(np.where(self.k % 2 == 0, 1.0, -1.0))

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        """True on the modes kept by the 2/3 rule (|k| <= N/3)."""
        return _readonly(3 * np.abs(self.k) <= self.num_points)

    def index_of(self, xi: float) -> int:
        """FFT-order position of the bin nearest to angular frequency ``xi``."""
        kk = int(round(xi * self.half_length))
        return kk % self.num_points


def make_grid(num_points: int, half_length: float) -> Grid:
    """Build a :class:`Grid`, validating N (power of two, >= 16) and M (>= 1)."""
    if isinstance(num_points, bool) or int(num_points) != num_points:
        raise InvalidArgumentError(f"num_points must be an integer, got {num_points!r}")
    num_points = int(num_points)
    if num_points < 16 or num_points & (num_points - 1):
        raise InvalidArgumentError(f"num_points must be a power of two >= 16, got {num_points}")
    half_length = float(half_length)
    if not np.isfinite(half_length) or half_length < 1.0:
        raise InvalidArgumentError(f"half_length must be >= 1, got {half_length}")
    return Grid(num_points, half_length)


class Field:
    """A real function on a :class:`Grid`, held as samples and/or coefficients.

    Whichever representation was not supplied is computed on first access and
    cached.  Both arrays are read-only; operations return new fields.
    """

    __slots__ = ("grid", "_samples", "_coeffs")

    def __init__(self, grid: Grid, samples=None, coeffs=None):
        if (samples is None) == (coeffs is None):
            raise InvalidArgumentError("supply exactly one of samples or coeffs")
        self.grid = grid
        self._samples = None
        self._coeffs = None
        if samples is not None:
            a = np.array(samples, dtype=np.float64)
            self._check(a)
            self._samples = _readonly(a)
        else:
            c = np.array(coeffs, dtype=np.complex128)
            self._check(c)
            self._coeffs = _readonly(c)

    def _check(self, a: np.ndarray) -> None:
        if a.shape != (self.grid.num_points,):
            raise InvalidArgumentError(
                f"expected shape ({self.grid.num_points},), got {a.shape}"
            )
        if not np.all(np.isfinite(a)):
            raise NumericFaultError("non-finite values in field data")

    @classmethod
    def from_function(cls, grid: Grid, func: Callable[[np.ndarray], np.ndarray]) -> "Field":
        return cls(grid, samples=func(np.asarray(grid.x)))

    @classmethod
    def zeros(cls, grid: Grid) -> "Field":
        return cls(grid, samples=np.zeros(grid.num_points))

    @property
    def samples(self) -> np.ndarray:
        if self._samples is None:
            self._samples = _readonly(synthesize(self.grid, self._coeffs))
        return self._samples

    @property
    def coeffs(self) -> np.ndarray:
        if self._coeffs is None:
            self._coeffs = _readonly(analyze(self.grid, self._samples))
        return self._coeffs

    def mode(self, k: int) -> complex:
        """Coefficient of spectral index ``k`` (any sign)."""
        return complex(self.coeffs[k % self.grid.num_points])

    # arithmetic on samples keeps call sites short
    def __add__(self, other):
        return Field(self.grid, samples=self.samples + _values(other))

    __radd__ = __add__

    def __sub__(self, other):
        return Field(self.grid, samples=self.samples - _values(other))

    def __rsub__(self, other):
        return Field(self.grid, samples=_values(other) - self.samples)

    def __mul__(self, other):
        return Field(self.grid, samples=self.samples * _values(other))

    __rmul__ = __mul__

    def __neg__(self):
        return Field(self.grid, samples=-self.samples)

    def __repr__(self) -> str:
        return f"Field(N={self.grid.num_points}, M={self.grid.half_length})"


def _values(other):
    if isinstance(other, Field):
        return other.samples
    return other


def analyze(grid: Grid, samples: np.ndarray) -> np.ndarray:
    """Samples -> Fourier-series coefficients (FFT order, 1/L convention)."""
    return sfft.fft(samples) * (grid._phase / grid.num_points)


def synthesize(grid: Grid, coeffs: np.ndarray) -> np.ndarray:
    """Coefficients -> real samples; exact inverse of :func:`analyze`."""
    return sfft.ifft(coeffs * (grid._phase * grid.num_points)).real


def transform(field: Field, direction: Literal["analysis", "synthesis"]) -> Field:
    """Populate the requested representation of ``field``.

    ``analysis`` computes coefficients from samples and ``synthesis`` the
    reverse.  The returned field carries only the freshly computed
    representation, so a synthesis of an analysis is a genuine round trip.
    """
    if direction == "analysis":
        return Field(field.grid, coeffs=analyze(field.grid, field.samples))
    if direction == "synthesis":
        return Field(field.grid, samples=synthesize(field.grid, field.coeffs))
    raise InvalidArgumentError(f"unknown direction {direction!r}")


def apply_multiplier(field: Field, multiplier: np.ndarray) -> Field:
    """Multiply coefficients by ``multiplier`` (FFT order) and zero Nyquist."""
    c = field.coeffs * multiplier
    c[field.grid.nyquist_index] = 0.0
    return Field(field.grid, coeffs=c)


def derivative(field: Field, order: int = 1) -> Field:
    """Spectral derivative d^order/dx^order, order in 1..4."""
    if int(order) != order or not 1 <= order <= 4:
        raise InvalidArgumentError(f"derivative order must be 1..4, got {order}")
    return apply_multiplier(field, (1j * field.grid.xi) ** int(order))


def nonlocal_multiplier(xi: np.ndarray) -> np.ndarray:
    """Symbol of (1 - d_xx)^{-1} d_x, i.e. i*xi / (1 + xi^2)."""
    xi = np.asarray(xi, dtype=np.float64)
    return 1j * xi / (1.0 + xi * xi)


def nonlocal_velocity(field: Field) -> Field:
    """Apply (1 - d_xx)^{-1} d_x, equivalently convolution with d_x of e^{-|x|}/2."""
    return apply_multiplier(field, nonlocal_multiplier(field.grid.xi))


def lp_norm(field: Field, p: float) -> float:
    """Discrete L^p norm (dx * sum |u|^p)^(1/p); max |u| for p = inf."""
    p = float(p)
    if not p >= 1.0:
        raise InvalidArgumentError(f"p must be >= 1, got {p}")
    return _lp(field.samples, field.grid.dx, p)


def _lp(values: np.ndarray, dx: float, p: float) -> float:
    a = np.abs(values)
    if np.isinf(p):
        return float(a.max(initial=0.0))
    if p == 1.0:
        return float(dx * a.sum())
    if p == 2.0:
        return float(np.sqrt(dx * np.dot(a, a)))
    top = a.max(initial=0.0)
    if top == 0.0:
        return 0.0
    # scale first so large p cannot overflow
    return float(top * (dx * np.sum((a / top) ** p)) ** (1.0 / p))


def dealias(field: Field) -> Field:
    """2/3 rule: zero every mode with |k| > N/3."""
    return apply_multiplier(field, field.grid.dealias_mask)


def spectral_tail_fraction(field: Field, cutoff_fraction: float) -> float:
    """Share of spectral energy in modes with |k| > cutoff_fraction * N/2."""
    if not 0.0 < cutoff_fraction < 1.0:
        raise InvalidArgumentError("cutoff_fraction must lie in (0, 1)")
    energy = np.abs(field.coeffs) ** 2
    total = energy.sum()
    if total == 0.0:
        return 0.0
    tail = energy[np.abs(field.grid.k) > cutoff_fraction * field.grid.num_points / 2].sum()
    return float(tail / total)


def translate(field: Field, distance: float) -> Field:
    """Shift u(x) -> u(x - distance) by a spectral phase."""
    g = field.grid
    if float(distance / g.dx).is_integer():
        return Field(g, samples=np.roll(field.samples, int(distance / g.dx)))
    return apply_multiplier(field, np.exp(-1j * g.xi * distance))
