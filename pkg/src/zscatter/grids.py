"""Periodic box, spectral fields, Fourier multipliers and norms.

The box is [-L, L)^dim with N points per axis, so the frequency lattice is
xi = (pi/L) * k for integer k in [-N/2, N/2)^dim, stored in FFT order (the
entry at index 0 is exactly xi = 0).

Transform normalization
-----------------------
``to_frequency`` approximates the unitary continuum transform

    u_hat(xi) = (2*pi)^(-dim/2) * integral( u(x) exp(-i xi.x) dx )

by a Riemann sum with uniform weight ``cell_volume``.  The inverse uses the
frequency-cell weight (pi/L)^dim.  With this pairing Parseval is exact on the
lattice: the L2 norm computed with ``cell_volume`` weights in physical space
equals the L2 norm computed with (pi/L)^dim weights in frequency space, and
the round trip is exact to rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Callable, Sequence

import numpy as np
import scipy.fft as _fft

PHYSICAL = "physical"
FREQUENCY = "frequency"

# FFT worker count.  1 keeps results bitwise deterministic; >1 is still
# deterministic to ~1e-13 relative.
_fft_workers = 1


def set_fft_workers(n: int) -> None:
    global _fft_workers
    _fft_workers = int(n)


class SpaceError(ValueError):
    """Raised on a physical/frequency tag mismatch."""


class SymbolError(ValueError):
    """Raised when a multiplier symbol is non-finite on the lattice."""


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on [-L, L)^dim.

    Parameters
    ----------
    dim : int
        Space dimension, 2 or 3.
    points_per_axis : int
        N, a power of two >= 8.
    box_half_width : float
        L > 0.
    """

    dim: int
    points_per_axis: int
    box_half_width: float

    def __post_init__(self) -> None:
        if self.dim not in (2, 3):
            raise ValueError(f"dim must be 2 or 3, got {self.dim}")
        if self.points_per_axis < 8 or not _is_power_of_two(self.points_per_axis):
            raise ValueError(
                f"points_per_axis must be a power of two >= 8, got {self.points_per_axis}"
            )
        if not (self.box_half_width > 0):
            raise ValueError(f"box_half_width must be positive, got {self.box_half_width}")

    @property
    def cell_volume(self) -> float:
        return (2.0 * self.box_half_width / self.points_per_axis) ** self.dim

    @property
    def freq_cell_volume(self) -> float:
        return (math.pi / self.box_half_width) ** self.dim

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.points_per_axis,) * self.dim

    @property
    def npoints(self) -> int:
        return self.points_per_axis ** self.dim

    @property
    def dx(self) -> float:
        return 2.0 * self.box_half_width / self.points_per_axis

    @property
    def xi_max(self) -> float:
        """Largest resolved frequency magnitude per axis, pi*N/(2L)."""
        return math.pi * self.points_per_axis / (2.0 * self.box_half_width)

    @cached_property
    def x_axis(self) -> np.ndarray:
        N, L = self.points_per_axis, self.box_half_width
        return -L + (2.0 * L / N) * np.arange(N)

    @cached_property
    def xi_axis(self) -> np.ndarray:
        # FFT ordering: 0, 1, ..., N/2-1, -N/2, ..., -1 times pi/L
        N, L = self.points_per_axis, self.box_half_width
        return (math.pi / L) * np.fft.fftfreq(N, d=1.0 / N)

    def _bcast(self, axis_values: np.ndarray) -> tuple[np.ndarray, ...]:
        out = []
        for i in range(self.dim):
            shape = [1] * self.dim
            shape[i] = self.points_per_axis
            out.append(axis_values.reshape(shape))
        return tuple(out)

    @cached_property
    def x_mesh(self) -> tuple[np.ndarray, ...]:
        """Per-axis physical coordinates, broadcastable to the grid shape."""
        return self._bcast(self.x_axis)

    @cached_property
    def xi_mesh(self) -> tuple[np.ndarray, ...]:
        """Per-axis frequencies in FFT order, broadcastable to the grid shape."""
        return self._bcast(self.xi_axis)

    @cached_property
    def radius2(self) -> np.ndarray:
        """|x|^2 on the full grid."""
        r2 = np.zeros(self.shape)
        for xi in self.x_mesh:
            r2 = r2 + xi ** 2
        return r2

    @cached_property
    def k2(self) -> np.ndarray:
        """|xi|^2 on the full grid, FFT order."""
        out = np.zeros(self.shape)
        for xi in self.xi_mesh:
            out = out + xi ** 2
        return out

    @cached_property
    def omega(self) -> np.ndarray:
        """|xi| on the full grid (symbol of (-Laplacian)^(1/2))."""
        return np.sqrt(self.k2)

    @cached_property
    def phase(self) -> np.ndarray:
        # exp(-i xi_k . x_j) = (-1)^(sum k_i) * exp(-2 pi i k.j / N); this array
        # carries the (-1)^k factors that tie the FFT to the box [-L, L).
        N = self.points_per_axis
        kint = np.rint(np.fft.fftfreq(N, d=1.0 / N)).astype(np.int64)
        sign = np.where(kint % 2 == 0, 1.0, -1.0)
        out = np.ones(self.shape)
        for s in self._bcast(sign):
            out = out * s
        return out

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        """2/3-rule mask: keep |k| <= N/3 per axis (bool array, FFT order)."""
        N = self.points_per_axis
        kint = np.rint(np.fft.fftfreq(N, d=1.0 / N)).astype(np.int64)
        keep = np.abs(kint) <= N // 3
        out = np.ones(self.shape, dtype=bool)
        for s in self._bcast(keep):
            out = out & s
        return out

    @cached_property
    def shell_mask(self) -> np.ndarray:
        """Outer 10% shell: points with max_i |x_i| >= 0.9 L."""
        L = self.box_half_width
        out = np.zeros(self.shape, dtype=bool)
        for xi in self.x_mesh:
            out = out | (np.abs(xi) >= 0.9 * L)
        return out

    # -- construction helpers ------------------------------------------------

    def field(self, values: np.ndarray, space: str = PHYSICAL) -> "Field":
        return Field(self, values, space)

    def field_from_function(self, fn: Callable[..., np.ndarray]) -> "Field":
        """Sample fn(x1, ..., xdim) on the grid (physical space)."""
        return Field(self, np.asarray(fn(*self.x_mesh)) + np.zeros(self.shape), PHYSICAL)

    def zero_field(self, real: bool = False) -> "Field":
        dtype = np.float64 if real else np.complex128
        return Field(self, np.zeros(self.shape, dtype=dtype), PHYSICAL)


@dataclass(frozen=True)
class Field:
    """Scalar field on a Grid, tagged physical- or frequency-space.

    Values are frozen after construction; real fields are stored with a real
    dtype and have exactly zero imaginary part by construction.
    """

    grid: Grid
    values: np.ndarray = field(repr=False)
    space: str = PHYSICAL

    def __post_init__(self) -> None:
        if self.space not in (PHYSICAL, FREQUENCY):
            raise SpaceError(f"unknown space tag {self.space!r}")
        vals = np.asarray(self.values)
        if vals.shape != self.grid.shape:
            raise ValueError(f"values shape {vals.shape} != grid shape {self.grid.shape}")
        if vals.dtype not in (np.float64, np.complex128):
            vals = vals.astype(np.complex128 if np.iscomplexobj(vals) else np.float64)
        try:
            vals.setflags(write=False)
        except ValueError:
            vals = vals.copy()
            vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.values)

    def with_values(self, values: np.ndarray, space: str | None = None) -> "Field":
        return Field(self.grid, values, self.space if space is None else space)


def to_real(f: Field, tol: float = 1e-12) -> Field:
    """Drop a complex field's imaginary residue after checking it is noise.

    The residue must satisfy max|Im| <= tol * ||f||_2 (fields below 1e-300
    pass unconditionally).
    """
    if f.is_real:
        return f
    scale = l2_norm(f)
    resid = float(np.max(np.abs(f.values.imag)))
    if scale > 1e-300 and resid > tol * scale:
        raise ValueError(f"imaginary residue {resid:.3e} exceeds {tol:.1e} * {scale:.3e}")
    return Field(f.grid, np.ascontiguousarray(f.values.real), f.space)


# -- transforms ---------------------------------------------------------------


def _fwd_factor(grid: Grid) -> float:
    return grid.cell_volume * (2.0 * math.pi) ** (-grid.dim / 2.0)


def to_frequency_values(values: np.ndarray, grid: Grid) -> np.ndarray:
    vhat = _fft.fftn(values, workers=_fft_workers)
    vhat *= grid.phase
    vhat *= _fwd_factor(grid)
    return vhat


def from_frequency_values(vhat: np.ndarray, grid: Grid) -> np.ndarray:
    v = _fft.ifftn(vhat * grid.phase, workers=_fft_workers)
    v *= 1.0 / _fwd_factor(grid)
    return v


def to_frequency(f: Field) -> Field:
    if f.space != PHYSICAL:
        raise SpaceError("to_frequency expects a physical-space field")
    return Field(f.grid, to_frequency_values(np.asarray(f.values, dtype=np.complex128), f.grid), FREQUENCY)


def from_frequency(f: Field) -> Field:
    if f.space != FREQUENCY:
        raise SpaceError("from_frequency expects a frequency-space field")
    return Field(f.grid, from_frequency_values(f.values, f.grid), PHYSICAL)


def as_frequency_values(f: Field) -> np.ndarray:
    if f.space == FREQUENCY:
        return f.values
    return to_frequency_values(np.asarray(f.values, dtype=np.complex128), f.grid)


def as_physical_values(f: Field) -> np.ndarray:
    if f.space == PHYSICAL:
        return f.values
    return from_frequency_values(f.values, f.grid)


# -- multipliers --------------------------------------------------------------


@dataclass(frozen=True)
class FourierMultiplier:
    """Constant-coefficient operator given by its symbol on the lattice.

    ``symbol`` maps the tuple of broadcastable frequency meshes to an array;
    the value at xi = 0 is overridden by ``zero_mode_value`` so that singular
    symbols (inverse Laplacian, negative powers of omega) stay finite.
    """

    symbol: Callable[[tuple[np.ndarray, ...]], np.ndarray]
    zero_mode_value: complex = 0.0
    name: str = ""

    def table(self, grid: Grid) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            tab = np.asarray(self.symbol(grid.xi_mesh))
        tab = np.broadcast_to(tab, grid.shape).copy()
        tab[(0,) * grid.dim] = self.zero_mode_value
        if not np.all(np.isfinite(tab)):
            raise SymbolError(f"multiplier {self.name or '<anonymous>'} is non-finite on the lattice")
        return tab

    def __mul__(self, other: "FourierMultiplier") -> "FourierMultiplier":
        return FourierMultiplier(
            symbol=lambda xi: np.asarray(self.symbol(xi)) * np.asarray(other.symbol(xi)),
            zero_mode_value=self.zero_mode_value * other.zero_mode_value,
            name=f"({self.name})*({other.name})",
        )


def derivative_multiplier(alpha: Sequence[int]) -> FourierMultiplier:
    """Symbol of partial^alpha, prod_j (i xi_j)^alpha_j."""
    alpha = tuple(int(a) for a in alpha)

    def sym(xi):
        out = np.ones((), dtype=np.complex128)
        for a, x in zip(alpha, xi):
            if a:
                out = out * (1j * x) ** a
        return out + np.zeros_like(xi[0], dtype=np.complex128)

    zero = 0.0 if any(alpha) else 1.0
    return FourierMultiplier(sym, zero, name="d^" + "".join(map(str, alpha)))


def laplacian_multiplier() -> FourierMultiplier:
    return FourierMultiplier(lambda xi: -sum(x ** 2 for x in xi), 0.0, name="laplacian")


def inverse_laplacian_multiplier() -> FourierMultiplier:
    """Delta^(-1) with the mean-zero convention: the xi = 0 mode maps to 0."""
    return FourierMultiplier(lambda xi: -1.0 / sum(x ** 2 for x in xi), 0.0, name="inv_laplacian")


def omega_multiplier(s: float = 1.0) -> FourierMultiplier:
    """|xi|^s, the symbol of omega^s = (-Laplacian)^(s/2); zero mode -> 0."""
    return FourierMultiplier(lambda xi: sum(x ** 2 for x in xi) ** (s / 2.0), 0.0, name=f"omega^{s}")


def bessel_multiplier(k: float) -> FourierMultiplier:
    """(1 + |xi|^2)^(k/2), the symbol of (1 - Laplacian)^(k/2)."""
    return FourierMultiplier(lambda xi: (1.0 + sum(x ** 2 for x in xi)) ** (k / 2.0), 1.0, name=f"bessel^{k}")


def apply_multiplier(f: Field, m: FourierMultiplier) -> Field:
    """Multiply the frequency representation by m; returns the input's space."""
    tab = m.table(f.grid)
    if f.space == FREQUENCY:
        return Field(f.grid, f.values * tab, FREQUENCY)
    vhat = to_frequency_values(np.asarray(f.values, dtype=np.complex128), f.grid)
    out = from_frequency_values(vhat * tab, f.grid)
    return Field(f.grid, out, PHYSICAL)


def gradient(f: Field) -> list[Field]:
    """Spectral gradient, one Field per axis; real input yields real output."""
    grid = f.grid
    vhat = as_frequency_values(f)
    out = []
    for i in range(grid.dim):
        gi = from_frequency_values(1j * grid.xi_mesh[i] * vhat, grid)
        if f.is_real:
            gi = np.ascontiguousarray(gi.real)
        out.append(Field(grid, gi, PHYSICAL))
    return out


def laplacian(f: Field) -> Field:
    grid = f.grid
    vhat = as_frequency_values(f)
    out = from_frequency_values(-grid.k2 * vhat, grid)
    if f.is_real:
        out = np.ascontiguousarray(out.real)
    return Field(grid, out, PHYSICAL)


def dealias(f: Field) -> Field:
    """Project onto the 2/3 band (used on quadratic products)."""
    grid = f.grid
    vhat = as_frequency_values(f).copy()
    vhat[~grid.dealias_mask] = 0.0
    out = from_frequency_values(vhat, grid)
    if f.is_real:
        out = np.ascontiguousarray(out.real)
    return Field(grid, out, PHYSICAL)


# -- integration and norms ----------------------------------------------------


def integrate(f: Field) -> complex:
    """Riemann-sum integral over the box (spectrally accurate for smooth u)."""
    vals = as_physical_values(f)
    return complex(np.sum(vals)) * f.grid.cell_volume


def mean(f: Field) -> complex:
    return integrate(f) / (2.0 * f.grid.box_half_width) ** f.grid.dim


def l2_norm_values(values: np.ndarray, grid: Grid, space: str = PHYSICAL) -> float:
    w = grid.cell_volume if space == PHYSICAL else grid.freq_cell_volume
    return math.sqrt(float(np.sum(np.abs(values) ** 2)) * w)


def l2_norm(f: Field) -> float:
    """L2 norm; identical (to rounding) in both spaces by Parseval."""
    return l2_norm_values(f.values, f.grid, f.space)


def lebesgue_norm(f: Field, r: float) -> float:
    """L^r norm by grid quadrature; r = inf gives the grid max."""
    if not (r >= 1):
        raise ValueError(f"Lebesgue exponent must satisfy r >= 1, got {r}")
    vals = as_physical_values(f)
    a = np.abs(vals)
    if math.isinf(r):
        return float(a.max()) if a.size else 0.0
    return float(np.sum(a ** r) * f.grid.cell_volume) ** (1.0 / r)


def multi_indices(dim: int, k: int) -> list[tuple[int, ...]]:
    """All multi-indices alpha with |alpha| <= k, graded by |alpha|."""
    out = [a for a in product(range(k + 1), repeat=dim) if sum(a) <= k]
    out.sort(key=lambda a: (sum(a), a))
    return out


def sobolev_norm(f: Field, k: int, r: float) -> float:
    """W^k_r norm: sum of ||partial^alpha u||_r over all |alpha| <= k."""
    if k < 0 or k != int(k):
        raise ValueError(f"W^k_r needs integer k >= 0, got {k}")
    grid = f.grid
    vhat = as_frequency_values(f)
    total = 0.0
    for alpha in multi_indices(grid.dim, int(k)):
        if sum(alpha) == 0:
            dvals = as_physical_values(f)
        else:
            sym = np.ones((), dtype=np.complex128)
            for a, xi in zip(alpha, grid.xi_mesh):
                if a:
                    sym = sym * (1j * xi) ** a
            dvals = from_frequency_values(sym * vhat, grid)
        total += lebesgue_norm(Field(grid, dvals, PHYSICAL), r)
    return total


def weighted_norm(f: Field, k: float, s: float) -> float:
    """H^{k,s} norm: ||(1+x^2)^{s/2} (1-Laplacian)^{k/2} u||_2."""
    grid = f.grid
    vhat = as_frequency_values(f)
    smoothed = from_frequency_values((1.0 + grid.k2) ** (k / 2.0) * vhat, grid)
    weighted = (1.0 + grid.radius2) ** (s / 2.0) * smoothed
    return l2_norm_values(weighted, grid, PHYSICAL)


def boundary_mass_fraction(fields: Sequence[Field | np.ndarray], grid: Grid) -> float:
    """Fraction of total L2 mass sitting in the outer 10% shell of the box."""
    shell = grid.shell_mask
    total = 0.0
    outer = 0.0
    for f in fields:
        vals = as_physical_values(f) if isinstance(f, Field) else f
        a2 = np.abs(vals) ** 2
        total += float(a2.sum())
        outer += float(a2[shell].sum())
    if total <= 0.0:
        return 0.0
    return outer / total
