"""Exact free flows: Schrodinger group, wave propagator, MDFM factorization.

All propagators act frequency-side and are exact on the lattice; the MDFM
path is an independent physical-space representation of the Schrodinger group
used for cross-validation only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import czt

from .grids import (
    FREQUENCY,
    PHYSICAL,
    Field,
    Grid,
    as_frequency_values,
    from_frequency_values,
    to_frequency_values,
)

PROJECT = "project"
FREE = "free"


class DilationError(ValueError):
    """MDFM dilation would sample outside the resolved frequency range."""


def project_mean_zero(f: Field) -> Field:
    vhat = as_frequency_values(f).copy()
    vhat[(0,) * f.grid.dim] = 0.0
    out = from_frequency_values(vhat, f.grid)
    if f.is_real:
        out = np.ascontiguousarray(out.real)
    return Field(f.grid, out, PHYSICAL)


@dataclass(frozen=True)
class WavePair:
    """Wave-field data (a, a_dot) at a time; both real on a shared grid."""

    a: Field
    a_dot: Field
    time: float = 0.0

    def __post_init__(self) -> None:
        if self.a.grid is not self.a_dot.grid and self.a.grid != self.a_dot.grid:
            raise ValueError("WavePair fields must share one grid")
        if not (self.a.is_real and self.a_dot.is_real):
            raise ValueError("WavePair fields must be real")

    @property
    def grid(self) -> Grid:
        return self.a.grid


# -- Schrodinger group ---------------------------------------------------------


def schrodinger_symbol(grid: Grid, t: float) -> np.ndarray:
    """Frequency symbol of U(t) = exp(i(t/2) Laplacian)."""
    return np.exp(-0.5j * t * grid.k2)


def schrodinger_free(u_plus: Field, t: float) -> Field:
    """Free Schrodinger evolution u0(t) = U(t) u_plus (exactly unitary)."""
    grid = u_plus.grid
    vhat = as_frequency_values(u_plus) * schrodinger_symbol(grid, t)
    if u_plus.space == FREQUENCY:
        return Field(grid, vhat, FREQUENCY)
    return Field(grid, from_frequency_values(vhat, grid), PHYSICAL)


def apply_J(u: Field, u_plus: Field, t: float) -> list[Field]:
    """J u0 = (x + it grad) u0 via the commutation form U(t)(x u_plus).

    The caller guarantees u = U(t) u_plus; only u_plus is consumed.  The
    coordinate x is box-centered, so the result is meaningful for localized
    data within the guard window.
    """
    grid = u_plus.grid
    uvals = as_physical_values_checked(u_plus)
    out = []
    for i in range(grid.dim):
        xi_u = grid.x_mesh[i] * uvals
        vhat = to_frequency_values(np.asarray(xi_u, dtype=np.complex128), grid)
        vhat *= schrodinger_symbol(grid, t)
        out.append(Field(grid, from_frequency_values(vhat, grid), PHYSICAL))
    return out


def as_physical_values_checked(f: Field) -> np.ndarray:
    if f.space == PHYSICAL:
        return f.values
    return from_frequency_values(f.values, f.grid)


# -- free wave flow -------------------------------------------------------------


def wave_symbols(grid: Grid, t: float, policy: str = PROJECT) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(cos wt, sin(wt)/w, -w sin wt) on the lattice.

    sin(wt)/w takes its limit value t at the zero mode; under the "project"
    policy the zero mode of all three symbols is forced to kill the mean.
    """
    w = grid.omega
    c = np.cos(w * t)
    s_over = t * np.sinc(w * (t / math.pi))
    ws = -w * np.sin(w * t)
    if policy == PROJECT:
        zero = (0,) * grid.dim
        c = c.copy()
        s_over = s_over.copy()
        c[zero] = 0.0
        s_over[zero] = 0.0
    elif policy != FREE:
        raise ValueError(f"unknown zero-mode policy {policy!r}")
    return c, s_over, ws


def wave_free(data: WavePair, t: float, policy: str = PROJECT) -> WavePair:
    """Free wave evolution of (A, A_dot) by time t, exact frequency-side.

    With the "project" policy the zero mode stays 0; with "free" it evolves
    as A(0) + t A_dot(0).
    """
    grid = data.grid
    ahat = as_frequency_values(data.a)
    adhat = as_frequency_values(data.a_dot)
    c, s_over, ws = wave_symbols(grid, t, policy)
    new_a = c * ahat + s_over * adhat
    new_ad = ws * ahat + np.cos(grid.omega * t) * adhat
    if policy == PROJECT:
        zero = (0,) * grid.dim
        new_ad = new_ad.copy()
        new_ad[zero] = 0.0
    a = np.ascontiguousarray(from_frequency_values(new_a, grid).real)
    ad = np.ascontiguousarray(from_frequency_values(new_ad, grid).real)
    return WavePair(Field(grid, a, PHYSICAL), Field(grid, ad, PHYSICAL), time=data.time + t)


def wave_energy(data: WavePair) -> float:
    """(1/2)(||w^-1 A_dot||_2^2 + ||A||_2^2); conserved by wave_free."""
    grid = data.grid
    ahat = as_frequency_values(data.a)
    adhat = as_frequency_values(data.a_dot).copy()
    zero = (0,) * grid.dim
    adhat[zero] = 0.0
    w = grid.omega.copy()
    w[zero] = 1.0
    quad = np.abs(adhat / w) ** 2 + np.abs(ahat) ** 2
    return 0.5 * float(quad.sum()) * grid.freq_cell_volume


# -- MDFM factorization ----------------------------------------------------------


def mdfm_min_time(grid: Grid) -> float:
    """Smallest t for which the dilated grid x/t stays inside the resolved
    frequency range: L/t <= pi N / (2L)."""
    return 2.0 * grid.box_half_width ** 2 / (math.pi * grid.points_per_axis)


def _continuum_transform_on_dilated_grid(values: np.ndarray, grid: Grid, t: float) -> np.ndarray:
    """Evaluate the continuum-normalized transform of `values` at the points
    x_grid / t, exactly, via a chirp-z transform along each axis."""
    N = grid.points_per_axis
    L = grid.box_half_width
    dx = grid.dx
    y0 = -L
    w0 = -L / t
    dw = dx / t
    out = np.asarray(values, dtype=np.complex128)
    omega_axis = w0 + dw * np.arange(N)
    # per-axis: sum_j f_j exp(-i w_k y_j) = exp(-i w_k y0) * czt(f)
    w_ratio = np.exp(-1j * dw * dx)
    a_start = np.exp(1j * w0 * dx)
    edge_phase = np.exp(-1j * omega_axis * y0)
    for axis in range(grid.dim):
        out = czt(out, m=N, w=w_ratio, a=a_start, axis=axis)
        shape = [1] * grid.dim
        shape[axis] = N
        out = out * edge_phase.reshape(shape)
    out *= grid.cell_volume * (2.0 * math.pi) ** (-grid.dim / 2.0)
    return out


def schrodinger_mdfm(u_plus: Field, t: float) -> Field:
    """U(t) u_plus through the factorization M(t) D(t) F M(t).

    M(t) = exp(i x^2 / 2t), D(t) = (it)^(-n/2) D0(t) with (D0(t)f)(x) = f(x/t),
    and F the continuum-normalized transform.  Validation path only; requires
    t above `mdfm_min_time` so the dilation stays inside the box's resolved
    frequencies.
    """
    grid = u_plus.grid
    if t <= 0:
        raise DilationError(f"MDFM requires t > 0, got {t}")
    tmin = mdfm_min_time(grid)
    if t < tmin:
        raise DilationError(f"MDFM dilation exceeds the box: t = {t} < {tmin:.6g}")
    n = grid.dim
    m_phase = np.exp(0.5j * grid.radius2 / t)
    inner = m_phase * as_physical_values_checked(u_plus)
    transformed = _continuum_transform_on_dilated_grid(inner, grid, t)
    d_factor = t ** (-n / 2.0) * np.exp(-0.25j * math.pi * n)
    out = m_phase * (d_factor * transformed)
    return Field(grid, out, PHYSICAL)
