"""Asymptotic profiles and their remainders under the Zakharov equations.

Profiles prescribe the behavior at infinity: "simple" pairs the free
Schrodinger and wave flows, "corrected" multiplies the Schrodinger profile by
(1 + f) with f twice the inverse Laplacian of the free wave field, and
"zero_wave" keeps only the Schrodinger part.  The remainders (the defect of
the profile under the full system) are evaluated by two independent routes:
a generic route differentiating the profile in time numerically, and the
closed forms built from f, J = x + it*grad and P = t*dt + x.grad.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field as dataclass_field
from functools import cached_property

import numpy as np

from .grids import (
    PHYSICAL,
    Field,
    Grid,
    apply_multiplier,
    as_frequency_values,
    from_frequency_values,
    l2_norm,
    multi_indices,
    omega_multiplier,
    sobolev_norm,
    to_frequency_values,
    weighted_norm,
)
from .propagators import PROJECT, FREE, WavePair, project_mean_zero, schrodinger_symbol

SIMPLE = "simple"
CORRECTED = "corrected"
ZERO_WAVE = "zero_wave"

_KINDS = (SIMPLE, CORRECTED, ZERO_WAVE)


class AsymptoticState:
    """Asymptotic data (u_plus, A_plus, A_dot_plus) with zero-mode policy.

    Under the default "project" policy the wave pair is projected onto mean
    zero at construction, which keeps omega^-1 and the inverse Laplacian
    bounded on the data.  Frequency representations are cached since every
    profile evaluation starts from them.
    """

    def __init__(self, u_plus: Field, wave: WavePair, zero_mode_policy: str = PROJECT):
        if u_plus.grid != wave.grid:
            raise ValueError("u_plus and wave data must share one grid")
        if zero_mode_policy not in (PROJECT, FREE):
            raise ValueError(f"unknown zero-mode policy {zero_mode_policy!r}")
        self.grid: Grid = u_plus.grid
        self.zero_mode_policy = zero_mode_policy
        if zero_mode_policy == PROJECT:
            wave = WavePair(project_mean_zero(wave.a), project_mean_zero(wave.a_dot), wave.time)
        self.u_plus = u_plus
        self.wave = wave

    @cached_property
    def u_plus_hat(self) -> np.ndarray:
        return to_frequency_values(np.asarray(self.u_plus.values, dtype=np.complex128), self.grid)

    @cached_property
    def a_plus_hat(self) -> np.ndarray:
        return to_frequency_values(np.asarray(self.wave.a.values, dtype=np.complex128), self.grid)

    @cached_property
    def a_dot_plus_hat(self) -> np.ndarray:
        return to_frequency_values(np.asarray(self.wave.a_dot.values, dtype=np.complex128), self.grid)

    @cached_property
    def x_u_plus_hat(self) -> list[np.ndarray]:
        """Transforms of x_i * u_plus, the seeds of J u0 by commutation."""
        g = self.grid
        return [
            to_frequency_values(np.asarray(g.x_mesh[i] * self.u_plus.values, dtype=np.complex128), g)
            for i in range(g.dim)
        ]

    @cached_property
    def _inv_k2(self) -> np.ndarray:
        g = self.grid
        k2 = g.k2.copy()
        k2[(0,) * g.dim] = 1.0
        inv = 1.0 / k2
        inv[(0,) * g.dim] = 0.0
        return inv

    @cached_property
    def pf_data_hat(self) -> tuple[np.ndarray, np.ndarray]:
        """Free-wave initial data of Pf: (2 x.grad G, 2(1 + x.grad) H) with
        G = inv_laplacian A_plus and H = inv_laplacian A_dot_plus."""
        g = self.grid
        out = []
        for src in (self.a_plus_hat, self.a_dot_plus_hat):
            ghat = -self._inv_k2 * src
            acc = np.zeros(g.shape, dtype=np.complex128)
            for i in range(g.dim):
                gi = from_frequency_values(1j * g.xi_mesh[i] * ghat, g)
                acc += g.x_mesh[i] * gi
            out.append((acc, ghat))
        xg_a = 2.0 * out[0][0]
        xg_ad = 2.0 * (from_frequency_values(out[1][1], g) + out[1][0])
        return (
            to_frequency_values(xg_a, g),
            to_frequency_values(xg_ad, g),
        )

    # -- frequency-side evaluations at time t --------------------------------

    def u0_hat(self, t: float) -> np.ndarray:
        return self.u_plus_hat * schrodinger_symbol(self.grid, t)

    def u0(self, t: float) -> np.ndarray:
        return from_frequency_values(self.u0_hat(t), self.grid)

    def wave_hats(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        """(A0_hat, dt A0_hat) at time t; the projected zero mode stays 0."""
        g = self.grid
        w = g.omega
        c = np.cos(w * t)
        s_over = t * np.sinc(w * (t / math.pi))
        a0 = c * self.a_plus_hat + s_over * self.a_dot_plus_hat
        a0dot = -w * np.sin(w * t) * self.a_plus_hat + c * self.a_dot_plus_hat
        return a0, a0dot

    def j_u0(self, t: float) -> list[np.ndarray]:
        """J u0 componentwise via the commutation form U(t)(x u_plus)."""
        sym = schrodinger_symbol(self.grid, t)
        return [from_frequency_values(sym * h, self.grid) for h in self.x_u_plus_hat]

    def regularity_report(self) -> list[tuple[str, float]]:
        """Norms assumed by the three scattering statements; warns on
        non-finite entries but never blocks a run."""
        g = self.grid
        u = self.u_plus
        a, ad = self.wave.a, self.wave.a_dot
        w_m1 = omega_multiplier(-1.0)
        w_m2 = omega_multiplier(-2.0)
        w_m3 = omega_multiplier(-3.0)

        def xdotgrad(fld: Field) -> Field:
            vhat = as_frequency_values(fld)
            acc = np.zeros(g.shape, dtype=np.complex128)
            for i in range(g.dim):
                acc += g.x_mesh[i] * from_frequency_values(1j * g.xi_mesh[i] * vhat, g)
            return Field(g, acc, PHYSICAL)

        entries = [
            ("u+_H2", sobolev_norm(u, 2, 2)),
            ("u+_W1_2", sobolev_norm(u, 2, 1)),
            ("u+_H0_2", weighted_norm(u, 0, 2)),
            ("xu+_W1_2", sum(sobolev_norm(Field(g, g.x_mesh[i] * u.values + np.zeros(g.shape), PHYSICAL), 2, 1) for i in range(g.dim))),
            ("A+_H1", sobolev_norm(a, 1, 2)),
            ("winv_Adot+_H1", sobolev_norm(apply_multiplier(ad, w_m1), 1, 2)),
            ("grad2_A+_W1_1", sum(sobolev_norm(Field(g, v, PHYSICAL), 1, 1) for v in _pure_derivs(a, 2))),
            ("grad_Adot+_W1_1", sum(sobolev_norm(Field(g, v, PHYSICAL), 1, 1) for v in _pure_derivs(ad, 1))),
            ("w-2_A+_L2", l2_norm(apply_multiplier(a, w_m2))),
            ("w-3_Adot+_L2", l2_norm(apply_multiplier(ad, w_m3))),
            ("w-2_xgradA+_L2", l2_norm(apply_multiplier(xdotgrad(a), w_m2))),
            ("w-1_xgradA+_L2", l2_norm(apply_multiplier(xdotgrad(a), w_m1))),
            ("w-3_xgradAdot+_L2", l2_norm(apply_multiplier(xdotgrad(ad), w_m3))),
            ("w-2_xgradAdot+_L2", l2_norm(apply_multiplier(xdotgrad(ad), w_m2))),
            ("winv_A+_W1_4/3", sobolev_norm(apply_multiplier(a, w_m1), 1, 4.0 / 3.0)),
            ("w-2_Adot+_W1_4/3", sobolev_norm(apply_multiplier(ad, w_m2), 1, 4.0 / 3.0)),
        ]
        for name, value in entries:
            if not math.isfinite(value):
                warnings.warn(f"regularity norm {name} is not finite", stacklevel=2)
        return entries


def _pure_derivs(fld: Field, order: int) -> list[np.ndarray]:
    g = fld.grid
    vhat = as_frequency_values(fld)
    out = []
    for alpha in multi_indices(g.dim, order):
        if sum(alpha) != order:
            continue
        sym = np.ones((), dtype=np.complex128)
        for aexp, xi in zip(alpha, g.xi_mesh):
            if aexp:
                sym = sym * (1j * xi) ** aexp
        out.append(from_frequency_values(sym * vhat, g))
    return out


@dataclass(frozen=True)
class Profile:
    """Asymptotic profile prescriptor; evaluation is pure in (state, t)."""

    kind: str = SIMPLE

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown profile kind {self.kind!r}; expected one of {_KINDS}")

    def _require_mean_zero(self, s: AsymptoticState) -> None:
        zero = (0,) * s.grid.dim
        resid = abs(s.a_plus_hat[zero]) + abs(s.a_dot_plus_hat[zero])
        scale = l2_norm(s.wave.a) + l2_norm(s.wave.a_dot) + 1e-300
        if resid > 1e-10 * scale:
            raise ValueError("corrected profile requires mean-zero wave data")

    def evaluate_values(self, s: AsymptoticState, t: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(u_a, A_a, dt A_a) as raw arrays; no t >= 1 gate (internal)."""
        g = s.grid
        u0 = s.u0(t)
        if self.kind == ZERO_WAVE:
            zero = np.zeros(g.shape)
            return u0, zero, zero
        a0_hat, a0dot_hat = s.wave_hats(t)
        a0 = from_frequency_values(a0_hat, g).real
        a0dot = from_frequency_values(a0dot_hat, g).real
        if self.kind == SIMPLE:
            return u0, a0, a0dot
        self._require_mean_zero(s)
        f = from_frequency_values(-2.0 * s._inv_k2 * a0_hat, g).real
        return (1.0 + f) * u0, a0, a0dot

    def stepper_sources(self, s: AsymptoticState, t: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(u_a, A_a, R1) at time t for the difference/linearized steppers.

        R1 here is the exact lattice remainder: the profile's free flows are
        exact on the grid, and the time product rule is pointwise, so

            R1 = i (dt f) u0 - (1/2)(1 + f) lap u0
                 + (1/2) lap[(1 + f) u0] - A0 (1 + f) u0

        with the outer Laplacian applied spectrally to the sampled product.
        Using this form keeps the difference system algebraically equivalent
        to the full system on the lattice (no product-rule aliasing).
        """
        g = s.grid
        u0 = s.u0(t)
        if self.kind == ZERO_WAVE:
            zero = np.zeros(g.shape)
            return u0, zero, np.zeros(g.shape, dtype=np.complex128)
        a0_hat, _ = s.wave_hats(t)
        a0 = from_frequency_values(a0_hat, g).real
        if self.kind == SIMPLE:
            return u0, a0, -a0 * u0
        self._require_mean_zero(s)
        inv = s._inv_k2
        f_hat = -2.0 * inv * a0_hat
        f = from_frequency_values(f_hat, g).real
        w = g.omega
        a0dot_hat = -w * np.sin(w * t) * s.a_plus_hat + np.cos(w * t) * s.a_dot_plus_hat
        dtf = from_frequency_values(-2.0 * inv * a0dot_hat, g).real
        u0_hat = s.u0_hat(t)
        lap_u0 = from_frequency_values(-g.k2 * u0_hat, g)
        ua = (1.0 + f) * u0
        lap_ua = from_frequency_values(
            -g.k2 * to_frequency_values(np.asarray(ua, dtype=np.complex128), g), g
        )
        r1 = 1j * dtf * u0 - 0.5 * (1.0 + f) * lap_u0 + 0.5 * lap_ua - a0 * ua
        return ua, a0, r1


def evaluate_profile(p: Profile, s: AsymptoticState, t: float) -> tuple[Field, Field, Field]:
    """Profile fields (u_a, A_a, dt A_a) at time t >= 1."""
    if t < 1.0:
        raise ValueError(f"profiles are evaluated for t >= 1, got t = {t}")
    g = s.grid
    ua, aa, aad = p.evaluate_values(s, t)
    return Field(g, ua, PHYSICAL), Field(g, aa, PHYSICAL), Field(g, aad, PHYSICAL)


def compute_f_and_derivatives(s: AsymptoticState, t: float) -> dict[str, object]:
    """f = 2 inv_laplacian A0 and its derivatives at time t.

    Returns a dict with Fields ``f``, ``lap_f`` (identically 2 A0), ``dt_f``,
    ``Pf`` (free-wave evolution of the scaling-operator data) and the list
    ``grad_f``.
    """
    g = s.grid
    a0_hat, a0dot_hat = s.wave_hats(t)
    inv = s._inv_k2
    f_hat = -2.0 * inv * a0_hat
    f = Field(g, from_frequency_values(f_hat, g).real, PHYSICAL)
    grad_f = [
        Field(g, from_frequency_values(1j * g.xi_mesh[i] * f_hat, g).real, PHYSICAL)
        for i in range(g.dim)
    ]
    lap_f = Field(g, from_frequency_values(-g.k2 * f_hat, g).real, PHYSICAL)
    dt_f = Field(g, from_frequency_values(-2.0 * inv * a0dot_hat, g).real, PHYSICAL)
    pf0, pf1 = s.pf_data_hat
    w = g.omega
    pf_hat = np.cos(w * t) * pf0 + (t * np.sinc(w * (t / math.pi))) * pf1
    pf = Field(g, from_frequency_values(pf_hat, g).real, PHYSICAL)
    return {"f": f, "grad_f": grad_f, "lap_f": lap_f, "dt_f": dt_f, "Pf": pf}


def remainder_R1_generic(p: Profile, s: AsymptoticState, t: float, dt_fd: float = 1e-3) -> Field:
    """R1 = i dt u_a + (1/2) lap u_a - A_a u_a with a 4th-order central
    difference in time for dt u_a (profiles are evaluable at arbitrary t)."""
    if t < 1.0:
        raise ValueError(f"remainders are evaluated for t >= 1, got t = {t}")
    if not (dt_fd > 0):
        raise ValueError("dt_fd must be positive")
    g = s.grid
    h = dt_fd
    um2 = p.evaluate_values(s, t - 2 * h)[0]
    um1 = p.evaluate_values(s, t - h)[0]
    up1 = p.evaluate_values(s, t + h)[0]
    up2 = p.evaluate_values(s, t + 2 * h)[0]
    dt_ua = (-up2 + 8.0 * up1 - 8.0 * um1 + um2) / (12.0 * h)
    ua, aa, _ = p.evaluate_values(s, t)
    lap_ua = from_frequency_values(-g.k2 * to_frequency_values(np.asarray(ua, dtype=np.complex128), g), g)
    return Field(g, 1j * dt_ua + 0.5 * lap_ua - aa * ua, PHYSICAL)


def remainder_R1_closed(s: AsymptoticState, t: float) -> Field:
    """Corrected-profile remainder in closed form,
    R1 = -f A0 u0 - i t^-1 (grad f).(J u0) + i t^-1 (Pf) u0."""
    if t < 1.0:
        raise ValueError(f"remainders are evaluated for t >= 1, got t = {t}")
    g = s.grid
    d = compute_f_and_derivatives(s, t)
    u0 = s.u0(t)
    a0 = from_frequency_values(s.wave_hats(t)[0], g).real
    ju = s.j_u0(t)
    out = -d["f"].values * a0 * u0 + 1j / t * d["Pf"].values * u0
    for i in range(g.dim):
        out -= 1j / t * d["grad_f"][i].values * ju[i]
    return Field(g, out, PHYSICAL)


def remainder_R2(p: Profile, s: AsymptoticState, t: float) -> tuple[Field, Field]:
    """(R2, omega^-1 R2).  For free wave parts R2 = -lap |u_a|^2; corrected
    gives -lap((1+f)^2 |u0|^2).  Both have exact zero mean."""
    if t < 1.0:
        raise ValueError(f"remainders are evaluated for t >= 1, got t = {t}")
    g = s.grid
    ua = p.evaluate_values(s, t)[0]
    q = np.abs(ua) ** 2
    q_hat = to_frequency_values(np.asarray(q, dtype=np.complex128), g)
    r2 = from_frequency_values(g.k2 * q_hat, g).real
    winv_r2 = from_frequency_values(g.omega * q_hat, g).real
    return Field(g, r2, PHYSICAL), Field(g, winv_r2, PHYSICAL)
