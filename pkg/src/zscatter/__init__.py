"""Pseudo-spectral scattering laboratory for the Zakharov system."""

from .grids import (
    FREQUENCY,
    PHYSICAL,
    Field,
    FourierMultiplier,
    Grid,
    apply_multiplier,
    bessel_multiplier,
    dealias,
    derivative_multiplier,
    from_frequency,
    gradient,
    integrate,
    inverse_laplacian_multiplier,
    l2_norm,
    laplacian,
    laplacian_multiplier,
    lebesgue_norm,
    omega_multiplier,
    set_fft_workers,
    sobolev_norm,
    to_frequency,
    weighted_norm,
)
from .propagators import (
    WavePair,
    apply_J,
    schrodinger_free,
    schrodinger_mdfm,
    wave_energy,
    wave_free,
)

__version__ = "0.1.0"
