"""Scale-invariant kinetic equation for oceanic internal gravity waves.

Evaluation, classification and root finding for the collision integral of
power-law action spectra ``n(k, m) = k**-a * |m|**-b``.
"""

from iwkinetic.spectral import (
    Exponents,
    OmegaExponents,
    PhysicalParams,
    Wavevector,
    action_power_law,
    dispersion,
    map_energy_2d_to_action,
    map_km_to_omega_m,
    map_omega_m_to_km,
)

__version__ = "0.1.0"

__all__ = [
    "Exponents",
    "OmegaExponents",
    "PhysicalParams",
    "Wavevector",
    "action_power_law",
    "dispersion",
    "map_energy_2d_to_action",
    "map_km_to_omega_m",
    "map_omega_m_to_km",
    "__version__",
]
