"""Physical constants, dispersion relation and power-law action spectra.

All quantities are nondimensional.  The hydrostatic dispersion relation in
isopycnal coordinates reads ``omega**2 = f**2 + c0**2 * k**2 / m**2`` with
``c0 = g / (rho0 * N)``.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np


class DomainError(ValueError):
    """Input lies outside the domain where a quantity is defined."""


@dataclass(frozen=True)
class PhysicalParams:
    """Coriolis frequency and the two combined constants of the model.

    Parameters
    ----------
    f : float
        Coriolis (inertial) frequency, ``f >= 0``.
    c0 : float
        Dispersion constant ``g / (rho0 N)``.
    vertex_prefactor : float
        Overall constant ``N / (4 sqrt(2 g))`` of the matrix element.
    """

    f: float = 0.0
    c0: float = 1.0
    vertex_prefactor: float = 1.0

    def __post_init__(self):
        if not self.f >= 0:
            raise DomainError(f"Coriolis frequency must be >= 0, got {self.f}")
        if not self.c0 > 0:
            raise DomainError(f"c0 must be > 0, got {self.c0}")
        if not self.vertex_prefactor > 0:
            raise DomainError(
                f"vertex_prefactor must be > 0, got {self.vertex_prefactor}")

    @classmethod
    def from_dict(cls, data: dict) -> "PhysicalParams":
        keys = ("f", "c0", "vertex_prefactor")
        return cls(**{k: float(data[k]) for k in keys if k in data})

    @classmethod
    def from_json(cls, path) -> "PhysicalParams":
        """Read ``f``, ``c0`` and ``vertex_prefactor`` from a JSON file.

        Missing keys take their defaults; unrelated keys are ignored so the
        same file can carry quadrature settings.
        """
        with open(Path(path), encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Exponents:
    """Action exponents ``(a, b)`` of ``n(k, m) = k**-a |m|**-b``."""

    a: float
    b: float

    def __post_init__(self):
        if not (np.isfinite(self.a) and np.isfinite(self.b)):
            raise DomainError(f"exponents must be finite, got {self}")

    def __iter__(self):
        yield self.a
        yield self.b


@dataclass(frozen=True)
class OmegaExponents:
    """Exponents of the same spectrum written as ``n = omega**a_tilde |m|**b_tilde``."""

    a_tilde: float
    b_tilde: float

    def __iter__(self):
        yield self.a_tilde
        yield self.b_tilde


@dataclass(frozen=True)
class Wavevector:
    """Horizontal magnitude ``k >= 0`` and signed vertical wavenumber ``m``."""

    k: float
    m: float

    def __post_init__(self):
        if not np.all(np.asarray(self.k) >= 0):
            raise DomainError(f"horizontal wavenumber must be >= 0, got {self.k}")


def dispersion(w: Wavevector, params: PhysicalParams = PhysicalParams()):
    """Frequency of an internal wave, ``sqrt(f**2 + c0**2 k**2 / m**2)``.

    ``w`` may also be any object with array-valued ``k`` and ``m``
    attributes; the result then broadcasts.

    Raises
    ------
    DomainError
        If ``m == 0`` anywhere; the vertical-mean mode carries no internal
        wave.
    """
    k = np.asarray(w.k, dtype=float)
    m = np.asarray(w.m, dtype=float)
    if np.any(m == 0):
        raise DomainError("dispersion undefined for vertical wavenumber m = 0")
    out = np.sqrt(params.f ** 2 + (params.c0 * k / m) ** 2)
    return float(out) if out.ndim == 0 else out


def action_power_law(w: Wavevector, e: Exponents):
    """Power-law wave action ``k**-a * |m|**-b``."""
    k = np.asarray(w.k, dtype=float)
    m = np.abs(np.asarray(w.m, dtype=float))
    if (np.any(k == 0) and e.a > 0) or (np.any(m == 0) and e.b > 0):
        raise DomainError("power-law action is singular at k = 0 or m = 0")
    with np.errstate(divide="ignore"):
        out = k ** (-e.a) * m ** (-e.b)
    return float(out) if out.ndim == 0 else out


def map_km_to_omega_m(e: Exponents) -> OmegaExponents:
    """Exponents of the action spectrum in ``(omega, m)`` space."""
    return OmegaExponents(-e.a, -e.a - e.b)


def map_omega_m_to_km(o: OmegaExponents) -> Exponents:
    """Inverse of :func:`map_km_to_omega_m`."""
    return Exponents(-o.a_tilde, o.a_tilde - o.b_tilde)


def map_energy_2d_to_action(c: float, d: float) -> Exponents:
    """Convert slopes of ``e(m, omega) ~ omega**-c m**-d`` to action exponents."""
    return Exponents(c + 2.0, d - c)
