"""Interaction matrix elements and triad kinematics.

The matrix element is written for a triad whose *sum* wave carries index 0,
``k0 = k1 + k2`` as horizontal vectors.  Only magnitudes enter after the
azimuthal integration, so every dot product is recovered from the law of
cosines under the closure of the triad.

All array functions broadcast over numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from iwkinetic.spectral import DomainError, PhysicalParams, Wavevector, dispersion

Closure = Literal["a", "b", "c"]

# Which of (p, p1, p2) is the sum wave for each resonance type:
# a: p = p1 + p2,  b: p1 = p2 + p,  c: p2 = p + p1.
SUM_ORDER = {"a": (0, 1, 2), "b": (1, 2, 0), "c": (2, 0, 1)}


def heron16(k, k1, k2):
    """Return ``16 S**2`` in factored form (exactly zero on collinear triads)."""
    return (k + k1 + k2) * (-k + k1 + k2) * (k - k1 + k2) * (k + k1 - k2)


def triangle_area(k, k1, k2):
    """Area of the triangle with sides ``k, k1, k2``.

    Returns 0 on the boundary of the kinematic box (collinear triads) and
    ``nan`` when no triangle exists, so the two cases stay distinguishable.
    """
    k, k1, k2 = (np.asarray(x, dtype=float) for x in (k, k1, k2))
    if np.any((k < 0) | (k1 < 0) | (k2 < 0)):
        raise DomainError("side lengths must be nonnegative")
    h = heron16(k, k1, k2)
    with np.errstate(invalid="ignore"):
        out = np.where(h >= 0, 0.25 * np.sqrt(np.abs(h)), np.nan)
    return float(out) if out.ndim == 0 else out


def closure_dot_products(k, k1, k2, closure: Closure = "a"):
    """Horizontal dot products ``(k1.k2, k.k1, k.k2)`` under a vector closure."""
    k, k1, k2 = (np.asarray(x, dtype=float) for x in (k, k1, k2))
    if np.any(heron16(k, k1, k2) < 0):
        raise DomainError("triangle inequalities violated")
    kk, kk1, kk2 = k * k, k1 * k1, k2 * k2
    if closure == "a":  # k = k1 + k2
        out = (kk - kk1 - kk2) / 2, (kk + kk1 - kk2) / 2, (kk + kk2 - kk1) / 2
    elif closure == "b":  # k1 = k2 + k
        out = (kk1 + kk2 - kk) / 2, (kk1 + kk - kk2) / 2, (kk1 - kk2 - kk) / 2
    elif closure == "c":  # k2 = k + k1
        out = (kk2 + kk1 - kk) / 2, (kk2 - kk - kk1) / 2, (kk2 + kk - kk1) / 2
    else:
        raise ValueError(f"unknown closure {closure!r}")
    if k.ndim == k1.ndim == k2.ndim == 0:
        return tuple(float(x) for x in out)
    return out


def vertex_terms(k0, k1, k2, w0, w1, w2, f=0.0):
    """``I``, ``J`` and ``|K|`` for a sum triad ``p0 = p1 + p2``.

    Parameters
    ----------
    k0, k1, k2 : array_like
        Horizontal wavenumber magnitudes; ``k0`` belongs to the sum wave.
    w0, w1, w2 : array_like
        Positive frequencies.
    f : float
        Coriolis frequency; ``J`` and ``K`` vanish when it is zero.
    """
    k0, k1, k2, w0, w1, w2 = np.broadcast_arrays(
        *(np.asarray(x, dtype=float) for x in (k0, k1, k2, w0, w1, w2)))
    if np.any((w0 <= 0) | (w1 <= 0) | (w2 <= 0)):
        raise DomainError("frequencies must be positive")
    s0, s1, s2 = k0 * k0, k1 * k1, k2 * k2
    d12 = (s0 - s1 - s2) / 2
    d20 = (s0 + s2 - s1) / 2
    d01 = (s0 + s1 - s2) / 2
    r0, r1, r2 = np.sqrt(w0), np.sqrt(w1), np.sqrt(w2)
    I = -(r1 * r2 / r0) * s0 * d12 - (r2 * r0 / r1) * s1 * d20 - (r0 * r1 / r2) * s2 * d01
    if f == 0:
        zero = np.zeros_like(I)
        return I, zero, zero
    J = f * f / (r0 * r1 * r2) * (s0 * d12 - s1 * d20 - s2 * d01)
    # |k1 x k2| is twice the triangle area; the other cross products equal
    # minus it under the closure.
    cross = 0.5 * np.sqrt(np.clip(heron16(k0, k1, k2), 0, None))
    K = f * cross * np.abs(
        r0 / (r1 * r2) * (s1 - s2)
        - r1 / (r2 * r0) * (s2 - s0)
        - r2 / (r0 * r1) * (s0 - s1))
    return I, J, K


def vertex_squared(k0, k1, k2, w0, w1, w2, f=0.0, prefactor=1.0):
    """``|V^{p0}_{p1 p2}|**2`` for a sum triad (index 0 is the sum wave)."""
    I, J, K = vertex_terms(k0, k1, k2, w0, w1, w2, f)
    return prefactor ** 2 * ((I + J) ** 2 + K ** 2) / (k0 * k1 * k2) ** 2


def f_factor(n, n1, n2, which: int = 0):
    """Occupation factor ``f^p_{p1 p2} = n1 n2 - n (n1 + n2)`` and its cyclic images.

    ``which`` selects the wave that plays the role of ``p``: 0 for ``p``,
    1 for ``p1`` (``n2 n - n1 (n2 + n)``), 2 for ``p2``.
    """
    if which == 0:
        return n1 * n2 - n * (n1 + n2)
    if which == 1:
        return n2 * n - n1 * (n2 + n)
    if which == 2:
        return n * n1 - n2 * (n + n1)
    raise ValueError(f"which must be 0, 1 or 2, got {which}")


@dataclass(frozen=True)
class Triad:
    """Three waves satisfying one of the vector closures.

    Frequencies default to the dispersion relation of ``params`` when not
    given explicitly.
    """

    p: Wavevector
    p1: Wavevector
    p2: Wavevector
    closure: Closure = "a"
    omegas: tuple | None = None

    def __post_init__(self):
        if self.closure not in SUM_ORDER:
            raise ValueError(f"unknown closure {self.closure!r}")

    def frequencies(self, params: PhysicalParams = PhysicalParams()):
        if self.omegas is not None:
            return tuple(float(w) for w in self.omegas)
        return tuple(dispersion(w, params) for w in (self.p, self.p1, self.p2))

    def sum_ordered(self, params: PhysicalParams = PhysicalParams()):
        """Magnitudes and frequencies reordered so the sum wave comes first."""
        ks = (self.p.k, self.p1.k, self.p2.k)
        ws = self.frequencies(params)
        idx = SUM_ORDER[self.closure]
        return tuple(ks[i] for i in idx), tuple(ws[i] for i in idx)


def I_term(t: Triad, params: PhysicalParams = PhysicalParams()) -> float:
    (k0, k1, k2), (w0, w1, w2) = t.sum_ordered(params)
    return float(vertex_terms(k0, k1, k2, w0, w1, w2)[0])


def JK_terms(t: Triad, params: PhysicalParams = PhysicalParams()):
    """Rotation correction ``J`` and the magnitude of the imaginary ``K``."""
    (k0, k1, k2), (w0, w1, w2) = t.sum_ordered(params)
    _, J, K = vertex_terms(k0, k1, k2, w0, w1, w2, params.f)
    return float(J), float(K)


def V_squared(t: Triad, params: PhysicalParams = PhysicalParams()) -> float:
    """Squared matrix element with the triad's sum wave as superscript."""
    (k0, k1, k2), (w0, w1, w2) = t.sum_ordered(params)
    if min(k0, k1, k2) <= 0:
        raise DomainError("matrix element needs nonzero horizontal wavenumbers")
    return float(vertex_squared(k0, k1, k2, w0, w1, w2, params.f,
                                params.vertex_prefactor))


def U_squared(k, k1, k2, w, w1, w2, params: PhysicalParams = PhysicalParams()):
    """``|U_{p,p1,p2}|**2`` for ``p + p1 + p2 = 0``.

    Not used by the kinetic equation; kept for completeness.  Relative to the
    sum configuration ``-p = p1 + p2`` the dot and cross products involving
    ``p`` change sign, while ``J`` is evaluated at ``-p``.
    """
    k, k1, k2, w, w1, w2 = (np.asarray(x, dtype=float) for x in (k, k1, k2, w, w1, w2))
    f = params.f
    s0, s1, s2 = k * k, k1 * k1, k2 * k2
    d12 = (s0 - s1 - s2) / 2
    d20 = -(s0 + s2 - s1) / 2
    d01 = -(s0 + s1 - s2) / 2
    r0, r1, r2 = np.sqrt(w), np.sqrt(w1), np.sqrt(w2)
    I = -(r1 * r2 / r0) * s0 * d12 - (r2 * r0 / r1) * s1 * d20 - (r0 * r1 / r2) * s2 * d01
    J = f * f / (r0 * r1 * r2) * (s0 * d12 + s1 * d20 + s2 * d01)
    cross = 0.5 * np.sqrt(np.clip(heron16(k, k1, k2), 0, None))
    K = f * cross * np.abs(
        r0 / (r1 * r2) * (s1 - s2)
        + r1 / (r2 * r0) * (s2 - s0)
        + r2 / (r0 * r1) * (s0 - s1))
    return (params.vertex_prefactor / 3) ** 2 * ((I + J) ** 2 + K ** 2) / (k * k1 * k2) ** 2
