"""Reduction of the kinetic equation to the resonant manifold.

For fixed ``(k, k1, k2, m)`` each resonance type admits two solutions for the
vertical wavenumbers, giving six branches::

    a1, a2   p  = p1 + p2,  omega  = omega1 + omega2
    b1, b2   p1 = p2 + p,   omega1 = omega2 + omega
    c1, c2   p2 = p + p1,   omega2 = omega + omega1

Roots are evaluated in a rationalized form free of cancellation, so they
stay accurate deep in the infrared and ultraviolet corners of the box.
All root formulas are odd in ``m``; negative ``m`` is handled by reflection.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from iwkinetic.spectral import DomainError
from iwkinetic.vertex import heron16

BRANCHES = ("a1", "a2", "b1", "b2", "c1", "c2")

Limit = Literal["IR", "UV"]

# Mechanism dominating each branch in the scale-separated limits
# (k1 -> 0 for IR, k1, k2 -> infinity for UV).
_LIMIT_CLASS = {
    "IR": {"a1": "ES", "c2": "ES", "a2": "ID", "c1": "ID", "b1": "PSI", "b2": "PSI"},
    "UV": {"a1": "PSI", "a2": "PSI", "b1": "ES", "c1": "ES", "b2": "ID", "c2": "ID"},
}

DOUBLE_ROOT_TOL = 1e-14


class DoubleRootError(DomainError):
    """The frequency mismatch has a vanishing derivative at the root."""


@dataclass(frozen=True)
class BranchId:
    """Resonance type ``a|b|c`` and root index ``1|2``."""

    resonance_type: str
    root: int

    def __post_init__(self):
        if self.resonance_type not in ("a", "b", "c") or self.root not in (1, 2):
            raise ValueError(f"invalid branch {self.resonance_type}{self.root}")

    @classmethod
    def parse(cls, name) -> "BranchId":
        if isinstance(name, BranchId):
            return name
        return cls(str(name)[0], int(str(name)[1]))

    @property
    def name(self) -> str:
        return f"{self.resonance_type}{self.root}"

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class TriadRoot:
    """A resolved resonant triad on one branch."""

    branch: BranchId
    k: float
    k1: float
    k2: float
    m: float
    m1: float
    m2: float
    jacobian: float

    def frequencies(self, c0: float = 1.0):
        """Hydrostatic frequencies ``(omega, omega1, omega2)`` without rotation."""
        return (c0 * self.k / abs(self.m), c0 * self.k1 / abs(self.m1),
                c0 * self.k2 / abs(self.m2))


def branch_roots(branch, k, k1, k2, m):
    """Vertical wavenumbers ``(m1, m2)`` on one branch (vectorized).

    No box check is made; callers are expected to pass in-box points.
    """
    name = BranchId.parse(branch).name
    k, k1, k2, m = (np.asarray(x, dtype=float) for x in (k, k1, k2, m))
    s = k + k1 + k2
    x = k1 + k2 - k  # > 0 inside the box
    if name == "a1":
        r = np.sqrt(s * s - 4 * k * k1)
        m1 = m / (2 * k) * (s + r)
        m2 = -m / (2 * k) * (x + r)
    elif name == "a2":
        r = np.sqrt(x * x + 4 * k * k1)
        m1 = -m / (2 * k) * (x + r)
        m2 = m - m1
    elif name == "b1":
        r = np.sqrt(x * x + 4 * k * k2)
        m2 = -2 * m * k2 / (x + r)
        m1 = 4 * m * k1 * k2 / ((x + r) * (r + k + k2 - k1))
    elif name == "b2":
        z = k + k1 - k2
        r = np.sqrt(z * z + 4 * k * k2)
        m2 = -m / (2 * k) * (z + r)
        m1 = -2 * m * k1 / ((k - k1 + k2) + r)
    elif name == "c1":
        r = np.sqrt(x * x + 4 * k * k1)
        m1 = -2 * m * k1 / (x + r)
        m2 = 4 * m * k1 * k2 / ((x + r) * (r + k + k1 - k2))
    else:  # c2
        z = k - k1 + k2
        r = np.sqrt(z * z + 4 * k * k1)
        m1 = -m / (2 * k) * (z + r)
        m2 = -2 * m * k2 / ((k + k1 - k2) + r)
    return m1, m2


def jacobian_values(k1, k2, m1, m2, c0=1.0):
    """``|dg/dm1|`` at a root; the same expression holds for all three types."""
    return c0 * np.abs(k1 * np.sign(m1) / (m1 * m1) - k2 * np.sign(m2) / (m2 * m2))


def resonance_residual(branch, k, k1, k2, m, m1, m2):
    """Frequency mismatch of a branch's resonance, relative to ``omega``.

    Also folds in the vertical closure error so a single number certifies
    both conditions.
    """
    t = BranchId.parse(branch).resonance_type
    w, w1, w2 = k / np.abs(m), k1 / np.abs(m1), k2 / np.abs(m2)
    if t == "a":
        freq, vert = w - w1 - w2, m - m1 - m2
    elif t == "b":
        freq, vert = w1 - w2 - w, m1 - m2 - m
    else:
        freq, vert = w2 - w - w1, m2 - m - m1
    return np.abs(freq) / w + np.abs(vert) / np.abs(m)


def kinematic_box_contains(k, k1, k2) -> str:
    """``'inside'``, ``'boundary'`` or ``'outside'`` the triangle inequalities."""
    if min(k, k1, k2) < 0:
        raise DomainError("wavenumbers must be nonnegative")
    gaps = (k1 + k2 - k, k + k2 - k1, k + k1 - k2)
    if min(gaps) < 0:
        return "outside"
    if min(gaps) == 0:
        return "boundary"
    return "inside"


def solve_branch(branch, k, k1, k2, m) -> TriadRoot:
    """Solve the resonance for ``(m1, m2)`` on one branch.

    Raises
    ------
    DomainError
        If ``(k, k1, k2)`` lies outside the kinematic box or ``m == 0``.
        Boundary (collinear) triads are accepted.
    DoubleRootError
        If the Jacobian vanishes at the root.
    """
    b = BranchId.parse(branch)
    if min(k, k1, k2) <= 0 or m == 0:
        raise DomainError("need k, k1, k2 > 0 and m != 0")
    if kinematic_box_contains(k, k1, k2) == "outside":
        raise DomainError(f"({k}, {k1}, {k2}) is not inside the kinematic box")
    m1, m2 = (float(v) for v in branch_roots(b, k, k1, k2, m))
    jac = float(jacobian_values(k1, k2, m1, m2))
    if jac < DOUBLE_ROOT_TOL * (k / abs(m)) / abs(m):
        raise DoubleRootError(f"vanishing Jacobian on branch {b} at {(k, k1, k2, m)}")
    return TriadRoot(b, float(k), float(k1), float(k2), float(m), m1, m2, jac)


def jacobian(root: TriadRoot, c0: float = 1.0) -> float:
    """``|g'|`` at a solved root (hydrostatic, nonrotating frequencies)."""
    return float(jacobian_values(root.k1, root.k2, root.m1, root.m2, c0))


def classify_limit(branch, limit: Limit) -> str:
    """Mechanism (``'ES'``, ``'ID'`` or ``'PSI'``) of a branch in a limit."""
    if limit not in _LIMIT_CLASS:
        raise ValueError(f"limit must be 'IR' or 'UV', got {limit!r}")
    return _LIMIT_CLASS[limit][BranchId.parse(branch).name]


# --- kinematic box in the (omega1, m1) plane --------------------------------

REGIONS = ("a", "b", "c", "d")  # m1<0 & w1>w, m1<0 & w1<w, m1>0 & w1<w, m1>0 & w1>w


def e_curves(w1, w, m, f=0.0):
    """The four curves ``E1..E4`` bounding the box in the ``(omega1, m1)`` plane.

    Entries are ``nan`` where a square root argument is negative.
    """
    w1 = np.asarray(w1, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        K = np.sqrt(w * w - f * f)
        K1 = np.sqrt(w1 * w1 - f * f)
        K2 = np.sqrt((w - w1) ** 2 - f * f)
        E1 = m * (K2 - K) / (K1 + K2)
        E2 = m * (K + K2) / (K1 + K2)
        E3 = m * (K2 - K) / (K2 - K1)
        E4 = m * (K + K2) / (K2 - K1)
    return E1, E2, E3, E4


def _omega_triangle(w1, m1, w, m, f):
    """Side lengths ``(k, k1, k2)`` implied by ``(omega1, m1)``; c0 cancels."""
    w2 = np.abs(w - w1)
    m2 = m - m1 if w1 < w else m1 - m
    k = abs(m) * np.sqrt(w * w - f * f)
    k1 = abs(m1) * np.sqrt(w1 * w1 - f * f)
    k2 = abs(m2) * np.sqrt(w2 * w2 - f * f)
    return k, k1, k2


def omega_box(w1, m1, w, m, f=0.0) -> str:
    """Region label of ``(omega1, m1)`` or ``'outside'``.

    Labels: ``'a'`` (m1 < 0, omega1 > omega), ``'b'`` (m1 < 0,
    omega1 < omega), ``'c'`` (m1 > 0, omega1 < omega), ``'d'`` (m1 > 0,
    omega1 > omega).  Points whose partner frequency falls below ``f`` are
    evanescent and reported outside.
    """
    if not w > f >= 0:
        raise DomainError("need omega > f >= 0")
    if w1 < f or abs(w - w1) < f or m1 == 0 or w1 == w:
        return "outside"
    k, k1, k2 = _omega_triangle(w1, m1, w, m, f)
    if heron16(k, k1, k2) <= 0:
        return "outside"
    if m1 < 0:
        return "a" if w1 > w else "b"
    return "d" if w1 > w else "c"


def omega_box_intervals(w1, w, m, f=0.0):
    """The ``m1`` intervals inside the box at fixed ``omega1``.

    The E-curves, ``0`` and ``m`` split the ``m1`` axis into pieces on which
    every triangle inequality keeps a definite sign; each piece is tested at
    its midpoint.
    """
    cuts = [v for v in e_curves(w1, w, m, f) if np.isfinite(v)]
    cuts = sorted(set(cuts + [0.0, float(m)]))
    out = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        if hi - lo <= 0:
            continue
        if omega_box(w1, 0.5 * (lo + hi), w, m, f) != "outside":
            if out and out[-1][1] == lo:
                out[-1] = (out[-1][0], hi)
            else:
                out.append((lo, hi))
    return out
