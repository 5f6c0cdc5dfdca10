"""Near-inertial induced-diffusion corners of the rotating kinetic equation.

With ``f > 0`` the kinematic box in ``(omega1, m1)`` has corners where a
near-inertial wave scatters a high-frequency one.  Their contribution is
integrated here directly, and compared with a closed form whose prefactor
vanishes on two lines of the ``(a, b)`` plane.
"""

from __future__ import annotations

import math

import numpy as np

from iwkinetic.quadrature import IntegralResult, QuadratureConfig, _adaptive_nested
from iwkinetic.resonance import e_curves
from iwkinetic.spectral import DomainError, Exponents, OmegaExponents, map_km_to_omega_m
from iwkinetic.vertex import f_factor, heron16, vertex_squared


def ke6_prefactor(o: OmegaExponents) -> float:
    """``(a~ - b~)(a~ - 3(3 + b~))``; zero on ``b = 0`` and ``9 - 2a - 3b = 0``."""
    at, bt = o
    return (at - bt) * (at - 3.0 * (3.0 + bt)) + 0.0  # no signed zeros


def _power_integral(q, lo, hi):
    """``int_lo^hi x**q dx`` including the logarithmic case."""
    if q == -1:
        return math.log(hi / lo)
    return (hi ** (q + 1) - lo ** (q + 1)) / (q + 1)


def ke6_value(o: OmegaExponents, f: float, mu: float, omega: float = 1.0,
              m: float = 1.0) -> float:
    """Closed-form leading near-inertial contribution to ``dn/dt``.

    The epsilon integral is done analytically: with ``x = eps + f`` the
    quadratic factor becomes ``x**2 + 16 f**2``.

    Raises
    ------
    DomainError
        If ``mu <= 0`` or ``f < 0``, or if ``f = 0`` and the integral
        diverges at ``eps = 0``.
    """
    at, bt = o
    if not mu > 0 or f < 0:
        raise DomainError("need mu > 0 and f >= 0")
    if not omega > f:
        raise DomainError("need omega > f")
    q = 4.0 + at + bt
    if f == 0 and q + 3 <= 0:
        raise DomainError("epsilon integral diverges at f = 0; keep f > 0")
    pre = ke6_prefactor(o)
    if pre == 0:
        return 0.0
    k = abs(m) * math.sqrt(omega * omega - f * f)
    if f == 0:
        eps_int = mu ** (q + 3) / (q + 3)
    else:
        eps_int = (_power_integral(q + 2, f, f + mu)
                   + 16.0 * f * f * _power_integral(q, f, f + mu))
    return (math.pi / (4.0 * k) * pre * abs(m) ** (5 + 2 * bt)
            * omega ** (-3 + at - bt) * eps_int)


def id_line_b(a) -> np.ndarray:
    """``b`` on the flux-carrying stationary line ``9 - 2a - 3b = 0``."""
    return (9.0 - 2.0 * np.asarray(a, dtype=float)) / 3.0


def id_stationary_lines(a_values):
    """Records on both stationary lines with the closed-form prefactor."""
    rows = []
    for a in np.asarray(a_values, dtype=float):
        for line, b in (("b=0", 0.0), ("9-2a-3b=0", float(id_line_b(a)))):
            rows.append({"line": line, "a": float(a), "b": b,
                         "prefactor": ke6_prefactor(map_km_to_omega_m(Exponents(a, b)))})
    return rows


CORNER_CONFIG = QuadratureConfig(rel_tol=1e-5)


def _corner_kernel(w, m, w1, m1, w2, m2, o, f, c0, pref, which):
    """``J |V|^2 f / S`` on one corner (``which`` 0: sum is p, 1: sum is p1)."""
    at, bt = o
    K = np.sqrt(w * w - f * f)
    K1 = np.sqrt(np.maximum(w1 * w1 - f * f, 0.0))
    K2 = np.sqrt(np.maximum(w2 * w2 - f * f, 0.0))
    k, k1, k2 = abs(m) * K / c0, np.abs(m1) * K1 / c0, np.abs(m2) * K2 / c0
    n = w ** at * abs(m) ** bt
    n1 = w1 ** at * np.abs(m1) ** bt
    n2 = w2 ** at * np.abs(m2) ** bt
    # J over the inverse-square-root factors, which the substitutions absorb
    jr = k * k1 * k2 * np.abs(m1) * w1 * np.abs(m2) * w2 / (c0 * c0)
    s = 0.25 * np.sqrt(np.maximum(heron16(k, k1, k2), 0.0))
    if which == 0:
        v2 = vertex_squared(k, k1, k2, w, w1, w2, f, pref)
    else:
        v2 = vertex_squared(k1, k2, k, w1, w2, w, f, pref)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = jr * v2 * f_factor(n, n1, n2, which) / s
    return np.where(s > 0, out, 0.0)


def corner_integral(o: OmegaExponents, omega: float = 1.0, m: float = 1.0,
                    f: float = 1e-3, omega_s: float = 0.05,
                    cfg: QuadratureConfig = None, c0: float = 1.0,
                    prefactor: float = 1.0) -> IntegralResult:
    """Contribution of the near-inertial ID corners to ``dn(omega, m)/dt``.

    The corner with small ``omega1 - f`` (counted twice for its mirror
    image) is added and the one just above ``omega1 = omega + f`` is
    subtracted.  Both use full occupation factors.  ``omega1 - f`` (or
    ``omega2 - f``) is written as ``s**2`` and the ``m1`` interval is mapped
    by ``sin(psi)**2``, which removes the square-root endpoint singularities.

    Parameters
    ----------
    o : OmegaExponents
        ``n = omega**a~ |m|**b~``.
    omega, m : float
        Evaluation point, ``omega > f``.
    f : float
        Coriolis frequency, ``> 0``.
    omega_s : float
        Width of the corner neighbourhood in ``omega1``.
    cfg : QuadratureConfig, optional
        Defaults to ``CORNER_CONFIG``.  The two corners cancel to a few
        parts in 1e3 at small ``f``, and the inner integrals hit a
        round-off floor near 1e-7 relative, so 1e-5 is the tightest
        tolerance that reliably reports convergence.
    """
    if not f > 0:
        raise DomainError("corner_integral needs f > 0; the nonrotating "
                          "integral has no inertial corners")
    if not (omega > f + omega_s and omega_s > 0):
        raise DomainError("need 0 < omega_s and omega > f + omega_s")
    cfg = CORNER_CONFIG if cfg is None else cfg
    k = abs(m) * math.sqrt(omega * omega - f * f) / c0
    rt, at_, mp = cfg.rel_tol, cfg.abs_tol, cfg.max_subdivisions

    def bounds(w1, lo_pair):
        E = e_curves(w1, omega, m, f)
        lo = np.minimum(E[lo_pair[0]], E[lo_pair[1]])
        hi = np.maximum(E[lo_pair[0]], E[lo_pair[1]])
        return lo, hi

    def make(offset, pair, which):
        def inner(sv, psi):
            eps = sv * sv
            w1 = offset + eps
            lo, hi = bounds(w1, pair)
            width = hi - lo
            m1 = lo + width * np.sin(psi) ** 2
            if which == 0:
                w2, m2 = omega - w1, m - m1
                rad = np.sqrt(2 * f + eps) * np.sqrt(w2 * w2 - f * f)
            else:
                w2, m2 = w1 - omega, m1 - m
                rad = np.sqrt(2 * f + eps) * np.sqrt(w1 * w1 - f * f)
            val = _corner_kernel(omega, m, w1, m1, w2, m2, o, f, c0, prefactor, which)
            # d(omega1) = 2 s ds cancels the s in the near-inertial sqrt(omega^2 - f^2)
            return val * 2.0 / rad * width * np.sin(2 * psi)
        return inner

    full = lambda xs: (np.zeros_like(xs), np.full_like(xs, 0.5 * np.pi))
    smax = math.sqrt(omega_s)
    # ID3: small omega1, m1 between E3 and E1
    va, ea, la, oka = _adaptive_nested(make(f, (2, 0), 0), 0.0, smax, full, rt, at_, mp)
    # ID2: omega1 just above omega + f, m1 between E3 and E2
    vb, eb, lb, okb = _adaptive_nested(make(omega + f, (2, 1), 1), 0.0, smax, full,
                                       rt, at_, mp)
    value = 2.0 / k * (va - vb)
    error = 2.0 / k * (ea + eb)
    scale = 2.0 / k * (la + lb)
    return IntegralResult(value, error, 0.0, math.inf, oka and okb, scale,
                          {"ID3": 2.0 / k * va, "ID2": -2.0 / k * vb})
