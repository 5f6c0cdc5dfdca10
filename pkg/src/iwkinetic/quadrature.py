"""Numerical evaluation of the azimuthally integrated collision integral.

The integral runs over the kinematic box in ``(k1, k2)``.  It is symmetric
under ``k1 <-> k2``, so only the half ``k1 < k2`` is integrated and doubled.
That half is split in two pieces, each in coordinates that absorb the
``1/S`` edge singularity into the measure:

* ``R1``, ``u = k1/k < 1/2``: ``k2/k = 1 + u sin(phi)``.  The two signs of
  ``phi`` are added before integrating, which cancels the leading odd terms
  of the infrared expansion pointwise.  The outer variable is ``log u``.
* ``R2``, ``u >= 1/2``: ``(k1 + k2)/k = cosh(tau)``,
  ``(k1 - k2)/k = -sin(theta)``, so that ``dk1 dk2 / S = 2 dtau dtheta``.

Convergent ends are truncated deep in the asymptotic range and completed
with a power-law tail whose exponent is measured locally at the truncation.
Divergent or marginal ends need an explicit cutoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq

from iwkinetic.convergence import CONVERGENT, ir_classify, uv_classify
from iwkinetic.resonance import BRANCHES, branch_roots, jacobian_values
from iwkinetic.spectral import DomainError, Exponents, PhysicalParams
from iwkinetic.vertex import f_factor, heron16, vertex_squared

# Truncation points for convergent ends before the tail correction.
# The infrared point is set by cancellation between branches, which costs
# about 1e-5 relative accuracy at 1e-6 and grows like 1/u**2 below.
IR_TRUNCATION = 1e-6
UV_TRUNCATION = 1e7
_GL_ORDER = 10
_GL_X, _GL_W = np.polynomial.legendre.leggauss(_GL_ORDER)


class QuadratureError(RuntimeError):
    """Tolerance not met; ``result`` holds the best estimate."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


@dataclass(frozen=True)
class QuadratureConfig:
    """Accuracy targets and cutoffs.

    ``ir_cut`` restricts ``min(k1, k2) > ir_cut * k`` (0 means none);
    ``uv_cut`` restricts ``(k1 + k2) / 2 < uv_cut * k`` (``inf`` means none).
    ``max_subdivisions`` caps the number of panels of any single 1-D
    integral.
    """

    rel_tol: float = 1e-6
    abs_tol: float = 1e-12
    ir_cut: float = 0.0
    uv_cut: float = math.inf
    max_subdivisions: int = 2000

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise DomainError("tolerances must be positive")
        if not 0 <= self.ir_cut < 1 < self.uv_cut:
            raise DomainError(f"need 0 <= ir_cut < 1 < uv_cut, got "
                              f"{self.ir_cut}, {self.uv_cut}")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be >= 1")

    @classmethod
    def from_dict(cls, data: dict) -> "QuadratureConfig":
        keys = ("rel_tol", "abs_tol", "ir_cut", "uv_cut", "max_subdivisions")
        kw = {k: data[k] for k in keys if k in data and data[k] is not None}
        if "max_subdivisions" in kw:
            kw["max_subdivisions"] = int(kw["max_subdivisions"])
        return cls(**{k: (v if k == "max_subdivisions" else float(v))
                      for k, v in kw.items()})

    def to_dict(self) -> dict:
        return {"rel_tol": self.rel_tol, "abs_tol": self.abs_tol,
                "ir_cut": self.ir_cut, "uv_cut": self.uv_cut,
                "max_subdivisions": self.max_subdivisions}


@dataclass(frozen=True)
class IntegralResult:
    """Value of a (possibly regularized) collision integral.

    ``error_estimate`` combines the quadrature error and the tail-fit
    uncertainty.  ``scale`` is the integral of the absolute integrand; the
    tolerance test is made against it because ``C`` changes sign.
    """

    value: float
    error_estimate: float
    ir_cut: float
    uv_cut: float
    converged: bool
    scale: float = float("nan")
    parts: dict = field(default_factory=dict)

    def raise_for_status(self):
        if not self.converged:
            raise QuadratureError("tolerance not reached", self)
        return self

    def to_dict(self) -> dict:
        return {"value": self.value, "error": self.error_estimate,
                "ir_cut": self.ir_cut, "uv_cut": self.uv_cut,
                "converged": self.converged}


# --- integrand --------------------------------------------------------------

def _kernel(k, k1, k2, m, a, b, c0=1.0, prefactor=1.0):
    """``S``-stripped integrand ``sum +-k k1 k2 |V|^2 f / |g'|`` (vectorized)."""
    k, k1, k2 = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (k, k1, k2)))
    am = abs(m)
    n = k ** -a * am ** -b
    w = c0 * k / am
    total = np.zeros_like(k1)
    for name in BRANCHES:
        m1, m2 = branch_roots(name, k, k1, k2, m)
        n1 = k1 ** -a * np.abs(m1) ** -b
        n2 = k2 ** -a * np.abs(m2) ** -b
        w1, w2 = c0 * k1 / np.abs(m1), c0 * k2 / np.abs(m2)
        jac = jacobian_values(k1, k2, m1, m2, c0)
        t = name[0]
        if t == "a":
            v2 = vertex_squared(k, k1, k2, w, w1, w2, 0.0, prefactor)
            total += v2 * f_factor(n, n1, n2, 0) / jac
        elif t == "b":
            v2 = vertex_squared(k1, k2, k, w1, w2, w, 0.0, prefactor)
            total -= v2 * f_factor(n, n1, n2, 1) / jac
        else:
            v2 = vertex_squared(k2, k, k1, w2, w, w1, 0.0, prefactor)
            total -= v2 * f_factor(n, n1, n2, 2) / jac
    return k * k1 * k2 * total


def _check_params(params: PhysicalParams):
    if params.f != 0:
        raise DomainError("the collision integral is nonrotating; use "
                          "corner_integral for f > 0")


def collision_integrand(k1, k2, k, m, e: Exponents,
                        params: PhysicalParams = PhysicalParams()):
    """``T0 - T1 - T2`` summed over root pairs, at a point of the box.

    Returns the integrand of ``k * dn/dt`` in ``dk1 dk2``; the ``1/k`` is
    applied by :func:`collision_integral`.

    Raises
    ------
    DomainError
        On or outside the box boundary, where ``1/S`` is singular.
    """
    _check_params(params)
    k1a, k2a = np.asarray(k1, dtype=float), np.asarray(k2, dtype=float)
    if np.any(heron16(k, k1a, k2a) <= 0) or np.any(k1a <= 0) or np.any(k2a <= 0):
        raise DomainError("integrand needs points strictly inside the box")
    if m == 0:
        raise DomainError("m must be nonzero")
    s = 0.25 * np.sqrt(heron16(k, k1a, k2a))
    out = _kernel(k, k1a, k2a, m, e.a, e.b, params.c0, params.vertex_prefactor) / s
    return float(out) if np.ndim(out) == 0 else out


# --- batched adaptive Gauss-Legendre -----------------------------------------

def _adaptive(fun, lo, hi, rel_tol, abs_tol, max_panels):
    """Integrate ``fun`` over ``len(lo)`` independent intervals at once.

    ``fun(owner, x)`` receives flat arrays of interval indices and abscissae.
    Each panel is compared against its two halves; a panel is accepted when
    the difference is below ``rel_tol`` times the panel's absolute integral
    (or its share of ``rel_tol`` times the whole interval's absolute
    integral plus ``abs_tol``, so cancelling noise in small panels does not
    stall the refinement).

    Returns ``(value, error, abs_value, converged)`` arrays.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    nint = lo.size
    value = np.zeros(nint)
    error = np.zeros(nint)
    absval = np.zeros(nint)
    ok = np.ones(nint, dtype=bool)
    count = np.ones(nint, dtype=int)
    width = np.where(hi > lo, hi - lo, 1.0)

    owner = np.flatnonzero(hi > lo)
    pa, pb = lo[owner], hi[owner]
    floor = None
    while owner.size:
        mid = 0.5 * (pa + pb)
        h = 0.5 * (pb - pa)
        xs = np.concatenate([
            mid[:, None] + h[:, None] * _GL_X,
            (pa + mid)[:, None] / 2 + h[:, None] / 2 * _GL_X,
            (mid + pb)[:, None] / 2 + h[:, None] / 2 * _GL_X,
        ], axis=1)
        own = np.repeat(owner, 3 * _GL_ORDER)
        fx = np.asarray(fun(own, xs.ravel()), dtype=float).reshape(owner.size, 3, _GL_ORDER)
        coarse = h * (fx[:, 0] @ _GL_W)
        fine = h / 2 * (fx[:, 1] @ _GL_W + fx[:, 2] @ _GL_W)
        l1 = h / 2 * (np.abs(fx[:, 1]) @ _GL_W + np.abs(fx[:, 2]) @ _GL_W)
        err = np.abs(fine - coarse)
        bad = ~np.isfinite(fine)
        if floor is None:
            # first sweep: one panel per interval gives its absolute scale
            floor = np.zeros(nint)
            floor[owner] = rel_tol * l1 + abs_tol
        tol = np.maximum(rel_tol * l1, floor[owner] * (pb - pa) / width[owner])
        done = (err <= tol) | bad | (count[owner] >= max_panels)
        ok[owner[done & ((err > tol) | bad)]] = False
        np.add.at(value, owner[done], np.where(bad[done], 0.0, fine[done]))
        np.add.at(error, owner[done], np.where(bad[done], np.inf, err[done]))
        np.add.at(absval, owner[done], np.where(bad[done], 0.0, l1[done]))
        split = ~done
        np.add.at(count, owner[split], 1)
        owner = np.repeat(owner[split], 2)
        a2, m2, b2 = pa[split], mid[split], pb[split]
        pa = np.column_stack([a2, m2]).ravel()
        pb = np.column_stack([m2, b2]).ravel()
    return value, error, absval, ok


def _adaptive_nested(inner, outer_lo, outer_hi, inner_bounds, rel_tol, abs_tol,
                     max_panels):
    """Two-level adaptive integral ``int dX int dY inner(X, Y)``.

    ``inner_bounds(X)`` returns the inner limits for an array of ``X``.
    A coarse pass fixes the absolute scale of the region; inner integrals
    then get a tenth of the outer tolerance as an absolute floor, so
    cancellation noise in negligible slices does not count as failure.
    """
    state = {"inner_ok": True, "floor": 0.1 * abs_tol}

    def outer_fun(_, xs):
        ylo, yhi = inner_bounds(xs)
        v, _, _, ok = _adaptive(lambda o, ys: inner(xs[o], ys), ylo, yhi,
                                0.1 * rel_tol, state["floor"], max_panels)
        state["inner_ok"] &= bool(ok.all())
        return v

    coarse = _adaptive(outer_fun, [outer_lo], [outer_hi], 1e-2, abs_tol, 50)[2][0]
    state["floor"] = 0.1 * (rel_tol * coarse + abs_tol) / (outer_hi - outer_lo)
    state["inner_ok"] = True
    v, err, l1, ok = _adaptive(outer_fun, [outer_lo], [outer_hi], rel_tol,
                               abs_tol, max_panels)
    return float(v[0]), float(err[0]), float(l1[0]), bool(ok[0]) and state["inner_ok"]


# --- region integrands --------------------------------------------------------

def _r1_inner(k, m, a, b, c0, pref):
    """Integrand of R1 in ``(t = log u, phi)`` with ``phi`` folded to ``(0, pi/2)``."""
    def f(t, phi):
        x = np.exp(t)
        out = np.zeros_like(x)
        for sgn in (1.0, -1.0):
            y = sgn * x * np.sin(phi)
            meas = 4.0 / np.sqrt((2 + x + y) * (2 + y - x))
            out += meas * _kernel(k, k * x, k * (1 + y), m, a, b, c0, pref)
        return x * out
    return f


def _r2_inner(k, m, a, b, c0, pref):
    """Integrand of R2 in ``(tau, theta)``."""
    def f(tau, theta):
        s = np.cosh(tau)
        d = -np.sin(theta)
        return 2.0 * _kernel(k, k * (s + d) / 2, k * (s - d) / 2, m, a, b, c0, pref)
    return f


def _r2_bounds(tau):
    c = np.cosh(tau) - 1.0
    return np.zeros_like(tau), np.arcsin(np.clip(c, 0.0, 1.0))


def _tail(g, h, fallback):
    """Tail beyond a truncation for an integrand decaying like ``exp(-p s)``.

    ``g`` holds the integrand at the truncation and at distances ``h`` and
    ``2 h`` inside it.  The decay rate is measured locally from the first
    pair; the second pair gives the error estimate.  ``fallback`` is used
    when the samples do not decay monotonically.
    """
    g0, g1, g2 = g
    with np.errstate(divide="ignore", invalid="ignore"):
        p1 = math.log(g1 / g0) / h if g1 * g0 > 0 else float("nan")
        p2 = math.log(g2 / g1) / h if g2 * g1 > 0 else float("nan")
    if not (p1 > 0 and p2 > 0):
        tail = g0 / fallback if fallback > 0 else 0.0
        return tail, abs(tail) + abs(g0)
    return g0 / p1, abs(g0 / p1 - g0 / p2)


def collision_integral(e: Exponents, cfg: QuadratureConfig = QuadratureConfig(),
                       k: float = 1.0, m: float = 1.0,
                       params: PhysicalParams = PhysicalParams()) -> IntegralResult:
    """Evaluate ``dn(k, m)/dt`` for the power-law action ``k**-a |m|**-b``.

    Parameters
    ----------
    e : Exponents
        Action exponents.
    cfg : QuadratureConfig
        Tolerances and cutoffs.  An end whose classifier verdict is not
        convergent must be cut off explicitly.
    k, m : float
        Evaluation point; ``(1, 1)`` is the canonical one.
    params : PhysicalParams
        ``f`` must be zero.

    Returns
    -------
    IntegralResult
        ``converged`` is False when a panel budget ran out; the value is
        then the best estimate.
    """
    _check_params(params)
    if not (k > 0 and m != 0):
        raise DomainError("need k > 0 and m != 0")
    a, b = float(e.a), float(e.b)
    ir, uv = ir_classify(e), uv_classify(e)
    if ir.status != CONVERGENT and cfg.ir_cut <= 0:
        raise DomainError(f"IR end is {ir.status} for {e}; set ir_cut > 0")
    if uv.status != CONVERGENT and not math.isfinite(cfg.uv_cut):
        raise DomainError(f"UV end is {uv.status} for {e}; set a finite uv_cut")
    c0, pref = params.c0, params.vertex_prefactor
    rt, at, mp = cfg.rel_tol, cfg.abs_tol, cfg.max_subdivisions
    ir_tail = cfg.ir_cut <= 0
    uv_tail = not math.isfinite(cfg.uv_cut)
    x_min = IR_TRUNCATION if ir_tail else cfg.ir_cut
    s_max = 2 * (UV_TRUNCATION if uv_tail else cfg.uv_cut)
    t_min, t_max = math.log(x_min), math.log(0.5)

    f1 = _r1_inner(k, m, a, b, c0, pref)
    half_pi = lambda xs: (np.zeros_like(xs), np.full_like(xs, 0.5 * np.pi))
    parts = {}
    v1, e1, l1, ok1 = _adaptive_nested(f1, t_min, t_max, half_pi, rt, at, mp)
    parts["R1"] = v1

    f2 = _r2_inner(k, m, a, b, c0, pref)
    tau_c, tau_max = math.acosh(2.0), math.acosh(s_max)
    v2a, e2a, l2a, ok2a = _adaptive_nested(f2, 0.0, tau_c, _r2_bounds, rt, at, mp)
    full = lambda xs: (np.zeros_like(xs), np.full_like(xs, 0.5 * np.pi))
    v2b, e2b, l2b, ok2b = _adaptive_nested(f2, tau_c, tau_max, full, rt, at, mp)
    parts["R2"] = v2a + v2b

    value, error, scale = v1 + v2a + v2b, e1 + e2a + e2b, l1 + l2a + l2b
    ok = ok1 and ok2a and ok2b

    def line(fun, xs, lo, hi):
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        floor = 0.01 * (rt * scale + at) / (hi - lo)
        v, _, _, good = _adaptive(lambda o, ys: fun(xs[o], ys),
                                  np.full_like(xs, lo), np.full_like(xs, hi),
                                  0.01 * rt, floor, mp)
        return v, bool(good.all())

    h = math.log(2.0)
    if ir_tail:
        g, good = line(f1, [t_min, t_min + h, t_min + 2 * h], 0.0, 0.5 * np.pi)
        tail, terr = _tail(g, h, ir.order)
        parts["IR_tail"] = tail
        value += tail
        error += terr
        scale += abs(tail)
        ok &= good
    if uv_tail:
        g, good = line(f2, [tau_max, tau_max - h, tau_max - 2 * h], 0.0, 0.5 * np.pi)
        tail, terr = _tail(g, h, uv.order)
        parts["UV_tail"] = tail
        value += tail
        error += terr
        scale += abs(tail)
        ok &= good

    value *= 2.0 / k
    error *= 2.0 / k
    scale *= 2.0 / k
    ok &= error <= rt * scale + at
    return IntegralResult(value, error, cfg.ir_cut, cfg.uv_cut, ok, scale,
                          {kk: 2.0 * vv / k for kk, vv in parts.items()})


# --- cutoff scaling and root finding -----------------------------------------

DEFAULT_CUTS = (1e-3, 1e-4, 1e-5, 1e-6)
_FIXED_IR_CUT = 1e-3
_FIXED_UV_CUT = 1e3


def regularized_values(e: Exponents, end: str, cut_values,
                       cfg: QuadratureConfig = QuadratureConfig()):
    """Regularized integrals with the cutoff at ``end`` set to each ``eps``.

    ``eps`` is ``ir_cut`` for ``'IR'`` and ``1/uv_cut`` for ``'UV'``.  The
    opposite end keeps its configured cutoff or, when it is not convergent
    and unset, a fixed one (``1e-3`` or ``1e3``) whose contribution cancels
    in differences.
    """
    end = end.upper()
    if end not in ("IR", "UV"):
        raise ValueError("end must be 'IR' or 'UV'")
    base = cfg
    if end == "IR" and uv_classify(e).status != CONVERGENT and not math.isfinite(cfg.uv_cut):
        base = replace(cfg, uv_cut=_FIXED_UV_CUT)
    if end == "UV" and ir_classify(e).status != CONVERGENT and cfg.ir_cut <= 0:
        base = replace(cfg, ir_cut=_FIXED_IR_CUT)
    out = []
    for eps in cut_values:
        c = replace(base, ir_cut=eps) if end == "IR" else replace(base, uv_cut=1.0 / eps)
        out.append(collision_integral(e, c))
    return out


def fit_difference_slope(cuts, values) -> float:
    """Log-log slope of successive differences of ``values`` against ``cuts``.

    For ``I(eps) = I0 + A eps**p`` with log-spaced cuts the differences are
    proportional to ``eps**p``; a logarithmic divergence gives slope 0.
    """
    cuts = np.asarray(cuts, dtype=float)
    values = np.asarray(values, dtype=float)
    order = np.argsort(cuts)[::-1]
    cuts, values = cuts[order], values[order]
    diffs = np.abs(np.diff(values))
    mids = np.sqrt(cuts[:-1] * cuts[1:])
    if np.any(diffs == 0) or diffs.size < 2:
        raise QuadratureError("insufficient dynamic range for a slope fit")
    # differences are normalized by the step in log eps so uneven spacing is fine
    steps = np.abs(np.diff(np.log(cuts)))
    slope, _ = np.polyfit(np.log(mids), np.log(diffs / steps), 1)
    return float(slope)


def cutoff_scaling(e: Exponents, end: str, cut_values=DEFAULT_CUTS,
                   cfg: QuadratureConfig = QuadratureConfig()) -> float:
    """Fitted order of the cutoff dependence at one end.

    Needs at least three cutoffs spanning two decades or more.
    """
    cut_values = sorted(float(c) for c in cut_values)
    if len(cut_values) < 3 or cut_values[-1] / cut_values[0] < 100:
        raise QuadratureError("insufficient dynamic range: need >= 3 cuts "
                              "over >= 2 decades")
    res = regularized_values(e, end, cut_values, cfg)
    return fit_difference_slope(cut_values, [r.value for r in res])


ENDPOINT_NUDGE = 0.05


def find_steady_a(b: float = 0.0, bracket=(3.5, 4.0),
                  cfg: QuadratureConfig = QuadratureConfig(), fun=None,
                  xtol: float = 5e-3) -> float:
    """Root ``a*`` of ``a -> C(a, b)`` inside ``bracket``.

    The default integrand is evaluated with the bracket moved inward by
    ``ENDPOINT_NUDGE``, since the ends of the convergent segment are
    marginal.  A custom ``fun(a)`` is used on the bracket as given.
    """
    lo, hi = map(float, bracket)
    if fun is None:
        lo, hi = lo + ENDPOINT_NUDGE, hi - ENDPOINT_NUDGE

        def fun(a):
            return collision_integral(Exponents(a, b), cfg).value
    flo, fhi = fun(lo), fun(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if np.sign(flo) == np.sign(fhi):
        raise QuadratureError(f"no sign change on [{lo}, {hi}]: {flo:.3g}, {fhi:.3g}")
    return float(brentq(fun, lo, hi, xtol=xtol))


def branch_term(branch, k1, k2, k=1.0, m=1.0, e: Exponents = Exponents(0.0, 0.0),
                params: PhysicalParams = PhysicalParams()):
    """Single-branch term ``k k1 k2 |V|^2 f / (|g'| S)`` (unsigned by type).

    Used to check the scale-separated asymptotics branch by branch.
    """
    _check_params(params)
    name = str(branch)
    k1, k2 = np.asarray(k1, dtype=float), np.asarray(k2, dtype=float)
    if np.any(heron16(k, k1, k2) <= 0):
        raise DomainError("branch term needs points strictly inside the box")
    a, b, c0 = e.a, e.b, params.c0
    m1, m2 = branch_roots(name, k, k1, k2, m)
    n = k ** -a * abs(m) ** -b
    n1 = k1 ** -a * np.abs(m1) ** -b
    n2 = k2 ** -a * np.abs(m2) ** -b
    w, w1, w2 = c0 * k / abs(m), c0 * k1 / np.abs(m1), c0 * k2 / np.abs(m2)
    t = name[0]
    if t == "a":
        v2, ff = vertex_squared(k, k1, k2, w, w1, w2, 0.0, params.vertex_prefactor), f_factor(n, n1, n2, 0)
    elif t == "b":
        v2, ff = vertex_squared(k1, k2, k, w1, w2, w, 0.0, params.vertex_prefactor), f_factor(n, n1, n2, 1)
    else:
        v2, ff = vertex_squared(k2, k, k1, w2, w, w1, 0.0, params.vertex_prefactor), f_factor(n, n1, n2, 2)
    s = 0.25 * np.sqrt(heron16(k, k1, k2))
    out = k * k1 * k2 * v2 * ff / (jacobian_values(k1, k2, m1, m2, c0) * s)
    return float(out) if np.ndim(out) == 0 else out
