"""Closed-form IR/UV classification of the ``(a, b)`` exponent plane.

The ``order`` of a verdict is the exponent ``p`` in ``eps**p`` of the
cutoff-dependent part of the collision integral, with ``eps`` the IR cutoff
``k1/k`` or the inverse UV cutoff ``k/k1``.  ``p > 0`` converges, ``p < 0``
diverges and ``p == 0`` is logarithmic (marginal).

Lines where the dominant mechanism switches (``b = +-3`` in the IR,
``b = +-2`` in the UV) are excluded from every convergent set, so points on
them are reported as marginal unless the order is negative.  On the UV
crossover lines the competing mechanisms carry opposite signs, so the sign
there is reported as 0 (undetermined).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from iwkinetic.resonance import BranchId, Limit, classify_limit
from iwkinetic.spectral import Exponents

CONVERGENT, DIVERGENT, MARGINAL = "convergent", "divergent", "marginal"


@dataclass(frozen=True)
class ConvergenceVerdict:
    status: str
    mechanism: str
    order: float
    sign: int
    note: str = ""


def _sgn(x: float) -> int:
    return int(np.sign(x))


def _verdict(order, mechanism, sign, note="", boundary=False) -> ConvergenceVerdict:
    if order < 0:
        status = DIVERGENT
    elif order == 0 or boundary:
        status = MARGINAL
    else:
        status = CONVERGENT
    # orders are written as the negated inequality expressions so that
    # rounding agrees with evaluating the inequalities directly
    return ConvergenceVerdict(status, mechanism, float(order) + 0.0,
                              0 if status == CONVERGENT else sign, note)


def ir_classify(e: Exponents) -> ConvergenceVerdict:
    """Behaviour of the collision integral as ``k1`` or ``k2 -> 0``."""
    a, b = e
    sign = _sgn(-b * (1 - b))
    if b == 0:
        return _verdict(-(a - 4), "ID", sign,
                        "b = 0: leading ID term vanishes, order raised by 1/2")
    if b == 1:
        return _verdict(-(a - 3.5), "ID", sign,
                        "b = 1: leading ID term vanishes, order raised by 1/2")
    if abs(b) < 3:
        return _verdict(-(a + b / 2 - 3.5), "ID", sign)
    if b == 3:
        return _verdict(-(a - 2), "ID", sign, "ID/PSI crossover line", boundary=True)
    if b == -3:
        return _verdict(-(a - 5), "ID", sign, "ID/ES crossover line", boundary=True)
    if b > 3:
        return _verdict(-(a + b - 5), "PSI", sign)
    return _verdict(-(a - 5), "ES", sign)


def uv_classify(e: Exponents) -> ConvergenceVerdict:
    """Behaviour of the collision integral as ``k1, k2 -> infinity``."""
    a, b = e
    if b == 0:
        return _verdict(a - 3.5, "ID", 0,
                        "b = 0: leading ID term vanishes, order raised by 1/2")
    if abs(b) < 2:
        return _verdict(a + b / 2 - 4, "ID", _sgn(b))
    if b == 2:
        return _verdict(a - 3, "ID", 0, "ID/ES crossover line; the two "
                        "mechanisms enter with opposite signs", boundary=True)
    if b == -2:
        return _verdict(a - 5, "ID", 0, "ID/PSI crossover line; the two "
                        "mechanisms enter with opposite signs", boundary=True)
    if b > 2:
        return _verdict(a - 3, "ES", _sgn(-b))
    # PSI sign is not given in closed form; + keeps the UV sign continuous
    # with the IR sign where both diverge for b < -2 (no balance there).
    return _verdict(a + b - 3, "PSI", 1)


def divergence_signs(e: Exponents) -> tuple[int, int]:
    """Signs of the divergent IR and UV contributions (0 where not divergent)."""
    ir, uv = ir_classify(e), uv_classify(e)
    return (ir.sign if ir.status == DIVERGENT else 0,
            uv.sign if uv.status == DIVERGENT else 0)


def opposite_signs(e: Exponents) -> bool:
    """True where both ends diverge with opposite signs (a possible balance)."""
    s_ir, s_uv = divergence_signs(e)
    return s_ir * s_uv < 0


def leading_order_table(branch, limit: Limit, e: Exponents) -> float:
    """Exponent of a single branch term ``T`` along the scale-separated limit.

    ``eps`` is ``k1/k`` in the IR and ``k/k1`` in the UV; the term includes the
    triangle area and the Jacobian of the delta-function reduction.
    """
    a, b = e
    mech = classify_limit(branch, limit)
    if limit == "IR":
        if mech == "ES":
            return -a + 2
        if mech == "ID":
            return -a + 1.5 if b == 0 else -a - b / 2 + 1
        return -a - b + 3
    if mech == "PSI":
        return a + b - 2
    if mech == "ES":
        return a - 2
    return a - 2.5 if b == 0 else a + b / 2 - 3


def integral_order(limit: Limit, e: Exponents) -> float:
    """Order of the cutoff-dependent part of the full integral at one end."""
    return (ir_classify(e) if limit == "IR" else uv_classify(e)).order


def classify_grid(a_values, b_values):
    """Verdicts on a tensor grid, as a list of flat records (a varies fastest)."""
    rows = []
    for b in b_values:
        for a in a_values:
            e = Exponents(float(a), float(b))
            ir, uv = ir_classify(e), uv_classify(e)
            s_ir, s_uv = divergence_signs(e)
            rows.append({
                "a": float(a), "b": float(b),
                "ir_status": ir.status, "ir_sign": s_ir,
                "uv_status": uv.status, "uv_sign": s_uv,
                "ir_mechanism": ir.mechanism, "uv_mechanism": uv.mechanism,
            })
    return rows


__all__ = [
    "CONVERGENT", "DIVERGENT", "MARGINAL", "BranchId", "ConvergenceVerdict",
    "classify_grid", "divergence_signs", "integral_order", "ir_classify",
    "leading_order_table", "opposite_signs", "uv_classify",
]
