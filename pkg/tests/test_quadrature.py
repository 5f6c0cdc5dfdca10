import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracle
from iwkinetic.quadrature import (
    IntegralResult, QuadratureConfig, QuadratureError, branch_term,
    collision_integral, collision_integrand, cutoff_scaling,
    find_steady_a, fit_difference_slope,
)
from iwkinetic.spectral import DomainError, Exponents, PhysicalParams


def sample_points(n, seed=0):
    rng = np.random.default_rng(seed)
    for _ in range(n):
        k1 = 10 ** rng.uniform(-1.3, 0.7)
        lo, hi = abs(1 - k1), 1 + k1
        k2 = lo + rng.uniform(0.02, 0.98) * (hi - lo)
        yield k1, k2, rng.uniform(2.5, 4.5), rng.uniform(-1.5, 2.5)


def test_integrand_matches_vector_oracle():
    for k1, k2, a, b in sample_points(20):
        ref = oracle.integrand(k1, k2, 1.0, 1.0, a, b)
        got = collision_integrand(k1, k2, 1.0, 1.0, Exponents(a, b))
        assert got == pytest.approx(ref, rel=1e-4), (k1, k2, a, b)


def test_integrand_golden():
    v = collision_integrand(0.5, 0.6, 1.0, 1.0, Exponents(3.7, 0.0))
    assert v == pytest.approx(647.5230826, rel=1e-9)


@given(st.floats(0.05, 5), st.floats(0.02, 0.98), st.floats(2.5, 4.5), st.floats(-2, 3))
def test_integrand_exchange_symmetry(k1, t, a, b):
    lo, hi = abs(1 - k1), 1 + k1
    k2 = lo + t * (hi - lo)
    e = Exponents(a, b)
    u, v = collision_integrand(k1, k2, 1, 1, e), collision_integrand(k2, k1, 1, 1, e)
    assert u == pytest.approx(v, rel=1e-9, abs=1e-12 * abs(u))


def test_integrand_inverse_square_root_at_box_edge():
    # near k2 = k + k1 the integrand grows like d**-1/2 with d the distance
    d = np.array([1e-6, 1e-7, 1e-8])
    vals = collision_integrand(0.5, 1.5 - d, 1.0, 1.0, Exponents(3.7, 0.0))
    slope = np.polyfit(np.log(d), np.log(np.abs(vals)), 1)[0]
    assert slope == pytest.approx(-0.5, abs=1e-3)


def test_integrand_vanishes_at_equilibrium():
    # n = 1 / omega makes every occupation factor vanish
    k1, k2 = np.array([0.3, 0.9, 2.0]), np.array([0.9, 0.5, 1.7])
    vals = collision_integrand(k1, k2, 1.0, 1.0, Exponents(1.0, -1.0))
    ref = collision_integrand(k1, k2, 1.0, 1.0, Exponents(1.2, -1.0))
    assert np.all(np.abs(vals) < 1e-12 * np.abs(ref))


def test_integrand_domain():
    with pytest.raises(DomainError):
        collision_integrand(0.5, 0.5, 1.0, 1.0, Exponents(3.7, 0))
    with pytest.raises(DomainError):
        collision_integrand(0.5, 0.6, 1.0, 1.0, Exponents(3.7, 0), PhysicalParams(f=0.1))


def test_branch_term_recombines_integrand():
    e = Exponents(3.3, 0.7)
    k1, k2 = 0.7, 0.8
    s = 0.25 * math.sqrt((1 + k1 + k2) * (k1 + k2 - 1) * (1 - k1 + k2) * (1 + k1 - k2))
    total = sum(branch_term(b, k1, k2, e=e) * (1 if b[0] == "a" else -1)
                for b in ("a1", "a2", "b1", "b2", "c1", "c2"))
    assert total == pytest.approx(collision_integrand(k1, k2, 1, 1, e), rel=1e-12)
    assert s > 0


def test_config_validation():
    with pytest.raises(DomainError):
        QuadratureConfig(rel_tol=0)
    with pytest.raises(DomainError):
        QuadratureConfig(ir_cut=1.0)
    with pytest.raises(DomainError):
        QuadratureConfig(uv_cut=0.5)
    c = QuadratureConfig(rel_tol=1e-5, uv_cut=100.0)
    assert QuadratureConfig.from_dict(c.to_dict()) == c


def test_result_raise_for_status():
    ok = IntegralResult(1.0, 1e-9, 0.0, math.inf, True)
    assert ok.raise_for_status() is ok
    bad = IntegralResult(1.0, 1.0, 0.0, math.inf, False)
    with pytest.raises(QuadratureError) as exc:
        bad.raise_for_status()
    assert exc.value.result is bad


def test_divergent_end_needs_cutoff():
    with pytest.raises(DomainError):
        collision_integral(Exponents(3.5, 0.5))
    with pytest.raises(DomainError):
        collision_integral(Exponents(3.5, 0.5), QuadratureConfig(ir_cut=1e-3))


def test_rotation_rejected():
    with pytest.raises(DomainError):
        collision_integral(Exponents(3.7, 0), params=PhysicalParams(f=0.01))


@pytest.fixture(scope="module")
def c37():
    return collision_integral(Exponents(3.7, 0.0))


def test_c37_golden(c37):
    assert c37.converged
    assert c37.value == pytest.approx(6.80269, rel=1e-4)
    assert c37.error_estimate <= 1e-6 * c37.scale + 1e-12


def test_sign_change_on_convergent_segment(c37):
    lo = collision_integral(Exponents(3.6, 0.0)).value
    hi = collision_integral(Exponents(3.8, 0.0)).value
    assert lo < 0 < c37.value < hi


def test_tolerance_refinement_is_stable(c37):
    tight = collision_integral(Exponents(3.7, 0.0), QuadratureConfig(rel_tol=1e-8))
    assert abs(tight.value - c37.value) <= 1e-6 * c37.scale


def test_cutoffs_are_recorded():
    r = collision_integral(Exponents(3.5, 0.5), QuadratureConfig(ir_cut=1e-3, uv_cut=1e3))
    assert (r.ir_cut, r.uv_cut) == (1e-3, 1e3)
    assert math.isfinite(r.value) and r.converged


def test_find_steady_a_injected():
    assert find_steady_a(fun=lambda a: a - 3.7, xtol=1e-10) == pytest.approx(3.7, abs=1e-9)
    with pytest.raises(QuadratureError):
        find_steady_a(fun=lambda a: a - 5.0)


@given(st.floats(-1.5, -0.1), st.floats(0.1, 10), st.floats(-5, 5))
def test_fit_difference_slope_recovers_power(p, amp, i0):
    cuts = np.array([1e-2, 1e-3, 1e-4, 1e-5])
    vals = i0 + amp * cuts ** p
    assert fit_difference_slope(cuts, vals) == pytest.approx(p, abs=1e-9)


def test_fit_difference_slope_log():
    cuts = np.array([1e-2, 1e-3, 1e-4])
    assert fit_difference_slope(cuts, 2.0 + np.log(cuts)) == pytest.approx(0.0, abs=1e-12)


def test_cutoff_scaling_needs_dynamic_range():
    with pytest.raises(QuadratureError):
        cutoff_scaling(Exponents(3.5, 0.5), "IR", [1e-3, 1e-4])
    with pytest.raises(QuadratureError):
        cutoff_scaling(Exponents(3.5, 0.5), "IR", [1e-3, 5e-4, 2e-4])
    with pytest.raises(ValueError):
        cutoff_scaling(Exponents(3.5, 0.5), "mid", [1e-2, 1e-3, 1e-4])
