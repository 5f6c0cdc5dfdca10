import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracle
from iwkinetic.resonance import (
    BRANCHES, BranchId, DoubleRootError, branch_roots, classify_limit, e_curves,
    jacobian, jacobian_values, kinematic_box_contains, omega_box,
    omega_box_intervals, resonance_residual, solve_branch,
)
from iwkinetic.spectral import DomainError

SWAP = {"a1": "a2", "a2": "a1", "b1": "c1", "c1": "b1", "b2": "c2", "c2": "b2"}


def random_box(rng, n):
    """In-box ``(k, k1, k2, m)`` samples over several decades."""
    k = 10 ** rng.uniform(-2, 2, n)
    k1 = k * 10 ** rng.uniform(-3, 3, n)
    t = rng.uniform(1e-3, 1 - 1e-3, n)
    k2 = np.abs(k - k1) + t * (k + k1 - np.abs(k - k1))
    m = rng.choice([-1, 1], n) * 10 ** rng.uniform(-2, 2, n)
    return k, k1, k2, m


def mismatch(kind, k, k1, k2, m, m1):
    if kind == "a":
        return k / abs(m) - k1 / abs(m1) - k2 / abs(m - m1)
    if kind == "b":
        return k1 / abs(m1) - k2 / abs(m1 - m) - k / abs(m)
    return k2 / abs(m + m1) - k / abs(m) - k1 / abs(m1)


def test_branch_a1_example():
    r = solve_branch("a1", 1, 0.5, 0.5, 1)
    assert r.m1 == pytest.approx(1 + np.sqrt(2) / 2, abs=1e-12)
    assert r.m2 == pytest.approx(-np.sqrt(2) / 2, abs=1e-12)
    assert 0.5 / r.m1 + 0.5 / abs(r.m2) == pytest.approx(1.0, abs=1e-12)


def test_branch_a2_example():
    r = solve_branch("a2", 1, 0.5, 0.5, 1)
    assert (r.m1, r.m2) == pytest.approx((-np.sqrt(2) / 2, 1 + np.sqrt(2) / 2), abs=1e-12)


def test_branch_a1_ir_limit():
    r = solve_branch("a1", 1, 1e-8, 1 + 3e-9, 1)
    assert r.m1 == pytest.approx(2, rel=1e-6) and r.m2 == pytest.approx(-1, rel=1e-6)


def test_ir_limit_matches_classification():
    r = solve_branch("a1", 1.0, 1e-6, 1.0, 1.0)
    assert abs(r.m1 - 2.0) < 1e-3


def test_residuals_10k_samples():
    rng = np.random.default_rng(1)
    k, k1, k2, m = random_box(rng, 10_000)
    for br in BRANCHES:
        m1, m2 = branch_roots(br, k, k1, k2, m)
        res = resonance_residual(br, k, k1, k2, m, m1, m2)
        assert np.max(res) < 1e-10, br


def test_jacobian_matches_finite_differences():
    rng = np.random.default_rng(2)
    k, k1, k2, m = random_box(rng, 2000)
    for br in BRANCHES:
        kind = br[0]
        m1, m2 = branch_roots(br, k, k1, k2, m)
        jac = jacobian_values(k1, k2, m1, m2)
        h = 1e-6 * np.minimum(np.abs(m1), np.abs(m2))
        fd = np.abs([(mismatch(kind, *x, y + s) - mismatch(kind, *x, y - s)) / (2 * s)
                     for x, y, s in zip(zip(k, k1, k2, m), m1, h)])
        assert np.max(np.abs(fd / jac - 1)) < 1e-6, br


def test_jacobian_example():
    r = solve_branch("a1", 1, 0.5, 0.5, 1)
    expected = 0.5 / r.m1 ** 2 + 0.5 / r.m2 ** 2
    assert jacobian(r) == pytest.approx(expected, rel=1e-12)
    assert jacobian(r) == pytest.approx(1.17157, abs=1e-5)


@given(st.floats(0.1, 10), st.floats(0.1, 10))
def test_jacobian_scaling(alpha, beta):
    r0 = solve_branch("b2", 1.0, 0.6, 0.7, 1.0)
    r = solve_branch("b2", alpha, 0.6 * alpha, 0.7 * alpha, beta)
    assert jacobian(r) == pytest.approx(alpha / beta ** 2 * jacobian(r0), rel=1e-9)


@pytest.mark.parametrize("br", BRANCHES)
def test_exchange_symmetry(br):
    rng = np.random.default_rng(3)
    k, k1, k2, m = random_box(rng, 500)
    m1, m2 = branch_roots(br, k, k1, k2, m)
    s1, s2 = branch_roots(SWAP[br], k, k2, k1, m)
    if br[0] == "a":
        np.testing.assert_allclose((s1, s2), (m2, m1), rtol=1e-9)
    else:
        # b with p1 = p2 + p exchanged becomes c with p2 = p + p1
        np.testing.assert_allclose(jacobian_values(k2, k1, s1, s2),
                                   jacobian_values(k1, k2, m1, m2), rtol=1e-8)
        np.testing.assert_allclose((s1, s2), (m2, m1), rtol=1e-9)


def test_roots_agree_with_bracketing_oracle():
    rng = np.random.default_rng(4)
    for k, k1, k2, m in zip(*random_box(rng, 20)):
        for kind in "abc":
            ref = sorted(oracle.roots(kind, k, k1, k2, m))
            got = sorted(branch_roots(kind + "1", k, k1, k2, m)[0:1]
                         + branch_roots(kind + "2", k, k1, k2, m)[0:1])
            assert len(ref) == 2
            np.testing.assert_allclose(got, ref, rtol=1e-8)


def test_negative_m_reflects():
    for br in BRANCHES:
        p = solve_branch(br, 1, 0.6, 0.7, 2.0)
        q = solve_branch(br, 1, 0.6, 0.7, -2.0)
        assert (q.m1, q.m2) == pytest.approx((-p.m1, -p.m2))


def test_solve_branch_domain():
    with pytest.raises(DomainError):
        solve_branch("a1", 1, 0.2, 0.5, 1)
    with pytest.raises(DomainError):
        solve_branch("a1", 1, 0.5, 0.6, 0)
    with pytest.raises(DomainError):
        solve_branch("a1", 0, 0.5, 0.6, 1)
    # collinear boundary is accepted
    assert solve_branch("b1", 1, 0.5, 0.5, 1).jacobian > 0


def test_double_root_error_is_domain_error():
    assert issubclass(DoubleRootError, DomainError)


def test_branch_id():
    assert {BranchId.parse(b).name for b in BRANCHES} == set(BRANCHES)
    with pytest.raises(ValueError):
        BranchId("d", 1)
    with pytest.raises(ValueError):
        BranchId("a", 3)


@pytest.mark.parametrize("br, limit, mech", [
    ("a1", "IR", "ES"), ("c2", "IR", "ES"), ("a2", "IR", "ID"), ("c1", "IR", "ID"),
    ("b1", "IR", "PSI"), ("b2", "IR", "PSI"),
    ("a1", "UV", "PSI"), ("a2", "UV", "PSI"), ("b1", "UV", "ES"), ("c1", "UV", "ES"),
    ("b2", "UV", "ID"), ("c2", "UV", "ID"),
])
def test_classify_limit(br, limit, mech):
    assert classify_limit(br, limit) == mech


def test_classify_limit_bad():
    with pytest.raises(ValueError):
        classify_limit("a1", "mid")


@pytest.mark.parametrize("br, limit, check", [
    ("a1", "IR", lambda m1, m2: (m1 / 2, m2)),       # ES: m1 -> 2m, m2 -> -m
    ("a2", "IR", lambda m1, m2: (m1, m2)),            # ID: m1 -> 0 relative, m2 -> m
])
def test_limit_roots(br, limit, check):
    r = solve_branch(br, 1.0, 1e-7, 1.0, 1.0)
    if br == "a1":
        assert (r.m1, r.m2) == pytest.approx((2.0, -1.0), rel=1e-5)
    else:
        assert r.m2 == pytest.approx(1.0, abs=1e-3)


@pytest.mark.parametrize("sides, label", [
    ((1, 0.5, 0.6), "inside"), ((1, 0.5, 0.5), "boundary"), ((1, 0.2, 0.5), "outside"),
])
def test_kinematic_box(sides, label):
    assert kinematic_box_contains(*sides) == label


def test_e_curves_example():
    assert e_curves(0.25, 1.0, 1.0) == pytest.approx((-0.25, 1.75, -0.5, 3.5))


@given(st.floats(0.15, 0.85).filter(lambda x: abs(x - 0.5) > 1e-3))
def test_e_curve_symmetries(w1):
    w, m, f = 1.0, 1.0, 0.1
    E1, E2, E3, _ = e_curves(w - w1, w, m, f)
    F1, F2, F3, _ = e_curves(w1, w, m, f)
    assert E1 == pytest.approx(m - F2, abs=1e-12)
    assert E3 == pytest.approx(m - F3, rel=1e-9, abs=1e-12)


def test_e_curves_nan_when_evanescent():
    E = e_curves(0.05, 1.0, 1.0, 0.1)
    assert all(np.isnan(E))


def test_omega_box_regions():
    assert omega_box(0.25, -0.3, 1, 1) == "b"
    assert omega_box(0.25, 2.5, 1, 1) == "c"
    assert omega_box(1.5, -1.0, 1, 1) == "a"
    assert omega_box(2.5, 0.5, 1, 1) == "d"
    assert omega_box(0.25, -0.1, 1, 1) == "outside"
    assert omega_box(0.25, 5.0, 1, 1) == "outside"
    assert omega_box(0.05, 0.5, 1, 1, 0.1) == "outside"
    with pytest.raises(DomainError):
        omega_box(0.5, 0.5, 0.1, 1, 0.2)


# at omega1 = omega / 2 the lobes run off to infinity (E3, E4 blow up)
@given(st.floats(0.12, 3.0).filter(lambda x: abs(x - 1) > 0.12 and abs(x - 0.5) > 0.02))
def test_omega_box_intervals_bounded_by_curves(w1):
    w, m, f = 1.0, 1.0, 0.1
    ivals = omega_box_intervals(w1, w, m, f)
    curves = [v for v in e_curves(w1, w, m, f) if np.isfinite(v)] + [0.0, m]
    assert ivals
    for lo, hi in ivals:
        assert any(np.isclose(lo, c) for c in curves)
        assert any(np.isclose(hi, c) for c in curves)
        for x in np.linspace(lo, hi, 9)[1:-1]:
            assert omega_box(w1, x, w, m, f) != "outside"


def test_two_lobes_below_omega_with_rotation():
    # with f = 0.1 omega the omega1 < omega part of the box splits in two
    w, m, f = 1.0, 1.0, 0.1
    w1 = np.linspace(0.0, 1.0, 401)[1:-1]
    inside = np.array([bool(omega_box_intervals(x, w, m, f)) if f <= x and abs(w - x) >= f
                       else False for x in w1])
    runs = np.diff(inside.astype(int))
    assert np.sum(runs == 1) + inside[0] == 2
