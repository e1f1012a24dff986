import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from yamabe_proj import continuation as cont
from yamabe_proj.bvp import build_profile, ode_residual
from yamabe_proj.errors import FoldNotFoundError
from yamabe_proj.model import ProblemSpec, SpaceSpec, bifurcation_eigenvalue
from yamabe_proj.spectral import eigenfunction

CP1, CP2, HP1 = SpaceSpec("cp", 1), SpaceSpec("cp", 2), SpaceSpec("hp", 1)


def _exact_moment(space, k, power):
    """Exact integral of p_k(cos^2 r)^power sin^sigma cos^gamma via Beta functions."""
    coeffs = [Fraction(1)]
    for _ in range(power):
        p = eigenfunction(space, k).coeffs
        out = [Fraction(0)] * (len(coeffs) + len(p) - 1)
        for i, a in enumerate(coeffs):
            for j, b in enumerate(p):
                out[i + j] += a * b
        coeffs = out
    sigma, gamma = space.weight_exponents
    a = (sigma + 1) // 2
    total = Fraction(0)
    for m, c in enumerate(coeffs):
        b = (gamma + 2 * m + 1) // 2
        total += c * Fraction(math.factorial(a - 1) * math.factorial(b - 1),
                              2 * math.factorial(a + b - 1))
    return total


@pytest.fixture(scope="module")
def cp2_branch():
    return cont.branch_from(CP2, 3.0, 1, steps=90, ds=0.02, direction=1)


@pytest.mark.parametrize("space,k", [(CP2, 1), (CP2, 2), (HP1, 1), (SpaceSpec("hp", 2), 2),
                                     (SpaceSpec("cp", 3), 1)])
def test_weighted_moments_exact(space, k):
    for power in (2, 3):
        exact = float(_exact_moment(space, k, power))
        assert cont.weighted_moment(space, k, power) == pytest.approx(exact, rel=1e-11, abs=1e-14)


def test_lambda_prime_zero_cp2():
    i2, i3 = _exact_moment(CP2, 1, 2), _exact_moment(CP2, 1, 3)
    expected = -(3 - 1) * 12 * float(i3) / (2 * float(i2))
    assert cont.lambda_prime_zero(CP2, 3.0, 1) == pytest.approx(expected, rel=1e-10)
    assert expected == pytest.approx(-2.4)


def test_lambda_prime_zero_vanishes_on_spheres():
    assert abs(cont.lambda_prime_zero(HP1, 3.0, 1)) < 1e-10
    assert abs(cont.lambda_prime_zero(CP1, 3.0, 1)) < 1e-10


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([(CP2, 1), (CP2, 2), (SpaceSpec("hp", 2), 1)]),
       st.floats(2.05, 2.6), st.floats(2.05, 2.6))
def test_lambda_prime_zero_q_scaling(case, q, q2):
    space, k = case
    r = cont.lambda_prime_zero(space, q2, k) / cont.lambda_prime_zero(space, q, k)
    lk, lk2 = bifurcation_eigenvalue(space, q, k), bifurcation_eigenvalue(space, q2, k)
    assert r == pytest.approx((q2 - 1) * lk2 / ((q - 1) * lk), rel=1e-9)


def test_cubic_integral_check():
    for n in (2, 3, 4):
        rep = cont.cubic_integral_check(n)
        assert rep["quadrature"] == pytest.approx(float(_exact_moment(SpaceSpec("cp", n), 1, 3)),
                                                  rel=1e-10)
        assert rep["self_validation_delta"] < 1e-10
        assert rep["agree"] is (abs(rep["quadrature"] - rep["closed_form"]) <= 1e-10)
    assert abs(cont.cubic_integral_check(1)["quadrature"]) < 1e-14


def test_trivial_lin_miss_examples():
    vals = cont.trivial_lin_miss(CP2, 3.0, [12.0, 22.0, 32.0])
    assert abs(vals[0]) < 1e-6 and abs(vals[2]) < 1e-6
    assert abs(vals[1]) > 1e-2
    prof = build_profile(ProblemSpec(CP2, 3, 12.0), 0.0, 0.0)
    assert abs(cont.linearized_miss(prof)) < 1e-6
    prof = build_profile(ProblemSpec(CP2, 3, 22.0), 0.0, 0.0)
    assert abs(cont.linearized_miss(prof)) > 1e-2


def test_locate_bifurcations_low_modes():
    roots, grid, vals = cont.locate_bifurcations(CP2, 3.0, 33.0, spacing=1e-2)
    np.testing.assert_allclose(roots, [12.0, 32.0], rtol=1e-6)
    assert np.all(np.isfinite(vals))


def test_branch_first_point(cp2_branch):
    p0 = cp2_branch.points[0]
    assert p0.s == pytest.approx(0.02)
    phi = eigenfunction(CP2, 1)
    assert p0.sup_norm == pytest.approx(0.02 * max(abs(float(phi(0))), abs(float(phi(1)))), rel=0.1)
    assert abs(p0.lam - 12.0) < 0.1
    assert p0.zero_count == 1


def test_branch_invariants(cp2_branch):
    br = cp2_branch
    assert not br.aborted
    assert all(p.miss_norm < 1e-9 for p in br.points)
    for i in range(1, len(br.points)):
        step = br.points[i].s - br.points[i - 1].s
        assert br.tangents[i - 1] @ (br.states[i] - br.states[i - 1]) == pytest.approx(step, abs=1e-9)
    lm = np.array([p.lin_miss for p in br.points])
    assert np.max(np.abs(np.diff(lm))) < 0.05
    assert np.all(np.diff(br.lambdas()) != 0)


def test_branch_contains_fold_below_lambda1(cp2_branch):
    lams = cp2_branch.lambdas()
    i = int(np.argmin(lams))
    assert 0 < i < len(lams) - 1 and lams[i] < 12.0


def test_tangency(cp2_branch):
    assert cont.tangency_distance(cp2_branch, 0) < 0.1


def test_bifurcation_slope_richardson():
    s1 = cont.bifurcation_slope(CP2, 3.0, 1, 0.01)
    s2 = cont.bifurcation_slope(CP2, 3.0, 1, 0.005)
    rich = 2 * s2 - s1
    assert rich == pytest.approx(cont.lambda_prime_zero(CP2, 3.0, 1), rel=0.05)


def test_find_degenerate_cp2():
    d = cont.find_degenerate(CP2, 3.0)
    assert d.lam < 12.0
    assert abs(d.point.lin_miss) < 1e-6 and abs(d.point.dlam_ds) < 1e-6
    assert d.lin_miss_before * d.lin_miss_after < 0
    assert not d.profile.trivial and ode_residual(d.profile) < 1e-6
    assert d.branch.fold is d.point
    assert d.u.min() > 0


def test_find_degenerate_cp2_other_exponent():
    # q = 3.5: lambda_1 = 8, transcritical on both sides
    d = cont.find_degenerate(CP2, 3.5)
    assert d.lam < bifurcation_eigenvalue(CP2, 3.5, 1)


def test_find_degenerate_reports_missing_fold():
    with pytest.raises(FoldNotFoundError) as info:
        cont.find_degenerate(HP1, 3.0, steps=40)
    branches = info.value.branch
    assert isinstance(branches, list) and len(branches) == 2
    assert {b.direction for b in branches} == {1, -1}
    assert min(p.lam for b in branches for p in b.points) >= 16.0


def test_branch_validation():
    with pytest.raises(ValueError):
        cont.branch_from(CP2, 3.0, 0)
    with pytest.raises(ValueError):
        cont.branch_from(CP2, 3.0, 1, ds=0)
    with pytest.raises(ValueError):
        cont.branch_from(CP2, 3.0, 1, direction=2)
