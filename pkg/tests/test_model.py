import math

import pytest
from hypothesis import given, strategies as st

from yamabe_proj.errors import ConfigError, DomainError, InvalidExponentError, PositivityError
from yamabe_proj.model import (Family, ProblemSpec, SpaceSpec, bifurcation_eigenvalue,
                               check_exponent, drift, nonlinearity, nonlinearity_dw,
                               volume_weight)

CP1, CP2, HP1 = SpaceSpec("cp", 1), SpaceSpec("cp", 2), SpaceSpec("hp", 1)
spaces = st.builds(SpaceSpec, st.sampled_from(["cp", "hp"]), st.integers(1, 8))


def test_family_parse():
    assert Family.parse("CP") is Family.CP
    assert Family.parse(Family.HP) is Family.HP
    with pytest.raises(ConfigError):
        Family.parse("rp")


def test_space_validation():
    with pytest.raises(ConfigError):
        SpaceSpec("cp", 0)
    with pytest.raises(ConfigError):
        SpaceSpec("hp", 1.5)


def test_dimensions_and_critical_exponents():
    assert CP2.real_dimension == 4 and HP1.real_dimension == 4
    assert CP2.critical_exponent == pytest.approx(4.0)
    assert math.isinf(CP1.critical_exponent)
    assert SpaceSpec("hp", 2).critical_exponent == pytest.approx(8 / 3)
    assert str(CP2) == "CP^2"


def test_drift_constants():
    assert CP2.drift_constants == (4, 1)
    assert HP1.drift_constants == (6, 3)
    assert CP2.weight_exponents == (3, 1)
    assert HP1.weight_exponents == (3, 3)


@given(spaces, st.integers(0, 30))
def test_gap_increasing(space, k):
    assert space.gap(0) == 0
    assert space.gap(k + 1) > space.gap(k)


@given(spaces)
def test_critical_exponent_above_two(space):
    assert space.critical_exponent > 2


def test_problem_validation():
    with pytest.raises(InvalidExponentError):
        ProblemSpec(CP2, 2.0, 1.0)
    with pytest.raises(InvalidExponentError):
        ProblemSpec(CP2, 4.0, 1.0)
    with pytest.raises(ConfigError):
        ProblemSpec(CP2, 3.0, -1.0)
    with pytest.raises(InvalidExponentError):
        check_exponent(CP2, float("nan"))
    p = ProblemSpec(CP1, 7.0, 0.0)
    assert p.with_lambda(3).lam == 3.0


def test_drift_examples():
    assert drift(CP1, math.pi / 4) == pytest.approx(0, abs=1e-15)
    assert drift(HP1, math.pi / 4) == pytest.approx(0, abs=1e-15)
    assert drift(CP2, math.pi / 4) == pytest.approx(2)
    for r in (0.0, math.pi / 2, -0.1, 2.0):
        with pytest.raises(DomainError):
            drift(CP2, r)


def test_nonlinearity_examples():
    assert nonlinearity(ProblemSpec(CP2, 3, 5), 0.0) == 0
    assert nonlinearity(ProblemSpec(CP2, 3, 12), 1.0) == pytest.approx(-24)
    assert nonlinearity(ProblemSpec(CP2, 3, 0), 0.7) == 0
    with pytest.raises(PositivityError):
        nonlinearity(ProblemSpec(CP2, 3, 1), -1.0)
    with pytest.raises(PositivityError):
        nonlinearity_dw(ProblemSpec(CP2, 3, 1), -2.0)


@given(st.floats(2.01, 3.99), st.floats(0, 100))
def test_linearization_at_zero(q, lam):
    assert nonlinearity_dw(ProblemSpec(CP2, q, lam), 0.0) == pytest.approx(-lam * (q - 2))


@given(st.floats(-0.9, 3), st.floats(2.1, 3.9))
def test_nonlinearity_derivative_matches_difference(w, q):
    p = ProblemSpec(CP2, q, 7.0)
    h = 1e-6
    fd = (nonlinearity(p, w + h) - nonlinearity(p, w - h)) / (2 * h)
    assert nonlinearity_dw(p, w) == pytest.approx(fd, rel=1e-6, abs=1e-6)


def test_bifurcation_eigenvalue_examples():
    assert bifurcation_eigenvalue(CP2, 3, 1) == 12
    assert bifurcation_eigenvalue(HP1, 4, 1) == 8
    assert bifurcation_eigenvalue(HP1, 2.5, 0) == 0
    with pytest.raises(InvalidExponentError):
        bifurcation_eigenvalue(CP2, 2, 1)


def test_volume_weight_examples():
    assert volume_weight(CP1, math.pi / 2) == pytest.approx(0, abs=1e-16)
    assert volume_weight(CP1, math.pi / 4) == pytest.approx(0.5)
    assert volume_weight(HP1, math.pi / 4) == pytest.approx(1 / 8)
