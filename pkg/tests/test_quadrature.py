import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import beta

from yamabe_proj.quadrature import adaptive_gauss_legendre, half_interval


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 15), st.integers(1, 15))
def test_trig_moments_are_beta_functions(s, g):
    val = half_interval(lambda r: np.sin(r) ** s * np.cos(r) ** g, 1e-13)
    assert val == pytest.approx(0.5 * beta((s + 1) / 2, (g + 1) / 2), rel=1e-12)


def test_refinement_on_peaked_integrand():
    f = lambda x: 1.0 / (1e-4 + x * x)
    exact = 2 * math.atan(1 / 1e-2) / 1e-2
    assert adaptive_gauss_legendre(f, -1, 1, tol=1e-9) == pytest.approx(exact, rel=1e-11)


def test_breakpoints_split_kinks():
    val = adaptive_gauss_legendre(np.abs, -1.0, 2.0, tol=1e-14, breakpoints=(0.0, 5.0))
    assert val == pytest.approx(2.5, abs=1e-14)
