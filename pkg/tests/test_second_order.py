import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncspace.errors import TruncationTooSmall
from ncspace.second_order import (
    angular_momentum_matrices,
    fock_states,
    linear_term_ground_element,
    loglog_slope,
    oscillator_position_matrices,
    radial_inverse_cube,
    second_order_estimate,
    second_order_scaling_check,
)
from ncspace.spectra import PhysicalParams, QuantumNumbers

OMEGAS = np.geomspace(10, 1000, 7)


@pytest.mark.parametrize("l", [0, 1, 2, 3])
def test_angular_momentum_matrices(l):
    Lx, Ly, Lz = angular_momentum_matrices(l)
    np.testing.assert_allclose(Lx @ Ly - Ly @ Lx, 1j * Lz, atol=1e-12)
    np.testing.assert_allclose(Lx @ Lx + Ly @ Ly + Lz @ Lz, l * (l + 1) * np.eye(2 * l + 1), atol=1e-12)


def test_oscillator_matrices_canonical_on_low_states():
    states = fock_states(3)
    A = oscillator_position_matrices(states)
    # <0|a_k^2|0> = 1/2 needs only one intermediate quantum
    for k in range(3):
        assert (A[k] @ A[k])[0, 0] == pytest.approx(0.5)
    assert states[0] == (0, 0, 0)


def test_linear_term_vanishes_in_ground_state():
    assert linear_term_ground_element() == 0.0


def test_radial_inverse_cube_diagonal():
    # <r^-3> = 2 / (n^3 l (l+1)(2l+1))
    M = radial_inverse_cube(2, [3, 4, 5])
    for i, n in enumerate([3, 4, 5]):
        assert M[i, i] == pytest.approx(2 / (n ** 3 * 2 * 3 * 5), rel=1e-10)
    np.testing.assert_allclose(M, M.T)


def test_slope_minus_one():
    pts = second_order_scaling_check(2, 1, OMEGAS, truncation=8)
    assert loglog_slope(*zip(*pts)) == pytest.approx(-1, abs=0.1)


def test_tenfold_frequency():
    pts = dict(second_order_scaling_check(3, 2, [100.0, 1000.0], truncation=8))
    assert pts[100.0] / pts[1000.0] == pytest.approx(10, rel=0.05)


def test_doubling_truncation_keeps_slope():
    a = second_order_scaling_check(2, 1, OMEGAS, truncation=6)
    b = second_order_scaling_check(2, 1, OMEGAS, truncation=12)
    assert loglog_slope(*zip(*a)) == pytest.approx(loglog_slope(*zip(*b)), abs=0.01)


def test_large_frequency_limit():
    # estimate -> -(kappa^2/8) l(l+1) sum_n' |<n'l|r^-3|nl>|^2 / omega
    params = PhysicalParams.reduced(1.0)
    n, l, trunc = 2, 1, 8
    R3 = radial_inverse_cube(l, list(range(l + 1, trunc + 1)))
    col = R3[:, n - l - 1]
    predicted = -params.kappa_rel ** 2 / 8 * l * (l + 1) * float(col @ col)
    w = 1e6
    est = second_order_estimate(QuantumNumbers(n, l), params, w, trunc)
    assert est * w == pytest.approx(predicted, rel=1e-4)


@settings(max_examples=15, deadline=None)
@given(st.floats(0.1, 3.0))
def test_quadratic_in_strength(k):
    base = second_order_estimate(QuantumNumbers(2, 1), PhysicalParams.reduced(1.0), 50.0, 6)
    scaled = second_order_estimate(QuantumNumbers(2, 1), PhysicalParams.reduced(k), 50.0, 6)
    assert scaled == pytest.approx(k * k * base, rel=1e-12)


def test_s_states_do_not_couple():
    assert second_order_estimate(QuantumNumbers(2, 0), PhysicalParams.reduced(1.0), 10.0, 5) == 0.0


def test_truncation_too_small():
    with pytest.raises(TruncationTooSmall):
        second_order_scaling_check(3, 2, OMEGAS, truncation=3)


def test_omega_list_must_increase():
    with pytest.raises(ValueError):
        second_order_scaling_check(2, 1, [10.0, 5.0], truncation=5)


def test_loglog_slope():
    xs = np.array([1.0, 10.0, 100.0])
    assert loglog_slope(xs, 3 / xs) == pytest.approx(-1)
    assert math.isclose(loglog_slope(xs, -xs ** 2), 2)
