import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from ncspace import quadrature as quad
from ncspace import spectra
from ncspace.errors import GridTooCoarse, InconsistentScaling, NonConverged
from ncspace.quadrature import (
    ExpansionGrid,
    GridConfig,
    SpectralConfig,
    TestState,
    constant_overlaps,
    expansion_consistency_check,
    extract_constant,
    grid_oracle,
    hermite_functions,
    hermite_shell_projection,
    ins_fixed_a,
    ins_gaussian_avg,
    shell_projection,
)

# integral d^3x [1/|x| - A^-1/2 1] at a = 1, from the heat-kernel representation
UNIVERSAL = 2 * math.pi * math.log(2)
EXACT_C = 8 * math.log(2) / math.pi


@pytest.fixture(autouse=True)
def _stored_constant():
    spectra.set_ns_constant(None)
    yield
    spectra.set_ns_constant(None)


def closed_shell_term(N):
    odd = sum(1 / j for j in range(1, N + 1, 2))
    return 4 * math.pi * (math.log(2 * N + 1) + np.euler_gamma - 2 * odd)


# ---------------------------------------------------------------------------
# modes and shells


def test_hermite_functions_orthonormal():
    x, w = np.polynomial.hermite.hermgauss(60)
    phi = hermite_functions(20, x) * np.exp(x * x / 2)
    gram = (phi * w) @ phi.T
    np.testing.assert_allclose(gram, np.eye(21), atol=1e-12)


@pytest.mark.parametrize("k", range(0, 13))
def test_constant_overlaps_direct(k):
    direct = integrate.quad(lambda x: hermite_functions(k, x)[k], -40, 40, limit=200)[0]
    assert constant_overlaps(12)[k] == pytest.approx(direct, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 12), st.floats(0.2, 3.0),
       st.floats(-3, 3), st.floats(-3, 3))
def test_cartesian_and_polar_shells_agree(N, a, x, y):
    cart = hermite_shell_projection(N, np.array([x]), np.array([y]), a)[0]
    polar = shell_projection(N, np.array([math.hypot(x, y)]), a)[0]
    assert cart == pytest.approx(polar, abs=1e-11)


def test_shells_resolve_the_constant():
    rho = np.array([0.3, 1.1, 2.0])
    total = sum(shell_projection(N, rho) for N in range(400))
    # partial sums of the completeness relation oscillate; average the last two
    prev = total - shell_projection(399, rho)
    np.testing.assert_allclose(0.5 * (total + prev), 1.0, atol=0.05)


@pytest.mark.parametrize("N", [0, 1, 2, 7, 40, 150])
def test_shell_term_closed_form(N):
    assert quad._shell_term(N, 1.0, 20) == pytest.approx(closed_shell_term(N), rel=1e-10, abs=1e-12)


def test_shell_term_scales_with_a():
    # a enters through rho^2/a and a constant log shift that integrates to zero for N > 0
    assert quad._shell_term(3, 2.0, 20) == pytest.approx(2.0 * quad._shell_term(3, 1.0, 20), rel=1e-10)


def test_origin_density():
    for n in range(1, 6):
        assert quad.origin_density(n) == pytest.approx(spectra.hydrogen_radial(n, 0, 0.0) ** 2 / (4 * math.pi))


# ---------------------------------------------------------------------------
# spectral evaluation


def test_universal_integral_analytic():
    u = quad.universal_integral(1.0)
    assert u["value"] == pytest.approx(UNIVERSAL, rel=1e-5)
    assert abs(u["value"] - UNIVERSAL) < u["error"]


def test_ins_fixed_a_n1():
    r = ins_fixed_a(1, 1.0)
    assert r.value == pytest.approx(EXACT_C * math.pi / 4, rel=1e-5)
    assert r.error_estimate > 0
    assert r.k_sequence[-1][0] == SpectralConfig().hermite_truncation
    d = r.to_dict()
    assert set(d) == {"value", "a_tilde", "n", "k_sequence", "richardson", "error_estimate"}


def test_n_scaling():
    assert ins_fixed_a(2, 1.0).value == pytest.approx(ins_fixed_a(1, 1.0).value / 8, rel=1e-12)


@pytest.mark.parametrize("a", [0.05, 0.5, 2.0])
def test_linear_in_a(a):
    assert ins_fixed_a(1, a).value / a == pytest.approx(ins_fixed_a(1, 1.0).value, rel=1e-6)


def test_nonconverged_at_tiny_truncation():
    with pytest.raises(NonConverged):
        ins_fixed_a(1, 1.0, SpectralConfig(hermite_truncation=16))


def test_invalid_inputs():
    with pytest.raises(ValueError):
        ins_fixed_a(0, 1.0)
    with pytest.raises(ValueError):
        ins_fixed_a(1, 0.0)
    with pytest.raises(ValueError):
        SpectralConfig(hermite_truncation=4)


def test_extract_constant_grid_and_single_point():
    res = extract_constant([1, 2, 3], [0.5, 1.0, 2.0])
    single = extract_constant([1], [1.0], inject=False)
    assert res.max_deviation < 1e-3
    assert single.constant == pytest.approx(res.constant, rel=1e-3)
    assert res.constant == pytest.approx(EXACT_C, rel=1e-5)
    assert spectra.ns_constant() == res.constant
    assert len(res.to_dict()["points"]) == 9


def test_halved_truncation_within_error():
    full = extract_constant([1], [1.0], SpectralConfig(hermite_truncation=512), inject=False)
    half = extract_constant([1], [1.0], SpectralConfig(hermite_truncation=256), inject=False)
    assert abs(full.constant - half.constant) < full.error_estimate


def test_inconsistent_scaling(monkeypatch):
    real = quad.ins_fixed_a

    def skewed(n, a, cfg=SpectralConfig()):
        r = real(n, a, cfg)
        r.value *= 1 + 0.01 * n
        return r

    monkeypatch.setattr(quad, "ins_fixed_a", skewed)
    with pytest.raises(InconsistentScaling):
        extract_constant([1, 2], [1.0])


def test_gaussian_average():
    lin = ins_gaussian_avg(1)
    direct = ins_gaussian_avg(1, method="quadrature")
    assert lin == pytest.approx(direct, rel=1e-9)
    assert lin == pytest.approx(EXACT_C * math.sqrt(math.pi) / 2, rel=1e-5)
    assert 27 * ins_gaussian_avg(3) == pytest.approx(lin, rel=1e-12)


def test_oscillator_average_oracle():
    assert quad.oscillator_average(lambda a: a * a) == pytest.approx(1.5, rel=1e-12)
    assert quad.oscillator_average(lambda a: a) == pytest.approx(2 / math.sqrt(math.pi), rel=1e-12)


def test_shift_chain_matches_asymptotic_formula():
    c = extract_constant([1], [1.0]).constant
    params = spectra.PhysicalParams.reduced(0.3)
    for n in (1, 2):
        shift = params.chi ** 2 * ins_gaussian_avg(n)
        assert shift == pytest.approx(spectra.delta_E_ns_asymptotic(n, params).value, rel=1e-10)
    assert spectra.delta_E_ns_asymptotic(1, params).diagnostics["constant"] == c


# ---------------------------------------------------------------------------
# grid oracle


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
def test_grid_agrees_with_spectral(n, a):
    assert grid_oracle(n, a) == pytest.approx(ins_fixed_a(n, a).value, rel=0.02)


def test_grid_scaling():
    assert grid_oracle(1, 0.5) / grid_oracle(1, 1.0) == pytest.approx(0.5, rel=0.02)


def test_grid_zero_a():
    assert grid_oracle(1, 0.0) == pytest.approx(0.0, abs=1e-12)


def test_grid_too_coarse():
    with pytest.raises(GridTooCoarse):
        grid_oracle(1, 0.1, GridConfig(rho_max=20, n_rho=40))
    with pytest.raises(ValueError):
        GridConfig(n_rho=5000)


# ---------------------------------------------------------------------------
# expansion remainder


def test_expansion_halving_theta():
    r = expansion_consistency_check([0.1, 0.05])
    assert 6.5 < r[0] / r[1] < 9.5


def test_expansion_zero_theta():
    assert expansion_consistency_check([0.0])[0] < 1e-12


def test_first_order_only_slope_two():
    s = [0.05, 0.1, 0.2]
    r = expansion_consistency_check(s, order=1)
    assert np.polyfit(np.log(s), np.log(r), 1)[0] == pytest.approx(2.0, abs=0.1)


def test_refinement_guard():
    s = [0.05, 0.1, 0.2]
    with pytest.raises(GridTooCoarse):
        expansion_consistency_check(s, grid=ExpansionGrid(8, 20, 6, 25), check_refinement=True)


def test_custom_test_state():
    s = [0.05, 0.1, 0.2]
    r = expansion_consistency_check(s, test_state=TestState(m=2, rho0=3.5))
    assert np.polyfit(np.log(s), np.log(r), 1)[0] == pytest.approx(3.0, abs=0.2)
