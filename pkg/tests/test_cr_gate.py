import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zzfree.cr_gate import (PAULI_LABELS, CRContext, DriveSpec, RegimeError, cancellation_amplitude, cr_drive_matrix,
                            driven_coefficients, eta_closed_form_ct, eta_closed_form_tt, eta_fit, eta_from_samples,
                            excitation_numbers, omega_star_formula, pauli, pauli_decompose, rotating_frame_rwa)
from zzfree.devices import device_spec, with_params
from zzfree.effective import gamma_ratio, j_coupling
from zzfree.errors import DivergenceError
from zzfree.exact import static_zz_exact
from zzfree.gate_error import flip_odd

ODD = ("ZX", "IX", "ZY", "IY")


@pytest.fixture(scope="module")
def ctx():
    return {i: CRContext(device_spec(i)) for i in (1, 2, 7, 8, 9)}


def test_drive_matrix_examples():
    assert not cr_drive_matrix(0.0, 3).any()
    D = cr_drive_matrix(0.02, 3)
    assert np.array_equal(D, np.array([[0, 0.02, 0], [0.02, 0, 0.02], [0, 0.02, 0]]))
    Ds = cr_drive_matrix(0.02, 3, sqrt=True)
    assert Ds[1, 2] == pytest.approx(math.sqrt(2) * D[1, 2])
    assert np.allclose(cr_drive_matrix(0.02, 4, phase=0.3), cr_drive_matrix(0.02, 4, phase=0.3).conj().T)


def test_drive_spec_rejects_negative_amplitude():
    with pytest.raises(ValueError):
        DriveSpec(-1e-3, 5.0)


def test_rwa_undriven_shift_and_excitation_conservation():
    n1, n2 = 4, 4
    rng = np.random.default_rng(0)
    A = rng.normal(size=(16, 16))
    H = A + A.T
    Hr = rotating_frame_rwa(H, DriveSpec(0.0, 5.1), (n1, n2))
    ex = excitation_numbers(n1, n2)
    N = np.diag(ex)
    assert np.abs(Hr @ N - N @ Hr).max() < 1e-14
    same = ex[:, None] == ex[None, :]
    off = ~np.eye(16, dtype=bool)
    # excitation-conserving couplings retained untouched
    assert np.allclose(Hr[same & off], H[same & off])
    assert np.allclose(np.diag(Hr), np.diag(H) - 5.1 * ex)


def test_rwa_drive_keeps_half_amplitude():
    Hr = rotating_frame_rwa(np.zeros((9, 9)), DriveSpec(0.04, 0.0), (3, 3))
    # control hop |0,0> <-> |1,0>
    assert Hr[0, 3] == pytest.approx(0.02)


def test_pauli_decompose_examples():
    assert pauli_decompose(pauli("ZZ") / 4).ZZ == pytest.approx(1.0)
    assert pauli_decompose(0.003 * pauli("ZX") / 2).ZX == pytest.approx(0.003)
    with pytest.raises(ValueError):
        pauli_decompose(np.triu(np.ones((4, 4))))


@settings(max_examples=50)
@given(st.integers(0, 2 ** 32 - 1))
def test_pauli_round_trip(seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    H = A + A.conj().T
    c = pauli_decompose(H)
    assert np.abs(c.matrix() - H).max() < 1e-12
    assert len(c.vector()) == 15 and set(c.c) == set(PAULI_LABELS)


@pytest.mark.parametrize("i", [1, 8])
def test_undriven_limit(ctx, i):
    c = ctx[i].coefficients(0.0)
    assert all(abs(c.alpha(p)) < 1e-12 for p in ODD)
    assert abs(c.ZZ - static_zz_exact(device_spec(i))) < 1e-6


@pytest.mark.parametrize("i", [1, 8])
def test_frame_sanity_diagonal_combination(ctx, i):
    H4 = ctx[i].h4(0.0)
    d = np.real(np.diag(H4))
    assert d[3] - d[2] - d[1] + d[0] == pytest.approx(ctx[i].zeta, abs=1e-9)


def test_drive_frequency_is_self_consistent(ctx):
    c = ctx[1]
    assert c.omega_d == pytest.approx(c.w2_tilde + c.zeta / 2)


@pytest.mark.parametrize("i", [1, 8])
def test_zx_linear_at_small_drive(ctx, i):
    r = [ctx[i].coefficients(O).ZX / O for O in (0.001, 0.002, 0.004)]
    assert abs(r[0]) > 0
    assert abs(r[1] - r[0]) / abs(r[0]) < 1e-2 and abs(r[2] - r[0]) / abs(r[0]) < 2e-2


@pytest.mark.parametrize("i", [1, 8])
def test_pi_shifted_drive_flips_odd_terms(ctx, i):
    a = ctx[i].coefficients(0.03)
    b = ctx[i].coefficients(0.03, phase=np.pi)
    f = flip_odd(a)
    assert max(abs(b.alpha(p) - f.alpha(p)) for p in ODD + ("ZZ", "ZI")) < 1e-6


@pytest.mark.parametrize("i", [1, 8])
def test_truncation_convergence_driven(i):
    a = CRContext(device_spec(i)).coefficients(0.05)
    b = CRContext(device_spec(i, (6, 6, 6))).coefficients(0.05)
    assert abs(a.ZZ - b.ZZ) < 1e-6 and abs(a.ZX - b.ZX) < 1e-4


def test_driven_coefficients_wrapper_matches_context(ctx):
    a = driven_coefficients(device_spec(8), 0.04)
    assert a.ZZ == pytest.approx(ctx[8].coefficients(0.04).ZZ, abs=1e-14)


def test_drive_before_coupler_elimination_agrees_weakly():
    s = device_spec(8)
    a = CRContext(s).coefficients(0.01)
    b = CRContext(s, drive_stage="before").coefficients(0.01)
    assert abs(a.ZX - b.ZX) < 0.05 * abs(a.ZX)


def test_device2_zx_at_cancellation(ctx):
    O = cancellation_amplitude(device_spec(2), context=ctx[2])
    assert O is not None
    assert abs(ctx[2].coefficients(O).ZX) == pytest.approx(2.7e-3, rel=0.15)


def test_device7_zx_saturates(ctx):
    zx = [abs(ctx[7].coefficients(O).ZX) for O in (0.1, 0.125, 0.15)]
    assert all(abs(z - 2.5e-3) < 0.25e-3 for z in zx)
    assert np.ptp(zx) < 0.2 * np.mean(zx)


# quadratic law: alpha_ZZ - zeta = eta Omega^2 up to 5 % of the quadratic term for Omega <= 20 MHz
@pytest.mark.parametrize("i", range(1, 11))
def test_quadratic_law(i):
    c = CRContext(device_spec(i))
    eta = eta_from_samples(lambda O: c.coefficients(O).ZZ, 0.005, 0.010)
    for O in (0.015, 0.02):
        q = eta * O ** 2
        assert abs(c.coefficients(O).ZZ - c.zeta - q) < 0.05 * abs(q)


def test_eta_from_samples_exact_quadratic_and_constant():
    assert eta_from_samples(lambda O: 3e-4 + 1.7 * O ** 2, 0.005, 0.01) == pytest.approx(1.7)
    # no Omega dependence beyond the static term: eta vanishes
    assert eta_from_samples(lambda O: 3e-4, 0.005, 0.01) == 0.0


def test_eta_fit_regime_check_raises_for_non_quadratic_input():
    # the uniform drive on linear modes is not quadratic at weak drive
    with pytest.raises(RegimeError):
        eta_fit(with_params(device_spec(1), d1=0.0, d2=0.0))


@pytest.mark.parametrize("D", [0.05, 0.1, 0.15, 0.2])
def test_eta_positive_for_csfq_transmon(D):
    s = with_params(device_spec(2), Delta=D)
    assert eta_fit(s, check=False) > 0


def test_eta_negative_for_transmons_at_small_detuning(ctx):
    assert eta_fit(device_spec(9), check=False, context=ctx[9]) < 0


def test_eta_closed_forms_vanish_without_coupling():
    assert eta_closed_form_tt(-0.33, -0.1, 0.0) == 0.0
    assert eta_closed_form_ct(-0.33, 0.1, 0.0) == 0.0


def test_eta_closed_form_tt_small_detuning_limit():
    d, J = -0.33, 0.004
    for D in (1e-3, 5e-4):
        lead = 4 * J ** 2 / (d * D ** 2)
        assert eta_closed_form_tt(d, D, J) / lead == pytest.approx(1.0, rel=0.05)


@pytest.mark.parametrize("D", [0.0, -0.33, 0.33, -0.165])
def test_eta_closed_form_poles_raise(D):
    with pytest.raises(DivergenceError):
        eta_closed_form_tt(-0.33, D, 0.004)


def test_no_invented_divergence_at_closed_form_pole():
    # the closed form diverges at 2 Delta = delta; the nonperturbative rate stays finite
    s = with_params(device_spec(9), Delta=-0.165)
    with pytest.raises(DivergenceError):
        eta_closed_form_tt(s.d2, s.w2 - s.w1, j_coupling(s, 0, 1))
    c = CRContext(s)
    zz = [c.coefficients(O).ZZ for O in (0.0, 0.005, 0.01, 0.02)]
    assert all(np.isfinite(zz)) and max(abs(z) for z in zz) < 1e-3


def test_omega_star_formula_examples():
    def f(i):
        s = device_spec(i)
        return omega_star_formula(s.w2 - s.w1, s.d1, s.d2, gamma_ratio(s))

    assert f(4) * 1e3 == pytest.approx(20, abs=1)
    assert f(6) * 1e3 == pytest.approx(110, abs=1)
    assert omega_star_formula(1e-9, -0.33, -0.33, 1.0) / 1e-9 == pytest.approx(1.0, rel=1e-6)


@pytest.mark.parametrize("method", ["la", "on", "formula"])
def test_device5_has_no_cancellation(method):
    assert cancellation_amplitude(device_spec(5), method) is None


def test_cancellation_amplitude_rejects_unknown_method():
    with pytest.raises(ValueError):
        cancellation_amplitude(device_spec(5), "bogus")
