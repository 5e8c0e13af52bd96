import numpy as np
import pytest
from hypothesis import given, strategies as st

from zzfree.cr_gate import CRContext
from zzfree.devices import device_spec
from zzfree.gate_error import (U_IDEAL, XI, ZX, ZZ, EchoSequence, average_gate_fidelity, curve_min_length,
                               echo_frequency, echo_unitary, flat_top_for_pi_over_2, flip_odd, gate_error,
                               gate_error_curve, gate_length, min_gate_length, refine_minimum, zx_zz_coefficients)


def test_echo_frequency_examples():
    assert echo_frequency(2.7e-3, 0) == pytest.approx(5.4e-3)
    assert echo_frequency(0, 1e-4) == pytest.approx(1e-4)
    assert echo_frequency(3e-3, 0.4e-3) == pytest.approx(6.013e-3, abs=1e-6)


def test_flat_top_examples():
    assert flat_top_for_pi_over_2(2.7e-3) == pytest.approx(46.3, abs=0.05)
    assert flat_top_for_pi_over_2(3.125e-3) == pytest.approx(40.0)
    assert gate_length(flat_top_for_pi_over_2(2.7e-3)) == pytest.approx(172, abs=1)
    for bad in (0.0, -1e-3):
        with pytest.raises(ValueError):
            flat_top_for_pi_over_2(bad)


def test_min_gate_length_examples():
    assert min_gate_length(2.5e-3) == pytest.approx(180.0)
    assert min_gate_length(np.inf) == 80.0


def test_sequence_defaults():
    seq = EchoSequence(46.0, zx_zz_coefficients(2.7e-3, 1e-5))
    assert seq.t_g == pytest.approx(172.0)
    assert seq.minus.ZX == -seq.plus.ZX and seq.minus.ZZ == seq.plus.ZZ
    with pytest.raises(ValueError):
        EchoSequence(-1.0, zx_zz_coefficients(1e-3, 0))


def _op_distance(U, V):
    # distance up to a global phase
    ph = np.trace(V.conj().T @ U)
    ph = ph / abs(ph)
    return np.abs(U - ph * V).max()


@given(st.floats(0.5e-3, 10e-3))
def test_pure_zx_echo_is_ideal(zx):
    U = echo_unitary(EchoSequence(flat_top_for_pi_over_2(zx), zx_zz_coefficients(zx, 0.0)))
    assert _op_distance(U, U_IDEAL) < 1e-10
    assert gate_error(zx, 0.0) < 1e-14


def test_free_segments_irrelevant_without_zz():
    c = zx_zz_coefficients(2e-3, 0.0)
    tau = flat_top_for_pi_over_2(2e-3)
    a = echo_unitary(EchoSequence(tau, c, pi_pulse=40.0))
    b = echo_unitary(EchoSequence(tau, c, pi_pulse=0.0))
    assert np.abs(a - b).max() < 1e-12


def test_zero_zx_gives_diagonal_unitary():
    U = echo_unitary(EchoSequence(50.0, zx_zz_coefficients(0.0, 2e-4), zeta=1e-4))
    assert np.abs(U - np.diag(np.diag(U))).max() < 1e-12


def test_error_scales_with_zz_phase_squared():
    e = lambda zx, zz: gate_error(zx, zz)
    assert e(3e-3, 4e-5) / e(3e-3, 2e-5) == pytest.approx(4.0, rel=1e-3)
    # halving ZX doubles the flat top and with it the accumulated ZZ phase
    assert e(1.5e-3, 2e-5) / e(3e-3, 2e-5) == pytest.approx(4.0, rel=1e-3)


def test_idle_zz_during_pi_pulses_adds_error():
    assert gate_error(3e-3, 0.0, zeta=1e-5) > 0
    assert gate_error(3e-3, 0.0, zeta=1e-5) == pytest.approx(4 * gate_error(3e-3, 0.0, zeta=0.5e-5), rel=1e-3)


def test_average_fidelity_bounds():
    assert average_gate_fidelity(U_IDEAL) == pytest.approx(1.0)
    assert average_gate_fidelity(np.exp(0.7j) * U_IDEAL) == pytest.approx(1.0)
    assert 0.2 <= average_gate_fidelity(XI) < 1


def test_flip_odd_involution():
    c = zx_zz_coefficients(2e-3, 3e-5)
    assert flip_odd(flip_odd(c)).c == c.c


@pytest.fixture(scope="module")
def device8():
    ctx = CRContext(device_spec(8))
    return ctx, gate_error_curve(device_spec(8), context=ctx)


def test_device8_curve_has_length_cutoff(device8):
    _, curve = device8
    lengths = [p.t_g for p in curve]
    k = int(np.argmin(lengths))
    # shortest length reached inside the amplitude window, well above the pi-pulse floor
    assert 0 < k < len(curve) - 1
    assert curve_min_length(curve) > 120
    assert all(p.error >= 0 for p in curve)


def test_refine_minimum_not_worse_than_grid(device8):
    ctx, curve = device8
    best = refine_minimum(curve, ctx)
    assert best.error <= min(p.error for p in curve)


def test_curve_skips_zero_amplitude():
    ctx = CRContext(device_spec(8))
    curve = gate_error_curve(device_spec(8), Omegas=[0.0, 0.01], context=ctx)
    assert [p.Omega for p in curve] == [0.01]


def test_segment_keeps_only_zx_and_zz():
    from zzfree.cr_gate import PAULI_LABELS, PauliCoefficients
    c = {p: 1e-3 for p in PAULI_LABELS}
    U = echo_unitary(EchoSequence(10.0, PauliCoefficients(c)))
    ref = echo_unitary(EchoSequence(10.0, zx_zz_coefficients(2e-3, 4e-3)))
    assert np.abs(U - ref).max() < 1e-12
    assert ZX.shape == ZZ.shape == (4, 4)
