"""Echoed-CR gate built from ZX and ZZ rates, and its ZZ-limited error.

Times in ns, rates in GHz; phases are ``exp(-i 2 pi H t)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm
from scipy import optimize

from .cr_gate import PAULI_LABELS, CRContext, PauliCoefficients, pauli

PI_PULSE_NS = 40.0
ZX_FLOOR = 1e-12  # GHz; rates below this count as no ZX

ZX = pauli("ZX")
ZZ = pauli("ZZ")
XI = pauli("XI")
U_IDEAL = expm(-1j * (np.pi / 2) * ZX / 2)


def echo_frequency(alpha_zx, alpha_zz):
    return 2 * np.sqrt(alpha_zx ** 2 + alpha_zz ** 2 / 4)


def flat_top_for_pi_over_2(alpha_zx):
    """Flat-top length (ns) of one CR tone for a ZX(pi/2) echo."""
    if alpha_zx <= 0:
        raise ValueError("alpha_ZX must be positive")
    return 1 / (8 * alpha_zx)


def gate_length(tau, pi_pulse=PI_PULSE_NS):
    return 2 * tau + 2 * pi_pulse


def min_gate_length(alpha_zx_max, pi_pulse=PI_PULSE_NS):
    """Shortest echoed gate allowed by a saturating ZX rate (ns)."""
    if np.isinf(alpha_zx_max):
        return 2 * pi_pulse
    return 1 / (4 * alpha_zx_max) + 2 * pi_pulse


ODD_LABELS = ("ZX", "IX", "ZY", "IY")


def flip_odd(coeffs: PauliCoefficients) -> PauliCoefficients:
    """Coefficients of the pi-shifted tone: odd-in-drive terms change sign."""
    return PauliCoefficients({p: (-v if p in ODD_LABELS else v) for p, v in coeffs.c.items()})


def zx_zz_coefficients(alpha_zx, alpha_zz) -> PauliCoefficients:
    c = {p: 0.0 for p in PAULI_LABELS}
    c["ZX"] = alpha_zx / 2
    c["ZZ"] = alpha_zz / 4
    return PauliCoefficients(c)


@dataclass(frozen=True)
class EchoSequence:
    """One echoed-CR gate.

    ``plus`` holds the rates of the first CR tone; ``minus`` those of the
    pi-shifted tone and defaults to ``plus`` with odd-in-drive terms flipped.
    ``zeta`` (GHz) is the static ZZ acting during each pi pulse.
    """

    tau: float
    plus: PauliCoefficients
    minus: PauliCoefficients = None
    zeta: float = 0.0
    pi_pulse: float = PI_PULSE_NS

    def __post_init__(self):
        if self.tau < 0 or self.pi_pulse < 0:
            raise ValueError("durations must be non-negative")
        if self.minus is None:
            object.__setattr__(self, "minus", flip_odd(self.plus))

    @property
    def t_g(self):
        return gate_length(self.tau, self.pi_pulse)


def _evolve(H, t):
    return expm(-2j * np.pi * H * t)


def _segment(c: PauliCoefficients):
    # only ZX and ZZ survive the echo and active cancellation
    return c.ZX * ZX / 2 + c.ZZ * ZZ / 4


def echo_unitary(seq: EchoSequence):
    """``X_c U_free U_-CR X_c U_free U_+CR`` with ideal instantaneous control flips."""
    Uf = _evolve(seq.zeta * ZZ / 4, seq.pi_pulse)
    Um = _evolve(_segment(seq.minus), seq.tau)
    Up = _evolve(_segment(seq.plus), seq.tau)
    return XI @ Uf @ Um @ XI @ Uf @ Up


def average_gate_fidelity(U, U_ideal=U_IDEAL):
    d = U.shape[0]
    return (abs(np.trace(U_ideal.conj().T @ U)) ** 2 + d) / (d * (d + 1))


def gate_error(alpha_zx, alpha_zz, zeta=0.0, pi_pulse=PI_PULSE_NS):
    """Error of the ZX(pi/2) echo at the flat top fixed by ``alpha_zx``."""
    tau = flat_top_for_pi_over_2(alpha_zx)
    U = echo_unitary(EchoSequence(tau, zx_zz_coefficients(alpha_zx, alpha_zz), zeta=zeta, pi_pulse=pi_pulse))
    return max(0.0, 1 - average_gate_fidelity(U))


@dataclass(frozen=True)
class GateErrorPoint:
    Omega: float
    t_g: float
    error: float
    alpha_zx: float
    alpha_zz: float


def _point(ctx, Omega, method, pi_pulse, idle_zz=True):
    c = ctx.coefficients(Omega, method)
    # the drive phase is free: take the sign that makes ZX positive
    zx = abs(c.ZX)
    if zx <= ZX_FLOOR:
        return None
    tau = flat_top_for_pi_over_2(zx)
    err = gate_error(zx, c.ZZ, ctx.zeta if idle_zz else 0.0, pi_pulse)
    return GateErrorPoint(Omega, gate_length(tau, pi_pulse), err, zx, c.ZZ)


def gate_error_curve(spec, Omegas=None, method="LA", context: CRContext = None, pi_pulse=PI_PULSE_NS,
                     idle_zz=True, **kw):
    """Gate error versus gate length, one point per drive amplitude (GHz).

    Points with vanishing ZX are skipped. ``idle_zz=False`` switches off the
    static ZZ during the pi pulses.
    """
    ctx = context or CRContext(spec, **kw)
    if Omegas is None:
        Omegas = np.arange(0.0025, 0.2 + 1e-12, 0.0025)
    out = []
    for O in Omegas:
        p = _point(ctx, float(O), method, pi_pulse, idle_zz)
        if p is not None:
            out.append(p)
    return out


def refine_minimum(curve, context: CRContext, method="LA", pi_pulse=PI_PULSE_NS, idle_zz=True):
    """Locally minimise the error around the best grid point (bounded Brent)."""
    if not curve:
        return None
    k = int(np.argmin([p.error for p in curve]))
    lo = curve[max(k - 1, 0)].Omega
    hi = curve[min(k + 1, len(curve) - 1)].Omega
    if hi <= lo:
        return curve[k]
    res = optimize.minimize_scalar(lambda O: _point(context, O, method, pi_pulse, idle_zz).error, bounds=(lo, hi),
                                   method="bounded", options={"xatol": 1e-7})
    best = _point(context, float(res.x), method, pi_pulse, idle_zz)
    return best if best.error < curve[k].error else curve[k]


def curve_min_length(curve):
    """Shortest gate length reached on a curve (the saturation cutoff)."""
    return min(p.t_g for p in curve) if curve else None
