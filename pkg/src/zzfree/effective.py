"""Perturbative (dispersive) results after eliminating the coupler.

Exchange couplings ``J_{n1 n2}``, dressed qubit parameters, the perturbative
static ZZ and the analytic ZZ-free conditions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .circuit import CircuitSpec
from .errors import EPS_DIV, DivergenceError, guard_denominator


@dataclass(frozen=True)
class DetuningSet:
    """Detunings of a device (GHz); ``a`` and ``b`` are dimensionless."""

    Delta: float
    Delta_q1: tuple
    Delta_q2: tuple
    Sigma_q1: tuple
    Sigma_q2: tuple
    Delta2: float
    b: float
    a: float


@dataclass(frozen=True)
class DressedParams:
    w1_bar: float
    w2_bar: float
    d1_bar: float
    d2_bar: float
    Delta_bar: float
    w1_tilde: float
    w2_tilde: float


def _omega_q(spec, q, n):
    mode = spec.q1 if q == 1 else spec.q2
    tr = mode.transitions
    if n >= tr.size:
        raise ValueError(f"qubit {q} spectrum too short for omega_q({n})")
    return float(tr[n])


def detunings(spec: CircuitSpec, n_max=2) -> DetuningSet:
    wc = spec.wc
    w1 = [_omega_q(spec, 1, n) for n in range(n_max)]
    w2 = [_omega_q(spec, 2, n) for n in range(n_max)]
    D2 = wc - spec.w2
    return DetuningSet(
        Delta=spec.w2 - spec.w1,
        Delta_q1=tuple(wc - w for w in w1), Delta_q2=tuple(wc - w for w in w2),
        Sigma_q1=tuple(wc + w for w in w1), Sigma_q2=tuple(wc + w for w in w2),
        Delta2=D2, b=(spec.w2 - spec.w1) / D2, a=-spec.d2 / D2,
    )


def j_coupling(spec: CircuitSpec, n1: int, n2: int, counter_rotating=True, eps=EPS_DIV) -> float:
    """Effective exchange coupling between ``|n1, n2+1>`` and ``|n1+1, n2>`` (GHz)."""
    wc = spec.wc
    s = 0.0
    for q, n in ((1, n1), (2, n2)):
        wq = _omega_q(spec, q, n)
        s += 1 / guard_denominator(wc - wq, f"Delta_{q}({n})", eps)
        if counter_rotating:
            s += 1 / (wc + wq)
    return spec.g12 - spec.g1c * spec.g2c / 2 * s


def _bar_params(spec, eps):
    wc = spec.wc
    out = []
    for q, g, d in ((1, spec.g1c, spec.d1), (2, spec.g2c, spec.d2)):
        wq = _omega_q(spec, q, 0)
        Dq = guard_denominator(wc - wq, f"Delta_{q}", eps)
        guard_denominator(Dq - d, f"Delta_{q} - delta_{q}", eps)
        out.append((wq - g ** 2 / Dq, d * (1 - 2 * g ** 2 / (Dq * (Dq - d)))))
    (w1b, d1b), (w2b, d2b) = out
    return w1b, w2b, d1b, d2b


def dressed_params(spec: CircuitSpec, eps=EPS_DIV) -> DressedParams:
    """Coupler-dressed frequencies and anharmonicities, plus the J00-shifted pair."""
    w1b, w2b, d1b, d2b = _bar_params(spec, eps)
    Db = w2b - w1b
    J00 = j_coupling(spec, 0, 0, eps=eps)
    if J00 != 0:
        guard_denominator(Db, "dressed qubit-qubit detuning", eps)
        shift = J00 ** 2 / Db
    else:
        shift = 0.0
    return DressedParams(w1b, w2b, d1b, d2b, Db, w1b - shift, w2b + shift)


def readout_leftovers(g, Delta, Delta2, delta1, delta2):
    """O(g^6) frequency and anharmonicity leftovers from readout-resonator elimination.

    Returns ``(d_w1, d_w2, d_delta1, d_delta2)`` in GHz. The expressions are
    evaluated literally; in particular the grouping ``Delta2**3 * Delta -+ delta``
    is kept as printed even though it mixes dimensions.
    """
    if Delta == 0 or Delta2 == 0:
        raise DivergenceError("readout leftovers diverge at Delta = 0 or Delta2 = 0")
    D, D2 = Delta, Delta2
    g6 = g ** 6
    dw2 = g6 * (D + 2 * D2) ** 2 * (D ** 2 + D * D2 + D2 ** 2) / (2 * D * D2 ** 4 * (D + D2) ** 4)
    out = []
    for d, s in ((delta1, 1), (delta2, -1)):
        num = (D2 - d) ** 3 + (d + D2) * D2 ** 2
        den = (D2 ** 3 * D - s * d) * (D2 - d) ** 4
        if den == 0:
            raise DivergenceError("readout anharmonicity leftover has a vanishing denominator")
        out.append(2 * g6 * (-num / den + s * 2 / (D * D2 ** 4)))
    return -dw2, dw2, out[0], out[1]


def static_zz_perturbative(spec: CircuitSpec, eps=EPS_DIV) -> float:
    """Second-order static ZZ (GHz) from ``J10``, ``J01`` and dressed parameters.

    ``J00`` does not enter, so no guard is placed on the dressed qubit-qubit detuning.
    """
    w1b, w2b, d1b, d2b = _bar_params(spec, eps)
    J10 = j_coupling(spec, 1, 0, eps=eps)
    J01 = j_coupling(spec, 0, 1, eps=eps)
    d1 = guard_denominator(w2b - w1b - d1b, "Delta_bar - delta1_bar", eps)
    d2 = guard_denominator(w2b - w1b + d2b, "Delta_bar + delta2_bar", eps)
    return 2 * J10 ** 2 / d1 - 2 * J01 ** 2 / d2


def gamma_closed_form(delta1, delta2, Delta, Delta2, eps=EPS_DIV):
    """``J10 / J01`` with counter-rotating terms dropped, in terms of bare detunings."""
    s = guard_denominator(2 * Delta2 + Delta, "2 Delta2 + Delta", eps)
    guard_denominator(Delta2, "Delta2", eps)
    guard_denominator(Delta2 + Delta, "Delta2 + Delta", eps)
    den = guard_denominator(1 - delta1 / (Delta2 + Delta), "1 - delta1/(Delta2 + Delta)", eps)
    den2 = guard_denominator(1 - delta2 / s, "1 - delta2/(2 Delta2 + Delta)", eps)
    return (1 - delta1 / s) / den2 * (1 - delta2 / Delta2) / den


def gamma_ratio(spec: CircuitSpec, eps=EPS_DIV) -> float:
    return gamma_closed_form(spec.d1, spec.d2, spec.w2 - spec.w1, spec.wc - spec.w2, eps)


def zz_free_detuning(gamma, d1_bar, d2_bar):
    """Dressed detuning at which the second-order static ZZ vanishes."""
    den = 1 - gamma ** 2
    if abs(den) < 1e-12:
        if abs(d1_bar + d2_bar) < 1e-12:
            raise DivergenceError("gamma^2 = 1 with delta1 = -delta2: every detuning is a solution")
        raise DivergenceError("gamma^2 = 1: no finite ZZ-free detuning")
    return (d1_bar + d2_bar * gamma ** 2) / den


def solve_zz_free_point(spec: CircuitSpec, max_iter=20, tol=1e-8):
    """Move qubit 1 so that the second-order static ZZ vanishes.

    Fixed-point iteration between the ZZ-free dressed detuning and the
    ratio ``gamma = J10/J01``, starting from zero detuning. Qubit 2 and the
    coupler are held fixed.

    Returns
    -------
    spec, Delta : CircuitSpec, float
        Updated device and its bare detuning ``w2 - w1`` (GHz).
    """
    from .devices import with_detuning

    s = with_detuning(spec, 0.0)
    for _ in range(max_iter):
        w1b, w2b, d1b, d2b = _bar_params(s, EPS_DIV)
        gamma = j_coupling(s, 1, 0) / j_coupling(s, 0, 1)
        target = zz_free_detuning(gamma, d1b, d2b)
        step = (w2b - w1b) - target
        Delta = (s.w2 - s.w1) - step
        s = with_detuning(s, Delta)
        if abs(step) < tol:
            return s, Delta
    raise DivergenceError("ZZ-free fixed-point iteration did not converge")


def zeroth_order_boundary(b):
    """Ratio ``k = delta1/delta`` (with ``delta2 = -delta``) of the ZZ-free line at ``a -> 0``."""
    den = 2 + 5 * b + b ** 2
    if abs(den) < 1e-12:
        raise DivergenceError("zeroth-order boundary has a pole at this b")
    return (2 + b - 3 * b ** 2 - 2 * b ** 3) / den


def _boundary_residual(k, a, b):
    # ZZ-free condition in units of Delta2 with delta1 = k a, delta2 = -a, Delta = b
    g = gamma_closed_form(k * a, -a, b, 1.0, eps=0.0)
    return (b * (1 - g ** 2) - (k * a - a * g ** 2)) / a


def first_order_boundary(a, b, h=1e-7):
    """One Newton step in ``k`` from the zeroth-order root at finite ``a = delta/Delta2``."""
    k0 = zeroth_order_boundary(b)
    f0 = _boundary_residual(k0, a, b)
    df = (_boundary_residual(k0 + h, a, b) - _boundary_residual(k0 - h, a, b)) / (2 * h)
    return k0 - f0 / df


def boundary_numeric(a, b, width=3.0, n_grid=600):
    """Root ``k`` of the bare-parameter ZZ-free condition, solved numerically.

    Searches ``k0 +- width`` around the zeroth-order root and returns the
    genuine (non-pole) root closest to it.
    """
    k0 = zeroth_order_boundary(b)

    def res(k):
        try:
            return _boundary_residual(k, a, b)
        except (ZeroDivisionError, DivergenceError):
            return np.nan

    grid = np.linspace(k0 - width, k0 + width, n_grid + 1) + 1e-9
    vals = np.array([res(k) for k in grid])
    roots = []
    for i in range(n_grid):
        if np.isfinite(vals[i]) and np.isfinite(vals[i + 1]) and np.sign(vals[i]) != np.sign(vals[i + 1]):
            r = optimize.brentq(res, grid[i], grid[i + 1], xtol=1e-13)
            if abs(res(r)) < 1e-8:
                roots.append(r)
    if not roots:
        raise DivergenceError("no ZZ-free anharmonicity ratio near the zeroth-order root")
    return min(roots, key=lambda r: abs(r - k0))


def effective_hamiltonian(spec: CircuitSpec, n_levels=None, counter_rotating=True, eps=EPS_DIV):
    """Two-qubit multilevel Hamiltonian after perturbative coupler elimination.

    Basis is row-major ``(n1, n2)``. Diagonal entries are sums of dressed
    ladder energies; ``sqrt((n1+1)(n2+1)) J_{n1 n2}`` couples
    ``|n1, n2+1>`` and ``|n1+1, n2>``.
    """
    N = n_levels or spec.truncations[0]
    N2 = n_levels or spec.truncations[2]
    wc = spec.wc
    ladders = []
    for q, g, n in ((1, spec.g1c, N), (2, spec.g2c, N2)):
        E = [0.0]
        for k in range(n - 1):
            wq = _omega_q(spec, q, k)
            Dq = guard_denominator(wc - wq, f"Delta_{q}({k})", eps)
            E.append(E[-1] + wq - g ** 2 * (k + 1) / Dq)
        ladders.append(np.array(E))
    H = np.diag(np.add.outer(ladders[0], ladders[1]).ravel())
    for n1 in range(N - 1):
        for n2 in range(N2 - 1):
            v = np.sqrt((n1 + 1) * (n2 + 1)) * j_coupling(spec, n1, n2, counter_rotating, eps)
            i, j = n1 * N2 + n2 + 1, (n1 + 1) * N2 + n2
            H[i, j] = H[j, i] = v
    return H
