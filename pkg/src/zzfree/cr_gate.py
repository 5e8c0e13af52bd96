"""Cross-resonance drive: rotating frame, effective Pauli coefficients and ZZ cancellation.

Qubit 1 is the control (driven) and qubit 2 the target. Amplitudes and
frequencies are in GHz throughout; ``eta`` is in 1/GHz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .blockdiag import (BlockPartition, block_reduce, computational_indices, coupler_ground_indices,
                        least_action_transform, perturbative_block_diagonalize)
from .circuit import CircuitSpec, ladder
from .effective import gamma_ratio, j_coupling, static_zz_perturbative
from .errors import EPS_DIV, DegeneracyError, DivergenceError, ZZFreeError, guard_denominator
from .exact import assign_dressed_states, model_hamiltonian

_P1 = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
PAULI_LABELS = tuple(a + b for a in "IXYZ" for b in "IXYZ")


def pauli(label):
    """Two-qubit Pauli, first letter on the control."""
    return np.kron(_P1[label[0]], _P1[label[1]])


class RegimeError(ZZFreeError):
    guard = "quadratic-regime"


@dataclass(frozen=True)
class DriveSpec:
    """CR tone on qubit 1: amplitude and frequency in GHz."""

    Omega: float
    omega_d: float
    sqrt_levels: bool = False
    phase: float = 0.0

    def __post_init__(self):
        if self.Omega < 0:
            raise ValueError("drive amplitude must be non-negative")


@dataclass(frozen=True)
class PauliCoefficients:
    """Coefficients ``c_P`` with ``H = sum_P c_P P`` (GHz).

    ``alpha`` follows the convention in which ZZ enters as ``alpha_ZZ ZZ/4``
    and every other term as ``alpha_P P/2``.
    """

    c: dict

    def alpha(self, label):
        return (4 if label == "ZZ" else 2) * self.c[label]

    @property
    def ZZ(self):
        return self.alpha("ZZ")

    @property
    def ZX(self):
        return self.alpha("ZX")

    @property
    def ZI(self):
        return self.alpha("ZI")

    @property
    def IX(self):
        return self.alpha("IX")

    @property
    def ZY(self):
        return self.alpha("ZY")

    @property
    def IY(self):
        return self.alpha("IY")

    def vector(self):
        return np.array([self.c[p] for p in PAULI_LABELS[1:]])

    def matrix(self):
        return sum(self.c[p] * pauli(p) for p in PAULI_LABELS)


def pauli_decompose(H4) -> PauliCoefficients:
    """``c_P = Tr(P H4) / 4`` for all sixteen two-qubit Paulis."""
    H4 = np.asarray(H4)
    if H4.shape != (4, 4):
        raise ValueError("expected a 4x4 matrix")
    if np.abs(H4 - H4.conj().T).max() > 1e-12 * max(1.0, np.abs(H4).max()):
        raise ValueError("matrix is not Hermitian")
    return PauliCoefficients({p: float(np.real(np.trace(pauli(p) @ H4))) / 4 for p in PAULI_LABELS})


def cr_drive_matrix(Omega, levels, sqrt=False, phase=0.0):
    """``Omega * sum_n (e^{i phase} |n><n+1| + h.c.)`` on the control ladder.

    The literal form has uniform amplitude; ``sqrt=True`` gives the
    charge-drive variant with ``sqrt(n+1)`` matrix elements.
    """
    a = ladder(levels, sqrt=sqrt) * np.exp(1j * phase)
    if phase == 0.0:
        a = a.real
    return Omega * (a + a.conj().T)


def excitation_numbers(n1, n2):
    return np.add.outer(np.arange(n1), np.arange(n2)).ravel()


def rotating_frame_rwa(H2q, drive: DriveSpec, levels):
    """Time-independent Hamiltonian in the frame rotating at ``omega_d`` on both qubits.

    Elements between different total excitation numbers oscillate in this
    frame and are dropped; the cosine drive keeps half its amplitude.
    """
    n1, n2 = levels
    ex = excitation_numbers(n1, n2)
    H = np.where(ex[:, None] == ex[None, :], np.asarray(H2q, dtype=complex), 0)
    H = H - np.diag(drive.omega_d * ex)
    if drive.Omega:
        H = H + np.kron(cr_drive_matrix(drive.Omega / 2, n1, drive.sqrt_levels, drive.phase), np.eye(n2))
    return H


@dataclass
class CRContext:
    """Undriven quantities shared by every drive amplitude of one device.

    ``model`` selects the coupler treatment: ``"circuit"`` eliminates it from
    the full three-mode matrix with the least-action transform,
    ``"effective"`` uses the perturbative two-qubit multilevel model.
    ``drive_stage = "before"`` adds the drive to the three-mode matrix
    instead (circuit model only).
    """

    spec: CircuitSpec
    model: str = "circuit"
    sqrt_drive: bool = False
    drive_stage: str = "after"
    H2q: np.ndarray = field(init=False, repr=False)
    zeta: float = field(init=False)
    w2_tilde: float = field(init=False)
    omega_d: float = field(init=False)

    def __post_init__(self):
        if self.model not in ("circuit", "effective"):
            raise ValueError(f"unknown model {self.model!r}")
        if self.drive_stage not in ("after", "before"):
            raise ValueError("drive_stage must be 'after' or 'before'")
        if self.drive_stage == "before" and self.model != "circuit":
            raise ValueError("drive before coupler elimination needs the circuit model")
        H, basis = model_hamiltonian(self.spec, self.model)
        a = assign_dressed_states(np.linalg.eigh(H), basis, warn_below=None)
        E = a.energy
        self.zeta = E((1, 0, 1)) - E((1, 0, 0)) - E((0, 0, 1)) + E((0, 0, 0))
        self.w2_tilde = E((0, 0, 1)) - E((0, 0, 0))
        self.omega_d = self.w2_tilde + self.zeta / 2
        self._H = H
        if self.model == "circuit":
            H2q = block_reduce(H, coupler_ground_indices(self.spec))
            # absorb excitation-nonconserving dressing so that the RWA is exact at zero drive
            self.H2q = excitation_block_diagonal(H2q, excitation_numbers(*self.levels))
            if self.drive_stage == "before":
                n1, nc, n2 = self.spec.truncations
                ex = (np.arange(n1)[:, None, None] + np.arange(nc)[None, :, None]
                      + np.arange(n2)[None, None, :]).ravel()
                self._H = excitation_block_diagonal(H, ex)
        else:
            self.H2q = H

    @property
    def levels(self):
        return self.spec.truncations[0], self.spec.truncations[2]

    def drive(self, Omega, phase=0.0):
        return DriveSpec(Omega, self.omega_d, self.sqrt_drive, phase)

    def rotating_hamiltonian(self, Omega, phase=0.0):
        return rotating_frame_rwa(self.H2q, self.drive(Omega, phase), self.levels)

    def _blocks(self):
        if self.drive_stage == "before":
            n1, nc, n2 = self.spec.truncations
            idx = lambda a, b: (a * nc) * n2 + b
            return [[idx(0, 0), idx(0, 1)], [idx(1, 0), idx(1, 1)]]
        c = computational_indices(self.levels[1])
        return [c[:2], c[2:]]

    def _full_rotating(self, Omega, phase=0.0):
        n1, nc, n2 = self.spec.truncations
        ex = (np.arange(n1)[:, None, None] + np.arange(nc)[None, :, None] + np.arange(n2)[None, None, :]).ravel()
        H = np.where(ex[:, None] == ex[None, :], self._H, 0).astype(complex) - np.diag(self.omega_d * ex)
        if Omega:
            D = cr_drive_matrix(Omega / 2, n1, self.sqrt_drive, phase)
            H = H + np.kron(np.kron(D, np.eye(nc)), np.eye(n2))
        return H

    def h4(self, Omega, method="LA", order=4, phase=0.0):
        """Effective computational Hamiltonian with the control drive eliminated."""
        if self.drive_stage == "before":
            H = self._full_rotating(Omega, phase)
        else:
            H = self.rotating_hamiltonian(Omega, phase)
        b0, b1 = self._blocks()
        comp = list(b0) + list(b1)
        if method.upper() == "LA":
            H4 = block_reduce(H, comp)
            # split control |0> and |1> manifolds inside the computational block
            t = block_reduce_pair(H4)
            return t
        if method.upper() == "SW":
            Heff, _ = perturbative_block_diagonalize(H, [b0, b1], order=order)
            return Heff[np.ix_(comp, comp)]
        raise ValueError(f"unknown method {method!r}")

    def coefficients(self, Omega, method="LA", order=4, phase=0.0) -> PauliCoefficients:
        return pauli_decompose(self.h4(Omega, method, order, phase))


def excitation_block_diagonal(H, ex):
    """Least-action block diagonalisation by total excitation number ``ex``."""
    blocks = [np.where(ex == k)[0] for k in np.unique(ex)]
    t = least_action_transform(H, BlockPartition(tuple(tuple(b) for b in blocks), H.shape[0]))
    out = t.apply(H)
    out = np.where(ex[:, None] == ex[None, :], out, 0)
    return (out + out.conj().T) / 2


def block_reduce_pair(H4):
    """Least-action split of a 4x4 block into control-|0> and control-|1> 2x2 blocks."""
    t = least_action_transform(H4, [0, 1])
    out = t.apply(H4)
    out = np.where(np.kron(np.eye(2), np.ones((2, 2))) > 0, out, 0)
    return (out + out.conj().T) / 2


def driven_coefficients(spec: CircuitSpec, Omega, method="LA", model="circuit", sqrt_drive=False,
                        order=4, context: CRContext = None, drive_stage="after") -> PauliCoefficients:
    """Pauli coefficients of the driven computational block.

    Pipeline: device Hamiltonian, coupler elimination, rotating frame with
    RWA at ``omega_d = w2_tilde + zeta/2``, then block diagonalisation (LA or
    finite-order SW) onto control-|0> and control-|1> computational blocks.
    """
    ctx = context or CRContext(spec, model, sqrt_drive, drive_stage)
    return ctx.coefficients(Omega, method, order)


def eta_from_samples(alpha_zz, Omega_a, Omega_b):
    """Two-point quadratic coefficient ``(a(Ob) - a(Oa)) / (Ob^2 - Oa^2)``."""
    return (alpha_zz(Omega_b) - alpha_zz(Omega_a)) / (Omega_b ** 2 - Omega_a ** 2)


def eta_fit(spec: CircuitSpec, Omega_a=0.005, Omega_b=0.010, check=True, rtol=0.02, **kw):
    """Quadratic dynamical-ZZ coefficient from two weak drive amplitudes (1/GHz).

    With ``check`` the fit is repeated at half the amplitudes and must agree
    to ``rtol``.
    """
    method = kw.pop("method", "LA")
    ctx = kw.pop("context", None) or CRContext(spec, **kw)

    def zz(O):
        return ctx.coefficients(O, method).ZZ

    eta = eta_from_samples(zz, Omega_a, Omega_b)
    if check:
        eta_half = eta_from_samples(zz, Omega_a / 2, Omega_b / 2)
        if abs(eta_half - eta) > rtol * abs(eta):
            raise RegimeError(f"quadratic regime check failed: eta={eta:.4g}, half-amplitude eta={eta_half:.4g}")
    return eta


def _guarded_product(factors, eps):
    out = 1.0
    for name, f in factors:
        out *= guard_denominator(f, name, eps)
    return out


def eta_closed_form_tt(delta, Delta, J01, eps=EPS_DIV):
    """Perturbative ``eta`` for two transmons with equal anharmonicity ``delta``."""
    if J01 == 0:
        return 0.0
    d, D = delta, Delta
    den = 2 * _guarded_product([("delta", d), ("Delta", D), ("Delta", D), ("delta - 2 Delta", d - 2 * D),
                                ("delta - Delta", (d - D) ** 3), ("delta + Delta", (d + D) ** 2)], eps ** 3)
    num = 8 * d ** 6 - 15 * d ** 5 * D - 18 * d ** 4 * D ** 2 + 38 * d ** 3 * D ** 3 + 6 * d ** 2 * D ** 4 \
        - d * D ** 5 + 2 * D ** 6
    return J01 ** 2 * num / den


def eta_closed_form_ct(delta, Delta, J01, eps=EPS_DIV):
    """Perturbative ``eta`` for a transmon (anharmonicity ``delta``) and a CSFQ with about ``-2 delta``."""
    if J01 == 0:
        return 0.0
    d, D = delta, Delta
    den = 16 * _guarded_product([("delta", d), ("Delta", D), ("Delta", D), ("delta + Delta", d + D),
                                 ("2 delta + Delta", (2 * d + D) ** 3)], eps ** 3)
    num = 8 * D ** 5 - 208 * d ** 5 - 472 * d ** 4 * D - 304 * d ** 3 * D ** 2 + 57 * d ** 2 * D ** 3 \
        + 97 * d * D ** 4
    return J01 ** 2 * num / den


def omega_star_formula(Delta, delta1, delta2, gamma):
    """Closed-form cancellation amplitude (GHz) or ``None`` for a negative radicand."""
    r = delta1 / delta2
    g = gamma
    den = (r + g ** 2) * (r + g * (2 + g))
    if den == 0:
        return None
    C = (0.5 + 2 * g + g ** 2 + r ** 2 + r * g * (2 + g) + g ** 2 * (1 + 2 * g ** 2) / (2 * r)) / den
    a = 2 * (r + g ** 2) / (r + g * (2 + g))
    b = 1 - C * Delta / delta2
    if a < 0 or b < 0:
        return None
    return abs(Delta) * math.sqrt(a) * math.sqrt(b)


def pairing(spec: CircuitSpec):
    """``"tt"`` for two negative anharmonicities, ``"ct"`` otherwise."""
    return "tt" if spec.d1 < 0 and spec.d2 < 0 else "ct"


def eta_closed_form(spec: CircuitSpec):
    J01 = j_coupling(spec, 0, 1)
    Delta = spec.w2 - spec.w1
    f = eta_closed_form_tt if pairing(spec) == "tt" else eta_closed_form_ct
    return f(spec.d2, Delta, J01)


def find_omega_root(alpha_zz, omega_max=0.2, step=0.0025, xtol=1e-4):
    """First zero of ``alpha_zz`` on ``(0, omega_max]`` or ``None``.

    Sign changes are bracketed on a uniform grid and bisected to ``xtol``;
    brackets across discontinuities (label swaps at strong drive) are
    rejected because ``|alpha_zz|`` stays large at the bisected point.
    """
    grid = np.arange(0.0, omega_max + step / 2, step)

    def f(O):
        try:
            return alpha_zz(O)
        except (DegeneracyError, DivergenceError):
            return np.nan

    prev = f(grid[0])
    for a, b in zip(grid[:-1], grid[1:]):
        cur = f(b)
        if np.isfinite(prev) and np.isfinite(cur) and np.sign(prev) != np.sign(cur):
            if cur == 0:
                return float(b)
            r = optimize.bisect(f, a, b, xtol=xtol)
            if abs(f(r)) < 0.1 * max(abs(prev), abs(cur)):
                return float(r)
        prev = cur
    return None


def cancellation_amplitude(spec: CircuitSpec, method="LA", omega_max=0.2, step=0.0025, **kw):
    """Drive amplitude (GHz) at which the total ZZ vanishes, or ``None``.

    Methods: ``"LA"`` (nonperturbative root search), ``"SW"`` (same search on
    the finite-order perturbative block diagonalisation), ``"On"``
    (``sqrt(-zeta/eta)`` from the second-order static ZZ and the closed-form
    ``eta``) and ``"formula"`` (first-order closed form).
    """
    m = method.lower()
    if m in ("la", "sw"):
        order = kw.pop("order", 4)
        ctx = kw.pop("context", None) or CRContext(spec, **kw)
        return find_omega_root(lambda O: ctx.coefficients(O, m.upper(), order).ZZ, omega_max, step)
    if m == "on":
        zeta = static_zz_perturbative(spec)
        eta = eta_closed_form(spec)
        if eta == 0 or -zeta / eta <= 0:
            return None
        return math.sqrt(-zeta / eta)
    if m == "formula":
        return omega_star_formula(spec.w2 - spec.w1, spec.d1, spec.d2, gamma_ratio(spec))
    raise ValueError(f"unknown method {method!r}")
