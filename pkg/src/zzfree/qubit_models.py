"""Single-mode level structure: Duffing transmons and the capacitively shunted flux qubit.

Energies are linear frequencies in GHz (h = 1). Every returned spectrum is
offset so that the ground level sits at zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .errors import ZZFreeError


@dataclass(frozen=True)
class ModeSpectrum:
    """Truncated energy ladder of one circuit mode.

    Attributes
    ----------
    energies : ndarray
        Level energies ``E_n`` in GHz with ``E_0 = 0``.
    label : str
        Mode type, e.g. ``"transmon"``, ``"csfq"`` or ``"coupler"``.
    """

    energies: np.ndarray
    label: str = "transmon"

    def __post_init__(self):
        e = np.asarray(self.energies, dtype=float)
        if e.ndim != 1 or e.size < 1:
            raise ValueError("energies must be a non-empty 1-D array")
        object.__setattr__(self, "energies", e - e[0])

    @property
    def n_levels(self):
        return self.energies.size

    @property
    def transitions(self):
        """``omega(n) = E_{n+1} - E_n``."""
        return np.diff(self.energies)

    @property
    def frequency(self):
        return float(self.energies[1])

    @property
    def anharmonicity(self):
        if self.n_levels < 3:
            return 0.0
        return float(self.energies[2] - 2 * self.energies[1])

    def truncated(self, n):
        if n > self.n_levels:
            raise ValueError(f"spectrum has only {self.n_levels} levels, {n} requested")
        return ModeSpectrum(self.energies[:n], self.label)


@dataclass(frozen=True)
class TransmonSpec:
    """Duffing oscillator: 0-1 frequency and anharmonicity (GHz)."""

    frequency: float
    anharmonicity: float = 0.0

    def __post_init__(self):
        if not self.frequency > 0:
            raise ValueError("frequency must be positive")


@dataclass(frozen=True)
class CSFQSpec:
    """Capacitively shunted flux qubit parameters.

    ``L`` sets the expansion degree ``2L`` of the potential around its minimum.
    """

    E_C: float
    E_J: float
    alpha: float
    f: float = 0.5
    L: int = 10

    def __post_init__(self):
        if not 0 < self.alpha < 0.5:
            raise ValueError("alpha must lie in (0, 1/2): double-well regime is not supported")
        if self.L < 2:
            raise ValueError("L must be at least 2")
        if self.E_C <= 0 or self.E_J <= 0:
            raise ValueError("E_C and E_J must be positive")


def duffing_energies(omega, delta, n_levels):
    n = np.arange(n_levels)
    return n * omega + delta * n * (n - 1) / 2


def transmon_spectrum(spec: TransmonSpec, n_levels: int) -> ModeSpectrum:
    """Duffing ladder ``E_n = n*omega + delta*n*(n-1)/2``."""
    if n_levels < 2:
        raise ValueError("n_levels must be >= 2")
    e = duffing_energies(spec.frequency, spec.anharmonicity, n_levels)
    if np.any(np.diff(e) <= 0):
        raise ValueError("Duffing ladder is not monotonically increasing at this truncation")
    return ModeSpectrum(e, "transmon")


def harmonic_spectrum(frequency, n_levels, label="coupler"):
    return ModeSpectrum(frequency * np.arange(n_levels), label)


def csfq_sweet_spot_params(spec: CSFQSpec):
    """Fourth-order (Duffing) estimate of the CSFQ at the flux sweet spot.

    Returns
    -------
    omega, delta, phi_zpf : float
        Frequency and anharmonicity in GHz, zero-point phase amplitude.
    """
    if spec.alpha >= 0.5:
        raise ValueError("alpha >= 1/2 is the double-well regime")
    EC, EJ, a = spec.E_C, spec.E_J, spec.alpha
    omega = math.sqrt(8 * EJ * EC * (0.5 - a))
    delta = 4 * EC * (a - 1 / 8) / (1 - 2 * a)
    phi_zpf = (4 * EC / (EJ * (1 - 2 * a))) ** 0.25
    return omega, delta, phi_zpf


def potential_minimum(spec: CSFQSpec):
    """Approximate phase of the potential minimum for flux offset ``f - 1/2``."""
    df = spec.f - 0.5
    return -2 * math.pi * spec.alpha * df / (0.5 - spec.alpha)


def potential_derivatives(spec: CSFQSpec, order, phi0=None):
    """Derivatives ``U^(m)(phi0)``, m = 0..order, of
    ``U = -2 E_J cos(phi/2) - alpha E_J cos(2 pi f - phi)``."""
    if phi0 is None:
        phi0 = potential_minimum(spec)
    m = np.arange(order + 1)
    t1 = -2 * spec.E_J * 0.5 ** m * np.cos(phi0 / 2 + m * np.pi / 2)
    # d^m/dphi^m cos(c - phi) = cos(c - phi - m pi/2)
    t2 = -spec.alpha * spec.E_J * np.cos(2 * np.pi * spec.f - phi0 - m * np.pi / 2)
    return t1 + t2


def _ladder(n):
    return np.diag(np.sqrt(np.arange(1, n)), 1)


def normal_ordered_hamiltonian(derivs, E_C, xi, size):
    """Oscillator-basis matrix of ``4 E_C n^2 + sum_m U^(m) phi^m / m!``.

    Uses ``phi = xi (a + a^dag)`` and ``n = i (a - a^dag) / (2 xi)``. Matrix
    elements are exact for the returned ``size`` levels (the operators are
    built in an enlarged basis and cropped).
    """
    deg = len(derivs) - 1
    M = size + deg + 2
    a = _ladder(M)
    x = a + a.T
    p = a.T - a
    H = -E_C / xi ** 2 * (p @ p)
    X = np.eye(M)
    for m in range(1, deg + 1):
        X = X @ x
        if derivs[m] != 0:
            H = H + derivs[m] * xi ** m / math.factorial(m) * X
    return H[:size, :size]


def perturbative_energies(derivs, E_C, xi, n_levels, L):
    """Rayleigh-Schroedinger energies through third order.

    The unperturbed part is the diagonal of the normal-ordered Hamiltonian,
    the perturbation its off-diagonal remainder (so the first-order shift is
    identically zero). Intermediate sums run over ``k != n, 0 <= k <= n + L``.
    """
    size = n_levels + L
    H = normal_ordered_hamiltonian(derivs, E_C, xi, size)
    E0 = np.diag(H).copy()
    V = H - np.diag(E0)
    out = np.empty(n_levels)
    for n in range(n_levels):
        ks = np.array([k for k in range(n + L + 1) if k != n])
        den = E0[n] - E0[ks]
        vn = V[n, ks]
        e2 = np.sum(vn ** 2 / den)
        # sum_{k,m} V_nm V_mk V_kn / ((E_n-E_k)(E_n-E_m))
        Vkk = V[np.ix_(ks, ks)]
        e3 = (vn / den) @ Vkk @ (vn / den)
        out[n] = E0[n] + e2 + e3
    return out - out[0]


def csfq_perturbative_spectrum(spec: CSFQSpec, xi: float, n_levels: int = 3) -> ModeSpectrum:
    """Third-order perturbative CSFQ spectrum for expansion parameter ``xi``."""
    if xi <= 0:
        raise ValueError("xi must be positive")
    if n_levels < 1:
        raise ValueError("n_levels must be >= 1")
    derivs = potential_derivatives(spec, 2 * spec.L)
    with np.errstate(divide="ignore", invalid="ignore"):
        e = perturbative_energies(derivs, spec.E_C, xi, n_levels, spec.L)
    return ModeSpectrum(e, "csfq")


def _f01(spec, xi):
    e = csfq_perturbative_spectrum(spec, xi, 2).energies
    return float(e[1]) if np.isfinite(e[1]) else np.inf


def csfq_optimize_xi(spec: CSFQSpec, window=(0.05, 1.5), n_grid=60, rtol=1e-6) -> float:
    """Expansion parameter minimising the perturbative 0-1 frequency.

    Coarse grid scan over ``window`` followed by golden-section refinement.
    """
    grid = np.linspace(window[0], window[1], n_grid)
    vals = np.array([_f01(spec, x) for x in grid])
    k = int(np.argmin(vals))
    if k == 0 or k == n_grid - 1:
        raise ZZFreeError("f01(xi) has no interior minimum on the scan window")
    res = optimize.minimize_scalar(lambda x: _f01(spec, x), bracket=(grid[k - 1], grid[k], grid[k + 1]),
                                   method="golden", tol=rtol)
    return float(res.x)


def csfq_numeric_spectrum(spec: CSFQSpec, basis_size: int = 60, n_levels: int = 5, xi0=None,
                          max_basis: int = 480, tol: float = 1e-8) -> ModeSpectrum:
    """Direct diagonalisation of the CSFQ Hamiltonian in an oscillator basis.

    The basis is doubled until the third level moves by less than ``tol``.
    """
    if xi0 is None:
        xi0 = csfq_sweet_spot_params(spec)[2] / math.sqrt(2)

    def solve(M):
        a = _ladder(M)
        phi = xi0 * (a + a.T)
        p = a.T - a
        w, V = np.linalg.eigh(phi)
        c_half = (V * np.cos(w / 2)) @ V.T
        c_flux = (V * np.cos(2 * np.pi * spec.f - w)) @ V.T
        H = -spec.E_C / xi0 ** 2 * (p @ p) - 2 * spec.E_J * c_half - spec.alpha * spec.E_J * c_flux
        e = np.linalg.eigvalsh(H)
        return e - e[0]

    M = max(basis_size, n_levels + 2)
    e = solve(M)
    while True:
        e2 = solve(2 * M)
        if abs(e2[2] - e[2]) < tol:
            return ModeSpectrum(e2[:n_levels], "csfq")
        M *= 2
        if 2 * M > max_basis:
            raise ZZFreeError("numeric CSFQ spectrum did not converge within max_basis")
        e = e2
