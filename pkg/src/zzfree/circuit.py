"""Two qubits coupled directly and through a harmonic bus: full three-mode Hamiltonian."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from .qubit_models import ModeSpectrum, duffing_energies, harmonic_spectrum


class BareLabel(NamedTuple):
    """Occupation numbers ``(n1, nc, n2)``."""

    n1: int
    nc: int
    n2: int


@dataclass(frozen=True)
class CircuitSpec:
    """Device description.

    Frequencies and couplings are in GHz. ``truncations`` gives the number of
    retained levels of (qubit 1, coupler, qubit 2).
    """

    q1: ModeSpectrum
    q2: ModeSpectrum
    coupler: ModeSpectrum
    g12: float = 0.0
    g1c: float = 0.0
    g2c: float = 0.0
    truncations: tuple = (5, 5, 5)
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        n1, nc, n2 = self.truncations
        for name, mode, n in (("q1", self.q1, n1), ("coupler", self.coupler, nc), ("q2", self.q2, n2)):
            if n < 1:
                raise ValueError(f"truncation of {name} must be >= 1")
            if mode.n_levels < n:
                raise ValueError(f"{name} spectrum has {mode.n_levels} levels, truncation {n}")
        object.__setattr__(self, "truncations", tuple(int(n) for n in self.truncations))

    @classmethod
    def from_params(cls, w1, d1, w2, d2, wc, g1c, g2c, g12=0.0, truncations=(5, 5, 5),
                    q1_label="transmon", q2_label="transmon", extra_levels=3, **meta):
        """Duffing qubits and a harmonic coupler from frequencies/anharmonicities."""
        n1, nc, n2 = truncations
        # keep a few spare levels so perturbative formulas can read omega_q(n)
        q1 = ModeSpectrum(duffing_energies(w1, d1, n1 + extra_levels), q1_label)
        q2 = ModeSpectrum(duffing_energies(w2, d2, n2 + extra_levels), q2_label)
        c = harmonic_spectrum(wc, nc + extra_levels)
        return cls(q1, q2, c, g12, g1c, g2c, tuple(truncations), dict(meta))

    # convenience views
    @property
    def w1(self):
        return self.q1.frequency

    @property
    def w2(self):
        return self.q2.frequency

    @property
    def wc(self):
        return self.coupler.frequency

    @property
    def d1(self):
        return self.q1.anharmonicity

    @property
    def d2(self):
        return self.q2.anharmonicity

    @property
    def dim(self):
        n1, nc, n2 = self.truncations
        return n1 * nc * n2

    @property
    def dispersive_ratio(self):
        """Largest ``|g| / |detuning|`` over the three coupled pairs."""
        pairs = ((self.g1c, self.wc - self.w1), (self.g2c, self.wc - self.w2), (self.g12, self.w2 - self.w1))
        r = [abs(g) / abs(d) if d != 0 else np.inf for g, d in pairs if g != 0]
        return max(r) if r else 0.0

    @property
    def dispersive(self):
        return self.dispersive_ratio < 0.1

    def with_truncations(self, truncations):
        return replace(self, truncations=tuple(truncations))


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense Hermitian matrix over a labelled bare basis."""

    matrix: np.ndarray
    basis: tuple

    @property
    def dim(self):
        return self.matrix.shape[0]

    def index(self, label):
        return self.basis.index(tuple(label))


def bare_index(label, spec: CircuitSpec) -> int:
    """Row-major index with ``n1`` slowest and ``n2`` fastest."""
    n1, nc, n2 = spec.truncations
    a, c, b = label
    if not (0 <= a < n1 and 0 <= c < nc and 0 <= b < n2):
        raise IndexError(f"label {tuple(label)} outside truncation {spec.truncations}")
    return (a * nc + c) * n2 + b


def bare_label(index: int, spec: CircuitSpec) -> BareLabel:
    n1, nc, n2 = spec.truncations
    if not 0 <= index < n1 * nc * n2:
        raise IndexError(f"index {index} outside dimension {n1 * nc * n2}")
    a, rest = divmod(index, nc * n2)
    c, b = divmod(rest, n2)
    return BareLabel(a, c, b)


def basis_labels(spec: CircuitSpec):
    return tuple(bare_label(i, spec) for i in range(spec.dim))


def ladder(n, sqrt=True):
    """Truncated lowering operator ``a = sum_m sqrt(m) |m-1><m|``."""
    amp = np.sqrt(np.arange(1, n)) if sqrt else np.ones(n - 1)
    return np.diag(amp, 1)


def _embed(ops):
    out = ops[0]
    for o in ops[1:]:
        out = np.kron(out, o)
    return out


def bare_energies(spec: CircuitSpec):
    n1, nc, n2 = spec.truncations
    e1 = spec.q1.energies[:n1]
    ec = spec.coupler.energies[:nc]
    e2 = spec.q2.energies[:n2]
    return (e1[:, None, None] + ec[None, :, None] + e2[None, None, :]).ravel()


def build_full_hamiltonian(spec: CircuitSpec) -> OperatorMatrix:
    """Three-mode Hamiltonian with ``g (a_i + a_i^dag)(a_j + a_j^dag)`` couplings.

    Counter-rotating terms are kept.
    """
    n1, nc, n2 = spec.truncations
    I1, Ic, I2 = np.eye(n1), np.eye(nc), np.eye(n2)
    x1 = ladder(n1) + ladder(n1).T
    xc = ladder(nc) + ladder(nc).T
    x2 = ladder(n2) + ladder(n2).T
    H = np.diag(bare_energies(spec))
    if spec.g1c:
        H = H + spec.g1c * _embed([x1, xc, I2])
    if spec.g2c:
        H = H + spec.g2c * _embed([I1, xc, x2])
    if spec.g12:
        H = H + spec.g12 * _embed([x1, Ic, x2])
    return OperatorMatrix(H, basis_labels(spec))
