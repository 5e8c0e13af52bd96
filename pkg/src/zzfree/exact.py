"""Nonperturbative static ZZ from direct diagonalisation."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from ._pool import parallel_map
from .circuit import CircuitSpec, OperatorMatrix, bare_energies, build_full_hamiltonian
from .effective import effective_hamiltonian


class AssignmentWarning(UserWarning):
    """A dressed state has weak overlap with its bare label."""


@dataclass(frozen=True)
class DressedAssignment:
    """Bare label -> (dressed energy, eigenvector index, overlap)."""

    labels: tuple
    energies: np.ndarray
    vector_index: np.ndarray
    overlap: np.ndarray

    def energy(self, label):
        return float(self.energies[self.labels.index(tuple(label))])

    def as_dict(self):
        return {l: (float(e), int(k), float(o)) for l, e, k, o in
                zip(self.labels, self.energies, self.vector_index, self.overlap)}


def eigensolve(H):
    """Ascending eigenvalues and orthonormal eigenvectors of a Hermitian matrix."""
    M = H.matrix if isinstance(H, OperatorMatrix) else np.asarray(H)
    scale = max(np.abs(M).max(), 1.0)
    if np.abs(M - M.conj().T).max() > 1e-12 * scale:
        raise ValueError("matrix is not Hermitian")
    return np.linalg.eigh(M)


def assign_dressed_states(eigenpairs, basis, warn_below=0.5) -> DressedAssignment:
    """Greedy maximum-overlap labelling.

    Eigenvectors are visited in ascending energy; each takes the unclaimed
    bare label with the largest overlap (ties go to the smaller index).
    ``warn_below=None`` disables the weak-overlap warning.
    """
    w, V = eigenpairs
    d = len(w)
    ov = np.abs(V) ** 2
    free = np.ones(d, bool)
    vec_of = np.empty(d, int)
    best = np.empty(d)
    for k in np.argsort(w, kind="stable"):
        col = np.where(free, ov[:, k], -1.0)
        i = int(np.argmax(col))  # argmax returns the first maximum
        free[i] = False
        vec_of[i] = k
        best[i] = ov[i, k]
    weak = best <= (warn_below if warn_below is not None else -1.0)
    if np.any(weak):
        bad = [tuple(basis[i]) for i in np.where(weak)[0][:3]]
        warnings.warn(f"weak dressed-state overlap for labels {bad}", AssignmentWarning, stacklevel=2)
    return DressedAssignment(tuple(tuple(b) for b in basis), w[vec_of], vec_of, np.sqrt(best))


def _two_qubit_labels(n1, n2):
    return tuple((a, 0, b) for a in range(n1) for b in range(n2))


def model_hamiltonian(spec: CircuitSpec, model="circuit"):
    """Hamiltonian and bare labels for ``model`` in {"circuit", "effective"}.

    ``"circuit"`` is the full three-mode matrix; ``"effective"`` the two-qubit
    multilevel matrix with the coupler eliminated perturbatively (labels carry
    ``nc = 0``).
    """
    if model == "circuit":
        op = build_full_hamiltonian(spec)
        return op.matrix, op.basis
    if model == "effective":
        n1, _, n2 = spec.truncations
        return effective_hamiltonian(spec), _two_qubit_labels(n1, n2)
    raise ValueError(f"unknown model {model!r}")


def zz_from_assignment(a: DressedAssignment):
    E = a.energy
    return E((1, 0, 1)) - E((1, 0, 0)) - E((0, 0, 1)) + E((0, 0, 0))


def static_zz_exact(spec: CircuitSpec, model="circuit", warn=True) -> float:
    """Static ZZ (GHz) from dressed energies of |000>, |100>, |001>, |101>.

    Warns (``AssignmentWarning``) if one of them has squared overlap <= 1/2
    with its bare state, unless ``warn`` is false.
    """
    if min(spec.truncations[0], spec.truncations[2]) < 3 or (model == "circuit" and spec.truncations[1] < 3):
        raise ValueError("static ZZ needs truncations of at least (3, 3, 3)")
    H, basis = model_hamiltonian(spec, model)
    a = assign_dressed_states(np.linalg.eigh(H), basis, warn_below=None)
    for lab in ((0, 0, 0), (1, 0, 0), (0, 0, 1), (1, 0, 1)) if warn else ():
        if a.overlap[a.labels.index(lab)] ** 2 <= 0.5:
            warnings.warn(f"dressed state {lab} has overlap^2 <= 0.5", AssignmentWarning, stacklevel=2)
    return zz_from_assignment(a)


def dressed_assignment(spec: CircuitSpec, model="circuit") -> DressedAssignment:
    H, basis = model_hamiltonian(spec, model)
    return assign_dressed_states(np.linalg.eigh(H), basis)


def energy_dispersion(spec: CircuitSpec, model="circuit") -> dict:
    """Dressed minus bare energy for every retained label (GHz)."""
    a = dressed_assignment(spec, model)
    if model == "circuit":
        bare = bare_energies(spec)
    else:
        n1, _, n2 = spec.truncations
        bare = np.add.outer(spec.q1.energies[:n1], spec.q2.energies[:n2]).ravel()
    return {l: float(e - b) for l, e, b in zip(a.labels, a.energies, bare)}


def find_zero_crossings(f, grid, xtol=1e-7, ztol=1e-7, values=None):
    """Roots of ``f`` on ``grid`` by sign-change bracketing and bisection.

    Sign changes across poles or labelling jumps are rejected: a bracket
    is kept only if ``|f|`` at the bisected point is below ``ztol``.
    """
    grid = np.asarray(grid, float)
    vals = np.array([f(x) for x in grid]) if values is None else np.asarray(values)
    roots = []
    for i in range(len(grid) - 1):
        a, b = vals[i], vals[i + 1]
        if not (np.isfinite(a) and np.isfinite(b)):
            continue
        if a == 0:
            roots.append(float(grid[i]))
            continue
        if np.sign(a) == np.sign(b):
            continue
        r = optimize.bisect(f, grid[i], grid[i + 1], xtol=xtol)
        if abs(f(r)) < ztol:
            roots.append(float(r))
    return roots


def zz_free_boundary(d1_values, Delta_values, base: CircuitSpec, model="circuit", workers=None):
    """ZZ-free detunings along lines of fixed ``delta1``.

    Returns a list of ``(delta1, [Delta*, ...])`` in input order. Qubit 2 and
    the coupler are held fixed; ``w1 = w2 - Delta``.
    """
    from .devices import with_params

    def line(d1):
        s0 = with_params(base, d1=d1)

        def z(D):
            return static_zz_exact(with_params(s0, Delta=D), model, warn=False)

        return (float(d1), find_zero_crossings(z, Delta_values, ztol=1e-7))

    return parallel_map(line, list(d1_values), workers)
