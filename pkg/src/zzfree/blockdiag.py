"""Block diagonalisation of Hermitian matrices.

The least-action (LA) transform is the block-diagonalising unitary closest
to the identity. A perturbative (Schrieffer-Wolff type) counterpart,
expanded order by order in the off-diagonal part, is provided for
comparison at weak coupling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import EPS_DIV, DegeneracyError, DivergenceError

TIE_TOL = 1e-8


@dataclass(frozen=True)
class BlockPartition:
    """Disjoint index blocks covering ``range(dim)``; the first block is kept."""

    blocks: tuple
    dim: int

    def __post_init__(self):
        blocks = tuple(tuple(int(i) for i in b) for b in self.blocks if len(b))
        allidx = sorted(i for b in blocks for i in b)
        if allidx != list(range(self.dim)):
            raise ValueError("blocks must be disjoint and cover every basis index")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def split(cls, P, dim):
        P = [int(i) for i in P]
        Q = [i for i in range(dim) if i not in set(P)]
        return cls((tuple(P), tuple(Q)), dim)

    @classmethod
    def from_blocks(cls, blocks, dim):
        """Blocks listed explicitly; indices not covered form a final block."""
        used = {int(i) for b in blocks for i in b}
        rest = tuple(i for i in range(dim) if i not in used)
        return cls(tuple(tuple(b) for b in blocks) + ((rest,) if rest else ()), dim)

    @property
    def P(self):
        return self.blocks[0]

    @property
    def Q(self):
        return tuple(i for b in self.blocks[1:] for i in b)

    def labels(self):
        lab = np.empty(self.dim, int)
        for k, b in enumerate(self.blocks):
            lab[list(b)] = k
        return lab


@dataclass(frozen=True)
class UnitaryTransform:
    """``T`` such that ``T H T^dag`` is block diagonal for ``partition``."""

    T: np.ndarray
    partition: BlockPartition
    unitarity_residual: float
    eigenvalues: np.ndarray = None
    block_of_eigenvector: np.ndarray = None

    def apply(self, H):
        return self.T @ H @ self.T.conj().T


def _as_partition(partition, dim):
    if isinstance(partition, BlockPartition):
        if partition.dim != dim:
            raise ValueError("partition dimension does not match the matrix")
        return partition
    partition = list(partition)
    if partition and np.ndim(partition[0]) == 0:
        return BlockPartition.split(partition, dim)
    return BlockPartition.from_blocks(partition, dim)


def assign_to_blocks(S, partition: BlockPartition, tol=TIE_TOL):
    """Assign eigenvectors (columns of ``S``) to blocks maximising total weight.

    Each block receives as many eigenvectors as its size. Raises
    ``DegeneracyError`` if swapping two eigenvectors between blocks would
    change the total weight by less than ``tol`` (ambiguous assignment).
    """
    d = S.shape[0]
    W = np.stack([np.sum(np.abs(S[list(b), :]) ** 2, axis=0) for b in partition.blocks])  # (nb, d)
    if W.shape[0] == 1:
        return np.zeros(d, int), W
    slots = np.concatenate([np.full(len(b), k) for k, b in enumerate(partition.blocks)])
    cost = -W[slots, :]  # slot x eigenvector
    rows, cols = linear_sum_assignment(cost)
    blk = np.empty(d, int)
    blk[cols] = slots[rows]
    # ambiguity check over all cross-block swaps
    own = W[blk, np.arange(d)]
    for a in range(W.shape[0]):
        ia = np.where(blk == a)[0]
        for b in range(a + 1, W.shape[0]):
            ib = np.where(blk == b)[0]
            if ia.size == 0 or ib.size == 0:
                continue
            gain = (W[b, ia][:, None] + W[a, ib][None, :]) - (own[ia][:, None] + own[ib][None, :])
            if gain.max() > -tol:
                raise DegeneracyError("eigenvector-to-block assignment is ambiguous (overlap tie across blocks)")
    return blk, W


def _inv_sqrt_psd(M, floor=1e-14):
    ev, V = np.linalg.eigh(M)
    if ev.min() < floor:
        raise DegeneracyError("S_BD S_BD^dag is singular: assignment produced a rank-deficient block")
    return (V * ev ** -0.5) @ V.conj().T


def least_action_transform(H, partition, eigenpairs=None) -> UnitaryTransform:
    """Least-action block-diagonalising unitary.

    With ``S`` the eigenvector matrix and ``S_BD`` its block-diagonal part
    under the eigenvector-to-block assignment, the returned ``T`` equals
    ``[S S_BD^dag (S_BD S_BD^dag)^{-1/2}]^dag``, so that ``T H T^dag`` is
    block diagonal.
    """
    H = np.asarray(H)
    d = H.shape[0]
    part = _as_partition(partition, d)
    w, S = np.linalg.eigh(H) if eigenpairs is None else eigenpairs
    blk, _ = assign_to_blocks(S, part)
    lab = part.labels()
    Sbd = np.where(lab[:, None] == blk[None, :], S, 0)
    Tp = S @ Sbd.conj().T @ _inv_sqrt_psd(Sbd @ Sbd.conj().T)
    T = Tp.conj().T
    res = float(np.abs(T.conj().T @ T - np.eye(d)).max())
    return UnitaryTransform(T, part, res, w, blk)


def la_via_X(S, partition, eigenvalues=None) -> UnitaryTransform:
    """Least-action transform from the mixing block ``X`` of the eigenvectors.

    ``S`` holds eigenvectors as columns. Only the eigenvectors assigned to the
    kept block are used: ``X = S_QP S_PP^{-1}`` (rows Q/P, kept columns), then
    ``U = [[1, -X^dag], [X, 1]]`` and the transform is ``U (U^dag U)^{-1/2}``
    (returned in the ``T H T^dag`` convention).
    """
    S = np.asarray(S)
    d = S.shape[0]
    part = _as_partition(partition, d)
    if len(part.blocks) != 2:
        raise ValueError("la_via_X handles two-block partitions")
    P, Q = list(part.blocks[0]), list(part.blocks[1])
    blk, _ = assign_to_blocks(S, part)
    kept = np.where(blk == 0)[0]
    Spp = S[np.ix_(P, kept)]
    if abs(np.linalg.det(Spp)) < 1e-14:
        raise DegeneracyError("S_nn is singular")
    X = S[np.ix_(Q, kept)] @ np.linalg.inv(Spp)
    n, m = len(P), len(Q)
    U = np.zeros((d, d), complex)
    U[np.ix_(P, P)] = np.eye(n)
    U[np.ix_(Q, Q)] = np.eye(m)
    U[np.ix_(Q, P)] = X
    U[np.ix_(P, Q)] = -X.conj().T
    Tp = U @ _inv_sqrt_psd(U.conj().T @ U)
    T = Tp.conj().T
    res = float(np.abs(T.conj().T @ T - np.eye(d)).max())
    return UnitaryTransform(T, part, res, eigenvalues, blk)


def x_block_forms(S, partition):
    """The two equivalent expressions of the mixing block.

    Returns ``(-(S_PQ S_QQ^{-1})^dag, S_QP S_PP^{-1})`` where column blocks
    follow the eigenvector-to-block assignment.
    """
    S = np.asarray(S)
    part = _as_partition(partition, S.shape[0])
    P, Q = list(part.blocks[0]), list(part.blocks[1])
    blk, _ = assign_to_blocks(S, part)
    cp, cq = np.where(blk == 0)[0], np.where(blk == 1)[0]
    X1 = -(S[np.ix_(P, cq)] @ np.linalg.inv(S[np.ix_(Q, cq)])).conj().T
    X2 = S[np.ix_(Q, cp)] @ np.linalg.inv(S[np.ix_(P, cp)])
    return X1, X2


def block_reduce(H, partition, block=0):
    """Selected diagonal block of ``T H T^dag`` (default: the kept block)."""
    H = np.asarray(H)
    t = least_action_transform(H, partition)
    Hb = t.apply(H)
    idx = list(t.partition.blocks[block])
    out = Hb[np.ix_(idx, idx)]
    return (out + out.conj().T) / 2


def block_diagonal_part(H, partition):
    part = _as_partition(partition, H.shape[0])
    lab = part.labels()
    return np.where(lab[:, None] == lab[None, :], H, 0)


def _polymul(A, B, n):
    """Truncated product of matrix polynomials given as (n+1, d, d) arrays."""
    out = np.zeros_like(A if np.iscomplexobj(A) else B)
    for i in range(n + 1):
        for j in range(n + 1 - i):
            if A[i].any() and B[j].any():
                out[i + j] += A[i] @ B[j]
    return out


def _conjugate_series(Sp, Hp, n):
    """Order-by-order coefficients of ``exp(S) H exp(-S)``."""
    out = Hp.copy()
    term = Hp.copy()
    for m in range(1, n + 1):
        term = (_polymul(Sp, term, n) - _polymul(term, Sp, n)) / m
        out += term
    return out


def perturbative_block_diagonalize(H, partition, order=4, eps=EPS_DIV):
    """Schrieffer-Wolff block diagonalisation to finite order.

    The diagonal of ``H`` is the unperturbed part and the off-diagonal
    remainder the perturbation. An anti-Hermitian, block-off-diagonal
    generator ``S = S_1 + ... + S_order`` is built order by order so that
    ``exp(S) H exp(-S)`` is block diagonal through ``order``.

    Returns
    -------
    H_eff : ndarray
        Block-diagonal effective Hamiltonian through ``order``.
    S : ndarray
        The generator summed over orders.
    """
    H = np.asarray(H, dtype=complex)
    d = H.shape[0]
    part = _as_partition(partition, d)
    lab = part.labels()
    cross = lab[:, None] != lab[None, :]
    h = np.real(np.diag(H))
    gap = h[:, None] - h[None, :]
    V = H - np.diag(np.diag(H))
    Hp = np.zeros((order + 1, d, d), complex)
    Hp[0] = np.diag(np.diag(H))
    Hp[1] = V
    Sp = np.zeros_like(Hp)
    with np.errstate(divide="ignore", invalid="ignore"):
        inv_gap = np.where(cross, 1.0 / gap, 0.0)
    small = cross & (np.abs(gap) < eps)
    for k in range(1, order + 1):
        Ht = _conjugate_series(Sp, Hp, order)
        R = np.where(cross, Ht[k], 0)
        if np.any(small & (np.abs(R) > 1e-15)):
            raise DivergenceError("perturbative block diagonalisation hits a near-degenerate cross-block pair")
        Sp[k] = R * inv_gap
    Ht = _conjugate_series(Sp, Hp, order)
    Heff = np.where(cross, 0, Ht.sum(axis=0))
    return (Heff + Heff.conj().T) / 2, Sp.sum(axis=0)


def sw_transform_residual(H, partition, order=4):
    """Largest cross-block element left after the finite-order transform."""
    Heff, S = perturbative_block_diagonalize(H, partition, order)
    from scipy.linalg import expm

    U = expm(S)
    Hb = U @ np.asarray(H) @ U.conj().T
    part = _as_partition(partition, Hb.shape[0])
    lab = part.labels()
    return float(np.abs(np.where(lab[:, None] != lab[None, :], Hb, 0)).max())


def two_stage_reduction(H_full, spec):
    """Coupler elimination then computational-subspace extraction.

    Parameters
    ----------
    H_full : ndarray or OperatorMatrix
        Three-mode Hamiltonian in the row-major ``(n1, nc, n2)`` basis.
    spec : CircuitSpec

    Returns
    -------
    H4 : ndarray
        4x4 block on ``|00>, |01>, |10>, |11>``.
    H2q : ndarray
        Multilevel two-qubit block (coupler in its ground state), row-major ``(n1, n2)``.
    """
    M = getattr(H_full, "matrix", H_full)
    H2q = reduce_coupler(M, spec)
    n2 = spec.truncations[2]
    H4 = block_reduce(H2q, computational_indices(n2))
    return H4, H2q


def coupler_ground_indices(spec):
    n1, nc, n2 = spec.truncations
    return [(a * nc + 0) * n2 + b for a in range(n1) for b in range(n2)]


def reduce_coupler(M, spec):
    """LA reduction of the three-mode matrix onto the coupler-ground manifold."""
    return block_reduce(np.asarray(M), coupler_ground_indices(spec))


def computational_indices(n2):
    """Indices of |00>, |01>, |10>, |11> in a row-major two-qubit basis with ``n2`` target levels."""
    return [0, 1, n2, n2 + 1]
