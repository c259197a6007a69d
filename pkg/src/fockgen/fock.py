"""Bosonic Fock space over the lattice modes, truncated at total particle number K.

Basis states are multisets of momentum-mode indices, listed sector by sector
(0, 1, ..., K particles) and lexicographically within a sector, e.g. for two
modes and ``K = 2``::

    (), (0,), (1,), (0, 0), (0, 1), (1, 1)

Operators are ``scipy.sparse`` CSR matrices on this basis.  Everything built
from ``a^dagger a`` pairs conserves particle number and is therefore exact on
the truncated space; bare ladder operators are exact only between sectors
below the cutoff.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from itertools import combinations_with_replacement
from math import comb

import numpy as np
import scipy.sparse as sp

from .grid import Basis, Grid, transform_array
from .onebody import OneBodyOp, change_basis

DEFAULT_BUDGET = 2_000_000


class CapacityError(RuntimeError):
    """Requested Fock space is larger than the configured budget."""

    def __init__(self, dim: int, budget: int):
        super().__init__(f"Fock space dimension {dim} exceeds the budget {budget} (set FOCKGEN_BUDGET to override)")
        self.dim = dim
        self.budget = budget


class NormalizationError(ValueError):
    """Covariant normalisation requested for coordinate-space ladders."""


class OpKind(str, Enum):
    LADDER = "ladder"
    GENERATOR = "generator"
    UNITARY = "unitary"
    OTHER = "other"


def fock_dimension(M: int, K: int) -> int:
    return comb(M + K, K)


def budget_from_env() -> int:
    raw = os.environ.get("FOCKGEN_BUDGET")
    return int(raw) if raw else DEFAULT_BUDGET


@dataclass(frozen=True, eq=False)
class FockSpace:
    grid: Grid
    K: int
    states: list = field(repr=False)  # tuple of mode indices per basis state
    sector_offsets: np.ndarray = field(repr=False)  # start index of each sector, length K + 2

    @property
    def M(self) -> int:
        return self.grid.mode_count

    @property
    def dim(self) -> int:
        return len(self.states)

    @cached_property
    def index(self) -> dict:
        return {s: i for i, s in enumerate(self.states)}

    def state_index(self, modes) -> int:
        return self.index[tuple(sorted(modes))]

    def sector(self, k: int) -> slice:
        return slice(int(self.sector_offsets[k]), int(self.sector_offsets[k + 1]))

    @cached_property
    def particle_numbers(self) -> np.ndarray:
        return np.repeat(np.arange(self.K + 1), np.diff(self.sector_offsets))

    @cached_property
    def occupations(self) -> sp.csr_matrix:
        """Sparse ``(dim, M)`` occupation numbers."""
        rows, cols = [], []
        for i, s in enumerate(self.states):
            rows.extend([i] * len(s))
            cols.extend(s)
        data = np.ones(len(rows))
        return sp.csr_matrix((data, (rows, cols)), shape=(self.dim, self.M))

    @cached_property
    def _annihilations(self):
        """All single-particle removals: (src, mode, dst, sqrt(n_mode))."""
        src, mode, dst, amp = [], [], [], []
        idx = self.index
        for i, s in enumerate(self.states):
            if not s:
                continue
            prev = None
            for pos, p in enumerate(s):
                if p == prev:
                    continue
                prev = p
                count = s.count(p)
                src.append(i)
                mode.append(p)
                dst.append(idx[s[:pos] + s[pos + 1:]])
                amp.append(np.sqrt(count))
        order = np.argsort(np.asarray(mode, dtype=np.int64), kind="stable")
        return (
            np.asarray(src, dtype=np.int64)[order],
            np.asarray(mode, dtype=np.int64)[order],
            np.asarray(dst, dtype=np.int64)[order],
            np.asarray(amp, dtype=float)[order],
        )

    @cached_property
    def _creation_table(self):
        """For states below the cutoff: target index and amplitude of a^dagger_i, shape (dim_<K, M)."""
        n_below = int(self.sector_offsets[self.K])
        target = np.empty((n_below, self.M), dtype=np.int64)
        amp = np.empty((n_below, self.M))
        idx = self.index
        for t in range(n_below):
            s = self.states[t]
            for i in range(self.M):
                new = tuple(sorted(s + (i,)))
                target[t, i] = idx[new]
                amp[t, i] = np.sqrt(s.count(i) + 1)
        return target, amp

    def vacuum(self) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[0] = 1.0
        return v

    def basis_state(self, modes) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[self.state_index(modes)] = 1.0
        return v

    def particle_number_of(self, state: np.ndarray, atol: float = 1e-12):
        """Particle number if ``state`` lies in a single sector, else None."""
        weights = np.abs(state) ** 2
        present = [k for k in range(self.K + 1) if weights[self.sector(k)].sum() > atol * max(weights.sum(), 1.0)]
        return present[0] if len(present) == 1 else None


def build_fock(grid: Grid, K: int, budget: int | None = None) -> FockSpace:
    if K < 0:
        raise ValueError(f"particle cutoff must be >= 0, got {K}")
    budget = budget_from_env() if budget is None else budget
    M = grid.mode_count
    dim = fock_dimension(M, K)
    if dim > budget:
        raise CapacityError(dim, budget)
    states, offsets = [], [0]
    for k in range(K + 1):
        states.extend(combinations_with_replacement(range(M), k))
        offsets.append(len(states))
    return FockSpace(grid=grid, K=K, states=states, sector_offsets=np.asarray(offsets))


@dataclass(frozen=True, eq=False)
class FockOp:
    matrix: sp.csr_matrix
    kind: OpKind = OpKind.OTHER

    def __post_init__(self):
        object.__setattr__(self, "matrix", sp.csr_matrix(self.matrix, dtype=complex))
        object.__setattr__(self, "kind", OpKind(self.kind))

    @property
    def shape(self):
        return self.matrix.shape

    def __matmul__(self, other):
        if isinstance(other, FockOp):
            return FockOp(self.matrix @ other.matrix)
        return self.matrix @ other

    def __add__(self, other):
        return FockOp(self.matrix + other.matrix)

    def __sub__(self, other):
        return FockOp(self.matrix - other.matrix)

    def __mul__(self, c):
        return FockOp(c * self.matrix, self.kind)

    __rmul__ = __mul__

    def dag(self) -> "FockOp":
        return FockOp(self.matrix.conj().T.tocsr(), self.kind)

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def norm(self) -> float:
        return float(sp.linalg.norm(self.matrix)) if self.matrix.nnz else 0.0


def _coordinate_coefficients(grid: Grid, site: int) -> np.ndarray:
    """``M^-1/2 exp(+i p.x)`` for every momentum mode: a~(x) = sum_p c_p a(p)."""
    return np.exp(1j * (grid.momenta @ grid.positions[site])) / np.sqrt(grid.mode_count)


def momentum_annihilator(fock: FockSpace, mode: int) -> sp.csr_matrix:
    src, modes, dst, amp = fock._annihilations
    lo, hi = np.searchsorted(modes, [mode, mode + 1])
    return sp.csr_matrix((amp[lo:hi].astype(complex), (dst[lo:hi], src[lo:hi])), shape=(fock.dim, fock.dim))


def coordinate_annihilator(fock: FockSpace, site: int) -> sp.csr_matrix:
    """``a~(x)`` assembled entry by entry: same sparsity as the a(p), weights from the DFT row."""
    src, modes, dst, amp = fock._annihilations
    c = _coordinate_coefficients(fock.grid, site)
    return sp.csr_matrix((amp * c[modes], (dst, src)), shape=(fock.dim, fock.dim))


def coordinate_annihilator_by_sum(fock: FockSpace, site: int) -> sp.csr_matrix:
    """``a~(x) = sum_p c_p a(p)`` as an explicit sum over momentum ladders."""
    c = _coordinate_coefficients(fock.grid, site)
    out = sp.csr_matrix((fock.dim, fock.dim), dtype=complex)
    for p in range(fock.M):
        out = out + c[p] * momentum_annihilator(fock, p)
    return out


def ladder(fock: FockSpace, mode: int, basis=Basis.MOMENTUM, kind: str = "annihilate",
           normalization: str = "noncovariant") -> FockOp:
    """Annihilation or creation operator for one momentum mode or lattice site.

    ``normalization="covariant"`` gives ``a_c(p) = sqrt(2 omega_p) a(p)`` and is
    only defined in the momentum basis.
    """
    basis = Basis(basis)
    if kind not in ("annihilate", "create"):
        raise ValueError(f"kind must be 'annihilate' or 'create', got {kind!r}")
    if normalization not in ("noncovariant", "covariant"):
        raise ValueError(f"unknown normalization {normalization!r}")
    if not 0 <= mode < fock.M:
        raise IndexError(f"mode index {mode} out of range for {fock.M} modes")
    if basis is Basis.COORDINATE:
        if normalization == "covariant":
            raise NormalizationError("coordinate ladders are defined from noncovariant momentum ladders only")
        mat = coordinate_annihilator(fock, mode)
    else:
        mat = momentum_annihilator(fock, mode)
        if normalization == "covariant":
            mat = np.sqrt(2 * fock.grid.omega[mode]) * mat
    if kind == "create":
        mat = mat.conj().T
    return FockOp(mat, OpKind.LADDER)


def dgamma(fock: FockSpace, A) -> FockOp:
    """Second quantisation ``sum_ij A_ij a^dagger_i a_j``.

    ``A`` is a :class:`OneBodyOp` (coordinate operators are first brought to
    the momentum basis, which leaves the lifted operator unchanged) or a raw
    momentum-basis matrix.
    """
    if isinstance(A, OneBodyOp):
        if A.basis is Basis.COORDINATE:
            A = change_basis(A, Basis.MOMENTUM, fock.grid)
        mat = A.matrix
    else:
        mat = np.asarray(A, dtype=complex)
    if mat.shape != (fock.M, fock.M):
        raise ValueError(f"one-body matrix has shape {mat.shape}, expected ({fock.M}, {fock.M})")
    if fock.K == 0:
        return FockOp(sp.csr_matrix((fock.dim, fock.dim), dtype=complex), OpKind.GENERATOR)
    src, modes, dst, alpha = fock._annihilations
    target, beta = fock._creation_table
    # entry (create_i(dst), src) gets A[i, j] * alpha * beta
    vals = mat[:, modes].T * (alpha[:, None] * beta[dst])
    rows = target[dst]
    cols = np.broadcast_to(src[:, None], rows.shape)
    keep = vals != 0
    out = sp.coo_matrix((vals[keep], (rows[keep], cols[keep])), shape=(fock.dim, fock.dim)).tocsr()
    out.sum_duplicates()
    return FockOp(out, OpKind.GENERATOR)


def dgamma_coordinate(fock: FockSpace, A: OneBodyOp) -> FockOp:
    """``sum_xy A_xy a~^dagger(x) a~(y)`` assembled from coordinate ladders (small grids only)."""
    if A.basis is not Basis.COORDINATE:
        A = change_basis(A, Basis.COORDINATE, fock.grid)
    ann = [coordinate_annihilator(fock, x) for x in range(fock.M)]
    out = sp.csr_matrix((fock.dim, fock.dim), dtype=complex)
    for x in range(fock.M):
        row = A.matrix[x]
        nz = np.nonzero(row)[0]
        if not len(nz):
            continue
        combo = sum((row[y] * ann[y] for y in nz), sp.csr_matrix((fock.dim, fock.dim), dtype=complex))
        out = out + ann[x].conj().T @ combo
    return FockOp(out, OpKind.GENERATOR)


def diagonal_lift(fock: FockSpace, per_mode: np.ndarray) -> np.ndarray:
    """Diagonal of ``dGamma(diag(per_mode))`` on the occupation basis."""
    return np.asarray(fock.occupations @ np.asarray(per_mode, dtype=complex)).ravel()


def number_op(fock: FockSpace) -> FockOp:
    return FockOp(sp.diags(fock.particle_numbers.astype(complex)).tocsr(), OpKind.GENERATOR)


def fock_commutator(A: FockOp, B: FockOp) -> FockOp:
    if A.shape != B.shape:
        raise ValueError(f"shape mismatch {A.shape} vs {B.shape}")
    return FockOp(A.matrix @ B.matrix - B.matrix @ A.matrix)


def mode_permutation_lift(fock: FockSpace, perm: np.ndarray) -> sp.csr_matrix:
    """Unitary moving every particle from mode ``p`` to mode ``perm[p]``."""
    perm = np.asarray(perm)
    cols = np.arange(fock.dim)
    rows = np.array([fock.index[tuple(sorted(perm[list(s)].tolist()))] for s in fock.states], dtype=np.int64)
    return sp.csr_matrix((np.ones(fock.dim, dtype=complex), (rows, cols)), shape=(fock.dim, fock.dim))


def one_particle_state(fock: FockSpace, wavefunction: np.ndarray, basis=Basis.MOMENTUM) -> np.ndarray:
    """Embed a single-particle wave function into the one-particle sector."""
    psi = np.asarray(wavefunction, dtype=complex)
    if Basis(basis) is Basis.COORDINATE:
        psi = transform_array(psi, fock.grid, Basis.COORDINATE, Basis.MOMENTUM)
    if fock.K < 1:
        raise ValueError("the Fock space has no one-particle sector")
    v = np.zeros(fock.dim, dtype=complex)
    v[fock.sector(1)] = psi  # sector 1 lists modes (0,), (1,), ... in order
    return v
