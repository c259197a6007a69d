"""Space-time translations and lattice rotations as unitaries on Fock space.

Conventions, fixed so that the coordinate ladders transform as

    U_shift(y) a~(x) U_shift(y)^-1 = a~(x + y)
    U_rot(R)   a~(x) U_rot(R)^-1   = a~(R x)
    U_time(t)  a~(x) U_time(t)^-1  = exp(i t P0) a~(x) exp(-i t P0) = phi1(t, x)

i.e. ``U_time(t) = exp(+i t dGamma(omega))`` and
``U_shift(y) = exp(-i dGamma(p.y))``, both diagonal on the occupation
basis, and ``U_rot`` moves the particles of momentum mode ``p`` to ``R p``.
Only lattice vectors and the signed-permutation rotations of the cube are
supported; those keep every identity exact to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations, product

import numpy as np
import scipy.sparse as sp

from .fock import FockOp, FockSpace, OpKind, coordinate_annihilator, diagonal_lift, mode_permutation_lift
from .grid import Grid, lattice_kernel


class UnsupportedElementError(ValueError):
    """Group element outside the lattice-exact subgroup (or a boost)."""


def _validate_rotation(R: np.ndarray, n: int) -> np.ndarray:
    R = np.asarray(R)
    if R.shape != (n, n):
        raise UnsupportedElementError(f"rotation must be {n}x{n}, got shape {R.shape}")
    if not np.all(np.isin(R, (-1, 0, 1))) or not np.array_equal(R @ R.T, np.eye(n, dtype=int)):
        raise UnsupportedElementError("only signed-permutation rotations map the lattice onto itself")
    if round(np.linalg.det(R)) != 1:
        raise UnsupportedElementError("improper rotation (det -1) is not in the proper group")
    return R.astype(int)


@dataclass(frozen=True, eq=False)
class PoincareElement:
    """Time shift ``y0``, integer lattice shift ``shift`` (units of a) and rotation ``R``."""

    n: int
    y0: float = 0.0
    shift: np.ndarray = None
    R: np.ndarray = None
    rapidity: tuple | None = None  # boosts are representable as data but never acted on

    def __post_init__(self):
        shift = np.zeros(self.n, dtype=int) if self.shift is None else np.asarray(self.shift)
        if shift.shape != (self.n,) or not np.all(shift == np.round(shift)):
            raise UnsupportedElementError(f"spatial shift must be {self.n} integers (lattice units), got {shift}")
        object.__setattr__(self, "shift", shift.astype(int))
        R = np.eye(self.n, dtype=int) if self.R is None else self.R
        object.__setattr__(self, "R", _validate_rotation(R, self.n))
        object.__setattr__(self, "y0", float(self.y0))

    @classmethod
    def from_physical_shift(cls, grid: Grid, y, y0: float = 0.0, R=None) -> "PoincareElement":
        steps = np.asarray(y, dtype=float) / grid.a
        if not np.allclose(steps, np.round(steps), rtol=0, atol=1e-9):
            raise UnsupportedElementError(f"shift {y} is not a multiple of the lattice spacing {grid.a}")
        return cls(grid.n, y0, np.round(steps).astype(int), R)

    def compose(self, other: "PoincareElement") -> "PoincareElement":
        """``self o other``: (y, R)(y', R') = (y + R y', R R')."""
        return PoincareElement(self.n, self.y0 + other.y0, self.shift + self.R @ other.shift, self.R @ other.R)

    @property
    def is_boost(self) -> bool:
        return self.rapidity is not None and any(self.rapidity)

    def kind(self) -> str:
        parts = []
        if self.y0 != 0:
            parts.append("time")
        if np.any(self.shift):
            parts.append("shift")
        if not np.array_equal(self.R, np.eye(self.n, dtype=int)):
            parts.append("rotation")
        return "+".join(parts) or "identity"


def lattice_rotations(n: int) -> list:
    """All proper signed-permutation matrices: 1, 4 or 24 of them for n = 1, 2, 3."""
    out = []
    for perm in permutations(range(n)):
        for signs in product((1, -1), repeat=n):
            R = np.zeros((n, n), dtype=int)
            for row, (col, s) in enumerate(zip(perm, signs)):
                R[row, col] = s
            if round(np.linalg.det(R)) == 1:
                out.append(R)
    return out


def site_permutation(grid: Grid, R: np.ndarray, shift=None) -> np.ndarray:
    """Index of site ``R x + y`` for every site ``x``."""
    j = grid.site_ints @ np.asarray(R).T
    if shift is not None:
        j = j + np.asarray(shift)
    k = grid.wrap_site(j) + grid.N // 2
    return np.ravel_multi_index(tuple(k.T), grid.shape)


def mode_permutation(grid: Grid, R: np.ndarray) -> np.ndarray:
    """Index of momentum ``R p`` (folded into the zone) for every mode ``p``."""
    q = grid.mom_ints @ np.asarray(R).T
    k = grid.wrap_mom(q) + grid.N // 2 - 1
    return np.ravel_multi_index(tuple(k.T), grid.shape)


def _check_supported(g: PoincareElement, grid: Grid):
    if g.is_boost:
        raise UnsupportedElementError("boosts do not act on the coordinate ladders; only translations and rotations")
    if g.n != grid.n:
        raise UnsupportedElementError(f"element is for n = {g.n}, grid has n = {grid.n}")


def time_unitary(fock: FockSpace, t: float) -> FockOp:
    """``exp(+i t P0)``: phase ``exp(+i t sum_p n_p omega_p)`` per basis state."""
    diag = np.exp(1j * t * diagonal_lift(fock, fock.grid.omega).real)
    return FockOp(sp.diags(diag).tocsr(), OpKind.UNITARY)


def shift_unitary(fock: FockSpace, shift) -> FockOp:
    grid = fock.grid
    y = grid.a * np.asarray(shift, dtype=float)
    diag = np.exp(-1j * diagonal_lift(fock, grid.momenta @ y).real)
    return FockOp(sp.diags(diag).tocsr(), OpKind.UNITARY)


def rotation_unitary(fock: FockSpace, R) -> FockOp:
    return FockOp(mode_permutation_lift(fock, mode_permutation(fock.grid, R)), OpKind.UNITARY)


def unitary_of(fock: FockSpace, g: PoincareElement) -> FockOp:
    """``U(g) = U_time(y0) U_shift(y) U_rot(R)``."""
    _check_supported(g, fock.grid)
    U = rotation_unitary(fock, g.R).matrix
    if np.any(g.shift):
        U = shift_unitary(fock, g.shift).matrix @ U
    if g.y0 != 0:
        U = time_unitary(fock, g.y0).matrix @ U
    return FockOp(U, OpKind.UNITARY)


def conjugate(U: FockOp, A: FockOp) -> FockOp:
    """``U A U^dagger`` (all unitaries here are exact, so U^-1 = U^dagger)."""
    return FockOp(U.matrix @ A.matrix @ U.matrix.conj().T)


def adjoint_on_coordinate_ladder(fock: FockSpace, g: PoincareElement, site: int) -> FockOp:
    """``U(g) a~(x) U(g)^-1`` computed by conjugation."""
    U = unitary_of(fock, g)
    return conjugate(U, FockOp(coordinate_annihilator(fock, site), OpKind.LADDER))


def lattice_time_kernel(grid: Grid, y0: float) -> np.ndarray:
    """``G(s) = M^-1 sum_p exp(i p.s) exp(-i omega_p y0)`` on the site enumeration."""
    return lattice_kernel(grid, np.exp(-1j * grid.omega * y0))


def predicted_coordinate_ladder(fock: FockSpace, g: PoincareElement, site: int) -> FockOp:
    """What the transformation laws say ``U(g) a~(x) U(g)^-1`` should be.

    Rotation and shift move the site to ``R x + y``; a time shift then smears
    it with the lattice time kernel, ``sum_z G(R x + y - z) a~(z)``.
    """
    _check_supported(g, fock.grid)
    grid = fock.grid
    target = int(site_permutation(grid, g.R, g.shift)[site])
    if g.y0 == 0:
        return FockOp(coordinate_annihilator(fock, target), OpKind.LADDER)
    G = lattice_time_kernel(grid, g.y0)
    # kernel value for separation (target - z), looked up on the site enumeration
    sep = grid.wrap_site(grid.site_ints[target][None, :] - grid.site_ints) + grid.N // 2
    weights = G[np.ravel_multi_index(tuple(sep.T), grid.shape)]
    out = sp.csr_matrix((fock.dim, fock.dim), dtype=complex)
    for z in range(grid.mode_count):
        out = out + weights[z] * coordinate_annihilator(fock, z)
    return FockOp(out, OpKind.LADDER)


def time_kernel_from_conjugation(fock: FockSpace, y0: float, site: int) -> np.ndarray:
    """Read ``G(x - z)`` off the matrix elements ``<0| U a~(x) U^-1 a~^dagger(z) |0>``."""
    if fock.K < 1:
        raise ValueError("need at least the one-particle sector")
    conj = adjoint_on_coordinate_ladder(fock, PoincareElement(fock.grid.n, y0=y0), site)
    # the one-particle column of z is a~^dagger(z)|0>; its vacuum component under conj is G(x - z)
    one = fock.sector(1)
    row0 = conj.matrix.getrow(0).toarray().ravel()[one]  # <0| conj |p> for momentum modes p
    # convert to coordinate states a~^dagger(z)|0> = sum_p conj(c_p(z)) |p>
    grid = fock.grid
    phases = np.exp(-1j * grid.positions @ grid.momenta.T) / np.sqrt(grid.mode_count)  # [z, p]
    return phases @ row0


def phi1_field(fock: FockSpace, x0: float, site: int) -> FockOp:
    """``phi1(x0, x) = exp(i x0 P0) a~(x) exp(-i x0 P0)`` by conjugation."""
    a = coordinate_annihilator(fock, site)
    if x0 == 0:
        return FockOp(a, OpKind.LADDER)
    U = time_unitary(fock, x0).matrix
    return FockOp(U @ a @ U.conj().T, OpKind.LADDER)


def phi1_field_momentum(fock: FockSpace, x0: float, site: int) -> FockOp:
    """``M^-1/2 sum_p exp(i p.x) exp(-i omega_p x0) a(p)`` assembled directly."""
    grid = fock.grid
    src, modes, dst, amp = fock._annihilations
    c = np.exp(1j * (grid.momenta @ grid.positions[site]) - 1j * grid.omega * x0) / np.sqrt(grid.mode_count)
    return FockOp(sp.csr_matrix((amp * c[modes], (dst, src)), shape=(fock.dim, fock.dim)), OpKind.LADDER)


@dataclass
class CovarianceReport:
    element: str
    x0: float
    site: int
    target_site: int
    deviation: float
    tolerance: float = 1e-10
    passed: bool = field(init=False)

    def __post_init__(self):
        self.passed = self.deviation <= self.tolerance


def covariance_check(fock: FockSpace, g: PoincareElement, x0: float, site: int,
                     tolerance: float = 1e-10) -> CovarianceReport:
    """Compare ``U(g) phi1(x0, x) U(g)^-1`` with ``phi1(x0 + y0, R x + y)``.

    Deviation is the relative Frobenius norm of the difference.
    """
    U = unitary_of(fock, g)
    lhs = conjugate(U, phi1_field(fock, x0, site))
    target = int(site_permutation(fock.grid, g.R, g.shift)[site])
    rhs = phi1_field(fock, x0 + g.y0, target)
    dev = (lhs - rhs).norm() / max(rhs.norm(), 1e-300)
    return CovarianceReport(g.kind(), x0, site, target, float(dev), tolerance)


def unitarity_defect(U: FockOp) -> float:
    d = U.matrix.conj().T @ U.matrix - sp.identity(U.shape[0], format="csr")
    return float(sp.linalg.norm(d)) if d.nnz else 0.0
