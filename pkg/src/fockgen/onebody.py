"""One-particle matrices of the Poincare generators on the lattice.

Every spatial component is stored contravariant (``x^j``, ``p^j``) with
``j = 1..n``.  Statements written with lowered indices translate through
:data:`SIGN_LEDGER`: with the metric ``diag(+1, -1, ..., -1)`` a lowered
spatial component is the negative of the stored one.

In the momentum basis the position operator is the spectral derivative
``X^j = i d/dp^j``, realised exactly as the Fourier conjugate of
``diag(x^j)``; the momentum is ``P^j = diag(p^j)``, the energy
``P^0 = diag(omega_p)``.  With these conventions ``[X^j, P^k] = i delta_jk``
and ``[P^0, X^j] = -i V^j``, holding on states whose momentum support stays
away from the zone edge and whose coordinate support stays inside the box.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Basis, Grid, lattice_kernel, transform_array


class BasisMismatchError(ValueError):
    """Arithmetic between operators stored in different bases."""


@dataclass(frozen=True)
class SignLedger:
    metric: tuple
    component_convention: str = "contravariant"

    @staticmethod
    def lower(v):
        """Spatial component with a lowered index: ``v_j = -v^j``."""
        return -v

    @staticmethod
    def raise_(v):
        return -v


SIGN_LEDGER = SignLedger(metric=(1, -1, -1, -1))


@dataclass(frozen=True, eq=False)
class OneBodyOp:
    basis: Basis
    matrix: np.ndarray
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "basis", Basis(self.basis))
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"one-body operator must be square, got shape {mat.shape}")
        object.__setattr__(self, "matrix", mat)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def _check(self, other: "OneBodyOp"):
        if not isinstance(other, OneBodyOp):
            raise TypeError(f"expected OneBodyOp, got {type(other).__name__}")
        if other.basis is not self.basis:
            raise BasisMismatchError(f"cannot combine {self.basis.value} and {other.basis.value} operators")

    def __add__(self, other):
        self._check(other)
        return OneBodyOp(self.basis, self.matrix + other.matrix, f"({self.label}+{other.label})")

    def __sub__(self, other):
        self._check(other)
        return OneBodyOp(self.basis, self.matrix - other.matrix, f"({self.label}-{other.label})")

    def __matmul__(self, other):
        if isinstance(other, np.ndarray):
            return self.matrix @ other
        self._check(other)
        return OneBodyOp(self.basis, self.matrix @ other.matrix, f"{self.label}{other.label}")

    def __mul__(self, c):
        return OneBodyOp(self.basis, c * self.matrix, self.label)

    __rmul__ = __mul__

    def __neg__(self):
        return OneBodyOp(self.basis, -self.matrix, f"-{self.label}")

    def dag(self) -> "OneBodyOp":
        return OneBodyOp(self.basis, self.matrix.conj().T, f"{self.label}^+")

    def hermiticity_defect(self) -> float:
        scale = np.linalg.norm(self.matrix)
        if scale == 0:
            return 0.0
        return float(np.linalg.norm(self.matrix - self.matrix.conj().T) / scale)

    def apply(self, vec: np.ndarray) -> np.ndarray:
        return self.matrix @ vec


def _diag(grid: Grid, basis: Basis, values, label: str) -> OneBodyOp:
    return OneBodyOp(basis, np.diag(np.asarray(values, dtype=complex)), label)


def _axis(grid: Grid, j: int) -> int:
    if not 1 <= j <= grid.n:
        raise IndexError(f"spatial index must be in 1..{grid.n}, got {j}")
    return j - 1


def position_op(grid: Grid, j: int) -> OneBodyOp:
    """Newton-Wigner-Pryce position ``X^j``: diagonal in the coordinate basis."""
    ax = _axis(grid, j)
    return _diag(grid, Basis.COORDINATE, grid.positions[:, ax], f"X{j}")


def momentum_component_op(grid: Grid, mu: int) -> OneBodyOp:
    """``P^0 = diag(omega)`` for ``mu = 0``, ``P^j = diag(p^j)`` otherwise."""
    if mu == 0:
        return _diag(grid, Basis.MOMENTUM, grid.omega, "P0")
    if not 1 <= mu <= grid.n:
        raise IndexError(f"component index must be in 0..{grid.n}, got {mu}")
    return _diag(grid, Basis.MOMENTUM, grid.momenta[:, mu - 1], f"P{mu}")


def velocity_op(grid: Grid, j: int) -> OneBodyOp:
    ax = _axis(grid, j)
    return _diag(grid, Basis.MOMENTUM, grid.momenta[:, ax] / grid.omega, f"V{j}")


def identity_op(grid: Grid, basis: Basis = Basis.MOMENTUM) -> OneBodyOp:
    return OneBodyOp(basis, np.eye(grid.mode_count, dtype=complex), "I")


def change_basis(op: OneBodyOp, target: Basis, grid: Grid) -> OneBodyOp:
    """Unitary conjugation ``F A F^dagger`` (coordinate to momentum) or its inverse."""
    target = Basis(target)
    if op.matrix.shape[0] != grid.mode_count:
        raise ValueError(f"operator size {op.matrix.shape[0]} does not match {grid.mode_count} modes")
    if target is op.basis:
        return OneBodyOp(op.basis, op.matrix.copy(), op.label)
    # F A F^dagger = F (F A^dagger)^dagger
    left = transform_array(op.matrix, grid, op.basis, target)
    both = transform_array(left.conj().T, grid, op.basis, target).conj().T
    return OneBodyOp(target, both, op.label)


def commutator(A: OneBodyOp, B: OneBodyOp) -> OneBodyOp:
    A._check(B)
    return OneBodyOp(A.basis, A.matrix @ B.matrix - B.matrix @ A.matrix, f"[{A.label},{B.label}]")


def circulant_from_kernel(grid: Grid, kernel: np.ndarray) -> np.ndarray:
    """Matrix ``C[x, y] = kernel(x - y)`` from kernel values on the site enumeration."""
    sep = grid.site_ints[:, None, :] - grid.site_ints[None, :, :]
    sep = grid.wrap_site(sep) + grid.N // 2
    flat = np.ravel_multi_index(tuple(np.moveaxis(sep, -1, 0)), grid.shape)
    return np.asarray(kernel)[flat]


def energy_kernel(grid: Grid) -> np.ndarray:
    """Lattice kernel ``W(s) = M^-1 sum_p omega_p exp(i p.s)``, real by symmetry of omega."""
    return lattice_kernel(grid, grid.omega).real


def coordinate_space_P0(grid: Grid) -> OneBodyOp:
    """Energy operator in the coordinate basis as the circulant ``W(x - y)``."""
    return OneBodyOp(Basis.COORDINATE, circulant_from_kernel(grid, energy_kernel(grid)), "P0")


def position_in_momentum(grid: Grid, j: int) -> np.ndarray:
    return change_basis(position_op(grid, j), Basis.MOMENTUM, grid).matrix


def boost_op(grid: Grid, j: int) -> OneBodyOp:
    """Boost generator ``(X_j P^0 + P^0 X_j) / 2`` with the lowered position ``X_j = -X^j``.

    Momentum basis.  In the continuum this equals
    ``i (p_j / (2 omega) - omega d/dp^j)``, see :func:`boost_op_spectral`.
    """
    X = position_in_momentum(grid, j)
    w = grid.omega
    B = -0.5 * (X * w[None, :] + w[:, None] * X)
    return OneBodyOp(Basis.MOMENTUM, B, f"B{j}")


def boost_op_spectral(grid: Grid, j: int) -> OneBodyOp:
    """Boost from its differential form ``i (p_j/(2 omega) - omega d/dp^j)``.

    ``p_j = -p^j`` and ``d/dp^j = -i X^j`` with the spectral ``X^j``; the result
    is ``-i p^j/(2 omega) - omega X^j``, Hermitian only up to lattice error.
    """
    ax = _axis(grid, j)
    X = position_in_momentum(grid, j)
    w = grid.omega
    B = -w[:, None] * X + np.diag(-0.5j * grid.momenta[:, ax] / w)
    return OneBodyOp(Basis.MOMENTUM, B, f"B{j}'")


def boost_coordinate_kernel(grid: Grid, j: int) -> OneBodyOp:
    """Coordinate matrix ``(1/2) (x + y)_j W(x - y)`` of the boost, lowered ``x_j = -x^j``."""
    ax = _axis(grid, j)
    W = circulant_from_kernel(grid, energy_kernel(grid))
    x = grid.positions[:, ax]
    return OneBodyOp(Basis.COORDINATE, -0.5 * (x[:, None] + x[None, :]) * W, f"B{j}")


def rotation_gen_op(grid: Grid, i: int, k: int) -> OneBodyOp:
    """Rotation generator ``X^i P^k - X^k P^i`` in the momentum basis."""
    if grid.n == 1:
        raise ValueError("rotations need at least two spatial dimensions")
    if i == k:
        raise ValueError("rotation generator needs two distinct axes")
    ai, ak = _axis(grid, i), _axis(grid, k)
    Xi = position_in_momentum(grid, i)
    Xk = position_in_momentum(grid, k)
    pi_, pk = grid.momenta[:, ai], grid.momenta[:, ak]
    L = Xi * pk[None, :] - Xk * pi_[None, :]
    return OneBodyOp(Basis.MOMENTUM, L, f"L{i}{k}")


def time_evolve_phase(grid: Grid, t: float) -> OneBodyOp:
    """``diag(exp(-i omega t))`` in the momentum basis."""
    return _diag(grid, Basis.MOMENTUM, np.exp(-1j * grid.omega * t), f"U({t})")


# Matrix-free versions for grids too large for dense M x M matrices.
# All act on momentum-basis vectors.

def apply_position(grid: Grid, j: int, psi: np.ndarray) -> np.ndarray:
    ax = _axis(grid, j)
    c = transform_array(psi, grid, Basis.MOMENTUM, Basis.COORDINATE)
    return transform_array(grid.positions[:, ax] * c, grid, Basis.COORDINATE, Basis.MOMENTUM)


def apply_boost(grid: Grid, j: int, psi: np.ndarray) -> np.ndarray:
    w = grid.omega
    return -0.5 * (apply_position(grid, j, w * psi) + w * apply_position(grid, j, psi))


def apply_boost_spectral(grid: Grid, j: int, psi: np.ndarray) -> np.ndarray:
    ax = _axis(grid, j)
    w = grid.omega
    return -w * apply_position(grid, j, psi) - 0.5j * grid.momenta[:, ax] / w * psi


def apply_rotation(grid: Grid, i: int, k: int, psi: np.ndarray) -> np.ndarray:
    ai, ak = _axis(grid, i), _axis(grid, k)
    p = grid.momenta
    return apply_position(grid, i, p[:, ak] * psi) - apply_position(grid, k, p[:, ai] * psi)


def gaussian_packet(grid: Grid, sigma_p: float, p0=None, x0=None) -> np.ndarray:
    """Normalised momentum-basis Gaussian, probability width ``sigma_p`` per axis.

    ``psi(p) ~ exp(-(p - p0)^2 / (4 sigma_p^2) - i p.x0)``, centred at ``x0``
    in the coordinate basis.
    """
    p = grid.momenta
    p0 = np.zeros(grid.n) if p0 is None else np.asarray(p0, dtype=float)
    x0 = np.zeros(grid.n) if x0 is None else np.asarray(x0, dtype=float)
    psi = np.exp(-np.sum((p - p0) ** 2, axis=1) / (4 * sigma_p**2) - 1j * (p @ x0))
    return psi / np.linalg.norm(psi)


def random_gaussian_packets(grid: Grid, count: int, rng, sigma_p: float | None = None) -> list:
    """Band-limited Gaussians with random centres.

    Width ``sigma_p = pi / (8 a)`` unless given; momentum centres within an
    eighth of the zone, coordinate centres within an eighth of the box, and a
    random global phase.
    """
    if sigma_p is None:
        sigma_p = np.pi / (8 * grid.a)
    zone = np.pi / grid.a
    out = []
    for _ in range(count):
        u = rng.uniform(2 * grid.n + 1)
        p0 = (u[: grid.n] - 0.5) * zone / 4
        x0 = (u[grid.n: 2 * grid.n] - 0.5) * grid.spec.box / 4
        out.append(np.exp(2j * np.pi * u[-1]) * gaussian_packet(grid, sigma_p, p0, x0))
    return out
