"""Position-probability amplitudes built on the Newton-Wigner-Pryce localisation.

Amplitudes are computed with noncovariant ladders; the covariant forms are
recovered by the ``sqrt(2 omega)`` rescaling of the momentum components.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .fock import FockSpace, coordinate_annihilator
from .grid import Basis, FieldVector, Grid, lattice_kernel, transform_array
from .symmetry import phi1_field, time_unitary


class SectorMismatchWarning(UserWarning):
    """Amplitude requested for a particle number the state does not have."""


class ParticleNumberError(ValueError):
    pass


def nwp_eigenfunction(grid: Grid, site: int) -> FieldVector:
    """Momentum wave function ``M^-1/2 exp(-i p.x) sqrt(2 omega_p)`` of a state localised at ``x``."""
    x = grid.positions[site]
    vals = np.exp(-1j * (grid.momenta @ x)) * np.sqrt(2 * grid.omega) / np.sqrt(grid.mode_count)
    return FieldVector(Basis.MOMENTUM, vals)


def covariant_pairing(grid: Grid, psi: np.ndarray, phi: np.ndarray) -> complex:
    """``sum_p (2 omega_p)^-1 conj(psi(p)) phi(p)`` for covariant momentum components."""
    return complex(np.sum(np.conj(psi) * phi / (2 * grid.omega)))


def covariant_components(grid: Grid, noncovariant: np.ndarray) -> np.ndarray:
    return np.sqrt(2 * grid.omega) * np.asarray(noncovariant)


def _require_sector(fock: FockSpace, state: np.ndarray, k: int):
    got = fock.particle_number_of(state)
    if got != k:
        raise ParticleNumberError(f"expected a {k}-particle state, got particle number {got}")


def position_amplitude(fock: FockSpace, state: np.ndarray, site: int) -> complex:
    """``<0| a~(x) |state>`` for a one-particle state."""
    _require_sector(fock, state, 1)
    a = coordinate_annihilator(fock, site)
    return complex((a @ state)[0])


def position_amplitudes(fock: FockSpace, state: np.ndarray) -> np.ndarray:
    """All one-particle position amplitudes at once (an inverse lattice Fourier transform)."""
    _require_sector(fock, state, 1)
    return transform_array(state[fock.sector(1)], fock.grid, Basis.MOMENTUM, Basis.COORDINATE)


@dataclass(frozen=True)
class AmplitudeRequest:
    state: np.ndarray
    positions: tuple  # site indices
    t: float = 0.0


@dataclass(frozen=True)
class Amplitude:
    value: complex
    sector_mismatch: bool = False

    @property
    def modulus2(self) -> float:
        return abs(self.value) ** 2


def k_particle_amplitude(fock: FockSpace, req: AmplitudeRequest) -> Amplitude:
    """``(k!)^-1/2 <0| phi1(t, x_1) ... phi1(t, x_k) |state>``.

    A state outside the ``k``-particle sector gives zero, flagged and warned
    about rather than raised.
    """
    k = len(req.positions)
    if k > fock.K:
        raise ParticleNumberError(f"{k} positions requested but the Fock space stops at K = {fock.K}")
    state = np.asarray(req.state, dtype=complex)
    got = fock.particle_number_of(state)
    if got != k:
        warnings.warn(f"state has particle number {got}, amplitude asked for {k}", SectorMismatchWarning, stacklevel=2)
        # the product of k annihilators only sees the k-particle component
        vec = np.zeros_like(state)
        vec[fock.sector(k)] = state[fock.sector(k)]
        state = vec
        mismatch = True
    else:
        mismatch = False
    vec = state
    for site in reversed(req.positions):
        vec = phi1_field(fock, req.t, site).matrix @ vec
    return Amplitude(complex(vec[0]) / math.sqrt(math.factorial(k)), mismatch)


def evolve_state(fock: FockSpace, state: np.ndarray, t: float) -> np.ndarray:
    """Schroedinger evolution ``exp(-i t P0) |state>``."""
    return time_unitary(fock, -t).matrix @ np.asarray(state, dtype=complex)


def config_to_coordinate_kernel(grid: Grid, x0: float) -> np.ndarray:
    """``M^-1/2 sum_p (2 omega_p)^-1/2 exp(i(omega_p x0 + p.s))`` for every lattice separation ``s``.

    The coefficient of ``a~^dagger(y)`` in the configuration-space vector at
    ``(x0, x)`` is this kernel at ``s = x - y``.
    """
    symbol = np.exp(1j * grid.omega * x0) / np.sqrt(2 * grid.omega)
    return lattice_kernel(grid, symbol) * np.sqrt(grid.mode_count)


def coordinate_product_state(fock: FockSpace, sites) -> np.ndarray:
    """Normalised ``prod_i a~^dagger(x_i) |0>``."""
    vec = fock.vacuum()
    for s in sites:
        vec = coordinate_annihilator(fock, s).conj().T @ vec
    nrm = np.linalg.norm(vec)
    if nrm == 0:
        raise ValueError("product state vanishes (more particles than the cutoff allows)")
    return vec / nrm

