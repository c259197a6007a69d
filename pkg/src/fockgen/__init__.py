"""Lattice Fock-space toolkit for the relativistic free scalar field.

Momentum and coordinate (Newton-Wigner-Pryce) ladders on a periodic lattice,
second quantisation of one-body operators, exact lattice translations and
rotations on a truncated Fock space, and the Bessel-function kernels these
operators approach in the continuum.
"""

from .grid import Basis, FieldVector, Grid, GridError, GridSpec, dft, dispersion, fourier_matrix, make_grid
from .specfun import (DomainError, Kernel, KernelKind, UnsupportedBranchError, bessel_k, gamma_fn, omega_kernel,
                      power_kernel, time_translation_kernel, velocity_kernel)
from .onebody import (BasisMismatchError, OneBodyOp, SIGN_LEDGER, boost_op, boost_op_spectral, change_basis,
                      commutator, coordinate_space_P0, gaussian_packet, identity_op, momentum_component_op,
                      position_op, random_gaussian_packets, rotation_gen_op, time_evolve_phase, velocity_op)
from .fock import (CapacityError, FockOp, FockSpace, NormalizationError, OpKind, build_fock, dgamma,
                   fock_dimension, ladder, number_op, one_particle_state)
from .symmetry import (PoincareElement, UnsupportedElementError, covariance_check, lattice_rotations, phi1_field,
                       unitary_of)
from .amplitudes import (Amplitude, AmplitudeRequest, ParticleNumberError, SectorMismatchWarning,
                         config_to_coordinate_kernel, coordinate_product_state, evolve_state, k_particle_amplitude,
                         nwp_eigenfunction, position_amplitude, position_amplitudes)
from .rng import SplitMix64

__version__ = "0.1.0"
