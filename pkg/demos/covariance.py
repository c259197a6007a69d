"""Lattice-exact Poincare covariance of the coordinate ladders, 2D.

Time translations, site shifts and 90 degree rotations are represented by
unitaries on the truncated Fock space.  Conjugating a~(x) by each one lands on
the field at the transformed point, to rounding.

    python3 demos/covariance.py
"""

from fockgen.fock import build_fock
from fockgen.grid import GridSpec, make_grid
from fockgen.symmetry import (PoincareElement, UnsupportedElementError, covariance_check, lattice_rotations,
                              time_unitary, unitarity_defect, unitary_of)

fock = build_fock(make_grid(GridSpec(2, 6, 0.5, 1.0)), 2)
print(f"Fock space: M = {fock.M} modes, K = {fock.K}, dimension {fock.dim}")
print(f"unitarity defect of U_time(0.7): {unitarity_defect(time_unitary(fock, 0.7)):.2e}")

quarter = lattice_rotations(2)[1]
for g in (PoincareElement(2, y0=0.7), PoincareElement(2, shift=[2, -1]), PoincareElement(2, R=quarter),
          PoincareElement(2, y0=-0.3, shift=[1, 1], R=quarter)):
    rep = covariance_check(fock, g, 0.25, 7)
    print(f"{rep.element:22s} site 7 -> {rep.target_site:3d}  deviation {rep.deviation:.2e}")

try:
    unitary_of(fock, PoincareElement(2, rapidity=(0.1, 0.0)))
except UnsupportedElementError as exc:
    print(f"boost: {exc}")
