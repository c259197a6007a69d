"""Lattice energy kernel against the Bessel formula, 1D.

The lattice kernel is the inverse FFT of omega(p) = sqrt(p^2 + m^2).  Far from
the origin it tracks -(m / (pi r)) K_1(m r) plus an alternating tail from the
kink of |p| at the zone edge.  Averaging neighbouring sites cancels that tail
and exposes the continuum part.

    python3 demos/kernels.py
"""

import numpy as np

from fockgen.grid import GridSpec, make_grid
from fockgen.onebody import energy_kernel
from fockgen.specfun import omega_kernel

m = 1.0
print(f"{'N':>5} {'r':>5} {'lattice':>12} {'neighbour avg':>14} {'continuum':>12}")
for N in (64, 128, 256):
    grid = make_grid(GridSpec(1, N, 16.0 / N, m))
    W = energy_kernel(grid).real / grid.a
    for r in (1.0, 2.0):
        j = int(round(r / grid.a))
        at = lambda k: W[grid.site_index([k])]
        avg = 0.5 * at(j) + 0.25 * (at(j - 1) + at(j + 1))
        print(f"{N:5d} {r:5.1f} {at(j):12.5f} {avg:14.5f} {omega_kernel(m, 1, r):12.5f}")

v_edge = (np.pi / grid.a) / np.hypot(np.pi / grid.a, m)
print(f"\nzone-edge tail amplitude v_edge / pi = {v_edge / np.pi:.4f} / r^2, independent of a")
