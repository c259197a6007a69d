"""Position amplitudes of a localised particle under free evolution, 1D.

A particle created at the origin spreads.  The total position probability
stays one, and the amplitude is small but nonzero outside the light cone.
Two-particle amplitudes are symmetric in their arguments.

    python3 demos/amplitudes.py
"""

import numpy as np

from fockgen.amplitudes import AmplitudeRequest, coordinate_product_state, evolve_state, k_particle_amplitude, \
    position_amplitudes
from fockgen.fock import build_fock
from fockgen.grid import GridSpec, make_grid

grid = make_grid(GridSpec(1, 64, 0.25, 1.0))
fock = build_fock(grid, 2)
x = grid.positions[:, 0]
start = coordinate_product_state(fock, [grid.origin()])

print(f"{'t':>4} {'total prob':>11} {'prob |x| > t':>13} {'max |amp| at |x| > 2t':>22}")
for t in (0.0, 0.5, 1.0, 2.0):
    amps = position_amplitudes(fock, evolve_state(fock, start, t))
    prob = np.abs(amps) ** 2
    outside = prob[np.abs(x) > t].sum()
    far = np.abs(amps[np.abs(x) > 2 * t]).max() if t else 0.0
    print(f"{t:4.1f} {prob.sum():11.8f} {outside:13.5f} {far:22.3e}")

a, b = grid.site_index([-3]), grid.site_index([5])
pair = evolve_state(fock, coordinate_product_state(fock, [a, b]), 0.4)
u = k_particle_amplitude(fock, AmplitudeRequest(pair, (a, b))).value
v = k_particle_amplitude(fock, AmplitudeRequest(pair, (b, a))).value
print(f"\ntwo particles after t = 0.4: amp(x1, x2) = {u:.6f}, amp(x2, x1) = {v:.6f}")
