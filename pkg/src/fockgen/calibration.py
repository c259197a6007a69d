"""Residuals of the lattice-approximate identities, and their frozen baselines.

Identities such as ``[X, P] = i`` cannot hold exactly in finite dimensions,
so they are measured on band-limited Gaussian packets (see
:func:`fockgen.onebody.random_gaussian_packets`) and compared against
baselines recorded once by :func:`calibrate` and shipped in
``data/calibration.json``.  Regenerate with::

    python -m fockgen.calibration --write
"""

from __future__ import annotations

import argparse
import json
from importlib import resources
from pathlib import Path

import numpy as np

from .grid import Grid, GridSpec, make_grid
from .onebody import (apply_boost, apply_boost_spectral, apply_position, apply_rotation, energy_kernel,
                      random_gaussian_packets)
from .rng import SplitMix64
from .specfun import omega_kernel, time_translation_kernel
from .symmetry import lattice_time_kernel

FIXTURE_FILE = "calibration.json"
SLACK = 1.5
PACKETS = 20
BOOST_TIME = 0.5

# grids the baselines are recorded on
REFERENCE_GRIDS = [
    GridSpec(1, 64, 0.25, 1.0),
    GridSpec(1, 128, 0.125, 1.0),
    GridSpec(3, 16, 0.5, 1.0),
    GridSpec(3, 32, 0.25, 1.0),
]
KERNEL_RADII_1D = (1.0, 2.0, 3.0, 4.0)
KERNEL_GRIDS_1D = [GridSpec(1, N, 16.0 / N, 1.0) for N in (64, 128, 256)]
TIME_KERNEL_RADII = (1.0, 1.5, 2.0)
TIME_KERNEL_Y0 = 0.5
TIME_KERNEL_GRIDS = [GridSpec(3, 32, 0.25, 1.0), GridSpec(3, 64, 0.125, 1.0)]


def grid_key(spec: GridSpec) -> str:
    return f"n={spec.n},N={spec.N},a={spec.a!r},m={spec.m!r}"


def _max_residual(states, op) -> float:
    return max(float(np.linalg.norm(op(psi))) for psi in states)


def onebody_residuals(grid: Grid, seed: int = 7, count: int = PACKETS) -> dict:
    """Largest residual over ``count`` seeded packets for each approximate identity.

    Every operator acts matrix-free through FFTs, so n = 3 grids of 32^3 modes
    are fine.  Keys are check names; values are absolute residual norms on
    normalised states, maximised over components.
    """
    states = random_gaussian_packets(grid, count, SplitMix64(seed))
    w = grid.omega
    p = grid.momenta
    out = {}
    comps = range(1, grid.n + 1)

    def heis(j):
        return lambda s: w * apply_position(grid, j, s) - apply_position(grid, j, w * s) + 1j * p[:, j - 1] / w * s

    def weyl(j):
        return lambda s: apply_position(grid, j, p[:, j - 1] * s) - p[:, j - 1] * apply_position(grid, j, s) - 1j * s

    def boost_cons(j):
        return lambda s: apply_boost(grid, j, s) - apply_boost_spectral(grid, j, s)

    def boost_energy(j):
        # [B^j, omega] = -i p^j
        return lambda s: apply_boost(grid, j, w * s) - w * apply_boost(grid, j, s) + 1j * p[:, j - 1] * s

    def boost_momentum(j):
        # [B^j, P^k] = -i delta_jk omega
        return lambda s: apply_boost(grid, j, p[:, j - 1] * s) - p[:, j - 1] * apply_boost(grid, j, s) + 1j * w * s

    def boost_time(j, t=BOOST_TIME):
        # exp(i omega t) B exp(-i omega t) = B - t p^j
        ph = np.exp(-1j * w * t)
        return lambda s: ph.conj() * apply_boost(grid, j, ph * s) - apply_boost(grid, j, s) + t * p[:, j - 1] * s

    def double_comm(j):
        def op(s):
            def c(v):
                return w * apply_boost(grid, j, v) - apply_boost(grid, j, w * v)
            return w * c(s) - c(w * s)
        return op

    def noncov(j, k):
        # [B^j, X^k] = (i/2)(X^j V^k + V^k X^j)
        v = p[:, k - 1] / w

        def op(s):
            comm = apply_boost(grid, j, apply_position(grid, k, s)) - apply_position(grid, k, apply_boost(grid, j, s))
            sym = apply_position(grid, j, v * s) + v * apply_position(grid, j, s)
            return comm - 0.5j * sym
        return op

    out["heisenberg_equation"] = max(_max_residual(states, heis(j)) for j in comps)
    out["heisenberg_weyl"] = max(_max_residual(states, weyl(j)) for j in comps)
    out["boost_consistency"] = max(_max_residual(states, boost_cons(j)) for j in comps)
    out["boost_energy_commutator"] = max(_max_residual(states, boost_energy(j)) for j in comps)
    out["boost_momentum_commutator"] = max(_max_residual(states, boost_momentum(j)) for j in comps)
    out["boost_time_translation"] = max(_max_residual(states, boost_time(j)) for j in comps)
    out["boost_double_commutator"] = max(_max_residual(states, double_comm(j)) for j in comps)
    out["noncovariance_commutator"] = max(_max_residual(states, noncov(j, k)) for j in comps for k in comps)
    if grid.n >= 2:
        def rot_energy(i, k):
            return lambda s: apply_rotation(grid, i, k, w * s) - w * apply_rotation(grid, i, k, s)
        out["rotation_energy_commutator"] = max(
            _max_residual(states, rot_energy(i, k)) for i in comps for k in comps if i < k)
    return out


def _kernel_at(grid: Grid, values: np.ndarray, r: float) -> complex:
    steps = r / grid.a
    if abs(steps - round(steps)) > 1e-9:
        raise ValueError(f"radius {r} is not a lattice distance for spacing {grid.a}")
    j = np.zeros(grid.n, dtype=int)
    j[0] = int(round(steps))
    return values[grid.site_index(j)]


def omega_kernel_errors(spec: GridSpec, radii=KERNEL_RADII_1D) -> list:
    """Relative error of the lattice energy kernel ``W(r) / a^n`` against the Bessel formula."""
    grid = make_grid(spec)
    W = energy_kernel(grid) / grid.a**grid.n
    out = []
    for r in radii:
        exact = omega_kernel(grid.m, grid.n, r)
        out.append(abs(_kernel_at(grid, W, r) - exact) / abs(exact))
    return out


def time_kernel_errors(spec: GridSpec, y0: float = TIME_KERNEL_Y0, radii=TIME_KERNEL_RADII) -> list:
    """Relative error of the exact lattice phase kernel ``G(r) / a^3`` against the K_2 formula."""
    grid = make_grid(spec)
    G = lattice_time_kernel(grid, y0) / grid.a**3
    out = []
    for r in radii:
        exact = time_translation_kernel(grid.m, y0, r)
        out.append(abs(_kernel_at(grid, G, r) - exact) / abs(exact))
    return out


def calibrate(seed: int = 7) -> dict:
    data = {"schema": 1, "seed": seed, "packets": PACKETS, "slack": SLACK, "onebody": {}, "kernels": {}}
    for spec in REFERENCE_GRIDS:
        data["onebody"][grid_key(spec)] = onebody_residuals(make_grid(spec), seed)
    data["kernels"]["omega_1d"] = {
        grid_key(s): dict(zip(map(repr, KERNEL_RADII_1D), omega_kernel_errors(s))) for s in KERNEL_GRIDS_1D
    }
    data["kernels"]["time_3d"] = {
        grid_key(s): dict(zip(map(repr, TIME_KERNEL_RADII), time_kernel_errors(s))) for s in TIME_KERNEL_GRIDS
    }
    return data


def load_fixtures() -> dict:
    text = resources.files("fockgen").joinpath("data", FIXTURE_FILE).read_text()
    return json.loads(text)


def onebody_baseline(spec: GridSpec, fixtures: dict | None = None) -> dict | None:
    fixtures = load_fixtures() if fixtures is None else fixtures
    return fixtures["onebody"].get(grid_key(spec))


def main(argv=None):
    ap = argparse.ArgumentParser(description="Record lattice residual baselines.")
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--write", action="store_true", help="overwrite the packaged fixture file")
    args = ap.parse_args(argv)
    data = calibrate(args.seed)
    text = json.dumps(data, indent=2, sort_keys=True) + "\n"
    if args.write:
        path = Path(__file__).parent / "data" / FIXTURE_FILE
        path.write_text(text)
        print(f"wrote {path}")
    else:
        print(text)


if __name__ == "__main__":
    main()
