"""Named verification checks run by ``fockgen verify``.

Each check measures one identity on the configured grid and returns the
largest error it saw.  Exact-tier checks hold to rounding and use a fixed
tolerance; lattice-tier checks hold only on band-limited states and are
bounded by the packaged baselines times :data:`fockgen.calibration.SLACK`.
Reports are produced in declaration order.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np
import scipy.sparse as sp

from . import calibration
from .amplitudes import AmplitudeRequest, coordinate_product_state, evolve_state, k_particle_amplitude
from .fock import (FockSpace, build_fock, coordinate_annihilator, coordinate_annihilator_by_sum, dgamma,
                   dgamma_coordinate, momentum_annihilator, number_op, one_particle_state)
from .grid import Basis, Grid, GridSpec, fourier_matrix, make_grid, transform_array
from .onebody import (OneBodyOp, boost_coordinate_kernel, boost_op, change_basis, commutator,
                      coordinate_space_P0, identity_op, momentum_component_op, position_op, rotation_gen_op)
from .rng import SplitMix64, random_hermitian, random_vector
from .symmetry import (PoincareElement, covariance_check, lattice_rotations, lattice_time_kernel,
                       phi1_field, phi1_field_momentum, rotation_unitary, shift_unitary, site_permutation,
                       time_kernel_from_conjugation, time_unitary, unitarity_defect, unitary_of,
                       adjoint_on_coordinate_ladder)

EXACT_TOL = 1e-10
TIGHT_TOL = 1e-12
DENSE_LIMIT = 4096  # largest M for which dense M x M one-body matrices are formed
PROBE_DIM = 400  # above this Fock dimension, operator identities are tested on probe vectors
PAIR_SAMPLE = 64


class Skip(Exception):
    """Raised by a check that does not apply to the configuration."""


@dataclass
class Context:
    spec: GridSpec
    K: int
    seed: int
    budget: int | None = None

    @cached_property
    def grid(self) -> Grid:
        return make_grid(self.spec)

    @cached_property
    def fock(self) -> FockSpace:
        return build_fock(self.grid, self.K, self.budget)

    @cached_property
    def onebody_residuals(self) -> dict:
        return calibration.onebody_residuals(self.grid, self.seed)

    def rng(self, stream: int) -> SplitMix64:
        # independent, reproducible stream per check
        return SplitMix64(self.seed * 1000003 + stream)

    def need_dense(self):
        if self.grid.mode_count > DENSE_LIMIT:
            raise Skip(f"needs dense matrices, M > {DENSE_LIMIT}")

    def need_sectors(self, k: int):
        if self.K < k:
            raise Skip("insufficient sectors")

    def need_dims(self, n: int):
        if self.grid.n < n:
            raise Skip(f"needs n >= {n}")


@dataclass(frozen=True)
class Check:
    name: str
    identity: str
    tier: str  # "exact" or "lattice"
    run: Callable[[Context], float]
    tolerance: float = EXACT_TOL
    dims: tuple = (1, 2, 3)  # spatial dimensions the check applies to


@dataclass
class CheckReport:
    name: str
    identity: str
    tier: str
    status: str  # "pass", "fail" or "skipped"
    error: float | None
    tolerance: float | None
    reason: str = ""
    wall_time: float = field(default=0.0, compare=False)

    @property
    def passed(self) -> bool:
        return self.status != "fail"

    def to_dict(self) -> dict:
        # wall time is kept out so reports stay byte-identical between runs
        d = {"name": self.name, "identity": self.identity, "tier": self.tier, "status": self.status,
             "error": self.error, "tolerance": self.tolerance, "pass": self.status == "pass"}
        if self.reason:
            d["reason"] = self.reason
        return d


def _rel(diff: float, ref: float) -> float:
    return diff / max(1.0, ref)


def _pairs(ctx: Context, stream: int):
    """All mode pairs for small grids, otherwise a seeded sample of diagonal and general pairs."""
    M = ctx.grid.mode_count
    if M <= 16:
        return [(i, j) for i in range(M) for j in range(M)]
    rng = ctx.rng(stream)
    diag = (rng.uniform(PAIR_SAMPLE) * M).astype(int)
    idx = (rng.uniform(2 * PAIR_SAMPLE) * M).astype(int).reshape(-1, 2)
    return [(int(i), int(i)) for i in diag] + [tuple(map(int, r)) for r in idx]


# ---- exact tier ------------------------------------------------------------

def check_dft_unitarity(ctx: Context) -> float:
    grid = ctx.grid
    rng = ctx.rng(1)
    err = 0.0
    for _ in range(100):
        v = random_vector(rng, grid.mode_count)
        w = transform_array(v, grid, Basis.COORDINATE, Basis.MOMENTUM)
        back = transform_array(w, grid, Basis.MOMENTUM, Basis.COORDINATE)
        nv = np.linalg.norm(v)
        err = max(err, abs(np.linalg.norm(w) - nv) / nv, np.linalg.norm(back - v) / nv)
    return err


def check_dft_shift(ctx: Context) -> float:
    """Shifting a vector by one site along axis 1 multiplies its transform by ``exp(-i p^1 a)``."""
    grid = ctx.grid
    v = random_vector(ctx.rng(2), grid.mode_count)
    step = np.zeros(grid.n, dtype=int)
    step[0] = 1
    # shifted[x] = v[x - a e1]
    src = np.array([grid.site_index(grid.wrap_site(j - step)) for j in grid.site_ints])
    lhs = transform_array(v[src], grid, Basis.COORDINATE, Basis.MOMENTUM)
    rhs = np.exp(-1j * grid.momenta[:, 0] * grid.a) * transform_array(v, grid, Basis.COORDINATE, Basis.MOMENTUM)
    return float(np.linalg.norm(lhs - rhs) / np.linalg.norm(v))


def check_fourier_matrix(ctx: Context) -> float:
    ctx.need_dense()
    grid = ctx.grid
    F = fourier_matrix(grid)
    eye = np.eye(grid.mode_count)
    return float(max(np.abs(F @ F.conj().T - eye).max(),
                     np.abs(F - transform_array(eye, grid, Basis.COORDINATE, Basis.MOMENTUM)).max()))


def _probes(ctx: Context, dim: int, stream: int, count: int = 4) -> list:
    rng = ctx.rng(stream)
    return [random_vector(rng, dim) for _ in range(count)]


def check_dgamma_homomorphism(ctx: Context) -> float:
    """Relative Frobenius error, or the error on seeded probe vectors once products get large."""
    ctx.need_dense()
    fock = ctx.fock
    rng = ctx.rng(3)
    probes = _probes(ctx, fock.dim, 13) if fock.dim > PROBE_DIM else None
    err = 0.0
    for _ in range(25):
        A = random_hermitian(rng, fock.M)
        B = random_hermitian(rng, fock.M)
        dA, dB = dgamma(fock, A).matrix, dgamma(fock, B).matrix
        dC = dgamma(fock, A @ B - B @ A).matrix
        if probes is None:
            diff = dA @ dB - dB @ dA - dC
            err = max(err, _rel(sp.linalg.norm(diff) if diff.nnz else 0.0, sp.linalg.norm(dC) if dC.nnz else 0.0))
        else:
            for v in probes:
                ref = dC @ v
                err = max(err, _rel(np.linalg.norm(dA @ (dB @ v) - dB @ (dA @ v) - ref), np.linalg.norm(ref)))
    return err


def check_one_particle_block(ctx: Context) -> float:
    ctx.need_dense()
    ctx.need_sectors(1)
    fock = ctx.fock
    A = random_hermitian(ctx.rng(4), fock.M)
    one = fock.sector(1)
    block = dgamma(fock, A).matrix[one, one].toarray()
    return float(np.abs(block - A).max())


def check_number_operator(ctx: Context) -> float:
    ctx.need_dense()
    fock = ctx.fock
    return (dgamma(fock, identity_op(ctx.grid)) - number_op(fock)).norm()


def _restrict_below(fock: FockSpace, mat: sp.csr_matrix) -> sp.csr_matrix:
    keep = np.nonzero(fock.particle_numbers < fock.K)[0]
    return mat[keep][:, keep]


def _ccr_error(fock: FockSpace, annihilator, pairs) -> float:
    ops = {}

    def get(i):
        if i not in ops:
            ops[i] = annihilator(fock, i)
        return ops[i]

    keep = np.nonzero(fock.particle_numbers < fock.K)[0]
    eye = sp.identity(len(keep), format="csr")
    err = 0.0
    for i, j in pairs:
        ai, aj_dag = get(i), get(j).conj().T
        c = _restrict_below(fock, ai @ aj_dag - aj_dag @ ai)
        if i == j:
            c = c - eye
        if c.nnz:
            err = max(err, float(np.abs(c.data).max()))
    return err


def check_ccr_momentum(ctx: Context) -> float:
    ctx.need_sectors(1)
    return _ccr_error(ctx.fock, momentum_annihilator, _pairs(ctx, 5))


def check_ccr_coordinate(ctx: Context) -> float:
    ctx.need_sectors(1)
    return _ccr_error(ctx.fock, coordinate_annihilator, _pairs(ctx, 6))


def check_coordinate_ladder_paths(ctx: Context) -> float:
    ctx.need_sectors(1)
    fock = ctx.fock
    sites = range(fock.M) if fock.M <= 16 else (0, fock.grid.origin(), fock.M - 1)
    err = 0.0
    for x in sites:
        d = coordinate_annihilator(fock, x) - coordinate_annihilator_by_sum(fock, x)
        if d.nnz:
            err = max(err, float(np.abs(d.data).max()))
    return err


def check_nwp_lift(ctx: Context) -> float:
    """``dGamma(X^j)`` equals ``sum_x x^j a~^dagger(x) a~(x)``."""
    ctx.need_dense()
    fock, grid = ctx.fock, ctx.grid
    err = 0.0
    if grid.mode_count <= 64:
        for j in range(1, grid.n + 1):
            X = position_op(grid, j)
            a = dgamma(fock, X)
            err = max(err, _rel((a - dgamma_coordinate(fock, X)).norm(), a.norm()))
        return err
    ann = [coordinate_annihilator(fock, x) for x in range(grid.mode_count)]
    for v in _probes(ctx, fock.dim, 14, 2):
        for j in range(1, grid.n + 1):
            ref = dgamma(fock, position_op(grid, j)).matrix @ v
            x = grid.positions[:, j - 1]
            got = sum(x[s] * (ann[s].conj().T @ (ann[s] @ v)) for s in range(grid.mode_count))
            err = max(err, _rel(np.linalg.norm(got - ref), np.linalg.norm(ref)))
    return err


def check_energy_circulant(ctx: Context) -> float:
    ctx.need_dense()
    grid = ctx.grid
    direct = coordinate_space_P0(grid).matrix
    conj = change_basis(momentum_component_op(grid, 0), Basis.COORDINATE, grid).matrix
    return float(np.abs(direct - conj).max())


def check_boost_kernel(ctx: Context) -> float:
    ctx.need_dense()
    grid = ctx.grid
    err = 0.0
    for j in range(1, grid.n + 1):
        coord = change_basis(boost_op(grid, j), Basis.COORDINATE, grid).matrix
        err = max(err, float(np.abs(coord - boost_coordinate_kernel(grid, j).matrix).max()))
    return err


def check_generator_hermiticity(ctx: Context) -> float:
    ctx.need_dense()
    grid = ctx.grid
    ops = [boost_op(grid, j) for j in range(1, grid.n + 1)]
    ops += [rotation_gen_op(grid, i, k) for i in range(1, grid.n + 1) for k in range(i + 1, grid.n + 1)]
    return max(op.hermiticity_defect() for op in ops)


def check_xp_offdiagonal(ctx: Context) -> float:
    ctx.need_dims(2)
    ctx.need_dense()
    grid = ctx.grid
    X = [change_basis(position_op(grid, j), Basis.MOMENTUM, grid) for j in range(1, grid.n + 1)]
    P = [momentum_component_op(grid, k) for k in range(1, grid.n + 1)]
    return max(float(np.abs(commutator(X[j], P[k]).matrix).max())
               for j in range(grid.n) for k in range(grid.n) if j != k)


def check_unitaries(ctx: Context) -> float:
    fock = ctx.fock
    n = ctx.grid.n
    shift = np.arange(1, n + 1)
    us = [time_unitary(fock, 0.7), shift_unitary(fock, shift)] + [rotation_unitary(fock, R) for R in lattice_rotations(n)]
    err = max(unitarity_defect(U) for U in us)
    group = time_unitary(fock, 0.3) @ time_unitary(fock, 0.4) - time_unitary(fock, 0.7)
    return max(err, group.norm())


def _sample_sites(ctx: Context) -> list:
    grid = ctx.grid
    j = np.zeros(grid.n, dtype=int)
    j[0] = 1
    return sorted({grid.origin(), 0, grid.site_index(j), grid.mode_count - 1})


def check_shift_lemma(ctx: Context) -> float:
    ctx.need_sectors(1)
    fock, grid = ctx.fock, ctx.grid
    err = 0.0
    for shift in (np.eye(grid.n, dtype=int)[0], -np.arange(1, grid.n + 1), np.full(grid.n, grid.N // 2)):
        g = PoincareElement(grid.n, shift=shift)
        for x in _sample_sites(ctx):
            lhs = adjoint_on_coordinate_ladder(fock, g, x).matrix
            target = int(site_permutation(grid, g.R, g.shift)[x])
            d = lhs - coordinate_annihilator(fock, target)
            err = max(err, float(np.abs(d.data).max()) if d.nnz else 0.0)
    return err


def check_rotation_lemma(ctx: Context) -> float:
    ctx.need_dims(2)
    ctx.need_sectors(1)
    fock, grid = ctx.fock, ctx.grid
    err = 0.0
    for R in lattice_rotations(grid.n):
        g = PoincareElement(grid.n, R=R)
        for x in _sample_sites(ctx):
            lhs = adjoint_on_coordinate_ladder(fock, g, x).matrix
            target = int(site_permutation(grid, R)[x])
            d = lhs - coordinate_annihilator(fock, target)
            err = max(err, float(np.abs(d.data).max()) if d.nnz else 0.0)
    return err


def check_time_kernel_conjugation(ctx: Context) -> float:
    ctx.need_sectors(1)
    grid = ctx.grid
    y0 = 0.5
    x = grid.origin()
    got = time_kernel_from_conjugation(ctx.fock, y0, x)
    G = lattice_time_kernel(grid, y0)
    # expected G(x - z) for every site z
    sep = grid.wrap_site(grid.site_ints[x][None, :] - grid.site_ints) + grid.N // 2
    want = G[np.ravel_multi_index(tuple(sep.T), grid.shape)]
    return float(np.abs(got - want).max())


def check_phi1_paths(ctx: Context) -> float:
    ctx.need_sectors(1)
    fock = ctx.fock
    err = 0.0
    for t in (0.0, 0.5, -1.25):
        for x in _sample_sites(ctx):
            d = phi1_field(fock, t, x) - phi1_field_momentum(fock, t, x)
            err = max(err, float(np.abs(d.matrix.data).max()) if d.matrix.nnz else 0.0)
    return err


def check_covariance(ctx: Context) -> float:
    ctx.need_sectors(1)
    fock, grid = ctx.fock, ctx.grid
    rots = lattice_rotations(grid.n)
    elements = [
        PoincareElement(grid.n, y0=0.5),
        PoincareElement(grid.n, shift=np.arange(1, grid.n + 1)),
        PoincareElement(grid.n, y0=-0.3, shift=-np.ones(grid.n, dtype=int), R=rots[-1]),
    ]
    if grid.n >= 2:
        elements.append(PoincareElement(grid.n, R=rots[1]))
    err = 0.0
    for g in elements:
        for x0 in (0.0, 0.25):
            for x in _sample_sites(ctx)[:2]:
                err = max(err, covariance_check(fock, g, x0, x).deviation)
    return err


def check_probability_conservation(ctx: Context) -> float:
    ctx.need_sectors(1)
    fock, grid = ctx.fock, ctx.grid
    state = one_particle_state(fock, np.eye(grid.mode_count)[grid.origin()], Basis.COORDINATE)
    err = 0.0
    for t in (0.0, 0.5, 1.0):
        psi = evolve_state(fock, state, t)
        amps = transform_array(psi[fock.sector(1)], grid, Basis.MOMENTUM, Basis.COORDINATE)
        err = max(err, abs(np.sum(np.abs(amps) ** 2) - 1.0))
    return err


def check_nwp_delta(ctx: Context) -> float:
    """``<0| a~(x) a~^dagger(y) |0> = delta_xy``: coordinate states are orthonormal."""
    ctx.need_sectors(1)
    fock = ctx.fock
    vac = fock.vacuum()
    sites = range(fock.M) if fock.M <= 64 else _sample_sites(ctx)
    states = np.array([coordinate_annihilator(fock, y).conj().T @ vac for y in sites])
    gram = states.conj() @ states.T
    return float(np.abs(gram - np.eye(len(states))).max())


def check_amplitude_symmetry(ctx: Context) -> float:
    ctx.need_sectors(2)
    fock, grid = ctx.fock, ctx.grid
    a, b = _sample_sites(ctx)[:2]
    state = coordinate_product_state(fock, [a, b])
    err = 0.0
    for t in (0.0, 0.5):
        u = k_particle_amplitude(fock, AmplitudeRequest(state, (a, b), t)).value
        v = k_particle_amplitude(fock, AmplitudeRequest(state, (b, a), t)).value
        err = max(err, abs(u - v))
    return err


# ---- lattice tier ----------------------------------------------------------

def _residual(key: str):
    def run(ctx: Context) -> float:
        return float(ctx.onebody_residuals[key])
    run.__name__ = f"check_{key}"
    return run


def check_omega_kernel(ctx: Context) -> float:
    return max(calibration.omega_kernel_errors(ctx.spec))


def check_time_kernel(ctx: Context) -> float:
    return max(calibration.time_kernel_errors(ctx.spec))


CHECKS = [
    Check("dft_unitarity", "unitary lattice Fourier transform, Parseval", "exact", check_dft_unitarity, TIGHT_TOL),
    Check("dft_shift_theorem", "site shift <-> momentum phase exp(-i p a)", "exact", check_dft_shift, TIGHT_TOL),
    Check("fourier_matrix", "dense F is unitary and equals the FFT path", "exact", check_fourier_matrix, TIGHT_TOL),
    Check("dgamma_homomorphism", "[dG(A), dG(B)] = dG([A, B])", "exact", check_dgamma_homomorphism),
    Check("dgamma_one_particle_block", "dG(A) restricted to one particle is A", "exact", check_one_particle_block),
    Check("number_operator", "dG(identity) = N", "exact", check_number_operator),
    Check("ladder_ccr_momentum", "[a(p), a^+(q)] = delta_pq below the cutoff", "exact", check_ccr_momentum, TIGHT_TOL),
    Check("ladder_ccr_coordinate", "[a~(x), a~^+(y)] = delta_xy below the cutoff", "exact", check_ccr_coordinate,
          TIGHT_TOL),
    Check("coordinate_ladder_paths", "a~(x) direct assembly = Fourier sum of a(p)", "exact",
          check_coordinate_ladder_paths, TIGHT_TOL),
    Check("nwp_position_lift", "dG(X^j) = sum_x x^j a~^+(x) a~(x)", "exact", check_nwp_lift),
    Check("energy_circulant", "F^+ diag(omega) F = circulant W(x - y)", "exact", check_energy_circulant),
    Check("boost_coordinate_kernel", "boost kernel = -(x + y)^j W(x - y) / 2", "exact", check_boost_kernel),
    Check("generator_hermiticity", "boost and rotation generators are Hermitian", "exact",
          check_generator_hermiticity),
    Check("position_momentum_offdiagonal", "[X^j, P^k] = 0 for j != k", "exact", check_xp_offdiagonal),
    Check("unitaries", "U^+ U = 1 and U(s) U(t) = U(s + t)", "exact", check_unitaries),
    Check("shift_lemma", "U(y) a~(x) U(y)^-1 = a~(x + y)", "exact", check_shift_lemma),
    Check("rotation_lemma", "U(R) a~(x) U(R)^-1 = a~(R x)", "exact", check_rotation_lemma),
    Check("time_kernel_conjugation", "U(y0) a~(x) U(y0)^-1 = sum_z G(x - z) a~(z)", "exact",
          check_time_kernel_conjugation),
    Check("phi1_two_paths", "conjugated a~ = momentum expansion of phi1", "exact", check_phi1_paths),
    Check("covariance", "U(g) phi1(x) U(g)^-1 = phi1(g x)", "exact", check_covariance),
    Check("probability_conservation", "one-particle position probabilities sum to 1", "exact",
          check_probability_conservation),
    Check("nwp_eigen_delta", "<0| a~(x) a~^+(y) |0> = delta_xy", "exact", check_nwp_delta),
    Check("amplitude_symmetry", "k-particle amplitude is symmetric in positions", "exact", check_amplitude_symmetry),
    Check("heisenberg_equation", "[omega, X^j] + i V^j = 0", "lattice", _residual("heisenberg_equation")),
    Check("heisenberg_weyl", "[X^j, P^j] - i = 0", "lattice", _residual("heisenberg_weyl")),
    Check("boost_consistency", "symmetrised boost = differential boost", "lattice", _residual("boost_consistency")),
    Check("boost_energy_commutator", "[B^j, omega] = -i p^j", "lattice", _residual("boost_energy_commutator")),
    Check("boost_momentum_commutator", "[B^j, P^j] = -i omega", "lattice", _residual("boost_momentum_commutator")),
    Check("boost_time_translation", "exp(i omega t) B exp(-i omega t) = B - t p^j", "lattice",
          _residual("boost_time_translation")),
    Check("boost_double_commutator", "[omega, [omega, B^j]] = 0", "lattice", _residual("boost_double_commutator")),
    Check("noncovariance_commutator", "[B^j, X^k] = (i/2)(X^j V^k + V^k X^j)", "lattice",
          _residual("noncovariance_commutator")),
    Check("rotation_energy_commutator", "[L_ik, omega] = 0", "lattice", _residual("rotation_energy_commutator"),
          dims=(2, 3)),
    Check("omega_kernel_agreement", "lattice W(r) / a = Bessel K_1 energy kernel", "lattice", check_omega_kernel,
          dims=(1,)),
    Check("time_kernel_agreement", "lattice G(r) / a^3 = Bessel K_2 time kernel", "lattice", check_time_kernel,
          dims=(3,)),
]
CHECK_NAMES = [c.name for c in CHECKS]
TIERS = ("exact", "lattice")


def select(suites) -> list:
    """Checks named by ``suites`` (check names, tier names or ``"all"``), in declaration order."""
    wanted = set()
    for s in suites or ["all"]:
        if s == "all":
            wanted.update(CHECK_NAMES)
        elif s in TIERS:
            wanted.update(c.name for c in CHECKS if c.tier == s)
        elif s in CHECK_NAMES:
            wanted.add(s)
        else:
            raise KeyError(s)
    return [c for c in CHECKS if c.name in wanted]


def lattice_tolerance(check: Check, spec: GridSpec, fixtures: dict) -> float | None:
    if check.name == "omega_kernel_agreement":
        table = fixtures["kernels"]["omega_1d"].get(calibration.grid_key(spec))
    elif check.name == "time_kernel_agreement":
        table = fixtures["kernels"]["time_3d"].get(calibration.grid_key(spec))
    else:
        base = calibration.onebody_baseline(spec, fixtures)
        table = None if base is None or check.name not in base else {check.name: base[check.name]}
    if not table:
        return None
    return max(table.values()) * fixtures["slack"]


def run_checks(ctx: Context, checks, overrides: dict | None = None) -> list:
    overrides = overrides or {}
    fixtures = calibration.load_fixtures()
    out = []
    for chk in checks:
        tol = overrides.get(chk.name)
        if tol is None:
            tol = chk.tolerance if chk.tier == "exact" else lattice_tolerance(chk, ctx.spec, fixtures)
        start = time.perf_counter()
        if ctx.spec.n not in chk.dims:
            need = " or ".join(map(str, chk.dims))
            rep = CheckReport(chk.name, chk.identity, chk.tier, "skipped", None, tol, f"needs n = {need}")
        elif tol is None:
            rep = CheckReport(chk.name, chk.identity, chk.tier, "skipped", None, None, "uncalibrated grid")
        else:
            try:
                err = float(chk.run(ctx))
            except Skip as exc:
                rep = CheckReport(chk.name, chk.identity, chk.tier, "skipped", None, float(tol), str(exc))
            else:
                status = "pass" if err <= tol else "fail"
                rep = CheckReport(chk.name, chk.identity, chk.tier, status, err, float(tol))
        rep.wall_time = time.perf_counter() - start
        out.append(rep)
    return out
