import math
import warnings

import numpy as np
import pytest

from fockgen.amplitudes import (AmplitudeRequest, ParticleNumberError, SectorMismatchWarning,
                                config_to_coordinate_kernel, coordinate_product_state, covariant_components,
                                covariant_pairing, evolve_state, k_particle_amplitude, nwp_eigenfunction,
                                position_amplitude, position_amplitudes)
from fockgen.fock import build_fock, coordinate_annihilator, ladder, one_particle_state
from fockgen.grid import Basis, GridSpec, make_grid
from fockgen.rng import SplitMix64, random_vector
from fockgen.specfun import power_kernel
from fockgen.symmetry import phi1_field

from oracles import permanent


@pytest.fixture(scope="module")
def f1():
    return build_fock(make_grid(GridSpec(1, 8, 0.5, 1.0)), 3)


def random_one_particle(fock, seed):
    psi = random_vector(SplitMix64(seed), fock.M)
    return one_particle_state(fock, psi / np.linalg.norm(psi))


def test_nwp_eigenfunction_modulus_and_origin():
    g = make_grid(GridSpec(2, 4, 0.5, 1.3))
    for x in (0, 7):
        v = nwp_eigenfunction(g, x)
        assert v.basis is Basis.MOMENTUM
        assert np.allclose(np.abs(v.values), np.sqrt(2 * g.omega / g.mode_count), atol=1e-15)
    assert np.allclose(nwp_eigenfunction(g, g.origin()).values, np.sqrt(2 * g.omega / g.mode_count), atol=1e-15)


def test_nwp_eigenfunctions_orthonormal_in_covariant_pairing():
    g = make_grid(GridSpec(2, 4, 0.5, 1.0))
    E = np.array([nwp_eigenfunction(g, x).values for x in range(g.mode_count)])
    gram = np.array([[covariant_pairing(g, E[i], E[j]) for j in range(g.mode_count)] for i in range(g.mode_count)])
    assert np.abs(gram - np.eye(g.mode_count)).max() <= 1e-13


def test_position_amplitude_of_localised_state(f1):
    for x0 in (0, 5):
        state = ladder(f1, x0, Basis.COORDINATE, "create") @ f1.vacuum()
        amps = [position_amplitude(f1, state, x) for x in range(f1.M)]
        assert np.allclose(amps, np.eye(f1.M)[x0], atol=1e-14)


def test_position_amplitude_of_momentum_mode(f1):
    g = f1.grid
    p = 3
    state = ladder(f1, p, kind="create") @ f1.vacuum()
    for x in range(f1.M):
        amp = position_amplitude(f1, state, x)
        assert abs(amp) == pytest.approx(f1.M**-0.5, abs=1e-15)
        assert amp == pytest.approx(np.exp(1j * g.momenta[p, 0] * g.positions[x, 0]) / math.sqrt(f1.M), abs=1e-15)


def test_total_position_probability_is_one(f1):
    for seed in range(5):
        state = random_one_particle(f1, seed)
        amps = position_amplitudes(f1, state)
        assert np.sum(np.abs(amps) ** 2) == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(amps, [position_amplitude(f1, state, x) for x in range(f1.M)], atol=1e-14)


def test_amplitude_equals_covariant_pairing(f1):
    g = f1.grid
    state = random_one_particle(f1, 12)
    cov = covariant_components(g, state[f1.sector(1)])
    for x in range(f1.M):
        pair = covariant_pairing(g, nwp_eigenfunction(g, x).values, cov)
        assert position_amplitude(f1, state, x) == pytest.approx(pair, abs=1e-12)


def test_position_amplitude_wrong_sector(f1):
    with pytest.raises(ParticleNumberError):
        position_amplitude(f1, f1.vacuum(), 0)
    with pytest.raises(ParticleNumberError):
        position_amplitudes(f1, coordinate_product_state(f1, [0, 1]))


def test_vacuum_amplitude(f1):
    assert k_particle_amplitude(f1, AmplitudeRequest(f1.vacuum(), ())).value == 1


def test_two_particle_localised_amplitude(f1):
    x1, x2 = 1, 6
    state = coordinate_product_state(f1, [x1, x2])
    amp = k_particle_amplitude(f1, AmplitudeRequest(state, (x1, x2)))
    assert not amp.sector_mismatch
    # (2!)^-1/2 <0| a~(x1) a~(x2) a~+(x1) a~+(x2) |0> with a normalised state
    direct = (coordinate_annihilator(f1, x1) @ (coordinate_annihilator(f1, x2) @ state))[0] / math.sqrt(2)
    assert amp.value == pytest.approx(direct, abs=1e-14)
    assert amp.value == pytest.approx(1 / math.sqrt(2), abs=1e-14)
    probs = [k_particle_amplitude(f1, AmplitudeRequest(state, (a, b))).modulus2 for a in range(8) for b in range(8)]
    assert sum(probs) == pytest.approx(1.0, abs=1e-12)


def test_k_particle_amplitude_against_permanent():
    g = make_grid(GridSpec(1, 6, 0.5, 1.0))
    f = build_fock(g, 3)
    rng = SplitMix64(21)
    orbitals = [random_vector(rng, 6) for _ in range(3)]
    state = f.vacuum()
    for u in orbitals:
        state = sum(u[p] * ladder(f, p, kind="create").matrix for p in range(6)) @ state
    t, sites = 0.37, (0, 2, 5)
    # <0| prod phi1(t, x_i) prod c+(u_j) |0> = perm[ sum_p c_p(x_i) u_j(p) ]
    c = np.exp(1j * (g.positions @ g.momenta.T) - 1j * g.omega[None, :] * t) / math.sqrt(6)
    want = permanent(c[list(sites)] @ np.array(orbitals).T) / math.sqrt(6)
    got = k_particle_amplitude(f, AmplitudeRequest(state, sites, t)).value
    assert got == pytest.approx(want, rel=1e-12)


def test_k_particle_amplitude_is_symmetric():
    g = make_grid(GridSpec(1, 6, 0.5, 1.0))
    f = build_fock(g, 3)
    state = coordinate_product_state(f, [0, 3, 3])
    state = evolve_state(f, state, 0.4)
    base = k_particle_amplitude(f, AmplitudeRequest(state, (0, 3, 4), 0.2)).value
    for perm in ((3, 0, 4), (4, 3, 0), (0, 4, 3)):
        # ladders commute, so only the floating point summation order changes
        assert k_particle_amplitude(f, AmplitudeRequest(state, perm, 0.2)).value == pytest.approx(base, abs=1e-15)


def test_sector_mismatch_is_zero_and_flagged(f1):
    state = coordinate_product_state(f1, [2])
    with pytest.warns(SectorMismatchWarning):
        amp = k_particle_amplitude(f1, AmplitudeRequest(state, (2, 3)))
    assert amp.value == 0 and amp.sector_mismatch
    with pytest.raises(ParticleNumberError):
        k_particle_amplitude(f1, AmplitudeRequest(state, (0, 1, 2, 3)))


def test_mixed_state_uses_matching_sector(f1):
    mix = (coordinate_product_state(f1, [2]) + coordinate_product_state(f1, [2, 4])) / math.sqrt(2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SectorMismatchWarning)
        amp = k_particle_amplitude(f1, AmplitudeRequest(mix, (2, 4)))
    assert amp.sector_mismatch
    assert amp.value == pytest.approx(0.5, abs=1e-14)


def test_evolution_basics(f1):
    state = random_one_particle(f1, 3)
    assert np.array_equal(evolve_state(f1, state, 0.0), state)
    for t in (0.3, 2.0, -1.1):
        out = evolve_state(f1, state, t)
        assert np.linalg.norm(out) == pytest.approx(1.0, abs=1e-12)
        assert np.sum(np.abs(position_amplitudes(f1, out)) ** 2) == pytest.approx(1.0, abs=1e-12)
    p = 5
    mode = ladder(f1, p, kind="create") @ f1.vacuum()
    assert np.allclose(evolve_state(f1, mode, 0.7), np.exp(-1j * f1.grid.omega[p] * 0.7) * mode, atol=1e-15)


def test_evolution_is_phi1_consistent(f1):
    # the vacuum has zero energy, so <0| a~(x) e^{-itP0} |s> = <0| phi1(t, x) |s>
    state = random_one_particle(f1, 9)
    t = 0.8
    for x in (0, 4):
        lhs = position_amplitude(f1, evolve_state(f1, state, t), x)
        rhs = (phi1_field(f1, t, x) @ state)[0]
        assert lhs == pytest.approx(rhs, abs=1e-13)


def test_localised_state_spreads_to_every_site():
    g = make_grid(GridSpec(1, 32, 0.25, 1.0))
    f = build_fock(g, 1)
    state = coordinate_product_state(f, [g.origin()])
    amps = position_amplitudes(f, evolve_state(f, state, 0.5))
    assert np.all(np.abs(amps) > 0)
    # far outside the light cone the amplitude is small but not zero
    far = np.abs(g.positions[:, 0]) > 3
    assert np.abs(amps[far]).max() < 0.05


def test_config_kernel_even_and_parseval():
    g = make_grid(GridSpec(2, 8, 0.5, 1.0))
    K = config_to_coordinate_kernel(g, 0.0)
    flip = [g.site_index(g.wrap_site(-j)) for j in g.site_ints]
    assert np.allclose(K, K[flip], atol=1e-15)
    assert np.sum(np.abs(K) ** 2) == pytest.approx(np.sum(1 / (2 * g.omega)), rel=1e-12)
    Kt = config_to_coordinate_kernel(g, 0.6)
    assert np.sum(np.abs(Kt) ** 2) == pytest.approx(np.sum(1 / (2 * g.omega)), rel=1e-12)


def test_config_kernel_against_power_kernel_1d():
    # M^-1/2 K / a -> 2^-1/2 (2 pi)^-1 P~^{-1/4}(r), converging under refinement
    errs = []
    for N, a in ((64, 0.25), (128, 0.125), (256, 0.0625)):
        g = make_grid(GridSpec(1, N, a, 1.0))
        K = config_to_coordinate_kernel(g, 0.0)
        worst = 0
        for r in (1.0, 1.5, 2.0):
            lat = K[g.site_index([round(r / a)])].real / math.sqrt(N) / a
            want = 2**-0.5 / (2 * math.pi) * power_kernel(-0.25, 1.0, 1, r)
            worst = max(worst, abs(lat - want) / abs(want))
        errs.append(worst)
    assert errs[0] < 0.06 and errs[1] < errs[0] and errs[2] < errs[1] and errs[2] < 0.01
