import numpy as np
import pytest
import scipy.sparse as sp

from fockgen.fock import build_fock, coordinate_annihilator, dgamma, ladder, number_op
from fockgen.grid import GridSpec, make_grid
from fockgen.onebody import boost_op, gaussian_packet, momentum_component_op, rotation_gen_op
from fockgen.symmetry import (PoincareElement, UnsupportedElementError, adjoint_on_coordinate_ladder,
                              covariance_check, lattice_rotations, lattice_time_kernel, mode_permutation,
                              phi1_field, phi1_field_momentum, predicted_coordinate_ladder, site_permutation,
                              time_kernel_from_conjugation, time_unitary, unitarity_defect, unitary_of)


@pytest.fixture(scope="module")
def f2():
    return build_fock(make_grid(GridSpec(2, 4, 0.5, 1.0)), 2)


@pytest.fixture(scope="module")
def f3():
    return build_fock(make_grid(GridSpec(3, 4, 0.5, 1.0)), 1)


def close(A, B, tol=1e-12):
    return abs(A.matrix - B.matrix).max() <= tol if (A.matrix - B.matrix).nnz else True


def test_lattice_rotation_groups():
    assert [len(lattice_rotations(n)) for n in (1, 2, 3)] == [1, 4, 24]
    for R in lattice_rotations(3):
        assert np.array_equal(R @ R.T, np.eye(3, dtype=int))


def test_element_validation():
    with pytest.raises(UnsupportedElementError):
        PoincareElement(2, shift=[0.5, 0])
    with pytest.raises(UnsupportedElementError):
        PoincareElement(2, R=[[1, 0], [0, -1]])
    with pytest.raises(UnsupportedElementError):
        PoincareElement(2, R=[[0.6, -0.8], [0.8, 0.6]])
    g = make_grid(GridSpec(2, 4, 0.5, 1.0))
    assert np.array_equal(PoincareElement.from_physical_shift(g, [1.0, -0.5]).shift, [2, -1])
    with pytest.raises(UnsupportedElementError):
        PoincareElement.from_physical_shift(g, [0.3, 0.0])


def test_boost_is_refused(f2):
    boost = PoincareElement(2, rapidity=(0.1, 0.0))
    with pytest.raises(UnsupportedElementError):
        unitary_of(f2, boost)
    with pytest.raises(UnsupportedElementError):
        adjoint_on_coordinate_ladder(f2, boost, 0)


def test_identity_element(f2):
    U = unitary_of(f2, PoincareElement(2))
    assert abs(U.matrix - sp.identity(f2.dim)).max() == 0


def test_unitarity_and_number_conservation(f2):
    N = number_op(f2).matrix
    for g in (PoincareElement(2, y0=0.7), PoincareElement(2, shift=[1, -1]),
              PoincareElement(2, y0=-0.3, shift=[2, 1], R=[[0, -1], [1, 0]])):
        U = unitary_of(f2, g)
        assert unitarity_defect(U) <= 1e-12
        comm = U.matrix @ N - N @ U.matrix
        assert comm.nnz == 0 or abs(comm).max() <= 1e-13


def test_abelian_group_law(f2):
    a, b = PoincareElement(2, shift=[1, 0]), PoincareElement(2, shift=[1, 3])
    assert close(unitary_of(f2, a) @ unitary_of(f2, b), unitary_of(f2, a.compose(b)))
    c, d = PoincareElement(2, y0=0.4), PoincareElement(2, shift=[-1, 2])
    assert close(unitary_of(f2, c) @ unitary_of(f2, d), unitary_of(f2, c.compose(d)))
    assert close(time_unitary(f2, 0.3) @ time_unitary(f2, 0.5), time_unitary(f2, 0.8))


def test_rotation_group_law(f2):
    R = np.array([[0, -1], [1, 0]])
    a, b = PoincareElement(2, shift=[1, 0], R=R), PoincareElement(2, shift=[0, 1], R=R)
    assert close(unitary_of(f2, a) @ unitary_of(f2, b), unitary_of(f2, a.compose(b)))


def test_shift_lemma(f2):
    g = f2.grid
    for shift in ([1, 0], [-2, 1], [3, 3]):
        el = PoincareElement(2, shift=shift)
        for x in (0, 6, 15):
            target = g.site_index(g.wrap_site(g.site_ints[x] + np.array(shift)))
            got = adjoint_on_coordinate_ladder(f2, el, x)
            assert abs(got.matrix - coordinate_annihilator(f2, target)).max() <= 1e-12


def test_rotation_lemma(f3):
    g = f3.grid
    for R in lattice_rotations(3)[::5]:
        el = PoincareElement(3, R=R)
        for x in (1, 22, 63):
            Rx = g.site_ints[x] @ R.T
            target = g.site_index(g.wrap_site(Rx))
            assert site_permutation(g, R)[x] == target
            got = adjoint_on_coordinate_ladder(f3, el, x)
            assert abs(got.matrix - coordinate_annihilator(f3, target)).max() <= 1e-12


def test_mode_permutation_is_bijection(f3):
    for R in lattice_rotations(3):
        perm = mode_permutation(f3.grid, R)
        assert sorted(perm) == list(range(f3.M))


def test_time_shift_matches_kernel_prediction(f2):
    el = PoincareElement(2, y0=0.6)
    for x in (0, 9):
        got = adjoint_on_coordinate_ladder(f2, el, x)
        assert abs(got.matrix - predicted_coordinate_ladder(f2, el, x).matrix).max() <= 1e-12


def test_time_kernel_read_off_matrix_elements():
    grid = make_grid(GridSpec(1, 16, 0.5, 1.0))
    f = build_fock(grid, 1)
    site = grid.site_index([3])
    G = lattice_time_kernel(grid, 0.4)
    got = time_kernel_from_conjugation(f, 0.4, site)
    want = [G[grid.site_index(grid.wrap_site(grid.site_ints[site] - z))] for z in grid.site_ints]
    assert np.allclose(got, want, atol=1e-13)


def test_phi1_at_zero_and_two_paths(f2):
    for x in (0, 5):
        assert abs(phi1_field(f2, 0.0, x).matrix - coordinate_annihilator(f2, x)).max() == 0
        for x0 in (0.0, 0.35, -1.2):
            assert abs(phi1_field(f2, x0, x).matrix - phi1_field_momentum(f2, x0, x).matrix).max() <= 1e-12


def test_phi1_one_particle_matrix_element():
    grid = make_grid(GridSpec(1, 8, 0.5, 1.0))
    f = build_fock(grid, 1)
    x, x0 = grid.site_index([2]), 0.7
    phi = phi1_field(f, x0, x)
    for p in range(8):
        one = ladder(f, p, kind="create") @ f.vacuum()
        want = np.exp(1j * grid.momenta[p, 0] * grid.positions[x, 0] - 1j * grid.omega[p] * x0) / np.sqrt(8)
        assert (phi @ one)[0] == pytest.approx(want, abs=1e-14)


@pytest.mark.parametrize("g", [PoincareElement(2, R=[[0, -1], [1, 0]]), PoincareElement(2, y0=0.8),
                               PoincareElement(2, shift=[1, -1]),
                               PoincareElement(2, y0=-0.4, shift=[2, 1], R=[[-1, 0], [0, -1]])])
def test_covariance(f2, g):
    for x0, x in ((0.0, 3), (0.3, 10)):
        rep = covariance_check(f2, g, x0, x)
        assert rep.passed and rep.deviation <= 1e-10


def test_covariance_full_3d():
    f = build_fock(make_grid(GridSpec(3, 8, 0.5, 1.0)), 1)
    R = lattice_rotations(3)[7]
    rep = covariance_check(f, PoincareElement(3, y0=0.45, shift=[1, -2, 3], R=R), 0.2, 100)
    assert rep.deviation <= 1e-10 and rep.element == "time+shift+rotation"


def test_momentum_invariant_under_time(f2):
    U = time_unitary(f2, 0.9).matrix
    for j in (1, 2):
        D = dgamma(f2, momentum_component_op(f2.grid, j)).matrix
        diff = U.conj().T @ D @ U - D
        assert diff.nnz == 0 or abs(diff).max() <= 1e-10


def test_rotation_generator_invariant_under_time_on_packets():
    # X^i P^k - X^k P^i does not commute with diag(omega) on the lattice; the defect is
    # confined to the zone edge, so it is small on band-limited states and shrinks with refinement
    errs = []
    for N, a in ((16, 0.5), (32, 0.25)):
        g = make_grid(GridSpec(2, N, a, 1.0))
        f = build_fock(g, 1)
        U = time_unitary(f, 0.9).matrix
        D = dgamma(f, rotation_gen_op(g, 1, 2)).matrix
        psi = np.zeros(f.dim, dtype=complex)
        psi[f.sector(1)] = gaussian_packet(g, np.pi / (8 * a), p0=[0.3, -0.2], x0=[0.5, 0.3])
        errs.append(np.linalg.norm(U.conj().T @ (D @ (U @ psi)) - D @ psi))
    assert errs[0] < 0.05 and errs[1] < errs[0] / 4


def test_rotation_lift_commutes_with_energy(f2):
    w = dgamma(f2, momentum_component_op(f2.grid, 0)).matrix
    for R in lattice_rotations(2):
        U = unitary_of(f2, PoincareElement(2, R=R)).matrix
        d = U @ w @ U.conj().T - w
        assert d.nnz == 0 or abs(d).max() <= 1e-12


def test_boost_not_invariant_under_time_but_shifts_by_momentum():
    grid = make_grid(GridSpec(1, 64, 0.25, 1.0))
    f = build_fock(grid, 1)
    t = 0.5
    U = time_unitary(f, -t).matrix  # exp(-i t P0)
    B = dgamma(f, boost_op(grid, 1)).matrix
    P = dgamma(f, momentum_component_op(grid, 1)).matrix
    psi = np.zeros(f.dim, dtype=complex)
    psi[f.sector(1)] = gaussian_packet(grid, np.pi / 2, p0=[0.3], x0=[0.4])
    lhs = U.conj().T @ (B @ (U @ psi))
    assert np.linalg.norm(lhs - B @ psi) > 0.1
    assert np.linalg.norm(lhs - (B @ psi - t * (P @ psi))) < 2e-3


def test_covariance_report_fields(f2):
    rep = covariance_check(f2, PoincareElement(2, shift=[1, 0]), 0.0, 0)
    assert rep.element == "shift" and rep.target_site == f2.grid.site_index([-1, -2])
    assert rep.tolerance == 1e-10
