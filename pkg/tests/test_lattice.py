import numpy as np
import pytest

from rydfac.lattice import (RealLattice, build_real_lattice, finite_hamiltonian,
                            ladder_hamiltonian, one_exc_pair_permutation,
                            synthesize)

ALL_KINDS = ["chain", "ladder", "square", "triangular", "honeycomb"]


@pytest.mark.parametrize("kind,n_basis,n_bonds", [
    ("chain", 1, 1),
    ("ladder", 2, 3),
    ("square", 1, 2),
    ("triangular", 1, 3),
    ("honeycomb", 2, 3),
])
def test_kind_counts(kind, n_basis, n_bonds):
    real = build_real_lattice(kind)
    assert real.n_basis == n_basis
    assert len(real.nn_links) == n_bonds


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_bond_lengths_are_unit(kind):
    real = build_real_lattice(kind)
    for link in real.nn_links:
        assert np.linalg.norm(real.bond_vector(link)) == pytest.approx(1.0, abs=1e-12)


def test_unknown_kind_rejected():
    with pytest.raises(ValueError, match="unknown lattice kind"):
        build_real_lattice("kagome")


def test_duplicate_reversed_link_rejected():
    with pytest.raises(ValueError, match="reversal"):
        RealLattice("custom", [[1.0]], [[0.0]], ((0, 0, (1,)), (0, 0, (-1,))))


def test_wrong_bond_length_rejected():
    with pytest.raises(ValueError, match="length"):
        RealLattice("custom", [[2.0]], [[0.0]], ((0, 0, (1,)),))


def test_reciprocal_vectors_duality():
    for kind in ["square", "triangular", "honeycomb"]:
        real = build_real_lattice(kind)
        astar = real.reciprocal_vectors()
        assert np.allclose(astar @ real.primitive_vectors.T,
                           2 * np.pi * np.eye(real.dim), atol=1e-12)


def test_json_roundtrip():
    for kind in ALL_KINDS:
        real = build_real_lattice(kind)
        back = RealLattice.from_json(real.to_json())
        assert back.kind == real.kind
        assert np.array_equal(back.primitive_vectors, real.primitive_vectors)
        assert np.array_equal(back.basis, real.basis)
        assert back.nn_links == real.nn_links


@pytest.mark.parametrize("kind,n1,n2", [
    ("square", 1, 2),
    ("triangular", 1, 3),
    ("ladder", 2, 3),
    ("honeycomb", 2, 3),
])
def test_synthesize_counts(kind, n1, n2):
    syn = synthesize(build_real_lattice(kind))
    assert (syn.n_one, syn.n_pair) == (n1, n2)


def test_synthesize_pair_sites_at_midpoints():
    real = build_real_lattice("triangular")
    syn = synthesize(real)
    for n, link in enumerate(real.nn_links):
        mid = real.basis[link[0]] + 0.5 * real.bond_vector(link)
        assert np.allclose(syn.pair_sites[n], mid)


def test_every_pair_site_has_two_links():
    for kind in ALL_KINDS:
        syn = synthesize(build_real_lattice(kind))
        counts = np.zeros(syn.n_pair, int)
        for p, m, off in syn.hop_links:
            counts[p] += 1
        assert np.all(counts == 2)


def test_finite_sites_open_boundaries():
    real = build_real_lattice("ladder")
    pos, bonds = real.finite_sites(4)
    assert pos.shape == (8, 2)
    # 3 bonds per interior cell, leg bonds dropped at the open end
    assert len(bonds) == 3 * 4 - 2
    for a, b in bonds:
        assert np.linalg.norm(pos[a] - pos[b]) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError, match="L >= 2"):
        real.finite_sites(1)


def test_ladder_golden_matrix_L2():
    syn = synthesize(build_real_lattice("ladder"))
    H = finite_hamiltonian(syn, 2)
    H0 = np.array([[0, 0, 1, 0, 0],
                   [0, 0, 0, 1, 0],
                   [1, 0, 0, 0, 1],
                   [0, 1, 0, 0, 1],
                   [0, 0, 1, 1, 0]], dtype=float)
    H1 = np.zeros((5, 5))
    H1[0, 2] = H1[1, 3] = 1.0
    G = np.zeros((2, 2))
    G[0, 1] = 1.0
    expected = np.kron(H0, np.eye(2)) + np.kron(H1, G) + np.kron(H1, G).T
    for obc_slot in (1, 3):      # A_L and B_L
        expected[obc_slot, :] = 0.0
        expected[:, obc_slot] = 0.0
    assert np.array_equal(H, expected)


@pytest.mark.parametrize("L", [2, 5, 9])
def test_ladder_matrix_is_symmetric_binary(L):
    syn = synthesize(build_real_lattice("ladder"))
    H = finite_hamiltonian(syn, L)
    assert np.array_equal(H, H.T)
    assert set(np.unique(H)) <= {0.0, 1.0}


def test_ladder_L3_has_zero_eigenvalue():
    syn = synthesize(build_real_lattice("ladder"))
    ev = np.linalg.eigvalsh(finite_hamiltonian(syn, 3))
    assert np.min(np.abs(ev)) < 1e-12


@pytest.mark.parametrize("kind,L", [("ladder", 4), ("square", 3), ("chain", 6)])
def test_bipartite_blocks_exactly_zero(kind, L):
    syn = synthesize(build_real_lattice(kind))
    H = finite_hamiltonian(syn, L)
    perm = one_exc_pair_permutation(syn, L)
    Hp = H[np.ix_(perm, perm)]
    n1 = syn.n_one * L ** syn.dim
    assert np.all(Hp[:n1, :n1] == 0.0)
    assert np.all(Hp[n1:, n1:] == 0.0)


@pytest.mark.parametrize("kind,L", [("ladder", 5), ("square", 4), ("honeycomb", 3)])
def test_finite_spectrum_parity(kind, L):
    syn = synthesize(build_real_lattice(kind))
    ev = np.linalg.eigvalsh(finite_hamiltonian(syn, L))
    assert np.max(np.abs(ev + ev[::-1])) < 1e-10


def test_periodic_option_matches_bloch_at_gamma():
    # PBC spectrum contains the k=0 Bloch eigenvalues
    from rydfac.bands import bloch_matrix
    syn = synthesize(build_real_lattice("ladder"))
    ev = np.linalg.eigvalsh(finite_hamiltonian(syn, 6, periodic=True))
    gamma = bloch_matrix(syn, np.zeros(2)).eigenvalues()
    for e in gamma:
        assert np.min(np.abs(ev - e)) < 1e-10


def test_shift_vector_validation():
    syn = synthesize(build_real_lattice("ladder"))
    with pytest.raises(ValueError, match="length"):
        finite_hamiltonian(syn, 3, shifts={0: np.ones(2)})
    with pytest.raises(ValueError, match="shape"):
        finite_hamiltonian(syn, 3, shifts=np.ones((2, 3)))
    with pytest.raises(ValueError, match="length"):
        ladder_hamiltonian(3, delta_a=np.ones(3))    # needs L-1 entries


def test_ladder_hamiltonian_shift_placement():
    L = 3
    H0 = ladder_hamiltonian(L)
    H = ladder_hamiltonian(L, delta_a=[0.5, 0.0], delta_e=[0.0, 0.0, 0.25])
    diff = H - H0
    assert diff[0, 0] == 0.5           # A_1
    assert diff[4 * L + 2, 4 * L + 2] == 0.25   # E_3
    assert np.count_nonzero(diff) == 2


def test_ladder_obc_shifts_never_touch_removed_slots():
    # shifts on A/B only accept L-1 entries; the OBC slot stays zeroed
    L = 4
    H = ladder_hamiltonian(L, delta_a=np.full(L - 1, 7.0))
    assert H[L - 1, L - 1] == 0.0      # A_L slot
