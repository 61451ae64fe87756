import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rydfac.bands import (analytic_bands, band_structure, bloch_matrix,
                          brillouin_cut, brillouin_grid, count_flat_bands,
                          cross_block_norm, detangle, detangling_transform,
                          honeycomb_vertex)
from rydfac.lattice import build_real_lattice, finite_hamiltonian, synthesize

SYN = {kind: synthesize(build_real_lattice(kind))
       for kind in ("chain", "ladder", "square", "triangular", "honeycomb")}

k2d = st.tuples(st.floats(-8, 8), st.floats(-8, 8)).map(np.array)


def test_triangular_gamma_point():
    bm = bloch_matrix(SYN["triangular"], np.zeros(2))
    assert np.allclose(bm.ctilde, 2.0)
    ev = bm.eigenvalues()
    assert np.allclose(ev, [-2 * np.sqrt(3), 0, 0, 2 * np.sqrt(3)], atol=1e-12)


def test_honeycomb_gamma_point():
    ev = bloch_matrix(SYN["honeycomb"], np.zeros(2)).eigenvalues()
    assert np.allclose(ev, [-np.sqrt(6), 0, 0, 0, np.sqrt(6)], atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(k=k2d, kind=st.sampled_from(["square", "triangular", "honeycomb"]))
def test_bloch_matrix_hermitian(k, kind):
    m = bloch_matrix(SYN[kind], k).matrix
    assert np.max(np.abs(m - m.conj().T)) == 0.0


@settings(max_examples=50, deadline=None)
@given(k=k2d, kind=st.sampled_from(["square", "triangular", "honeycomb", "ladder"]))
def test_kernel_dimension_bound(k, kind):
    syn = SYN[kind]
    ev = bloch_matrix(syn, k).eigenvalues()
    n_zero = int(np.sum(np.abs(ev) < 1e-10))
    assert n_zero >= abs(syn.n_one - syn.n_pair)


@pytest.mark.parametrize("kind", ["triangular", "honeycomb"])
def test_analytic_band_oracle(kind):
    rng = np.random.default_rng(0)
    syn = SYN[kind]
    for _ in range(1000):
        k = rng.uniform(-6, 6, size=2)
        dev = np.max(np.abs(bloch_matrix(syn, k).eigenvalues()
                            - analytic_bands(kind, k)))
        assert dev < 1e-10


def test_analytic_bands_unsupported_kind():
    with pytest.raises(ValueError, match="closed-form"):
        analytic_bands("square", np.zeros(2))


def test_honeycomb_touching_points():
    K = honeycomb_vertex()
    ev = analytic_bands("honeycomb", K)
    assert ev[3] == pytest.approx(ev[4], abs=1e-12)          # upper bands touch
    assert ev[3] == pytest.approx(np.sqrt(3.0), abs=1e-12)
    gamma = analytic_bands("honeycomb", np.zeros(2))
    assert gamma[4] == pytest.approx(np.sqrt(6.0), abs=1e-12)  # lambda_+ = 6
    assert abs(gamma[3]) < 1e-12                               # lambda_- = 0


def test_square_flat_band_is_exact():
    bs = band_structure(SYN["square"], brillouin_grid(SYN["square"], 32))
    flat = bs.flat_flags
    assert flat.sum() == 1
    assert np.max(np.abs(bs.bands[:, flat])) < 1e-10


@pytest.mark.parametrize("kind,expected", [
    ("square", 1), ("triangular", 2), ("honeycomb", 1), ("ladder", 1), ("chain", 0),
])
def test_flat_band_counts(kind, expected):
    syn = SYN[kind]
    n = 32 if syn.dim == 2 else 1024
    bs = band_structure(syn, brillouin_grid(syn, n))
    assert count_flat_bands(bs) == expected
    assert count_flat_bands(bs) >= abs(syn.n_one - syn.n_pair)


def test_count_flat_bands_rejects_bad_tol():
    bs = band_structure(SYN["chain"], brillouin_grid(SYN["chain"], 16))
    with pytest.raises(ValueError):
        count_flat_bands(bs, flat_tol=0.0)


def test_ladder_band_extrema():
    syn = SYN["ladder"]
    ks = np.zeros((10001, 2))
    ks[:, 0] = np.linspace(-np.pi, np.pi, 10001)
    b = band_structure(syn, ks).bands
    assert b[:, 3].max() == pytest.approx(2.0, abs=1e-9)
    assert b[:, 4].min() == pytest.approx(np.sqrt(2.0), abs=1e-9)
    assert b[:, 4].max() == pytest.approx(np.sqrt(6.0), abs=1e-9)


@pytest.mark.parametrize("kind", ["chain", "ladder", "square", "triangular",
                                  "honeycomb"])
def test_band_structure_parity(kind):
    syn = SYN[kind]
    n = 24 if syn.dim == 2 else 256
    b = band_structure(syn, brillouin_grid(syn, n)).bands
    assert np.max(np.abs(np.sort(-b, axis=1) - b)) < 1e-10


def test_band_structure_rejects_empty_grid():
    with pytest.raises(ValueError, match="nonempty"):
        band_structure(SYN["chain"], np.zeros((0, 1)))


def test_brillouin_cut_spans_zone():
    cut = brillouin_cut(SYN["triangular"], 7)
    assert cut[0, 0] == pytest.approx(-4 * np.pi / 3)
    assert np.all(cut[:, 1] == 0.0)


# ---------------------------------------------------------------------------
# Detangling


def test_detangle_clean_blocks():
    syn = SYN["ladder"]
    L = 10
    H = finite_hamiltonian(syn, L)
    U, Hd = detangle(H, L)
    assert np.allclose(U @ U.T, np.eye(5 * L), atol=1e-14)
    assert cross_block_norm(Hd, L) < 1e-12


def test_detangle_periodic_band_edges():
    # periodic clean ladder: the decoupled chain block hits +-2 exactly,
    # the stub block spans [sqrt2, sqrt6] with a zero flat level
    syn = SYN["ladder"]
    L = 16
    H = finite_hamiltonian(syn, L, periodic=True)
    _, Hd = detangle(H, L)
    assert cross_block_norm(Hd, L) < 1e-12
    chain = np.linalg.eigvalsh(Hd[:2 * L, :2 * L])
    stub = np.linalg.eigvalsh(Hd[2 * L:, 2 * L:])
    assert chain.max() == pytest.approx(2.0, abs=1e-12)
    assert chain.min() == pytest.approx(-2.0, abs=1e-12)
    pos = stub[stub > 1e-10]
    assert pos.min() == pytest.approx(np.sqrt(2.0), abs=1e-10)
    assert pos.max() == pytest.approx(np.sqrt(6.0), abs=1e-10)
    assert np.sum(np.abs(stub) < 1e-10) == L     # flat level lives in the stub


def test_detangle_disorder_couples_blocks():
    from rydfac.lattice import ladder_hamiltonian
    L = 6
    rng = np.random.default_rng(3)
    H = ladder_hamiltonian(L, delta_a=rng.normal(0, 0.1, L - 1),
                           delta_b=rng.normal(0, 0.1, L - 1),
                           delta_e=rng.normal(0, 0.1, L))
    _, Hd = detangle(H, L)
    assert cross_block_norm(Hd, L) > 1e-3


def test_detangle_mixer_is_involutive():
    L = 7
    M = detangling_transform(L, reorder=False)
    assert np.allclose(M @ M, np.eye(5 * L), atol=1e-15)
    assert np.allclose(M, M.T, atol=1e-15)


def test_detangle_dimension_mismatch():
    with pytest.raises(ValueError, match="ladder matrix"):
        detangle(np.zeros((10, 10)), 3)
