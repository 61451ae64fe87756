"""Bloch matrices, band structures, flat-band counting and ladder detangling.

The synthetic-lattice Hamiltonian only connects one-excitation sites to
pair sites, so every Bloch matrix is block-antidiagonal,

    M_k = [[0, C(k)], [C(k)^dag, 0]],

with ``C`` an n1 x n2 matrix whose column ``n`` collects the two phase
factors ``exp(i k . j)`` of the hops out of pair site ``n`` (``j`` the
lattice vector of the arrival cell).  The kernel of ``M_k`` has dimension
at least ``|n1 - n2|`` for every ``k``, which is the flat-band bound.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .lattice import RealLattice, SyntheticLattice, build_real_lattice

__all__ = [
    "BlochMatrix",
    "BandStructure",
    "bloch_matrix",
    "band_structure",
    "count_flat_bands",
    "analytic_bands",
    "brillouin_grid",
    "brillouin_cut",
    "honeycomb_vertex",
    "detangling_transform",
    "detangle",
    "MOMENTUM_SCALE_DISPLAY",
]

FLAT_TOL_DEFAULT = 1e-8
DEFAULT_KPOINTS_PER_DIM = 1024

# Display-only momentum rescaling of the standard band-structure cuts
# (square, triangular, honeycomb); it never enters any computation.
MOMENTUM_SCALE_DISPLAY = {"square": 1.0, "triangular": 4.0 / 3.0,
                          "honeycomb": 4.0 / 3.0, "ladder": 1.0, "chain": 1.0}


@dataclass(frozen=True)
class BlochMatrix:
    """Bloch matrix at quasimomentum ``k`` in the (one-exc | pair) basis."""

    k: np.ndarray
    ctilde: np.ndarray    # (n1, n2) complex

    @property
    def size(self) -> int:
        return self.ctilde.shape[0] + self.ctilde.shape[1]

    @property
    def matrix(self) -> np.ndarray:
        n1, n2 = self.ctilde.shape
        m = np.zeros((n1 + n2, n1 + n2), dtype=complex)
        m[:n1, n1:] = self.ctilde
        m[n1:, :n1] = self.ctilde.conj().T
        return m

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


@dataclass(frozen=True)
class BandStructure:
    """Sorted eigenvalues over a quasimomentum grid (units of the Rabi frequency)."""

    k_grid: np.ndarray    # (nk, D)
    bands: np.ndarray     # (nk, n1+n2), ascending per k
    flat_tol: float = FLAT_TOL_DEFAULT
    metadata: dict = field(default_factory=dict)

    @property
    def n_bands(self) -> int:
        return self.bands.shape[1]

    @property
    def flat_flags(self) -> np.ndarray:
        return self.bands.max(axis=0) - self.bands.min(axis=0) < self.flat_tol


def _link_phases(syn: SyntheticLattice):
    """Static link data for Bloch assembly: rows, cols, arrival vectors."""
    rows, cols, vecs = [], [], []
    for p, m, off, j in syn.link_vectors():
        rows.append(m)
        cols.append(p)
        vecs.append(j)
    return np.array(rows), np.array(cols), np.array(vecs)


def bloch_matrix(syn: SyntheticLattice, k) -> BlochMatrix:
    """Assemble the Bloch matrix at a single quasimomentum ``k`` (ambient coords)."""
    k = np.asarray(k, dtype=float)
    rows, cols, vecs = _link_phases(syn)
    c = np.zeros((syn.n_one, syn.n_pair), dtype=complex)
    phases = np.exp(1j * vecs @ k)
    np.add.at(c, (rows, cols), phases)
    return BlochMatrix(k=k, ctilde=c)


def _batched_bands(syn: SyntheticLattice, k_grid: np.ndarray,
                   chunk: int = 65536) -> np.ndarray:
    rows, cols, vecs = _link_phases(syn)
    n1, n2 = syn.n_one, syn.n_pair
    nb = n1 + n2
    out = np.empty((k_grid.shape[0], nb))
    for start in range(0, k_grid.shape[0], chunk):
        ks = k_grid[start:start + chunk]
        phases = np.exp(1j * ks @ vecs.T)          # (nk, nlinks)
        c = np.zeros((ks.shape[0], n1, n2), dtype=complex)
        np.add.at(c, (slice(None), rows, cols), phases)
        m = np.zeros((ks.shape[0], nb, nb), dtype=complex)
        m[:, :n1, n1:] = c
        m[:, n1:, :n1] = np.conjugate(np.swapaxes(c, 1, 2))
        out[start:start + chunk] = np.linalg.eigvalsh(m)
    return out


def brillouin_grid(syn: SyntheticLattice, n_per_dim: int = DEFAULT_KPOINTS_PER_DIM):
    """Uniform grid over the reciprocal parallelepiped cell (band extrema
    and flat-band counts do not depend on the cell shape)."""
    astar = syn.real.reciprocal_vectors()
    fracs = [np.linspace(-0.5, 0.5, n_per_dim, endpoint=False)] * syn.dim
    mesh = np.meshgrid(*fracs, indexing="ij")
    f = np.stack([m.ravel() for m in mesh], axis=-1)
    return f @ astar


def brillouin_cut(syn: SyntheticLattice, n: int = 512) -> np.ndarray:
    """Symmetric cut at ``k_y = 0`` spanning the first zone (inclusive endpoints)."""
    kind = syn.real.kind
    scale = np.linalg.norm(syn.real.primitive_vectors[0])
    kmax = np.pi * MOMENTUM_SCALE_DISPLAY.get(kind, 1.0) / scale
    kx = np.linspace(-kmax, kmax, n)
    k = np.zeros((n, syn.real.ambient_dim))
    k[:, 0] = kx
    return k


def band_structure(syn: SyntheticLattice, k_grid,
                   flat_tol: float = FLAT_TOL_DEFAULT) -> BandStructure:
    """Diagonalize the Bloch matrix on ``k_grid`` ((nk, D) array)."""
    k_grid = np.atleast_2d(np.asarray(k_grid, dtype=float))
    if k_grid.size == 0:
        raise ValueError("k_grid must be nonempty")
    bands = _batched_bands(syn, k_grid)
    meta = {"kind": syn.real.kind,
            "momentum_scale_display": MOMENTUM_SCALE_DISPLAY.get(syn.real.kind)}
    return BandStructure(k_grid=k_grid, bands=bands, flat_tol=flat_tol, metadata=meta)


def count_flat_bands(bs: BandStructure, flat_tol: float | None = None) -> int:
    """Number of bands whose spread over the grid is below ``flat_tol``."""
    tol = bs.flat_tol if flat_tol is None else flat_tol
    if tol <= 0:
        raise ValueError("flat_tol must be positive")
    return int(np.sum(bs.bands.max(axis=0) - bs.bands.min(axis=0) < tol))


def analytic_bands(kind: str, k) -> np.ndarray:
    """Closed-form synthetic-lattice eigenvalues (triangular, honeycomb).

    Serves as an independent oracle for :func:`bloch_matrix`; ``k`` is in
    the same ambient coordinates.
    """
    k = np.asarray(k, dtype=float)
    real = build_real_lattice(kind)
    a1, a2 = real.primitive_vectors
    if kind == "triangular":
        lam = 2.0 * (3.0 + np.cos(k @ a1) + np.cos(k @ a2) + np.cos(k @ (a1 - a2)))
        root = np.sqrt(max(lam, 0.0))
        return np.sort([-root, 0.0, 0.0, root])
    if kind == "honeycomb":
        h = abs(1.0 + np.exp(1j * k @ (a1 - a2)) + np.exp(-1j * k @ a2))
        lp, lm = 3.0 + h, max(3.0 - h, 0.0)
        return np.sort([-np.sqrt(lp), -np.sqrt(lm), 0.0, np.sqrt(lm), np.sqrt(lp)])
    raise ValueError(f"no closed-form bands for kind {kind!r}")


def honeycomb_vertex(real: RealLattice | None = None) -> np.ndarray:
    """A vertex of the hexagonal first zone, where the dispersive bands touch."""
    if real is None:
        real = build_real_lattice("honeycomb")
    astar = real.reciprocal_vectors()
    return (astar[1] - astar[0]) / 3.0


# ---------------------------------------------------------------------------
# Ladder detangling


def detangling_transform(L: int, reorder: bool = True) -> np.ndarray:
    """Orthogonal change of basis decoupling the clean ladder.

    Mixes the leg pair sites into (A_n +/- B_n)/sqrt(2) and the
    one-excitation sites into (C_n +/- D_n)/sqrt(2); rung sites are left
    alone.  With ``reorder=False`` the Hadamard pairing acts in place (the
    matrix is symmetric and squares to the identity); with ``reorder=True``
    columns are permuted so the minus combinations (the decoupled chain)
    come first, then the plus combinations and rung sites (the stub
    lattice).
    """
    n = 5 * L
    U = np.zeros((n, n))
    r = 1.0 / np.sqrt(2.0)
    for cell in range(L):
        A, B = cell, L + cell
        C, D = 2 * L + cell, 3 * L + cell
        E = 4 * L + cell
        U[A, A] = U[B, A] = r          # column A -> (A+B)/sqrt(2)
        U[A, B], U[B, B] = r, -r       # column B -> (A-B)/sqrt(2)
        U[C, C] = U[D, C] = r
        U[C, D], U[D, D] = r, -r
        U[E, E] = 1.0
    if not reorder:
        return U
    minus_first = np.concatenate([
        np.arange(L, 2 * L),           # X^- (stored in B columns)
        np.arange(3 * L, 4 * L),       # Y^- (stored in D columns)
        np.arange(0, L),               # X^+
        np.arange(2 * L, 3 * L),       # Y^+
        np.arange(4 * L, 5 * L),       # E
    ])
    return U[:, minus_first]


def detangle(H: np.ndarray, L: int):
    """Apply the detangling transform to a 5L x 5L ladder Hamiltonian.

    Returns ``(U, H_detangled)`` with ``H_detangled = U.T @ H @ U``; for
    the clean ladder the result is block diagonal, a 2L chain block
    followed by a 3L stub block whose vertical hop is amplified by
    sqrt(2).  Disorder on the leg pair sites couples the two blocks.
    """
    H = np.asarray(H, dtype=float)
    if H.shape != (5 * L, 5 * L):
        raise ValueError(f"expected a {(5 * L, 5 * L)} ladder matrix, got {H.shape}")
    U = detangling_transform(L)
    return U, U.T @ H @ U


def cross_block_norm(H_detangled: np.ndarray, L: int) -> float:
    """Frobenius norm of the chain-stub coupling after detangling."""
    return float(np.linalg.norm(H_detangled[:2 * L, 2 * L:]))
