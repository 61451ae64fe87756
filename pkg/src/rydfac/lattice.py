"""Real-space tweezer lattices and their synthetic Hilbert-space counterparts.

Under facilitation conditions the accessible many-body states (single
excitations plus nearest-neighbor pairs) organize into a tight-binding
problem on a *synthetic lattice*: one vertex per atom ("one-excitation"
site) plus one vertex at each bond midpoint ("pair" site), with hopping
amplitude equal to the Rabi frequency between a pair site and its two
endpoints.  All lengths are measured in units of the trap spacing ``R0``
and all energies in units of the Rabi frequency, so the clean hopping
amplitude is exactly 1.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "RealLattice",
    "SyntheticLattice",
    "build_real_lattice",
    "synthesize",
    "finite_hamiltonian",
    "ladder_hamiltonian",
    "LATTICE_KINDS",
]

LATTICE_KINDS = ("chain", "ladder", "square", "triangular", "honeycomb", "custom")

_DIST_TOL = 1e-12


@dataclass(frozen=True)
class RealLattice:
    """Periodic tweezer geometry with unit nearest-neighbor spacing.

    Parameters
    ----------
    kind : str
        One of :data:`LATTICE_KINDS`.
    primitive_vectors : (dim, D) ndarray
        Primitive translations, in units of R0.  ``dim`` counts periodic
        directions; ``D`` is the ambient dimension (1 or 2).  For the
        ladder ``dim=1, D=2``.
    basis : (n_basis, D) ndarray
        Atom offsets within one unit cell.
    nn_links : tuple of (int, int, tuple)
        Bonds ``(basis_i, basis_j, cell_offset)``: atom ``i`` in the home
        cell bonds to atom ``j`` in the cell displaced by ``cell_offset``
        (integers).  Each physical bond is stored once, in a canonical
        orientation.
    """

    kind: str
    primitive_vectors: np.ndarray
    basis: np.ndarray
    nn_links: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "primitive_vectors",
                           np.atleast_2d(np.asarray(self.primitive_vectors, dtype=float)))
        object.__setattr__(self, "basis",
                           np.atleast_2d(np.asarray(self.basis, dtype=float)))
        object.__setattr__(self, "nn_links",
                           tuple((int(i), int(j), tuple(int(z) for z in off))
                                 for i, j, off in self.nn_links))
        self.validate()

    @property
    def dim(self) -> int:
        return self.primitive_vectors.shape[0]

    @property
    def ambient_dim(self) -> int:
        return self.primitive_vectors.shape[1]

    @property
    def n_basis(self) -> int:
        return self.basis.shape[0]

    def bond_vector(self, link) -> np.ndarray:
        """Real-space vector from the first to the second atom of a bond."""
        i, j, off = link
        return (self.basis[j] + np.asarray(off, dtype=float) @ self.primitive_vectors
                - self.basis[i])

    def validate(self):
        if self.dim not in (1, 2):
            raise ValueError(f"lattice dim must be 1 or 2, got {self.dim}")
        if np.linalg.matrix_rank(self.primitive_vectors) != self.dim:
            raise ValueError("primitive vectors are linearly dependent")
        seen = set()
        for link in self.nn_links:
            i, j, off = link
            if not (0 <= i < self.n_basis and 0 <= j < self.n_basis):
                raise ValueError(f"link {link} references missing basis atom")
            d = np.linalg.norm(self.bond_vector(link))
            if abs(d - 1.0) > _DIST_TOL:
                raise ValueError(f"link {link} has length {d!r}, expected 1 (= R0)")
            rev = (j, i, tuple(-z for z in off))
            if rev in seen:
                raise ValueError(f"link {link} duplicates {rev} under bond reversal")
            if link in seen:
                raise ValueError(f"duplicate link {link}")
            seen.add(link)

    def reciprocal_vectors(self) -> np.ndarray:
        """Rows ``a*_i`` with ``a*_i . a_j = 2 pi delta_ij`` (in the lattice plane)."""
        A = self.primitive_vectors
        return 2.0 * np.pi * np.linalg.inv(A @ A.T) @ A

    def finite_sites(self, L: int):
        """Explicit open-boundary realization with ``L`` cells per periodic direction.

        Returns ``(positions, bonds)`` where ``positions`` is an
        ``(n_sites, D)`` array of trap centers and ``bonds`` a list of
        ``(site_a, site_b)`` index pairs (only bonds with both endpoints
        inside the sample are kept).
        """
        if L < 2:
            raise ValueError("finite lattices need L >= 2")
        cells = list(itertools.product(range(L), repeat=self.dim))
        index = {(c, b): n for n, (c, b) in
                 enumerate(itertools.product(cells, range(self.n_basis)))}
        positions = np.array([
            self.basis[b] + np.asarray(c, dtype=float) @ self.primitive_vectors
            for c, b in itertools.product(cells, range(self.n_basis))
        ])
        bonds = []
        for c in cells:
            for i, j, off in self.nn_links:
                c2 = tuple(ci + oi for ci, oi in zip(c, off))
                if all(0 <= x < L for x in c2):
                    bonds.append((index[(c, i)], index[(c2, j)]))
        return positions, bonds

    def to_json(self) -> str:
        return json.dumps({
            "kind": self.kind,
            "primitive_vectors": self.primitive_vectors.tolist(),
            "basis": self.basis.tolist(),
            "nn_links": [[i, j, list(off)] for i, j, off in self.nn_links],
        }, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "RealLattice":
        doc = json.loads(text)
        return cls(kind=doc["kind"],
                   primitive_vectors=np.array(doc["primitive_vectors"]),
                   basis=np.array(doc["basis"]),
                   nn_links=tuple((i, j, tuple(off)) for i, j, off in doc["nn_links"]))


@dataclass(frozen=True)
class SyntheticLattice:
    """Hilbert-space lattice: one-excitation sites plus bond-midpoint pair sites.

    ``hop_links`` connect pair sites to one-excitation sites only; every
    pair site carries exactly two links (to the two atoms of its bond).
    ``species`` fixes the canonical ordering used for Bloch and finite
    matrices; each entry is ``("one", i)`` or ``("pair", i)``.
    """

    real: RealLattice
    one_exc_sites: np.ndarray
    pair_sites: np.ndarray
    hop_links: tuple      # (pair_index, one_exc_index, cell_offset)
    species: tuple        # canonical ordering of the n1 + n2 basis sites
    hop_amplitude: float = 1.0

    def __post_init__(self):
        self.validate()

    @property
    def dim(self) -> int:
        return self.real.dim

    @property
    def primitive_vectors(self) -> np.ndarray:
        return self.real.primitive_vectors

    @property
    def n_one(self) -> int:
        return self.one_exc_sites.shape[0]

    @property
    def n_pair(self) -> int:
        return self.pair_sites.shape[0]

    @property
    def n_species(self) -> int:
        return self.n_one + self.n_pair

    def species_index(self, kind: str, i: int) -> int:
        return self.species.index((kind, i))

    def validate(self):
        counts = np.zeros(self.n_pair, dtype=int)
        for p, m, off in self.hop_links:
            counts[p] += 1
            if not 0 <= m < self.n_one:
                raise ValueError("hop link references missing one-excitation site")
        if self.n_pair and not np.all(counts == 2):
            raise ValueError("every pair site must have exactly 2 hop links")
        expected = {("one", i) for i in range(self.n_one)} | \
                   {("pair", i) for i in range(self.n_pair)}
        if set(self.species) != expected or len(self.species) != len(expected):
            raise ValueError("species ordering must enumerate all sites once")

    def link_vectors(self):
        """Per link: (pair_index, one_exc_index, cell_offset, arrival lattice vector)."""
        out = []
        for p, m, off in self.hop_links:
            j = np.asarray(off, dtype=float) @ self.primitive_vectors
            out.append((p, m, off, j))
        return out


def _lattice_2d_vectors():
    a1 = np.array([1.0, 0.0])
    a2 = np.array([np.cos(np.pi / 3), np.sin(np.pi / 3)])
    return a1, a2


def build_real_lattice(kind: str, **parameters) -> RealLattice:
    """Construct one of the supported tweezer geometries.

    ``custom`` expects explicit ``primitive_vectors``, ``basis`` and
    ``nn_links`` keyword arguments; the named kinds take no parameters.
    Bond lengths are always 1 (the facilitation distance), which for the
    honeycomb geometry makes the primitive vectors sqrt(3) long.
    """
    if kind == "chain":
        return RealLattice(kind, [[1.0]], [[0.0]], (((0, 0, (1,))),))
    if kind == "ladder":
        return RealLattice(
            kind,
            [[1.0, 0.0]],
            [[0.0, 0.0], [0.0, -1.0]],       # upper leg, lower leg
            ((0, 0, (1,)), (1, 1, (1,)), (0, 1, (0,))),   # A, B, E bond order
        )
    a1, a2 = _lattice_2d_vectors()
    if kind == "square":
        return RealLattice(kind, [[1.0, 0.0], [0.0, 1.0]], [[0.0, 0.0]],
                           ((0, 0, (1, 0)), (0, 0, (0, 1))))
    if kind == "triangular":
        return RealLattice(kind, [a1, a2], [[0.0, 0.0]],
                           ((0, 0, (1, 0)), (0, 0, (0, 1)), (0, 0, (1, -1))))
    if kind == "honeycomb":
        s3 = np.sqrt(3.0)
        b2 = (2 * a2 - a1) * s3 / 3.0
        return RealLattice(kind, [s3 * a1, s3 * a2], [[0.0, 0.0], b2],
                           ((0, 1, (0, 0)), (0, 1, (1, -1)), (0, 1, (0, -1))))
    if kind == "custom":
        return RealLattice("custom",
                           parameters["primitive_vectors"],
                           parameters["basis"],
                           tuple(parameters["nn_links"]))
    raise ValueError(f"unknown lattice kind {kind!r}; supported: {LATTICE_KINDS}")


def synthesize(real: RealLattice) -> SyntheticLattice:
    """Build the synthetic Hilbert-space lattice of a real geometry.

    One-excitation sites sit on the atoms, pair sites at bond midpoints,
    and each pair site hops to the two atoms of its bond.  ``n1`` equals
    the basis size and ``n2`` the number of bonds per cell.

    The canonical species ordering is one-excitation sites first, then
    pair sites in bond order, except for the ladder where the
    conventional (pair-leg, pair-leg, one, one, pair-rung) ordering is
    used so finite matrices take the standard 5L x 5L block form.
    """
    real.validate()
    pair_sites = []
    hop_links = []
    for n, link in enumerate(real.nn_links):
        i, j, off = link
        midpoint = real.basis[i] + 0.5 * real.bond_vector(link)
        pair_sites.append(midpoint)
        hop_links.append((n, i, tuple(0 for _ in off)))
        hop_links.append((n, j, off))
    if real.kind == "ladder":
        species = (("pair", 0), ("pair", 1), ("one", 0), ("one", 1), ("pair", 2))
    else:
        species = tuple(("one", i) for i in range(real.n_basis)) + \
            tuple(("pair", n) for n in range(len(real.nn_links)))
    return SyntheticLattice(
        real=real,
        one_exc_sites=real.basis.copy(),
        pair_sites=np.array(pair_sites) if pair_sites else np.zeros((0, real.ambient_dim)),
        hop_links=tuple(hop_links),
        species=species,
    )


def _dangling_pair_cells(syn: SyntheticLattice, cells, L: int):
    """Pair sites whose bond exits the open-boundary sample."""
    dangling = set()
    by_pair = {}
    for p, m, off in syn.hop_links:
        by_pair.setdefault(p, []).append(off)
    for c in cells:
        for p, offs in by_pair.items():
            for off in offs:
                c2 = tuple(ci + oi for ci, oi in zip(c, off))
                if not all(0 <= x < L for x in c2):
                    dangling.add((p, c))
    return dangling


def finite_hamiltonian(syn: SyntheticLattice, L: int, shifts=None,
                       periodic: bool = False) -> np.ndarray:
    """Dense Hamiltonian of ``L`` cells per periodic direction.

    Basis ordering is species-major (canonical species order, cell index
    fast), so for the ladder the result is the standard 5L x 5L matrix in
    the basis {A_1..A_L, B_1..B_L, C.., D.., E_1..E_L}.  Open boundaries
    are imposed by zeroing the rows and columns of pair sites whose bond
    leaves the sample (for the ladder: A_L and B_L); ``periodic=True``
    wraps instead, for cross-checks against Bloch spectra.

    ``shifts`` maps on-site energies onto pair sites only: a dict
    ``{pair_index: array of length L**dim}`` or an ``(n_pair, L**dim)``
    array, in units of the Rabi frequency.  One-excitation sites are
    disorder-free.
    """
    if L < 2:
        raise ValueError("L must be >= 2")
    cells = list(itertools.product(range(L), repeat=syn.dim))
    ncells = len(cells)
    cell_index = {c: n for n, c in enumerate(cells)}
    nsites = syn.n_species * ncells
    H = np.zeros((nsites, nsites))

    def slot(kind, i, c):
        return syn.species_index(kind, i) * ncells + cell_index[c]

    for c in cells:
        for p, m, off in syn.hop_links:
            c2 = tuple(ci + oi for ci, oi in zip(c, off))
            if periodic:
                c2 = tuple(x % L for x in c2)
            elif not all(0 <= x < L for x in c2):
                continue
            a, b = slot("pair", p, c), slot("one", m, c2)
            H[a, b] += syn.hop_amplitude
            H[b, a] += syn.hop_amplitude

    if shifts is not None:
        if isinstance(shifts, dict):
            items = shifts.items()
        else:
            shifts = np.asarray(shifts, dtype=float)
            if shifts.shape != (syn.n_pair, ncells):
                raise ValueError(
                    f"shift array must have shape {(syn.n_pair, ncells)}, got {shifts.shape}")
            items = enumerate(shifts)
        for p, vals in items:
            vals = np.asarray(vals, dtype=float)
            if vals.shape != (ncells,):
                raise ValueError(f"shifts for pair site {p} must have length {ncells}")
            for c in cells:
                a = slot("pair", p, c)
                H[a, a] += vals[cell_index[c]]

    if not periodic:
        for p, c in _dangling_pair_cells(syn, cells, L):
            a = slot("pair", p, c)
            H[a, :] = 0.0
            H[:, a] = 0.0
    return H


def ladder_hamiltonian(L: int, delta_a=None, delta_b=None, delta_e=None,
                       delta_c=None, delta_d=None) -> np.ndarray:
    """5L x 5L ladder Hamiltonian with per-species on-site shifts.

    Species order {A, B, C, D, E}: A/B are the leg pair sites, C/D the
    one-excitation sites, E the rung pair sites.  Open boundaries zero
    the A_L and B_L slots (their shifts included).  ``delta_c``/``delta_d``
    exist for the uniform-disorder-on-all-sites mode; positional disorder
    leaves them at zero.
    """
    syn = synthesize(build_real_lattice("ladder"))
    H = finite_hamiltonian(syn, L)
    ncells = L

    def add(species_slot, vals, drop_last=False):
        if vals is None:
            return
        vals = np.asarray(vals, dtype=float)
        n = L - 1 if drop_last else L
        if vals.shape != (n,):
            raise ValueError(f"shift vector must have length {n}, got {vals.shape}")
        for c in range(n):
            a = species_slot * ncells + c
            H[a, a] += vals[c]

    add(0, delta_a, drop_last=True)   # A_L removed by OBC
    add(1, delta_b, drop_last=True)
    add(2, delta_c)
    add(3, delta_d)
    add(4, delta_e)
    return H


def one_exc_pair_permutation(syn: SyntheticLattice, L: int) -> np.ndarray:
    """Index permutation putting all one-excitation slots before pair slots."""
    ncells = L ** syn.dim
    one = [syn.species_index("one", i) * ncells + c
           for i in range(syn.n_one) for c in range(ncells)]
    pair = [syn.species_index("pair", p) * ncells + c
            for p in range(syn.n_pair) for c in range(ncells)]
    return np.array(one + pair)
