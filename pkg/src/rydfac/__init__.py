"""rydfac: synthetic lattices, flat bands and localization for facilitated
Rydberg tweezer arrays."""

from .lattice import (RealLattice, SyntheticLattice, build_real_lattice,
                      synthesize, finite_hamiltonian, ladder_hamiltonian)
from .bands import (BandStructure, BlochMatrix, analytic_bands, band_structure,
                    bloch_matrix, brillouin_cut, brillouin_grid,
                    count_flat_bands, detangle, detangling_transform)
from .disorder import (DisorderParams, DisorderRealization, TrapSigma,
                       energy_shifts, mean_distance_variance, pdf_distance,
                       pdf_energy_shift, sample_flat_disorder, sample_positions,
                       sample_realization, tail_probability, trap_sigma)
from .localization import (LyapunovResult, ScalingFit, TransferConfig,
                           clean_transfer_eigenvalues, fit_power_law,
                           flat_disorder_sweep, lyapunov_spectrum,
                           rung_transfer_matrix, scaling_exponent)
from .dynamics import (EvolutionRecord, LadderState, Observables, PulseSpec,
                       apply_pulse, build_full_hamiltonian,
                       compare_full_vs_effective, disordered_heff, dx_scan,
                       embed_synthetic, evolve, observables, prepare_psi_loc,
                       project_to_synthetic, psi_loc, six_pulse_sequence)

__version__ = "0.1.0"
