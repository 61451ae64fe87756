"""Acceptance suite: one test per criterion, each printing a pass line.

Run with ``pytest -v -s tests/test_acceptance.py``.  The heavy items
(scaling exponents, disorder-averaged dynamics, full-model comparison)
take a few minutes total; everything is seeded and deterministic.
"""

import time

import numpy as np
import pytest
from scipy import stats

from rydfac.bands import (analytic_bands, band_structure, bloch_matrix,
                          brillouin_grid, count_flat_bands, cross_block_norm,
                          detangle, honeycomb_vertex)
from rydfac.disorder import (DisorderParams, cdf_energy_shift,
                             mean_distance_variance, sample_bond_shift_values,
                             sample_chain_differences, tail_probability)
from rydfac.dynamics import (embed_synthetic, evolution_record, prepare_psi_loc,
                             psi_loc)
from rydfac.lattice import build_real_lattice, finite_hamiltonian, synthesize
from rydfac.presets import NU_TOL, SCALING_ENERGIES, run_preset

from preparation_lines import LINES, plaquette_state


def _report(criterion, detail):
    print(f"\n[criterion {criterion}] PASS: {detail}")


def test_criterion_1_flat_band_counts():
    t0 = time.perf_counter()
    expected = {"square": 1, "triangular": 2, "honeycomb": 1, "ladder": 1}
    counts = {}
    for kind, want in expected.items():
        syn = synthesize(build_real_lattice(kind))
        n = 32 if syn.dim == 2 else 1024        # 1024 k-points total
        bs = band_structure(syn, brillouin_grid(syn, n), flat_tol=1e-8)
        counts[kind] = count_flat_bands(bs)
        assert counts[kind] == want
    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0
    _report(1, f"flat-band counts {counts} in {elapsed:.2f} s")


def test_criterion_2_analytic_band_oracle():
    t0 = time.perf_counter()
    rng = np.random.default_rng(12)
    worst = 0.0
    for kind in ("triangular", "honeycomb"):
        syn = synthesize(build_real_lattice(kind))
        for k in rng.uniform(-6.0, 6.0, size=(1000, 2)):
            dev = np.max(np.abs(bloch_matrix(syn, k).eigenvalues()
                                - analytic_bands(kind, k)))
            worst = max(worst, dev)
            assert dev < 1e-10
    K = honeycomb_vertex()
    at_k = analytic_bands("honeycomb", K)
    assert abs(at_k[4] - at_k[3]) < 1e-12       # dispersive bands touch at K
    gamma = analytic_bands("honeycomb", np.zeros(2))
    assert abs(gamma[3]) < 1e-12                # lower dispersive touches 0
    assert gamma[4] == pytest.approx(np.sqrt(6.0), abs=1e-12)
    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0
    _report(2, f"worst analytic deviation {worst:.2e} over 2000 k in {elapsed:.2f} s")


def test_criterion_3_spectral_parity():
    worst = 0.0
    for kind in ("chain", "ladder", "square", "triangular", "honeycomb"):
        syn = synthesize(build_real_lattice(kind))
        n = 24 if syn.dim == 2 else 512
        b = band_structure(syn, brillouin_grid(syn, n)).bands
        worst = max(worst, np.max(np.abs(np.sort(-b, axis=1) - b)))
        for periodic in (False, True):
            L = 4 if syn.dim == 2 else 10
            ev = np.linalg.eigvalsh(finite_hamiltonian(syn, L, periodic=periodic))
            worst = max(worst, np.max(np.abs(ev + ev[::-1])))
    assert worst < 1e-10
    _report(3, f"max parity violation {worst:.2e} across all clean spectra")


def test_criterion_4_lieb_ladder_structure():
    t0 = time.perf_counter()
    syn = synthesize(build_real_lattice("ladder"))
    L = 24
    H = finite_hamiltonian(syn, L)
    _, Hd = detangle(H, L)
    cross = cross_block_norm(Hd, L)
    assert cross < 1e-12
    ks = np.zeros((8193, 2))
    ks[:, 0] = np.linspace(-np.pi, np.pi, 8193)
    b = band_structure(syn, ks).bands
    for value, target in ((b[:, 3].max(), 2.0),
                          (b[:, 4].min(), np.sqrt(2.0)),
                          (b[:, 4].max(), np.sqrt(6.0)),
                          (b[:, 1].min(), -2.0),
                          (b[:, 0].max(), -np.sqrt(2.0)),
                          (b[:, 0].min(), -np.sqrt(6.0))):
        assert value == pytest.approx(target, abs=1e-9)
    residual = float(np.max(np.abs(H @ psi_loc(L, L // 2).amplitudes)))
    assert residual < 1e-12
    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0
    _report(4, f"cross-block {cross:.1e}, extrema at ±sqrt2, ±2, ±sqrt6, "
               f"H@psi_loc residual {residual:.1e} in {elapsed:.2f} s")


def test_criterion_5_disorder_statistics():
    t0 = time.perf_counter()
    # (a) difference-vector covariance over 1e5 chain samples
    L, s, n = 8, 0.05, 100_000
    d = sample_chain_differences(L, s, n, seed=104)
    expected = s * s * (2 * np.eye(L - 1) - np.eye(L - 1, k=1)
                        - np.eye(L - 1, k=-1))
    worst_z = 0.0
    for comp in range(3):
        z = d[:, :, comp] - d[:, :, comp].mean(axis=0)
        emp = z.T @ z / (n - 1)
        stderr = np.sqrt((np.outer(np.diag(emp), np.diag(emp)) + emp**2) / n)
        worst_z = max(worst_z, np.max(np.abs(emp - expected) / stderr))
    assert worst_z < 3.0

    # (b) variance of the mean bond length: 2 sigma^2 / L^2
    theory, mc, stderr = mean_distance_variance(10, 0.01, n_samples=100_000,
                                                seed=105)
    assert theory == pytest.approx(2e-6)
    assert abs(mc - theory) < 3 * stderr

    # (c) sampled bond shifts vs the closed-form density, KS at the 1% level
    params = DisorderParams(s=0.05, alpha=3, v0_over_omega=300.0)
    dv = sample_bond_shift_values(1_000_000, params, seed=106)
    ks = stats.kstest(dv, lambda v: cdf_energy_shift(v, 0.05, 3))
    assert ks.pvalue > 0.01

    # (d) tail weight at s = 0.3 by closed form and quadrature
    closed, quad, valid = tail_probability(0.3, 3)
    assert valid
    assert closed == pytest.approx(0.0013, rel=0.10)
    assert quad == pytest.approx(0.0013, rel=0.10)

    elapsed = time.perf_counter() - t0
    assert elapsed < 60.0
    _report(5, f"cov worst z={worst_z:.2f}, VarD dev={abs(mc - theory):.2e}, "
               f"KS p={ks.pvalue:.3f}, tails ({closed:.2e}, {quad:.2e}) "
               f"in {elapsed:.1f} s")


def test_criterion_6_scaling_exponents():
    t0 = time.perf_counter()
    data, checks = run_preset("tableS1", master_seed=0)
    failed = [c for c in checks if not c["passed"]]
    assert not failed, failed
    worst = max(abs(c["value"] - c["target"]) for c in checks)
    assert worst <= NU_TOL
    fits = data["fits"]
    assert set(fits) == {"positional", "flat_pair_only", "flat_all_sites"}
    assert {len(v) for v in fits.values()} == {len(SCALING_ENERGIES)}
    elapsed = time.perf_counter() - t0
    _report(6, f"all {len(checks)} exponents within ±{NU_TOL} "
               f"(worst dev {worst:.2f}) in {elapsed:.0f} s "
               f"({elapsed / 15:.1f} s per energy-column)")


def test_criterion_7_dynamics_non_monotonic():
    t0 = time.perf_counter()
    data, checks = run_preset("fig4", master_seed=0, realizations=100)
    failed = [c for c in checks if not c["passed"]]
    assert not failed, failed
    rows = data["rows"]
    late_t = max(r["t"] for r in rows)
    sel = sorted((r for r in rows if r["t"] == late_t), key=lambda r: r["s"])
    dx = np.array([r["dx_u"] for r in sel])
    assert 0 < int(dx.argmax()) < len(dx) - 1          # interior maximum
    gap = max(abs(r["dx_u"] - r["dx_l"])
              / np.hypot(r["dx_u_stderr"], r["dx_l_stderr"]) for r in rows)
    assert gap < 3.0
    L = 20
    clean = evolution_record(
        finite_hamiltonian(synthesize(build_real_lattice("ladder")), L),
        psi_loc(L, L // 2), [late_t])
    assert clean.dx_u[0] == pytest.approx(0.5, abs=1e-12)
    assert clean.dx_l[0] == pytest.approx(0.5, abs=1e-12)
    elapsed = time.perf_counter() - t0
    assert elapsed < 600.0
    _report(7, f"interior max at s={sel[int(dx.argmax())]['s']:.2e}, "
               f"leg gap {gap:.2f} stderr, clean dx=1/2 in {elapsed:.0f} s")


def test_criterion_8_effective_vs_full():
    t0 = time.perf_counter()
    data, checks = run_preset("fig5", master_seed=0, realizations=100)
    failed = [c for c in checks if not c["passed"]]
    assert not failed, failed
    ratio = data["gap20"] / data["gap200"]
    assert ratio >= 3.0
    elapsed = time.perf_counter() - t0
    assert elapsed < 600.0
    _report(8, f"discrepancy(V0=20)/discrepancy(V0=200) = {ratio:.1f} "
               f"(gaps {data['gap20']:.3f}/{data['gap200']:.4f}) in {elapsed:.0f} s")


def test_criterion_9_preparation():
    state, inter = prepare_psi_loc(2, 1, mode="ideal_gate",
                                   return_intermediates=True)
    target = embed_synthetic(psi_loc(2, 1))
    fidelity = abs(np.vdot(target.amplitudes, state.amplitudes)) ** 2
    assert fidelity == pytest.approx(1.0, abs=1e-12)
    overlaps = []
    for st, line in zip(inter, LINES):
        ov = abs(np.vdot(plaquette_state(line), st.amplitudes))
        overlaps.append(ov)
        assert ov == pytest.approx(1.0, abs=1e-12)
    _report(9, f"six-pulse fidelity {fidelity:.15f}, "
               f"all {len(overlaps)} intermediate lines reproduced")
