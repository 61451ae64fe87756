"""Command-line front end: deterministic sweeps, CSV/JSON artifacts, figures.

Every run writes its data tables (17-significant-digit CSV, or JSON with
``--format json``), exactly one ``manifest.json`` recording the resolved
configuration and all derived seeds, and quick-look PNG figures (disable
with ``--no-plot``).  Runs are reproducible bit-for-bit at any worker
count: each sweep cell derives its generator from
``(master_seed, subcommand, cell_index)`` and results are assembled in
cell order.

Exit codes: 0 success, 2 invalid configuration, 3 numerical failure
budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import multiprocessing
import os
import sys
import time

import numpy as np
from scipy import stats

from . import __version__
from . import bands as bands_mod
from . import disorder as dis
from . import dynamics as dyn
from . import presets as presets_mod
from . import report
from .lattice import RealLattice, build_real_lattice, synthesize
from .localization import (ScalingFit, TransferConfig, TransferUnderflowError,
                           fit_power_law, lyapunov_spectrum)
from .seeding import derive_run_seed

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

OUTPUT_DIR_ENV = "RYDFAC_OUTPUT_DIR"


# ---------------------------------------------------------------------------
# Small utilities


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def write_table(path_base: str, header, rows, fmt: str = "csv") -> str:
    """Delimited table: CSV with 17 significant digits, or a JSON records list."""
    if fmt == "json":
        path = path_base + ".json"
        records = [dict(zip(header, row)) for row in rows]
        with open(path, "w") as f:
            json.dump(records, f, indent=1, default=float)
            f.write("\n")
        return path
    path = path_base + ".csv"
    with open(path, "w", newline="") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(_fmt(v) for v in row) + "\n")
    return path


def write_json(path: str, payload) -> str:
    with open(path, "w") as f:
        json.dump(payload, f, indent=1, default=float)
        f.write("\n")
    return path


def parse_grid(spec: str) -> np.ndarray:
    """Grid spec: 'log:lo:hi:n', 'lin:lo:hi:n' or a comma list of values."""
    if spec.startswith(("log:", "lin:")):
        kind, lo, hi, n = spec.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
        return np.geomspace(lo, hi, n) if kind == "log" else np.linspace(lo, hi, n)
    return np.array([float(v) for v in spec.split(",")])


def parse_floats(spec: str) -> list:
    return [float(v) for v in str(spec).split(",")]


def parallel_map(fn, items, workers: int):
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with multiprocessing.Pool(min(workers, len(items))) as pool:
        return pool.map(fn, items)


class Manifest:
    """Collects the data every run must be reproducible from."""

    def __init__(self, subcommand: str, config: dict):
        self.t0 = time.time()
        self.doc = {
            "tool": "rydfac",
            "version": __version__,
            "subcommand": subcommand,
            "config": config,
            "seed_derivations": [],
            "runs": [],
            "outputs": [],
        }

    def seed(self, label: str, index: int, seed: int):
        self.doc["seed_derivations"].append(
            {"label": label, "index": index, "seed": int(seed)})

    def run_status(self, **kw):
        self.doc["runs"].append(kw)

    def output(self, path: str):
        if path:
            self.doc["outputs"].append(os.path.basename(path))

    def write(self, outdir: str) -> str:
        self.doc["wall_clock_s"] = time.time() - self.t0
        return write_json(os.path.join(outdir, "manifest.json"), self.doc)


def _lattice_from_args(args) -> RealLattice:
    if args.lattice == "custom":
        if not args.lattice_file:
            raise ValueError("custom lattices need --lattice-file")
        with open(args.lattice_file) as f:
            return RealLattice.from_json(f.read())
    return build_real_lattice(args.lattice)


# ---------------------------------------------------------------------------
# Subcommand implementations (each returns a list of artifact paths)


def cmd_bands(args, outdir, manifest):
    real = _lattice_from_args(args)
    syn = synthesize(real)
    cut = bands_mod.brillouin_cut(syn, args.kpoints)
    bs_cut = bands_mod.band_structure(syn, cut, flat_tol=args.flat_tol)
    grid = bands_mod.brillouin_grid(syn, args.grid_points)
    bs = bands_mod.band_structure(syn, grid, flat_tol=args.flat_tol)
    nflat = bands_mod.count_flat_bands(bs)

    ncomp = cut.shape[1]
    header = [f"k{i + 1} (1/R0)" for i in range(ncomp)] + \
        [f"eps{i + 1} (Omega)" for i in range(bs_cut.n_bands)]
    rows = [list(k) + list(b) for k, b in zip(cut, bs_cut.bands)]
    paths = [write_table(os.path.join(outdir, "bands"), header, rows, args.format)]
    paths.append(write_json(os.path.join(outdir, "bands_summary.json"), {
        "kind": real.kind,
        "n_one_excitation": syn.n_one,
        "n_pair": syn.n_pair,
        "flat_band_count": nflat,
        "flat_flags": [bool(b) for b in bs.flat_flags],
        "flat_tol": args.flat_tol,
        "momentum_scale_display": bs.metadata["momentum_scale_display"],
        "grid_points_per_dim": args.grid_points,
    }))
    manifest.run_status(kind=real.kind, flat_band_count=nflat)
    if args.plot:
        paths.append(report.render_bands(cut[:, 0], bs_cut.bands, real.kind, outdir,
                                         flat_flags=bs.flat_flags))
    return paths


def cmd_disorder(args, outdir, manifest):
    seed = derive_run_seed(args.master_seed, "disorder", 0)
    manifest.seed("disorder", 0, seed)
    params = dis.DisorderParams(s=args.s, alpha=args.alpha,
                                v0_over_omega=args.v0_over_omega)
    dv = dis.sample_bond_shift_values(args.samples, params, seed)
    lo, hi = np.quantile(dv, [1e-4, 1 - 1e-4])
    density, edges = np.histogram(dv, bins=args.bins, range=(lo, hi), density=True)
    centers = 0.5 * (edges[1:] + edges[:-1])
    analytic = dis.pdf_energy_shift(centers, args.s, args.alpha)
    ks = stats.kstest(dv, lambda v: dis.cdf_energy_shift(v, args.s, args.alpha))
    closed, quadrature, valid = dis.tail_probability(args.s, args.alpha)

    rows = list(zip(centers, density, analytic))
    paths = [write_table(os.path.join(outdir, "disorder_histogram"),
                         ["delta_v (V0)", "empirical_density", "analytic_density"],
                         rows, args.format)]
    paths.append(write_json(os.path.join(outdir, "disorder_summary.json"), {
        "s": args.s, "alpha": args.alpha, "samples": args.samples,
        "ks_statistic": float(ks.statistic), "ks_pvalue": float(ks.pvalue),
        "tail_probability_closed_form": closed,
        "tail_probability_quadrature": quadrature,
        "tail_estimate_valid": valid,
        "seed": seed,
    }))
    manifest.run_status(ks_statistic=float(ks.statistic), samples=args.samples)
    if args.plot:
        paths.append(report.render_disorder_histogram(
            centers, density, analytic, args.s, args.alpha, outdir))
    return paths


def _localization_cells(args):
    energies = parse_floats(args.energy)
    if args.mode == "positional":
        grid = parse_grid(args.s_grid)
    else:
        grid = parse_grid(args.w_grid)
    cells = []
    for eps in energies:
        for g in grid:
            cells.append((eps, float(g)))
    return energies, grid, cells


def _lyapunov_cell(cfg: TransferConfig):
    return lyapunov_spectrum(cfg)


def _run_localization(args, manifest):
    energies, grid, cells = _localization_cells(args)
    configs = []
    for i, (eps, g) in enumerate(cells):
        seed = derive_run_seed(args.master_seed, "localization", i)
        manifest.seed("localization", i, seed)
        if args.mode == "positional":
            params = dis.DisorderParams(s=g, alpha=args.alpha,
                                        v0_over_omega=args.v0_over_omega)
        else:
            params = dis.DisorderParams(mode=args.mode, W=g)
        configs.append(TransferConfig(energy=eps, params=params,
                                      n_steps=args.steps, qr_period=args.qr_period,
                                      seed=seed))
    results = parallel_map(_lyapunov_cell, configs, args.workers)
    for (eps, g), res in zip(cells, results):
        manifest.run_status(energy=eps, disorder=g, resamples=res.resamples)
    return energies, grid, cells, results


def _localization_rows(cells, results):
    rows = []
    for (eps, g), res in zip(cells, results):
        rows.append({"energy": eps, "disorder": g, "xi1": res.xi1, "xi2": res.xi2,
                     "xi1_stderr": res.xi1_stderr, "xi2_stderr": res.xi2_stderr,
                     "seed": res.seed, "n_steps": res.n_steps,
                     "resamples": res.resamples})
    return rows


LOC_HEADER = ["energy (Omega)", "disorder (s or W)", "xi1 (cells)", "xi2 (cells)",
              "xi1_stderr (cells)", "xi2_stderr (cells)", "seed", "n_steps",
              "resamples"]


def _write_localization_table(rows, outdir, fmt):
    keys = ("energy", "disorder", "xi1", "xi2", "xi1_stderr", "xi2_stderr",
            "seed", "n_steps", "resamples")
    return write_table(os.path.join(outdir, "localization"), LOC_HEADER,
                       [[r[k] for k in keys] for r in rows], fmt)


def cmd_localization(args, outdir, manifest):
    energies, grid, cells, results = _run_localization(args, manifest)
    rows = _localization_rows(cells, results)
    paths = [_write_localization_table(rows, outdir, args.format)]
    if args.plot:
        paths.append(report.render_localization(rows, outdir))
    return paths


def cmd_scaling(args, outdir, manifest):
    energies, grid, cells, results = _run_localization(args, manifest)
    rows = _localization_rows(cells, results)
    paths = [_write_localization_table(rows, outdir, args.format)]
    fit_rows = []
    fits = []
    for eps in energies:
        sel = [res for (e, _), res in zip(cells, results) if e == eps]
        xi1 = np.array([r.xi1 for r in sel])
        xi2 = np.array([r.xi2 for r in sel])
        e1 = np.array([r.xi1_stderr for r in sel])
        e2 = np.array([r.xi2_stderr for r in sel])
        nu1, s1, w1, r1 = fit_power_law(grid, xi1, e1)
        nu2, s2, w2, r2 = fit_power_law(grid, xi2, e2)
        fits.append(ScalingFit(energy=eps, grid=grid, xi1=xi1, xi2=xi2,
                               nu1=nu1, nu2=nu2, nu1_stderr=s1, nu2_stderr=s2,
                               window1=w1, window2=w2, residual1=r1, residual2=r2))
        fit_rows.append([eps, nu1, nu2, s1, s2, w1[0], w1[1], w2[0], w2[1], r1, r2])
    paths.append(write_table(
        os.path.join(outdir, "scaling"),
        ["energy (Omega)", "nu1", "nu2", "nu1_stderr", "nu2_stderr",
         "window1_lo", "window1_hi", "window2_lo", "window2_hi",
         "residual1", "residual2"],
        fit_rows, args.format))
    if args.plot:
        paths.append(report.render_scaling(fits, outdir))
    return paths


def cmd_dynamics(args, outdir, manifest):
    seed = derive_run_seed(args.master_seed, "dynamics", 0)
    manifest.seed("dynamics", 0, seed)
    s_grid = parse_grid(args.s_grid)
    times = parse_floats(args.times)
    v0s = parse_floats(args.v0_over_omega)
    rows, profiles = dyn.dx_scan(args.L, s_grid, v0s, times,
                                 realizations=args.realizations, seed=seed,
                                 rung=args.rung, alpha=args.alpha,
                                 collect_profiles=True)
    manifest.run_status(cells=len(rows), realizations=args.realizations,
                        resamples=sum(r["resamples"] for r in rows) // max(len(times), 1))
    keys = ["s", "v0_over_omega", "t", "dx_u", "dx_l", "dx_u_stderr",
            "dx_l_stderr", "realizations", "seed", "L"]
    paths = [write_table(os.path.join(outdir, "dx_summary"),
                         ["s", "v0_over_omega", "t (1/Omega)", "dx_u (rungs)",
                          "dx_l (rungs)", "dx_u_stderr", "dx_l_stderr",
                          "realizations", "seed", "L"],
                         [[r[k] for k in keys] for r in rows], args.format)]
    pkeys = ["s", "v0_over_omega", "t", "rung", "p_u", "p_l"]
    paths.append(write_table(os.path.join(outdir, "profiles"),
                             ["s", "v0_over_omega", "t (1/Omega)", "rung",
                              "p_u", "p_l"],
                             [[r[k] for k in pkeys] for r in profiles],
                             args.format))
    if args.plot:
        paths.append(report.render_dx_curves(rows, outdir))
    return paths


def cmd_prepare(args, outdir, manifest):
    state, inter = dyn.prepare_psi_loc(args.L, args.rung, mode=args.mode,
                                       omega_r=args.omega_r,
                                       v0_over_omega=args.v0_over_omega,
                                       return_intermediates=True)
    target = dyn.embed_synthetic(dyn.psi_loc(args.L, args.rung))
    rows = []
    for step, (st, spec) in enumerate(zip(inter, dyn.six_pulse_sequence(args.mode,
                                                                        args.omega_r))):
        _, leak = dyn.project_to_synthetic(st)
        fid = abs(np.vdot(target.amplitudes, st.amplitudes)) ** 2
        rows.append([step + 1, spec.regime, spec.site, spec.theta, fid, leak])
    fidelity = abs(np.vdot(target.amplitudes, state.amplitudes)) ** 2
    manifest.run_status(fidelity=float(fidelity))
    paths = [write_table(os.path.join(outdir, "preparation"),
                         ["pulse", "regime", "site", "theta (rad)",
                          "fidelity_to_target", "subspace_leakage"],
                         rows, args.format)]

    paths.append(write_json(os.path.join(outdir, "preparation_summary.json"), {
        "L": args.L, "rung": args.rung, "mode": args.mode,
        "omega_r": args.omega_r, "v0_over_omega": args.v0_over_omega,
        "final_fidelity": float(fidelity),
    }))
    return paths


def cmd_compare(args, outdir, manifest):
    s_grid = parse_grid(args.s_grid)
    v0s = parse_floats(args.v0_over_omega)
    t = 2 * np.pi * args.omega_t_over_2pi
    all_rows = []
    for j, v0 in enumerate(v0s):
        seed = derive_run_seed(args.master_seed, "compare", j)
        manifest.seed("compare", j, seed)
        all_rows += dyn.compare_full_vs_effective(
            args.L, s_grid, v0, t, realizations=args.realizations, seed=seed,
            alpha=args.alpha, distance_mode=args.distance_mode)
    keys = ["s", "v0_over_omega", "t", "dx_eff_u", "dx_eff_l", "dx_full_u",
            "dx_full_l", "discrepancy", "discrepancy_paired", "leakage",
            "realizations", "seed", "L"]
    paths = [write_table(os.path.join(outdir, "compare"),
                         ["s", "v0_over_omega", "t (1/Omega)", "dx_eff_u (rungs)",
                          "dx_eff_l (rungs)", "dx_full_u (rungs)",
                          "dx_full_l (rungs)", "discrepancy (rungs)",
                          "discrepancy_paired (rungs)", "leakage (norm)",
                          "realizations", "seed", "L"],
                         [[r[k] for k in keys] for r in all_rows], args.format)]
    manifest.run_status(resamples=sum(r["resamples"] for r in all_rows))
    summary = {}
    for v0 in v0s:
        sel = [r for r in all_rows if r["v0_over_omega"] == v0]
        summary[f"discrepancy_v0_{v0:g}"] = float(
            np.mean([r["discrepancy"] for r in sel]))
        summary[f"leakage_v0_{v0:g}"] = float(np.mean([r["leakage"] for r in sel]))
    if len(v0s) == 2:
        lo, hi = sorted(v0s)
        summary["discrepancy_ratio"] = (summary[f"discrepancy_v0_{lo:g}"]
                                        / summary[f"discrepancy_v0_{hi:g}"])
    manifest.run_status(**summary)
    paths.append(write_json(os.path.join(outdir, "compare_summary.json"), summary))
    if args.plot:
        paths.append(report.render_compare(all_rows, outdir))
    return paths


def cmd_reproduce(args, outdir, manifest):
    data, checks = presets_mod.run_preset(args.figure, args.master_seed,
                                          args.workers)
    fid = args.figure
    paths = []
    if fid in ("fig1", "fig2"):
        if fid == "fig1":
            for kind, (kx, b) in data["cuts"].items():
                header = ["k1 (1/R0)"] + [f"eps{i + 1} (Omega)"
                                          for i in range(b.shape[1])]
                rows = [[k] + list(bb) for k, bb in zip(kx, b)]
                paths.append(write_table(os.path.join(outdir, f"{fid}_{kind}_bands"),
                                         header, rows, args.format))
                if args.plot:
                    paths.append(report.render_bands(
                        kx, b, kind, outdir, name=f"{fid}_{kind}.png"))
        else:
            kx, b = data["bands"]
            header = ["k1 (1/R0)"] + [f"eps{i + 1} (Omega)"
                                      for i in range(b.shape[1])]
            paths.append(write_table(os.path.join(outdir, f"{fid}_ladder_bands"),
                                     header,
                                     [[k] + list(bb) for k, bb in zip(kx, b)],
                                     args.format))
            es, mags = data["transfer"]
            paths.append(write_table(
                os.path.join(outdir, f"{fid}_transfer_eigenvalues"),
                ["energy (Omega)"] + [f"abs_lambda{i + 1}" for i in range(4)],
                [[e] + list(m) for e, m in zip(es, mags)], args.format))
            if args.plot:
                paths.append(report.render_bands(kx, b, "ladder", outdir,
                                                 name=f"{fid}_ladder.png"))
                paths.append(report.render_transfer_eigenvalues(
                    es, mags, outdir, name=f"{fid}_transfer.png"))
    elif fid in ("fig3", "tableS1"):
        fits_by_mode = data["fits"] if fid == "tableS1" else \
            {"positional": data["fits"]}
        nu_rows = []
        for mode, fits in fits_by_mode.items():
            loc_rows = []
            for fit in fits:
                nu_rows.append([mode, fit.energy, fit.nu1, fit.nu2,
                                fit.nu1_stderr, fit.nu2_stderr])
                for g, x1, x2 in zip(fit.grid, fit.xi1, fit.xi2):
                    loc_rows.append([fit.energy, g, x1, x2])
            paths.append(write_table(
                os.path.join(outdir, f"{fid}_{mode}_localization"),
                ["energy (Omega)", "disorder (s or W)", "xi1 (cells)",
                 "xi2 (cells)"], loc_rows, args.format))
            if args.plot:
                paths.append(report.render_scaling(
                    fits, outdir, name=f"{fid}_{mode}_scaling.png"))
        paths.append(write_table(
            os.path.join(outdir, f"{fid}_exponents"),
            ["mode", "energy (Omega)", "nu1", "nu2", "nu1_stderr", "nu2_stderr"],
            nu_rows, args.format))
    elif fid == "fig4":
        keys = ["s", "v0_over_omega", "t", "dx_u", "dx_l", "dx_u_stderr",
                "dx_l_stderr", "realizations", "seed", "L"]
        paths.append(write_table(os.path.join(outdir, f"{fid}_dx"),
                                 keys, [[r[k] for k in keys]
                                        for r in data["rows"]], args.format))
        pkeys = ["s", "v0_over_omega", "t", "rung", "p_u", "p_l"]
        paths.append(write_table(os.path.join(outdir, f"{fid}_profiles"),
                                 pkeys, [[r[k] for k in pkeys]
                                         for r in data["profiles"]], args.format))
        if args.plot:
            paths.append(report.render_dx_curves(data["rows"], outdir,
                                                 name=f"{fid}_dx.png"))
    elif fid == "fig5":
        keys = ["s", "v0_over_omega", "t", "dx_eff_u", "dx_eff_l", "dx_full_u",
                "dx_full_l", "discrepancy", "discrepancy_paired", "leakage",
                "realizations", "seed", "L"]
        paths.append(write_table(os.path.join(outdir, f"{fid}_compare"),
                                 keys, [[r[k] for k in keys]
                                        for r in data["rows"]], args.format))
        if args.plot:
            paths.append(report.render_compare(data["rows"], outdir,
                                               name=f"{fid}_compare.png"))

    n_pass = sum(c["passed"] for c in checks)
    paths.append(write_json(os.path.join(outdir, f"{fid}_report.json"), {
        "figure": fid, "checks": checks,
        "passed": n_pass, "total": len(checks),
    }))
    for c in checks:
        print(f"[{'PASS' if c['passed'] else 'FAIL'}] {fid}: {c['name']}: "
              f"value={c['value']:.6g} target={c['target']:.6g} tol={c['tol']:g}")
    manifest.run_status(figure=fid, checks_passed=n_pass, checks_total=len(checks))
    return paths


# ---------------------------------------------------------------------------
# Argument parsing


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="rydfac",
        description="Synthetic lattices, flat bands and localization for "
                    "facilitated Rydberg tweezer arrays.")
    p.add_argument("--version", action="version", version=f"rydfac {__version__}")
    p.add_argument("--output-dir", default=None,
                   help=f"artifact directory (default: ${OUTPUT_DIR_ENV} or ./runs)")
    p.add_argument("--master-seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--plot", action=argparse.BooleanOptionalAction, default=True,
                   help="render quick-look PNG figures next to the data")
    p.add_argument("--config", default=None,
                   help="JSON file with option defaults (flags override)")
    sub = p.add_subparsers(dest="subcommand", required=True)

    q = sub.add_parser("bands", help="band structure of a synthetic lattice")
    q.add_argument("--lattice", default="square",
                   choices=("chain", "ladder", "square", "triangular",
                            "honeycomb", "custom"))
    q.add_argument("--lattice-file", default=None,
                   help="JSON lattice description for --lattice custom")
    q.add_argument("--kpoints", type=int, default=512,
                   help="points along the zone cut")
    q.add_argument("--grid-points", type=int, default=None,
                   help="flat-band grid points per dimension "
                        "(default 1024 in 1D, 96 in 2D)")
    q.add_argument("--flat-tol", type=float, default=1e-8)
    q.set_defaults(func=cmd_bands)

    q = sub.add_parser("disorder", help="bond shift statistics and densities")
    q.add_argument("--s", type=float, default=0.05)
    q.add_argument("--alpha", type=int, default=3, choices=(3, 6))
    q.add_argument("--v0-over-omega", type=float, default=300.0)
    q.add_argument("--samples", type=int, default=1_000_000)
    q.add_argument("--bins", type=int, default=200)
    q.set_defaults(func=cmd_disorder)

    for name, helptext in (("localization", "localization lengths on a grid"),
                           ("scaling", "localization lengths plus power-law fits")):
        q = sub.add_parser(name, help=helptext)
        q.add_argument("--energy", default="1.8",
                       help="comma list of energies (units of Omega)")
        q.add_argument("--s-grid", default="log:5e-6:5e-4:12")
        q.add_argument("--w-grid", default="log:5e-2:1:12",
                       help="flat-disorder widths (flat modes)")
        q.add_argument("--steps", type=lambda v: int(float(v)), default=1_000_000)
        q.add_argument("--qr-period", type=int, default=8)
        q.add_argument("--mode", default="positional",
                       choices=("positional", "flat_pair_only", "flat_all_sites"))
        q.add_argument("--v0-over-omega", type=float, default=300.0)
        q.add_argument("--alpha", type=int, default=3, choices=(3, 6))
        q.set_defaults(func=cmd_localization if name == "localization"
                       else cmd_scaling)

    q = sub.add_parser("dynamics", help="disorder-averaged spreading of psi_loc")
    q.add_argument("--L", type=int, default=20)
    q.add_argument("--s-grid", default="log:1e-4:3e-2:9")
    q.add_argument("--v0-over-omega", default="200")
    q.add_argument("--times", default="15,50,120", help="comma list (1/Omega)")
    q.add_argument("--realizations", type=int, default=100)
    q.add_argument("--rung", type=int, default=None)
    q.add_argument("--alpha", type=int, default=3, choices=(3, 6))
    q.set_defaults(func=cmd_dynamics)

    q = sub.add_parser("prepare", help="six-pulse preparation of psi_loc")
    q.add_argument("--L", type=int, default=2)
    q.add_argument("--rung", type=int, default=1)
    q.add_argument("--mode", default="ideal_gate",
                   choices=("ideal_gate", "full_hamiltonian"))
    q.add_argument("--omega-r", type=float, default=0.05)
    q.add_argument("--v0-over-omega", type=float, default=300.0)
    q.set_defaults(func=cmd_prepare)

    q = sub.add_parser("compare", help="effective vs full spin evolution")
    q.add_argument("--L", type=int, default=4)
    q.add_argument("--s-grid", default="log:1e-4:3e-2:6")
    q.add_argument("--v0-over-omega", default="20,200")
    q.add_argument("--omega-t-over-2pi", type=float, default=4.3)
    q.add_argument("--realizations", type=int, default=100)
    q.add_argument("--alpha", type=int, default=3, choices=(3, 6))
    q.add_argument("--distance-mode", default="geometric",
                   choices=("geometric", "ideal_tails"))
    q.set_defaults(func=cmd_compare)

    q = sub.add_parser("reproduce", help="pinned preset studies with pass/fail report")
    q.add_argument("--figure", required=True,
                   choices=sorted(presets_mod.PRESETS))
    q.set_defaults(func=cmd_reproduce)
    return p


def _apply_config_file(parser, argv):
    """Config-file values become defaults; explicit flags still win."""
    probe = argparse.ArgumentParser(add_help=False)
    probe.add_argument("--config", default=None)
    known, _ = probe.parse_known_args(argv)
    if not known.config:
        return argv
    with open(known.config) as f:
        cfg = json.load(f)
    for action in parser._subparsers._group_actions[0].choices.values():
        keys = {a.dest for a in action._actions}
        action.set_defaults(**{k: v for k, v in cfg.items() if k in keys})
    parser.set_defaults(**{k: v for k, v in cfg.items()
                           if k in {a.dest for a in parser._actions}})
    return argv


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        argv = _apply_config_file(parser, argv)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read config file: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    args = parser.parse_args(argv)

    outdir = args.output_dir or os.environ.get(OUTPUT_DIR_ENV) or "./runs"
    os.makedirs(outdir, exist_ok=True)
    if getattr(args, "grid_points", None) is None and hasattr(args, "grid_points"):
        real = None
        try:
            real = _lattice_from_args(args)
        except Exception:
            pass
        args.grid_points = 1024 if (real is not None and real.dim == 1) else 96

    config = {k: v for k, v in vars(args).items()
              if k not in ("func", "config") and not callable(v)}
    manifest = Manifest(args.subcommand, config)
    try:
        paths = args.func(args, outdir, manifest)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (TransferUnderflowError, RuntimeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    for path in paths:
        manifest.output(path)
    manifest_path = manifest.write(outdir)
    print(f"wrote {len(paths)} artifact(s) + {os.path.basename(manifest_path)} "
          f"in {outdir}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
