"""Quick-look matplotlib figures rendered next to the delimited output.

Every renderer takes the already-computed data, writes one PNG and
returns its path; nothing here feeds back into the computations.
"""

from __future__ import annotations

import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "render_bands",
    "render_disorder_histogram",
    "render_localization",
    "render_scaling",
    "render_dx_curves",
    "render_compare",
    "render_transfer_eigenvalues",
]


def _save(fig, outdir, name):
    path = os.path.join(outdir, name)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_bands(kx, bands, kind, outdir, name="bands.png", flat_flags=None):
    fig, ax = plt.subplots(figsize=(5, 4))
    for i in range(bands.shape[1]):
        style = "-"
        lw = 1.2
        if flat_flags is not None and flat_flags[i]:
            style, lw = "-", 2.2
        ax.plot(kx, bands[:, i], style, lw=lw, color="C0" if flat_flags is None
                or not flat_flags[i] else "C3")
    ax.set_xlabel(r"$k_x$  (1/$R_0$)")
    ax.set_ylabel(r"$\epsilon$  ($\Omega$)")
    ax.set_title(f"{kind} synthetic lattice")
    ax.grid(alpha=0.3)
    return _save(fig, outdir, name)


def render_disorder_histogram(centers, empirical, analytic, s, alpha, outdir,
                              name="disorder.png"):
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.semilogy(centers, empirical, ".", ms=3, label="sampled")
    ax.semilogy(centers, analytic, "-", lw=1.2, label="closed form")
    ax.set_xlabel(r"$\delta v = \delta V / V_0$")
    ax.set_ylabel("density")
    ax.set_title(f"bond shift density, s={s:g}, alpha={alpha}")
    ax.legend()
    return _save(fig, outdir, name)


def render_localization(rows, outdir, name="localization.png"):
    fig, ax = plt.subplots(figsize=(5.5, 4))
    energies = sorted({r["energy"] for r in rows})
    for i, eps in enumerate(energies):
        sel = sorted((r for r in rows if r["energy"] == eps), key=lambda r: r["disorder"])
        g = [r["disorder"] for r in sel]
        ax.loglog(g, [r["xi1"] for r in sel], "o-", ms=3, color=f"C{i}",
                  label=f"eps={eps:.4g}")
        ax.loglog(g, [r["xi2"] for r in sel], "s--", ms=3, color=f"C{i}")
    ax.set_xlabel("disorder strength")
    ax.set_ylabel(r"$\xi_{1,2}$  (unit cells)")
    ax.legend(fontsize=7)
    ax.grid(alpha=0.3, which="both")
    return _save(fig, outdir, name)


def render_scaling(fits, outdir, name="scaling.png"):
    fig, ax = plt.subplots(figsize=(5.5, 4))
    for i, fit in enumerate(fits):
        ax.loglog(fit.grid, fit.xi1, "o", ms=3, color=f"C{i}")
        ax.loglog(fit.grid, fit.xi2, "s", ms=3, color=f"C{i}",
                  label=f"eps={fit.energy:.4g}: nu=({fit.nu1:.2f},{fit.nu2:.2f})")
        for xi, nu, win in ((fit.xi1, fit.nu1, fit.window1),
                            (fit.xi2, fit.nu2, fit.window2)):
            lo, hi = win
            g = fit.grid[lo:hi]
            anchor = xi[lo] * (g / fit.grid[lo]) ** (-nu)
            ax.loglog(g, anchor, "-", lw=0.8, color=f"C{i}")
    ax.set_xlabel("disorder strength")
    ax.set_ylabel(r"$\xi_{1,2}$  (unit cells)")
    ax.legend(fontsize=7)
    ax.grid(alpha=0.3, which="both")
    return _save(fig, outdir, name)


def render_dx_curves(rows, outdir, name="dx_scan.png"):
    fig, ax = plt.subplots(figsize=(5.5, 4))
    times = sorted({r["t"] for r in rows})
    for i, t in enumerate(times):
        sel = sorted((r for r in rows if r["t"] == t), key=lambda r: r["s"])
        s = [r["s"] for r in sel]
        ax.semilogx(s, [r["dx_u"] for r in sel], "o-", ms=3, color=f"C{i}",
                    label=f"t={t:g} (upper)")
        ax.semilogx(s, [r["dx_l"] for r in sel], "s--", ms=3, color=f"C{i}")
    ax.set_xlabel("s")
    ax.set_ylabel(r"$\Delta x$  (rungs)")
    ax.legend(fontsize=7)
    ax.grid(alpha=0.3)
    return _save(fig, outdir, name)


def render_compare(rows, outdir, name="compare.png"):
    fig, ax = plt.subplots(figsize=(5.5, 4))
    v0s = sorted({r["v0_over_omega"] for r in rows})
    for i, v0 in enumerate(v0s):
        sel = sorted((r for r in rows if r["v0_over_omega"] == v0),
                     key=lambda r: r["s"])
        s = [r["s"] for r in sel]
        ax.semilogx(s, [r["dx_eff_u"] for r in sel], "-", color=f"C{i}",
                    label=f"V0={v0:g} effective")
        ax.semilogx(s, [r["dx_full_u"] for r in sel], "--", color=f"C{i}",
                    label=f"V0={v0:g} full")
    ax.set_xlabel("s")
    ax.set_ylabel(r"$\Delta x$  (rungs)")
    ax.legend(fontsize=7)
    ax.grid(alpha=0.3)
    return _save(fig, outdir, name)


def render_transfer_eigenvalues(energies, magnitudes, outdir,
                                name="transfer_eigenvalues.png"):
    fig, ax = plt.subplots(figsize=(5.5, 4))
    mags = np.asarray(magnitudes)
    for i in range(mags.shape[1]):
        ax.semilogy(energies, mags[:, i], ".", ms=2)
    ax.set_xlabel(r"$\epsilon$  ($\Omega$)")
    ax.set_ylabel(r"$|\lambda_i|$ of the clean transfer matrix")
    ax.grid(alpha=0.3)
    return _save(fig, outdir, name)
