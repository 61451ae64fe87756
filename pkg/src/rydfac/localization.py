"""Lyapunov exponents and localization lengths of the disordered ladder.

The 5L x 5L ladder eigenproblem is reduced to its one-excitation
amplitudes (c_n, d_n) by eliminating the pair-site amplitudes, which are
slaved to their two neighbors:

    a_n = (c_n + c_{n+1}) / (eps - dA_n),   e_n = (c_n + d_n) / (eps - dE_n),

and the mirrored relations on the second leg.  The resulting three-term
recursion is iterated as a product of 4x4 transfer matrices acting on
(c_{n+1}, d_{n+1}, c_n, d_n), with QR reorthonormalization every few
steps accumulating the four Lyapunov exponents per unit cell.  The two
smallest positive exponents give the localization lengths
xi_1 < xi_2 (in unit cells); their small-disorder scaling
xi ~ s**(-nu) is extracted by a log-log fit with an automatic cut of the
large-disorder bend-down region.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .disorder import DisorderParams, shift_from_distance
from .seeding import rng_for

__all__ = [
    "TransferConfig",
    "LyapunovResult",
    "ScalingFit",
    "TransferUnderflowError",
    "rung_transfer_matrix",
    "clean_transfer_matrix",
    "clean_transfer_eigenvalues",
    "lyapunov_spectrum",
    "fit_power_law",
    "scaling_exponent",
    "flat_disorder_sweep",
]

DENOMINATOR_FLOOR = 1e-12
STDERR_BLOCK = 100          # QR blocks per stderr superblock
WARMUP_BLOCKS = 100         # QR blocks discarded while Q aligns


class TransferUnderflowError(RuntimeError):
    """A denominator ``eps - shift`` stayed under the floor past the retry budget."""


@dataclass(frozen=True)
class TransferConfig:
    """One transfer-matrix run at fixed energy and disorder strength."""

    energy: float
    params: DisorderParams
    n_steps: int = 1_000_000
    qr_period: int = 8
    seed: int = 0
    floor: float = DENOMINATOR_FLOOR

    def __post_init__(self):
        if self.qr_period < 1:
            raise ValueError("qr_period must be >= 1")
        if self.n_steps < 10 * self.qr_period:
            raise ValueError("n_steps must be at least 10 * qr_period")


@dataclass(frozen=True)
class LyapunovResult:
    """Sorted Lyapunov exponents (per unit cell) and localization lengths."""

    energy: float
    exponents: np.ndarray       # 4 values, descending
    stderr: np.ndarray          # per-exponent block stderr
    n_steps: int
    qr_period: int
    seed: int
    resamples: int
    params: DisorderParams

    @property
    def xi1(self) -> float:
        g = self.exponents[0]
        return 1.0 / g if g > 0 else np.inf

    @property
    def xi2(self) -> float:
        g = self.exponents[1]
        return 1.0 / g if g > 0 else np.inf

    @property
    def xi1_stderr(self) -> float:
        g = self.exponents[0]
        return self.stderr[0] / g**2 if g > 0 else np.inf

    @property
    def xi2_stderr(self) -> float:
        g = self.exponents[1]
        return self.stderr[1] / g**2 if g > 0 else np.inf


@dataclass(frozen=True)
class ScalingFit:
    """Power-law exponents of xi_1, xi_2 against the disorder grid."""

    energy: float
    grid: np.ndarray            # s (positional) or W (flat) values, ascending
    xi1: np.ndarray
    xi2: np.ndarray
    nu1: float
    nu2: float
    nu1_stderr: float
    nu2_stderr: float
    window1: tuple              # (start, stop) indices kept by the fit
    window2: tuple
    residual1: float            # rms log-residual inside the window
    residual2: float
    results: tuple = field(default_factory=tuple, repr=False)

    @property
    def nu(self):
        return (self.nu1, self.nu2)


def rung_transfer_matrix(energy: float, shifts=(0.0, 0.0, 0.0, 0.0, 0.0),
                         prev_shifts=(0.0, 0.0), floor: float = DENOMINATOR_FLOOR
                         ) -> np.ndarray:
    """4x4 transfer matrix advancing one rung.

    ``shifts`` holds the current rung's (dA, dB, dE, dC, dD) and
    ``prev_shifts`` the previous rung's (dA, dB); all in units of the Rabi
    frequency.  Raises :class:`TransferUnderflowError` when any
    pair-site denominator ``energy - shift`` underflows ``floor``.
    """
    dA, dB, dE, dC, dD = (list(shifts) + [0.0] * 5)[:5]
    dAp, dBp = prev_shifts
    dens = np.array([energy - dA, energy - dB, energy - dE,
                     energy - dAp, energy - dBp])
    if np.any(np.abs(dens) < floor):
        raise TransferUnderflowError("denominator underflow; resample this slice")
    fa, fb, fe, fap, fbp = 1.0 / dens
    T = np.zeros((4, 4))
    T[0, 0] = (energy - dC - fa - fap - fe) / fa
    T[0, 1] = -fe / fa
    T[0, 2] = -fap / fa
    T[1, 0] = -fe / fb
    T[1, 1] = (energy - dD - fb - fbp - fe) / fb
    T[1, 3] = -fbp / fb
    T[2, 0] = 1.0
    T[3, 1] = 1.0
    return T


def clean_transfer_matrix(energy: float) -> np.ndarray:
    return rung_transfer_matrix(energy)


def clean_transfer_eigenvalues(energy: float) -> np.ndarray:
    """Eigenvalue magnitudes of the clean transfer matrix, descending.

    Inside a band the corresponding pair sits on the unit circle; outside
    it splits into a growing/decaying pair whose log gives the clean
    (evanescent) inverse decay length.
    """
    lam = np.linalg.eigvals(clean_transfer_matrix(energy))
    return np.sort(np.abs(lam))[::-1]


@njit(cache=True)
def _lyapunov_core(energy, den_a, den_b, den_e, d_c, d_d, qr_period, n_blocks):
    """QR-accumulated log growth rates; step n uses den arrays at n and n-1."""
    Q = np.eye(4)
    logs = np.zeros((n_blocks, 4))
    prev_fa = 1.0 / den_a[0]
    prev_fb = 1.0 / den_b[0]
    n = 1
    for b in range(n_blocks):
        for _ in range(qr_period):
            fa = 1.0 / den_a[n]
            fb = 1.0 / den_b[n]
            fe = 1.0 / den_e[n]
            t00 = (energy - d_c[n] - fa - prev_fa - fe) * den_a[n]
            t01 = -fe * den_a[n]
            t02 = -prev_fa * den_a[n]
            t10 = -fe * den_b[n]
            t11 = (energy - d_d[n] - fb - prev_fb - fe) * den_b[n]
            t13 = -prev_fb * den_b[n]
            for j in range(4):
                q0 = Q[0, j]
                q1 = Q[1, j]
                new0 = t00 * q0 + t01 * q1 + t02 * Q[2, j]
                new1 = t10 * q0 + t11 * q1 + t13 * Q[3, j]
                Q[2, j] = q0
                Q[3, j] = q1
                Q[0, j] = new0
                Q[1, j] = new1
            prev_fa = fa
            prev_fb = fb
            n += 1
        Q, R = np.linalg.qr(Q)
        for i in range(4):
            logs[b, i] = np.log(np.abs(R[i, i]))
    return logs


def _positional_strip_shifts(n_rungs: int, params: DisorderParams, rng):
    """Leg and rung bond shifts of a displaced strip of ``n_rungs`` rungs."""
    disp = rng.normal(0.0, params.s, size=(n_rungs, 2, 3)) if params.s > 0 \
        else np.zeros((n_rungs, 2, 3))

    def recompute():
        du, dl = disp[:, 0, :], disp[:, 1, :]
        leg = np.array([1.0, 0.0, 0.0])
        rung = np.array([0.0, 1.0, 0.0])
        d_a = np.linalg.norm(leg + du[1:] - du[:-1], axis=1)
        d_b = np.linalg.norm(leg + dl[1:] - dl[:-1], axis=1)
        d_e = np.linalg.norm(rung + du - dl, axis=1)
        to_shift = lambda d: shift_from_distance(d, params.v0_over_omega,
                                                 params.alpha, params.linearized)
        return to_shift(d_a), to_shift(d_b), to_shift(d_e)

    return disp, recompute


def _draw_strip(cfg: TransferConfig):
    """Denominator arrays for the full run, resampling floor violations.

    Returns ``(den_a, den_b, den_e, d_c, d_d, resamples)`` where
    ``den_x[n] = energy - shift_x[n]``; index 0 only feeds the first
    step's previous-rung factor.
    """
    N = cfg.n_steps + WARMUP_BLOCKS * cfg.qr_period
    rng = rng_for(cfg.seed, "transfer")
    p = cfg.params
    d_c = np.zeros(N + 1)
    d_d = np.zeros(N + 1)
    resamples = 0

    if p.mode == "positional":
        disp, recompute = _positional_strip_shifts(N + 2, p, rng)
        s_a, s_b, s_e = recompute()
        shift_arrays = [s_a, s_b, s_e[1:]]         # align all to length N+1
    else:
        draw = lambda: rng.uniform(-p.W / 2, p.W / 2, size=N + 1) if p.W > 0 \
            else np.zeros(N + 1)
        s_a, s_b, s_e = draw(), draw(), draw()
        shift_arrays = [s_a, s_b, s_e]
        if p.mode == "flat_all_sites":
            d_c = draw()
            d_d = draw()

    for attempt in range(100):
        arrays = shift_arrays + [d_c, d_d]
        bad = [np.nonzero(np.abs(cfg.energy - arr) < cfg.floor)[0] for arr in arrays]
        n_bad = sum(len(b) for b in bad)
        if n_bad == 0:
            break
        resamples += n_bad
        if p.mode == "positional":
            rungs = set()
            for which, idx in enumerate(bad[:3]):
                for n in idx:
                    rungs.update((n, n + 1) if which < 2 else (n + 1,))
            for r in sorted(rungs):
                disp[r] = rng.normal(0.0, p.s, size=(2, 3))
            s_a, s_b, s_e = recompute()
            shift_arrays = [s_a, s_b, s_e[1:]]
        else:
            for arr, idx in zip(arrays, bad):
                if len(idx) and p.W > 0:
                    arr[idx] = rng.uniform(-p.W / 2, p.W / 2, size=len(idx))
                elif len(idx):
                    raise TransferUnderflowError(
                        "energy coincides with a clean site energy (W = 0)")
    else:
        raise TransferUnderflowError("resample budget exceeded")

    s_a, s_b, s_e = shift_arrays
    return (cfg.energy - s_a, cfg.energy - s_b, cfg.energy - s_e,
            d_c, d_d, resamples)


def lyapunov_spectrum(cfg: TransferConfig) -> LyapunovResult:
    """Four Lyapunov exponents of a disordered run; see module docstring.

    The first :data:`WARMUP_BLOCKS` QR blocks are discarded while the
    orthonormal frame locks onto the growth directions, then ``n_steps``
    accumulation steps follow.  Standard errors come from averaging over
    superblocks of :data:`STDERR_BLOCK` QR blocks.
    """
    den_a, den_b, den_e, d_c, d_d, resamples = _draw_strip(cfg)
    n_blocks = WARMUP_BLOCKS + cfg.n_steps // cfg.qr_period
    logs = _lyapunov_core(cfg.energy, den_a, den_b, den_e, d_c, d_d,
                          cfg.qr_period, n_blocks)
    logs = logs[WARMUP_BLOCKS:]
    steps = logs.shape[0] * cfg.qr_period
    exponents = logs.sum(axis=0) / steps

    n_super = max(logs.shape[0] // STDERR_BLOCK, 1)
    usable = n_super * STDERR_BLOCK
    rates = logs[:usable].reshape(n_super, STDERR_BLOCK, 4).sum(axis=1) \
        / (STDERR_BLOCK * cfg.qr_period)
    stderr = rates.std(axis=0, ddof=1) / np.sqrt(n_super) if n_super > 1 \
        else np.full(4, np.nan)

    order = np.argsort(exponents)[::-1]
    return LyapunovResult(energy=cfg.energy, exponents=exponents[order],
                          stderr=stderr[order], n_steps=steps,
                          qr_period=cfg.qr_period, seed=cfg.seed,
                          resamples=resamples, params=cfg.params)


# ---------------------------------------------------------------------------
# Scaling fits


def fit_power_law(grid, xi, xi_stderr=None, window=None, lead: int = 4,
                  slope_tol: float = 0.25, max_rel_err: float = 0.5):
    """Slope of log(xi) vs log(grid) with an automatic bend-down cut.

    Leading points whose length is statistically unresolved (relative
    stderr above ``max_rel_err``, i.e. the exponent is buried in its own
    noise) are dropped first.  The next ``lead`` points then define the
    reference slope; the tail is cut where the local slope turns steeper
    than the reference by more than ``slope_tol`` (relative, floored at
    an absolute 0.25) and stays so on the following interval -- the
    one-sided, persistent signature of the large-disorder bend-down, which
    single noisy intervals do not mimic.  Returns
    ``(nu, stderr, (start, stop), residual_rms)`` with ``nu = -slope`` so
    the usual shrinking-length scaling is positive.  ``window`` overrides
    the automatic selection.
    """
    x = np.log(np.asarray(grid, dtype=float))
    y = np.log(np.asarray(xi, dtype=float))
    if np.any(~np.isfinite(y)):
        raise ValueError("xi values must be finite and positive for the fit")
    if window is not None:
        start, stop = window
    else:
        start = 0
        if xi_stderr is not None:
            rel = np.asarray(xi_stderr, dtype=float) / np.asarray(xi, dtype=float)
            unresolved = np.nonzero(~(rel <= max_rel_err))[0]
            if len(unresolved):
                start = min(int(unresolved[-1]) + 1, len(x) - 4)
        lead = min(lead, len(x) - start)
        ref = np.polyfit(x[start:start + lead], y[start:start + lead], 1)[0]
        stop = len(x)
        tol = max(slope_tol * abs(ref), slope_tol)
        local = np.diff(y) / np.diff(x)
        for k in range(start + lead, len(x)):
            bends = local[k - 1] - ref < -tol
            persists = (k == len(x) - 1) or (local[k] - ref < -tol)
            if bends and persists:
                stop = k
                break
    if stop - start < 4:
        raise ValueError("fewer than 4 usable points in the fit window")
    if np.all(y[start:stop] == y[start]):      # exactly flat series
        return 0.0, 0.0, (start, stop), 0.0
    coeffs, cov = np.polyfit(x[start:stop], y[start:stop], 1, cov=True)
    resid = y[start:stop] - np.polyval(coeffs, x[start:stop])
    return (-coeffs[0], float(np.sqrt(cov[0, 0])), (start, stop),
            float(np.sqrt(np.mean(resid**2))))


def _sweep(energy, grid, configs) -> ScalingFit:
    results = [lyapunov_spectrum(c) for c in configs]
    xi1 = np.array([r.xi1 for r in results])
    xi2 = np.array([r.xi2 for r in results])
    err1 = np.array([r.xi1_stderr for r in results])
    err2 = np.array([r.xi2_stderr for r in results])
    nu1, e1, w1, r1 = fit_power_law(grid, xi1, err1)
    nu2, e2, w2, r2 = fit_power_law(grid, xi2, err2)
    return ScalingFit(energy=energy, grid=np.asarray(grid, dtype=float),
                      xi1=xi1, xi2=xi2, nu1=nu1, nu2=nu2,
                      nu1_stderr=e1, nu2_stderr=e2, window1=w1, window2=w2,
                      residual1=r1, residual2=r2, results=tuple(results))


def scaling_exponent(energy: float, s_grid, params: DisorderParams,
                     n_steps: int = 1_000_000, qr_period: int = 8,
                     seed: int = 0) -> ScalingFit:
    """Positional-disorder scaling exponents at one energy.

    ``s_grid`` must be ascending and span at least 1.5 decades so the
    power law has room to establish itself before the bend-down cut.
    """
    s_grid = np.sort(np.asarray(s_grid, dtype=float))
    if len(s_grid) < 4:
        raise ValueError("need at least 4 disorder strengths")
    if np.log10(s_grid[-1] / s_grid[0]) < 1.5:
        raise ValueError("s_grid must span at least 1.5 decades")
    configs = [TransferConfig(energy=energy, params=params.with_(s=float(s)),
                              n_steps=n_steps, qr_period=qr_period,
                              seed=seed + 1000 * i)
               for i, s in enumerate(s_grid)]
    return _sweep(energy, s_grid, configs)


def flat_disorder_sweep(energies, w_grid, mode: str,
                        n_steps: int = 1_000_000, qr_period: int = 8,
                        seed: int = 0) -> list:
    """Uniform-disorder scaling exponents (pair sites only, or all sites)."""
    if mode not in ("flat_pair_only", "flat_all_sites"):
        raise ValueError("flat_disorder_sweep needs a flat mode")
    w_grid = np.sort(np.asarray(w_grid, dtype=float))
    fits = []
    for energy in np.atleast_1d(energies):
        params = DisorderParams(mode=mode)
        configs = [TransferConfig(energy=float(energy),
                                  params=params.with_(W=float(w)),
                                  n_steps=n_steps, qr_period=qr_period,
                                  seed=seed + 1000 * i)
                   for i, w in enumerate(w_grid)]
        fits.append(_sweep(float(energy), w_grid, configs))
    return fits
