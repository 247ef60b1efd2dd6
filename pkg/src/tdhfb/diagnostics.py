"""Conserved functionals, Sobolev-type monitors, and growth-exponent fits.

The particle number and total energy of a state are

    Npart = N * ( ||phi||^2 + ||sh(k)||^2 / N )
    E     = N * ( ||grad phi||^2 + ||grad_{x,y} sh(k)||^2 / (2N)
                  + (1/2) iint v_N(x-y) [ |lambda|^2 + |gamma|^2
                        + rho(x) rho(y) - 2 |phi(x)|^2 |phi(y)|^2 ] dx dy ),

the quadratic Wick expectation of the many-body Hamiltonian in the state
determined by (phi, k); both are constants of the coupled flow.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from .errors import FitError
from .grids import Field, Kernel, fourier_multiplier, frac_sobolev_norm, gradient_norm_sq
from .kernels import hyperbolic_calculus, k_from_sh2
from .model import PairState, Potential, State, pair_from_state, reconstruct_state


@dataclass
class MonitorConfig:
    """Knobs of the per-sample monitors."""

    s: float = 0.5               # Sobolev order, usually 1/2 + epsilon
    stride: int = 5              # base steps between samples
    fit_window: tuple[float, float] = (1.0, 8.0)
    lebesgue_exponent: float = float("inf")  # recorded only; d=1 stand-in for L6
    drift_threshold: float = 1e-4


@dataclass
class DiagnosticsRow:
    """One CSV row; field order is the wire order."""

    t: float
    particle_number: float
    energy: float
    tr_gamma: float
    phi_l2: float
    sobolev_phi: float
    sobolev_gamma: float
    sobolev_lambda: float
    diag_shift_lambda: float
    grad2_lambda: float
    hermiticity_residual: float
    symmetry_residual: float
    dt_used: float
    step_error_estimate: float


ROW_COLUMNS = tuple(f.name for f in fields(DiagnosticsRow))


def _sh_from_pair(ps: PairState) -> Kernel:
    sh, _ = hyperbolic_calculus(k_from_sh2(ps.sh2))
    return sh


def particle_number(state, sh: Kernel | None = None) -> float:
    """Total particle number of a PairState or State."""
    if isinstance(state, State):
        return float(state.params.N * state.grid.weight * np.sum(np.real(np.diagonal(state.gamma.values))))
    ps = state
    sh = _sh_from_pair(ps) if sh is None else sh
    return float(ps.params.N * (ps.phi.l2_norm() ** 2 + sh.l2_norm() ** 2 / ps.params.N))


def energy(state, pot: Potential, dispersion: str = "spectral") -> float:
    """Total energy; accepts either representation.

    ``dispersion`` selects the kinetic symbol and must match the one used
    by the evolution (lattice runs conserve the lattice-kinetic energy).
    """
    if isinstance(state, PairState):
        st = reconstruct_state(state)
        sh = _sh_from_pair(state)
    else:
        st = state
        sh = _sh_from_pair(pair_from_state(state))
    grid = st.grid
    n = st.params.N
    kin_phi = gradient_norm_sq(st.phi, dispersion)
    kin_sh = gradient_norm_sq(sh, dispersion)

    rho = np.real(np.diagonal(st.gamma.values))
    phi2 = np.abs(st.phi.values.reshape(-1)) ** 2
    bracket = (np.abs(st.lam.values) ** 2 + np.abs(st.gamma.values) ** 2
               + np.outer(rho, rho) - 2.0 * np.outer(phi2, phi2))
    inter = 0.5 * grid.weight**2 * float(np.sum(pot.pair_matrix * bracket))
    return float(n * (kin_phi + kin_sh / (2.0 * n) + inter))


def diag_shift_norm(lam: Kernel, s: float) -> float:
    """max over grid shifts z of || <grad_x>^s lam(x+z, x) ||_{L2(dx)}."""
    grid = lam.grid
    M, d, n = grid.M, grid.d, grid.n
    idx = np.arange(n)
    if d == 1:
        shift_rows = (idx[None, :] + idx[:, None]) % M
    else:
        i0, i1 = np.divmod(idx, M)
        rows0 = (i0[None, :] + i0[:, None]) % M
        rows1 = (i1[None, :] + i1[:, None]) % M
        shift_rows = rows0 * M + rows1
    diags = lam.values[shift_rows, idx[None, :]]          # (n_shifts, n)
    work = diags.reshape((n,) + (M,) * d)
    axes = tuple(range(1, d + 1))
    hat = np.fft.fftn(work, axes=axes)
    q = sum(m**2 for m in grid.freq_mesh())
    hat *= ((1.0 + q) ** (s / 2.0))[None, ...]
    rest = np.fft.ifftn(hat, axes=axes)
    norms = np.sqrt(grid.weight * np.sum(np.abs(rest) ** 2, axis=axes))
    return float(np.max(norms))


def norm_monitors(st: State, cfg: MonitorConfig) -> dict:
    """The Sobolev-type monitors of one snapshot."""
    s = cfg.s
    grad2 = fourier_multiplier(st.lam, lambda *xi: np.sqrt(sum(x**2 for x in xi)), axes=(0,))
    grad2 = fourier_multiplier(grad2, lambda *xi: np.sqrt(sum(x**2 for x in xi)), axes=(1,))
    return {
        "sobolev_phi": frac_sobolev_norm(st.phi, s, inhomogeneous=True),
        "sobolev_gamma": frac_sobolev_norm(st.gamma, s, inhomogeneous=False),
        "sobolev_lambda": frac_sobolev_norm(st.lam, s, inhomogeneous=True),
        "diag_shift_lambda": diag_shift_norm(st.lam, s),
        "grad2_lambda": grad2.l2_norm(),
    }


def full_row(t: float, state, pot: Potential, cfg: MonitorConfig,
             dt_used: float = 0.0, err: float = 0.0) -> DiagnosticsRow:
    """Assemble the complete diagnostics row for either representation."""
    if isinstance(state, PairState):
        st = reconstruct_state(state)
        sym_res = state.sh2.symmetry_residual()
        sh = _sh_from_pair(state)
    else:
        st = state
        sym_res = st.lam.symmetry_residual()
        sh = None
    mons = norm_monitors(st, cfg)
    npart = (particle_number(state, sh=sh) if isinstance(state, PairState)
             else particle_number(st))
    return DiagnosticsRow(
        t=t,
        particle_number=npart,
        energy=energy(state, pot),
        tr_gamma=float(st.grid.weight * np.sum(np.real(np.diagonal(st.gamma.values)))),
        phi_l2=st.phi.l2_norm(),
        sobolev_phi=mons["sobolev_phi"],
        sobolev_gamma=mons["sobolev_gamma"],
        sobolev_lambda=mons["sobolev_lambda"],
        diag_shift_lambda=mons["diag_shift_lambda"],
        grad2_lambda=mons["grad2_lambda"],
        hermiticity_residual=st.gamma.symmetry_residual(),
        symmetry_residual=sym_res,
        dt_used=dt_used,
        step_error_estimate=err,
    )


def growth_fit(times, values, window: tuple[float, float]) -> tuple[float, float]:
    """Least-squares slope of log(value) vs log(t) over the window.

    Returns (exponent, standard error).  Needs at least 8 positive samples.
    """
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    mask = (t >= window[0]) & (t <= window[1]) & (t > 0) & (v > 0)
    if int(np.count_nonzero(mask)) < 8:
        raise FitError(f"need >= 8 usable samples in window {window}, got {int(np.count_nonzero(mask))}")
    x = np.log(t[mask])
    y = np.log(v[mask])
    xm, ym = x.mean(), y.mean()
    sxx = float(np.sum((x - xm) ** 2))
    if sxx == 0.0:
        raise FitError("degenerate fit window (all sample times equal)")
    slope = float(np.sum((x - xm) * (y - ym)) / sxx)
    resid = y - ym - slope * (x - xm)
    dof = max(len(x) - 2, 1)
    stderr = float(np.sqrt(np.sum(resid**2) / dof / sxx))
    return slope, stderr


def drift_report(rows: list[DiagnosticsRow], threshold: float = 1e-4) -> dict:
    """Max relative drift of the conserved quantities along a trajectory."""
    if len(rows) < 2:
        raise FitError("drift report needs at least two rows")
    n0 = rows[0].particle_number
    e0 = rows[0].energy
    n_drift = max(abs(r.particle_number - n0) for r in rows) / abs(n0)
    e_scale = max(abs(e0), 1e-300)
    e_drift = max(abs(r.energy - e0) for r in rows) / e_scale
    return {
        "particle_drift": float(n_drift),
        "energy_drift": float(e_drift),
        "threshold": threshold,
        "flagged": bool(n_drift > threshold or e_drift > threshold),
    }
