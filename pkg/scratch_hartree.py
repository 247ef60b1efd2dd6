"""Scratch: Hartree/NLS consistency sweep + uniform-in-N monitors + timing."""
import time
import numpy as np

from tdhfb.grids import Grid, Field
from tdhfb.model import (PhysParams, GaussianProfile, scale_potential, initial_data,
                         PhiInit, KInit, reconstruct_state)
from tdhfb.diagnostics import MonitorConfig, full_row, particle_number, energy
from tdhfb.integrate import GMSystem, HartreeSystem, StepController, evolve

grid = Grid(1, 128, 16.0)
prof = GaussianProfile(1.0, 1.0)
phi_cfg = PhiInit(amp=1.0, center=8.0, width=1.0, momentum=0.5)
T = 1.0
samples = np.linspace(0, T, 21)

print("== hartree consistency, beta=0.2 ==")
for N in [100.0, 1000.0, 10000.0]:
    t0 = time.time()
    params = PhysParams(N=N, beta=0.2, d=1)
    pot = scale_potential(prof, params, grid)
    ps0 = initial_data(grid, params, phi_cfg, KInit(amp=0.0))
    st0 = reconstruct_state(ps0)

    phis_t = {}
    def obs_t(t, state, dtu, err):
        phis_t[round(t, 9)] = state.phi.values.copy()
        return None
    ctrl = StepController(dt=0.01, rtol=1e-8, max_dt=0.05, min_dt=1e-7)
    traj = evolve(GMSystem(grid, pot, params), st0, T, ctrl, samples, obs_t)

    phis_h = {}
    def obs_h(t, state, dtu, err):
        phis_h[round(t, 9)] = state.values.copy()
        return None
    trajh = evolve(HartreeSystem(grid, pot), ps0.phi, T, ctrl, samples, obs_h)

    h = grid.weight
    sup = max(np.sqrt(h * np.sum(np.abs(phis_t[k] - phis_h[k]) ** 2)) for k in phis_t)
    print(f"  N={N:8.0f} sup_t |phi_T - phi_H| = {sup:.3e}  steps={traj.accepted} "
          f"({time.time()-t0:.1f}s)")

print("== uniformity of monitors, beta=0.2, T=2, with pairs ==")
k_cfg = KInit(amp=0.2, width_rel=1.0, width_com=1.5, center=8.0)
T2 = 2.0
samples2 = np.linspace(0, T2, 41)
for N in [100.0, 1000.0, 10000.0]:
    t0 = time.time()
    params = PhysParams(N=N, beta=0.2, d=1)
    pot = scale_potential(prof, params, grid)
    ps0 = initial_data(grid, params, phi_cfg, k_cfg)
    st0 = reconstruct_state(ps0)
    cfg = MonitorConfig(s=params.sobolev_order)
    rows = []
    def obs(t, state, dtu, err):
        rows.append(full_row(t, state, pot, cfg, dtu, err))
        return None
    ctrl = StepController(dt=0.01, rtol=1e-8, max_dt=0.05, min_dt=1e-7)
    traj = evolve(GMSystem(grid, pot, params), st0, T2, ctrl, samples2, obs)
    sg = max(r.sobolev_gamma for r in rows)
    sp = max(r.sobolev_phi for r in rows)
    nd = max(abs(r.particle_number - rows[0].particle_number) for r in rows) / rows[0].particle_number
    ed = max(abs(r.energy - rows[0].energy) for r in rows) / abs(rows[0].energy)
    print(f"  N={N:8.0f} max sobolev_gamma={sg:.6f} max sobolev_phi={sp:.6f} "
          f"Ndrift={nd:.2e} Edrift={ed:.2e} steps={traj.accepted} ({time.time()-t0:.1f}s)")
