"""Scratch: default-run growth exponent over [1, 8] and integrator order."""
import time
import numpy as np

from tdhfb.grids import Grid
from tdhfb.model import (PhysParams, GaussianProfile, scale_potential, initial_data,
                         PhiInit, KInit, reconstruct_state)
from tdhfb.diagnostics import MonitorConfig, full_row, growth_fit
from tdhfb.integrate import GMSystem, StepController, evolve, step

t0 = time.time()
grid = Grid(1, 128, 16.0)
params = PhysParams(N=100.0, beta=0.4, d=1)
pot = scale_potential(GaussianProfile(1.0, 1.0), params, grid)
ps0 = initial_data(grid, params, PhiInit(amp=1.0, center=8.0, width=1.0, momentum=0.5),
                   KInit(amp=0.2, width_rel=1.0, width_com=1.5, center=8.0))
st0 = reconstruct_state(ps0)
cfg = MonitorConfig(s=params.sobolev_order)
rows = []
def obs(t, state, dtu, err):
    rows.append(full_row(t, state, pot, cfg, dtu, err))
    return None
T = 8.0
ctrl = StepController(dt=0.01, rtol=1e-8, max_dt=0.05, min_dt=1e-7)
traj = evolve(GMSystem(grid, pot, params), st0, T, ctrl, np.linspace(0, T, 81), obs)
nd = max(abs(r.particle_number - rows[0].particle_number) for r in rows) / rows[0].particle_number
ed = max(abs(r.energy - rows[0].energy) for r in rows) / abs(rows[0].energy)
expo, se = growth_fit([r.t for r in rows], [r.sobolev_lambda for r in rows], (1.0, 8.0))
print(f"T=8 run: steps={traj.accepted} rej={traj.rejected} Ndrift={nd:.2e} Edrift={ed:.2e} "
      f"({time.time()-t0:.1f}s)")
print(f"  sobolev_lambda t=1..8: {rows[10].sobolev_lambda:.6f} .. {rows[-1].sobolev_lambda:.6f}")
print(f"  fitted exponent {expo:.4f} +- {se:.4f}  (reference 1/(1+8b)={1/(1+8*params.beta):.4f})")
print(f"  sh2 L2 at t=0,4,8: {np.linalg.norm(2*params.N*(rows[0].sobolev_lambda-0)):.3f}")

# integrator order on the full system (small grid for speed)
print("== integrator self-convergence ==")
grid2 = Grid(1, 32, 16.0)
params2 = PhysParams(N=50.0, beta=0.3, d=1)
pot2 = scale_potential(GaussianProfile(1.0, 1.0), params2, grid2)
ps2 = initial_data(grid2, params2, PhiInit(amp=1.0, center=8.0, width=1.0, momentum=0.5),
                   KInit(amp=0.2, width_rel=1.0, width_com=1.5, center=8.0))
st2 = reconstruct_state(ps2)
sysm = GMSystem(grid2, pot2, params2)
Tc = 0.25
def run_fixed(dt, scheme):
    ctrl = StepController(dt=dt, rtol=1.0, max_dt=dt, min_dt=dt / 4, scheme=scheme, adaptive=False)
    return evolve(sysm, st2, Tc, ctrl).final_state

for scheme in ("lawson_rk4", "rk4"):
    t1 = time.time()
    ref = run_fixed(5e-4, scheme)
    errs = []
    for dt in (4e-3, 2e-3, 1e-3):
        out = run_fixed(dt, scheme)
        err = 0.0
        for a, b in ((out.phi.values, ref.phi.values), (out.gamma.values, ref.gamma.values),
                     (out.lam.values, ref.lam.values)):
            err += np.sum(np.abs(a - b) ** 2)
        errs.append(np.sqrt(err))
    orders = [np.log2(errs[i] / errs[i + 1]) for i in range(2)]
    print(f"  {scheme}: errors {[f'{e:.3e}' for e in errs]} orders {[f'{o:.2f}' for o in orders]} "
          f"({time.time()-t1:.1f}s)")
