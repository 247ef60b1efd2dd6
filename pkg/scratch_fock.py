"""Scratch: time-evolved Fock comparison and the N-trend."""
import numpy as np

from tdhfb.grids import Grid
from tdhfb.kernels import k_from_sh2
from tdhfb.model import (PhysParams, GaussianProfile, scale_potential, initial_data,
                         PhiInit, KInit, reconstruct_state)
from tdhfb.diagnostics import particle_number, energy
from tdhfb.integrate import PairSystem, StepController, evolve
from tdhfb import fock

grid = Grid(1, 2, 4.0)
h = grid.h
prof = GaussianProfile(0.35, 1.0)
T = 1.0

for N in [2.0, 4.0, 8.0]:
    params = PhysParams(N=N, beta=0.0, d=1)
    pot = scale_potential(prof, params, grid)
    ps0 = initial_data(grid, params,
                       PhiInit(kind="gaussian", amp=1.0, center=1.0, width=0.5, momentum=0.4),
                       KInit(amp=0.25, width_rel=0.5, width_com=0.5, center=1.0))
    sys_pair = PairSystem(grid, pot, params, dispersion="lattice")
    ctrl = StepController(dt=0.005, rtol=1e-10, max_dt=0.02, min_dt=1e-8)
    traj = evolve(sys_pair, ps0, T, ctrl)
    psT = traj.final_state
    stT = reconstruct_state(psT)

    def k_lat_of(ps):
        tf = k_from_sh2(ps.sh2)
        return (tf.U * tf.sigma) @ tf.U.T

    n_max = fock.estimate_n_max(N, 0.5)
    from tdhfb.errors import TruncationError
    while True:
        basis = fock.FockBasis(2, n_max)
        a_ops = fock.ladder_ops(basis)
        try:
            psi0 = fock.prepare(basis, np.sqrt(h) * ps0.phi.values, k_lat_of(ps0), N, a_ops)
            psi_ap = fock.prepare(basis, np.sqrt(h) * psT.phi.values, k_lat_of(psT), N, a_ops)
            break
        except TruncationError:
            n_max += 6
            if n_max > 100: raise
    H = fock.hamiltonian(basis, h, pot.pair_matrix, N)
    evo = fock.ExactEvolution(H)
    psiT = evo.at(psi0, T)

    dist = fock.phase_opt_distance(psiT, psi_ap)
    l01, l11, l02 = fock.marginals(psiT, N, h, a_ops)
    e11 = h * np.linalg.norm(l11 - stT.gamma.values)
    e02 = h * np.linalg.norm(l02 - stT.lam.values)
    e01 = np.sqrt(h) * np.linalg.norm(l01 - psT.phi.values)
    drift_n = abs(particle_number(psT) - N) / N
    eL0 = energy(ps0, pot, dispersion="lattice")
    eLT = energy(psT, pot, dispersion="lattice")
    print(f"N={N:4.0f} dim={basis.dim:5d} n_max={n_max:3d} tail0={psi0.tail:.1e} tailT={psi_ap.tail:.1e} "
          f"dist={dist:.5f} |L11-G|={e11:.2e} |L02-L|={e02:.2e} |L01-phi|={e01:.2e} "
          f"Ndrift={drift_n:.1e} Edrift={abs(eLT-eL0)/abs(eL0):.1e} steps={traj.accepted}")
