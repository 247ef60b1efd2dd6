"""Scratch validation of conventions (not shipped): Takagi, marginals, conservation."""
import numpy as np

from tdhfb.grids import Grid, Field, Kernel, free_propagator
from tdhfb.kernels import takagi, hyperbolic_calculus, double_angle, k_from_sh2, compose, operator_form
from tdhfb.model import (PhysParams, GaussianProfile, scale_potential, initial_data,
                         PhiInit, KInit, reconstruct_state, pair_from_state)
from tdhfb.diagnostics import particle_number, energy
from tdhfb.integrate import GMSystem, PairSystem, StepController, evolve
from tdhfb import fock

rng = np.random.default_rng(0)

# ---- Takagi robustness on kernels with tiny/degenerate values
print("== takagi ==")
for trial in range(5):
    n = 40
    g = Grid(1, 64, 16.0)  # grid only supplies h for operator form
    r = rng.normal(size=(64, 64)) + 1j * rng.normal(size=(64, 64))
    a = (r + r.T) / 2
    # plant tiny and degenerate values
    u0, _ = np.linalg.qr(rng.normal(size=(64, 64)) + 1j * rng.normal(size=(64, 64)))
    sig = np.abs(rng.normal(size=64))
    sig[:5] = sig[5]          # degenerate block
    sig[-10:] = 10.0 ** -np.arange(6, 16)[:10]  # sweep through eps
    a = (u0 * sig) @ u0.T
    k = Kernel(g, a / g.weight, "symmetric")
    tf = takagi(k)
    rec = np.linalg.norm(tf.reconstruct() - a) / np.linalg.norm(a)
    unit = np.max(np.abs(tf.U.conj().T @ tf.U - np.eye(64)))
    print(f"  trial {trial}: recon {rec:.2e} unitarity {unit:.2e}")

# ---- identities
print("== identities ==")
g = Grid(1, 64, 16.0)
r = rng.normal(size=(64, 64)) + 1j * rng.normal(size=(64, 64))
a = (r + r.T) / 2
a *= 5.0 / np.linalg.norm(a, 2)
k = Kernel(g, a / g.weight, "symmetric")
tf = takagi(k)
sh, p = hyperbolic_calculus(tf)
sh2, p2 = double_angle(tf)
shbar = Kernel(g, sh.values.conj(), "symmetric")
lhs = compose(shbar, sh).values
rhs_ = (compose(p, p).values + 2 * p.values)
print("  shbar∘sh vs p∘p+2p:", np.linalg.norm(lhs - rhs_) / max(1, np.linalg.norm(p.values) ** 2))
lhs2 = sh2.values
rhs2 = 2 * sh.values + 2 * compose(sh, p).values
print("  sh2 vs 2sh+2sh∘p:", np.linalg.norm(lhs2 - rhs2) / np.linalg.norm(lhs2))
tf2 = k_from_sh2(sh2)
sh2b, _ = double_angle(tf2)
print("  roundtrip:", np.linalg.norm(sh2b.values - sh2.values) / np.linalg.norm(sh2.values))

# ---- Fock marginal consistency at t=0
print("== fock marginals t=0 ==")
gridF = Grid(1, 2, 4.0)
params = PhysParams(N=4.0, beta=0.0, d=1)
ps = initial_data(gridF, params,
                  PhiInit(kind="gaussian", amp=1.0, center=1.0, width=0.5, momentum=0.4),
                  KInit(amp=0.25, width_rel=0.5, width_com=0.5, center=1.0))
st = reconstruct_state(ps)
print("  Npart =", particle_number(ps), " (want", params.N, ")")
basis = fock.FockBasis(2, 30)
a_ops = fock.ladder_ops(basis)
h = gridF.h
phi_lat = np.sqrt(h) * ps.phi.values
tfk = k_from_sh2(ps.sh2)
k_lat = (tfk.U * np.sinh(tfk.sigma)) @ tfk.U.T  # NOTE: operator form of k would be (U*sigma)@U.T
k_lat_correct = (tfk.U * tfk.sigma) @ tfk.U.T
psi = fock.prepare(basis, phi_lat, k_lat_correct, params.N, a_ops)
l01, l11, l02 = fock.marginals(psi, params.N, h, a_ops)
print("  tail:", psi.tail)
print("  |L01-phi|:", np.max(np.abs(l01 - ps.phi.values)))
print("  |L11-gamma|:", np.max(np.abs(l11 - st.gamma.values)))
print("  |L02-lambda|:", np.max(np.abs(l02 - st.lam.values)))

# energy vs exact <H>
pot = scale_potential(GaussianProfile(0.35, 1.0), params, gridF)
H = fock.hamiltonian(basis, h, pot.pair_matrix, params.N)
e_exact = -np.real(np.vdot(psi.amplitudes, H.matrix @ psi.amplitudes))
e_model = energy(ps, pot, dispersion='lattice')
print("  energy model", e_model, "exact", e_exact, "diff", abs(e_model - e_exact))
nop = sum(a.conj().T @ a for a in a_ops)
n_exact = np.real(np.vdot(psi.amplitudes, nop @ psi.amplitudes))
print("  Npart exact", n_exact)

# ---- conservation under GM flow (small grid)
print("== conservation, GM flow ==")
grid = Grid(1, 32, 16.0)
params2 = PhysParams(N=50.0, beta=0.3, d=1)
pot2 = scale_potential(GaussianProfile(1.0, 1.0), params2, grid)
ps0 = initial_data(grid, params2,
                   PhiInit(amp=1.0, center=8.0, width=1.0, momentum=0.5),
                   KInit(amp=0.2, width_rel=1.0, width_com=1.5, center=8.0))
st0 = reconstruct_state(ps0)
n0, e0 = particle_number(ps0), energy(ps0, pot2)
sys_gm = GMSystem(grid, pot2, params2)
ctrl = StepController(dt=0.02, rtol=1e-9, max_dt=0.05, min_dt=1e-6)
traj = evolve(sys_gm, st0, 1.0, ctrl)
stT = traj.final_state
nT, eT = particle_number(stT), energy(stT, pot2)
print(f"  N drift {abs(nT-n0)/n0:.3e}  E drift {abs(eT-e0)/abs(e0):.3e}  steps {traj.accepted} rej {traj.rejected}")

# ---- pair flow cross-consistency
print("== flow cross-consistency ==")
sys_pair = PairSystem(grid, pot2, params2)
traj2 = evolve(sys_pair, ps0, 1.0, ctrl)
psT = traj2.final_state
st_from_pair = reconstruct_state(psT)
dphi = np.linalg.norm(st_from_pair.phi.values - stT.phi.values) / np.linalg.norm(stT.phi.values)
dgam = np.linalg.norm(st_from_pair.gamma.values - stT.gamma.values) / np.linalg.norm(stT.gamma.values)
dlam = np.linalg.norm(st_from_pair.lam.values - stT.lam.values) / np.linalg.norm(stT.lam.values)
print(f"  dphi {dphi:.3e} dgam {dgam:.3e} dlam {dlam:.3e}")
nP, eP = particle_number(psT), energy(psT, pot2)
print(f"  pair-flow N drift {abs(nP-n0)/n0:.3e}  E drift {abs(eP-e0)/abs(e0):.3e}")
