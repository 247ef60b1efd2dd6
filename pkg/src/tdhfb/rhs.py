"""Forcing terms of the coupled evolution equations.

Single sign convention used everywhere in this package: every component u
evolves as

    du/dt = i * (signed Laplacians) u + i * F(u),

with per-slot Laplacian signatures

    phi : (+1)         gamma : (-1, +1)        lambda, sh2 : (+1, +1).

The functions below return F.  For lambda, the explicit interaction term
-(1/N) v_N(x1-x2) lambda(x1,x2) belongs to the operator side of its
equation and is returned separately by :func:`lambda_vn_term` so the
integrator can fold it into the nonlinear forcing.

In the pair representation, the forcing of sh(2k) is

    F = -2 (v_N Λ) - (v_N Λ)∘p2 - conj(p2)∘(v_N Λ)
        - [(v_N * rho)(x1) + (v_N * rho)(x2)] sh2
        - (v_N Γ^T)∘sh2 - sh2∘(v_N Γ),

where (v_N A)(x,y) := v_N(x-y) A(x,y);  the transpose on the left-composed
Γ is what keeps sh2 complex symmetric (Γ^T = conj(Γ) for Hermitian Γ).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grids import Field, Grid, Kernel, same_grid
from .kernels import double_angle, hyperbolic_calculus, k_from_sh2
from .model import PairState, Potential, State, field_outer

VARIANTS = ("hermitian", "literal")


@dataclass(frozen=True)
class RhsVariant:
    """Conjugation choice for the condensate source term of the gamma equation."""

    mode: str = "hermitian"

    def __post_init__(self):
        if self.mode not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.mode!r}")


def convolve_density(pot: Potential, f: Field) -> Field:
    """(v_N * f)(x) = integral v_N(x-y) f(y) dy, via FFT with h**d weight."""
    same_grid(pot.grid, f.grid)
    out = np.fft.ifftn(pot.samples_hat * np.fft.fftn(f.values)) * pot.grid.weight
    return Field(f.grid, out)


def _convolve_flat(pot: Potential, flat: np.ndarray) -> np.ndarray:
    grid = pot.grid
    shaped = flat.reshape((grid.M,) * grid.d)
    out = np.fft.ifftn(pot.samples_hat * np.fft.fftn(shaped)) * grid.weight
    return out.reshape(-1)


def rhs_phi(st: State, pot: Potential) -> Field:
    """Condensate forcing: Hartree term plus exchange and pairing couplings."""
    grid = st.grid
    h = grid.weight
    phi = st.phi.values.reshape(-1)
    gam = st.gamma.values
    lam = st.lam.values
    v = pot.pair_matrix

    rho = np.real(np.diagonal(gam))
    w_rho = np.real(_convolve_flat(pot, rho.astype(np.complex128)))
    w_phi2 = np.real(_convolve_flat(pot, (np.abs(phi) ** 2).astype(np.complex128)))

    exch = h * np.einsum("xy,yx->x", v, gam * phi[:, None]) - w_phi2 * phi
    pair = h * ((v * lam) @ phi.conj()) - w_phi2 * phi
    force = -w_rho * phi - exch - pair
    return Field(grid, force.reshape((grid.M,) * grid.d))


def rhs_gamma(st: State, pot: Potential, variant: RhsVariant = RhsVariant()) -> Kernel:
    """Forcing G of the normal kernel, Hermitian-compatible orientation.

    Built so that one Euler step gamma + dt*(i(Lap2-Lap1)gamma + iG) keeps
    gamma Hermitian (in hermitian mode) and so that a pure condensate
    follows the exact product rule of the Hartree flow.
    """
    grid = st.grid
    h = grid.weight
    phi = st.phi.values.reshape(-1)
    gam = st.gamma.values
    lam = st.lam.values
    v = pot.pair_matrix

    rho = np.real(np.diagonal(gam))
    c = np.real(_convolve_flat(pot, rho.astype(np.complex128)))
    w = np.real(_convolve_flat(pot, (np.abs(phi) ** 2).astype(np.complex128)))

    # for symmetric lam and Hermitian gam:
    #   lam_bar∘(v lam) = [(v lam_bar)∘lam]^dagger,  gam∘(v gam) = [(v gam)∘gam]^dagger,
    # which halves the matrix products and makes G + G^dagger vanish exactly
    # on the composition terms (the structure that preserves Hermiticity)
    ta = (v * lam.conj()) @ lam
    tb = (v * gam) @ gam
    g = h * (ta - ta.conj().T + tb - tb.conj().T)
    g += (c[:, None] - c[None, :]) * gam
    if variant.mode == "hermitian":
        src = np.outer(phi.conj(), phi)
    else:
        src = np.outer(phi, phi)
    g -= 2.0 * (w[:, None] - w[None, :]) * src
    return Kernel(grid, g, "none")


def rhs_lambda(st: State, pot: Potential) -> Kernel:
    """Forcing of the pairing kernel (excluding the explicit (1/N) v_N term)."""
    grid = st.grid
    h = grid.weight
    phi = st.phi.values.reshape(-1)
    gam = st.gamma.values
    lam = st.lam.values
    v = pot.pair_matrix

    rho = np.real(np.diagonal(gam))
    c = np.real(_convolve_flat(pot, rho.astype(np.complex128)))
    w = np.real(_convolve_flat(pot, (np.abs(phi) ** 2).astype(np.complex128)))

    # for symmetric lam and Hermitian gam:
    #   gam_bar∘(v lam) = [(v lam)∘gam]^T,  (v gam_bar)∘lam = [lam∘(v gam)]^T,
    # so the four compositions reduce to two and the result is symmetric
    # by construction
    t = (v * lam) @ gam + lam @ (v * gam)
    f = -(c[:, None] + c[None, :]) * lam
    f -= h * (t + t.T)
    f += 2.0 * (w[:, None] + w[None, :]) * np.outer(phi, phi)
    return Kernel(grid, f, "symmetric")


def lambda_vn_term(st: State, pot: Potential) -> np.ndarray:
    """The operator-side term -(1/N) v_N(x1-x2) lambda, as raw values."""
    return -(1.0 / st.params.N) * pot.pair_matrix * st.lam.values


def reconstruct_for_rhs(ps: PairState) -> tuple[State, Kernel]:
    """Reconstruct the triple plus p2 = ch(2k) - delta from a pair state."""
    grid = ps.grid
    n_inv = 1.0 / ps.params.N
    tf = k_from_sh2(ps.sh2)
    sh, _ = hyperbolic_calculus(tf)
    _, p2 = double_angle(tf)
    lam = Kernel(grid, field_outer(ps.phi, ps.phi).values + 0.5 * n_inv * ps.sh2.values,
                 "symmetric")
    pair_part = grid.weight * (sh.values.conj() @ sh.values)
    gam = Kernel(grid, field_outer(ps.phi, ps.phi, conjugate_first=True).values
                 + n_inv * pair_part, "hermitian")
    return State(ps.phi, gam, lam, ps.params), p2


def rhs_sh2(ps: PairState, pot: Potential, recon: tuple[State, Kernel] | None = None) -> Kernel:
    """Forcing of sh(2k); reconstructs gamma, lambda, p2 unless provided."""
    grid = ps.grid
    h = grid.weight
    st, p2 = recon if recon is not None else reconstruct_for_rhs(ps)
    v = pot.pair_matrix
    lam = st.lam.values
    gam = st.gamma.values
    sh2 = ps.sh2.values

    rho = np.real(np.diagonal(gam))
    c = np.real(_convolve_flat(pot, rho.astype(np.complex128)))

    # p2 Hermitian and v lam symmetric give conj(p2)∘(v lam) = [(v lam)∘p2]^T;
    # likewise sh2∘(v gam) = [(v gam^T)∘sh2]^T, keeping the forcing symmetric
    vlam = v * lam
    t = vlam @ p2.values + (v * gam.T) @ sh2
    f = -2.0 * vlam - h * (t + t.T)
    f -= (c[:, None] + c[None, :]) * sh2
    return Kernel(grid, f, "symmetric")


def rhs_pair(ps: PairState, pot: Potential) -> tuple[Field, Kernel]:
    """Forcings of both pair-flow components, sharing one reconstruction."""
    recon = reconstruct_for_rhs(ps)
    return rhs_phi(recon[0], pot), rhs_sh2(ps, pot, recon)


def rhs_hartree(phi: Field, pot: Potential) -> Field:
    """Condensate-only reference forcing -(v_N * |phi|^2) phi."""
    w = np.real(np.fft.ifftn(pot.samples_hat * np.fft.fftn(np.abs(phi.values) ** 2))
                * phi.grid.weight)
    return Field(phi.grid, -w * phi.values)
