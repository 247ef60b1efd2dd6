"""Physical parameters, scaled interaction, state containers, initial data.

Two equivalent state representations are used.  The default dynamical
object is the triple (phi, gamma, lambda); the pair representation carries
(phi, sh2) and reproduces the triple through

    gamma  = conj(phi) ⊗ phi + compose(conj(sh(k)), sh(k)) / N
    lambda = phi ⊗ phi + sh2 / (2 N),          sh2 = sh(2k).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainTooSmallError, TdhfbError
from .grids import Field, Grid, Kernel, field_outer, plane_wave, same_grid
from .kernels import compose, double_angle, hyperbolic_calculus, k_from_sh2, takagi


@dataclass(frozen=True)
class PhysParams:
    """Particle number N, scaling exponent beta, spatial dimension d.

    The Sobolev offset epsilon is derived from beta, never set directly.
    """

    N: float
    beta: float
    d: int = 1

    def __post_init__(self):
        if not (self.N > 0):
            raise TdhfbError(f"N must be positive, got {self.N}")
        if not (0.0 <= self.beta < 2.0 / 3.0):
            raise TdhfbError(f"beta must lie in [0, 2/3), got {self.beta}")

    @property
    def epsilon(self) -> float:
        return 1.0 / (2.0 * (1.0 + 8.0 * self.beta))

    @property
    def sobolev_order(self) -> float:
        """Default monitor order 1/2 + epsilon."""
        return 0.5 + self.epsilon


@dataclass(frozen=True)
class GaussianProfile:
    """Nonnegative base interaction v(x) = strength * exp(-|x|^2 / 2 sigma^2)."""

    sigma: float = 1.0
    strength: float = 1.0

    def __post_init__(self):
        if self.sigma <= 0 or self.strength < 0:
            raise TdhfbError("Gaussian profile needs sigma > 0 and strength >= 0")

    def __call__(self, r2: np.ndarray) -> np.ndarray:
        """Evaluate at squared radius r2."""
        return self.strength * np.exp(-r2 / (2.0 * self.sigma**2))

    def integral(self, d: int) -> float:
        return self.strength * (self.sigma * math.sqrt(2.0 * math.pi)) ** d


@dataclass
class Potential:
    """The scaled interaction v_N(x) = N^(d*beta) v(N^beta x), periodized.

    Holds the samples on the field grid, their FFT (for convolutions), and
    the pair matrix v_N(x_i - x_j) used by the kernel equations.
    """

    grid: Grid
    profile: GaussianProfile
    params: PhysParams
    samples: np.ndarray
    integral: float
    pair_matrix: np.ndarray = field(repr=False, default=None)
    samples_hat: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        if self.pair_matrix is None:
            idx = np.arange(self.grid.M)
            diff = (idx[:, None] - idx[None, :]) % self.grid.M
            if self.grid.d == 1:
                self.pair_matrix = self.samples[diff]
            else:
                flat = np.arange(self.grid.n)
                i0, i1 = np.divmod(flat, self.grid.M)
                d0 = (i0[:, None] - i0[None, :]) % self.grid.M
                d1 = (i1[:, None] - i1[None, :]) % self.grid.M
                self.pair_matrix = self.samples[d0, d1]
        if self.samples_hat is None:
            self.samples_hat = np.fft.fftn(self.samples)

    @property
    def is_zero(self) -> bool:
        return float(np.max(np.abs(self.samples))) == 0.0


def zero_potential(grid: Grid, params: PhysParams) -> Potential:
    """Free dynamics: v identically zero."""
    prof = GaussianProfile(sigma=1.0, strength=0.0)
    return Potential(grid, prof, params, np.zeros((grid.M,) * grid.d), 0.0)


def scale_potential(profile: GaussianProfile, params: PhysParams, grid: Grid,
                    images: int = 6) -> Potential:
    """Sample the scaled potential on the grid with wrapped-image periodization.

    The Gaussian tail makes the image sum converge fast; construction fails
    when the wrap-around correction exceeds 1e-6 of the peak (the box is
    then too small for this profile at this N).
    """
    if profile.strength == 0.0:
        return zero_potential(grid, params)
    nb = params.N**params.beta
    amp = params.N ** (grid.d * params.beta)
    xs = grid.coord_mesh()

    def sample_with_images(n_im: int) -> np.ndarray:
        total = np.zeros((grid.M,) * grid.d)
        rng = grid.L * np.arange(-n_im, n_im + 1)
        for offs in np.array(np.meshgrid(*([rng] * grid.d), indexing="ij")).reshape(grid.d, -1).T:
            r2 = sum((x - grid.L / 2.0 - o) ** 2 for x, o in zip(xs, offs))
            total += profile((nb**2) * r2)
        return amp * total

    # center the principal image at L/2 so min-image distances are exact,
    # then roll back so samples[0] corresponds to x = 0
    per = sample_with_images(images)
    principal = amp * profile((nb**2) * sum((x - grid.L / 2.0) ** 2 for x in xs))
    correction = float(np.max(per - principal))
    peak = amp * profile.strength
    if correction > 1e-6 * peak:
        raise DomainTooSmallError(
            f"periodization correction {correction:.3e} exceeds 1e-6 of peak {peak:.3e}; "
            f"profile too wide for L={grid.L} at N={params.N}, beta={params.beta}"
        )
    tail_check = sample_with_images(images + 2)
    if float(np.max(np.abs(tail_check - per))) > 1e-14 * peak:
        per = tail_check
    samples = np.roll(per, shift=(-(grid.M // 2),) * grid.d, axis=tuple(range(grid.d)))
    integral = grid.weight * float(np.sum(samples))
    return Potential(grid, profile, params, samples, integral)


@dataclass
class State:
    """Dynamical triple: condensate field and the two-point kernels."""

    phi: Field
    gamma: Kernel
    lam: Kernel
    params: PhysParams

    def __post_init__(self):
        same_grid(self.phi.grid, self.gamma.grid)
        same_grid(self.phi.grid, self.lam.grid)

    @property
    def grid(self) -> Grid:
        return self.phi.grid

    def density(self) -> np.ndarray:
        """Position density rho(x) = gamma(x, x), returned real."""
        return np.real(np.diagonal(self.gamma.values))

    def copy(self) -> "State":
        return State(self.phi.copy(), self.gamma.copy(), self.lam.copy(), self.params)


@dataclass
class PairState:
    """Alternative dynamical pair: condensate field and sh(2k)."""

    phi: Field
    sh2: Kernel
    params: PhysParams

    def __post_init__(self):
        same_grid(self.phi.grid, self.sh2.grid)

    @property
    def grid(self) -> Grid:
        return self.phi.grid

    def copy(self) -> "PairState":
        return PairState(self.phi.copy(), self.sh2.copy(), self.params)


def reconstruct_state(ps: PairState) -> State:
    """Build the (phi, gamma, lambda) triple from a pair state."""
    n_inv = 1.0 / ps.params.N
    lam = Kernel(ps.grid, field_outer(ps.phi, ps.phi).values + 0.5 * n_inv * ps.sh2.values,
                 "symmetric")
    tf = k_from_sh2(ps.sh2)
    sh, _ = hyperbolic_calculus(tf)
    pair_part = compose(Kernel(ps.grid, sh.values.conj(), "symmetric"), sh)
    gamma = Kernel(ps.grid, field_outer(ps.phi, ps.phi, conjugate_first=True).values
                   + n_inv * pair_part.values, "hermitian")
    return State(ps.phi.copy(), gamma, lam, ps.params)


def pair_from_state(st: State) -> PairState:
    """Extract (phi, sh2) from a triple via sh2 = 2N*(lambda - phi⊗phi)."""
    sh2_vals = 2.0 * st.params.N * (st.lam.values - field_outer(st.phi, st.phi).values)
    sh2_vals = 0.5 * (sh2_vals + sh2_vals.T)
    return PairState(st.phi.copy(), Kernel(st.grid, sh2_vals, "symmetric"), st.params)


@dataclass(frozen=True)
class PhiInit:
    kind: str = "gaussian"       # "gaussian" or "plane_wave"
    amp: float = 1.0
    center: float = 8.0
    width: float = 1.0
    momentum: float = 0.5
    mode: int = 1                # plane-wave mode number

@dataclass(frozen=True)
class KInit:
    kind: str = "gaussian"
    amp: float = 0.2
    width_rel: float = 1.0
    width_com: float = 1.5
    center: float = 8.0
    mode: int = 1


def _gaussian_field(grid: Grid, cfg: PhiInit) -> Field:
    xs = grid.coord_mesh()
    r2 = sum(grid.min_image(x - cfg.center) ** 2 for x in xs)
    envelope = cfg.amp * np.exp(-r2 / (2.0 * cfg.width**2))
    phase = sum(cfg.momentum * x for x in xs)
    return Field(grid, envelope * np.exp(1j * phase))


def _gaussian_pair_kernel(grid: Grid, cfg: KInit) -> Kernel:
    x = grid.x
    if grid.d == 1:
        xi, xj = np.meshgrid(x, x, indexing="ij")
        rel = grid.min_image(xi - xj)
        com = grid.min_image(0.5 * (xi + xj) - cfg.center)
        vals = cfg.amp * np.exp(-rel**2 / (2.0 * cfg.width_rel**2)
                                - com**2 / (2.0 * cfg.width_com**2))
    else:
        pts = np.stack([m.reshape(-1) for m in grid.coord_mesh()], axis=1)
        rel = grid.min_image(pts[:, None, :] - pts[None, :, :])
        com = grid.min_image(0.5 * (pts[:, None, :] + pts[None, :, :]) - cfg.center)
        vals = cfg.amp * np.exp(-np.sum(rel**2, axis=-1) / (2.0 * cfg.width_rel**2)
                                - np.sum(com**2, axis=-1) / (2.0 * cfg.width_com**2))
    vals = 0.5 * (vals + vals.T)
    return Kernel(grid, vals.astype(np.complex128), "symmetric")


def initial_data(grid: Grid, params: PhysParams, phi_cfg: PhiInit, k_cfg: KInit) -> PairState:
    """Smooth initial pair state, rescaled so the particle number is exactly N.

    phi is a Gaussian packet (or plane wave); k is a symmetric two-point
    Gaussian in relative and center-of-mass coordinates.  After building
    sh(2k), the condensate amplitude absorbs the pair-sector population so
    that N*(||phi||^2 + ||sh(k)||^2 / N) == N.
    """
    for name, width in (("phi", phi_cfg.width if phi_cfg.kind == "gaussian" else 0.0),
                        ("k_rel", k_cfg.width_rel if k_cfg.amp else 0.0),
                        ("k_com", k_cfg.width_com if k_cfg.amp else 0.0)):
        if width > grid.L / 8.0:
            raise DomainTooSmallError(f"init width {name}={width} exceeds L/8={grid.L / 8.0}")

    if phi_cfg.kind == "plane_wave":
        phi = plane_wave(grid, phi_cfg.mode, phi_cfg.amp)
    elif phi_cfg.kind == "gaussian":
        phi = _gaussian_field(grid, phi_cfg)
    else:
        raise TdhfbError(f"unknown phi init kind {phi_cfg.kind!r}")

    if k_cfg.amp == 0.0:
        sh2 = Kernel(grid, np.zeros((grid.n, grid.n)), "symmetric")
        sh_norm_sq = 0.0
    else:
        if k_cfg.kind == "plane_wave":
            pw = plane_wave(grid, k_cfg.mode, 1.0)
            k0 = Kernel(grid, k_cfg.amp * np.outer(pw.values.reshape(-1),
                                                   pw.values.reshape(-1)), "symmetric")
        else:
            k0 = _gaussian_pair_kernel(grid, k_cfg)
        tf = takagi(k0)
        sh, _ = hyperbolic_calculus(tf)
        sh2, _ = double_angle(tf)
        sh_norm_sq = sh.l2_norm() ** 2

    condensate_mass = 1.0 - sh_norm_sq / params.N
    if condensate_mass <= 0.0:
        raise TdhfbError(
            f"pair sector alone carries {sh_norm_sq:.3g} particles >= N={params.N}; "
            "reduce the k amplitude or raise N"
        )
    nrm = phi.l2_norm()
    if nrm == 0.0:
        raise TdhfbError("initial phi must not vanish")
    phi = Field(grid, phi.values * (math.sqrt(condensate_mass) / nrm))
    return PairState(phi, sh2, params)
