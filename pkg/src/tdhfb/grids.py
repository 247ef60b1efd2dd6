"""Periodic grids and Fourier-multiplier machinery for fields and kernels.

Conventions, fixed once for the whole package:

* forward transform is the unnormalized ``numpy.fft.fftn``; the inverse
  carries the ``1/M**d`` factor, so Parseval reads
  ``h**d * sum|f|**2 == (h**d / M**d) * sum|fhat|**2``;
* all L2-type norms carry explicit ``h**d`` quadrature weights;
* a kernel ``K`` stores point values ``K[i, j] ~ k(x_i, x_j)`` on the
  flattened grid; its two axes are transformed independently;
* evolution equations are written as ``du/dt = i*(signed Laplacians)u + i*F``,
  so ``free_propagator`` applies ``exp(i*t*sum_a s_a * Lap_axis_a)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import GridMismatchError, NumericDomainError, TdhfbError

Symbol = Callable[..., np.ndarray]


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on a box of side L with M points per axis.

    Parameters
    ----------
    d : spatial dimension (1 or 2)
    M : points per axis, a power of two
    L : box length (dimensionless units with hbar = m = 1)
    """

    d: int = 1
    M: int = 128
    L: float = 16.0

    def __post_init__(self):
        if self.d not in (1, 2):
            raise TdhfbError(f"dimension must be 1 or 2, got {self.d}")
        if self.M < 2 or (self.M & (self.M - 1)) != 0:
            raise TdhfbError(f"M must be an even power of two, got {self.M}")
        if not (self.L > 0):
            raise TdhfbError(f"box length must be positive, got {self.L}")

    @property
    def h(self) -> float:
        return self.L / self.M

    @property
    def n(self) -> int:
        """Total number of grid points, M**d."""
        return self.M**self.d

    @property
    def weight(self) -> float:
        """Quadrature weight h**d of one grid cell."""
        return self.h**self.d

    @property
    def x(self) -> np.ndarray:
        """Coordinates along one axis, x_j = j*h."""
        return self.h * np.arange(self.M)

    @property
    def xi(self) -> np.ndarray:
        """FFT-ordered frequencies xi_n = 2*pi*n/L along one axis."""
        return 2.0 * np.pi * np.fft.fftfreq(self.M, d=self.h)

    def coord_mesh(self) -> tuple[np.ndarray, ...]:
        return np.meshgrid(*([self.x] * self.d), indexing="ij")

    def freq_mesh(self) -> tuple[np.ndarray, ...]:
        return np.meshgrid(*([self.xi] * self.d), indexing="ij")

    def symbol_array(self, symbol: Symbol | np.ndarray) -> np.ndarray:
        """Evaluate a symbol on the frequency lattice (shape (M,)*d)."""
        if isinstance(symbol, np.ndarray):
            arr = symbol
        else:
            arr = np.asarray(symbol(*self.freq_mesh()))
        arr = np.broadcast_to(arr, (self.M,) * self.d)
        if not np.all(np.isfinite(arr)):
            raise NumericDomainError("multiplier symbol is not finite on the grid")
        return arr

    def laplacian_symbol(self, dispersion: str = "spectral") -> np.ndarray:
        """Symbol of the Laplacian: -|xi|^2, or its nearest-neighbor analogue.

        The "lattice" dispersion -(4/h^2) sin^2(xi*h/2) is the exact Fourier
        symbol of the second-difference stencil; it is used when matching a
        small-lattice many-body computation.
        """
        mesh = self.freq_mesh()
        if dispersion == "spectral":
            return -sum(m**2 for m in mesh)
        if dispersion == "lattice":
            return -sum((4.0 / self.h**2) * np.sin(m * self.h / 2.0) ** 2 for m in mesh)
        raise TdhfbError(f"unknown dispersion {dispersion!r}")

    def min_image(self, delta: np.ndarray) -> np.ndarray:
        """Map coordinate differences into (-L/2, L/2]."""
        return delta - self.L * np.round(delta / self.L)


@dataclass
class Field:
    """Complex scalar field sampled on a grid (values shape (M,)*d)."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.complex128)
        if self.values.shape != (self.grid.M,) * self.grid.d:
            raise TdhfbError(
                f"field shape {self.values.shape} does not match grid {(self.grid.M,) * self.grid.d}"
            )

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy())

    def l2_norm(self) -> float:
        return float(np.sqrt(self.grid.weight * np.sum(np.abs(self.values) ** 2)))


SYMMETRY_TAGS = ("symmetric", "hermitian", "none")


@dataclass
class Kernel:
    """Complex two-point function K[i, j] ~ k(x_i, x_j) on grid x grid.

    ``symmetry_tag`` declares the structural property the kernel is supposed
    to carry ("symmetric": K = K^T, "hermitian": K = K^dagger, or "none").
    The tag is metadata; residuals are checked where contracts require it.
    """

    grid: Grid
    values: np.ndarray
    symmetry_tag: str = "none"

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.complex128)
        n = self.grid.n
        if self.values.shape != (n, n):
            raise TdhfbError(f"kernel shape {self.values.shape} does not match grid ({n}, {n})")
        if self.symmetry_tag not in SYMMETRY_TAGS:
            raise TdhfbError(f"unknown symmetry tag {self.symmetry_tag!r}")

    def copy(self) -> "Kernel":
        return Kernel(self.grid, self.values.copy(), self.symmetry_tag)

    def l2_norm(self) -> float:
        """L2(dx dy) norm: carries h**(2d)."""
        return float(np.sqrt(self.grid.weight**2 * np.sum(np.abs(self.values) ** 2)))

    def symmetry_residual(self) -> float:
        """Relative deviation from the declared symmetry (0 for tag "none")."""
        nrm = np.linalg.norm(self.values)
        if nrm == 0.0 or self.symmetry_tag == "none":
            return 0.0
        if self.symmetry_tag == "symmetric":
            return float(np.linalg.norm(self.values - self.values.T) / nrm)
        return float(np.linalg.norm(self.values - self.values.conj().T) / nrm)


def same_grid(a: Grid, b: Grid) -> None:
    if a != b:
        raise GridMismatchError(f"grid mismatch: {a} vs {b}")


def _axis_fft(grid: Grid, values: np.ndarray, axis: int, inverse: bool = False) -> np.ndarray:
    """FFT of one kernel axis (axis 0 or 1), handling d-dim flattening."""
    M, d, n = grid.M, grid.d, grid.n
    work = values.reshape((M,) * d + (n,)) if axis == 0 else values.reshape((n,) + (M,) * d)
    axes = tuple(range(d)) if axis == 0 else tuple(range(1, d + 1))
    work = np.fft.ifftn(work, axes=axes) if inverse else np.fft.fftn(work, axes=axes)
    return work.reshape(n, n)


def _apply_kernel_axis_multiplier(grid: Grid, values: np.ndarray, sym: np.ndarray, axis: int) -> np.ndarray:
    M, d, n = grid.M, grid.d, grid.n
    hat = _axis_fft(grid, values, axis)
    if axis == 0:
        hat = (sym.reshape(n, 1)) * hat
    else:
        hat = hat * sym.reshape(1, n)
    return _axis_fft(grid, hat, axis, inverse=True)


def fourier_multiplier(f, symbol: Symbol | np.ndarray, axes: Sequence[int] | None = None):
    """Apply a Fourier multiplier to a Field or a Kernel.

    For a Field the multiplier acts on the full transform.  For a Kernel,
    ``axes`` selects which of the two kernel slots it acts on (default both);
    the same symbol is used per selected axis.  Exact on band-limited data.
    """
    if isinstance(f, Field):
        sym = f.grid.symbol_array(symbol)
        out = np.fft.ifftn(sym * np.fft.fftn(f.values))
        return Field(f.grid, out)
    if isinstance(f, Kernel):
        sym = f.grid.symbol_array(symbol)
        use_axes = (0, 1) if axes is None else tuple(axes)
        vals = f.values
        for ax in use_axes:
            vals = _apply_kernel_axis_multiplier(f.grid, vals, sym, ax)
        return Kernel(f.grid, vals, f.symmetry_tag)
    raise TdhfbError(f"fourier_multiplier expects Field or Kernel, got {type(f)!r}")


def free_propagator(f, t: float, signature: Sequence[int], dispersion: str = "spectral"):
    """Apply exp(i*t*(s1*Lap_x [+ s2*Lap_y])) to a Field or Kernel.

    ``signature`` holds one sign per kernel slot (one entry for a Field).
    Unitary in L2 for either dispersion.
    """
    lap = f.grid.laplacian_symbol(dispersion)
    if isinstance(f, Field):
        (s1,) = signature
        return fourier_multiplier(f, np.exp(1j * t * s1 * lap))
    s1, s2 = signature
    vals = _apply_kernel_axis_multiplier(f.grid, f.values, np.exp(1j * t * s1 * lap), 0)
    vals = _apply_kernel_axis_multiplier(f.grid, vals, np.exp(1j * t * s2 * lap), 1)
    return Kernel(f.grid, vals, f.symmetry_tag)


def frac_sobolev_norm(f, s: float, inhomogeneous: bool = True) -> float:
    """Fractional Sobolev norm of order s >= 0.

    Fields: ``||<grad>^s f||_L2`` with multiplier (1+|xi|^2)^(s/2), or the
    homogeneous ``|||grad|^s f||`` with |xi|^s.  Kernels: the multiplier is
    applied per axis with the same order.
    """
    if s < 0:
        raise TdhfbError(f"Sobolev order must be nonnegative, got {s}")
    grid = f.grid

    def mult(*xi):
        q = sum(x**2 for x in xi)
        return (1.0 + q) ** (s / 2.0) if inhomogeneous else q ** (s / 2.0)

    g = fourier_multiplier(f, mult)
    return g.l2_norm()


def gradient_norm_sq(f, dispersion: str = "spectral") -> float:
    """``||grad f||_L2^2 = <f, (-Lap) f>`` with the chosen dispersion symbol.

    For kernels, sums the contributions of the slot-x and slot-y gradients.
    """
    grid = f.grid
    root = np.sqrt(-grid.laplacian_symbol(dispersion))
    if isinstance(f, Field):
        return fourier_multiplier(f, root).l2_norm() ** 2
    total = 0.0
    for ax in (0, 1):
        total += fourier_multiplier(f, root, axes=(ax,)).l2_norm() ** 2
    return total


def plane_wave(grid: Grid, mode: Sequence[int] | int, amplitude: complex = 1.0) -> Field:
    """Grid plane wave amplitude * exp(i xi_m . x) for integer mode numbers."""
    modes = (mode,) * grid.d if np.isscalar(mode) else tuple(mode)
    xs = grid.coord_mesh()
    phase = sum((2.0 * np.pi * m / grid.L) * x for m, x in zip(modes, xs))
    return Field(grid, amplitude * np.exp(1j * phase))


def field_outer(a: Field, b: Field, conjugate_first: bool = False, symmetry: str = "none") -> Kernel:
    """Rank-one kernel K[i, j] = a_i b_j (optionally conj(a)_i b_j)."""
    same_grid(a.grid, b.grid)
    av = a.values.reshape(-1)
    if conjugate_first:
        av = av.conj()
    return Kernel(a.grid, np.outer(av, b.values.reshape(-1)), symmetry)
