"""Composition algebra and the hyperbolic functional calculus on kernels.

The operator form of a kernel is ``A = h**d * K`` (values matrix times the
quadrature weight), so that composition of kernels becomes a plain matrix
product and the Takagi values of A are dimensionless.  The hyperbolic
calculus of a complex symmetric kernel k,

    sh(k) = k + k∘conj(k)∘k/3! + ...      (complex symmetric)
    ch(k) = delta + conj(k)∘k/2! + ...    = delta + p, p Hermitian PSD,

is evaluated through the Takagi factorization A = U diag(sigma) U^T:

    sh(k)_op = U sinh(sigma) U^T,    p_op = conj(U) (cosh(sigma)-1) U^T.

The delta part of ch(k) is never materialized; compose-with-ch is
``B + B∘p`` wherever it is needed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SymmetryError, TdhfbError
from .grids import Grid, Kernel, same_grid

#: relative tolerance for declaring a matrix complex symmetric
SYMMETRY_RTOL = 1e-10


def compose(a: Kernel, b: Kernel, symmetry: str = "none") -> Kernel:
    """Kernel composition (a∘b)(x, y) = integral a(x,z) b(z,y) dz.

    Discretized as ``h**d * (A @ B)`` on the value matrices; associative.
    """
    same_grid(a.grid, b.grid)
    return Kernel(a.grid, a.grid.weight * (a.values @ b.values), symmetry)


def identity_kernel(grid: Grid) -> Kernel:
    """Discrete delta: the identity of composition, values I/h**d."""
    return Kernel(grid, np.eye(grid.n) / grid.weight, "hermitian")


def operator_form(k: Kernel) -> np.ndarray:
    return k.grid.weight * k.values


def kernel_form(grid: Grid, a: np.ndarray, symmetry: str = "none") -> Kernel:
    return Kernel(grid, a / grid.weight, symmetry)


@dataclass
class TakagiFactors:
    """Takagi data of a complex symmetric operator-form matrix.

    ``A = U @ diag(sigma) @ U.T`` with U unitary and sigma >= 0 descending.
    """

    grid: Grid
    U: np.ndarray
    sigma: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.U * self.sigma) @ self.U.T


def _takagi_matrix(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Takagi factorization of a complex symmetric matrix.

    Works on the real symmetric embedding

        B = [[Re A, Im A], [Im A, -Re A]],

    whose eigenpairs come in (+sigma, -sigma) copies: an eigenvector
    [x; y] at +sigma encodes a con-eigenvector v = x + i*y with
    A conj(v) = sigma v, and the map J:[x; y] -> [-y; x] (multiplication
    by i on v) exchanges the two copies.  The strictly positive eigenvalues
    are visited in descending order; Gram-Schmidt against the previously
    accepted vectors *and their J-images* removes the (+/-)-pair mixing
    that eigh can introduce for tiny sigma, so the complex columns stay
    exactly orthonormal.  The null space (where every calculus function
    vanishes anyway) is completed in one complex QR pass.
    """
    n = a.shape[0]
    norm_a = np.linalg.norm(a)
    if norm_a == 0.0:
        return np.eye(n, dtype=np.complex128), np.zeros(n)

    b = np.block([[a.real, a.imag], [a.imag, -a.real]])
    mu, vecs = np.linalg.eigh(b)

    def jmap(w):
        return np.concatenate([-w[n:], w[:n]])

    zero_tol = 64.0 * np.finfo(float).eps * norm_a
    basis = np.empty((2 * n, 0))
    cols: list[np.ndarray] = []
    sigmas: list[float] = []
    for idx in np.argsort(mu)[::-1]:
        if mu[idx] <= zero_tol or len(cols) == n:
            break
        w = vecs[:, idx]
        for _ in range(2):
            if basis.shape[1]:
                w = w - basis @ (basis.T @ w)
        nw = np.linalg.norm(w)
        if nw < 0.5:  # fully entangled with accepted (+/-) pairs; treat as null
            continue
        w = w / nw
        basis = np.column_stack([basis, w, jmap(w)])
        cols.append(w[:n] + 1j * w[n:])
        sigmas.append(mu[idx])

    if len(cols) < n:
        # complete with a complex-orthonormal basis of the remaining
        # con-kernel; sinh/cosh-1 vanish there, only unitarity matters
        if cols:
            v = np.column_stack(cols)
            q, _ = np.linalg.qr(np.hstack([v, np.eye(n, dtype=np.complex128)]))
            comp = q[:, len(cols):n]
        else:
            comp = np.eye(n, dtype=np.complex128)
        for j in range(comp.shape[1]):
            cols.append(comp[:, j])
            sigmas.append(0.0)

    u = np.column_stack(cols)
    sigma = np.asarray(sigmas)
    order = np.argsort(-sigma, kind="stable")
    return u[:, order], sigma[order]


def takagi(k: Kernel) -> TakagiFactors:
    """Takagi-factorize a complex symmetric kernel (operator form).

    Raises SymmetryError when the operator matrix is not symmetric within
    tolerance.  Any valid factorization may be returned for degenerate
    Takagi values; derived kernels are factorization-invariant.
    """
    a = operator_form(k)
    nrm = np.linalg.norm(a)
    if nrm > 0 and np.linalg.norm(a - a.T) > SYMMETRY_RTOL * nrm:
        raise SymmetryError(
            f"kernel is not complex symmetric: residual "
            f"{np.linalg.norm(a - a.T) / nrm:.3e} exceeds {SYMMETRY_RTOL:.0e}"
        )
    a = 0.5 * (a + a.T)
    u, sigma = _takagi_matrix(a)
    return TakagiFactors(k.grid, u, sigma)


def hyperbolic_calculus(tf: TakagiFactors) -> tuple[Kernel, Kernel]:
    """Kernels sh(k) (symmetric) and p = ch(k) - delta (Hermitian PSD)."""
    grid = tf.grid
    sh_op = (tf.U * np.sinh(tf.sigma)) @ tf.U.T
    p_op = (tf.U.conj() * (np.cosh(tf.sigma) - 1.0)) @ tf.U.T
    return kernel_form(grid, sh_op, "symmetric"), kernel_form(grid, p_op, "hermitian")


def double_angle(tf: TakagiFactors) -> tuple[Kernel, Kernel]:
    """Kernels sh(2k) and p2 = ch(2k) - delta from the factors of k."""
    grid = tf.grid
    sh2_op = (tf.U * np.sinh(2.0 * tf.sigma)) @ tf.U.T
    p2_op = (tf.U.conj() * (np.cosh(2.0 * tf.sigma) - 1.0)) @ tf.U.T
    return kernel_form(grid, sh2_op, "symmetric"), kernel_form(grid, p2_op, "hermitian")


def k_from_sh2(sh2: Kernel) -> TakagiFactors:
    """Invert the double-angle map: factors of k given the kernel sh(2k).

    Takagi values mu of sh(2k) give sigma = arcsinh(mu)/2 with the same
    Takagi vectors, so double_angle(k_from_sh2(s)) reproduces s.
    """
    tf = takagi(sh2)
    return TakagiFactors(tf.grid, tf.U, 0.5 * np.arcsinh(tf.sigma))
