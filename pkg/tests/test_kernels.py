"""Kernel composition and the sh/ch calculus."""
import numpy as np
import pytest

from tdhfb.errors import SymmetryError
from tdhfb.grids import Grid, Kernel
from tdhfb.kernels import (TakagiFactors, compose, double_angle, hyperbolic_calculus,
                           identity_kernel, k_from_sh2, kernel_form, operator_form, takagi)

from .conftest import random_kernel


def test_compose_identity(grid):
    rng = np.random.default_rng(0)
    b = random_kernel(rng, grid)
    out = compose(identity_kernel(grid), b)
    np.testing.assert_allclose(out.values, b.values, atol=1e-10)


def test_compose_small_grid_hand_sum():
    # 2x2 grid: (a∘b)[i,j] = h * sum_z a[i,z] b[z,j], written out by hand
    g = Grid(d=1, M=2, L=2.0)  # h = 1
    a = Kernel(g, np.array([[1.0 + 1j, 2.0], [0.5, -1j]]))
    b = Kernel(g, np.array([[2.0, 1j], [1.0, 3.0]]))
    out = compose(a, b)
    expect = np.array([
        [(1 + 1j) * 2 + 2 * 1, (1 + 1j) * 1j + 2 * 3],
        [0.5 * 2 + (-1j) * 1, 0.5 * 1j + (-1j) * 3],
    ])
    np.testing.assert_allclose(out.values, expect, atol=1e-14)


def test_compose_associative(grid):
    rng = np.random.default_rng(1)
    a, b, c = (random_kernel(rng, grid) for _ in range(3))
    left = compose(compose(a, b), c)
    right = compose(a, compose(b, c))
    assert np.linalg.norm(left.values - right.values) < 1e-12 * np.linalg.norm(left.values)


def test_takagi_zero_kernel(grid):
    k = Kernel(grid, np.zeros((grid.n, grid.n)), "symmetric")
    tf = takagi(k)
    np.testing.assert_array_equal(tf.sigma, 0.0)
    np.testing.assert_array_equal(tf.U, np.eye(grid.n))


def test_takagi_rank_one_real(grid):
    rng = np.random.default_rng(2)
    u = rng.normal(size=grid.n)
    u /= np.linalg.norm(u)
    c = 0.7
    k = kernel_form(grid, c * np.outer(u, u), "symmetric")
    tf = takagi(k)
    assert tf.sigma[0] == pytest.approx(c, rel=1e-12)
    assert np.max(tf.sigma[1:]) < 1e-12
    overlap = abs(np.vdot(tf.U[:, 0], u))
    assert overlap == pytest.approx(1.0, abs=1e-10)


def test_takagi_reconstruction_and_unitarity(grid):
    rng = np.random.default_rng(3)
    for trial in range(5):
        k = random_kernel(rng, grid, "symmetric", op_norm=rng.uniform(0.5, 5.0))
        a = operator_form(k)
        tf = takagi(k)
        assert np.linalg.norm(tf.reconstruct() - a) <= 1e-10 * np.linalg.norm(a)
        assert np.max(np.abs(tf.U.conj().T @ tf.U - np.eye(grid.n))) < 1e-10
        assert np.all(np.diff(tf.sigma) <= 1e-14)
        # A conj(A) = U sigma^2 U^dagger
        lhs = a @ a.conj()
        rhs = (tf.U * tf.sigma**2) @ tf.U.conj().T
        assert np.linalg.norm(lhs - rhs) <= 1e-10 * max(np.linalg.norm(lhs), 1.0)


def test_takagi_degenerate_and_tiny_values(grid):
    # planted spectrum with a degenerate block and values sweeping past eps
    rng = np.random.default_rng(4)
    n = grid.n
    q, _ = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    sig = np.abs(rng.normal(size=n))
    sig[:6] = 1.5
    sig[-12:] = 10.0 ** -np.arange(5, 17)
    a = (q * sig) @ q.T
    tf = takagi(kernel_form(grid, a, "symmetric"))
    assert np.linalg.norm(tf.reconstruct() - a) <= 1e-10 * np.linalg.norm(a)
    assert np.max(np.abs(tf.U.conj().T @ tf.U - np.eye(n))) < 1e-10


def test_takagi_rejects_asymmetric(grid):
    rng = np.random.default_rng(5)
    k = random_kernel(rng, grid)  # no symmetry
    with pytest.raises(SymmetryError):
        takagi(k)


def test_hyperbolic_zero(grid):
    tf = takagi(Kernel(grid, np.zeros((grid.n, grid.n)), "symmetric"))
    sh, p = hyperbolic_calculus(tf)
    assert np.all(sh.values == 0) and np.all(p.values == 0)


def test_hyperbolic_rank_one(grid):
    rng = np.random.default_rng(6)
    u = rng.normal(size=grid.n)
    u /= np.linalg.norm(u)
    s = 0.9
    tf = takagi(kernel_form(grid, s * np.outer(u, u), "symmetric"))
    sh, p = hyperbolic_calculus(tf)
    np.testing.assert_allclose(operator_form(sh), np.sinh(s) * np.outer(u, u), atol=1e-11)
    np.testing.assert_allclose(operator_form(p), (np.cosh(s) - 1) * np.outer(u, u), atol=1e-11)


def test_hyperbolic_against_truncated_series(grid):
    # sh(k) = k + k kbar k/3! + (k kbar)^2 k/5! + O(|k|^7) for small k
    rng = np.random.default_rng(7)
    k = random_kernel(rng, grid, "symmetric", op_norm=0.1)
    a = operator_form(k)
    tf = takagi(k)
    sh, p = hyperbolic_calculus(tf)
    akka = a @ a.conj()
    series_sh = a + akka @ a / 6.0 + akka @ akka @ a / 120.0
    err = np.linalg.norm(operator_form(sh) - series_sh)
    assert err < 10.0 * 0.1**7
    series_p = (a.conj() @ a) / 2.0 + (a.conj() @ a) @ (a.conj() @ a) / 24.0
    assert np.linalg.norm(operator_form(p) - series_p) < 10.0 * 0.1**6


def test_double_angle_zero(grid):
    tf = takagi(Kernel(grid, np.zeros((grid.n, grid.n)), "symmetric"))
    sh2, p2 = double_angle(tf)
    assert np.all(sh2.values == 0) and np.all(p2.values == 0)


@pytest.mark.parametrize("seed", range(4))
def test_operator_identities(grid, seed):
    rng = np.random.default_rng(100 + seed)
    k = random_kernel(rng, grid, "symmetric", op_norm=rng.uniform(0.1, 5.0))
    tf = takagi(k)
    sh, p = hyperbolic_calculus(tf)
    sh2, p2 = double_angle(tf)
    shbar = Kernel(grid, sh.values.conj(), "symmetric")
    # sh(2k) = 2 sh + 2 sh∘p
    lhs = sh2.values
    rhs = 2 * sh.values + 2 * compose(sh, p).values
    assert np.linalg.norm(lhs - rhs) <= 1e-10 * np.linalg.norm(lhs)
    # conj(sh)∘sh = p∘p + 2p
    lhs2 = compose(shbar, sh).values
    rhs2 = compose(p, p).values + 2 * p.values
    assert np.linalg.norm(lhs2 - rhs2) <= 1e-10 * max(1.0, np.linalg.norm(p.values) ** 2)


def test_hermiticity_and_positivity_of_p(grid):
    rng = np.random.default_rng(8)
    k = random_kernel(rng, grid, "symmetric", op_norm=3.0)
    tf = takagi(k)
    sh, p = hyperbolic_calculus(tf)
    sh2, p2 = double_angle(tf)
    for kern in (p, p2):
        a = operator_form(kern)
        assert np.linalg.norm(a - a.conj().T) <= 1e-10 * np.linalg.norm(a)
        assert np.min(np.linalg.eigvalsh(0.5 * (a + a.conj().T))) > -1e-10
    for kern in (sh, sh2):
        assert kern.symmetry_residual() < 1e-10


def test_takagi_choice_invariance(grid):
    # a different valid factorization (sign flips, rotations within
    # degenerate blocks) must produce identical derived kernels
    rng = np.random.default_rng(9)
    n = grid.n
    q, _ = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    sig = np.sort(np.abs(rng.normal(size=n)))[::-1]
    sig[3:8] = sig[3]  # degenerate block
    a = (q * sig) @ q.T
    k = kernel_form(grid, a, "symmetric")
    tf1 = takagi(k)
    # build an alternative factorization by rotating the degenerate block
    u2 = tf1.U.copy()
    block = slice(3, 8)
    rot = np.linalg.qr(rng.normal(size=(5, 5)))[0]  # real orthogonal
    u2[:, block] = u2[:, block] @ rot
    u2[:, 0] *= -1.0
    tf2 = TakagiFactors(grid, u2, tf1.sigma.copy())
    assert np.linalg.norm(tf2.reconstruct() - a) <= 1e-9 * np.linalg.norm(a)
    for f1, f2 in zip(hyperbolic_calculus(tf1) + double_angle(tf1),
                      hyperbolic_calculus(tf2) + double_angle(tf2)):
        assert np.linalg.norm(f1.values - f2.values) <= 1e-9 * max(np.linalg.norm(f1.values), 1.0)


def test_k_from_sh2_roundtrip(grid):
    rng = np.random.default_rng(10)
    k = random_kernel(rng, grid, "symmetric", op_norm=1.2)
    tf = takagi(k)
    sh2, _ = double_angle(tf)
    tf_rec = k_from_sh2(sh2)
    np.testing.assert_allclose(np.sort(tf_rec.sigma), np.sort(tf.sigma), atol=1e-10)
    sh2_rec, p2_rec = double_angle(tf_rec)
    assert np.linalg.norm(sh2_rec.values - sh2.values) <= 1e-10 * np.linalg.norm(sh2.values)
    sh_a, p_a = hyperbolic_calculus(tf)
    sh_b, p_b = hyperbolic_calculus(tf_rec)
    assert np.linalg.norm(sh_a.values - sh_b.values) <= 1e-9 * np.linalg.norm(sh_a.values)
    assert np.linalg.norm(p_a.values - p_b.values) <= 1e-9 * max(1.0, np.linalg.norm(p_a.values))


def test_k_from_sh2_rank_one(grid):
    rng = np.random.default_rng(11)
    u = rng.normal(size=grid.n)
    u /= np.linalg.norm(u)
    s = 0.6
    sh2 = kernel_form(grid, np.sinh(2 * s) * np.outer(u, u), "symmetric")
    tf = k_from_sh2(sh2)
    assert tf.sigma[0] == pytest.approx(s, rel=1e-12)
    assert np.max(tf.sigma[1:]) < 1e-12


def test_k_from_sh2_zero(grid):
    sh2 = Kernel(grid, np.zeros((grid.n, grid.n)), "symmetric")
    tf = k_from_sh2(sh2)
    np.testing.assert_array_equal(tf.sigma, 0.0)
