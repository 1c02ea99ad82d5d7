"""Assembly checks against hand-computed element matrices."""

import numpy as np
import pytest

from sndsa import (DGSpace, InvalidCoefficientError, assemble_average_jump,
                   assemble_face_adjoint, assemble_face_upwind,
                   assemble_gradient, assemble_jump_average,
                   assemble_jump_penalty, assemble_load, assemble_mass,
                   assemble_moments, assemble_stiffness, face_alpha,
                   gauss_legendre_set, uniform_mesh)


def test_linear_mass_block():
    # h * [[1/3, 1/6], [1/6, 1/3]] per element for unit coefficient
    space = DGSpace(uniform_mesh(0.0, 1.6, 2), 1)
    M = assemble_mass(space, 1.0).toarray()
    block = 0.8 * np.array([[1.0 / 3.0, 1.0 / 6.0], [1.0 / 6.0, 1.0 / 3.0]])
    expected = np.zeros((4, 4))
    expected[:2, :2] = block
    expected[2:, 2:] = block
    assert np.abs(M - expected).max() < 1e-14


def test_mass_quadrature_exact_for_stated_coefficient_degree():
    space = DGSpace(uniform_mesh(0.0, 1.5, 3), 2)
    coeff = lambda x: 1.0 + x ** 2
    M = assemble_mass(space, coeff, coeff_degree=2).toarray()
    M_over = assemble_mass(space, coeff, coeff_degree=10).toarray()
    assert np.abs(M - M_over).max() < 1e-14


def test_mass_sign_validation():
    space = DGSpace(uniform_mesh(0.0, 1.0, 3), 1)
    with pytest.raises(InvalidCoefficientError):
        assemble_mass(space, -1.0, sign="positive")
    with pytest.raises(InvalidCoefficientError):
        assemble_mass(space, lambda x: x - 10.0, sign="nonnegative")
    assemble_mass(space, lambda x: x - 10.0)  # unvalidated by default


def test_gradient_block_is_width_independent():
    block = np.array([[-0.5, 0.5], [-0.5, 0.5]])
    for b in (1.0, 7.0):
        space = DGSpace(uniform_mesh(0.0, b, 2), 1)
        G = assemble_gradient(space).toarray()
        assert np.abs(G[:2, :2] - block).max() < 1e-14
        assert np.abs(G[2:, 2:] - block).max() < 1e-14
        assert np.abs(G[:2, 2:]).max() == 0.0


def test_gradient_integrates_test_against_trial_derivative():
    space = DGSpace(uniform_mesh(0.0, 1.5, 4), 3)
    u = np.polynomial.Polynomial([0.0, -2.0, 0.0, 1.0])   # x^3 - 2x
    v = np.polynomial.Polynomial([1.0, 0.0, 0.5])         # 1 + x^2/2
    ud = space.interpolate(lambda x: u(x))
    vd = space.interpolate(lambda x: v(x))
    product = (v * u.deriv()).integ()
    exact = product(1.5) - product(0.0)
    val = vd @ (assemble_gradient(space) @ ud)
    assert abs(val - exact) < 1e-13


def test_stiffness_integrates_broken_derivatives():
    space = DGSpace(uniform_mesh(0.0, 2.0, 5), 2)
    u = space.interpolate(lambda x: x ** 2)
    K = assemble_stiffness(space, 1.0)
    poly = np.polynomial.Polynomial([0.0, 0.0, 0.0, 4.0 / 3.0])  # int (2x)^2
    assert abs(u @ (K @ u) - poly(2.0)) < 1e-12


def test_constant_load_scales_with_width():
    space = DGSpace(uniform_mesh(0.0, 2.4, 3), 0)
    f = assemble_load(space, 1.0)
    assert np.allclose(f, 0.8, atol=1e-14)


def test_single_element_upwind_face_matrices():
    space = DGSpace(uniform_mesh(0.0, 1.0, 1), 1)
    F = assemble_face_upwind(space, 1.0).toarray()
    Ft = assemble_face_adjoint(space, 1.0).toarray()
    assert np.abs(F - np.diag([1.5, -0.5])).max() < 1e-14
    assert np.abs(Ft - np.diag([0.5, 0.5])).max() < 1e-14


def test_face_matrices_reject_zero_mu():
    space = DGSpace(uniform_mesh(0.0, 1.0, 2), 1)
    with pytest.raises(ValueError):
        assemble_face_upwind(space, 0.0)
    with pytest.raises(ValueError):
        assemble_face_adjoint(space, 0.0)


def test_adjoint_identity_for_random_directions():
    space = DGSpace(uniform_mesh(0.0, 2.0, 5), 2)
    G = assemble_gradient(space)
    rng = np.random.default_rng(3)
    for mu in rng.uniform(-1.0, 1.0, size=4):
        lhs = (mu * G + assemble_face_upwind(space, mu)).toarray()
        rhs = (-mu * G.T + assemble_face_adjoint(space, mu)).toarray()
        assert np.abs(lhs - rhs).max() < 1e-13 * np.abs(lhs).max()


def test_moments_are_weighted_direction_sums():
    space = DGSpace(uniform_mesh(0.0, 2.0, 4), 1)
    dirs = gauss_legendre_set(4)
    F0, F1, F1t = assemble_moments(space, dirs)
    acc0 = sum(w * assemble_face_upwind(space, mu).toarray()
               for mu, w in zip(dirs.mu, dirs.weights))
    acc1 = sum(w * mu * assemble_face_upwind(space, mu).toarray()
               for mu, w in zip(dirs.mu, dirs.weights))
    acc1t = sum(w * mu * assemble_face_adjoint(space, mu).toarray()
                for mu, w in zip(dirs.mu, dirs.weights))
    assert np.abs(F0.toarray() - acc0 / 2.0).max() < 1e-14
    assert np.abs(F1.toarray() - acc1 / 2.0).max() < 1e-14
    assert np.abs(F1t.toarray() - acc1t / 2.0).max() < 1e-14


def test_moment_face_forms():
    # F0 is the jump penalty at alpha/2 per face, F1 = -(1/3) of the
    # jump-average form, F1t = +(1/3) of the average-jump form
    space = DGSpace(uniform_mesh(0.0, 3.0, 6), 2)
    dirs = gauss_legendre_set(8)
    F0, F1, F1t = assemble_moments(space, dirs)
    alpha = face_alpha(dirs)
    pen = assemble_jump_penalty(space, np.full(7, alpha / 2.0))
    assert np.abs((F0 - pen).toarray()).max() < 1e-14
    assert np.abs((F1 + assemble_jump_average(space) / 3.0).toarray()).max() < 1e-14
    assert np.abs((F1t - assemble_average_jump(space) / 3.0).toarray()).max() < 1e-14


def test_jump_penalty_requires_one_coefficient_per_face():
    space = DGSpace(uniform_mesh(0.0, 1.0, 4), 1)
    with pytest.raises(ValueError):
        assemble_jump_penalty(space, np.ones(4))


def test_jump_penalty_is_symmetric_positive_semidefinite():
    space = DGSpace(uniform_mesh(0.0, 1.0, 5), 2)
    B = assemble_jump_penalty(space, np.arange(1.0, 7.0)).toarray()
    assert np.abs(B - B.T).max() < 1e-14
    assert np.linalg.eigvalsh(B).min() > -1e-13
    # continuous interpolants with zero boundary values are not penalized
    u = space.interpolate(lambda x: np.sin(np.pi * x))
    assert abs(u @ (B @ u)) < 1e-12


def test_degree_zero_space_and_negative_degree():
    space = DGSpace(uniform_mesh(0.0, 1.0, 3), 0)
    assert space.n_local == 1
    assert np.abs(assemble_gradient(space).toarray()).max() == 0.0
    with pytest.raises(ValueError):
        DGSpace(uniform_mesh(0.0, 1.0, 3), -1)


def test_interpolation_nodes_reproduce_polynomials():
    space = DGSpace(uniform_mesh(0.0, 2.0, 4), 3)
    u = space.interpolate(lambda x: x ** 3 - x)
    x = space.node_coords
    assert np.abs(u - (x ** 3 - x)).max() < 1e-13
