"""Sweeps, scattering application, and source iteration on small systems."""

import numpy as np
import pytest
import scipy.sparse as sp

from sndsa import (DGSpace, FactorizationError, SweepSolver, apply_P0,
                   apply_S_eps, build_H, build_system, compute_residual,
                   gauss_legendre_set, make_preconditioner, solve_direct,
                   source_iteration, sweep, uniform_mesh, upwind_ordering)


def _small(eps=0.2, n=6, r=2, angles=4, **kw):
    space = DGSpace(uniform_mesh(0.0, 3.0, n), r)
    dirs = gauss_legendre_set(angles)
    return build_system(space, dirs, eps, 1.3, 0.4, **kw)


def _ordering(sys):
    return upwind_ordering(sys.space.mesh, sys.dirs)


def test_sweep_matches_dense_solve():
    sys = _small()
    ordering = _ordering(sys)
    rng = np.random.default_rng(1)
    rhs = rng.standard_normal(sys.n_dofs)
    I = np.eye(sys.n_dofs)
    for d in range(sys.dirs.n):
        dense = np.linalg.solve(I + sys.eps * build_H(sys, d), rhs)
        gap = np.abs(sweep(sys, d, ordering, rhs) - dense).max()
        assert gap <= 1e-11 * np.abs(dense).max()


def test_apply_S_eps_matches_dense_operator():
    sys = _small(eps=0.15)
    ordering = _ordering(sys)
    rng = np.random.default_rng(2)
    phi = rng.standard_normal(sys.n_dofs)
    scat = phi - sys.eps ** 2 * sys.mass_solve(sys.M_a @ phi)
    dense = np.zeros(sys.n_dofs)
    I = np.eye(sys.n_dofs)
    for d in range(sys.dirs.n):
        dense += sys.dirs.weights[d] * np.linalg.solve(
            I + sys.eps * build_H(sys, d), scat)
    dense /= sys.dirs.normalization
    out = apply_S_eps(sys, ordering, phi)
    assert np.abs(out - dense).max() <= 1e-11 * np.abs(dense).max()


def test_streaming_free_scattering_is_identity():
    # at eps = 0 each direction solve collapses to M_t x = M_t phi
    sys = _small(eps=0.0)
    ordering = _ordering(sys)
    rng = np.random.default_rng(3)
    phi = rng.standard_normal(sys.n_dofs)
    out = apply_S_eps(sys, ordering, phi)
    assert np.abs(out - phi).max() <= 1e-12 * np.abs(phi).max()


def test_angular_average_projection():
    sys = _small()
    rng = np.random.default_rng(4)
    psi = rng.standard_normal((sys.dirs.n, sys.n_dofs))
    p = apply_P0(sys, psi)
    assert np.abs(apply_P0(sys, p) - p).max() < 1e-13
    assert np.abs(p[0] - sys.scalar_flux(psi) / 2.0).max() < 1e-13


def test_directional_source_and_inflow_vectors():
    sys = _small(source=lambda x, mu: np.where(mu > 0.0, x, 0.0),
                 inflow=0.7)
    for d, m in enumerate(sys.mu):
        if m > 0:
            assert np.abs(sys.q[d]).max() > 0.0
        else:
            assert np.abs(sys.q[d]).max() == 0.0
    nloc = sys.space.n_local
    for d, m in enumerate(sys.mu):
        vec = sys.q_inc[d]
        if m > 0:
            expected = 1.5 * m * 0.7 * sys.space.trace_left
            assert np.allclose(vec[:nloc], expected, atol=1e-14)
            assert np.abs(vec[nloc:]).max() == 0.0
        else:
            expected = 1.5 * abs(m) * 0.7 * sys.space.trace_right
            assert np.allclose(vec[-nloc:], expected, atol=1e-14)
            assert np.abs(vec[:-nloc]).max() == 0.0


def test_negative_eps_rejected():
    with pytest.raises(ValueError):
        _small(eps=-0.1)


def test_residual_requires_positive_eps():
    sys = _small(eps=0.0)
    with pytest.raises(ValueError):
        compute_residual(sys, np.zeros((sys.dirs.n, sys.n_dofs)))


def test_direct_solve_has_small_residual():
    sys = _small(eps=1e-2, source=lambda x: 1.0 + np.sin(x))
    psi = solve_direct(sys)
    assert compute_residual(sys, psi) < 1e-10


def test_source_iteration_reaches_direct_solution():
    sys = _small(eps=0.5, source=lambda x: 1.0 + 0.2 * x)
    ref = solve_direct(sys)
    psi, hist = source_iteration(sys, _ordering(sys), reference=ref,
                                 tol=1e-11, max_iters=400)
    assert hist.converged
    assert not hist.diverged
    assert np.abs(psi - ref).max() < 1e-10
    assert hist.cumulative_sweeps[-1] == hist.n_iterations * sys.dirs.n


def test_zero_source_converges_immediately():
    sys = _small(source=0.0)
    psi, hist = source_iteration(sys, _ordering(sys))
    assert hist.converged
    assert hist.n_iterations == 0
    assert np.abs(psi).max() == 0.0


def test_warm_start_converges_in_one_iteration():
    sys = _small(eps=0.5, source=1.0)
    ref = solve_direct(sys)
    psi, hist = source_iteration(sys, _ordering(sys), psi0=ref,
                                 reference=ref, tol=1e-9)
    assert hist.converged
    assert hist.n_iterations == 1


def test_thick_iteration_stalls_without_preconditioning():
    sys = _small(eps=1e-3, n=12, r=1, angles=2, source=1.0)
    psi, hist = source_iteration(sys, _ordering(sys), max_iters=30)
    assert not hist.converged
    err = np.array(hist.errors)
    ratios = err[-5:] / err[-6:-1]
    # per-step reduction no better than 1 - O(eps)
    assert ratios.min() >= 1.0 - 50.0 * sys.eps


def test_ip_dsa_accelerates_thick_iteration():
    sys = _small(eps=1e-3, n=12, r=1, angles=2, source=1.0)
    pc = make_preconditioner(sys, "ip")
    # tol sits above the correction's round-off floor of about 1e-10 here
    psi, hist = source_iteration(sys, _ordering(sys), precond=pc, tol=1e-8)
    assert hist.converged
    assert hist.n_iterations <= 10


def test_update_flux_each_sweep_matches_frozen_fixed_point():
    sys = _small(eps=0.4, source=lambda x: np.cos(x))
    ref = solve_direct(sys)
    _, h_frozen = source_iteration(sys, _ordering(sys), n_inner=1,
                                   reference=ref, tol=1e-10, max_iters=400)
    _, h_updated = source_iteration(sys, _ordering(sys), n_inner=1,
                                    update_flux_each_sweep=True,
                                    reference=ref, tol=1e-10, max_iters=400)
    assert h_frozen.converged and h_updated.converged


def test_amplifying_correction_is_flagged_divergent():
    class Amplifier:
        def apply(self, r):
            return 10.0 * r

    sys = _small(eps=0.5, source=1.0)
    psi, hist = source_iteration(sys, _ordering(sys), precond=Amplifier(),
                                 max_iters=40)
    assert hist.diverged
    assert not hist.converged
    assert hist.n_iterations < 40


def test_operator_norm_doubles_under_mesh_refinement():
    norms = {}
    for n in (8, 16):
        space = DGSpace(uniform_mesh(0.0, 2.0, n), 1)
        sys = build_system(space, gauss_legendre_set(2), 0.1, 1.0, 0.5)
        norms[n] = np.linalg.norm(build_H(sys, 1), 2)
    ratio = norms[16] / norms[8]
    assert 1.5 <= ratio <= 2.5


@pytest.mark.filterwarnings("ignore::scipy.linalg.LinAlgWarning")
def test_singular_sweep_block_raises():
    sys = _small(n=3, r=1, angles=2)
    bad = sp.lil_matrix((sys.n_dofs, sys.n_dofs))
    bad[0, 1] = 1.0  # element 0 block has a zero diagonal after LU
    sys._A[0] = bad.tocsr()
    with pytest.raises(FactorizationError):
        SweepSolver(sys, _ordering(sys))
