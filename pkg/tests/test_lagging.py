"""Lagged sweep splitting, the truncated-inverse identity, and inner sweeps."""

import numpy as np
import pytest

from sndsa import (DGSpace, adversarial_ordering, build_H, build_system,
                   gauss_legendre_set, iterate_with_inners, lagged_sweeps,
                   make_preconditioner, solve_direct, split_H, sweep,
                   uniform_mesh, upwind_ordering, verify_lemma3)


def _sys(eps=5e-2, n=8, r=1, angles=2):
    space = DGSpace(uniform_mesh(0.0, 4.0, n), r)
    return build_system(space, gauss_legendre_set(angles), eps, 1.0, 1.0,
                        source=1.0)


def test_split_parts_sum_to_full_operator():
    sys = _sys()
    adv = adversarial_ordering(sys.space.mesh, sys.dirs, 0.5, seed=3)
    split = split_H(sys, adv)
    for d in range(sys.dirs.n):
        H = build_H(sys, d)
        gap = np.abs(split.H_le(d) + split.H_gt(d) - H).max()
        assert gap <= 1e-13 * np.abs(H).max()
        assert np.abs(split.H_gt(d)).max() > 0.0


def test_upwind_ordering_has_no_lagged_part():
    sys = _sys()
    ordering = upwind_ordering(sys.space.mesh, sys.dirs)
    split = split_H(sys, ordering)
    rng = np.random.default_rng(0)
    rhs = rng.standard_normal((sys.dirs.n, sys.n_dofs))
    for d in range(sys.dirs.n):
        assert np.abs(split.H_gt(d)).max() == 0.0
    once = lagged_sweeps(split, 1, rhs)
    for d in range(sys.dirs.n):
        exact = sweep(sys, d, ordering, rhs[d])
        assert np.abs(once[d] - exact).max() <= 1e-12 * np.abs(exact).max()


def test_lagged_sweeps_realize_truncated_neumann_series():
    sys = _sys()
    adv = adversarial_ordering(sys.space.mesh, sys.dirs, 0.5, seed=3)
    split = split_H(sys, adv)
    rng = np.random.default_rng(1)
    rhs = rng.standard_normal((sys.dirs.n, sys.n_dofs))
    I = np.eye(sys.n_dofs)
    for k in (1, 2, 3):
        out = lagged_sweeps(split, k, rhs)
        for d in range(sys.dirs.n):
            L_inv = np.linalg.inv(I + sys.eps * split.H_le(d))
            step = -sys.eps * (L_inv @ split.H_gt(d))
            series = np.zeros_like(I)
            power = I
            for _ in range(k):
                series = series + power
                power = power @ step
            dense = (series @ L_inv) @ rhs[d]
            assert np.abs(out[d] - dense).max() <= 1e-11 * np.abs(dense).max()


def test_lagged_sweeps_require_positive_count():
    sys = _sys()
    split = split_H(sys, upwind_ordering(sys.space.mesh, sys.dirs))
    with pytest.raises(ValueError):
        lagged_sweeps(split, 0, np.zeros((sys.dirs.n, sys.n_dofs)))


def test_verify_lemma3_on_random_instances():
    rng = np.random.default_rng(42)
    for k in (1, 2, 4):
        rep = verify_lemma3(rng.standard_normal((15, 15)),
                            rng.standard_normal((15, 15)),
                            rng.standard_normal((15, 15)), eps=0.05, k=k)
        assert rep.passed
        assert rep.discrepancy <= 1e-10
        assert rep.k == k and rep.n == 15
    row = rep.csv_row()
    assert row.startswith("lagged_sweep_identity,15,")
    assert row.endswith(",True")


def test_verify_lemma3_rejects_bad_input():
    rng = np.random.default_rng(2)
    A = rng.standard_normal((10, 10))
    with pytest.raises(ValueError):
        verify_lemma3(A, rng.standard_normal((9, 9)), A, eps=0.1, k=2)
    with pytest.raises(ValueError):
        verify_lemma3(A, A, A, eps=0.1, k=0)
    big = np.eye(101)
    with pytest.raises(ValueError):
        verify_lemma3(big, big, big, eps=0.1, k=2)
    # I + eps*H_le made exactly singular
    with pytest.raises(ValueError):
        verify_lemma3(-np.eye(10) / 0.1, A, A, eps=0.1, k=2)


def test_inner_sweeps_restore_convergence_under_adversarial_lagging():
    space = DGSpace(uniform_mesh(0.0, 2.0, 40), 2)
    sys = build_system(space, gauss_legendre_set(4), 1e-4, 1.0, 1.0,
                       source=lambda x, mu, : 2.0 + np.cos(x))
    adv = adversarial_ordering(space.mesh, sys.dirs, 0.5, seed=0)
    split = split_H(sys, adv)
    pc = make_preconditioner(sys, "ip")
    ref = solve_direct(sys)
    # tol sits above the direct reference's forward-error floor at this eps
    h0 = iterate_with_inners(sys, split, pc, n_inner=0, tol=1e-8,
                             reference=ref)
    h2 = iterate_with_inners(sys, split, pc, n_inner=2, tol=1e-8,
                             reference=ref)
    assert h2.converged
    assert (not h0.converged) or (h2.cumulative_sweeps[-1]
                                  < h0.cumulative_sweeps[-1])
