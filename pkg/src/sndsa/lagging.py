"""Lagged transport sweeps for orderings with reassigned face couplings.

When a sweep ordering marks interior faces as lagged, the per-direction
operator splits as H^(d) = H_le^(d) + H_gt^(d): the kept part makes
I + eps H_le block lower triangular in the sweep's element order, while the
lagged part collects the couplings that are applied against a previous
iterate. Running k sweeps from a zero start applies the truncated Neumann
series

    Mhat_k^{-1} = sum_{l < k} (-eps L^{-1} H_gt)^l L^{-1},   L = I + eps H_le,

an approximation of (I + eps H)^{-1} with error O(eps^k). verify_lemma3
checks the exact algebraic identity behind that statement on dense inputs.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .mesh import SweepOrdering
from .system import TransportSystem, source_iteration


class SplitSystem:
    """Per-direction splitting of H induced by a sweep ordering.

    Holds, for each direction, the lagged coupling part of mu_d G + F^(d)
    (the face blocks listed in ordering.lagged) so that
    H_gt = M_t^{-1} C_d and H_le = H - H_gt. I + eps H_le is block lower
    triangular in the ordering's element order.
    """

    def __init__(self, sys: TransportSystem, ordering: SweepOrdering):
        self.sys = sys
        self.ordering = ordering
        self.eps = sys.eps
        space = sys.space
        nloc = space.n_local
        self._lagged_part = []
        for d in range(sys.dirs.n):
            op = (sys.mu[d] * sys.G + sys.F[d]).tocsr()
            rows, cols, data = [], [], []
            for f in ordering.lagged[d]:
                if sys.mu[d] > 0:
                    e_row, e_col = f + 1, f
                else:
                    e_row, e_col = f, f + 1
                block = op[space.dof_slice(e_row), space.dof_slice(e_col)].toarray()
                r = np.arange(nloc) + e_row * nloc
                c = np.arange(nloc) + e_col * nloc
                rows.append(np.repeat(r, nloc))
                cols.append(np.tile(c, nloc))
                data.append(block.ravel())
            if data:
                C = sp.coo_matrix((np.concatenate(data),
                                   (np.concatenate(rows), np.concatenate(cols))),
                                  shape=(sys.n_dofs, sys.n_dofs)).tocsr()
            else:
                C = sp.csr_matrix((sys.n_dofs, sys.n_dofs))
            self._lagged_part.append(C)

    def H_gt(self, d: int) -> np.ndarray:
        """Dense lagged part M_t^{-1} C_d."""
        return self.sys.mass_solve(self._lagged_part[d].toarray())

    def H_le(self, d: int) -> np.ndarray:
        """Dense kept part H^(d) - H_gt^(d)."""
        op = (self.sys.mu[d] * self.sys.G + self.sys.F[d]
              - self._lagged_part[d]).toarray()
        return self.sys.mass_solve(op)


def split_H(sys: TransportSystem, ordering: SweepOrdering) -> SplitSystem:
    """Split every direction of sys along the ordering's lagged faces."""
    return SplitSystem(sys, ordering)


def lagged_sweeps(split: SplitSystem, k: int, rhs) -> np.ndarray:
    """k lagged sweeps from a zero start against a fixed right-hand side.

    rhs[d] is direction d's right-hand side in the (I + eps H^(d)) x = rhs
    sense. The result applies the truncated Neumann series Mhat_k^{-1} to
    each direction; with no lagged faces every k returns the exact sweep.
    """
    if k < 1:
        raise ValueError("need at least one sweep, got k=%r" % (k,))
    sys = split.sys
    rhs = np.asarray(rhs, dtype=float)
    solver = sys.sweep_solver(split.ordering)
    out = np.zeros((sys.dirs.n, sys.n_dofs))
    for d in range(sys.dirs.n):
        b = sys.M_t @ rhs[d]
        x = np.zeros(sys.n_dofs)
        for _ in range(k):
            x = solver.solve_direction(d, b, x)
        out[d] = x
    return out


@dataclass(frozen=True)
class SplitIdentityReport:
    """Outcome of one dense check of the truncated-sweep identity."""

    n: int
    eps: float
    k: int
    discrepancy: float
    tolerance: float

    CSV_HEADER = "check,n,eps,k,discrepancy,tolerance,passed"

    @property
    def passed(self) -> bool:
        return self.discrepancy <= self.tolerance

    def summary(self) -> str:
        return ("lagged-sweep identity: n=%d eps=%.3e k=%d "
                "max discrepancy %.3e (tol %.3e) %s"
                % (self.n, self.eps, self.k, self.discrepancy,
                   self.tolerance, "PASS" if self.passed else "FAIL"))

    def csv_row(self) -> str:
        return "lagged_sweep_identity,%d,%.16e,%d,%.16e,%.16e,%s" % (
            self.n, self.eps, self.k, self.discrepancy, self.tolerance,
            self.passed)


def verify_lemma3(H_le, H_gt, B, eps: float, k: int,
                  tolerance: float = 1e-10) -> SplitIdentityReport:
    """Check Mhat_k^{-1} scrH = (I - (-eps L^{-1} H_gt)^k) Mtilde^{-1} scrH.

    Here L = I + eps H_le, Mtilde = I + eps (H_le + H_gt), and
    scrH = Mtilde - B for an arbitrary matrix B. Dense evaluation of both
    sides, so the inputs are limited to n <= 100. Singular L or Mtilde make
    the instance invalid.
    """
    H_le = np.asarray(H_le, dtype=float)
    H_gt = np.asarray(H_gt, dtype=float)
    B = np.asarray(B, dtype=float)
    n = H_le.shape[0]
    if H_le.shape != (n, n) or H_gt.shape != (n, n) or B.shape != (n, n):
        raise ValueError("inputs must be square matrices of one size")
    if n > 100:
        raise ValueError("dense check limited to n <= 100, got n=%d" % (n,))
    if k < 1:
        raise ValueError("need at least one sweep, got k=%r" % (k,))
    eye = np.eye(n)
    L = eye + eps * H_le
    M_full = eye + eps * (H_le + H_gt)
    for name, mat in (("I + eps H_le", L), ("I + eps H", M_full)):
        if 1.0 / np.linalg.cond(mat) < 1e-14:
            raise ValueError("invalid instance: %s is numerically singular"
                             % (name,))
    scrH = M_full - B
    L_inv = np.linalg.inv(L)
    step = -eps * (L_inv @ H_gt)
    series = eye.copy()
    power = eye
    for _ in range(1, k):
        power = power @ step
        series = series + power
    lhs = (series @ L_inv) @ scrH
    rhs = (eye - power @ step) @ np.linalg.solve(M_full, scrH)
    discrepancy = float(np.abs(lhs - rhs).max())
    return SplitIdentityReport(n=n, eps=float(eps), k=int(k),
                               discrepancy=discrepancy, tolerance=tolerance)


def iterate_with_inners(sys: TransportSystem, split: SplitSystem, precond,
                        n_inner: int = 2, update_flux_each_sweep: bool = False,
                        max_iters: int = 40, tol: float = 1e-12,
                        reference=None):
    """Preconditioned source iteration with extra sweeps per outer step.

    Each outer step runs n_inner + 1 sweeps per direction under the split's
    ordering, refreshing lagged face values every sweep; the scattering
    source is frozen unless update_flux_each_sweep is set. Returns the
    IterationHistory of the run.
    """
    _, history = source_iteration(
        sys, split.ordering, precond, max_iters=max_iters, tol=tol,
        n_inner=n_inner, update_flux_each_sweep=update_flux_each_sweep,
        reference=reference)
    return history
