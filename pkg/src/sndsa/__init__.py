"""1D slab discrete-ordinates transport with DG elements and DSA.

The package assembles the scaled discrete transport system, solves it by
preconditioned source iteration with per-direction sweeps, and provides
three diffusion preconditioners (direct symmetric penalty form, its
nonsymmetric variant, and a two-part additive approximation) together with
lagged-sweep inner iteration and an independent oracle suite verifying the
analytical claims the solver relies on.
"""

from .dg import (DGSpace, as_coefficient, assemble_average_jump,
                 assemble_face_adjoint, assemble_face_upwind,
                 assemble_gradient, assemble_jump_average,
                 assemble_jump_penalty, assemble_load, assemble_mass,
                 assemble_moments, assemble_stiffness, write_matrix_market)
from .dsa import (AdditivePreconditioner, CgEmbedding, DirectPreconditioner,
                  DsaOperators, apply_additive_Eeps, apply_preconditioned_step,
                  assemble_D0, assemble_D1, assemble_ip, assemble_mip,
                  assemble_sip_direct, build_cg_embedding, build_operators,
                  make_preconditioner, mip_penalty_coefficient)
from .errors import FactorizationError, InvalidCoefficientError
from .history import IterationHistory
from .lagging import (SplitIdentityReport, SplitSystem, iterate_with_inners,
                      lagged_sweeps, split_H, verify_lemma3)
from .mesh import Mesh, SweepOrdering, adversarial_ordering, uniform_mesh, upwind_ordering
from .oracles import (OracleReport, check_condition_scaling,
                      check_neumann_remainder,
                      check_quadrature_and_nullspace_identities,
                      check_singular_perturbation, run_suite)
from .quadrature import DirectionSet, face_alpha, gauss_legendre_set
from .system import (SweepSolver, TransportSystem, apply_P0, apply_S_eps,
                     build_H, build_system, compute_residual, solve_direct,
                     source_iteration, sweep)

__all__ = [
    "AdditivePreconditioner", "CgEmbedding", "DGSpace",
    "DirectPreconditioner", "DirectionSet", "DsaOperators",
    "FactorizationError", "InvalidCoefficientError", "IterationHistory",
    "Mesh", "OracleReport", "SplitIdentityReport", "SplitSystem",
    "SweepOrdering", "SweepSolver", "TransportSystem",
    "adversarial_ordering", "apply_P0", "apply_S_eps",
    "apply_additive_Eeps", "apply_preconditioned_step", "as_coefficient",
    "assemble_D0", "assemble_D1", "assemble_average_jump",
    "assemble_face_adjoint", "assemble_face_upwind", "assemble_gradient",
    "assemble_ip", "assemble_jump_average", "assemble_jump_penalty",
    "assemble_load", "assemble_mass", "assemble_mip", "assemble_moments",
    "assemble_sip_direct", "assemble_stiffness", "build_H", "build_cg_embedding",
    "build_operators", "build_system", "check_condition_scaling",
    "check_neumann_remainder", "check_quadrature_and_nullspace_identities",
    "check_singular_perturbation", "compute_residual", "face_alpha",
    "gauss_legendre_set", "iterate_with_inners", "lagged_sweeps",
    "make_preconditioner", "mip_penalty_coefficient", "run_suite",
    "solve_direct", "source_iteration", "split_H", "sweep",
    "uniform_mesh", "upwind_ordering", "verify_lemma3",
    "write_matrix_market",
]
