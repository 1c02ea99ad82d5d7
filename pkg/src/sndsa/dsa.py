"""Diffusion synthetic acceleration operators and preconditioners.

The slow angular-average error modes of source iteration satisfy, to leading
order in eps, a discrete diffusion equation. This module assembles the
operators of that equation in two independent ways:

  * from the transport moments: D0 = (1/3) G^T M_t^{-1} G - F1t M_t^{-1} G
    + G^T M_t^{-1} F1 + M_a, the penalty moment F0, and the angular
    correlation D1 = -(1/Sigma) sum_d w_d Ft^(d) M_t^{-1} F^(d);
  * directly as an interior-penalty bilinear form (penalty, weighted
    stiffness, absorption, and the two face consistency terms).

For constant opacities the two routes agree entrywise. The preconditioners
solve D delta = M_t r / eps^2 with D the symmetric (SIP), nonsymmetric (IP),
or penalty-swapped (MIP) operator, or apply the two-part additive
approximation E_eps built from a continuous zero-boundary solve and a jump
complement solve.
"""

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .dg import DGSpace, _FaceAccumulator, assemble_jump_penalty, \
    assemble_stiffness
from .errors import FactorizationError
from .quadrature import face_alpha
from .system import TransportSystem


def assemble_D0(sys: TransportSystem) -> sp.csr_matrix:
    """Leading diffusion operator built from the assembled moments."""
    mt_inv = sys.mt_inverse()
    Gt = sys.G.T.tocsr()
    D0 = (Gt @ mt_inv @ sys.G) / 3.0 - sys.F1t @ mt_inv @ sys.G \
        + Gt @ mt_inv @ sys.F1 + sys.M_a
    return D0.tocsr()


def assemble_D1(sys: TransportSystem) -> sp.csr_matrix:
    """First-order correction -(1/Sigma) sum_d w_d Ft^(d) M_t^{-1} F^(d).

    Vanishes against continuous zero-boundary vectors from both sides; on a
    single-element mesh only the boundary faces contribute.
    """
    mt_inv = sys.mt_inverse()
    acc = sp.csr_matrix((sys.n_dofs, sys.n_dofs))
    for w, fd, ftd in zip(sys.dirs.weights, sys.F, sys.Ft):
        acc = acc + w * (ftd @ mt_inv @ fd)
    return (-acc / sys.dirs.normalization).tocsr()


def assemble_ip(sys: TransportSystem) -> sp.csr_matrix:
    """Nonsymmetric variant: drops the G^T M_t^{-1} F1 consistency term.

    Against continuous zero-boundary vectors it reduces to the weighted
    stiffness plus absorption form, but on two or more elements the operator
    itself is nonsymmetric.
    """
    if sys.eps <= 0:
        raise ValueError("interior-penalty operators require eps > 0")
    mt_inv = sys.mt_inverse()
    Gt = sys.G.T.tocsr()
    D = sys.F0 / sys.eps + (Gt @ mt_inv @ sys.G) / 3.0 \
        - sys.F1t @ mt_inv @ sys.G + sys.M_a
    return D.tocsr()


def mip_penalty_coefficient(eps: float, sigma_t: float, h: float,
                            c_penalty: float = 4.0) -> float:
    """Penalty floor max(1/(4 eps), c_penalty/(sigma_t h)).

    Keeps the jump penalty bounded away from zero when the mesh is optically
    thin, where the plain 1/eps scaling loses control of the jumps.
    """
    if eps <= 0 or sigma_t <= 0 or h <= 0 or c_penalty <= 0:
        raise ValueError("penalty inputs must be positive")
    return max(0.25 / eps, c_penalty / (sigma_t * h))


def _consistency_terms(sys: TransportSystem):
    """Face consistency blocks of the interior-penalty form.

    Returns (all-face term, interior-only transpose term); the first realizes
    -sum_f n [[u]] {kappa v'} with kappa = 1/(3 sigma_t) at the face, the
    second -sum_f,interior n {kappa u'} [[v]].
    """
    space = sys.space
    mesh = space.mesh
    a, b = space.trace_right, space.trace_left
    kappa = 1.0 / (3.0 * sys.sigma_t(mesh.vertices))
    # physical derivative traces of element e at its right/left endpoint
    dr = [space.dtrace_right * (2.0 / mesh.widths[e])
          for e in range(mesh.n_elements)]
    dl = [space.dtrace_left * (2.0 / mesh.widths[e])
          for e in range(mesh.n_elements)]
    t4 = _FaceAccumulator(space)
    t5 = _FaceAccumulator(space)
    for f in range(mesh.n_interior_faces):
        k = kappa[f + 1]
        da, db = dr[f], dl[f + 1]
        t4.add(f, f, -0.5 * k * np.outer(da, a))
        t4.add(f, f + 1, 0.5 * k * np.outer(da, b))
        t4.add(f + 1, f, -0.5 * k * np.outer(db, a))
        t4.add(f + 1, f + 1, 0.5 * k * np.outer(db, b))
        t5.add(f, f, -0.5 * k * np.outer(a, da))
        t5.add(f, f + 1, -0.5 * k * np.outer(a, db))
        t5.add(f + 1, f, 0.5 * k * np.outer(b, da))
        t5.add(f + 1, f + 1, 0.5 * k * np.outer(b, db))
    last = mesh.n_elements - 1
    t4.add(0, 0, kappa[0] * np.outer(dl[0], b))
    t4.add(last, last, -kappa[-1] * np.outer(dr[last], a))
    return t4.tocsr(), t5.tocsr()


def _penalty_form(sys: TransportSystem, coefficients) -> sp.csr_matrix:
    space = sys.space
    stiff = assemble_stiffness(space, lambda x: 1.0 / (3.0 * sys.sigma_t(x)),
                               coeff_degree=2)
    t4, t5 = _consistency_terms(sys)
    pen = assemble_jump_penalty(space, coefficients)
    return (pen + stiff + sys.M_a + t4 + t5).tocsr()


def assemble_sip_direct(sys: TransportSystem) -> sp.csr_matrix:
    """Interior-penalty assembly with jump coefficient alpha/(2 eps).

    For constant opacities this matches F0/eps + D0 entrywise; the boundary
    consistency term has no transpose partner, so exact symmetry fails in the
    first and last element blocks by an h-independent amount.
    """
    if sys.eps <= 0:
        raise ValueError("interior-penalty operators require eps > 0")
    alpha = face_alpha(sys.dirs)
    coeffs = np.full(sys.space.mesh.n_elements + 1, 0.5 * alpha / sys.eps)
    return _penalty_form(sys, coeffs)


def assemble_mip(sys: TransportSystem, c_penalty: float = 4.0) -> sp.csr_matrix:
    """Interior-penalty assembly with the floored penalty coefficient.

    Identical to assemble_sip_direct except each face takes
    max over adjacent elements of mip_penalty_coefficient(eps, sigma_t(mid),
    h, c_penalty).
    """
    if sys.eps <= 0:
        raise ValueError("interior-penalty operators require eps > 0")
    mesh = sys.space.mesh
    mids = 0.5 * (mesh.vertices[:-1] + mesh.vertices[1:])
    st = sys.sigma_t(mids)
    per_element = [mip_penalty_coefficient(sys.eps, st[e], mesh.widths[e],
                                           c_penalty)
                   for e in range(mesh.n_elements)]
    coeffs = np.empty(mesh.n_elements + 1)
    coeffs[0] = per_element[0]
    coeffs[-1] = per_element[-1]
    for f in range(mesh.n_interior_faces):
        coeffs[f + 1] = max(per_element[f], per_element[f + 1])
    return _penalty_form(sys, coeffs)


class CgEmbedding:
    """Continuous zero-boundary subspace and its jump complement.

    P embeds continuous piecewise polynomials vanishing at the domain
    boundary into the broken space (n_elements * degree - 1 columns), R is
    the multiplicity-weighted left inverse with R P = I, and Q spans a
    complement: one jump column per interior face plus one indicator per
    boundary trace dof, n_elements + 1 columns with P^T Q = 0.
    """

    def __init__(self, P: sp.csr_matrix, R: sp.csr_matrix, Q: sp.csr_matrix):
        self.P = P
        self.R = R
        self.Q = Q


def build_cg_embedding(space: DGSpace) -> CgEmbedding:
    """Build the continuous embedding; degree 0 has no continuous subspace."""
    r = space.degree
    if r < 1:
        raise ValueError("continuous embedding requires degree >= 1")
    n = space.mesh.n_elements
    nloc = space.n_local
    n_cg = n * r - 1
    rows, cols = [], []
    mult = np.zeros(n_cg)
    for e in range(n):
        for i in range(nloc):
            g = e * r + i
            if 0 < g < n * r:
                rows.append(e * nloc + i)
                cols.append(g - 1)
                mult[g - 1] += 1.0
    data = np.ones(len(rows))
    P = sp.csr_matrix((data, (rows, cols)), shape=(space.n_dofs, n_cg))
    R = sp.diags(1.0 / mult) @ P.T
    qr, qc, qd = [], [], []
    for f in range(space.mesh.n_interior_faces):
        qr.extend([f * nloc + r, (f + 1) * nloc])
        qc.extend([f + 1, f + 1])
        qd.extend([1.0, -1.0])
    qr.extend([0, (n - 1) * nloc + r])
    qc.extend([0, n])
    qd.extend([1.0, 1.0])
    Q = sp.csr_matrix((qd, (qr, qc)), shape=(space.n_dofs, n + 1))
    return CgEmbedding(P, R.tocsr(), Q)


class DsaOperators:
    """All assembled DSA operators for one transport system.

    Fields: D0 and D1 (moment-assembled), D_eps = F0/eps + D0, D_ip, the
    direct assemblies B_sip_direct and B_mip, the measured asymmetry of
    D_eps, and lazily cached LU factorizations. Construction checks the two
    provably symmetric parts (the penalty moment F0 and the weighted
    stiffness plus absorption block) and refuses to continue if either is
    asymmetric beyond round-off.
    """

    def __init__(self, sys: TransportSystem, c_penalty: float = 4.0):
        if sys.eps <= 0:
            raise ValueError("DSA operators require eps > 0")
        self.sys = sys
        self.c_penalty = float(c_penalty)
        self.D0 = assemble_D0(sys)
        self.D1 = assemble_D1(sys)
        self.D_eps = (sys.F0 / sys.eps + self.D0).tocsr()
        self.D_ip = assemble_ip(sys)
        self.B_sip_direct = assemble_sip_direct(sys)
        self.B_mip = assemble_mip(sys, c_penalty)
        Gt = sys.G.T.tocsr()
        volume = (Gt @ sys.mt_inverse() @ sys.G) / 3.0 + sys.M_a
        for name, mat in (("penalty moment", sys.F0),
                          ("stiffness plus absorption", volume)):
            gap = float(abs(mat - mat.T).max())
            if gap > 1e-12 * max(float(abs(mat).max()), 1.0):
                raise AssertionError(
                    "%s block lost symmetry: gap %.3e" % (name, gap))
        self.asymmetry = float(abs(self.D_eps - self.D_eps.T).max())
        self._lu = {}
        self._embedding_lu = {}

    def factorization(self, kind: str):
        """LU of the chosen operator; kinds sip, ip, mip."""
        if kind not in self._lu:
            mat = {"sip": self.D_eps, "ip": self.D_ip, "mip": self.B_mip}[kind]
            try:
                self._lu[kind] = splu(mat.tocsc())
            except RuntimeError as exc:
                raise FactorizationError("%s operator: %s" % (kind, exc))
        return self._lu[kind]

    def embedding_factorizations(self, emb: CgEmbedding):
        """LUs of P^T D0 P and Q^T F0 Q for the additive preconditioner."""
        key = id(emb)
        entry = self._embedding_lu.get(key)
        if entry is None or entry[0] is not emb:
            cg = (emb.P.T @ self.D0 @ emb.P).tocsc()
            jump = (emb.Q.T @ self.sys.F0 @ emb.Q).tocsc()
            try:
                lu_p = splu(cg)
            except RuntimeError as exc:
                raise FactorizationError(
                    "continuous diffusion block P^T D0 P: %s" % (exc,))
            try:
                lu_q = splu(jump)
            except RuntimeError as exc:
                raise FactorizationError(
                    "jump penalty block Q^T F0 Q: %s" % (exc,))
            entry = (emb, lu_p, lu_q)
            self._embedding_lu[key] = entry
        return entry[1], entry[2]


def apply_additive_Eeps(sys: TransportSystem, ops: DsaOperators,
                        emb: CgEmbedding, rhs) -> np.ndarray:
    """E_eps rhs with E_eps = (1/eps) E_P + (I - E_P D0) E_Q (I - D0 E_P).

    E_P = P (P^T D0 P)^{-1} P^T solves on the continuous zero-boundary
    subspace, E_Q = Q (Q^T F0 Q)^{-1} Q^T on the jump complement. Of the
    three E_P-type solves in the formula, the leading one is shared with the
    (I - D0 E_P) factor, so two factorized applications suffice.
    """
    lu_p, lu_q = ops.embedding_factorizations(emb)
    rhs = np.asarray(rhs, dtype=float)

    def e_p(y):
        return emb.P @ lu_p.solve(emb.P.T @ y)

    def e_q(y):
        return emb.Q @ lu_q.solve(emb.Q.T @ y)

    u = e_p(rhs)
    w = e_q(rhs - ops.D0 @ u)
    return u / sys.eps + w - e_p(ops.D0 @ w)


class DirectPreconditioner:
    """DSA correction delta = (eps^2 D)^{-1} M_t r for one assembled D."""

    def __init__(self, sys: TransportSystem, ops: DsaOperators, kind: str):
        self.sys = sys
        self.ops = ops
        self.kind = kind
        self._lu = ops.factorization(kind)

    def apply(self, r) -> np.ndarray:
        y = self.sys.M_t @ np.asarray(r, dtype=float)
        return self._lu.solve(y) / self.sys.eps ** 2


class AdditivePreconditioner:
    """DSA correction delta = (1/eps) E_eps M_t r."""

    kind = "additive"

    def __init__(self, sys: TransportSystem, ops: DsaOperators,
                 emb: CgEmbedding):
        self.sys = sys
        self.ops = ops
        self.emb = emb
        ops.embedding_factorizations(emb)

    def apply(self, r) -> np.ndarray:
        y = self.sys.M_t @ np.asarray(r, dtype=float)
        return apply_additive_Eeps(self.sys, self.ops, self.emb, y) / self.sys.eps


def build_operators(sys: TransportSystem, c_penalty: float = 4.0) -> DsaOperators:
    """DsaOperators for sys, cached on the system instance."""
    key = ("ops", float(c_penalty))
    if key not in sys._preconds:
        sys._preconds[key] = DsaOperators(sys, c_penalty)
    return sys._preconds[key]


def make_preconditioner(sys: TransportSystem, kind: str,
                        c_penalty: float = 4.0):
    """Preconditioner for source iteration; kinds none, sip, ip, mip, additive."""
    kind = (kind or "none").lower()
    if kind == "none":
        return None
    if kind not in ("sip", "ip", "mip", "additive"):
        raise ValueError("unknown preconditioner kind %r" % (kind,))
    if sys.eps <= 0:
        raise ValueError("DSA preconditioning requires eps > 0")
    key = (kind, float(c_penalty))
    if key not in sys._preconds:
        ops = build_operators(sys, c_penalty)
        if kind == "additive":
            emb = build_cg_embedding(sys.space)
            pc = AdditivePreconditioner(sys, ops, emb)
        else:
            pc = DirectPreconditioner(sys, ops, kind)
        sys._preconds[key] = pc
    return sys._preconds[key]


def apply_preconditioned_step(sys: TransportSystem, kind: str, phi_half,
                              phi_prev, c_penalty: float = 4.0) -> np.ndarray:
    """One DSA-corrected update: phi_half + delta(phi_half - phi_prev)."""
    phi_half = np.asarray(phi_half, dtype=float)
    pc = make_preconditioner(sys, kind, c_penalty)
    if pc is None:
        return phi_half.copy()
    return phi_half + pc.apply(phi_half - np.asarray(phi_prev, dtype=float))
