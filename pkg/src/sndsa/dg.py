"""Discontinuous Galerkin spaces and matrix assembly on 1D meshes.

Elements carry a nodal Lagrange basis on Gauss-Lobatto points, so for
degree >= 1 the only dofs with nonzero face traces are the endpoint dofs.
Dofs are numbered element-contiguously: element e owns
[e*(r+1), (e+1)*(r+1)).

Face forms follow the convention of mesh.py: interior normals point left to
right, [[u]] = u_left - u_right, and boundary jumps/averages are the
one-sided trace with the outward normal.
"""

import numpy as np
import scipy.io
import scipy.sparse as sp
from numpy.polynomial import legendre as npleg
from scipy.special import roots_jacobi

from .errors import InvalidCoefficientError
from .mesh import Mesh
from .quadrature import DirectionSet


def _gauss_lobatto(degree: int) -> np.ndarray:
    if degree == 0:
        return np.zeros(1)
    if degree == 1:
        return np.array([-1.0, 1.0])
    interior, _ = roots_jacobi(degree - 1, 1.0, 1.0)
    return np.concatenate(([-1.0], interior, [1.0]))


def as_coefficient(c):
    """Wrap a scalar or callable as a vectorized coefficient function."""
    if callable(c):
        return lambda x: np.broadcast_to(np.asarray(c(x), dtype=float), np.shape(x)).copy()
    val = float(c)
    return lambda x: np.full(np.shape(x), val)


class DGSpace:
    """Broken polynomial space of a fixed degree on a mesh."""

    def __init__(self, mesh: Mesh, degree: int):
        if degree < 0:
            raise ValueError("degree must be nonnegative, got %r" % (degree,))
        self.mesh = mesh
        self.degree = degree
        self.ref_nodes = _gauss_lobatto(degree)
        # Lagrange basis in Legendre coordinates; column k interpolates dof k.
        vander = npleg.legvander(self.ref_nodes, degree)
        self._leg = np.linalg.inv(vander)
        self._quad_cache = {}
        self.trace_left = self.eval_basis(np.array([-1.0]))[0]
        self.trace_right = self.eval_basis(np.array([1.0]))[0]
        self.dtrace_left = self.eval_basis_deriv(np.array([-1.0]))[0]
        self.dtrace_right = self.eval_basis_deriv(np.array([1.0]))[0]

    @property
    def n_local(self) -> int:
        return self.degree + 1

    @property
    def n_dofs(self) -> int:
        return self.mesh.n_elements * self.n_local

    def dof_slice(self, e: int) -> slice:
        return slice(e * self.n_local, (e + 1) * self.n_local)

    def eval_basis(self, pts: np.ndarray) -> np.ndarray:
        """Basis values on the reference element, shape (npts, r+1)."""
        return npleg.legvander(pts, self.degree) @ self._leg

    def eval_basis_deriv(self, pts: np.ndarray) -> np.ndarray:
        """Reference derivatives d/dxi, shape (npts, r+1)."""
        if self.degree == 0:
            return np.zeros((np.shape(pts)[0], 1))
        dcoef = npleg.legder(self._leg, axis=0)
        return npleg.legval(pts, dcoef).T

    def quad(self, n_points: int):
        """Cached Gauss-Legendre rule with tabulated basis values."""
        if n_points not in self._quad_cache:
            xi, w = np.polynomial.legendre.leggauss(n_points)
            self._quad_cache[n_points] = (xi, w, self.eval_basis(xi),
                                          self.eval_basis_deriv(xi))
        return self._quad_cache[n_points]

    def quad_points_physical(self, xi: np.ndarray) -> np.ndarray:
        """Map reference points to each element, shape (n_elements, npts)."""
        v = self.mesh.vertices
        return v[:-1, None] + (xi[None, :] + 1.0) * self.mesh.widths[:, None] / 2.0

    @property
    def node_coords(self) -> np.ndarray:
        """Physical coordinates of all dofs, shape (n_dofs,)."""
        return self.quad_points_physical(self.ref_nodes).ravel()

    def interpolate(self, f) -> np.ndarray:
        return as_coefficient(f)(self.node_coords)


def _quad_count(space: DGSpace, coeff_degree: int) -> int:
    return max(1, int(np.ceil((2 * space.degree + coeff_degree + 1) / 2.0)))


def _block_diag_csr(space: DGSpace, blocks: np.ndarray) -> sp.csr_matrix:
    nloc = space.n_local
    idx = np.arange(space.n_dofs).reshape(-1, nloc)
    rows = np.repeat(idx[:, :, None], nloc, axis=2)
    cols = np.repeat(idx[:, None, :], nloc, axis=1)
    mat = sp.coo_matrix((blocks.ravel(), (rows.ravel(), cols.ravel())),
                        shape=(space.n_dofs, space.n_dofs))
    return mat.tocsr()


def assemble_mass(space: DGSpace, coeff, coeff_degree: int = 0,
                  sign: str = "any") -> sp.csr_matrix:
    """Weighted mass matrix, entries int_K coeff * phi_n * phi_m dx.

    Quadrature is exact for polynomial coefficients of degree <= coeff_degree.
    sign = "positive" or "nonnegative" validates the coefficient samples.
    """
    nq = _quad_count(space, coeff_degree)
    xi, w, phi, _ = space.quad(nq)
    xq = space.quad_points_physical(xi)
    vals = as_coefficient(coeff)(xq)
    if sign == "positive" and not np.all(vals > 0):
        raise InvalidCoefficientError(
            "coefficient must be positive, min sample %g" % vals.min())
    if sign == "nonnegative" and not np.all(vals >= 0):
        raise InvalidCoefficientError(
            "coefficient must be nonnegative, min sample %g" % vals.min())
    scale = vals * w[None, :] * (space.mesh.widths[:, None] / 2.0)
    blocks = np.einsum("eq,qm,qn->emn", scale, phi, phi)
    return _block_diag_csr(space, blocks)


def assemble_stiffness(space: DGSpace, coeff, coeff_degree: int = 0) -> sp.csr_matrix:
    """Broken stiffness matrix, entries int_K coeff * phi_n' * phi_m' dx."""
    nq = _quad_count(space, coeff_degree)
    xi, w, _, dphi = space.quad(nq)
    xq = space.quad_points_physical(xi)
    vals = as_coefficient(coeff)(xq)
    scale = vals * w[None, :] * (2.0 / space.mesh.widths[:, None])
    blocks = np.einsum("eq,qm,qn->emn", scale, dphi, dphi)
    return _block_diag_csr(space, blocks)


def assemble_gradient(space: DGSpace) -> sp.csr_matrix:
    """Broken gradient matrix, entries int_K phi_n' phi_m dx (h-independent)."""
    nq = max(1, space.degree + 1)
    _, w, phi, dphi = space.quad(nq)
    ref = np.einsum("q,qm,qn->mn", w, phi, dphi)
    blocks = np.broadcast_to(ref, (space.mesh.n_elements,) + ref.shape)
    return _block_diag_csr(space, np.ascontiguousarray(blocks))


def assemble_load(space: DGSpace, f, coeff_degree: int = 0) -> np.ndarray:
    """Load vector, entries int_K f * phi_m dx."""
    nq = _quad_count(space, coeff_degree)
    xi, w, phi, _ = space.quad(nq)
    xq = space.quad_points_physical(xi)
    vals = as_coefficient(f)(xq)
    scale = vals * w[None, :] * (space.mesh.widths[:, None] / 2.0)
    return np.einsum("eq,qm->em", scale, phi).ravel()


class _FaceAccumulator:
    """Collects per-face outer-product blocks into one sparse matrix."""

    def __init__(self, space: DGSpace):
        self.space = space
        self.rows, self.cols, self.data = [], [], []

    def add(self, e_test: int, e_trial: int, block: np.ndarray):
        nloc = self.space.n_local
        r = np.arange(nloc) + e_test * nloc
        c = np.arange(nloc) + e_trial * nloc
        self.rows.append(np.repeat(r, nloc))
        self.cols.append(np.tile(c, nloc))
        self.data.append(block.ravel())

    def tocsr(self) -> sp.csr_matrix:
        n = self.space.n_dofs
        if not self.data:
            return sp.csr_matrix((n, n))
        mat = sp.coo_matrix(
            (np.concatenate(self.data),
             (np.concatenate(self.rows), np.concatenate(self.cols))),
            shape=(n, n))
        return mat.tocsr()


def assemble_face_upwind(space: DGSpace, mu: float) -> sp.csr_matrix:
    """Upwind face matrix for direction mu.

    Realizes -sum_f (mu n)[[u]]{v} + (1/2) sum_f |mu n| [[u]][[v]] over all
    faces, boundary traces one-sided. For mu != 0 the interior blocks reduce
    to the pure upwind stencil; boundary faces get mu-dependent weights on
    the trace dyads.
    """
    if mu == 0.0:
        raise ValueError("face matrices require mu != 0")
    acc = _FaceAccumulator(space)
    a = space.trace_right  # left element's trace at the face
    b = space.trace_left   # right element's trace at the face
    half = abs(mu) / 2.0
    aa, ab = np.outer(a, a), np.outer(a, b)
    ba, bb = np.outer(b, a), np.outer(b, b)
    for f in range(space.mesh.n_interior_faces):
        acc.add(f, f, (-mu / 2.0 + half) * aa)
        acc.add(f, f + 1, (mu / 2.0 - half) * ab)
        acc.add(f + 1, f, (-mu / 2.0 - half) * ba)
        acc.add(f + 1, f + 1, (mu / 2.0 + half) * bb)
    last = space.mesh.n_elements - 1
    acc.add(0, 0, (mu + half) * np.outer(b, b))          # outward normal -1
    acc.add(last, last, (-mu + half) * np.outer(a, a))   # outward normal +1
    return acc.tocsr()


def assemble_face_adjoint(space: DGSpace, mu: float) -> sp.csr_matrix:
    """Adjoint-variant face matrix for direction mu.

    Defined so that mu*G + F = -mu*G^T + F~ holds entrywise: the average
    coupling +(mu n){u}[[v]] lives on interior faces only, the |mu|/2 jump
    penalty on all faces.
    """
    if mu == 0.0:
        raise ValueError("face matrices require mu != 0")
    acc = _FaceAccumulator(space)
    a = space.trace_right
    b = space.trace_left
    half = abs(mu) / 2.0
    aa, ab = np.outer(a, a), np.outer(a, b)
    ba, bb = np.outer(b, a), np.outer(b, b)
    for f in range(space.mesh.n_interior_faces):
        acc.add(f, f, (mu / 2.0 + half) * aa)
        acc.add(f, f + 1, (mu / 2.0 - half) * ab)
        acc.add(f + 1, f, (-mu / 2.0 - half) * ba)
        acc.add(f + 1, f + 1, (-mu / 2.0 + half) * bb)
    last = space.mesh.n_elements - 1
    acc.add(0, 0, half * np.outer(b, b))
    acc.add(last, last, half * np.outer(a, a))
    return acc.tocsr()


def assemble_moments(space: DGSpace, dirs: DirectionSet):
    """Zeroth/first angular moments of the face matrices.

    Returns (F0, F1, F1t) with F0 = (1/Sigma) sum w_d F^(d),
    F1 = (1/Sigma) sum w_d mu_d F^(d), F1t likewise from the adjoint variant.
    """
    n = space.n_dofs
    f0 = sp.csr_matrix((n, n))
    f1 = sp.csr_matrix((n, n))
    f1t = sp.csr_matrix((n, n))
    for mu, w in zip(dirs.mu, dirs.weights):
        fd = assemble_face_upwind(space, mu)
        f0 = f0 + w * fd
        f1 = f1 + (w * mu) * fd
        f1t = f1t + (w * mu) * assemble_face_adjoint(space, mu)
    s = 1.0 / dirs.normalization
    return s * f0, s * f1, s * f1t


def assemble_jump_penalty(space: DGSpace, coefficients: np.ndarray) -> sp.csr_matrix:
    """sum_f c_f [[u]][[v]] with one coefficient per face.

    Faces are indexed 0..n_elements: face i sits at vertex i, so 0 and
    n_elements are the boundary faces.
    """
    c = np.asarray(coefficients, dtype=float)
    if c.size != space.mesh.n_elements + 1:
        raise ValueError("need one coefficient per face")
    acc = _FaceAccumulator(space)
    a, b = space.trace_right, space.trace_left
    for f in range(space.mesh.n_interior_faces):
        cf = c[f + 1]
        acc.add(f, f, cf * np.outer(a, a))
        acc.add(f, f + 1, -cf * np.outer(a, b))
        acc.add(f + 1, f, -cf * np.outer(b, a))
        acc.add(f + 1, f + 1, cf * np.outer(b, b))
    last = space.mesh.n_elements - 1
    acc.add(0, 0, c[0] * np.outer(b, b))
    acc.add(last, last, c[-1] * np.outer(a, a))
    return acc.tocsr()


def assemble_jump_average(space: DGSpace) -> sp.csr_matrix:
    """sum over all faces of n [[u]] {v} (boundary: n u v, outward normal)."""
    acc = _FaceAccumulator(space)
    a, b = space.trace_right, space.trace_left
    for f in range(space.mesh.n_interior_faces):
        acc.add(f, f, 0.5 * np.outer(a, a))
        acc.add(f, f + 1, -0.5 * np.outer(a, b))
        acc.add(f + 1, f, 0.5 * np.outer(b, a))
        acc.add(f + 1, f + 1, -0.5 * np.outer(b, b))
    last = space.mesh.n_elements - 1
    acc.add(0, 0, -np.outer(b, b))
    acc.add(last, last, np.outer(a, a))
    return acc.tocsr()


def assemble_average_jump(space: DGSpace) -> sp.csr_matrix:
    """sum over interior faces of n {u} [[v]]."""
    acc = _FaceAccumulator(space)
    a, b = space.trace_right, space.trace_left
    for f in range(space.mesh.n_interior_faces):
        acc.add(f, f, 0.5 * np.outer(a, a))
        acc.add(f, f + 1, 0.5 * np.outer(a, b))
        acc.add(f + 1, f, -0.5 * np.outer(b, a))
        acc.add(f + 1, f + 1, -0.5 * np.outer(b, b))
    return acc.tocsr()


def write_matrix_market(path, matrix) -> None:
    """Dump a matrix in coordinate format (1-based, 'general' symmetry)."""
    scipy.io.mmwrite(str(path), sp.coo_matrix(matrix), precision=16,
                     symmetry="general")
