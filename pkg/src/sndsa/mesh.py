"""1D meshes and per-direction sweep orderings.

Interior face f (0-based) sits between elements f and f+1 and carries the
fixed normal n = +1 (left element to right element); jumps are
[[u]] = u_left - u_right. Boundary faces use the outward normal.
"""

from dataclasses import dataclass

import numpy as np

from .quadrature import DirectionSet


@dataclass(frozen=True)
class Mesh:
    vertices: np.ndarray

    @property
    def n_elements(self) -> int:
        return self.vertices.size - 1

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.vertices)

    @property
    def n_interior_faces(self) -> int:
        return self.n_elements - 1


def uniform_mesh(a: float, b: float, n_elements: int) -> Mesh:
    if not n_elements > 0:
        raise ValueError("n_elements must be positive, got %r" % (n_elements,))
    if not b > a:
        raise ValueError("domain must satisfy a < b, got [%r, %r]" % (a, b))
    return Mesh(vertices=np.linspace(a, b, n_elements + 1))


@dataclass(frozen=True)
class SweepOrdering:
    """Element visit order per direction plus a lag classification.

    orders[d] lists elements upwind-first for direction d. lagged[d] is the
    set of interior faces whose downwind coupling is excluded from the sweep
    operator (it is applied with the previous iterate instead). With every
    set empty the sweep inverts I + eps*H^(d) exactly.
    """

    orders: np.ndarray
    lagged: tuple

    def n_lagged(self, d: int) -> int:
        return len(self.lagged[d])


def upwind_ordering(mesh: Mesh, dirs: DirectionSet) -> SweepOrdering:
    """Left-to-right order for mu > 0, right-to-left for mu < 0; no lagging."""
    n = mesh.n_elements
    fwd = np.arange(n)
    orders = np.stack([fwd if mu > 0 else fwd[::-1] for mu in dirs.mu])
    return SweepOrdering(orders=orders, lagged=tuple(frozenset() for _ in dirs.mu))


def adversarial_ordering(mesh: Mesh, dirs: DirectionSet, fraction: float,
                         seed: int) -> SweepOrdering:
    """Reassign a fraction of each direction's downwind couplings for lagging.

    Per direction, floor(fraction * n_interior_faces) faces are drawn without
    replacement from a generator seeded with `seed`, so the classification is
    reproducible. fraction = 0 recovers the upwind ordering.
    """
    if not 0.0 <= fraction <= 1.0:
        raise ValueError("fraction must lie in [0, 1], got %r" % (fraction,))
    base = upwind_ordering(mesh, dirs)
    rng = np.random.default_rng(seed)
    n_couplings = mesh.n_interior_faces
    k = int(np.floor(fraction * n_couplings))
    lagged = tuple(
        frozenset(rng.choice(n_couplings, size=k, replace=False).tolist())
        for _ in dirs.mu
    )
    return SweepOrdering(orders=base.orders, lagged=lagged)
