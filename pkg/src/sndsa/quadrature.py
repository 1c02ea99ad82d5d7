"""Angular quadrature for slab geometry.

Directions are the nodes of a Gauss-Legendre rule on [-1, 1]; the weights sum
to the slab normalization constant 2 (the 1D analogue of 4*pi).
"""

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class DirectionSet:
    """Angular directions mu_d with weights w_d. Treated as immutable."""

    mu: np.ndarray
    weights: np.ndarray
    normalization: float = field(default=2.0)

    @property
    def n(self) -> int:
        return self.mu.size


def gauss_legendre_set(n_angles: int) -> DirectionSet:
    """Symmetric Gauss-Legendre direction set with n_angles directions.

    n_angles must be even and positive so that no direction sits at mu = 0
    and the set is symmetric under mu -> -mu.
    """
    if n_angles <= 0 or n_angles % 2:
        raise ValueError("n_angles must be positive and even, got %r" % (n_angles,))
    mu, w = np.polynomial.legendre.leggauss(n_angles)
    ds = DirectionSet(mu=mu, weights=w)
    _validate(ds)
    return ds


def _validate(ds: DirectionSet) -> None:
    w, mu = ds.weights, ds.mu
    if np.any(w <= 0):
        raise ValueError("quadrature weights must be positive")
    if np.any(mu == 0.0):
        raise ValueError("direction set must not contain mu = 0")
    assert abs(w.sum() - ds.normalization) < 1e-13
    assert abs((w * mu).sum()) < 1e-13


def face_alpha(dirs: DirectionSet) -> float:
    """Angular mean of |mu|: (1/Sigma) sum_d w_d |mu_d|.

    Tends to 1/2 as the direction count grows. The jump-penalty coefficient
    of the scalar face matrix is half this value per face.
    """
    return float(np.sum(dirs.weights * np.abs(dirs.mu)) / dirs.normalization)
