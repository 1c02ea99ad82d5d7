import numpy as np
import pytest

from sndsa import face_alpha, gauss_legendre_set


def test_s2_directions_and_weights():
    ds = gauss_legendre_set(2)
    assert ds.n == 2
    assert ds.normalization == 2.0
    assert np.allclose(np.abs(ds.mu), 0.5773502691896257, atol=1e-12)
    assert ds.mu[0] < 0.0 < ds.mu[1]
    assert np.allclose(ds.weights, 1.0, atol=1e-12)


@pytest.mark.parametrize("n_angles", [2, 4, 6, 8])
def test_moment_identities(n_angles):
    ds = gauss_legendre_set(n_angles)
    w, mu = ds.weights, ds.mu
    assert abs(w.sum() - 2.0) < 1e-13
    assert abs((w * mu).sum()) < 1e-13
    assert abs((w * mu ** 2).sum() - 2.0 / 3.0) < 1e-13
    assert abs((w * mu * np.abs(mu)).sum()) < 1e-13


def test_face_alpha_values():
    # S2: both weights 1, |mu| = 1/sqrt(3)
    assert abs(face_alpha(gauss_legendre_set(2)) - 0.5773502691896257) < 1e-12
    # converges to the half-range average 1/2 under angular refinement
    assert abs(face_alpha(gauss_legendre_set(64)) - 0.5) < 1e-3
    alphas = [face_alpha(gauss_legendre_set(n)) for n in (2, 4, 8, 16)]
    assert all(a2 < a1 for a1, a2 in zip(alphas, alphas[1:]))


@pytest.mark.parametrize("bad", [0, -2, 3, 7])
def test_invalid_direction_counts_rejected(bad):
    with pytest.raises(ValueError):
        gauss_legendre_set(bad)
