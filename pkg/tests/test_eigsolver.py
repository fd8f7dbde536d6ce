import numpy as np
import pytest
from numpy.testing import assert_allclose

import emogait.eigsolver as eigsolver
from emogait.eigsolver import (
    available_backends,
    eigh_descending,
    get_backend,
    use_backend,
)

from oracles import random_symmetric

needs_compiled = pytest.mark.skipif(
    "compiled" not in available_backends(), reason="compiled kernel not built"
)


def test_unknown_backend_rejected():
    with pytest.raises(ValueError):
        with use_backend("blas"):
            pass


def test_use_backend_restores_previous():
    before = get_backend()
    with use_backend("numpy"):
        assert get_backend() == "numpy"
    assert get_backend() == before


@needs_compiled
def test_backends_agree_to_solver_precision(rng):
    for n in (2, 5, 16, 40, 90):
        a = random_symmetric(rng, n)
        with use_backend("compiled"):
            pc = eigh_descending(a)
        with use_backend("numpy"):
            pn = eigh_descending(a)
        scale = max(1.0, np.abs(pc.eigenvalues).max())
        assert_allclose(pc.eigenvalues, pn.eigenvalues, atol=1e-11 * scale * n)
        assert_allclose(pc.reconstruct(), a, atol=1e-11 * scale * n)
        assert_allclose(pn.reconstruct(), a, atol=1e-11 * scale * n)


@needs_compiled
def test_auto_dispatch_matches_forced_backends(rng):
    small = random_symmetric(rng, eigsolver.AUTO_DIM_THRESHOLD)
    large = random_symmetric(rng, eigsolver.AUTO_DIM_THRESHOLD + 1)
    with use_backend("auto"):
        auto_small = eigh_descending(small)
        auto_large = eigh_descending(large)
    with use_backend("compiled"):
        forced_small = eigh_descending(small)
    with use_backend("numpy"):
        forced_large = eigh_descending(large)
    assert auto_small.eigenvalues.tobytes() == forced_small.eigenvalues.tobytes()
    assert auto_small.eigenvectors.tobytes() == forced_small.eigenvectors.tobytes()
    assert auto_large.eigenvalues.tobytes() == forced_large.eigenvalues.tobytes()
    assert auto_large.eigenvectors.tobytes() == forced_large.eigenvectors.tobytes()


@needs_compiled
def test_compiled_handles_degenerate_spectra():
    for a in (
        np.zeros((4, 4)),
        np.eye(7),
        np.diag([3.0, 3.0, 3.0, 1.0]),
        np.array([[0.0, 2.0], [2.0, 0.0]]),
    ):
        with use_backend("compiled"):
            pair = eigh_descending(a)
        assert_allclose(pair.reconstruct(), a, atol=1e-12)


def test_eigenvalue_order_and_signs(backend, rng):
    a = random_symmetric(rng, 12)
    pair = eigh_descending(a)
    assert (np.diff(pair.eigenvalues) <= 1e-12).all()
    for col in pair.eigenvectors.T:
        first = col[np.abs(col) > 1e-12][0]
        assert first > 0
