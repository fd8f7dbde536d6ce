"""Symmetric eigendecomposition with a compiled kernel and a numpy fallback.

Two interchangeable backends solve the full symmetric eigenproblem:

``"compiled"``
    A Cython extension (:mod:`emogait._eigql`) implementing Householder
    tridiagonalization followed by the implicit-shift QL iteration, capped
    at ``30 * dim`` total sweeps.
``"numpy"``
    :func:`numpy.linalg.eigh` (LAPACK), used when the extension is not
    built or when selected explicitly.

The default mode, ``auto``, is fixed at import time: without the extension
it is plain numpy; with it, each solve dispatches on the matrix dimension,
since benchmarking shows the compiled kernel ahead for small matrices
(lower call overhead) and LAPACK's blocked solver ahead for large ones
(see ``benchmarks/bench_eig.py``).  The dispatch depends only on the input
dimension, so repeated runs stay byte-identical.  The environment variable
``EMOGAIT_EIG_BACKEND`` (``auto``, ``compiled`` or ``numpy``) overrides the
default, and :func:`use_backend` switches temporarily, which the test
suite and the benchmark use to compare backends.

Whatever the backend, results are normalized to a single convention so that
repeated runs produce identical bytes: eigenvalues in descending order
(stable sort) and each eigenvector's first nonzero component positive.
"""

from __future__ import annotations

import os
from contextlib import contextmanager
from dataclasses import dataclass

import numpy as np

from .errors import IterationFailure

try:
    from . import _eigql
except ImportError:
    _eigql = None

# Sweep budget for the QL iteration, per matrix dimension.
QL_SWEEP_CAP_PER_DIM = 30

# In auto mode, matrices of this dimension or below go to the compiled
# kernel and larger ones to LAPACK (empirical crossover, bench_eig.py).
AUTO_DIM_THRESHOLD = 16

# Components with magnitude at or below this are treated as zero when the
# sign convention looks for the first nonzero entry of a unit vector.
_SIGN_EPS = 1e-12


def available_backends() -> tuple[str, ...]:
    return ("compiled", "numpy") if _eigql is not None else ("numpy",)


def _resolve(name: str) -> str:
    if name == "auto":
        return "auto" if _eigql is not None else "numpy"
    if name not in ("compiled", "numpy"):
        raise ValueError(f"unknown eigensolver backend {name!r}")
    if name == "compiled" and _eigql is None:
        raise ValueError("compiled eigensolver backend is not built")
    return name


_active = _resolve(os.environ.get("EMOGAIT_EIG_BACKEND", "auto"))


def get_backend() -> str:
    """Name of the backend currently answering :func:`eigh_descending`."""
    return _active


@contextmanager
def use_backend(name: str):
    """Temporarily select an eigensolver backend (``compiled``/``numpy``)."""
    global _active
    previous = _active
    _active = _resolve(name)
    try:
        yield
    finally:
        _active = previous


@dataclass(frozen=True)
class EigenPair:
    """Full eigendecomposition of a symmetric matrix.

    ``eigenvalues`` are sorted in descending order; column ``i`` of
    ``eigenvectors`` is the unit eigenvector paired with ``eigenvalues[i]``,
    sign-fixed so its first nonzero component is positive.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> np.ndarray:
        """``V @ diag(w) @ V.T``, symmetrized exactly."""
        v = self.eigenvectors
        m = (v * self.eigenvalues) @ v.T
        return 0.5 * (m + m.T)


def _solve_numpy(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    try:
        return np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise IterationFailure(f"numpy eigensolver failed to converge: {exc}") from None


def _solve_compiled(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    w, v, iterations = _eigql.ql_eigh(a, QL_SWEEP_CAP_PER_DIM)
    if iterations < 0:
        cap = QL_SWEEP_CAP_PER_DIM * a.shape[0]
        raise IterationFailure(f"QL iteration exceeded {cap} sweeps")
    return w, v


def eigh_descending(a: np.ndarray) -> EigenPair:
    """Eigendecomposition of an exactly-symmetric float64 matrix.

    The caller is responsible for symmetry; this function applies only the
    ordering and sign conventions on top of the active backend.
    """
    a = np.ascontiguousarray(a, dtype=np.float64)
    mode = _active
    if mode == "auto":
        mode = "compiled" if a.shape[0] <= AUTO_DIM_THRESHOLD else "numpy"
    if mode == "compiled":
        w, v = _solve_compiled(a)
    else:
        w, v = _solve_numpy(a)
    order = np.argsort(-w, kind="stable")
    w = np.ascontiguousarray(w[order])
    v = np.ascontiguousarray(v[:, order])
    # Sign convention: first component of each column exceeding _SIGN_EPS in
    # magnitude is made positive (unit columns always have one).
    first = (np.abs(v) > _SIGN_EPS).argmax(axis=0)
    signs = np.sign(v[first, np.arange(v.shape[1])])
    v *= signs
    w.setflags(write=False)
    v.setflags(write=False)
    return EigenPair(eigenvalues=w, eigenvectors=v)
